//! Floating-point abstraction for the numerical kernels.
//!
//! Everything downstream (synthesis, quadrature, solves) is written against
//! [`Scalar`] so the same code instantiates at `f32` or `f64`. The experiment
//! pipeline uses `f64`; the stated tolerances are not reachable in single
//! precision.

use std::fmt::Display;
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftNum;

pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum<Self>
    + FftNum
    + Display
    + Send
    + Sync
    + 'static
{
    /// Draw a standard normal variate.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Shorthand for converting an `f64` literal.
    #[inline]
    fn from_f(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    /// Shorthand for converting a length or index.
    #[inline]
    fn from_n(n: usize) -> Self {
        Self::from_usize(n).expect("size not representable")
    }
}

impl Scalar for f32 {
    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Scalar for f64 {
    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}
