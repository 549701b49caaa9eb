//! The closed catalog of slowly varying functions used to modulate
//! power-law decay.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A slowly varying function L: positive on (0, inf) with L(au)/L(u) -> 1
/// for every a > 0.
#[derive(Debug, Clone, PartialEq)]
pub enum SlowlyVarying<T> {
    /// L(u) = c with c > 0.
    Constant(T),
    /// L(u) = log(e + u).
    LogShifted,
    /// The function attached to the fractional-Gaussian-noise driver:
    /// piecewise `c*u` on (0,1] and
    /// `c * u^(3/2-H0) * (u^(H0-1/2) - (u-1)^(H0-1/2))` on [1, inf),
    /// normalized so that L(inf)^2 = H0(2H0-1). With this normalization the
    /// driver autocovariance satisfies gamma(x) ~ x^(2H0-2) L(x)^2 with unit
    /// constant, which is exactly what the Taqqu normalization d(.) assumes.
    FgnDriver { hurst: T },
}

impl<T: Scalar> SlowlyVarying<T> {
    pub fn constant(c: T) -> Result<Self> {
        if c <= T::zero() {
            return Err(Error::QuadratureDivergence(
                "constant slowly varying function must be positive".into(),
            ));
        }
        Ok(SlowlyVarying::Constant(c))
    }

    pub fn fgn_driver(hurst: T) -> Result<Self> {
        let half = T::from_f(0.5);
        if hurst <= half || hurst >= T::one() {
            return Err(Error::InvalidHurst {
                value: hurst.to_f64().unwrap_or(f64::NAN),
                range: "(1/2, 1) for the fGn driver function",
            });
        }
        Ok(SlowlyVarying::FgnDriver { hurst })
    }

    /// Evaluate L(u) for u > 0.
    pub fn eval(&self, u: T) -> T {
        match *self {
            SlowlyVarying::Constant(c) => c,
            SlowlyVarying::LogShifted => (T::E() + u).ln(),
            SlowlyVarying::FgnDriver { hurst } => {
                let half = T::from_f(0.5);
                let two = T::from_f(2.0);
                // scale so the limit at infinity is sqrt(H0(2H0-1))
                let c = (hurst * (two * hurst - T::one())).sqrt() / (hurst - half);
                if u <= T::one() {
                    c * u
                } else {
                    let p = hurst - half;
                    c * u.powf(T::from_f(1.5) - hurst) * (u.powf(p) - (u - T::one()).powf(p))
                }
            }
        }
    }

    /// Limit of L at infinity (all catalog entries converge).
    pub fn limit_at_infinity(&self) -> Option<T> {
        match *self {
            SlowlyVarying::Constant(c) => Some(c),
            SlowlyVarying::LogShifted => None,
            SlowlyVarying::FgnDriver { hurst } => {
                Some((hurst * (T::from_f(2.0) * hurst - T::one())).sqrt())
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SlowlyVarying::Constant(_) => "constant",
            SlowlyVarying::LogShifted => "log",
            SlowlyVarying::FgnDriver { .. } => "fgn_driver",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn slow_variation_discrepancy(l: &SlowlyVarying<f64>, a: f64, u: f64) -> f64 {
        (l.eval(a * u) / l.eval(u) - 1.0).abs()
    }

    #[test]
    fn catalog_is_positive() {
        let fns = [
            SlowlyVarying::constant(2.5f64).unwrap(),
            SlowlyVarying::LogShifted,
            SlowlyVarying::fgn_driver(0.75f64).unwrap(),
        ];
        for l in &fns {
            for &u in &[1e-3, 0.5, 1.0, 3.0, 1e4] {
                assert!(l.eval(u) > 0.0, "{} at {}", l.name(), u);
            }
        }
    }

    #[test]
    fn discrepancy_decreases_along_scale() {
        // |L(au)/L(u) - 1| must shrink as u runs through 1e2, 1e4, 1e6.
        let fns = [
            SlowlyVarying::constant(1.0f64).unwrap(),
            SlowlyVarying::LogShifted,
            SlowlyVarying::fgn_driver(0.7f64).unwrap(),
            SlowlyVarying::fgn_driver(0.9f64).unwrap(),
        ];
        for l in &fns {
            for &a in &[2.0, 10.0] {
                let d: Vec<f64> = [1e2, 1e4, 1e6]
                    .iter()
                    .map(|&u| slow_variation_discrepancy(l, a, u))
                    .collect();
                assert!(d[1] <= d[0] + 1e-15, "{} a={}: {:?}", l.name(), a, d);
                assert!(d[2] <= d[1] + 1e-15, "{} a={}: {:?}", l.name(), a, d);
            }
        }
    }

    #[test]
    fn fgn_driver_limit() {
        let l = SlowlyVarying::fgn_driver(0.8f64).unwrap();
        let lim = l.limit_at_infinity().unwrap();
        assert_relative_eq!(lim, (0.8f64 * 0.6).sqrt(), epsilon = 1e-14);
        assert_relative_eq!(l.eval(1e8), lim, epsilon = 1e-6);
        // continuous across the break at u = 1, though only at cusp rate
        // delta^(H0-1/2) from the right
        assert_relative_eq!(l.eval(1.0 - 1e-12), l.eval(1.0 + 1e-12), epsilon = 1e-3);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(SlowlyVarying::constant(0.0f64).is_err());
        assert!(SlowlyVarying::fgn_driver(0.5f64).is_err());
        assert!(SlowlyVarying::fgn_driver(1.0f64).is_err());
    }
}
