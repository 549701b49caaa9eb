//! Moving-average kernels for the long-range-dependent driver and numerical
//! verification of the conditions they must satisfy: unit L2 norm, the
//! power-law envelope, and convergence of the envelope ratio.

use crate::error::{Error, Result};
use crate::quad::integrate_adaptive;
use crate::scalar::Scalar;
use crate::slowly_varying::SlowlyVarying;
use crate::special::{fgn_kernel_normalizer, moving_average_integral};

/// Catalog of moving-average kernels e(u), all vanishing for u <= 0.
#[derive(Debug, Clone)]
pub enum KernelKind<T> {
    /// Kernel whose moving average is unit-lag fractional Gaussian noise:
    /// `c * (u_+^(H0-1/2) - (u-1)_+^(H0-1/2))` with c chosen so the L2 norm
    /// is one.
    Fgn { hurst: T },
    /// `c * u^(H0-3/2)` on (1, inf) with c = sqrt(2 - 2 H0); the simplest
    /// kernel with an exactly constant envelope ratio.
    NormalizedPower { hurst: T },
}

#[derive(Debug, Clone)]
pub struct KernelSpec<T> {
    pub kind: KernelKind<T>,
    pub slow_vary: SlowlyVarying<T>,
}

impl<T: Scalar> KernelSpec<T> {
    /// The fGn kernel paired with its matched slowly varying function.
    pub fn fgn(hurst: T) -> Result<Self> {
        let slow_vary = SlowlyVarying::fgn_driver(hurst)?;
        Ok(KernelSpec {
            kind: KernelKind::Fgn { hurst },
            slow_vary,
        })
    }

    /// The truncated power kernel paired with the constant function.
    pub fn normalized_power(hurst: T) -> Result<Self> {
        if hurst <= T::from_f(0.5) || hurst >= T::one() {
            return Err(Error::InvalidHurst {
                value: hurst.to_f64().unwrap_or(f64::NAN),
                range: "(1/2, 1)",
            });
        }
        Ok(KernelSpec {
            kind: KernelKind::NormalizedPower { hurst },
            slow_vary: SlowlyVarying::constant(T::one())?,
        })
    }

    pub fn hurst(&self) -> T {
        match self.kind {
            KernelKind::Fgn { hurst } | KernelKind::NormalizedPower { hurst } => hurst,
        }
    }

    /// Evaluate e(u).
    pub fn eval(&self, u: T) -> T {
        if u <= T::zero() {
            return T::zero();
        }
        match self.kind {
            KernelKind::Fgn { hurst } => {
                let p = hurst - T::from_f(0.5);
                let c = fgn_kernel_normalizer(hurst);
                if u <= T::one() {
                    c * u.powf(p)
                } else {
                    c * (u.powf(p) - (u - T::one()).powf(p))
                }
            }
            KernelKind::NormalizedPower { hurst } => {
                if u <= T::one() {
                    T::zero()
                } else {
                    (T::from_f(2.0) - T::from_f(2.0) * hurst).sqrt()
                        * u.powf(hurst - T::from_f(1.5))
                }
            }
        }
    }
}

/// Measured outcome of the kernel condition checks.
#[derive(Debug, Clone)]
pub struct ConditionReport<T> {
    /// Quadrature of e^2 over (0, truncation].
    pub l2_norm_sq: T,
    /// Analytic estimate of the mass beyond the truncation, from the
    /// power-law envelope.
    pub l2_tail_estimate: T,
    /// |l2_norm_sq + tail - 1| within tolerance.
    pub l2_ok: bool,
    /// sup over a log grid of |e(u)| / (u^(H0-3/2) L(u)).
    pub envelope_sup: T,
    pub envelope_finite: bool,
    /// Envelope ratio averaged over the top decade.
    pub ratio_limit: T,
    /// Reference constant 1/sqrt(I) with I the moving-average integral.
    pub ratio_reference: T,
    /// Ratio fluctuation over the top decade below 1e-3 relative.
    pub ratio_converged: bool,
    /// e vanishes on (-inf, 0], checked pointwise.
    pub vanishes_left: bool,
}

impl<T: Scalar> ConditionReport<T> {
    pub fn passed(&self) -> bool {
        self.l2_ok && self.envelope_finite && self.ratio_converged && self.vanishes_left
    }
}

/// Run the numerical condition checks on a kernel up to `truncation`.
pub fn kernel_conditions_report<T: Scalar>(
    spec: &KernelSpec<T>,
    truncation: T,
) -> Result<ConditionReport<T>> {
    if truncation < T::from_f(1e3) {
        return Err(Error::TruncationTooSmall(
            truncation.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let hurst = spec.hurst();
    let tol = T::from_f(1e-9);

    // L2 norm: split at the kink u = 1, integrate the tail on a log scale.
    let e_sq = |u: T| {
        let v = spec.eval(u);
        v * v
    };
    let near = integrate_adaptive(&e_sq, T::zero(), T::one(), tol);
    let mid = integrate_adaptive(&e_sq, T::one(), T::from_f(2.0), tol);
    let far = integrate_adaptive(
        &|v: T| {
            let u = v.exp();
            e_sq(u) * u
        },
        T::from_f(2.0).ln(),
        truncation.ln(),
        tol,
    );
    let l2 = near + mid + far;

    // Envelope ratio |e(u)| / (u^(H0-3/2) L(u)) on a log grid.
    let ratio =
        |u: T| spec.eval(u).abs() / (u.powf(hurst - T::from_f(1.5)) * spec.slow_vary.eval(u));
    let points = 240usize;
    let lo = T::from_f(1e-2).ln();
    let hi = truncation.ln();
    let mut sup = T::zero();
    for i in 0..=points {
        let u = (lo + (hi - lo) * T::from_n(i) / T::from_n(points)).exp();
        sup = sup.max(ratio(u));
    }
    let envelope_finite = sup.is_finite();

    // Limit estimate over the top decade.
    let dec_lo = truncation / T::from_f(10.0);
    let mut rmin = T::max_value();
    let mut rmax = T::zero();
    let mut rsum = T::zero();
    let dec_pts = 32usize;
    for i in 0..=dec_pts {
        let u = dec_lo * (truncation / dec_lo).powf(T::from_n(i) / T::from_n(dec_pts));
        let r = ratio(u);
        rmin = rmin.min(r);
        rmax = rmax.max(r);
        rsum += r;
    }
    let rmean = rsum / T::from_n(dec_pts + 1);
    let ratio_converged = rmean > T::zero() && (rmax - rmin) / rmean < T::from_f(1e-3);

    let reference = T::one() / moving_average_integral(hurst).sqrt();

    // mass beyond the truncation, integrating the envelope:
    // ratio^2 L(u)^2 u^(2H0-3) from truncation to infinity
    let lval = spec.slow_vary.eval(truncation);
    let tail =
        rmean * rmean * lval * lval * truncation.powf(T::from_f(2.0) * hurst - T::from_f(2.0))
            / (T::from_f(2.0) - T::from_f(2.0) * hurst);
    let l2_ok = (l2 + tail - T::one()).abs() < T::from_f(1e-3);

    let vanishes_left = [
        T::from_f(-2.0),
        T::from_f(-0.5),
        T::from_f(-1e-9),
        T::zero(),
    ]
    .iter()
    .all(|&u| spec.eval(u) == T::zero());

    Ok(ConditionReport {
        l2_norm_sq: l2,
        l2_tail_estimate: tail,
        l2_ok,
        envelope_sup: sup,
        envelope_finite,
        ratio_limit: rmean,
        ratio_reference: reference,
        ratio_converged,
        vanishes_left,
    })
}
