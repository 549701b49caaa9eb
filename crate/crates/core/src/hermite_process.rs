//! Hermite-process simulation through normalized partial integrals of a
//! transformed long-memory Gaussian driver, the weighted double-integral
//! norm for deterministic integrands, and Wiener integrals against the
//! simulated paths.

use std::sync::Arc;

use rayon::prelude::*;

use crate::chaos::ChaosExpansion;
use crate::error::{Error, Result};
use crate::gaussian::{fgn_covariance_real, fgn_from_fbm, sample_fbm_path, sample_unit_fgn};
use crate::green::{grid_index, GreenMatrix, OperatorKind};
use crate::rng::derive_seed;
use crate::scalar::Scalar;
use crate::slowly_varying::SlowlyVarying;
use crate::solver::{self_similarity, taqqu_scale};
use crate::special::{beta, factorial, moving_average_integral};

/// Memory guard on driver samples per path.
const MAX_DRIVER_SAMPLES: usize = 1 << 26;
const MIN_HORIZON: usize = 1 << 10;

/// Standardizing constant of the order-k process:
/// `A(k, H0) = sqrt( k! H (2H-1) / I^k )` with `I` the moving-average tail
/// integral. `I` is computed by adaptive quadrature and cross-checked
/// against the Beta identity `I = B(H0 - 1/2, 2 - 2H0)`.
pub fn standardizing_constant<T: Scalar>(order: usize, hurst: T) -> Result<T> {
    assert!(order >= 1);
    let lower = T::one() - T::one() / T::from_n(2 * order);
    if hurst <= lower || hurst >= T::one() {
        return Err(Error::InvalidHurst {
            value: hurst.to_f64().unwrap_or(f64::NAN),
            range: "(1 - 1/(2k), 1) for the order-k process",
        });
    }
    let i_quad = moving_average_integral(hurst);
    let i_beta = beta(
        hurst - T::from_f(0.5),
        T::from_f(2.0) - T::from_f(2.0) * hurst,
    );
    if ((i_quad - i_beta) / i_beta).abs() > T::from_f(1e-6) {
        return Err(Error::QuadratureDivergence(format!(
            "moving-average integral {} disagrees with Beta identity {}",
            i_quad, i_beta
        )));
    }
    let h = self_similarity(order, hurst)?;
    let num = factorial::<T>(order) * h * (T::from_f(2.0) * h - T::one());
    Ok((num / i_quad.powi(order as i32)).sqrt())
}

/// A sampled approximate trajectory of the standard order-m process on a
/// uniform grid of [0,1].
#[derive(Debug, Clone)]
pub struct HermitePath<T> {
    /// grid+1 values, `values[0] = 0`.
    pub values: Vec<T>,
    pub order: usize,
    pub hurst: T,
    /// H = 1 + m(H0 - 1).
    pub self_similarity: T,
    /// Integration horizon of the normalized partial integral.
    pub horizon: usize,
    /// Inner Riemann mesh 1/mesh_inv in driver time.
    pub mesh_inv: usize,
    pub seed: u64,
}

impl<T: Scalar> HermitePath<T> {
    pub fn grid_len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn increment(&self, j: usize) -> T {
        self.values[j + 1] - self.values[j]
    }
}

/// Normalized partial integrals of the rank-m Hermite transform of the
/// unit-lag noise driver:
/// `Y(x_j) = (1/d(T)) * delta * sum_{i delta < T x_j} H_m(g(i delta))`.
///
/// With the driver's matched slowly varying function inside d(T), the value
/// at x = 1 is asymptotically standard, and the path converges in law to
/// the order-m process as the horizon grows.
pub fn simulate_hermite_path<T: Scalar>(
    order: usize,
    hurst: T,
    horizon: usize,
    grid: usize,
    mesh_inv: usize,
    seed: u64,
) -> Result<HermitePath<T>> {
    if order == 0 || order > crate::chaos::MAX_HERMITE_ORDER {
        return Err(Error::InvalidOrder(order));
    }
    assert!(
        horizon >= MIN_HORIZON,
        "horizon below the supported minimum"
    );
    assert!(mesh_inv >= 1 && grid >= 1);
    let driver_len = horizon
        .checked_mul(mesh_inv)
        .filter(|&l| l <= MAX_DRIVER_SAMPLES)
        .ok_or(Error::MemoryGuard(horizon))?;
    if driver_len % grid != 0 {
        return Err(Error::GridAlignment {
            horizon: driver_len,
            grid,
        });
    }

    let driver: Vec<T> = if mesh_inv == 1 {
        sample_unit_fgn(hurst, driver_len, seed)?
    } else {
        let delta = T::one() / T::from_n(mesh_inv);
        let fbm = sample_fbm_path(hurst, driver_len - 1, delta, seed)?;
        fgn_from_fbm(&fbm)?.values
    };

    let slow = SlowlyVarying::fgn_driver(hurst)?;
    let d = taqqu_scale(T::from_n(horizon), order, hurst, &slow)?;
    let delta = T::one() / T::from_n(mesh_inv);
    let step = driver_len / grid;

    let mut values = Vec::with_capacity(grid + 1);
    values.push(T::zero());
    let mut acc = T::zero();
    for (i, &g) in driver.iter().enumerate().take(driver_len) {
        // probabilists' Hermite of the driver value
        let mut prev = T::zero();
        let mut cur = T::one();
        for k in 0..order {
            let next = g * cur - T::from_n(k) * prev;
            prev = cur;
            cur = next;
        }
        acc += cur;
        if (i + 1) % step == 0 {
            values.push(acc * delta / d);
        }
    }
    debug_assert_eq!(values.len(), grid + 1);

    Ok(HermitePath {
        values,
        order,
        hurst,
        self_similarity: self_similarity(order, hurst)?,
        horizon,
        mesh_inv,
        seed,
    })
}

/// Deterministic integrand on [0,1] for Wiener integrals against the
/// simulated process.
#[derive(Clone)]
pub enum LambdaIntegrand<T> {
    /// Piecewise constant: (lo, hi, value) pieces, zero elsewhere.
    Steps(Vec<(T, T, T)>),
    /// Values on a uniform grid of [0,1), held piecewise constant.
    Grid(Vec<T>),
    /// Arbitrary evaluation rule.
    Func(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: Scalar> LambdaIntegrand<T> {
    pub fn indicator(hi: T) -> Self {
        LambdaIntegrand::Steps(vec![(T::zero(), hi, T::one())])
    }

    pub fn eval(&self, u: T) -> T {
        match self {
            LambdaIntegrand::Steps(steps) => steps
                .iter()
                .find(|&&(lo, hi, _)| u >= lo && u < hi)
                .map(|&(_, _, v)| v)
                .unwrap_or(T::zero()),
            LambdaIntegrand::Grid(values) => {
                let n = values.len();
                let idx = (u * T::from_n(n)).floor().to_usize().unwrap_or(0);
                values.get(idx.min(n - 1)).copied().unwrap_or(T::zero())
            }
            LambdaIntegrand::Func(f) => f(u),
        }
    }
}

impl<T: std::fmt::Debug> std::fmt::Debug for LambdaIntegrand<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LambdaIntegrand::Steps(s) => write!(f, "Steps({s:?})"),
            LambdaIntegrand::Grid(v) => write!(f, "Grid(len {})", v.len()),
            LambdaIntegrand::Func(_) => write!(f, "Func(..)"),
        }
    }
}

/// Squared norm `H(2H-1) int int f(u) f(v) |u-v|^(2H-2) du dv` over [0,1].
///
/// The midpoint piecewise-constant approximation makes each cell pair exact:
/// the weighted cell integral collapses to `h^(2H) * rho(d)` where rho is
/// the fGn autocovariance at integer lag d. Refined until the relative
/// change drops below 1e-6; sustained growth marks the integrand as outside
/// the admissible class.
pub fn lambda_norm_sq<T: Scalar>(f: &LambdaIntegrand<T>, hq: T) -> Result<T> {
    if hq <= T::from_f(0.5) || hq >= T::one() {
        return Err(Error::InvalidHurst {
            value: hq.to_f64().unwrap_or(f64::NAN),
            range: "(1/2, 1)",
        });
    }
    let mut prev: Option<T> = None;
    let mut growth_streak = 0usize;
    let mut k = 512usize;
    while k <= 16384 {
        let val = step_norm_sq(f, hq, k);
        if let Some(p) = prev {
            let denom = val.abs().max(T::from_f(1e-300));
            if ((val - p) / denom).abs() < T::from_f(1e-6) {
                return Ok(val);
            }
            if val.abs() > p.abs() * T::from_f(1.05) {
                growth_streak += 1;
            } else {
                growth_streak = 0;
            }
        }
        prev = Some(val);
        k *= 2;
    }
    if growth_streak >= 2 {
        Err(Error::NormDivergent)
    } else {
        Err(Error::QuadratureDivergence(
            "double-integral norm did not converge at the maximum refinement".into(),
        ))
    }
}

/// The norm of the piecewise-constant midpoint approximation at k cells;
/// exact for step functions aligned to the grid.
fn step_norm_sq<T: Scalar>(f: &LambdaIntegrand<T>, hq: T, k: usize) -> T {
    let h = T::one() / T::from_n(k);
    let half = T::from_f(0.5);
    let vals: Vec<T> = (0..k).map(|i| f.eval((T::from_n(i) + half) * h)).collect();
    let mut total = T::zero();
    for d in 0..k {
        let mut corr = T::zero();
        for i in 0..k - d {
            corr += vals[i] * vals[i + d];
        }
        let w = if d == 0 { T::one() } else { T::from_f(2.0) };
        total += w * corr * fgn_covariance_real(hq, T::from_n(d)).expect("hurst checked");
    }
    total * h.powf(T::from_f(2.0) * hq)
}

/// Left-endpoint Riemann-Stieltjes sum of `f` against the path increments.
pub fn wiener_integral<T: Scalar>(f: &LambdaIntegrand<T>, path: &HermitePath<T>) -> T {
    let grid = path.grid_len();
    let h = T::one() / T::from_n(grid);
    let mut acc = T::zero();
    for j in 0..grid {
        acc += f.eval(T::from_n(j) * h) * path.increment(j);
    }
    acc
}

/// The limit-law integrand y -> G(x_probe, y) u0(y) sampled at the left
/// endpoints of a uniform grid of [0,1]; the boundary node carries zero.
pub fn limit_integrand<T: Scalar>(
    gm: &GreenMatrix<T>,
    u0: &[T],
    x_probe: T,
    grid: usize,
) -> Result<Vec<T>> {
    let n = gm.n;
    assert_eq!(u0.len(), n);
    if !(n + 1).is_multiple_of(grid) {
        return Err(Error::GridAlignment {
            horizon: n + 1,
            grid,
        });
    }
    let probe = grid_index(x_probe, n)?;
    let stride = (n + 1) / grid;
    Ok((0..grid)
        .map(|j| {
            if j == 0 {
                T::zero()
            } else {
                let i = j * stride - 1;
                gm.entry(probe, i) * u0[i]
            }
        })
        .collect())
}

/// Draw `count` independent samples of the limiting fluctuation law
/// `-(V_m / m!) int G(x_probe, y) u0(y) dZ(y)` with a fresh simulated path
/// per draw.
///
/// The integrator hypothesis needs a Lipschitz Green kernel, so rough
/// fractional kinds are rejected up front.
#[allow(clippy::too_many_arguments)]
pub fn limit_sampler<T: Scalar>(
    gm: &GreenMatrix<T>,
    u0: &[T],
    chaos: &ChaosExpansion<T>,
    order: usize,
    hurst: T,
    x_probe: T,
    count: usize,
    horizon: usize,
    grid: usize,
    seed: u64,
) -> Result<Vec<T>> {
    if let OperatorKind::SpectralFractional { exponent } = gm.op.kind {
        if exponent < T::one() {
            return Err(Error::LipschitzHypothesis);
        }
    }
    match chaos.rank {
        None => return Ok(vec![T::zero(); count]),
        Some(r) if r != order => {
            return Err(Error::RankMismatch {
                expected: order,
                found: Some(r),
            })
        }
        Some(_) => {}
    }
    let integrand = limit_integrand(gm, u0, x_probe, grid)?;
    let weight = chaos.coeff(order) / factorial::<T>(order);

    (0..count)
        .into_par_iter()
        .map(|draw| {
            let path = simulate_hermite_path::<T>(
                order,
                hurst,
                horizon,
                grid,
                1,
                derive_seed(seed, &[draw as u64]),
            )?;
            let mut acc = T::zero();
            for (j, &fj) in integrand.iter().enumerate() {
                acc += fj * path.increment(j);
            }
            Ok(-weight * acc)
        })
        .collect()
}
