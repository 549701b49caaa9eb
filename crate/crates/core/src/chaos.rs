//! Probabilists' Hermite calculus: polynomial evaluation, chaos coefficients
//! of the potential nonlinearity, its Hermite rank, and the induced
//! autocovariance law of the potential.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::{fgn_covariance, sample_unit_fgn};
use crate::quad::{check_rule_size, sqrt_factorial, GaussHermite};
use crate::rng::derive_seed;
use crate::scalar::Scalar;
use crate::stats::{fit_loglog_slope, mean, standard_error};

pub const MAX_HERMITE_ORDER: usize = 64;
/// Rank detection threshold on normalized coefficients V_q / sqrt(q!).
pub const RANK_TOLERANCE: f64 = 1e-10;
/// Adequacy threshold for the truncated series: the last normalized
/// coefficient may carry at most this much amplitude, i.e. the dropped
/// L2 mass is bounded by its square.
pub const TAIL_TOLERANCE: f64 = 1e-6;

/// Probabilists' Hermite polynomial H_q(x) by the three-term recurrence
/// H_{q+1} = x H_q - q H_{q-1}.
pub fn hermite_poly<T: Scalar>(q: usize, x: T) -> Result<T> {
    if q > MAX_HERMITE_ORDER {
        return Err(Error::InvalidOrder(q));
    }
    let mut prev = T::zero();
    let mut cur = T::one();
    for k in 0..q {
        let next = x * cur - T::from_n(k) * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Hermite coefficients V_q of a square-integrable function, with its rank
/// and the L2 mass of the truncated series.
#[derive(Debug, Clone)]
pub struct ChaosExpansion<T> {
    /// Raw coefficients V_0 ..= V_qmax.
    pub coeffs: Vec<T>,
    /// Smallest q >= 1 with a nonzero normalized coefficient; `None` for
    /// the zero function.
    pub rank: Option<usize>,
    /// sum of V_q^2 / q! over the computed range.
    pub l2_norm_sq: T,
    /// Quadrature of the squared function under the Gaussian measure
    /// (Parseval reference, also bounds the truncated tail).
    pub phi_sq_quad: T,
}

impl<T: Scalar> ChaosExpansion<T> {
    pub fn qmax(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, q: usize) -> T {
        self.coeffs.get(q).copied().unwrap_or(T::zero())
    }

    /// V_q / sqrt(q!), the coefficient in the orthonormal basis.
    pub fn normalized_coeff(&self, q: usize) -> T {
        self.coeff(q) / sqrt_factorial(q)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "coeffs": self.coeffs.iter().map(|c| c.to_f64().unwrap()).collect::<Vec<_>>(),
            "rank": self.rank,
            "l2_norm_sq": self.l2_norm_sq.to_f64().unwrap(),
            "phi_sq_quad": self.phi_sq_quad.to_f64().unwrap(),
            "rank_tolerance": RANK_TOLERANCE,
            "tail_tolerance": TAIL_TOLERANCE,
        })
    }
}

/// The closed catalog of potential nonlinearities.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialFn<T> {
    Sin {
        amplitude: T,
    },
    CenteredCos {
        amplitude: T,
    },
    /// H_m itself; unbounded, admitted only outside solver contexts.
    PureHermite {
        order: usize,
    },
}

impl<T: Scalar> PotentialFn<T> {
    pub fn eval(&self, x: T) -> T {
        match *self {
            PotentialFn::Sin { amplitude } => amplitude * x.sin(),
            PotentialFn::CenteredCos { amplitude } => {
                amplitude * (x.cos() - T::from_f((-0.5f64).exp()))
            }
            PotentialFn::PureHermite { order } => {
                hermite_poly(order, x).expect("catalog order within range")
            }
        }
    }

    /// Exact sup bound; `None` marks an unbounded entry.
    pub fn sup_bound(&self) -> Option<T> {
        match *self {
            PotentialFn::Sin { amplitude } => Some(amplitude.abs()),
            PotentialFn::CenteredCos { amplitude } => {
                Some(amplitude.abs() * (T::one() + T::from_f((-0.5f64).exp())))
            }
            PotentialFn::PureHermite { .. } => None,
        }
    }

    /// Whether the third-moment-weighted Fourier transform is integrable.
    /// Recorded as a catalog attribute (single-frequency entries qualify,
    /// polynomials do not); nothing downstream computes it.
    pub fn smooth_fourier_bound(&self) -> bool {
        !matches!(self, PotentialFn::PureHermite { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            PotentialFn::Sin { .. } => "sin",
            PotentialFn::CenteredCos { .. } => "centered_cos",
            PotentialFn::PureHermite { .. } => "pure_hermite",
        }
    }
}

/// Compute V_q = E[phi(X) H_q(X)] for q = 0..=qmax by Gauss quadrature
/// against the standard normal measure.
pub fn chaos_coefficients<T: Scalar>(
    phi: &PotentialFn<T>,
    qmax: usize,
    nodes: usize,
) -> Result<ChaosExpansion<T>> {
    if qmax > MAX_HERMITE_ORDER {
        return Err(Error::InvalidOrder(qmax));
    }
    check_rule_size(nodes, qmax)?;
    let rule = GaussHermite::<T>::new(nodes);

    let mut coeffs = vec![T::zero(); qmax + 1];
    let mut phi_sq = T::zero();
    for (&x, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
        let fx = phi.eval(x);
        phi_sq += w * fx * fx;
        let mut prev = T::zero();
        let mut cur = T::one();
        for (q, c) in coeffs.iter_mut().enumerate() {
            *c += w * fx * cur;
            let next = x * cur - T::from_n(q) * prev;
            prev = cur;
            cur = next;
        }
    }

    let tol = T::from_f(RANK_TOLERANCE);
    let normalized: Vec<T> = (0..=qmax)
        .map(|q| coeffs[q] / sqrt_factorial::<T>(q))
        .collect();
    let rank = (1..=qmax).find(|&q| normalized[q].abs() > tol);

    if let Some(r) = rank {
        // the series must be resolved well inside the computed range
        let tail = normalized[qmax].abs();
        if qmax > r && tail > T::from_f(TAIL_TOLERANCE) {
            return Err(Error::ChaosTailTooLarge {
                order: qmax,
                tail: tail.to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let l2_norm_sq =
        normalized.iter().skip(1).map(|&c| c * c).sum::<T>() + normalized[0] * normalized[0];

    Ok(ChaosExpansion {
        coeffs,
        rank,
        l2_norm_sq,
        phi_sq_quad: phi_sq,
    })
}

/// A potential nonlinearity with its chaos expansion and sup bound.
#[derive(Debug, Clone)]
pub struct PotentialSpec<T> {
    pub phi: PotentialFn<T>,
    /// Sup bound gamma with |phi| <= gamma; `None` for unbounded entries.
    pub gamma: Option<T>,
    pub chaos: ChaosExpansion<T>,
}

impl<T: Scalar> PotentialSpec<T> {
    pub fn new(phi: PotentialFn<T>, qmax: usize, nodes: usize) -> Result<Self> {
        let chaos = chaos_coefficients(&phi, qmax, nodes)?;
        let gamma = phi.sup_bound();
        if let Some(g) = gamma {
            // verify the recorded bound on a dense grid
            let mut sup = T::zero();
            for i in 0..=4000 {
                let x = T::from_f(-8.0) + T::from_f(16.0) * T::from_n(i) / T::from_f(4000.0);
                sup = sup.max(phi.eval(x).abs());
            }
            assert!(
                sup <= g * (T::one() + T::from_f(1e-12)),
                "catalog sup bound violated"
            );
        }
        Ok(PotentialSpec { phi, gamma, chaos })
    }

    /// Convenience constructor with a rule comfortably resolving the
    /// default truncation order.
    pub fn from_catalog(phi: PotentialFn<T>) -> Result<Self> {
        Self::new(phi, 32, 72)
    }

    pub fn rank(&self) -> Option<usize> {
        self.chaos.rank
    }

    pub fn is_bounded(&self) -> bool {
        self.gamma.is_some()
    }

    /// Pointwise map of the nonlinearity over a sampled trajectory.
    pub fn apply(&self, values: &[T]) -> Vec<T> {
        values.iter().map(|&x| self.phi.eval(x)).collect()
    }
}

/// Value of the potential autocovariance series at driver correlation
/// `gamma_g`, plus a bound on the truncated tail.
#[derive(Debug, Clone, Copy)]
pub struct AutocovValue<T> {
    pub value: T,
    pub tail_bound: T,
}

/// sum_{q >= rank} (V_q^2 / q!) * gamma_g^q, truncated at the expansion
/// order.
pub fn potential_autocov<T: Scalar>(
    chaos: &ChaosExpansion<T>,
    gamma_g: T,
) -> Result<AutocovValue<T>> {
    if gamma_g.abs() > T::one() + T::from_f(1e-12) {
        return Err(Error::CorrelationOutOfRange(
            gamma_g.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let Some(rank) = chaos.rank else {
        return Ok(AutocovValue {
            value: T::zero(),
            tail_bound: T::zero(),
        });
    };
    let mut value = T::zero();
    let mut series_mass = T::zero();
    for q in rank..=chaos.qmax() {
        let nc = chaos.normalized_coeff(q);
        value += nc * nc * gamma_g.powi(q as i32);
        series_mass += nc * nc;
    }
    let v0 = chaos.normalized_coeff(0);
    let residual = (chaos.phi_sq_quad - v0 * v0 - series_mass).max(T::zero());
    let tail_bound = residual * gamma_g.abs().powi(chaos.qmax() as i32 + 1);
    Ok(AutocovValue { value, tail_bound })
}

/// Outcome of the empirical autocovariance decay study.
#[derive(Debug, Clone)]
pub struct DecayFit<T> {
    pub lags: Vec<usize>,
    pub empirical: Vec<T>,
    pub empirical_se: Vec<T>,
    pub theory: Vec<T>,
    pub slope: T,
    pub slope_stderr: T,
}

/// Estimate the autocovariance of q = phi(g) at the given lags by Monte
/// Carlo over independent driver paths, fit the log-log decay slope, and
/// tabulate the chaos-series prediction alongside.
pub fn autocov_decay_fit<T: Scalar>(
    spec: &PotentialSpec<T>,
    hurst: T,
    lags: &[usize],
    replicates: usize,
    path_len: usize,
    seed: u64,
) -> Result<DecayFit<T>> {
    let min = *lags.first().ok_or(Error::InsufficientLagSpan)?;
    let max = *lags.last().ok_or(Error::InsufficientLagSpan)?;
    if min == 0 || max < 10 * min || lags.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InsufficientLagSpan);
    }
    assert!(path_len > 2 * max, "path too short for the requested lags");

    let per_rep: Vec<Vec<T>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let g = sample_unit_fgn(hurst, path_len, derive_seed(seed, &[r as u64]))
                .expect("driver synthesis");
            let q = spec.apply(&g);
            lags.iter()
                .map(|&h| {
                    let mut acc = T::zero();
                    for i in 0..path_len - h {
                        acc += q[i] * q[i + h];
                    }
                    acc / T::from_n(path_len - h)
                })
                .collect()
        })
        .collect();

    let mut empirical = Vec::with_capacity(lags.len());
    let mut empirical_se = Vec::with_capacity(lags.len());
    for (k, _) in lags.iter().enumerate() {
        let col: Vec<T> = per_rep.iter().map(|row| row[k]).collect();
        empirical.push(mean(&col));
        empirical_se.push(standard_error(&col));
    }

    let theory: Vec<T> = lags
        .iter()
        .map(|&h| {
            let g = fgn_covariance(hurst, h as i64)?;
            Ok(potential_autocov(&spec.chaos, g)?.value)
        })
        .collect::<Result<_>>()?;

    let xs: Vec<T> = lags.iter().map(|&h| T::from_n(h)).collect();
    let ys: Vec<T> = empirical.iter().map(|&v| v.abs()).collect();
    let fit = fit_loglog_slope(&xs, &ys)?;

    Ok(DecayFit {
        lags: lags.to_vec(),
        empirical,
        empirical_se,
        theory,
        slope: fit.slope,
        slope_stderr: fit.slope_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::factorial;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn hermite_small_orders() {
        assert_eq!(hermite_poly(0, 3.7f64).unwrap(), 1.0);
        assert_eq!(hermite_poly(1, 3.7f64).unwrap(), 3.7);
        assert_eq!(hermite_poly(2, 2.0f64).unwrap(), 3.0); // x^2 - 1
        assert_eq!(hermite_poly(3, 1.0f64).unwrap(), -2.0); // x^3 - 3x
        assert!(hermite_poly(65, 0.0f64).is_err());
    }

    #[test]
    fn quadrature_orthogonality() {
        // <H_p, H_q> = q! delta_pq, relative error below 1e-10 for p,q <= 8
        let rule = GaussHermite::<f64>::new(24);
        for p in 0..=8usize {
            for q in 0..=8usize {
                let val =
                    rule.integrate(|x| hermite_poly(p, x).unwrap() * hermite_poly(q, x).unwrap());
                let expect = if p == q { factorial::<f64>(q) } else { 0.0 };
                let scale = factorial::<f64>(p.max(q));
                assert!(
                    (val - expect).abs() / scale < 1e-10,
                    "p={} q={} val={}",
                    p,
                    q,
                    val
                );
            }
        }
    }

    #[test]
    fn sin_coefficients() {
        let chaos = chaos_coefficients(&PotentialFn::Sin { amplitude: 1.0f64 }, 32, 72).unwrap();
        // parity: even coefficients vanish
        assert_abs_diff_eq!(chaos.coeff(0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(chaos.coeff(2), 0.0, epsilon = 1e-13);
        // Stein identity: E[X sin X] = E[cos X] = exp(-1/2); quadrature is
        // the independent oracle here and matches to near machine precision
        assert_relative_eq!(chaos.coeff(1), (-0.5f64).exp(), epsilon = 1e-12);
        assert_eq!(chaos.rank, Some(1));
    }

    #[test]
    fn centered_cos_coefficients() {
        let chaos =
            chaos_coefficients(&PotentialFn::CenteredCos { amplitude: 1.0f64 }, 32, 72).unwrap();
        assert_abs_diff_eq!(chaos.coeff(0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(chaos.coeff(1), 0.0, epsilon = 1e-13);
        // Stein applied twice: V_2 = E[(cos x)''] = -E[cos x] = -exp(-1/2)
        assert_relative_eq!(chaos.coeff(2), -(-0.5f64).exp(), epsilon = 1e-12);
        assert_eq!(chaos.rank, Some(2));
    }

    #[test]
    fn pure_hermite_coefficients() {
        let chaos: ChaosExpansion<f64> =
            chaos_coefficients(&PotentialFn::PureHermite { order: 2 }, 16, 48).unwrap();
        assert_eq!(chaos.rank, Some(2));
        assert_relative_eq!(chaos.coeff(2), 2.0, epsilon = 1e-12);
        for q in [0usize, 1, 3, 4, 5] {
            assert_abs_diff_eq!(chaos.normalized_coeff(q), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rank_stable_under_truncation_order() {
        for phi in [
            PotentialFn::Sin { amplitude: 1.0f64 },
            PotentialFn::CenteredCos { amplitude: 1.0f64 },
        ] {
            let ranks: Vec<_> = [16usize, 32, 64]
                .iter()
                .map(|&qmax| chaos_coefficients(&phi, qmax, 2 * qmax + 8).unwrap().rank)
                .collect();
            assert_eq!(ranks[0], ranks[1]);
            assert_eq!(ranks[1], ranks[2]);
        }
    }

    #[test]
    fn parseval_for_catalog() {
        for phi in [
            PotentialFn::Sin { amplitude: 1.0f64 },
            PotentialFn::CenteredCos { amplitude: 0.7f64 },
            PotentialFn::PureHermite { order: 3 },
        ] {
            let chaos = chaos_coefficients(&phi, 32, 72).unwrap();
            assert_relative_eq!(chaos.l2_norm_sq, chaos.phi_sq_quad, epsilon = 1e-8);
        }
    }

    #[test]
    fn rule_size_guard() {
        assert!(matches!(
            chaos_coefficients(&PotentialFn::Sin { amplitude: 1.0f64 }, 32, 60),
            Err(Error::TooFewNodes { .. })
        ));
    }

    #[test]
    fn autocov_series_closed_cases() {
        // rank-1 pure expansion: V_1^2 * gamma
        let chaos = chaos_coefficients(&PotentialFn::PureHermite { order: 1 }, 16, 48).unwrap();
        let v = potential_autocov(&chaos, 0.3f64).unwrap().value;
        assert_relative_eq!(v, 0.3, epsilon = 1e-12);

        // pure H_2: V_2 = 2, series = 2 gamma^2
        let chaos2 = chaos_coefficients(&PotentialFn::PureHermite { order: 2 }, 16, 48).unwrap();
        let v2 = potential_autocov(&chaos2, 0.5f64).unwrap().value;
        assert_relative_eq!(v2, 0.5, epsilon = 1e-12);

        // any chaos at zero correlation
        let chaos3 = chaos_coefficients(&PotentialFn::Sin { amplitude: 1.0f64 }, 32, 72).unwrap();
        assert_eq!(potential_autocov(&chaos3, 0.0f64).unwrap().value, 0.0);

        assert!(potential_autocov(&chaos3, 1.5f64).is_err());
    }

    #[test]
    fn sin_autocovariance_is_sinh_series() {
        // E[sin(X) sin(Y)] = exp(-1) sinh(rho) for unit jointly Gaussian pairs
        let chaos = chaos_coefficients(&PotentialFn::Sin { amplitude: 1.0f64 }, 40, 96).unwrap();
        for &rho in &[0.9f64, 0.4, -0.6] {
            let v = potential_autocov(&chaos, rho).unwrap().value;
            assert_relative_eq!(v, (-1.0f64).exp() * rho.sinh(), epsilon = 1e-10);
        }
    }

    #[test]
    fn variance_case_matches_monte_carlo() {
        // series at full correlation = Var(phi(g(0)))
        let spec = PotentialSpec::from_catalog(PotentialFn::Sin { amplitude: 1.0f64 }).unwrap();
        let series = potential_autocov(&spec.chaos, 1.0f64).unwrap().value;
        let reps = 40_000;
        let mut rng = crate::rng::replicate_rng(5, 0, 0);
        let mut acc = 0.0;
        let mut acc4 = 0.0;
        for _ in 0..reps {
            let x: f64 = f64::standard_normal(&mut rng);
            let q = spec.phi.eval(x);
            acc += q * q;
            acc4 += q * q * q * q;
        }
        let mc = acc / reps as f64;
        let var_of_sq = acc4 / reps as f64 - mc * mc;
        let se = (var_of_sq / reps as f64).sqrt();
        assert!(
            (series - mc).abs() < 4.0 * se,
            "series={} mc={}",
            series,
            mc
        );
    }

    #[test]
    fn apply_on_zero_paths() {
        let sin = PotentialSpec::from_catalog(PotentialFn::Sin { amplitude: 1.0f64 }).unwrap();
        assert!(sin.apply(&[0.0f64; 8]).iter().all(|&v| v == 0.0));
        let cc =
            PotentialSpec::from_catalog(PotentialFn::CenteredCos { amplitude: 1.0f64 }).unwrap();
        let expect = 1.0 - (-0.5f64).exp();
        for v in cc.apply(&[0.0f64; 8]) {
            assert_relative_eq!(v, expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn applied_potential_is_centered() {
        // catalog entries have mean zero under the stationary driver law
        let spec =
            PotentialSpec::from_catalog(PotentialFn::CenteredCos { amplitude: 1.0f64 }).unwrap();
        let reps = 10_000;
        let mut acc = 0.0f64;
        for r in 0..reps {
            let g = sample_unit_fgn(0.75f64, 4, derive_seed(9, &[r])).unwrap();
            acc += spec.apply(&g)[0];
        }
        let m = acc / reps as f64;
        let var = potential_autocov(&spec.chaos, 1.0f64).unwrap().value;
        let se = (var / reps as f64).sqrt();
        assert!(m.abs() < 3.0 * se, "mean = {}", m);
    }

    #[test]
    fn zero_amplitude_has_no_rank() {
        let chaos = chaos_coefficients(&PotentialFn::Sin { amplitude: 0.0f64 }, 16, 48).unwrap();
        assert_eq!(chaos.rank, None);
        assert_eq!(potential_autocov(&chaos, 0.7f64).unwrap().value, 0.0);
    }

    #[test]
    fn decay_fit_guards() {
        let spec = PotentialSpec::from_catalog(PotentialFn::Sin { amplitude: 1.0f64 }).unwrap();
        // lags spanning less than a decade are rejected
        assert!(matches!(
            autocov_decay_fit(&spec, 0.8f64, &[8, 16, 32], 4, 256, 1),
            Err(Error::InsufficientLagSpan)
        ));
    }
}
