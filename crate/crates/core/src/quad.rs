//! Quadrature: adaptive Simpson on finite intervals and a Gauss rule for the
//! standard Gaussian weight (probabilists' Hermite nodes).

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::special::ln_factorial;

/// Adaptive Simpson integration of `f` over [a, b].
pub fn integrate_adaptive<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T, tol: T) -> T {
    let fa = f(a);
    let fb = f(b);
    let m = (a + b) / T::from_f(2.0);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

fn simpson<T: Scalar>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::from_f(6.0) * (fa + T::from_f(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step<T: Scalar, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: usize,
) -> T {
    let m = (a + b) / T::from_f(2.0);
    let lm = (a + m) / T::from_f(2.0);
    let rm = (m + b) / T::from_f(2.0);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::from_f(15.0) * tol {
        return left + right + delta / T::from_f(15.0);
    }
    let half_tol = tol / T::from_f(2.0);
    adaptive_step(f, a, m, fa, flm, fm, left, half_tol, depth - 1)
        + adaptive_step(f, m, b, fm, frm, fb, right, half_tol, depth - 1)
}

/// Gauss rule for integrals against the standard normal density: nodes are
/// the roots of the probabilists' Hermite polynomial, weights sum to one.
#[derive(Debug, Clone)]
pub struct GaussHermite<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> GaussHermite<T> {
    /// Build an `n`-point rule, exact for polynomials up to degree 2n-1
    /// under the N(0,1) measure.
    ///
    /// Roots are found by interlacing bisection on the orthonormal
    /// recurrence (bracketed, so no starting-guess issues), weights by the
    /// Christoffel identity w_i = 1 / sum_k htilde_k(x_i)^2.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut roots: Vec<T> = vec![T::zero()]; // roots of degree-1 htilde
        for deg in 2..=n {
            roots = next_roots(&roots, deg);
        }
        let weights = roots
            .iter()
            .map(|&x| {
                let mut sum = T::zero();
                for v in orthonormal_values(x, n - 1) {
                    sum += v * v;
                }
                T::one() / sum
            })
            .collect();
        GaussHermite {
            nodes: roots,
            weights,
        }
    }

    /// Integral of `f` against the standard Gaussian measure.
    pub fn integrate<F: Fn(T) -> T>(&self, f: F) -> T {
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Values of the orthonormal Hermite functions htilde_0..=htilde_qmax at x,
/// htilde_q = H_q / sqrt(q!).
fn orthonormal_values<T: Scalar>(x: T, qmax: usize) -> Vec<T> {
    let mut vals = Vec::with_capacity(qmax + 1);
    let mut prev = T::zero();
    let mut cur = T::one();
    vals.push(cur);
    for q in 0..qmax {
        let next = (x * cur - T::from_n(q).sqrt() * prev) / T::from_n(q + 1).sqrt();
        prev = cur;
        cur = next;
        vals.push(cur);
    }
    vals
}

fn orthonormal_at<T: Scalar>(x: T, q: usize) -> T {
    *orthonormal_values(x, q).last().unwrap()
}

/// Roots of htilde_{deg} given the (sorted) roots of htilde_{deg-1}, using
/// strict interlacing for brackets.
fn next_roots<T: Scalar>(prev: &[T], deg: usize) -> Vec<T> {
    let bound = T::from_f(2.0) * T::from_n(deg).sqrt() + T::from_f(2.0);
    let mut brackets = Vec::with_capacity(deg + 1);
    brackets.push(-bound);
    brackets.extend_from_slice(prev);
    brackets.push(bound);
    let mut roots = Vec::with_capacity(deg);
    for w in brackets.windows(2) {
        roots.push(bisect_root(w[0], w[1], deg));
    }
    roots
}

fn bisect_root<T: Scalar>(mut lo: T, mut hi: T, deg: usize) -> T {
    let flo = orthonormal_at(lo, deg);
    debug_assert!(
        flo * orthonormal_at(hi, deg) < T::zero(),
        "interlacing bracket must straddle a sign change"
    );
    for _ in 0..200 {
        let mid = (lo + hi) / T::from_f(2.0);
        if mid == lo || mid == hi {
            break;
        }
        let fmid = orthonormal_at(mid, deg);
        if fmid == T::zero() {
            return mid;
        }
        if (fmid > T::zero()) == (flo > T::zero()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / T::from_f(2.0)
}

/// sqrt(q!) evaluated stably through logs.
pub fn sqrt_factorial<T: Scalar>(q: usize) -> T {
    (ln_factorial::<T>(q) / T::from_f(2.0)).exp()
}

/// Guard shared by quadrature-driven expansions.
pub fn check_rule_size(nodes: usize, qmax: usize) -> Result<()> {
    if nodes < 2 * qmax {
        return Err(Error::TooFewNodes { nodes, qmax });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simpson_integrates_cubic_exactly() {
        let v: f64 = integrate_adaptive(&|x: f64| x * x * x - x, 0.0, 2.0, 1e-12);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn adaptive_handles_sharp_peak() {
        let v: f64 = integrate_adaptive(&|x: f64| (-(x * x) * 400.0).exp(), -1.0, 1.0, 1e-12);
        let exact = (std::f64::consts::PI / 400.0).sqrt();
        assert_abs_diff_eq!(v, exact, epsilon = 1e-10);
    }

    #[test]
    fn gauss_rule_moments() {
        let rule = GaussHermite::<f64>::new(12);
        assert_abs_diff_eq!(rule.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(rule.integrate(|x| x), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(rule.integrate(|x| x * x), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rule.integrate(|x| x * x * x * x), 3.0, epsilon = 1e-11);
        assert_abs_diff_eq!(rule.integrate(|x| x.powi(6)), 15.0, epsilon = 1e-10);
    }

    #[test]
    fn gauss_rule_entire_function() {
        // E[cos X] = exp(-1/2)
        let rule = GaussHermite::<f64>::new(32);
        assert_abs_diff_eq!(
            rule.integrate(|x| x.cos()),
            (-0.5f64).exp(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn nodes_are_symmetric() {
        let rule = GaussHermite::<f64>::new(9);
        for (a, b) in rule.nodes.iter().zip(rule.nodes.iter().rev()) {
            assert_abs_diff_eq!(*a, -*b, epsilon = 1e-12);
        }
    }
}
