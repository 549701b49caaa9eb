//! Concrete elliptic operators on (0,1) with Dirichlet conditions, their
//! discretized Green operators, and the singularity/Lipschitz diagnostics.
//!
//! Two kinds are implemented: the second-difference Laplacian (bounded Green
//! kernel) and the spectral fractional Laplacian built on the Dirichlet sine
//! eigenbasis (kernel singularity exponent 2s). Inverse applications are
//! exact per kind: a tridiagonal factorization for the Laplacian, a diagonal
//! spectral inverse for the fractional operator. Perturbed solves with a
//! diagonal potential use the same factorization (Laplacian) or conjugate
//! gradients on the sine-diagonalized form (fractional); the CG tolerance
//! of 1e-13 is far below every tolerance consumed downstream.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const CG_RELATIVE_TOLERANCE: f64 = 1e-13;
const CG_MAX_ITERATIONS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind<T> {
    /// -d^2/dx^2 by the three-point stencil; Green kernel bounded (beta = 1).
    Laplace,
    /// Spectral power s of the Dirichlet Laplacian: eigenvalues (k pi)^(2s)
    /// on the sine basis; Green kernel singularity exponent beta = 2s.
    SpectralFractional { exponent: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec<T> {
    pub kind: OperatorKind<T>,
    /// Constant zeroth-order coefficient, must dominate any potential bound.
    pub q0: T,
    /// Interior grid points; spacing h = 1/(n+1).
    pub n: usize,
    /// Sine modes used when densifying the fractional Green kernel.
    pub modes: usize,
}

impl<T: Scalar> OperatorSpec<T> {
    pub fn laplace(q0: T, n: usize) -> Result<Self> {
        Self::validate(q0, n)?;
        Ok(OperatorSpec {
            kind: OperatorKind::Laplace,
            q0,
            n,
            modes: n,
        })
    }

    pub fn spectral_fractional(exponent: T, q0: T, n: usize, modes: Option<usize>) -> Result<Self> {
        Self::validate(q0, n)?;
        if exponent <= T::zero() || exponent > T::one() {
            return Err(Error::InvalidHurst {
                value: exponent.to_f64().unwrap_or(f64::NAN),
                range: "(0, 1] for the spectral power",
            });
        }
        let modes = modes.unwrap_or(n);
        if modes < n {
            return Err(Error::TooFewModes { modes, n });
        }
        Ok(OperatorSpec {
            kind: OperatorKind::SpectralFractional { exponent },
            q0,
            n,
            modes,
        })
    }

    fn validate(q0: T, n: usize) -> Result<()> {
        if n < 16 {
            return Err(Error::GridTooSmall { n, min: 16 });
        }
        assert!(
            q0 >= T::zero(),
            "zeroth-order coefficient must be nonnegative"
        );
        Ok(())
    }

    pub fn h(&self) -> T {
        T::one() / T::from_n(self.n + 1)
    }

    /// Interior grid x_i = (i+1) h.
    pub fn grid(&self) -> Vec<T> {
        let h = self.h();
        (0..self.n).map(|i| T::from_n(i + 1) * h).collect()
    }

    /// Recorded singularity exponent of the Green kernel.
    pub fn beta_exponent(&self) -> T {
        match self.kind {
            OperatorKind::Laplace => T::one(),
            OperatorKind::SpectralFractional { exponent } => {
                (T::from_f(2.0) * exponent).min(T::one())
            }
        }
    }

    /// Reference operator-norm bound 1/(lambda_1^(s or 1) + q0).
    pub fn norm_bound(&self) -> T {
        let lam1 = T::PI() * T::PI();
        match self.kind {
            OperatorKind::Laplace => T::one() / (lam1 + self.q0),
            OperatorKind::SpectralFractional { exponent } => {
                T::one() / (lam1.powf(exponent) + self.q0)
            }
        }
    }

    /// Apply (P + q0)^(-1) to an interior grid function.
    pub fn apply_inverse(&self, rhs: &[T]) -> Vec<T> {
        assert_eq!(rhs.len(), self.n);
        match self.kind {
            OperatorKind::Laplace => {
                let shift = vec![T::zero(); self.n];
                self.laplace_solve(&shift, rhs)
            }
            OperatorKind::SpectralFractional { exponent } => {
                let dst = SineTransform::new(self.n);
                let lam = self.spectral_eigenvalues(exponent);
                let mut coef = dst.apply(rhs);
                for (c, l) in coef.iter_mut().zip(lam.iter()) {
                    *c /= *l + self.q0;
                }
                let mut out = dst.apply(&coef);
                let scale = T::from_f(2.0) * self.h();
                for v in &mut out {
                    *v *= scale;
                }
                out
            }
        }
    }

    /// Solve (P + q0 + diag(q)) u = rhs with a nonnegative-shift potential.
    pub fn solve_with_potential(&self, q: &[T], rhs: &[T]) -> Result<Vec<T>> {
        assert_eq!(q.len(), self.n);
        assert_eq!(rhs.len(), self.n);
        match self.kind {
            OperatorKind::Laplace => Ok(self.laplace_solve(q, rhs)),
            OperatorKind::SpectralFractional { exponent } => {
                let dst = SineTransform::new(self.n);
                let lam = self.spectral_eigenvalues(exponent);
                let scale = T::from_f(2.0) * self.h();
                let apply = |v: &[T]| -> Vec<T> {
                    let mut coef = dst.apply(v);
                    for (c, l) in coef.iter_mut().zip(lam.iter()) {
                        *c *= *l;
                    }
                    let mut out = dst.apply(&coef);
                    for (i, o) in out.iter_mut().enumerate() {
                        *o = *o * scale + (self.q0 + q[i]) * v[i];
                    }
                    out
                };
                conjugate_gradient(&apply, rhs)
            }
        }
    }

    fn spectral_eigenvalues(&self, exponent: T) -> Vec<T> {
        (1..=self.n)
            .map(|k| {
                let lam = T::from_n(k) * T::PI();
                (lam * lam).powf(exponent)
            })
            .collect()
    }

    /// Tridiagonal solve of (-D2 + q0 + diag(q)) u = rhs.
    fn laplace_solve(&self, q: &[T], rhs: &[T]) -> Vec<T> {
        let n = self.n;
        let h = self.h();
        let inv_h2 = T::one() / (h * h);
        let off = -inv_h2;
        let two = T::from_f(2.0);

        let mut c = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];
        let diag0 = two * inv_h2 + self.q0 + q[0];
        c[0] = off / diag0;
        d[0] = rhs[0] / diag0;
        for i in 1..n {
            let diag = two * inv_h2 + self.q0 + q[i];
            let denom = diag - off * c[i - 1];
            c[i] = off / denom;
            d[i] = (rhs[i] - off * d[i - 1]) / denom;
        }
        let mut u = vec![T::zero(); n];
        u[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            u[i] = d[i] - c[i] * u[i + 1];
        }
        u
    }

    /// Dense Nystrom surrogate for the Green kernel.
    pub fn build_green(&self) -> GreenMatrix<T> {
        let n = self.n;
        let h = self.h();
        let mut values = vec![T::zero(); n * n];
        match self.kind {
            OperatorKind::Laplace => {
                // columns of the inverse; kernel value is column / h
                let shift = vec![T::zero(); n];
                let mut e = vec![T::zero(); n];
                for j in 0..n {
                    e[j] = T::one();
                    let col = self.laplace_solve(&shift, &e);
                    e[j] = T::zero();
                    for i in 0..n {
                        values[i * n + j] = col[i] / h;
                    }
                }
            }
            OperatorKind::SpectralFractional { exponent } => {
                let grid = self.grid();
                let two = T::from_f(2.0);
                let mut sines = vec![T::zero(); n];
                for k in 1..=self.modes {
                    let lam = (T::from_n(k) * T::PI() * T::from_n(k) * T::PI()).powf(exponent);
                    let c = two / (lam + self.q0);
                    for (i, &x) in grid.iter().enumerate() {
                        sines[i] = (T::from_n(k) * T::PI() * x).sin();
                    }
                    for i in 0..n {
                        let si = c * sines[i];
                        let row = &mut values[i * n..(i + 1) * n];
                        for (j, r) in row.iter_mut().enumerate() {
                            *r += si * sines[j];
                        }
                    }
                }
            }
        }
        GreenMatrix {
            op: self.clone(),
            h,
            n,
            values,
        }
    }
}

/// Dense kernel values G(x_i, y_j) on the interior grid, applied with
/// trapezoid (uniform-h) quadrature weights. Immutable after build.
#[derive(Debug, Clone)]
pub struct GreenMatrix<T> {
    pub op: OperatorSpec<T>,
    pub h: T,
    pub n: usize,
    values: Vec<T>,
}

impl<T: Scalar> GreenMatrix<T> {
    pub fn entry(&self, i: usize, j: usize) -> T {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// u(x_i) = h * sum_j G(x_i, y_j) f(y_j).
    pub fn apply(&self, f: &[T]) -> Vec<T> {
        assert_eq!(f.len(), self.n);
        (0..self.n)
            .map(|i| {
                let row = self.row(i);
                let mut acc = T::zero();
                for (g, v) in row.iter().zip(f.iter()) {
                    acc += *g * *v;
                }
                acc * self.h
            })
            .collect()
    }

    /// Largest absolute asymmetry G(x,y) - G(y,x).
    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.entry(i, j) - self.entry(j, i)).abs());
            }
        }
        worst
    }

    /// Kernel value at on-grid coordinates.
    pub fn value_at(&self, x: T, y: T) -> Result<T> {
        let i = grid_index(x, self.n)?;
        let j = grid_index(y, self.n)?;
        Ok(self.entry(i, j))
    }
}

/// Interior grid index of an on-grid coordinate (x = (i+1) h).
pub fn grid_index<T: Scalar>(x: T, n: usize) -> Result<usize> {
    let pos = x * T::from_n(n + 1);
    let idx = pos.round();
    if (pos - idx).abs() > T::from_f(1e-9) {
        return Err(Error::ProbeOffGrid(x.to_f64().unwrap_or(f64::NAN)));
    }
    let i = idx
        .to_usize()
        .ok_or(Error::ProbeOffGrid(x.to_f64().unwrap_or(f64::NAN)))?;
    if i == 0 || i > n {
        return Err(Error::ProbeOffGrid(x.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(i - 1)
}

/// Solve the averaged problem (P + q0) u = f; boundary values vanish by
/// construction.
pub fn homogenized_solve<T: Scalar>(op: &OperatorSpec<T>, f: &[T]) -> Vec<T> {
    op.apply_inverse(f)
}

/// sup over off-diagonal pairs of |G(x,y)| |x-y|^(1-beta). Stable under
/// grid refinement exactly when beta is admissible for the kernel.
pub fn singularity_diagnostic<T: Scalar>(gm: &GreenMatrix<T>, beta: T) -> T {
    assert!(beta > T::zero() && beta <= T::one());
    let h = gm.h;
    let mut sup = T::zero();
    for i in 0..gm.n {
        for j in 0..gm.n {
            if i == j {
                continue;
            }
            let dist = (T::from_n(i) - T::from_n(j)).abs() * h;
            sup = sup.max(gm.entry(i, j).abs() * dist.powf(T::one() - beta));
        }
    }
    sup
}

/// max over y of the steepest adjacent-node difference quotient in x.
pub fn lipschitz_diagnostic<T: Scalar>(gm: &GreenMatrix<T>) -> T {
    let mut worst = T::zero();
    for j in 0..gm.n {
        for i in 0..gm.n - 1 {
            worst = worst.max((gm.entry(i + 1, j) - gm.entry(i, j)).abs() / gm.h);
        }
    }
    worst
}

/// Largest singular value of the Nystrom operator h*G by power iteration
/// (the kernel is symmetric, so this is the spectral radius).
pub fn operator_norm_estimate<T: Scalar>(gm: &GreenMatrix<T>) -> T {
    let n = gm.n;
    let mut v: Vec<T> = (0..n)
        .map(|i| (T::from_n(i + 1) * T::PI() / T::from_n(n + 1)).sin())
        .collect();
    let mut lambda = T::zero();
    for _ in 0..200 {
        let w = gm.apply(&v);
        let norm = w.iter().map(|&x| x * x).sum::<T>().sqrt();
        if norm == T::zero() {
            return T::zero();
        }
        let next: Vec<T> = w.iter().map(|&x| x / norm).collect();
        let new_lambda = norm;
        let done = (new_lambda - lambda).abs() <= T::from_f(1e-13) * new_lambda;
        lambda = new_lambda;
        v = next;
        if done {
            break;
        }
    }
    lambda
}

/// Unnormalized type-I discrete sine transform, self-inverse up to the
/// factor (n+1)/2, computed through a length-2(n+1) complex FFT.
pub(crate) struct SineTransform<T: Scalar> {
    n: usize,
    fft: Arc<dyn Fft<T>>,
}

impl<T: Scalar> SineTransform<T> {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(2 * (n + 1));
        SineTransform { n, fft }
    }

    /// out[k] = sum_j v[j] sin(pi (j+1)(k+1) / (n+1)).
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.n);
        let len = 2 * (self.n + 1);
        let mut buf = vec![Complex::new(T::zero(), T::zero()); len];
        for (j, &x) in v.iter().enumerate() {
            buf[j + 1] = Complex::new(x, T::zero());
            buf[len - 1 - j] = Complex::new(-x, T::zero());
        }
        self.fft.process(&mut buf);
        let half = T::from_f(0.5);
        (0..self.n).map(|k| -buf[k + 1].im * half).collect()
    }
}

fn conjugate_gradient<T: Scalar>(apply: &dyn Fn(&[T]) -> Vec<T>, b: &[T]) -> Result<Vec<T>> {
    let n = b.len();
    let dot = |a: &[T], c: &[T]| -> T {
        let mut acc = T::zero();
        for (x, y) in a.iter().zip(c.iter()) {
            acc += *x * *y;
        }
        acc
    };
    let bnorm = dot(b, b).sqrt();
    if bnorm == T::zero() {
        return Ok(vec![T::zero(); n]);
    }
    let tol = T::from_f(CG_RELATIVE_TOLERANCE) * bnorm;

    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rs = dot(&r, &r);
    for _ in 0..CG_MAX_ITERATIONS {
        if rs.sqrt() <= tol {
            return Ok(x);
        }
        let ap = apply(&p);
        let alpha = rs / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new = dot(&r, &r);
        let beta = rs_new / rs;
        rs = rs_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    if rs.sqrt() <= tol {
        Ok(x)
    } else {
        Err(Error::SolveDiverged {
            iterations: CG_MAX_ITERATIONS,
            residual: rs.sqrt().to_f64().unwrap_or(f64::NAN),
        })
    }
}
