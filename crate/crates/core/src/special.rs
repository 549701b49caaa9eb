//! Small special-function kit: log-gamma, Beta, factorials.

use crate::scalar::Scalar;

// Lanczos approximation, g = 7, 9 coefficients. Accurate to ~1e-13 for x > 0.
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the Gamma function for positive arguments.
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    let xf = x.to_f64().expect("finite argument");
    assert!(xf > 0.0, "ln_gamma requires a positive argument");
    T::from_f(ln_gamma_f64(xf))
}

fn ln_gamma_f64(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma_f64(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Euler Beta function B(a, b) for positive arguments.
pub fn beta<T: Scalar>(a: T, b: T) -> T {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// n! as a scalar. Exact in f64 up to 170!.
pub fn factorial<T: Scalar>(n: usize) -> T {
    let mut acc = T::one();
    for k in 2..=n {
        acc *= T::from_n(k);
    }
    acc
}

/// ln(n!).
pub fn ln_factorial<T: Scalar>(n: usize) -> T {
    ln_gamma(T::from_n(n + 1))
}

/// The moving-average tail integral `int_0^inf (u + u^2)^(H0 - 3/2) du`,
/// finite for H0 in (1/2, 1).
///
/// Evaluated by adaptive quadrature after power substitutions that remove
/// the endpoint singularities; equals B(H0 - 1/2, 2 - 2H0) analytically,
/// which callers use as a cross-check.
pub fn moving_average_integral<T: Scalar>(hurst: T) -> T {
    let half = T::from_f(0.5);
    let one = T::one();
    let two = T::from_f(2.0);
    assert!(
        hurst > half && hurst < one,
        "integral finite only for H0 in (1/2, 1)"
    );
    let p = hurst - T::from_f(1.5);
    let tol = T::from_f(1e-12);

    // [0,1]: u = s^(1/(p+1)) flattens u^p at the origin
    let q1 = one / (p + one);
    let near = crate::quad::integrate_adaptive(
        &|s: T| {
            if s <= T::zero() {
                one
            } else {
                (one + s.powf(q1)).powf(p)
            }
        },
        T::zero(),
        one,
        tol,
    ) * q1;

    // [1,inf): u = 1/t, then t = s^(1/(2-2H0))
    let q2 = one / (two - two * hurst);
    let far = crate::quad::integrate_adaptive(
        &|s: T| {
            if s <= T::zero() {
                one
            } else {
                (one + s.powf(q2)).powf(p)
            }
        },
        T::zero(),
        one,
        tol,
    ) * q2;

    near + far
}

/// Normalizer of the fGn moving-average kernel,
/// `A(1, H0) / (H0 - 1/2)` with `A(1, H0) = sqrt(H0(2H0-1) / I)`.
/// Multiplying the raw increment kernel by this constant gives unit L2 norm.
pub fn fgn_kernel_normalizer<T: Scalar>(hurst: T) -> T {
    let half = T::from_f(0.5);
    let i = moving_average_integral(hurst);
    let a = (hurst * (T::from_f(2.0) * hurst - T::one()) / i).sqrt();
    a / (hurst - half)
}
