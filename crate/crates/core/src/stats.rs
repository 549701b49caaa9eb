//! Sample statistics and the log-log slope fit used by the decay and rate
//! studies.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn mean<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / T::from_n(xs.len())
}

/// Unbiased sample variance.
pub fn variance<T: Scalar>(xs: &[T]) -> T {
    let m = mean(xs);
    let ss = xs.iter().map(|&x| (x - m) * (x - m)).sum::<T>();
    ss / T::from_n(xs.len() - 1)
}

/// Standard error of the sample mean.
pub fn standard_error<T: Scalar>(xs: &[T]) -> T {
    (variance(xs) / T::from_n(xs.len())).sqrt()
}

/// Sample skewness m3 / m2^(3/2).
pub fn skewness<T: Scalar>(xs: &[T]) -> T {
    let m = mean(xs);
    let n = T::from_n(xs.len());
    let m2 = xs.iter().map(|&x| (x - m) * (x - m)).sum::<T>() / n;
    let m3 = xs.iter().map(|&x| (x - m) * (x - m) * (x - m)).sum::<T>() / n;
    m3 / m2.powf(T::from_f(1.5))
}

/// Ordinary least squares on (ln x, ln y).
#[derive(Debug, Clone, Copy)]
pub struct LogLogFit<T> {
    pub slope: T,
    pub slope_stderr: T,
    pub intercept: T,
}

pub fn fit_loglog_slope<T: Scalar>(xs: &[T], ys: &[T]) -> Result<LogLogFit<T>> {
    if xs.len() != ys.len() || xs.len() < 4 {
        return Err(Error::BadFitInput);
    }
    if xs.iter().chain(ys.iter()).any(|&v| v <= T::zero()) {
        return Err(Error::BadFitInput);
    }
    let lx: Vec<T> = xs.iter().map(|&x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|&y| y.ln()).collect();
    let mx = mean(&lx);
    let my = mean(&ly);
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in lx.iter().zip(ly.iter()) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == T::zero() {
        return Err(Error::BadFitInput);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ssr = T::zero();
    for (&x, &y) in lx.iter().zip(ly.iter()) {
        let r = y - (intercept + slope * x);
        ssr += r * r;
    }
    let dof = T::from_n(lx.len() - 2);
    let stderr = (ssr / dof / sxx).sqrt();
    Ok(LogLogFit {
        slope,
        slope_stderr: stderr,
        intercept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    #[test]
    fn slope_of_square_law_is_two() {
        let xs = [1.0f64, 2.0, 3.0, 4.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let fit = fit_loglog_slope(&xs, &ys).unwrap();
        assert_abs_diff_eq!(fit.slope, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.slope_stderr, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn slope_of_constant_is_zero() {
        let xs = [1.0f64, 2.0, 4.0, 8.0];
        let ys = [3.5f64, 3.5, 3.5, 3.5];
        let fit = fit_loglog_slope(&xs, &ys).unwrap();
        assert_abs_diff_eq!(fit.slope, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn noisy_sqrt_law_recovers_half() {
        let mut rng = crate::rng::replicate_rng(11, 0, 0);
        let xs: Vec<f64> = (1..=24).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| x.sqrt() * (1.0 + rng.gen_range(-0.01..0.01)))
            .collect();
        let fit = fit_loglog_slope(&xs, &ys).unwrap();
        assert!((fit.slope - 0.5).abs() < 0.02, "slope {}", fit.slope);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_loglog_slope(&[1.0f64, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_loglog_slope(&[1.0f64, 2.0, 3.0, -4.0], &[1.0, 2.0, 3.0, 4.0]).is_err());
    }

    #[test]
    fn moments_sane() {
        let xs = [1.0f64, 2.0, 3.0, 4.0];
        assert_abs_diff_eq!(mean(&xs), 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(variance(&xs), 5.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(skewness(&xs), 0.0, epsilon = 1e-14);
    }
}
