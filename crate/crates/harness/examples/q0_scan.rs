// Exact finite-window first-order slope of the rough-kernel rate case as a
// function of the zeroth-order coefficient.
use lrdhom_core::chaos::{potential_autocov, PotentialFn, PotentialSpec};
use lrdhom_core::gaussian::fgn_covariance_real;
use lrdhom_core::green::OperatorSpec;
use lrdhom_core::stats::fit_loglog_slope;
use rayon::prelude::*;

fn main() {
    let n = 4095usize;
    let hurst = 0.55f64;
    let eps_list: Vec<f64> = (4..=9).map(|k| 0.5f64.powi(k)).collect();
    for &q0 in &[0.3f64, 0.5, 1.0, 2.0, 4.0] {
        let op = OperatorSpec::spectral_fractional(0.2f64, q0, n, None).unwrap();
        let h = op.h();
        let u0 = op.apply_inverse(&vec![1.0f64; n]);
        let amplitude = q0.min(1.0);
        let pot = PotentialSpec::from_catalog(PotentialFn::Sin { amplitude }).unwrap();

        let mut profile = vec![0.0f64; n];
        let cols: Vec<(usize, Vec<f64>)> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                (j, op.apply_inverse(&op.apply_inverse(&e)))
            })
            .collect();
        for (j, col) in cols {
            for i in 0..n {
                profile[i.abs_diff(j)] += col[i] * u0[i] * u0[j];
            }
        }
        for v in profile.iter_mut() {
            *v *= h;
        }
        let vals: Vec<f64> = eps_list
            .iter()
            .map(|&eps| {
                profile
                    .iter()
                    .enumerate()
                    .map(|(d, &w)| {
                        let gg = fgn_covariance_real(hurst, d as f64 * h / eps).unwrap();
                        w * potential_autocov(&pot.chaos, gg).unwrap().value
                    })
                    .sum()
            })
            .collect();
        let slope = fit_loglog_slope(&eps_list, &vals).unwrap().slope;
        println!("q0 = {:4}: exact window slope {:.4}", q0, slope);
    }
}
