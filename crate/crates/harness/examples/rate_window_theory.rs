// Exact first-order theory for the rough-kernel case:
// E|Ginv q u0|^2 = h * sum_{ij} (A^-2)_{ij} u0_i u0_j gamma_q((i-j)h/eps).
// The lag profile rho(d) = h * sum_{|i-j|=d} (A^-2)_{ij} u0_i u0_j is
// eps-independent, so the curve can be scanned over many scales at once.
use lrdhom_core::chaos::{potential_autocov, PotentialFn, PotentialSpec};
use lrdhom_core::gaussian::fgn_covariance_real;
use lrdhom_core::green::OperatorSpec;
use lrdhom_core::stats::fit_loglog_slope;

fn main() {
    let n = 4095usize;
    let op = OperatorSpec::spectral_fractional(0.2f64, 1.0, n, None).unwrap();
    let h = op.h();
    let f = vec![1.0f64; n];
    let u0 = op.apply_inverse(&f);
    let pot = PotentialSpec::from_catalog(PotentialFn::Sin { amplitude: 1.0 }).unwrap();
    let hurst = 0.55f64;

    // columns of A^-2 via two spectral inverse applies
    let mut rho = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = op.apply_inverse(&op.apply_inverse(&e));
        e[j] = 0.0;
        for i in 0..n {
            let d = i.abs_diff(j);
            rho[d] += col[i] * u0[i] * u0[j];
        }
        if j % 1024 == 0 {
            eprintln!("col {j}");
        }
    }
    // h * quadratic form; A^-1 includes no h-weighting, matches the MC norm
    for v in rho.iter_mut() {
        *v *= h;
    }

    let theory = |eps: f64| -> f64 {
        let mut acc = 0.0;
        for (d, &w) in rho.iter().enumerate() {
            let gg = fgn_covariance_real(hurst, d as f64 * h / eps).unwrap();
            acc += w * potential_autocov(&pot.chaos, gg).unwrap().value;
        }
        acc
    };

    let eps_list: Vec<f64> = (4..=16).map(|k| 0.5f64.powi(k)).collect();
    let vals: Vec<f64> = eps_list.iter().map(|&e| theory(e)).collect();
    for (e, v) in eps_list.iter().zip(vals.iter()) {
        println!("eps={:10.4e}  E1={:.6e}", e, v);
    }
    for w in 0..=7 {
        let xs = &eps_list[w..w + 6];
        let ys = &vals[w..w + 6];
        let fit = fit_loglog_slope(xs, ys).unwrap();
        println!(
            "window eps in [2^-{}, 2^-{}]: slope {:.4}",
            w + 9,
            w + 4,
            fit.slope
        );
    }
}
