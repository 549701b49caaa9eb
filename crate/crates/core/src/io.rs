//! Persisted formats: plain CSV tables, and raw little-endian f64 arrays
//! with a JSON sidecar carrying the generating parameters.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::gaussian::{GaussianPath, PathKind};
use crate::green::GreenMatrix;
use crate::hermite_process::HermitePath;
use crate::scalar::Scalar;

/// CSV columns: index, x, value.
pub fn write_path_csv<T: Scalar>(path: &GaussianPath<T>, out: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(out)?);
    writeln!(w, "index,x,value")?;
    for (k, v) in path.values.iter().enumerate() {
        writeln!(w, "{},{},{}", k, path.x(k), v)?;
    }
    Ok(())
}

fn write_raw<T: Scalar>(values: &[T], out: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(out)?);
    for v in values {
        w.write_all(&v.to_f64().expect("finite value").to_le_bytes())?;
    }
    Ok(())
}

fn write_sidecar(meta: serde_json::Value, out: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(out)?);
    writeln!(w, "{}", serde_json::to_string_pretty(&meta).expect("json"))?;
    Ok(())
}

/// Raw f64 array `<base>.bin` plus `<base>.json` sidecar.
pub fn export_path_raw<T: Scalar>(path: &GaussianPath<T>, base: &Path) -> Result<()> {
    write_raw(&path.values, &base.with_extension("bin"))?;
    write_sidecar(
        serde_json::json!({
            "kind": match path.kind { PathKind::Fbm => "fbm", PathKind::Fgn => "fgn" },
            "hurst": path.hurst.to_f64(),
            "dx": path.dx.to_f64(),
            "len": path.values.len(),
            "seed": path.seed,
        }),
        &base.with_extension("json"),
    )
}

pub fn export_hermite_raw<T: Scalar>(path: &HermitePath<T>, base: &Path) -> Result<()> {
    write_raw(&path.values, &base.with_extension("bin"))?;
    write_sidecar(
        serde_json::json!({
            "order": path.order,
            "hurst": path.hurst.to_f64(),
            "self_similarity": path.self_similarity.to_f64(),
            "horizon": path.horizon,
            "mesh_inv": path.mesh_inv,
            "grid": path.grid_len(),
            "seed": path.seed,
        }),
        &base.with_extension("json"),
    )
}

/// Debug export of the dense kernel; row-major, not a stable interchange
/// format.
pub fn export_green_raw<T: Scalar>(gm: &GreenMatrix<T>, base: &Path) -> Result<()> {
    let flat: Vec<T> = (0..gm.n).flat_map(|i| gm.row(i).to_vec()).collect();
    write_raw(&flat, &base.with_extension("bin"))?;
    write_sidecar(
        serde_json::json!({
            "n": gm.n,
            "h": gm.h.to_f64(),
            "q0": gm.op.q0.to_f64(),
            "kind": match gm.op.kind {
                crate::green::OperatorKind::Laplace => serde_json::json!("laplace"),
                crate::green::OperatorKind::SpectralFractional { exponent } =>
                    serde_json::json!({"spectral_fractional": exponent.to_f64()}),
            },
            "modes": gm.op.modes,
        }),
        &base.with_extension("json"),
    )
}

/// CSV columns: x, u_eps, u0, normalized (interior nodes).
pub fn write_fluctuation_csv<T: Scalar>(
    sample: &crate::solver::FluctuationSample<T>,
    h: T,
    out: &Path,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(out)?);
    writeln!(w, "x,u_eps,u0,normalized")?;
    for i in 0..sample.u_eps.len() {
        writeln!(
            w,
            "{},{},{},{}",
            T::from_n(i + 1) * h,
            sample.u_eps[i],
            sample.u0[i],
            sample.normalized[i]
        )?;
    }
    Ok(())
}

/// CSV columns: replicate, value.
pub fn write_samples_csv<T: Scalar>(samples: &[T], out: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(out)?);
    writeln!(w, "replicate,value")?;
    for (k, v) in samples.iter().enumerate() {
        writeln!(w, "{},{}", k, v)?;
    }
    Ok(())
}
