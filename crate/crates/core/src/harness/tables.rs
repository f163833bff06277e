//! Tabulated scattering data and resolvent samples for the `kernels` command.

use std::io::Write;

use num_complex::Complex64;

use crate::coupling::{CouplingKind, VertexCoupling};
use crate::error::Result;
use crate::linear::{rescaled_coefficients, resolvent_kernel, scattering_coefficients};

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect(),
    }
}

/// `k, r_re, r_im, t_re, t_im, unitarity_defect`.
pub fn write_scattering_table<W: Write>(coupling: VertexCoupling, ks: &[f64], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["k", "r_re", "r_im", "t_re", "t_im", "unitarity_defect"])?;
    for &k in ks {
        let s = scattering_coefficients(coupling, k)?;
        out.write_record([k, s.r.re, s.r.im, s.t.re, s.t.im, s.unitarity_defect()].map(|x| x.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

/// `v, r_tilde_re, r_tilde_im, t_tilde_re, t_tilde_im, unitarity_defect`.
pub fn write_rescaled_table<W: Write>(kind: CouplingKind, strength: f64, vs: &[f64], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["v", "r_tilde_re", "r_tilde_im", "t_tilde_re", "t_tilde_im", "unitarity_defect"])?;
    for &v in vs {
        let c = rescaled_coefficients(kind, strength, v)?;
        out.write_record([v, c.r.re, c.r.im, c.t.re, c.t.im, c.unitarity_defect()].map(|x| x.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

/// Resolvent entries `G_ij(x, y; k)` for every pair of sample points, one row per entry.
pub fn write_resolvent_table<W: Write>(coupling: VertexCoupling, k: Complex64, points: &[f64], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["k_re", "k_im", "x", "y", "i", "j", "g_re", "g_im"])?;
    for &x in points {
        for &y in points {
            let g = resolvent_kernel(coupling, k, x, y)?;
            for i in 0..3 {
                for j in 0..3 {
                    let z = g.get(i, j);
                    out.write_record([
                        k.re.to_string(),
                        k.im.to_string(),
                        x.to_string(),
                        y.to_string(),
                        (i + 1).to_string(),
                        (j + 1).to_string(),
                        z.re.to_string(),
                        z.im.to_string(),
                    ])?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_hits_endpoints() {
        let g = log_grid(0.1, 100.0, 4);
        assert_eq!(g.len(), 4);
        assert!((g[0] - 0.1).abs() < 1e-15 && (g[3] - 100.0).abs() < 1e-12);
        assert!((g[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kirchhoff_table_rows() {
        let mut buf = Vec::new();
        write_scattering_table(VertexCoupling::Kirchhoff, &[1.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(row[1], -1.0 / 3.0);
        assert_eq!(row[3], 2.0 / 3.0);
    }

    #[test]
    fn resolvent_table_has_nine_entries_per_pair() {
        let mut buf = Vec::new();
        write_resolvent_table(VertexCoupling::Delta(1.0), Complex64::new(1.0, 0.5), &[0.5, 1.0], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 4 * 9);
    }

    #[test]
    fn resolvent_rejects_real_k() {
        let mut buf = Vec::new();
        assert!(write_resolvent_table(VertexCoupling::Kirchhoff, Complex64::new(1.0, 0.0), &[1.0], &mut buf).is_err());
    }
}
