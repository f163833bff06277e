//! Plot-ready column files; no rendering.

use std::io::Write;

use super::experiment::ExperimentReport;
use super::sweep::SweepTable;
use crate::error::Result;

/// `coupling, v, e1, e2, e3_sup, ratio_error` for every successful sweep member.
pub fn write_error_vs_v<W: Write>(table: &SweepTable, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["coupling", "v", "e1", "e2", "e3_sup", "ratio_error"])?;
    for r in table.rows.iter().filter(|r| r.is_ok()) {
        out.write_record([
            r.coupling.to_string(),
            r.v.to_string(),
            r.e1.to_string(),
            r.e2.to_string(),
            r.e3_sup.to_string(),
            r.ratio_error.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Amplitude ratios over phase 3 next to their limits `|r̃|, |t̃|, |t̃|`.
pub fn write_ratio_vs_t<W: Write>(report: &ExperimentReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "t",
        "ratio_edge1",
        "ratio_edge2",
        "ratio_edge3",
        "expected_edge1",
        "expected_edge2",
        "expected_edge3",
    ])?;
    for s in &report.phase3 {
        let mut rec = vec![s.t.to_string()];
        rec.extend(s.ratios.iter().map(f64::to_string));
        rec.extend(report.expected_ratios.iter().map(f64::to_string));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// `t, e3` over phase 3.
pub fn write_error_vs_t<W: Write>(report: &ExperimentReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "e3"])?;
    for s in &report.phase3 {
        out.write_record([s.t.to_string(), s.e3.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::CouplingKind;
    use crate::harness::SweepRow;

    #[test]
    fn failed_rows_are_skipped() {
        let row = |v: f64, status: &str| SweepRow {
            v,
            coupling: CouplingKind::Delta,
            strength: 1.0,
            status: status.into(),
            e1: 0.1,
            e2: 0.2,
            e3_sup: 0.3,
            ratio_error: 0.01,
            ratio_edge1: 0.6,
            max_far_end_mass: 0.0,
        };
        let t = SweepTable { rows: vec![row(8.0, "ok"), row(16.0, "truncation")], fits: Vec::new() };
        let mut buf = Vec::new();
        write_error_vs_v(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().collect::<Vec<_>>(),
            ["coupling,v,e1,e2,e3_sup,ratio_error", "delta,8,0.1,0.2,0.3,0.01"]
        );
    }
}
