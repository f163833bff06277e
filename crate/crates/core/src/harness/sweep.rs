use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::experiment::run_scattering_experiment;
use crate::coupling::CouplingKind;
use crate::error::{Error, Result};
use crate::fit::loglog_fit;

/// Allowed distance between the fitted `e₂` exponent and `−δ/2`.
pub const E2_SLOPE_TOLERANCE: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub v: f64,
    pub coupling: CouplingKind,
    pub strength: f64,
    /// `"ok"` or the error message of a failed member run.
    pub status: String,
    pub e1: f64,
    pub e2: f64,
    pub e3_sup: f64,
    pub ratio_error: f64,
    pub ratio_edge1: f64,
    pub max_far_end_mass: f64,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Log-log slopes of the error metrics against `v` for one coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFit {
    pub coupling: CouplingKind,
    pub points: usize,
    pub e1_slope: f64,
    pub e2_slope: f64,
    pub e3_slope: f64,
    pub ratio_slope: f64,
    /// `|e2_slope + δ/2| ≤ 0.3`.
    pub e2_consistent: bool,
    pub e3_negative: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub fits: Vec<SweepFit>,
}

const ROW_COLUMNS: [&str; 10] =
    ["v", "coupling", "strength", "status", "e1", "e2", "e3_sup", "ratio_error", "ratio_edge1", "max_far_end_mass"];
const FIT_COLUMNS: [&str; 8] =
    ["coupling", "points", "e1_slope", "e2_slope", "e3_slope", "ratio_slope", "e2_consistent", "e3_negative"];

/// Writer that emits `columns` even when no record follows.
fn headed<W: Write>(w: W, columns: &[&str]) -> Result<csv::Writer<W>> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(columns)?;
    Ok(out)
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = headed(w, &ROW_COLUMNS)?;
        for r in &self.rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// Reads rows written by [`SweepTable::write_csv`] and refits the slopes.
    pub fn read_csv<R: Read>(r: R, delta: f64) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let rows = rd.deserialize().collect::<std::result::Result<Vec<SweepRow>, _>>()?;
        let fits = fits_for(&rows, delta);
        Ok(SweepTable { rows, fits })
    }

    pub fn write_fits_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = headed(w, &FIT_COLUMNS)?;
        for f in &self.fits {
            out.serialize(f)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn fits_for(rows: &[SweepRow], delta: f64) -> Vec<SweepFit> {
    let mut kinds: Vec<CouplingKind> = Vec::new();
    for r in rows {
        if !kinds.contains(&r.coupling) {
            kinds.push(r.coupling);
        }
    }
    kinds
        .into_iter()
        .filter_map(|c| {
            let mine: Vec<&SweepRow> = rows.iter().filter(|r| r.coupling == c).collect();
            fit_coupling(&mine, c, delta)
        })
        .collect()
}

fn member(base: &ExperimentConfig, v: f64, coupling: CouplingKind) -> SweepRow {
    let cfg = ExperimentConfig { v, coupling, label: format!("{}-v{v}", coupling), ..base.clone() };
    let mut row = SweepRow {
        v,
        coupling,
        strength: cfg.strength,
        status: "ok".into(),
        e1: f64::NAN,
        e2: f64::NAN,
        e3_sup: f64::NAN,
        ratio_error: f64::NAN,
        ratio_edge1: f64::NAN,
        max_far_end_mass: f64::NAN,
    };
    match run_scattering_experiment(&cfg) {
        Ok(out) => {
            let r = &out.report;
            row.e1 = r.e1;
            row.e2 = r.e2;
            row.e3_sup = r.e3_sup;
            row.ratio_error = r.max_ratio_error();
            row.ratio_edge1 = r.ratios[0];
            row.max_far_end_mass = r.max_far_end_mass;
        }
        Err(e) => row.status = e.to_string(),
    }
    row
}

fn fit_coupling(rows: &[&SweepRow], coupling: CouplingKind, delta: f64) -> Option<SweepFit> {
    let ok: Vec<&&SweepRow> = rows.iter().filter(|r| r.is_ok()).collect();
    if ok.len() < 2 {
        return None;
    }
    let vs: Vec<f64> = ok.iter().map(|r| r.v).collect();
    let slope = |f: fn(&SweepRow) -> f64| {
        let ys: Vec<f64> = ok.iter().map(|r| f(r)).collect();
        loglog_fit(&vs, &ys).map(|p| p.slope).unwrap_or(f64::NAN)
    };
    let e2_slope = slope(|r| r.e2);
    let e3_slope = slope(|r| r.e3_sup);
    Some(SweepFit {
        coupling,
        points: ok.len(),
        e1_slope: slope(|r| r.e1),
        e2_slope,
        e3_slope,
        ratio_slope: slope(|r| r.ratio_error),
        e2_consistent: (e2_slope + delta / 2.0).abs() <= E2_SLOPE_TOLERANCE,
        e3_negative: e3_slope < 0.0,
    })
}

/// Runs every `(coupling, v)` member of the grid on up to `workers` threads.
/// Failed members become rows with an error status; rows keep the input order.
pub fn run_sweep(
    base: &ExperimentConfig,
    v_list: &[f64],
    couplings: &[CouplingKind],
    workers: usize,
) -> Result<SweepTable> {
    if v_list.len() < 3 {
        return Err(Error::invalid(format!("sweep needs at least 3 velocities, got {}", v_list.len())));
    }
    if !v_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("sweep velocities must be strictly increasing"));
    }
    if couplings.is_empty() {
        return Ok(SweepTable::default());
    }
    let jobs: Vec<(CouplingKind, f64)> = couplings.iter().flat_map(|&c| v_list.iter().map(move |&v| (c, v))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::NumericFailure(format!("thread pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| jobs.par_iter().map(|&(c, v)| member(base, v, c)).collect());
    let fits = fits_for(&rows, base.delta);
    Ok(SweepTable { rows, fits })
}
