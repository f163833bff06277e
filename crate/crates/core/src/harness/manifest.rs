use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::checkpoint::checkpoint_save;
use super::config::{ExperimentConfig, Resolution};
use super::experiment::{ExperimentOutcome, ExperimentReport};
use super::sweep::SweepTable;
use crate::coupling::CouplingKind;
use crate::error::{Error, Result};
use crate::field::GraphField;

pub const TOOL_NAME: &str = "stargraph";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Evidence that the finite grid behaved like the half-line problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    pub far_end_mass_threshold: f64,
    pub max_far_end_mass: f64,
    pub truncation_ok: bool,
    pub max_mass_drift: f64,
    pub max_energy_drift: f64,
    /// Points per carrier wavelength, `4π/(v·dx)`.
    pub points_per_wavelength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub created_unix: u64,
    pub config: ExperimentConfig,
    pub resolution: Resolution,
    pub certificates: Certificates,
    pub outputs: Vec<OutputFile>,
}

fn unix_now() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn inventory(paths: &[PathBuf]) -> Result<Vec<OutputFile>> {
    paths
        .iter()
        .map(|p| {
            Ok(OutputFile {
                name: p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
                bytes: std::fs::metadata(p)?.len(),
            })
        })
        .collect()
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig, report: &ExperimentReport) -> Self {
        RunManifest {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            created_unix: unix_now(),
            config: config.clone(),
            resolution: report.resolution,
            certificates: Certificates {
                far_end_mass_threshold: config.far_end_mass_threshold,
                max_far_end_mass: report.max_far_end_mass,
                truncation_ok: report.max_far_end_mass <= config.far_end_mass_threshold,
                max_mass_drift: report.max_mass_drift,
                max_energy_drift: report.max_energy_drift,
                points_per_wavelength: 4.0 * std::f64::consts::PI / (config.v * report.resolution.dx),
            },
            outputs: Vec::new(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }
}

/// Field samples as `x, psi1_re, psi1_im, psi2_re, …`.
pub fn write_field_csv<W: Write>(field: &GraphField, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "psi1_re", "psi1_im", "psi2_re", "psi2_im", "psi3_re", "psi3_im"])?;
    let grid = field.grid();
    for m in 0..grid.n_points {
        let mut rec = vec![grid.x(m).to_string()];
        for j in 0..3 {
            let z = field.edge(j)[m];
            rec.push(z.re.to_string());
            rec.push(z.im.to_string());
        }
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Phase-3 samples as `t, e3, mass_edge1..3, ratio_edge1..3`.
pub fn write_phase3_csv<W: Write>(report: &ExperimentReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "t",
        "e3",
        "mass_edge1",
        "mass_edge2",
        "mass_edge3",
        "ratio_edge1",
        "ratio_edge2",
        "ratio_edge3",
    ])?;
    for p in &report.phase3 {
        let mut rec = vec![p.t.to_string(), p.e3.to_string()];
        rec.extend(p.edge_mass.iter().map(f64::to_string));
        rec.extend(p.ratios.iter().map(f64::to_string));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Scattering coefficients and measured ratios as one CSV row with re/im pairs.
pub fn write_summary_csv<W: Write>(report: &ExperimentReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "label",
        "v",
        "r_tilde_re",
        "r_tilde_im",
        "t_tilde_re",
        "t_tilde_im",
        "e1",
        "e2",
        "e3_sup",
        "ratio_edge1",
        "ratio_edge2",
        "ratio_edge3",
        "max_ratio_error",
    ])?;
    let s = &report.schedule;
    let mut rec = vec![
        report.label.clone(),
        s.v.to_string(),
        report.r_tilde.re.to_string(),
        report.r_tilde.im.to_string(),
        report.t_tilde.re.to_string(),
        report.t_tilde.im.to_string(),
        report.e1.to_string(),
        report.e2.to_string(),
        report.e3_sup.to_string(),
    ];
    rec.extend(report.ratios.iter().map(f64::to_string));
    rec.push(report.max_ratio_error().to_string());
    out.write_record(&rec)?;
    out.flush()?;
    Ok(())
}

/// Writes `report.json`, `summary.csv`, `trace.csv`, `phase3.csv`, `final_state.csv`,
/// `final_state.gnls` and `manifest.toml` into `dir`.
pub fn write_run_outputs(
    config: &ExperimentConfig,
    outcome: &ExperimentOutcome,
    dir: impl AsRef<Path>,
) -> Result<RunManifest> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let report = &outcome.report;
    let mut written: Vec<PathBuf> = Vec::new();
    let mut file = |name: &str| {
        let p = dir.join(name);
        written.push(p.clone());
        p
    };
    std::fs::write(file("report.json"), serde_json::to_string_pretty(report)?)?;
    write_summary_csv(report, std::fs::File::create(file("summary.csv"))?)?;
    outcome.trace.save_csv(file("trace.csv"))?;
    write_phase3_csv(report, std::fs::File::create(file("phase3.csv"))?)?;
    write_field_csv(&outcome.final_state, std::fs::File::create(file("final_state.csv"))?)?;
    checkpoint_save(&outcome.final_state, file("final_state.gnls"))?;

    let mut manifest = RunManifest::new(config, report);
    manifest.outputs = inventory(&written)?;
    manifest.save(dir.join("manifest.toml"))?;
    Ok(manifest)
}

/// Sweep grid and its base configuration; every member differs from `base` only in
/// `v`, `coupling` and `label`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepManifest {
    pub tool: String,
    pub version: String,
    pub created_unix: u64,
    pub base: ExperimentConfig,
    pub v_list: Vec<f64>,
    pub couplings: Vec<CouplingKind>,
    pub workers: usize,
    pub failed_members: usize,
    pub outputs: Vec<OutputFile>,
}

impl SweepManifest {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Writes `sweep.csv`, `fits.csv` and `manifest.toml` into `dir`.
pub fn write_sweep_outputs(
    table: &SweepTable,
    base: &ExperimentConfig,
    v_list: &[f64],
    couplings: &[CouplingKind],
    workers: usize,
    dir: impl AsRef<Path>,
) -> Result<SweepManifest> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let (rows, fits) = (dir.join("sweep.csv"), dir.join("fits.csv"));
    table.save_csv(&rows)?;
    table.write_fits_csv(std::fs::File::create(&fits)?)?;
    let manifest = SweepManifest {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        created_unix: unix_now(),
        base: base.clone(),
        v_list: v_list.to_vec(),
        couplings: couplings.to_vec(),
        workers,
        failed_members: table.rows.iter().filter(|r| !r.is_ok()).count(),
        outputs: inventory(&[rows, fits])?,
    };
    std::fs::write(dir.join("manifest.toml"), manifest.to_toml()?)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_scattering_experiment, SweepRow};

    #[test]
    fn run_outputs_and_manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig { v: 4.0, label: "small".into(), ..Default::default() };
        let out = run_scattering_experiment(&cfg).unwrap();
        let m = write_run_outputs(&cfg, &out, dir.path()).unwrap();
        let names: Vec<&str> = m.outputs.iter().map(|o| o.name.as_str()).collect();
        for f in ["report.json", "summary.csv", "trace.csv", "phase3.csv", "final_state.csv", "final_state.gnls"] {
            assert!(names.contains(&f), "{f} missing");
        }
        let text = std::fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
        let back = RunManifest::from_toml_str(&text).unwrap();
        assert_eq!(back.config, cfg);
        assert_eq!(back.outputs, m.outputs);
        let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
        assert!(trace.starts_with("t,mass,energy,mass_edge1,mass_edge2,mass_edge3,far_end_mass"));
        let field = std::fs::read_to_string(dir.path().join("final_state.csv")).unwrap();
        assert_eq!(field.lines().count(), out.final_state.grid().n_points + 1);
    }

    #[test]
    fn sweep_manifest_echoes_grid() {
        let dir = tempfile::tempdir().unwrap();
        let row = |v: f64, status: &str| SweepRow {
            v,
            coupling: CouplingKind::Kirchhoff,
            strength: 1.0,
            status: status.into(),
            e1: 1.0 / v,
            e2: 1.0 / v,
            e3_sup: 1.0 / v,
            ratio_error: 1.0 / v,
            ratio_edge1: 0.33,
            max_far_end_mass: 0.0,
        };
        let table = SweepTable { rows: vec![row(8.0, "ok"), row(16.0, "ok"), row(32.0, "boom")], fits: Vec::new() };
        let base = ExperimentConfig::default();
        let m =
            write_sweep_outputs(&table, &base, &[8.0, 16.0, 32.0], &[CouplingKind::Kirchhoff], 2, dir.path()).unwrap();
        assert_eq!(m.failed_members, 1);
        let back =
            SweepManifest::from_toml_str(&std::fs::read_to_string(dir.path().join("manifest.toml")).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap().lines().count(), 4);
    }
}
