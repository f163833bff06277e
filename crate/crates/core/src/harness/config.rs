use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coupling::{CouplingKind, VertexCoupling};
use crate::error::{Error, Result};
use crate::evolve::Scheme;
use crate::field::GridSpec;
use crate::linear::{rescaled_coefficients, RescaledCoefficients};
use crate::reference::{phase_schedule, PhaseSchedule};

/// Distance kept between every soliton body and the far ends of the edges.
const EDGE_MARGIN: f64 = 90.0;

/// One fast-soliton scattering run. Unset optional fields take the resolution defaults
/// `dx = min(0.05, π/(4v))`, `dt = dx/max(4, v)`, `x₀ = v^{1−δ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub label: String,
    pub coupling: CouplingKind,
    /// `α̃` for δ, `β̃` for δ′; ignored for Kirchhoff.
    pub strength: f64,
    pub v: f64,
    pub delta: f64,
    /// `T` in `t₃ = t₂ + T ln v`.
    pub t_log: f64,
    pub x0: Option<f64>,
    pub dx: Option<f64>,
    pub dt: Option<f64>,
    pub edge_length: Option<f64>,
    pub scheme: Scheme,
    /// Edge (1-based) carrying the incoming soliton.
    pub incoming_edge: usize,
    pub phase3_samples: usize,
    /// Mass ratios are measured at `t₂ + ratio_offset`.
    pub ratio_offset: f64,
    pub far_end_mass_threshold: f64,
    pub check_interval: usize,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            label: "run".into(),
            coupling: CouplingKind::Kirchhoff,
            strength: 1.0,
            v: 16.0,
            delta: 0.4,
            t_log: 0.5,
            x0: None,
            dx: None,
            dt: None,
            edge_length: None,
            scheme: Scheme::SplitStepExact,
            incoming_edge: 1,
            phase3_samples: 8,
            ratio_offset: 1.0,
            far_end_mass_threshold: 1e-4,
            check_interval: 100,
            output_dir: PathBuf::from("runs"),
        }
    }
}

/// Numerical parameters derived from an [`ExperimentConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub x0: f64,
    pub dx: f64,
    pub dt: f64,
    pub edge_length: f64,
    pub grid: GridSpec,
    pub schedule: PhaseSchedule,
    /// Final time of the run: `max(t₃, t₂ + ratio_offset)`.
    pub t_end: f64,
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn vertex_coupling(&self) -> VertexCoupling {
        self.coupling.at_velocity(self.strength, self.v)
    }

    pub fn coefficients(&self) -> Result<RescaledCoefficients> {
        rescaled_coefficients(self.coupling, self.strength, self.v)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be > 0, got {x}")))
            }
        };
        if !(self.v > 1.0) {
            return Err(Error::invalid(format!("velocity must be > 1, got {}", self.v)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        positive("t_log", self.t_log)?;
        positive("ratio_offset", self.ratio_offset)?;
        for (name, value) in [("dx", self.dx), ("dt", self.dt), ("edge_length", self.edge_length)] {
            if let Some(x) = value {
                positive(name, x)?;
            }
        }
        if self.coupling != CouplingKind::Kirchhoff {
            positive("strength", self.strength)?;
        }
        if let Some(x0) = self.x0 {
            let min = self.v.powf(1.0 - self.delta);
            if !(x0 >= min) {
                return Err(Error::invalid(format!("x0 = {x0} below v^(1-delta) = {min}")));
            }
        }
        if !(1..=3).contains(&self.incoming_edge) {
            return Err(Error::invalid(format!("incoming edge must be 1, 2 or 3, got {}", self.incoming_edge)));
        }
        if self.phase3_samples == 0 {
            return Err(Error::invalid("need at least one phase-3 sample"));
        }
        if self.check_interval == 0 {
            return Err(Error::invalid("check interval must be >= 1"));
        }
        if !(self.far_end_mass_threshold > 0.0 && self.far_end_mass_threshold < 1.0) {
            return Err(Error::invalid("far-end threshold must lie in (0, 1)"));
        }
        self.vertex_coupling().validate()
    }

    pub fn resolve(&self) -> Result<Resolution> {
        self.validate()?;
        let v = self.v;
        let x0 = self.x0.unwrap_or_else(|| v.powf(1.0 - self.delta));
        let dx = self.dx.unwrap_or_else(|| 0.05f64.min(std::f64::consts::PI / (4.0 * v)));
        let dt = self.dt.unwrap_or(dx / v.max(4.0));
        let schedule = phase_schedule(x0, v, self.delta, self.t_log)?;
        let t_end = schedule.t3.max(schedule.t2 + self.ratio_offset);
        let travel = v * (t_end - schedule.t2) + v.powf(1.0 - self.delta);
        let edge_length = self.edge_length.unwrap_or_else(|| (x0.max(travel) + EDGE_MARGIN).ceil());
        let grid = GridSpec::with_length(dx, edge_length)?;
        Ok(Resolution { x0, dx, dt, edge_length, grid, schedule, t_end })
    }
}
