//! Nonlinear time integration of `i∂ₜΨ = HΨ − |Ψ|²Ψ`.

mod cn;
mod trace;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use cn::CrankNicolson;
pub use trace::{EvolutionTrace, TraceRow};

use crate::coupling::Hamiltonian;
use crate::error::{Error, Result};
use crate::field::GraphField;
use crate::linear::{LinearPropagator, Stepper};

/// Exact flow of `i∂ₜψ = −|ψ|²ψ`: `ψ ↦ e^{i|ψ|²dt}ψ` pointwise.
pub fn nonlinear_phase_step(field: &GraphField, dt: f64) -> GraphField {
    let mut out = field.clone();
    nonlinear_phase_in_place(&mut out, dt);
    out
}

pub(crate) fn nonlinear_phase_in_place(field: &mut GraphField, dt: f64) {
    for j in 0..3 {
        phase_rotate(field.edge_mut(j), dt);
    }
}

pub(crate) fn phase_rotate(values: &mut [Complex64], dt: f64) {
    for z in values {
        let (s, c) = (z.norm_sqr() * dt).sin_cos();
        *z *= Complex64::new(c, s);
    }
}

/// `N(dt/2) ∘ e^{−iH dt} ∘ N(dt/2)`.
pub fn strang_step(field: &GraphField, dt: f64, h: impl Into<Hamiltonian>) -> Result<GraphField> {
    let prop = LinearPropagator::new(h, *field.grid())?;
    let mut out = nonlinear_phase_step(field, 0.5 * dt);
    prop.stepper(dt).apply_in_place(&mut out);
    nonlinear_phase_in_place(&mut out, 0.5 * dt);
    Ok(out)
}

/// Strang step whose linear stage is one Crank–Nicolson step.
pub fn crank_nicolson_step(field: &GraphField, dt: f64, h: impl Into<Hamiltonian>) -> Result<GraphField> {
    let cn = CrankNicolson::new(h, *field.grid(), dt)?;
    let mut out = nonlinear_phase_step(field, 0.5 * dt);
    cn.linear_step(&mut out);
    nonlinear_phase_in_place(&mut out, 0.5 * dt);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    SplitStepExact,
    CrankNicolson,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "split_step_exact" | "split_step" | "exact" => Ok(Scheme::SplitStepExact),
            "crank_nicolson" | "cn" => Ok(Scheme::CrankNicolson),
            other => Err(Error::invalid(format!("unknown scheme `{other}`"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::SplitStepExact => "split_step_exact",
            Scheme::CrankNicolson => "crank_nicolson",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub hamiltonian: Hamiltonian,
    /// Steps between conservation/far-end checks.
    pub conservation_check_interval: usize,
    pub far_end_mass_threshold: f64,
}

impl EvolveConfig {
    pub fn new(h: impl Into<Hamiltonian>, dt: f64) -> Self {
        EvolveConfig {
            dt,
            scheme: Scheme::SplitStepExact,
            hamiltonian: h.into(),
            conservation_check_interval: 100,
            far_end_mass_threshold: 1e-10,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.hamiltonian.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.far_end_mass_threshold > 0.0 && self.far_end_mass_threshold < 1.0) {
            return Err(Error::invalid(format!(
                "far-end threshold must lie in (0, 1), got {}",
                self.far_end_mass_threshold
            )));
        }
        if self.conservation_check_interval == 0 {
            return Err(Error::invalid("conservation check interval must be >= 1"));
        }
        Ok(())
    }
}

#[allow(clippy::large_enum_variant)]
enum Linear {
    Exact(LinearPropagator, Option<Stepper>),
    Cn(Option<CrankNicolson>),
}

/// Stateful integrator: advances a field through successive target times while
/// accumulating one [`EvolutionTrace`].
pub struct Evolver {
    config: EvolveConfig,
    field: GraphField,
    t: f64,
    trace: EvolutionTrace,
    linear: Linear,
}

impl Evolver {
    pub fn new(psi0: GraphField, t0: f64, config: EvolveConfig) -> Result<Self> {
        config.validate()?;
        let linear = match config.scheme {
            Scheme::SplitStepExact => Linear::Exact(LinearPropagator::new(config.hamiltonian, *psi0.grid())?, None),
            Scheme::CrankNicolson => Linear::Cn(None),
        };
        let mut ev = Evolver { config, field: psi0, t: t0, trace: EvolutionTrace::default(), linear };
        ev.record()?;
        Ok(ev)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn field(&self) -> &GraphField {
        &self.field
    }

    pub fn trace(&self) -> &EvolutionTrace {
        &self.trace
    }

    pub fn config(&self) -> &EvolveConfig {
        &self.config
    }

    pub fn into_parts(self) -> (GraphField, EvolutionTrace) {
        (self.field, self.trace)
    }

    fn record(&mut self) -> Result<()> {
        let row = TraceRow::measure(self.t, &self.field, self.config.hamiltonian);
        self.trace.push(row);
        if !self.field.is_finite() {
            return Err(Error::NumericFailure(format!("non-finite field at t = {}", self.t)));
        }
        if row.far_end_mass > self.config.far_end_mass_threshold {
            return Err(Error::DomainTruncationViolation {
                time: self.t,
                mass: row.far_end_mass,
                threshold: self.config.far_end_mass_threshold,
            });
        }
        Ok(())
    }

    fn prepare(&mut self, dt: f64) -> Result<()> {
        let grid = *self.field.grid();
        match &mut self.linear {
            Linear::Exact(prop, stepper) => {
                if stepper.as_ref().is_none_or(|s| s.time() != dt) {
                    *stepper = Some(prop.stepper(dt));
                }
            }
            Linear::Cn(cn) => {
                if cn.as_ref().is_none_or(|c| c.dt() != dt) {
                    *cn = Some(CrankNicolson::new(self.config.hamiltonian, grid, dt)?);
                }
            }
        }
        Ok(())
    }

    fn linear_step(&mut self) {
        match &mut self.linear {
            Linear::Exact(_, Some(s)) => s.apply_in_place(&mut self.field),
            Linear::Cn(Some(cn)) => cn.linear_step(&mut self.field),
            _ => unreachable!("linear stage used before preparation"),
        }
    }

    /// Advances to `t_end` with `ceil((t_end − t)/dt)` equal steps; consecutive nonlinear
    /// half steps are merged between checks. `observer` sees the state at every check.
    pub fn advance_to(&mut self, t_end: f64, mut observer: impl FnMut(f64, &GraphField)) -> Result<()> {
        let span = t_end - self.t;
        if span < 0.0 {
            return Err(Error::invalid(format!("cannot evolve backwards from {} to {t_end}", self.t)));
        }
        if span == 0.0 {
            return Ok(());
        }
        let n_steps = (span / self.config.dt - 1e-9).ceil().max(1.0) as usize;
        let dt = span / n_steps as f64;
        self.prepare(dt)?;
        let t0 = self.t;
        let interval = self.config.conservation_check_interval;
        let mut done = 0;
        while done < n_steps {
            let chunk = interval.min(n_steps - done);
            nonlinear_phase_in_place(&mut self.field, 0.5 * dt);
            for i in 0..chunk {
                self.linear_step();
                if i + 1 < chunk {
                    nonlinear_phase_in_place(&mut self.field, dt);
                }
            }
            nonlinear_phase_in_place(&mut self.field, 0.5 * dt);
            done += chunk;
            self.t = if done == n_steps { t_end } else { t0 + done as f64 * dt };
            self.record()?;
            observer(self.t, &self.field);
        }
        Ok(())
    }
}

/// Evolves `psi0` over `t_span` and returns the final state with its trace.
pub fn evolve(
    psi0: &GraphField,
    t_span: (f64, f64),
    config: &EvolveConfig,
    observer: impl FnMut(f64, &GraphField),
) -> Result<(GraphField, EvolutionTrace)> {
    let (t0, t1) = t_span;
    if !(t0 >= 0.0 && t1 >= t0) {
        return Err(Error::invalid(format!("invalid time span ({t0}, {t1})")));
    }
    let mut ev = Evolver::new(psi0.clone(), t0, *config)?;
    ev.advance_to(t1, observer)?;
    Ok(ev.into_parts())
}
