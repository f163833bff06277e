use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Resolution};
use crate::coupling::VertexCoupling;
use crate::error::Result;
use crate::evolve::{EvolutionTrace, EvolveConfig, Evolver};
use crate::field::{l2_distance, mass, GraphField};
use crate::reference::{
    advance_reference, initial_datum, outgoing_profiles_at_t2, phase2_superposition, truth_soliton, PhaseSchedule,
};

/// Relative positions of the phase-2 probes inside `(t₁, t₂)`.
const PHASE2_PROBES: [f64; 3] = [0.25, 0.5, 0.75];

/// Smallest phase-3 offset as a fraction of `t₃ − t₂`.
const PHASE3_FIRST: f64 = 1.0 / 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimedError {
    pub t: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase3Sample {
    pub t: f64,
    /// `‖Ψ_t − Φ¹_t − Φ²_t − Φ³_t‖`.
    pub e3: f64,
    pub edge_mass: [f64; 3],
    /// `‖Ψ^j_t‖ / ‖Ψ_t‖`.
    pub ratios: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub label: String,
    pub coupling: VertexCoupling,
    pub r_tilde: Complex64,
    pub t_tilde: Complex64,
    pub resolution: Resolution,
    pub schedule: PhaseSchedule,
    /// `‖Ψ_{t₁} − Φ_{t₁}‖` against the free soliton crossing the vertex.
    pub e1: f64,
    /// `‖Ψ_t − Φ^S_t‖` at interior phase-2 times.
    pub phase2: Vec<TimedError>,
    /// `‖Ψ_{t₂} − Φ^{S,out}_{t₂}‖`.
    pub e2: f64,
    pub phase3: Vec<Phase3Sample>,
    /// Supremum of `e3` over samples in `(t₂, t₃]`.
    pub e3_sup: f64,
    pub ratio_time: f64,
    pub ratios: [f64; 3],
    pub expected_ratios: [f64; 3],
    pub ratio_errors: [f64; 3],
    pub max_mass_drift: f64,
    pub max_energy_drift: f64,
    pub max_far_end_mass: f64,
}

impl ExperimentReport {
    pub fn max_ratio_error(&self) -> f64 {
        self.ratio_errors.iter().fold(0.0, |a, e| a.max(*e))
    }
}

/// Result of a run: the report plus the raw trace and final state.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    pub trace: EvolutionTrace,
    pub final_state: GraphField,
}

/// `perm[j]` is the canonical edge shown on actual edge `j`.
fn edge_permutation(incoming_edge: usize) -> [usize; 3] {
    let k = incoming_edge - 1;
    std::array::from_fn(|j| (j + 3 - k) % 3)
}

fn ratios_of(field: &GraphField) -> ([f64; 3], [f64; 3]) {
    let m = field.mass_per_edge();
    let total: f64 = m.iter().sum();
    (m, m.map(|mj| if total > 0.0 { (mj / total).sqrt() } else { 0.0 }))
}

/// Phase-3 sample times: log-spaced offsets in `(t₂, t₃]`, plus the ratio time.
fn phase3_times(s: &PhaseSchedule, samples: usize, ratio_time: f64) -> Vec<f64> {
    let w = s.t3 - s.t2;
    let mut times: Vec<f64> = (0..samples)
        .map(|k| {
            let frac = if samples == 1 { 1.0 } else { k as f64 / (samples - 1) as f64 };
            s.t2 + w * PHASE3_FIRST.powf(1.0 - frac)
        })
        .collect();
    times.push(ratio_time);
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    times
}

pub fn run_scattering_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let res = config.resolve()?;
    let coupling = config.vertex_coupling();
    let coeffs = config.coefficients()?;
    let s = res.schedule;
    let grid = res.grid;
    let perm = edge_permutation(config.incoming_edge);
    let actual = |f: GraphField| f.permuted(perm);

    let psi0 = actual(initial_datum(res.x0, config.v, config.delta, grid)?);
    let mut evolve_cfg = EvolveConfig::new(coupling, res.dt).with_scheme(config.scheme);
    evolve_cfg.conservation_check_interval = config.check_interval;
    evolve_cfg.far_end_mass_threshold = config.far_end_mass_threshold;
    let mut ev = Evolver::new(psi0, 0.0, evolve_cfg)?;

    ev.advance_to(s.t1, |_, _| {})?;
    let e1 = l2_distance(ev.field(), &actual(truth_soliton(res.x0, config.v, s.t1, grid)));

    let mut phase2 = Vec::with_capacity(PHASE2_PROBES.len());
    for frac in PHASE2_PROBES {
        let t = s.t1 + frac * (s.t2 - s.t1);
        ev.advance_to(t, |_, _| {})?;
        let reference = actual(phase2_superposition(res.x0, config.v, &coeffs, t, grid).total());
        phase2.push(TimedError { t, error: l2_distance(ev.field(), &reference) });
    }
    ev.advance_to(s.t2, |_, _| {})?;
    let outgoing = actual(phase2_superposition(res.x0, config.v, &coeffs, s.t2, grid).outgoing);
    let e2 = l2_distance(ev.field(), &outgoing);

    let mut bundle =
        outgoing_profiles_at_t2(&coeffs, &s, grid, res.edge_length)?.with_step(res.dt, config.far_end_mass_threshold);
    let ratio_time = s.t2 + config.ratio_offset;
    let mut phase3 = Vec::new();
    let mut ratios = [0.0; 3];
    for t in phase3_times(&s, config.phase3_samples, ratio_time) {
        ev.advance_to(t, |_, _| {})?;
        bundle = advance_reference(&bundle, t)?;
        let e3 = l2_distance(ev.field(), &actual(bundle.sum()));
        let (edge_mass, r) = ratios_of(ev.field());
        if (t - ratio_time).abs() < 1e-12 {
            ratios = r;
        }
        phase3.push(Phase3Sample { t, e3, edge_mass, ratios: r });
    }
    ev.advance_to(res.t_end, |_, _| {})?;

    let e3_sup = phase3.iter().filter(|p| p.t > s.t2 && p.t <= s.t3 + 1e-12).fold(0.0_f64, |a, p| a.max(p.e3));
    let canonical_expected = [coeffs.r.norm(), coeffs.t.norm(), coeffs.t.norm()];
    let expected_ratios: [f64; 3] = std::array::from_fn(|j| canonical_expected[perm[j]]);
    let ratio_errors = std::array::from_fn(|j| (ratios[j] - expected_ratios[j]).abs());
    let trace = ev.trace().clone();
    let final_state = ev.field().clone();
    debug_assert!((final_state.mass_per_edge().iter().sum::<f64>() - mass(&final_state)).abs() == 0.0);

    let report = ExperimentReport {
        label: config.label.clone(),
        coupling,
        r_tilde: coeffs.r,
        t_tilde: coeffs.t,
        resolution: res,
        schedule: s,
        e1,
        phase2,
        e2,
        phase3,
        e3_sup,
        ratio_time,
        ratios,
        expected_ratios,
        ratio_errors,
        max_mass_drift: trace.max_abs_mass_drift(),
        max_energy_drift: trace.max_abs_energy_drift(),
        max_far_end_mass: trace.max_far_end_mass(),
    };
    Ok(ExperimentOutcome { report, trace, final_state })
}
