//! Verification suites: each check carries its measured value and the threshold it was
//! held to, so a failing run still reports how far off it was.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::{EdgePair, Hamiltonian, VertexCoupling};
use crate::error::{Error, Result};
use crate::evolve::{evolve, nonlinear_phase_in_place, CrankNicolson, EvolveConfig};
use crate::field::{l2_distance, mass, GraphField, GridSpec};
use crate::fit::observed_orders;
use crate::linear::{
    dispersive_decay_probe, kernel_identity_check, resolvent_kernel, scattering_coefficients, LinearPropagator,
};
use crate::quadrature::gauss_legendre_composite;
use crate::reference::{sech_profile, tail_mass, SolitonParams};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Unitarity,
    Kernels,
    Propagator,
    Conservation,
    CrossScheme,
    Soliton,
    Dispersive,
    Tail,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Unitarity,
        Suite::Kernels,
        Suite::Propagator,
        Suite::Conservation,
        Suite::CrossScheme,
        Suite::Soliton,
        Suite::Dispersive,
        Suite::Tail,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Unitarity => "unitarity",
            Suite::Kernels => "kernels",
            Suite::Propagator => "propagator",
            Suite::Conservation => "conservation",
            Suite::CrossScheme => "cross_scheme",
            Suite::Soliton => "soliton",
            Suite::Dispersive => "dispersive",
            Suite::Tail => "tail",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        Suite::ALL.into_iter().find(|x| x.name() == key).ok_or_else(|| Error::invalid(format!("unknown suite `{s}`")))
    }
}

/// How a measured value is compared against its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Below,
    AtLeast,
    /// `|value − target| ≤ threshold`, target stored separately.
    Within,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
}

impl Check {
    pub fn below(suite: Suite, name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { suite, name: name.into(), passed: value < threshold, value, threshold, comparison: Comparison::Below }
    }

    pub fn at_least(suite: Suite, name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            suite,
            name: name.into(),
            passed: value >= threshold,
            value,
            threshold,
            comparison: Comparison::AtLeast,
        }
    }

    pub fn within(suite: Suite, name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Check {
            suite,
            name: name.into(),
            passed: (value - target).abs() <= tol,
            value,
            threshold: tol,
            comparison: Comparison::Within,
        }
    }

    fn failed(suite: Suite, name: impl Into<String>, err: &Error) -> Self {
        Check {
            suite,
            name: format!("{}: {err}", name.into()),
            passed: false,
            value: f64::NAN,
            threshold: f64::NAN,
            comparison: Comparison::Below,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["suite", "name", "passed", "value", "threshold", "comparison"])?;
        for c in &self.checks {
            out.write_record([
                c.suite.name().to_string(),
                c.name.clone(),
                c.passed.to_string(),
                format!("{:e}", c.value),
                format!("{:e}", c.threshold),
                format!("{:?}", c.comparison).to_lowercase(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn verify(suites: &[Suite]) -> VerifyReport {
    let mut checks = Vec::new();
    for &s in suites {
        checks.extend(run_suite(s));
    }
    VerifyReport { checks }
}

pub fn run_suite(suite: Suite) -> Vec<Check> {
    let result = match suite {
        Suite::Unitarity => unitarity_checks(),
        Suite::Kernels => kernel_checks(),
        Suite::Propagator => propagator_checks(),
        Suite::Conservation => conservation_checks(),
        Suite::CrossScheme => cross_scheme_checks(),
        Suite::Soliton => soliton_checks(),
        Suite::Dispersive => dispersive_checks(),
        Suite::Tail => tail_checks(),
    };
    result.unwrap_or_else(|e| vec![Check::failed(suite, "suite aborted", &e)])
}

/// 20 log-spaced wavenumbers in `[0.1, 100]`.
pub fn unitarity_wavenumbers() -> Vec<f64> {
    (0..20).map(|i| 10f64.powf(-1.0 + 3.0 * i as f64 / 19.0)).collect()
}

/// Kirchhoff plus δ and δ′ at strengths 0.1, 1, 10.
pub fn unitarity_couplings() -> Vec<VertexCoupling> {
    let mut cs = vec![VertexCoupling::Kirchhoff];
    for s in [0.1, 1.0, 10.0] {
        cs.push(VertexCoupling::Delta(s));
        cs.push(VertexCoupling::DeltaPrime(s));
    }
    cs
}

fn unitarity_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for c in unitarity_couplings() {
        let mut worst: f64 = 0.0;
        for k in unitarity_wavenumbers() {
            worst = worst.max(scattering_coefficients(c, k)?.unitarity_defect());
        }
        out.push(Check::below(Suite::Unitarity, format!("|r|²+2|t|²=1 {c}"), worst, 1e-12));
    }
    Ok(out)
}

fn kernel_checks() -> Result<Vec<Check>> {
    let grid = [0.5, 1.0, 2.0];
    let mut worst: f64 = 0.0;
    for &a in &grid {
        for &t in &grid {
            for &z in &grid {
                let (l, r) = kernel_identity_check(a, t, z)?;
                worst = worst.max((l - r).norm());
            }
        }
    }
    let mut sym: f64 = 0.0;
    let k = Complex64::new(0.7, 0.4);
    for c in unitarity_couplings() {
        for (x, y) in [(0.3, 1.1), (2.0, 0.5), (1.0, 1.0)] {
            let g = resolvent_kernel(c, k, x, y)?;
            let gt = resolvent_kernel(c, k, y, x)?.transpose();
            sym = sym.max(g.max_abs_diff(&gt));
        }
    }
    Ok(vec![
        Check::below(Suite::Kernels, "exponential kernel identity on {0.5,1,2}³", worst, 1e-6),
        Check::below(Suite::Kernels, "resolvent symmetry G(x,y)=G(y,x)ᵀ", sym, 1e-14),
    ])
}

/// Gaussian packet `e^{−(x−x₀)²/(4w²)} e^{ik₀x}` on one edge; `|ψ|²` has variance `w²`.
pub fn gaussian_packet(grid: GridSpec, x0: f64, k0: f64, w: f64, edge: usize) -> GraphField {
    GraphField::from_fn(grid, |j, x| {
        if j == edge {
            Complex64::from_polar((-(x - x0) * (x - x0) / (4.0 * w * w)).exp(), k0 * x)
        } else {
            ZERO
        }
    })
}

/// Semigroup, reversal and mass defects of `e^{−iHt}` over a full vertex passage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatorDefects {
    pub semigroup: f64,
    pub reversal: f64,
    pub mass: f64,
}

/// Packet at 16 moving toward the vertex with speed 4, observed at `t = 5` as it leaves the
/// vertex. The datum is below 1e−13 at both ends of the edge: a visible value at the vertex
/// is a jump in the odd image, and anything reaching the far end is cut off.
pub fn propagator_defects(coupling: VertexCoupling, dx: f64, length: f64) -> Result<PropagatorDefects> {
    let grid = GridSpec::with_length(dx, length)?;
    let f = gaussian_packet(grid, 16.0, -2.0, 2f64.sqrt(), 0);
    let p = LinearPropagator::new(coupling, grid)?;
    let full = p.apply(5.0, &f);
    let halves = p.apply(2.5, &p.apply(2.5, &f));
    let back = p.apply(-5.0, &full);
    let m0 = mass(&f);
    Ok(PropagatorDefects {
        semigroup: l2_distance(&full, &halves),
        reversal: l2_distance(&back, &f),
        mass: ((mass(&full) - m0) / m0).abs(),
    })
}

fn propagator_checks() -> Result<Vec<Check>> {
    let s = Suite::Propagator;
    let mut out = Vec::new();
    for c in [VertexCoupling::Kirchhoff, VertexCoupling::Delta(1.0), VertexCoupling::DeltaPrime(1.0)] {
        let d = propagator_defects(c, 0.02, 40.0)?;
        out.push(Check::below(s, format!("semigroup {c}"), d.semigroup, 1e-8));
        out.push(Check::below(s, format!("time reversal {c}"), d.reversal, 1e-8));
        out.push(Check::below(s, format!("mass {c}"), d.mass, 1e-8));
    }
    let grid = GridSpec::with_length(0.02, 40.0)?;
    let f = gaussian_packet(grid, 16.0, -2.0, 2f64.sqrt(), 0);
    let a = LinearPropagator::new(VertexCoupling::Kirchhoff, grid)?.apply(5.0, &f);
    let b = LinearPropagator::new(VertexCoupling::Delta(0.0), grid)?.apply(5.0, &f);
    out.push(Check::below(s, "delta(0) = kirchhoff", l2_distance(&a, &b), 1e-14));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationRun {
    pub dt: f64,
    pub steps: usize,
    pub mass_drift: f64,
    pub energy_drift: f64,
}

/// Split-step run of a unit soliton leaving the vertex along edge 1 of a Kirchhoff star,
/// `dx = 0.05`, edge length 60; the body stays clear of both the vertex and the far end.
pub fn conservation_run(dt: f64, steps: usize) -> Result<ConservationRun> {
    let grid = GridSpec::with_length(0.05, 60.0)?;
    let sol = SolitonParams::new(20.0, 1.0);
    let f = GraphField::from_fn(grid, |j, x| if j == 0 { sol.value(x, 0.0) } else { ZERO });
    let cfg = EvolveConfig::new(VertexCoupling::Kirchhoff, dt);
    let (_, trace) = evolve(&f, (0.0, steps as f64 * dt), &cfg, |_, _| {})?;
    Ok(ConservationRun {
        dt,
        steps,
        mass_drift: trace.max_abs_mass_drift(),
        energy_drift: trace.max_abs_energy_drift(),
    })
}

fn conservation_checks() -> Result<Vec<Check>> {
    let s = Suite::Conservation;
    let coarse = conservation_run(0.004, 5_000)?;
    let fine = conservation_run(0.002, 10_000)?;
    let order = (coarse.energy_drift / fine.energy_drift).log2();
    Ok(vec![
        Check::below(s, "mass drift over 1e4 steps", fine.mass_drift, 1e-8),
        Check::below(s, "energy drift over 1e4 steps", fine.energy_drift, 1e-6),
        Check::at_least(s, "energy drift order in dt", order, 1.8),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSchemeStudy {
    pub hamiltonian: Hamiltonian,
    /// `(dx, dt, ‖CN − exact‖)` under joint halving.
    pub levels: Vec<(f64, f64, f64)>,
    pub orders: Vec<f64>,
    /// Largest relative change of the scheme's own norm over one step.
    pub max_step_mass_drift: f64,
}

/// Crank–Nicolson against the exact propagator on a packet crossing the vertex, `t = 2`.
pub fn cross_scheme_study(h: impl Into<Hamiltonian>, levels: usize) -> Result<CrossSchemeStudy> {
    let h = h.into();
    let mut out = Vec::with_capacity(levels);
    let mut max_drift: f64 = 0.0;
    for l in 0..levels {
        let scale = 0.5f64.powi(l as i32);
        let (dx, dt) = (0.04 * scale, 0.02 * scale);
        let grid = GridSpec::with_length(dx, 30.0)?;
        let f0 = gaussian_packet(grid, 10.0, -3.0, 0.9, 0);
        let exact = LinearPropagator::new(h, grid)?.apply(2.0, &f0);
        let cn = CrankNicolson::new(h, grid, dt)?;
        let mut f = f0.clone();
        for _ in 0..(2.0 / dt).round() as usize {
            let before = cn.discrete_mass(&f);
            cn.linear_step(&mut f);
            max_drift = max_drift.max(((cn.discrete_mass(&f) - before) / before).abs());
        }
        out.push((dx, dt, l2_distance(&f, &exact)));
    }
    let errs: Vec<f64> = out.iter().map(|l| l.2).collect();
    Ok(CrossSchemeStudy { hamiltonian: h, orders: observed_orders(&errs), levels: out, max_step_mass_drift: max_drift })
}

fn cross_scheme_checks() -> Result<Vec<Check>> {
    let s = Suite::CrossScheme;
    let mut out = Vec::new();
    for c in [VertexCoupling::Kirchhoff, VertexCoupling::Delta(1.0), VertexCoupling::DeltaPrime(1.0)] {
        let st = cross_scheme_study(c, 4)?;
        let worst = st.orders.iter().copied().fold(f64::INFINITY, f64::min);
        out.push(Check::at_least(s, format!("CN order vs exact {c}"), worst, 1.8));
        out.push(Check::below(s, format!("CN mass drift per step {c}"), st.max_step_mass_drift, 1e-10));
    }
    Ok(out)
}

/// Two-edge line with a soliton of velocity 4 starting at −10: it crosses the joined vertex
/// at `t = 2.5` and ends at +10.
fn line_soliton(grid: GridSpec, t: f64) -> GraphField {
    let pair = EdgePair::new(1).expect("valid pair");
    let sol = SolitonParams::new(-10.0, 4.0);
    GraphField::from_fn(grid, |j, x| {
        if j == pair.positive() {
            sol.value(x, t)
        } else if j == pair.negative() {
            sol.value(-x, t)
        } else {
            ZERO
        }
    })
}

/// L² error at `t_end` of the line soliton evolved by Strang splitting. `propagator_sign`
/// −1 runs the linear stage backwards in time, a deliberately broken integrator.
pub fn soliton_fidelity(dx: f64, dt: f64, t_end: f64, propagator_sign: f64) -> Result<f64> {
    let grid = GridSpec::with_length(dx, 40.0)?;
    let h = Hamiltonian::line();
    let psi0 = line_soliton(grid, 0.0);
    let exact = line_soliton(grid, t_end);
    let steps = (t_end / dt).round() as usize;
    let end = if propagator_sign > 0.0 {
        let mut cfg = EvolveConfig::new(h, dt);
        cfg.far_end_mass_threshold = 1e-6;
        evolve(&psi0, (0.0, steps as f64 * dt), &cfg, |_, _| {})?.0
    } else {
        let prop = LinearPropagator::new(h, grid)?;
        let mut st = prop.stepper(propagator_sign * dt);
        let mut f = psi0;
        for _ in 0..steps {
            nonlinear_phase_in_place(&mut f, 0.5 * dt);
            st.apply_in_place(&mut f);
            nonlinear_phase_in_place(&mut f, 0.5 * dt);
        }
        f
    };
    Ok(l2_distance(&end, &exact))
}

/// Reference resolution and two joint halvings of `(dx, dt)`.
pub const SOLITON_LEVELS: [(f64, f64); 3] = [(0.05, 0.002), (0.025, 0.001), (0.0125, 0.0005)];

fn soliton_checks() -> Result<Vec<Check>> {
    let s = Suite::Soliton;
    let errs = SOLITON_LEVELS.iter().map(|&(dx, dt)| soliton_fidelity(dx, dt, 5.0, 1.0)).collect::<Result<Vec<_>>>()?;
    let ratio = errs.windows(2).map(|w| w[1] / w[0]).fold(0.0_f64, f64::max);
    Ok(vec![
        Check::below(s, "line soliton error at reference resolution", errs[0], 1e-3),
        Check::below(s, "largest error ratio under refinement", ratio, 1.0),
    ])
}

/// Smooth bump `exp(−1/(1 − y²))`, `y = 2(x − 1.5)`, supported on `[1, 2]` of edge 1.
pub fn compact_bump(grid: GridSpec) -> GraphField {
    GraphField::from_fn(grid, |j, x| {
        let y = 2.0 * (x - 1.5);
        if j == 0 && y.abs() < 1.0 {
            Complex64::from((-1.0 / (1.0 - y * y)).exp())
        } else {
            ZERO
        }
    })
}

/// 12 log-spaced times in `[1, 100]`.
pub fn dispersive_times() -> Vec<f64> {
    (0..12).map(|i| 10f64.powf(2.0 * i as f64 / 11.0)).collect()
}

fn dispersive_checks() -> Result<Vec<Check>> {
    let grid = GridSpec::with_length(0.1, 1000.0)?;
    let bump = compact_bump(grid);
    let mut out = Vec::new();
    for c in [VertexCoupling::Kirchhoff, VertexCoupling::Delta(1.0), VertexCoupling::DeltaPrime(1.0)] {
        let probe = dispersive_decay_probe(c, &bump, &dispersive_times())?;
        out.push(Check::within(Suite::Dispersive, format!("sup-norm decay exponent {c}"), probe.slope, -0.5, 0.1));
    }
    Ok(out)
}

/// Mass of `φ(x + v^{1−δ})` on a half line by composite Gauss–Legendre.
pub fn tail_mass_quadrature(v: f64, delta: f64) -> f64 {
    let u = v.powf(1.0 - delta);
    gauss_legendre_composite(|x| sech_profile(x + u).powi(2), 0.0, 60.0, 240)
}

fn tail_checks() -> Result<Vec<Check>> {
    Ok([8.0, 16.0]
        .iter()
        .map(|&v| {
            let q = tail_mass_quadrature(v, 0.4);
            let rel = (q - tail_mass(v, 0.4)).abs() / q;
            Check::below(Suite::Tail, format!("tail mass closed form v={v}"), rel, 1e-10)
        })
        .collect())
}
