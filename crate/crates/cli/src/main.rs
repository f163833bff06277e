use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use stargraph::evolve::Scheme;
use stargraph::harness::{
    log_grid, run_scattering_experiment, run_sweep, verify, write_error_vs_t, write_error_vs_v, write_ratio_vs_t,
    write_rescaled_table, write_resolvent_table, write_run_outputs, write_scattering_table, write_sweep_outputs,
    ExperimentConfig, ExperimentReport, Suite, SweepTable,
};
use stargraph::{Complex64, CouplingKind};

/// Exit status when verification ran but at least one check failed.
const EXIT_CHECKS_FAILED: u8 = 6;

#[derive(Parser)]
#[command(name = "stargraph", version, about = "Fast solitons on a three-edge star graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scattering experiment and write its outputs.
    Simulate(SimulateArgs),
    /// Run experiments over a velocity grid and fit error slopes.
    Sweep(SweepArgs),
    /// Run verification suites and report every check.
    Verify(VerifyArgs),
    /// Tabulate scattering coefficients and resolvent samples.
    Kernels(KernelArgs),
    /// Emit plot-ready columns from sweep or run outputs.
    Plotdata(PlotArgs),
}

/// Flags overriding keys of the TOML config.
#[derive(Args, Default)]
struct ConfigArgs {
    /// TOML file with `ExperimentConfig` keys; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    coupling: Option<CouplingKind>,
    /// Rescaled strength α̃ (delta) or β̃ (delta_prime).
    #[arg(long)]
    strength: Option<f64>,
    #[arg(long)]
    v: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Log-time multiplier T.
    #[arg(long)]
    t_log: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    dx: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    edge_length: Option<f64>,
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    incoming_edge: Option<usize>,
    #[arg(long)]
    phase3_samples: Option<usize>,
    #[arg(long)]
    ratio_offset: Option<f64>,
    #[arg(long)]
    far_end_mass_threshold: Option<f64>,
    #[arg(long)]
    check_interval: Option<usize>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(x) = &self.$f { c.$f = x.clone(); } )* };
        }
        set!(label, coupling, strength, v, delta, t_log, scheme, incoming_edge, phase3_samples, ratio_offset);
        set!(far_end_mass_threshold, check_interval, output_dir);
        macro_rules! set_opt {
            ($($f:ident),*) => { $( if let Some(x) = self.$f { c.$f = Some(x); } )* };
        }
        set_opt!(x0, dx, dt, edge_length);
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Strictly increasing velocities, at least three.
    #[arg(long, value_delimiter = ',', default_values_t = [8.0, 16.0, 32.0])]
    v_list: Vec<f64>,
    /// Couplings to sweep; an empty string sweeps none.
    #[arg(long, value_delimiter = ',', default_value = "kirchhoff,delta,delta_prime")]
    couplings: Vec<String>,
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run; all of them when omitted.
    #[arg(long = "suite", value_delimiter = ',')]
    suites: Vec<Suite>,
    /// Also write the checks as CSV.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Print the report as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, default_value_t = CouplingKind::Delta)]
    coupling: CouplingKind,
    /// Unscaled α or β for the k-table and resolvent; rescaled α̃ or β̃ for the v-table.
    #[arg(long, default_value_t = 1.0)]
    strength: f64,
    #[arg(long, default_value_t = 0.1)]
    k_min: f64,
    #[arg(long, default_value_t = 100.0)]
    k_max: f64,
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [8.0, 16.0, 32.0])]
    v_list: Vec<f64>,
    /// Spectral parameter of the resolvent samples, `Im k > 0`.
    #[arg(long, default_value_t = 1.0)]
    k_re: f64,
    #[arg(long, default_value_t = 0.5)]
    k_im: f64,
    /// Edge positions sampled in both resolvent arguments.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 2.0])]
    positions: Vec<f64>,
    #[arg(long, default_value = "kernels")]
    output_dir: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// `sweep.csv` written by `sweep`.
    #[arg(long)]
    sweep: Option<PathBuf>,
    /// Run directory written by `simulate` (reads its `report.json`).
    #[arg(long)]
    run: Option<PathBuf>,
    /// Exponent δ used when refitting sweep slopes.
    #[arg(long, default_value_t = 0.4)]
    delta: f64,
    #[arg(long, default_value = "plotdata")]
    output_dir: PathBuf,
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let dir = cfg.output_dir.join(&cfg.label);
    let res = cfg.resolve()?;
    eprintln!(
        "simulate {} v={} dx={:.5} dt={:.6} L={} t_end={:.4}",
        cfg.vertex_coupling(),
        cfg.v,
        res.dx,
        res.dt,
        res.edge_length,
        res.t_end
    );
    let outcome = run_scattering_experiment(&cfg)?;
    let manifest = write_run_outputs(&cfg, &outcome, &dir)?;
    let r = &outcome.report;
    println!("e1 = {:.4e}  e2 = {:.4e}  e3_sup = {:.4e}", r.e1, r.e2, r.e3_sup);
    println!(
        "ratios at t = {:.4}: {:.5} {:.5} {:.5}  (limits {:.5} {:.5} {:.5})",
        r.ratio_time,
        r.ratios[0],
        r.ratios[1],
        r.ratios[2],
        r.expected_ratios[0],
        r.expected_ratios[1],
        r.expected_ratios[2]
    );
    println!(
        "mass drift {:.2e}  energy drift {:.2e}  far-end mass {:.2e}",
        r.max_mass_drift, r.max_energy_drift, r.max_far_end_mass
    );
    println!("wrote {} files to {}", manifest.outputs.len() + 1, dir.display());
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let base = args.config.resolve()?;
    let couplings = args
        .couplings
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<stargraph::Result<Vec<CouplingKind>>>()?;
    let table = run_sweep(&base, &args.v_list, &couplings, args.workers)?;
    let dir = base.output_dir.join(&base.label);
    let manifest = write_sweep_outputs(&table, &base, &args.v_list, &couplings, args.workers, &dir)?;
    for r in &table.rows {
        println!(
            "{:<12} v={:<6} e1={:.3e} e2={:.3e} e3={:.3e} ratio_err={:.3e} {}",
            r.coupling.to_string(),
            r.v,
            r.e1,
            r.e2,
            r.e3_sup,
            r.ratio_error,
            r.status
        );
    }
    for f in &table.fits {
        println!(
            "{:<12} slopes e1={:.3} e2={:.3} e3={:.3}  e2 consistent: {}  e3 negative: {}",
            f.coupling.to_string(),
            f.e1_slope,
            f.e2_slope,
            f.e3_slope,
            f.e2_consistent,
            f.e3_negative
        );
    }
    println!("wrote sweep to {} ({} failed members)", dir.display(), manifest.failed_members);
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> Result<bool> {
    let suites = if args.suites.is_empty() { Suite::ALL.to_vec() } else { args.suites.clone() };
    let report = verify(&suites);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for c in &report.checks {
            println!(
                "{} {:<13} {:<48} {:.3e} ({:?} {:.1e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite.name(),
                c.name,
                c.value,
                c.comparison,
                c.threshold
            );
        }
    }
    if let Some(p) = &args.output {
        report.write_csv(File::create(p).with_context(|| format!("creating {}", p.display()))?)?;
    }
    Ok(report.all_passed())
}

fn kernels(args: &KernelArgs) -> Result<()> {
    let dir = &args.output_dir;
    std::fs::create_dir_all(dir)?;
    let direct = args.coupling.at_velocity(args.strength, 1.0);
    write_scattering_table(
        direct,
        &log_grid(args.k_min, args.k_max, args.points),
        create(&dir.join("scattering.csv"))?,
    )?;
    write_rescaled_table(args.coupling, args.strength, &args.v_list, create(&dir.join("rescaled.csv"))?)?;
    write_resolvent_table(
        direct,
        Complex64::new(args.k_re, args.k_im),
        &args.positions,
        create(&dir.join("resolvent.csv"))?,
    )?;
    println!("wrote scattering.csv, rescaled.csv, resolvent.csv to {}", dir.display());
    Ok(())
}

fn plotdata(args: &PlotArgs) -> Result<()> {
    if args.sweep.is_none() && args.run.is_none() {
        bail!("plotdata needs --sweep and/or --run");
    }
    let dir = &args.output_dir;
    std::fs::create_dir_all(dir)?;
    if let Some(p) = &args.sweep {
        let table = SweepTable::read_csv(open(p)?, args.delta)?;
        write_error_vs_v(&table, create(&dir.join("error_vs_v.csv"))?)?;
        table.write_fits_csv(create(&dir.join("fits.csv"))?)?;
    }
    if let Some(run) = &args.run {
        let p = run.join("report.json");
        let report: ExperimentReport =
            serde_json::from_reader(open(&p)?).with_context(|| format!("parsing {}", p.display()))?;
        write_ratio_vs_t(&report, create(&dir.join("ratio_vs_t.csv"))?)?;
        write_error_vs_t(&report, create(&dir.join("error_vs_t.csv"))?)?;
    }
    println!("wrote plot data to {}", dir.display());
    Ok(())
}

fn open(p: &Path) -> Result<File> {
    File::open(p).with_context(|| format!("opening {}", p.display()))
}

fn create(p: &Path) -> Result<File> {
    File::create(p).with_context(|| format!("creating {}", p.display()))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain().find_map(|e| e.downcast_ref::<stargraph::Error>()).map_or(1, |e| u8::try_from(e.code()).unwrap_or(1))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a).map(|_| true),
        Command::Sweep(a) => sweep(a).map(|_| true),
        Command::Verify(a) => run_verify(a),
        Command::Kernels(a) => kernels(a).map(|_| true),
        Command::Plotdata(a) => plotdata(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECKS_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
