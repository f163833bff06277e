//! Experiment orchestration, persistence and verification suites.

mod checkpoint;
mod config;
mod experiment;
mod manifest;
mod plotdata;
mod sweep;
mod tables;
mod verify;

pub use checkpoint::{
    checkpoint_load, checkpoint_save, decode_checkpoint, encode_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use config::{ExperimentConfig, Resolution};
pub use experiment::{run_scattering_experiment, ExperimentOutcome, ExperimentReport, Phase3Sample, TimedError};
pub use manifest::{
    write_field_csv, write_phase3_csv, write_run_outputs, write_summary_csv, write_sweep_outputs, Certificates,
    OutputFile, RunManifest, SweepManifest, TOOL_NAME, TOOL_VERSION,
};
pub use plotdata::{write_error_vs_t, write_error_vs_v, write_ratio_vs_t};
pub use sweep::{run_sweep, SweepFit, SweepRow, SweepTable, E2_SLOPE_TOLERANCE};
pub use tables::{log_grid, write_rescaled_table, write_resolvent_table, write_scattering_table};
pub use verify::{
    compact_bump, conservation_run, cross_scheme_study, dispersive_times, gaussian_packet, propagator_defects,
    run_suite, soliton_fidelity, tail_mass_quadrature, unitarity_couplings, unitarity_wavenumbers, verify, Check,
    Comparison, ConservationRun, CrossSchemeStudy, PropagatorDefects, Suite, VerifyReport, SOLITON_LEVELS,
};
