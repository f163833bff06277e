use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coupling::Hamiltonian;
use crate::error::Result;
use crate::field::{energy, GraphField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub mass_edge1: f64,
    pub mass_edge2: f64,
    pub mass_edge3: f64,
    pub far_end_mass: f64,
}

impl TraceRow {
    pub fn measure(t: f64, field: &GraphField, h: Hamiltonian) -> Self {
        let m = field.mass_per_edge();
        TraceRow {
            t,
            mass: m.iter().sum(),
            energy: energy(field, h),
            mass_edge1: m[0],
            mass_edge2: m[1],
            mass_edge3: m[2],
            far_end_mass: field.far_end_mass(),
        }
    }
}

/// Conservation diagnostics sampled during an evolution.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub rows: Vec<TraceRow>,
}

impl EvolutionTrace {
    pub fn push(&mut self, row: TraceRow) {
        self.rows.push(row);
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    /// `(m(t) − m(t₀)) / m(t₀)`; starts at 0.
    pub fn mass_drift(&self) -> Vec<f64> {
        relative_drift(self.rows.iter().map(|r| r.mass))
    }

    /// `(E(t) − E(t₀)) / |E(t₀)|`; starts at 0.
    pub fn energy_drift(&self) -> Vec<f64> {
        relative_drift(self.rows.iter().map(|r| r.energy))
    }

    pub fn max_abs_mass_drift(&self) -> f64 {
        self.mass_drift().iter().fold(0.0, |a, d| a.max(d.abs()))
    }

    pub fn max_abs_energy_drift(&self) -> f64 {
        self.energy_drift().iter().fold(0.0, |a, d| a.max(d.abs()))
    }

    pub fn max_far_end_mass(&self) -> f64 {
        self.rows.iter().fold(0.0, |a, r| a.max(r.far_end_mass))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

fn relative_drift(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let v: Vec<f64> = values.collect();
    let Some(&first) = v.first() else { return Vec::new() };
    let scale = if first == 0.0 { 1.0 } else { first.abs() };
    v.iter().map(|x| (x - first) / scale).collect()
}
