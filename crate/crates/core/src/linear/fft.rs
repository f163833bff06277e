//! Periodic line grids backing the half-line propagators.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn registry() -> &'static RwLock<HashMap<usize, PlanPair>> {
    static PLANS: OnceLock<RwLock<HashMap<usize, PlanPair>>> = OnceLock::new();
    PLANS.get_or_init(|| RwLock::new(HashMap::new()))
}

fn plans(len: usize) -> PlanPair {
    if let Some(p) = registry().read().expect("plan registry poisoned").get(&len) {
        return p.clone();
    }
    let mut w = registry().write().expect("plan registry poisoned");
    w.entry(len)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(len), planner.plan_fft_inverse(len))
        })
        .clone()
}

/// Periodic grid of `len` points with spacing `dx`, stored in FFT order: index `i`
/// sits at `x = i·dx` for `i < len/2` and at `x = (i − len)·dx` otherwise, so the
/// reflection `x → −x` maps grid points onto grid points.
#[derive(Clone)]
pub(crate) struct LineGrid {
    pub dx: f64,
    pub len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for LineGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LineGrid").field("dx", &self.dx).field("len", &self.len).finish()
    }
}

impl LineGrid {
    /// Line grid whose half-width covers at least `half_points` samples.
    pub fn covering(dx: f64, half_points: usize) -> Self {
        let half = half_points.max(8).next_power_of_two();
        let len = 2 * half;
        let (forward, inverse) = plans(len);
        LineGrid { dx, len, forward, inverse }
    }

    pub fn half(&self) -> usize {
        self.len / 2
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        let k = if i <= self.len / 2 { i as f64 } else { i as f64 - self.len as f64 };
        2.0 * PI * k / (self.len as f64 * self.dx)
    }

    /// Free Schrödinger multiplier `e^{−ik²t}`, with the inverse-FFT normalisation folded in.
    pub fn free_multiplier(&self, t: f64) -> Vec<Complex64> {
        let norm = 1.0 / self.len as f64;
        (0..self.len)
            .map(|i| {
                let k = self.wavenumber(i);
                Complex64::from_polar(norm, -k * k * t)
            })
            .collect()
    }

    /// In-place `buf ← F⁻¹[mult · F buf]`.
    pub fn apply_multiplier(&self, buf: &mut [Complex64], mult: &[Complex64], scratch: &mut Vec<Complex64>) {
        let need = self.forward.get_inplace_scratch_len().max(self.inverse.get_inplace_scratch_len());
        if scratch.len() < need {
            scratch.resize(need, Complex64::new(0.0, 0.0));
        }
        self.forward.process_with_scratch(buf, &mut scratch[..need]);
        for (z, m) in buf.iter_mut().zip(mult) {
            *z *= m;
        }
        self.inverse.process_with_scratch(buf, &mut scratch[..need]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_maps_grid_onto_itself() {
        let g = LineGrid::covering(0.1, 100);
        for m in -(g.half() as isize - 1)..(g.half() as isize) {
            let i = m.rem_euclid(g.len as isize) as usize;
            let j = (-m).rem_euclid(g.len as isize) as usize;
            assert!((g.wavenumber(i) + g.wavenumber(j)).abs() < 1e-12 || i == g.half());
        }
    }

    #[test]
    fn zero_time_multiplier_is_identity() {
        let g = LineGrid::covering(0.2, 40);
        let mut buf: Vec<Complex64> = (0..g.len).map(|i| Complex64::new(i as f64, -(i as f64))).collect();
        let orig = buf.clone();
        let mult = g.free_multiplier(0.0);
        g.apply_multiplier(&mut buf, &mult, &mut Vec::new());
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
