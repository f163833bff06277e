//! Numerical probe of the `t^{−1/2}` dispersive decay of `e^{−iHt}`.

use serde::{Deserialize, Serialize};

use super::propagator::LinearPropagator;
use crate::coupling::Hamiltonian;
use crate::error::{Error, Result};
use crate::field::{lp_norm, GraphField};
use crate::fit::loglog_fit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersiveProbe {
    /// `(t, ‖e^{−iHt}Ψ₀‖_∞)`.
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
}

pub fn dispersive_decay_probe(h: impl Into<Hamiltonian>, psi0: &GraphField, times: &[f64]) -> Result<DispersiveProbe> {
    if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) || times[0] <= 0.0 {
        return Err(Error::invalid("probe times must be positive, increasing, at least two"));
    }
    let prop = LinearPropagator::new(h, *psi0.grid())?;
    let samples =
        times.iter().map(|&t| Ok((t, lp_norm(&prop.apply(t, psi0), f64::INFINITY)?))).collect::<Result<Vec<_>>>()?;
    let (ts, sup): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
    let slope = loglog_fit(&ts, &sup)?.slope;
    Ok(DispersiveProbe { samples, slope })
}
