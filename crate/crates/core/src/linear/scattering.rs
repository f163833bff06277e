//! Closed-form scattering data of the three vertex couplings.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::{CouplingKind, VertexCoupling};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Reflection/transmission amplitudes of a plane wave `e^{-ikx}` incoming on one edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringCoefficients {
    pub r: Complex64,
    pub t: Complex64,
    pub k: f64,
    pub coupling: VertexCoupling,
}

impl ScatteringCoefficients {
    /// `|r|² + 2|t|² − 1`; vanishes for a unitary vertex.
    pub fn unitarity_defect(&self) -> f64 {
        self.r.norm_sqr() + 2.0 * self.t.norm_sqr() - 1.0
    }
}

pub fn scattering_coefficients(coupling: VertexCoupling, k: f64) -> Result<ScatteringCoefficients> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::invalid(format!("wavenumber must be > 0, got {k}")));
    }
    coupling.validate()?;
    let (r, t) = match coupling {
        VertexCoupling::Kirchhoff => (Complex64::from(-1.0 / 3.0), Complex64::from(2.0 / 3.0)),
        VertexCoupling::Delta(alpha) => {
            let den = 3.0 * k + I * alpha;
            (-(k + I * alpha) / den, Complex64::from(2.0 * k) / den)
        }
        VertexCoupling::DeltaPrime(beta) => {
            let den = beta * k + 3.0 * I;
            ((beta * k + I) / den, -2.0 * I / den)
        }
    };
    Ok(ScatteringCoefficients { r, t, k, coupling })
}

/// Coefficients `(r̃, t̃)` in the fast-soliton regime: `k = v/2`, `α = α̃ v`, `β = β̃ / v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledCoefficients {
    pub r: Complex64,
    pub t: Complex64,
    pub kind: CouplingKind,
    /// `α̃` or `β̃`; ignored for Kirchhoff.
    pub strength: f64,
    pub v: f64,
}

impl RescaledCoefficients {
    pub fn unitarity_defect(&self) -> f64 {
        self.r.norm_sqr() + 2.0 * self.t.norm_sqr() - 1.0
    }

    /// Coupling actually seen by a soliton of velocity `v`.
    pub fn coupling(&self) -> VertexCoupling {
        self.kind.at_velocity(self.strength, self.v)
    }
}

/// Rescaled coefficients from their own closed forms (independent of
/// [`scattering_coefficients`], which they must reproduce at `k = v/2`).
pub fn rescaled_coefficients(kind: CouplingKind, strength: f64, v: f64) -> Result<RescaledCoefficients> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::invalid(format!("velocity must be > 0, got {v}")));
    }
    let (r, t) = match kind {
        CouplingKind::Kirchhoff => (Complex64::from(-1.0 / 3.0), Complex64::from(2.0 / 3.0)),
        CouplingKind::Delta => {
            if !(strength >= 0.0 && strength.is_finite()) {
                return Err(Error::invalid(format!("rescaled delta strength must be >= 0, got {strength}")));
            }
            let den = 3.0 + 2.0 * I * strength;
            (-(1.0 + 2.0 * I * strength) / den, 2.0 / den)
        }
        CouplingKind::DeltaPrime => {
            if !(strength > 0.0 && strength.is_finite()) {
                return Err(Error::invalid(format!("rescaled delta-prime strength must be > 0, got {strength}")));
            }
            let den = strength + 6.0 * I;
            ((strength + 2.0 * I) / den, -4.0 * I / den)
        }
    };
    Ok(RescaledCoefficients { r, t, kind, strength, v })
}
