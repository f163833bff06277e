//! Resolvent kernels of the star-graph Hamiltonians and the exponential-kernel identity
//! that turns them into propagators.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::VertexCoupling;
use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// 3×3 matrix value of an integral kernel at a point `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelMatrix(pub [[Complex64; 3]; 3]);

impl KernelMatrix {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn transpose(&self) -> Self {
        KernelMatrix(std::array::from_fn(|i| std::array::from_fn(|j| self.0[j][i])))
    }

    pub fn max_abs_diff(&self, other: &KernelMatrix) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Kernel of `(H − k²)⁻¹` at `(x, y)`, `Im k > 0`.
///
/// All three couplings share the structure `(i/2k)[e^{ik|x−y|} 𝕀 + e^{ik(x+y)} C(k)]`
/// with a constant matrix `C(k) = c_d 𝕀 + c_o (𝕁 − 𝕀)`.
pub fn resolvent_kernel(coupling: VertexCoupling, k: Complex64, x: f64, y: f64) -> Result<KernelMatrix> {
    if !(k.im > 0.0) {
        return Err(Error::invalid(format!("resolvent needs Im k > 0, got k = {k}")));
    }
    if !(x >= 0.0 && y >= 0.0) {
        return Err(Error::invalid(format!("kernel arguments must be >= 0, got ({x}, {y})")));
    }
    coupling.validate()?;
    let (diag, off) = match coupling {
        VertexCoupling::Kirchhoff => (Complex64::from(-1.0 / 3.0), Complex64::from(2.0 / 3.0)),
        VertexCoupling::Delta(alpha) => {
            let den = alpha - 3.0 * I * k;
            (-(alpha - I * k) / den, -(2.0 * I * k) / den)
        }
        VertexCoupling::DeltaPrime(beta) => {
            let den = 3.0 - I * beta * k;
            (-(-1.0 + I * beta * k) / den, -2.0 / den)
        }
    };
    let pre = I / (2.0 * k);
    let direct = pre * (I * k * (x - y).abs()).exp();
    let image = pre * (I * k * (x + y)).exp();
    Ok(KernelMatrix(std::array::from_fn(|i| {
        std::array::from_fn(|j| if i == j { direct + image * diag } else { image * off })
    })))
}

/// Both sides of
/// `(1/2π) ∫ e^{ikz} e^{−ik²t} / (a − ik) dk = ∫_0^∞ e^{−au} e^{i(z+u)²/4t} / √(4πit) du`.
///
/// The left side is integrated along the steepest-descent line `k = e^{−iπ/4} s`
/// (no pole is crossed for `a > 0`), the right side directly on the half-line.
pub fn kernel_identity_check(a: f64, t: f64, z: f64) -> Result<(Complex64, Complex64)> {
    for (name, v) in [("a", a), ("t", t), ("z", z)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(format!("{name} must be > 0, got {v}")));
        }
    }
    let rot = Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2);
    let lhs_integrand = |s: f64| {
        let k = rot * s;
        (I * k * z - I * k * k * t).exp() / (a - I * k) * rot / (2.0 * PI)
    };
    // |integrand| ≤ e^{−t s² + z|s|/√2}/a; cut where the exponent drops below −45.
    let c = z * FRAC_1_SQRT_2;
    let s_max = (c + (c * c + 180.0 * t).sqrt()) / (2.0 * t);
    let lhs = integrate_adaptive(lhs_integrand, -s_max, s_max, 1e-14, 1e-13)?;

    let norm = (Complex64::new(0.0, 4.0 * PI * t)).sqrt();
    let rhs_integrand = |u: f64| (-a * u + I * (z + u).powi(2) / (4.0 * t)).exp() / norm;
    let u_max = 45.0 / a;
    let rhs = integrate_adaptive(rhs_integrand, 0.0, u_max, 1e-14, 1e-13)?;
    Ok((lhs, rhs))
}
