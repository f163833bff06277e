//! Linear spectral data and exact linear propagators.

mod dispersive;
mod fft;
mod kernel;
mod propagator;
mod robin;
mod scattering;

pub use dispersive::{dispersive_decay_probe, DispersiveProbe};
pub(crate) use fft::LineGrid;
pub use kernel::{kernel_identity_check, resolvent_kernel, KernelMatrix};
pub use propagator::{
    apply_half_line_propagators, apply_linear_propagator, apply_two_edge_propagator, LinearPropagator, Stepper,
};
pub use scattering::{rescaled_coefficients, scattering_coefficients, RescaledCoefficients, ScatteringCoefficients};
