//! Crank–Nicolson scheme for the discrete graph Laplacian.
//!
//! The discrete Hamiltonian is `H_h = M⁻¹K` with the lumped trapezoid mass `M` and the
//! stiffness `K` of the quadratic form `Σ_j Σ_m |u_{j,m+1} − u_{j,m}|²/dx` plus the
//! coupling's vertex term. Continuity is built into the unknowns (one shared vertex node
//! for Kirchhoff/δ and the joined pair of `H_j`, per-edge vertex nodes for δ′), so the
//! flux condition is the natural boundary condition of the form. `H_h` is self-adjoint in
//! the trapezoid inner product and each step is unitary there. Far ends are Dirichlet.

use num_complex::Complex64;

use crate::coupling::{EdgePair, Hamiltonian, VertexCoupling};
use crate::error::{Error, Result};
use crate::field::{trapezoid, GraphField, GridSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Factored symmetric tridiagonal matrix with constant off-diagonal.
#[derive(Debug, Clone)]
struct Tridiag {
    off: Complex64,
    cp: Vec<Complex64>,
    inv: Vec<Complex64>,
}

impl Tridiag {
    fn new(diag: &[Complex64], off: Complex64) -> Result<Self> {
        let n = diag.len();
        let mut cp = vec![ZERO; n];
        let mut inv = vec![ZERO; n];
        let mut prev = ZERO;
        for i in 0..n {
            let d = diag[i] - off * prev;
            if d.norm() < 1e-300 || !d.re.is_finite() {
                return Err(Error::NumericFailure(format!("tridiagonal pivot {i} vanished")));
            }
            inv[i] = 1.0 / d;
            cp[i] = off * inv[i];
            prev = cp[i];
        }
        Ok(Tridiag { off, cp, inv })
    }

    fn solve(&self, rhs: &mut [Complex64]) {
        let n = rhs.len();
        rhs[0] *= self.inv[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.off * rhs[i - 1]) * self.inv[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.cp[i] * rhs[i + 1];
        }
    }
}

#[derive(Debug, Clone)]
enum Vertex {
    /// One vertex node shared by the listed edges, with lumped weight and potential.
    Shared { edges: Vec<usize>, weight: f64, potential: f64, pinned: Option<usize> },
    /// Per-edge vertex nodes coupled through `(1/β)|Σu_{j,0}|²`.
    Split { inv_beta: f64 },
}

/// Crank–Nicolson propagator for a fixed `dt`.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    h: Hamiltonian,
    grid: GridSpec,
    dt: f64,
    vertex: Vertex,
    interior: Tridiag,
    /// Response of an interior block to a unit source in its first row (shared vertex), or
    /// of a split-vertex block to a unit source at its vertex node.
    response: Vec<Complex64>,
    split: Option<Tridiag>,
    schur: Complex64,
}

impl CrankNicolson {
    pub fn new(h: impl Into<Hamiltonian>, grid: GridSpec, dt: f64) -> Result<Self> {
        let h = h.into();
        h.validate()?;
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::invalid(format!("time step must be finite and nonzero, got {dt}")));
        }
        let dx = grid.dx;
        let n = grid.n_points;
        let tau = Complex64::new(0.0, 0.5 * dt);
        let off = -tau / dx;
        let mid = Complex64::from(dx) + tau * (2.0 / dx);
        let interior = Tridiag::new(&vec![mid; n - 2], off)?;
        let vertex = match h {
            Hamiltonian::Star(VertexCoupling::DeltaPrime(beta)) => Vertex::Split { inv_beta: 1.0 / beta },
            Hamiltonian::Star(c) => Vertex::Shared {
                edges: vec![0, 1, 2],
                weight: 1.5 * dx,
                potential: if let VertexCoupling::Delta(alpha) = c { alpha } else { 0.0 },
                pinned: None,
            },
            Hamiltonian::TwoEdge(pair) => two_edge_vertex(pair, dx),
        };
        let (response, split, schur) = match &vertex {
            Vertex::Shared { edges, weight, potential, .. } => {
                let mut y = vec![ZERO; n - 2];
                y[0] = Complex64::new(1.0, 0.0);
                interior.solve(&mut y);
                let k = edges.len() as f64;
                let d0 = Complex64::from(*weight) + tau * (k / dx + potential);
                (y.clone(), None, d0 - off * off * k * y[0])
            }
            Vertex::Split { inv_beta } => {
                let mut diag = vec![mid; n - 1];
                diag[0] = Complex64::from(0.5 * dx) + tau / dx;
                let block = Tridiag::new(&diag, off)?;
                let mut z = vec![ZERO; n - 1];
                z[0] = Complex64::new(1.0, 0.0);
                block.solve(&mut z);
                let schur = 1.0 + tau * *inv_beta * 3.0 * z[0];
                (z, Some(block), schur)
            }
        };
        Ok(CrankNicolson { h, grid, dt, vertex, interior, response, split, schur })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn hamiltonian(&self) -> Hamiltonian {
        self.h
    }

    /// Squared norm in the lumped inner product in which each step is unitary.
    pub fn discrete_mass(&self, field: &GraphField) -> f64 {
        field.edges().iter().map(|e| trapezoid(self.grid.dx, e.iter().map(|z| z.norm_sqr()))).sum()
    }

    /// `(M K)`-action: returns `K u` for edge arrays whose vertex entries are consistent.
    fn stiffness(&self, u: &[Vec<Complex64>; 3]) -> [Vec<Complex64>; 3] {
        let dx = self.grid.dx;
        let n = self.grid.n_points;
        let mut ku: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![ZERO; n]);
        for j in 0..3 {
            for m in 1..n - 1 {
                ku[j][m] = (2.0 * u[j][m] - u[j][m - 1] - u[j][m + 1]) / dx;
            }
        }
        match &self.vertex {
            Vertex::Shared { edges, potential, .. } => {
                let u0 = u[edges[0]][0];
                let mut k0 = u0 * *potential;
                for &j in edges {
                    k0 += (u0 - u[j][1]) / dx;
                }
                for &j in edges {
                    ku[j][0] = k0;
                }
            }
            Vertex::Split { inv_beta } => {
                let sum = u[0][0] + u[1][0] + u[2][0];
                for j in 0..3 {
                    ku[j][0] = (u[j][0] - u[j][1]) / dx + sum * *inv_beta;
                }
            }
        }
        ku
    }

    /// One linear step `u ← (M + iτK)⁻¹(M − iτK)u`, `τ = dt/2`.
    pub fn linear_step(&self, field: &mut GraphField) {
        assert_eq!(field.grid(), &self.grid, "field grid differs from scheme grid");
        let dx = self.grid.dx;
        let n = self.grid.n_points;
        let tau = Complex64::new(0.0, 0.5 * self.dt);
        let off = -tau / dx;
        let mut u: [Vec<Complex64>; 3] = std::array::from_fn(|j| field.edge(j).to_vec());
        for e in u.iter_mut() {
            e[n - 1] = ZERO;
        }
        match &self.vertex {
            Vertex::Shared { edges, pinned, .. } => {
                let u0 = edges.iter().map(|&j| u[j][0]).sum::<Complex64>() / edges.len() as f64;
                for &j in edges {
                    u[j][0] = u0;
                }
                if let Some(z) = pinned {
                    u[*z][0] = ZERO;
                }
            }
            Vertex::Split { .. } => {}
        }
        let ku = self.stiffness(&u);
        match &self.vertex {
            Vertex::Shared { edges, weight, pinned, .. } => {
                let rhs0 = *weight * u[edges[0]][0] - tau * ku[edges[0]][0];
                let mut x: [Vec<Complex64>; 3] = std::array::from_fn(|j| {
                    let mut r: Vec<Complex64> = (1..n - 1).map(|m| dx * u[j][m] - tau * ku[j][m]).collect();
                    self.interior.solve(&mut r);
                    r
                });
                let coupled = edges.iter().map(|&j| x[j][0]).sum::<Complex64>();
                let u0 = (rhs0 - off * coupled) / self.schur;
                for &j in edges {
                    for (xi, yi) in x[j].iter_mut().zip(&self.response) {
                        *xi -= off * u0 * yi;
                    }
                }
                for (j, xj) in x.iter().enumerate() {
                    let e = field.edge_mut(j);
                    let on_vertex = edges.contains(&j);
                    e[0] = if on_vertex { u0 } else { ZERO };
                    e[1..n - 1].copy_from_slice(xj);
                    e[n - 1] = ZERO;
                }
                debug_assert!(pinned.is_none_or(|z| field.edge(z)[0] == ZERO));
            }
            Vertex::Split { inv_beta } => {
                let block = self.split.as_ref().expect("split vertex without block");
                let mut x: [Vec<Complex64>; 3] = std::array::from_fn(|j| {
                    let mut r: Vec<Complex64> =
                        (0..n - 1).map(|m| if m == 0 { 0.5 * dx } else { dx } * u[j][m] - tau * ku[j][m]).collect();
                    block.solve(&mut r);
                    r
                });
                let s = (x[0][0] + x[1][0] + x[2][0]) * tau * *inv_beta / self.schur;
                for (j, xj) in x.iter_mut().enumerate() {
                    for (xi, zi) in xj.iter_mut().zip(&self.response) {
                        *xi -= s * zi;
                    }
                    let e = field.edge_mut(j);
                    e[..n - 1].copy_from_slice(xj);
                    e[n - 1] = ZERO;
                }
            }
        }
    }
}

fn two_edge_vertex(pair: EdgePair, dx: f64) -> Vertex {
    Vertex::Shared {
        edges: vec![pair.positive(), pair.negative()],
        weight: dx,
        potential: 0.0,
        pinned: Some(pair.decoupled()),
    }
}
