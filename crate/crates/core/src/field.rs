//! Fields on the three-edge star graph, their norms, and the mass/energy functionals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::{Hamiltonian, VertexCoupling};
use crate::error::{Error, Result};

pub const N_EDGES: usize = 3;
pub const MIN_POINTS: usize = 16;

/// Uniform half-line grid shared by all edges: `x_m = m·dx`, `m = 0..n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dx: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn new(dx: f64, n_points: usize) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::invalid(format!("grid spacing must be > 0, got {dx}")));
        }
        if n_points < MIN_POINTS {
            return Err(Error::invalid(format!("need at least {MIN_POINTS} points per edge, got {n_points}")));
        }
        Ok(GridSpec { dx, n_points })
    }

    /// Smallest grid with spacing `dx` whose edges reach at least `length`.
    pub fn with_length(dx: f64, length: f64) -> Result<Self> {
        let n = (length / dx).ceil() as usize + 1;
        GridSpec::new(dx, n.max(MIN_POINTS))
    }

    pub fn length(&self) -> f64 {
        self.dx * (self.n_points - 1) as f64
    }

    pub fn x(&self, m: usize) -> f64 {
        m as f64 * self.dx
    }

    /// Number of outermost samples forming the far-end zone of each edge.
    pub fn far_zone_points(&self) -> usize {
        (self.n_points / 20).max(8).min(self.n_points)
    }
}

/// The state `Ψ = (ψ₁, ψ₂, ψ₃)` sampled on a common [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GraphField {
    grid: GridSpec,
    edges: [Vec<Complex64>; N_EDGES],
}

impl GraphField {
    pub fn zeros(grid: GridSpec) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.n_points];
        GraphField { grid, edges: [z.clone(), z.clone(), z] }
    }

    pub fn from_edges(grid: GridSpec, edges: [Vec<Complex64>; N_EDGES]) -> Result<Self> {
        for (j, e) in edges.iter().enumerate() {
            if e.len() != grid.n_points {
                return Err(Error::invalid(format!(
                    "edge {} has {} samples, grid expects {}",
                    j + 1,
                    e.len(),
                    grid.n_points
                )));
            }
        }
        Ok(GraphField { grid, edges })
    }

    /// Samples `f(edge, x)` with 0-based edge index.
    pub fn from_fn(grid: GridSpec, f: impl Fn(usize, f64) -> Complex64) -> Self {
        let edges = std::array::from_fn(|j| (0..grid.n_points).map(|m| f(j, grid.x(m))).collect());
        GraphField { grid, edges }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn edge(&self, j: usize) -> &[Complex64] {
        &self.edges[j]
    }

    pub fn edge_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.edges[j]
    }

    pub fn edges(&self) -> &[Vec<Complex64>; N_EDGES] {
        &self.edges
    }

    pub fn into_edges(self) -> [Vec<Complex64>; N_EDGES] {
        self.edges
    }

    pub fn vertex_values(&self) -> [Complex64; N_EDGES] {
        std::array::from_fn(|j| self.edges[j][0])
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let edges = std::array::from_fn(|j| self.edges[j].iter().map(|&z| f(z)).collect());
        GraphField { grid: self.grid, edges }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    fn zip_with(&self, other: &GraphField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let edges =
            std::array::from_fn(|j| self.edges[j].iter().zip(&other.edges[j]).map(|(&a, &b)| f(a, b)).collect());
        GraphField { grid: self.grid, edges }
    }

    pub fn add(&self, other: &GraphField) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GraphField) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// Same field with edges relabelled: edge `j` of the result is edge `perm[j]` of `self`.
    pub fn permuted(&self, perm: [usize; N_EDGES]) -> Self {
        let edges = std::array::from_fn(|j| self.edges[perm[j]].clone());
        GraphField { grid: self.grid, edges }
    }

    pub fn mass_per_edge(&self) -> [f64; N_EDGES] {
        std::array::from_fn(|j| gregory(self.grid.dx, self.edges[j].iter().map(|z| z.norm_sqr())))
    }

    /// Mass of the outermost [`GridSpec::far_zone_points`] samples of all edges.
    pub fn far_end_mass(&self) -> f64 {
        let k = self.grid.far_zone_points();
        let n = self.grid.n_points;
        self.edges.iter().map(|e| gregory(self.grid.dx, e[n - k..].iter().map(|z| z.norm_sqr()))).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.edges.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Gregory end weights through sixth differences; with them the composite rule is 8th order
/// for smooth integrands whatever their derivatives at the end points. Plain trapezoid is
/// only 2nd order once `|ψ|²` has a nonzero slope at the vertex, which δ and δ′ force, and
/// a packet sitting on a Kirchhoff vertex already has nonzero odd derivatives per edge.
const GREGORY: [f64; 7] = [
    5257.0 / 17280.0,
    22081.0 / 15120.0,
    54851.0 / 120960.0,
    103.0 / 70.0,
    89437.0 / 120960.0,
    16367.0 / 15120.0,
    23917.0 / 24192.0,
];

/// Composite Gregory rule on a uniform grid; falls back to trapezoid below 14 samples.
pub(crate) fn gregory(dx: f64, values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len();
    if n < 2 * GREGORY.len() {
        return trapezoid(dx, values);
    }
    let mut sum = 0.0;
    for (m, v) in values.enumerate() {
        let k = m.min(n - 1 - m);
        sum += if k < GREGORY.len() { GREGORY[k] } else { 1.0 } * v;
    }
    sum * dx
}

/// Composite trapezoid rule on a uniform grid.
pub(crate) fn trapezoid(dx: f64, values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for (m, v) in values.enumerate() {
        let w = if m == 0 || m == n - 1 { 0.5 } else { 1.0 };
        sum += w * v;
    }
    sum * dx
}

/// `(Σ_j ‖ψ_j‖_p^p)^{1/p}`; pass `f64::INFINITY` for the sup norm.
pub fn lp_norm(field: &GraphField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid(format!("L^p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(field.edges.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let dx = field.grid.dx;
    let total: f64 = if p == 2.0 {
        field.mass_per_edge().iter().sum()
    } else {
        field.edges.iter().map(|e| gregory(dx, e.iter().map(|z| z.norm().powf(p)))).sum()
    };
    Ok(total.powf(1.0 / p))
}

/// `‖Ψ‖²`.
pub fn mass(field: &GraphField) -> f64 {
    field.mass_per_edge().iter().sum()
}

/// `‖Ψ − Φ‖` in `L²(G)`.
pub fn l2_distance(a: &GraphField, b: &GraphField) -> f64 {
    mass(&a.sub(b)).sqrt()
}

/// Discrete derivative used by the energy functional: 4th-order centered differences in
/// the interior, 4th-order one-sided stencils on the two outermost samples at each end.
pub(crate) fn derivative(dx: f64, f: &[Complex64]) -> Vec<Complex64> {
    let n = f.len();
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let h12 = 12.0 * dx;
    d[0] = vertex_derivative(dx, f);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / h12;
    for m in 2..n - 2 {
        d[m] = (f[m - 2] - 8.0 * f[m - 1] + 8.0 * f[m + 1] - f[m + 2]) / h12;
    }
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / h12;
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / h12;
    d
}

/// One-sided 4th-order derivative at the vertex.
pub(crate) fn vertex_derivative(dx: f64, f: &[Complex64]) -> Complex64 {
    (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * dx)
}

/// Vertex contribution to the quadratic form of the linear Hamiltonian.
pub fn vertex_energy(field: &GraphField, h: Hamiltonian) -> f64 {
    let v = field.vertex_values();
    match h {
        Hamiltonian::Star(VertexCoupling::Kirchhoff) | Hamiltonian::TwoEdge(_) => 0.0,
        Hamiltonian::Star(VertexCoupling::Delta(alpha)) => alpha * v[0].norm_sqr(),
        Hamiltonian::Star(VertexCoupling::DeltaPrime(beta)) => (v[0] + v[1] + v[2]).norm_sqr() / beta,
    }
}

/// `½ E_lin(Ψ) − ¼ ‖Ψ‖⁴_{L⁴}` for the focusing cubic nonlinearity.
pub fn energy(field: &GraphField, h: impl Into<Hamiltonian>) -> f64 {
    let h = h.into();
    let dx = field.grid.dx;
    let mut kinetic = 0.0;
    let mut quartic = 0.0;
    for e in &field.edges {
        let d = derivative(dx, e);
        kinetic += gregory(dx, d.iter().map(|z| z.norm_sqr()));
        quartic += gregory(dx, e.iter().map(|z| z.norm_sqr().powi(2)));
    }
    0.5 * (kinetic + vertex_energy(field, h)) - 0.25 * quartic
}

/// Defects of the vertex conditions defining the operator domain.
///
/// For Kirchhoff/δ couplings `continuity` holds `|ψ₁(0)−ψ₂(0)|, |ψ₂(0)−ψ₃(0)|` and `flux`
/// holds `|Σψ_j'(0) − αψ₁(0)|`. For δ′ the roles swap: `continuity` holds the derivative
/// mismatches and `flux` holds `|Σψ_j(0) − βψ₁'(0)|`. For a two-edge Hamiltonian `H_j`,
/// `continuity = [|ψ_j(0)−ψ_{j+1}(0)|, |ψ_{j+2}(0)|]` and `flux = |ψ_j'(0)+ψ_{j+1}'(0)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryResidual {
    pub continuity: [f64; 2],
    pub flux: f64,
}

impl BoundaryResidual {
    pub fn max(&self) -> f64 {
        self.continuity[0].max(self.continuity[1]).max(self.flux)
    }
}

pub fn boundary_residual(field: &GraphField, h: impl Into<Hamiltonian>) -> BoundaryResidual {
    let dx = field.grid.dx;
    let v = field.vertex_values();
    let d: [Complex64; N_EDGES] = std::array::from_fn(|j| vertex_derivative(dx, &field.edges[j]));
    match h.into() {
        Hamiltonian::Star(VertexCoupling::Kirchhoff) => BoundaryResidual {
            continuity: [(v[0] - v[1]).norm(), (v[1] - v[2]).norm()],
            flux: (d[0] + d[1] + d[2]).norm(),
        },
        Hamiltonian::Star(VertexCoupling::Delta(alpha)) => BoundaryResidual {
            continuity: [(v[0] - v[1]).norm(), (v[1] - v[2]).norm()],
            flux: (d[0] + d[1] + d[2] - alpha * v[0]).norm(),
        },
        Hamiltonian::Star(VertexCoupling::DeltaPrime(beta)) => BoundaryResidual {
            continuity: [(d[0] - d[1]).norm(), (d[1] - d[2]).norm()],
            flux: (v[0] + v[1] + v[2] - beta * d[0]).norm(),
        },
        Hamiltonian::TwoEdge(pair) => {
            let (p, q, z) = (pair.positive(), pair.negative(), pair.decoupled());
            BoundaryResidual { continuity: [(v[p] - v[q]).norm(), v[z].norm()], flux: (d[p] + d[q]).norm() }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre_composite;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    fn soliton_field(dx: f64, len: f64, x0: f64) -> GraphField {
        let grid = GridSpec::with_length(dx, len).unwrap();
        GraphField::from_fn(grid, |j, x| {
            if j == 0 {
                Complex64::new(2f64.sqrt() * sech(x - x0), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn zero_field_norms_vanish() {
        let f = GraphField::zeros(GridSpec::new(0.1, 32).unwrap());
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert_eq!(lp_norm(&f, p).unwrap(), 0.0);
        }
        assert_eq!(mass(&f), 0.0);
        assert_eq!(energy(&f, VertexCoupling::Kirchhoff), 0.0);
    }

    #[test]
    fn p_below_one_is_rejected() {
        let f = GraphField::zeros(GridSpec::new(0.1, 32).unwrap());
        assert!(matches!(lp_norm(&f, 0.5), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn grid_rejects_degenerate_specs() {
        assert!(GridSpec::new(0.0, 100).is_err());
        assert!(GridSpec::new(0.1, 15).is_err());
    }

    #[test]
    fn soliton_mass_matches_quadrature_oracle() {
        // Oracle: ∫_0^L 2 sech²(x − 20) by composite Gauss–Legendre ≈ ∫_ℝ = 4.
        let oracle = gauss_legendre_composite(|x| 2.0 * sech(x - 20.0).powi(2), 0.0, 40.0, 400);
        assert!((oracle - 4.0).abs() < 1e-12);
        let f = soliton_field(0.01, 40.0, 20.0);
        assert!((mass(&f) - oracle).abs() < 1e-10);
        assert!((lp_norm(&f, 2.0).unwrap().powi(2) - 4.0).abs() < 1e-10);
    }

    #[test]
    fn gregory_is_eighth_order_with_sloped_ends() {
        // ∫_0^2 eˣ cos 3x = [eˣ(cos 3x + 3 sin 3x)/10]_0^2
        let antider = |x: f64| x.exp() * ((3.0 * x).cos() + 3.0 * (3.0 * x).sin()) / 10.0;
        let exact = antider(2.0) - antider(0.0);
        let err = |n: usize| {
            let dx = 2.0 / (n - 1) as f64;
            (gregory(dx, (0..n).map(|m| (m as f64 * dx).exp() * (3.0 * m as f64 * dx).cos())) - exact).abs()
        };
        let order = (err(17) / err(33)).log2();
        assert!(order > 7.5, "observed order {order}");
    }

    #[test]
    fn sup_norm_of_soliton_on_grid_point() {
        let f = soliton_field(0.05, 40.0, 20.0);
        assert!((lp_norm(&f, f64::INFINITY).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn standing_soliton_energy() {
        // ½·∫|φ'|² − ¼·∫|φ|⁴ = ½·4/3 − ¼·16/3 = −2/3.
        let f = soliton_field(0.01, 40.0, 20.0);
        assert!((energy(&f, VertexCoupling::Kirchhoff) + 2.0 / 3.0).abs() < 1e-8);
        assert!((energy(&f, VertexCoupling::Delta(5.0)) + 2.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn delta_zero_energy_is_bitwise_kirchhoff() {
        let grid = GridSpec::new(0.05, 200).unwrap();
        let f = GraphField::from_fn(grid, |j, x| Complex64::new((-(x - 1.0 - j as f64).powi(2)).exp(), 0.3 * x));
        assert_eq!(energy(&f, VertexCoupling::Delta(0.0)).to_bits(), energy(&f, VertexCoupling::Kirchhoff).to_bits());
    }

    #[test]
    fn symmetric_flat_field_has_no_kirchhoff_defect() {
        let grid = GridSpec::new(0.05, 200).unwrap();
        let f = GraphField::from_fn(grid, |_, x| Complex64::new((-x * x).exp(), 0.0));
        let r = boundary_residual(&f, VertexCoupling::Kirchhoff);
        assert!(r.continuity[0] == 0.0 && r.continuity[1] == 0.0);
        // ψ'(0) = 0 exactly; the one-sided stencil is O(dx²) accurate.
        assert!(r.flux < 3.0 * 0.05f64.powi(2));
    }

    #[test]
    fn continuity_defect_is_direct_evaluation() {
        let grid = GridSpec::new(0.05, 32).unwrap();
        let f = GraphField::from_fn(grid, |j, _| Complex64::new(if j == 0 { 1.0 } else { 0.0 }, 0.0));
        let r = boundary_residual(&f, VertexCoupling::Kirchhoff);
        assert_eq!(r.continuity[0], 1.0);
        assert_eq!(r.continuity[1], 0.0);
    }

    #[test]
    fn mass_is_additive_over_edges() {
        let grid = GridSpec::new(0.03, 300).unwrap();
        let f = GraphField::from_fn(grid, |j, x| Complex64::new((x * (j + 1) as f64).sin(), (-x).exp()));
        let per = f.mass_per_edge();
        let single: [f64; 3] = std::array::from_fn(|j| {
            let mut g = GraphField::zeros(grid);
            g.edge_mut(j).copy_from_slice(f.edge(j));
            mass(&g)
        });
        assert_eq!(per, single);
        assert!((mass(&f) - per.iter().sum::<f64>()).abs() < 1e-15 * mass(&f));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn lp_norm_is_absolutely_homogeneous(
                re in -3.0f64..3.0, im in -3.0f64..3.0, p in 1.0f64..6.0, seed in 0u64..1000
            ) {
                let grid = GridSpec::new(0.1, 64).unwrap();
                let s = seed as f64;
                let f = GraphField::from_fn(grid, |j, x| {
                    Complex64::new((x + s + j as f64).sin(), (0.3 * x * (s + 1.0)).cos())
                });
                let c = Complex64::new(re, im);
                for q in [p, f64::INFINITY] {
                    let lhs = lp_norm(&f.scaled(c), q).unwrap();
                    let rhs = c.norm() * lp_norm(&f, q).unwrap();
                    prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
                }
            }
        }
    }
}
