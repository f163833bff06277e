//! Exact linear evolution `e^{−iHt}` on the star graph.
//!
//! The field splits into the symmetric channel `s = (ψ₁+ψ₂+ψ₃)/3` and the differences
//! `d_j = ψ_j − s`. Every coupling acts diagonally on that split: the differences obey a
//! Dirichlet (Kirchhoff, δ) or Neumann (δ′) condition and `s` obeys Neumann (Kirchhoff)
//! or the Robin condition `s'(0) = a s(0)` with `a = α/3` (δ) or `a = 3/β` (δ′). Each
//! channel is continued to the full line by the matching image and propagated with the
//! exact free multiplier `e^{−ik²t}`; this is the operator
//! `(U⁻ − U⁺)𝕀 + (2/3)U⁺𝕁` and its δ/δ′ analogues with the exponential tail folded into
//! the image.

use num_complex::Complex64;

use super::fft::LineGrid;
use super::robin::RobinExtension;
use crate::coupling::{EdgePair, Hamiltonian, VertexCoupling};
use crate::error::Result;
use crate::field::{GraphField, GridSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Robin images are carried until `e^{−a·ξ}` drops below `e^{−ROBIN_DECAY}`.
const ROBIN_DECAY: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Channel {
    Even,
    Odd,
    Robin,
}

/// Exact propagator for a fixed Hamiltonian and grid; cheap to clone.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    h: Hamiltonian,
    grid: GridSpec,
    line: LineGrid,
    robin: Option<RobinExtension>,
    image_len: usize,
}

impl LinearPropagator {
    pub fn new(h: impl Into<Hamiltonian>, grid: GridSpec) -> Result<Self> {
        let h = h.into();
        h.validate()?;
        let n = grid.n_points;
        let a = match h {
            Hamiltonian::Star(c) => c.symmetric_robin(),
            Hamiltonian::TwoEdge(_) => None,
        };
        let robin = a.map(|a| RobinExtension::new(a, grid.dx));
        // a sampled tail is needed only when the annihilator is not used, and then a·dx > 0.5
        let tail = match (&robin, a) {
            (Some(ext), Some(a)) if !ext.uses_annihilator() => (ROBIN_DECAY / (a * grid.dx)).ceil() as usize,
            _ => 8,
        };
        let line = LineGrid::covering(grid.dx, n + n / 4 + 32 + tail);
        let image_len = (n + tail).min(line.half() - 1);
        Ok(LinearPropagator { h, grid, line, robin, image_len })
    }

    pub fn hamiltonian(&self) -> Hamiltonian {
        self.h
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Number of points of the periodic line grid used per channel.
    pub fn line_len(&self) -> usize {
        self.line.len
    }

    /// `e^{−iHt}Ψ`; `t = 0` returns `Ψ` unchanged.
    pub fn apply(&self, t: f64, field: &GraphField) -> GraphField {
        let mut out = field.clone();
        self.stepper(t).apply_in_place(&mut out);
        out
    }

    /// Reusable propagator for a fixed time increment `t`.
    pub fn stepper(&self, t: f64) -> Stepper {
        let mult = if t == 0.0 { Vec::new() } else { self.line.free_multiplier(t) };
        Stepper { prop: self.clone(), t, mult, buf: vec![ZERO; self.line.len], scratch: Vec::new(), work: Vec::new() }
    }
}

/// [`LinearPropagator`] at a fixed time step with cached multiplier and buffers.
#[derive(Debug, Clone)]
pub struct Stepper {
    prop: LinearPropagator,
    t: f64,
    mult: Vec<Complex64>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
    work: Vec<Vec<Complex64>>,
}

impl Stepper {
    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn propagator(&self) -> &LinearPropagator {
        &self.prop
    }

    pub fn apply_in_place(&mut self, field: &mut GraphField) {
        assert_eq!(field.grid(), &self.prop.grid, "field grid differs from propagator grid");
        if self.t == 0.0 {
            return;
        }
        match self.prop.h {
            Hamiltonian::Star(c) => self.star(c, field),
            Hamiltonian::TwoEdge(pair) => self.two_edge(pair, field),
        }
    }

    fn star(&mut self, coupling: VertexCoupling, field: &mut GraphField) {
        let n = self.prop.grid.n_points;
        let (sym, diff) = match coupling {
            VertexCoupling::DeltaPrime(_) => (Channel::Robin, Channel::Even),
            _ if self.prop.robin.is_some() => (Channel::Robin, Channel::Odd),
            _ => (Channel::Even, Channel::Odd),
        };
        let mut work = std::mem::take(&mut self.work);
        work.resize_with(3, Vec::new);
        for w in work.iter_mut() {
            w.clear();
            w.resize(n, ZERO);
        }
        {
            let [s, d0, d1] = &mut work[..] else { unreachable!() };
            let (e0, e1, e2) = (field.edge(0), field.edge(1), field.edge(2));
            for m in 0..n {
                let mean = (e0[m] + e1[m] + e2[m]) / 3.0;
                s[m] = mean;
                d0[m] = e0[m] - mean;
                d1[m] = e1[m] - mean;
            }
        }
        for (w, ch) in work.iter_mut().zip([sym, diff, diff]) {
            self.channel(ch, w);
        }
        let [s, d0, d1] = &work[..] else { unreachable!() };
        for m in 0..n {
            field.edge_mut(0)[m] = s[m] + d0[m];
            field.edge_mut(1)[m] = s[m] + d1[m];
            field.edge_mut(2)[m] = s[m] - d0[m] - d1[m];
        }
        self.work = work;
    }

    fn two_edge(&mut self, pair: EdgePair, field: &mut GraphField) {
        let n = self.prop.grid.n_points;
        let len = self.prop.line.len;
        let (p, q, z) = (pair.positive(), pair.negative(), pair.decoupled());
        self.buf.iter_mut().for_each(|b| *b = ZERO);
        self.buf[0] = (field.edge(p)[0] + field.edge(q)[0]) * 0.5;
        for m in 1..n {
            self.buf[m] = field.edge(p)[m];
            self.buf[len - m] = field.edge(q)[m];
        }
        self.prop.line.apply_multiplier(&mut self.buf, &self.mult, &mut self.scratch);
        field.edge_mut(p)[0] = self.buf[0];
        field.edge_mut(q)[0] = self.buf[0];
        for m in 1..n {
            field.edge_mut(p)[m] = self.buf[m];
            field.edge_mut(q)[m] = self.buf[len - m];
        }
        if field.edge(z).iter().any(|c| *c != ZERO) {
            let mut w = field.edge(z).to_vec();
            self.channel(Channel::Odd, &mut w);
            field.edge_mut(z).copy_from_slice(&w);
        }
    }

    /// Propagates one half-line channel in place.
    fn channel(&mut self, ch: Channel, data: &mut [Complex64]) {
        let n = data.len();
        let len = self.prop.line.len;
        let buf = &mut self.buf;
        buf.iter_mut().for_each(|b| *b = ZERO);
        buf[..n].copy_from_slice(data);
        match ch {
            Channel::Even => (1..n).for_each(|m| buf[len - m] = data[m]),
            Channel::Odd => {
                buf[0] = ZERO;
                (1..n).for_each(|m| buf[len - m] = -data[m]);
            }
            Channel::Robin => {
                let ext = self.prop.robin.as_ref().expect("robin channel without extension");
                if ext.uses_annihilator() {
                    ext.annihilated(data, buf);
                    self.prop.line.apply_multiplier(buf, &self.mult, &mut self.scratch);
                    ext.restore(buf, data);
                    return;
                }
                let image = ext.image(data, self.prop.image_len);
                (1..image.len()).for_each(|m| buf[len - m] = image[m]);
            }
        }
        self.prop.line.apply_multiplier(buf, &self.mult, &mut self.scratch);
        data.copy_from_slice(&buf[..n]);
        if ch == Channel::Odd {
            data[0] = ZERO;
        }
    }
}

/// `e^{−iHt}Ψ` for a star coupling.
pub fn apply_linear_propagator(coupling: VertexCoupling, t: f64, field: &GraphField) -> Result<GraphField> {
    Ok(LinearPropagator::new(coupling, *field.grid())?.apply(t, field))
}

/// `e^{−iH_j t}Ψ = U_t⁻Ψ + U_t⁺𝕋_jΨ` with 1-based `j`.
pub fn apply_two_edge_propagator(j: usize, t: f64, field: &GraphField) -> Result<GraphField> {
    let pair = EdgePair::new(j)?;
    Ok(LinearPropagator::new(pair, *field.grid())?.apply(t, field))
}

/// `(U_t⁻ψ, U_t⁺ψ)` for a single half-line array.
///
/// The origin sample enters both extensions with half weight, so that `U⁻ + U⁺` is the
/// even (Neumann) and `U⁻ − U⁺` the odd (Dirichlet) half-line evolution. At `t = 0` this
/// returns the limit `(ψ − ψ(0)/2·e₀, ψ(0)/2·e₀)`.
pub fn apply_half_line_propagators(psi: &[Complex64], dx: f64, t: f64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let grid = GridSpec::new(dx, psi.len())?;
    let n = grid.n_points;
    let line = LineGrid::covering(dx, 2 * n);
    let len = line.len;
    let mut buf = vec![ZERO; len];
    buf[..n].copy_from_slice(psi);
    buf[0] = psi[0] * 0.5;
    if t != 0.0 {
        let mult = line.free_multiplier(t);
        line.apply_multiplier(&mut buf, &mult, &mut Vec::new());
    }
    let minus = buf[..n].to_vec();
    let plus = (0..n).map(|m| buf[(len - m) % len]).collect();
    Ok((minus, plus))
}
