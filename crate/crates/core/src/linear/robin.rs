//! Robin-invariant image extension of a half-line function.
//!
//! For `s'(0) = a s(0)` with `a > 0`, the extension
//! `G(x) = s(x)` for `x ≥ 0` and `G(−ξ) = s(ξ) − 2a ∫_0^ξ e^{−a(ξ−y)} s(y) dy`
//! makes `G' − aG` odd, a property preserved by the free flow. Restricting the free
//! evolution of `G` to `x ≥ 0` therefore reproduces the half-line Robin propagator
//! `U_t(x−y) + U_t(x+y) − 2a ∫_0^∞ e^{−au} U_t(x+y+u) du`.
//!
//! Past the support of `s` the image is the pure tail `C e^{ax}`, which decays too slowly to
//! sample when `a` is small. The lattice operator `(DG)_p = G_{p+1} − e^{a·dx} G_p` kills a
//! sampled exponential exactly and commutes with every Fourier multiplier, so for small
//! `a·dx` the compactly supported `DG` is propagated instead and `G` is recovered on the
//! half line by the backward recursion `G_p = e^{−a·dx}(G_{p+1} − u_p)`.

use num_complex::Complex64;

use crate::quadrature::gauss_legendre;

/// Lagrange stencil width used for the running exponential integral.
const STENCIL: usize = 6;

/// Above this `a·dx` the tail is sampled until it decays; below it the annihilator is used,
/// where `e^{a·dx}` stays small enough for the recursion to be well conditioned.
const ANNIHILATOR_MAX_ADX: f64 = 0.5;

#[derive(Debug, Clone)]
pub(crate) struct RobinExtension {
    pub a: f64,
    dx: f64,
    decay: f64,
    /// Cell weights for cells 0, 1 (shifted stencils) and the interior pattern.
    weights: [[f64; STENCIL]; 3],
    offsets: [isize; 3],
}

impl RobinExtension {
    pub fn new(a: f64, dx: f64) -> Self {
        let c = a * dx;
        let moments = exp_moments(c, STENCIL);
        let offsets = [0, -1, -2];
        let weights = offsets.map(|off| {
            let nodes: [f64; STENCIL] = std::array::from_fn(|k| (off + k as isize) as f64);
            let mut w = [0.0; STENCIL];
            for (j, wj) in w.iter_mut().enumerate() {
                let coeffs = lagrange_coefficients(&nodes, j);
                *wj = dx * coeffs.iter().zip(&moments).map(|(c, m)| c * m).sum::<f64>();
            }
            w
        });
        RobinExtension { a, dx, decay: (-c).exp(), weights, offsets }
    }

    /// True when the image is propagated through its annihilator.
    pub fn uses_annihilator(&self) -> bool {
        self.a * self.dx <= ANNIHILATOR_MAX_ADX
    }

    /// Writes `u = DG` into the periodic line `buf` (index `p` for `p ≥ 0`, `len + p` below).
    /// `u` vanishes beyond a few cells past the support of `s` and its image.
    pub fn annihilated(&self, s: &[Complex64], buf: &mut [Complex64]) {
        let n = s.len();
        let len = buf.len();
        let image = self.image(s, n + 8);
        let grow = 1.0 / self.decay;
        let g = |p: isize| -> Complex64 {
            if p >= 0 {
                s.get(p as usize).copied().unwrap_or_default()
            } else {
                image[(-p) as usize]
            }
        };
        buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        for p in -(image.len() as isize - 1)..n as isize {
            let u = g(p + 1) - g(p) * grow;
            buf[if p >= 0 { p as usize } else { (len as isize + p) as usize }] = u;
        }
    }

    /// Recovers `G` on `0..out.len()` from `u` in `buf`, taking `G = 0` at the middle of the line.
    pub fn restore(&self, buf: &[Complex64], out: &mut [Complex64]) {
        let mut g = Complex64::new(0.0, 0.0);
        for p in (0..buf.len() / 2).rev() {
            g = (g - buf[p]) * self.decay;
            if p < out.len() {
                out[p] = g;
            }
        }
    }

    /// Negative-side samples `G(−m·dx)` for `m = 0..count`; `s` is taken as zero past its end.
    pub fn image(&self, s: &[Complex64], count: usize) -> Vec<Complex64> {
        let n = s.len() as isize;
        let sample = |m: isize| if m >= 0 && m < n { s[m as usize] } else { Complex64::new(0.0, 0.0) };
        let mut out = Vec::with_capacity(count);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..count {
            out.push(sample(m as isize) - 2.0 * self.a * acc);
            // advance the running integral over the cell [m, m+1]
            let pattern = m.min(2);
            let start = m as isize + self.offsets[pattern];
            let mut cell = Complex64::new(0.0, 0.0);
            if start < n {
                for (k, w) in self.weights[pattern].iter().enumerate() {
                    cell += sample(start + k as isize) * *w;
                }
            }
            acc = acc * self.decay + cell;
        }
        out
    }
}

/// `ν_q = ∫_0^1 e^{−c(1−u)} u^q du`, `q < count`.
fn exp_moments(c: f64, count: usize) -> Vec<f64> {
    if c > 30.0 {
        // Integration by parts; stable when q < c.
        let mut nu = vec![(1.0 - (-c).exp()) / c];
        for q in 1..count {
            let prev = nu[q - 1];
            nu.push(1.0 / c - q as f64 / c * prev);
        }
        nu
    } else {
        let (x, w) = gauss_legendre(48);
        (0..count)
            .map(|q| {
                x.iter()
                    .zip(&w)
                    .map(|(xi, wi)| {
                        let u = 0.5 * (xi + 1.0);
                        0.5 * wi * (-c * (1.0 - u)).exp() * u.powi(q as i32)
                    })
                    .sum()
            })
            .collect()
    }
}

/// Monomial coefficients of the `j`-th Lagrange basis polynomial on `nodes`.
fn lagrange_coefficients(nodes: &[f64], j: usize) -> Vec<f64> {
    let mut poly = vec![1.0];
    let mut denom = 1.0;
    for (k, &xk) in nodes.iter().enumerate() {
        if k == j {
            continue;
        }
        let mut next = vec![0.0; poly.len() + 1];
        for (p, &c) in poly.iter().enumerate() {
            next[p + 1] += c;
            next[p] -= xk * c;
        }
        poly = next;
        denom *= nodes[j] - xk;
    }
    poly.iter().map(|c| c / denom).collect()
}
