//! Vertex couplings and the linear Hamiltonians built from them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Self-adjoint boundary condition at the star vertex.
///
/// `Delta(alpha)` imposes continuity and `Σψ'(0) = α ψ(0)`; `DeltaPrime(beta)` imposes
/// equal derivatives and `Σψ(0) = β ψ'(0)`. Only the repulsive regime is supported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "strength", rename_all = "snake_case")]
pub enum VertexCoupling {
    Kirchhoff,
    Delta(f64),
    DeltaPrime(f64),
}

impl VertexCoupling {
    pub fn validate(&self) -> Result<()> {
        match *self {
            VertexCoupling::Kirchhoff => Ok(()),
            VertexCoupling::Delta(alpha) if alpha.is_finite() && alpha >= 0.0 => Ok(()),
            VertexCoupling::Delta(alpha) => Err(Error::invalid(format!("delta strength must be >= 0, got {alpha}"))),
            VertexCoupling::DeltaPrime(beta) if beta.is_finite() && beta > 0.0 => Ok(()),
            VertexCoupling::DeltaPrime(beta) => {
                Err(Error::invalid(format!("delta-prime strength must be > 0, got {beta}")))
            }
        }
    }

    pub fn kind(&self) -> CouplingKind {
        match self {
            VertexCoupling::Kirchhoff => CouplingKind::Kirchhoff,
            VertexCoupling::Delta(_) => CouplingKind::Delta,
            VertexCoupling::DeltaPrime(_) => CouplingKind::DeltaPrime,
        }
    }

    /// Robin parameter `a` of the symmetric (all-edges-equal) channel, `s'(0) = a s(0)`.
    ///
    /// `None` means Neumann (Kirchhoff and `Delta(0)`).
    pub(crate) fn symmetric_robin(&self) -> Option<f64> {
        match *self {
            VertexCoupling::Kirchhoff => None,
            VertexCoupling::Delta(0.0) => None,
            VertexCoupling::Delta(alpha) => Some(alpha / 3.0),
            VertexCoupling::DeltaPrime(beta) => Some(3.0 / beta),
        }
    }
}

impl fmt::Display for VertexCoupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexCoupling::Kirchhoff => write!(f, "kirchhoff"),
            VertexCoupling::Delta(a) => write!(f, "delta({a})"),
            VertexCoupling::DeltaPrime(b) => write!(f, "delta_prime({b})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    Kirchhoff,
    Delta,
    DeltaPrime,
}

impl CouplingKind {
    /// Coupling obtained from a rescaled strength at velocity `v`:
    /// `α = α̃ v`, `β = β̃ / v`.
    pub fn at_velocity(self, strength: f64, v: f64) -> VertexCoupling {
        match self {
            CouplingKind::Kirchhoff => VertexCoupling::Kirchhoff,
            CouplingKind::Delta => VertexCoupling::Delta(strength * v),
            CouplingKind::DeltaPrime => VertexCoupling::DeltaPrime(strength / v),
        }
    }
}

impl fmt::Display for CouplingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CouplingKind::Kirchhoff => "kirchhoff",
            CouplingKind::Delta => "delta",
            CouplingKind::DeltaPrime => "delta_prime",
        })
    }
}

impl std::str::FromStr for CouplingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "kirchhoff" | "free" => Ok(CouplingKind::Kirchhoff),
            "delta" => Ok(CouplingKind::Delta),
            "delta_prime" | "deltaprime" => Ok(CouplingKind::DeltaPrime),
            other => Err(Error::invalid(format!("unknown coupling kind `{other}`"))),
        }
    }
}

/// One of the three two-edge Hamiltonians `H_j`: edges `j` and `j+1` (mod 3) are joined
/// by a Kirchhoff condition into a line, the remaining edge gets a Dirichlet condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgePair(usize);

impl EdgePair {
    /// `j` is 1-based, as in the matrices `T_1, T_2, T_3`.
    pub fn new(j: usize) -> Result<Self> {
        if (1..=3).contains(&j) {
            Ok(EdgePair(j))
        } else {
            Err(Error::invalid(format!("two-edge index must be 1, 2 or 3, got {j}")))
        }
    }

    pub fn index(&self) -> usize {
        self.0
    }

    /// 0-based edge carried on the positive half of the unfolded line.
    pub fn positive(&self) -> usize {
        self.0 - 1
    }

    /// 0-based edge folded onto the negative half of the unfolded line.
    pub fn negative(&self) -> usize {
        self.0 % 3
    }

    /// 0-based edge decoupled with a Dirichlet condition.
    pub fn decoupled(&self) -> usize {
        (self.0 + 1) % 3
    }

    /// The matrix `T_j` acting on the `U_t^+` channel.
    pub fn t_matrix(&self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        let (p, q, d) = (self.positive(), self.negative(), self.decoupled());
        m[p][q] = 1.0;
        m[q][p] = 1.0;
        m[d][d] = -1.0;
        m
    }
}

/// Linear part of the evolution on the star graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hamiltonian {
    Star(VertexCoupling),
    TwoEdge(EdgePair),
}

impl Hamiltonian {
    /// Degenerate two-half-line graph: edges 1 and 2 form a line, edge 3 stays zero.
    pub fn line() -> Self {
        Hamiltonian::TwoEdge(EdgePair(1))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Hamiltonian::Star(c) => c.validate(),
            Hamiltonian::TwoEdge(_) => Ok(()),
        }
    }
}

impl From<VertexCoupling> for Hamiltonian {
    fn from(c: VertexCoupling) -> Self {
        Hamiltonian::Star(c)
    }
}

impl From<EdgePair> for Hamiltonian {
    fn from(p: EdgePair) -> Self {
        Hamiltonian::TwoEdge(p)
    }
}
