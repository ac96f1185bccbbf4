//! Exact transition matrices of the Swendsen-Wang, heat-bath and single-bond
//! chains, and the joint-space operators they factor through.

mod joint;
mod potts;
mod rc;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use joint::{
    block_m, block_m_dense, block_m_star, block_m_star_dense, composite_rtr, edge_operator,
    edge_operators, sb_matrix_operator, sw_matrix_operator, Composite, JointSpace,
};
pub use potts::sw_potts_matrix;
pub use rc::{hb_matrix, sb_matrix, sw_matrix_direct};

use crate::graph::Graph;
use crate::linalg::DenseMatrix;
use crate::measures::{rc_distribution, ModelParams};
use crate::symmetry::StateSymmetry;
use crate::{Caps, Error, Result};

/// Whether a matrix is a transition matrix or a general linear operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Stochastic,
    General,
}

/// A square operator on an indexed state space together with its reference
/// weights.
#[derive(Debug, Clone)]
pub struct WeightedMatrix {
    pub entries: DenseMatrix,
    pub weights: Vec<f64>,
    pub kind: MatrixKind,
    /// A state symmetry the matrix is expected to commute with; used only as
    /// a hint and checked before use.
    pub symmetry: Option<Arc<StateSymmetry>>,
}

impl WeightedMatrix {
    pub fn stochastic(entries: DenseMatrix, weights: Vec<f64>) -> Self {
        Self::with_kind(entries, weights, MatrixKind::Stochastic)
    }

    pub fn general(entries: DenseMatrix, weights: Vec<f64>) -> Self {
        Self::with_kind(entries, weights, MatrixKind::General)
    }

    fn with_kind(entries: DenseMatrix, weights: Vec<f64>, kind: MatrixKind) -> Self {
        assert!(entries.is_square(), "operator must be square");
        assert_eq!(entries.rows(), weights.len(), "weights length must match");
        WeightedMatrix {
            entries,
            weights,
            kind,
            symmetry: None,
        }
    }

    pub fn with_symmetry(mut self, symmetry: Option<Arc<StateSymmetry>>) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Largest deviation of a row sum from 1.
    pub fn row_sum_error(&self) -> f64 {
        self.entries
            .row_sums()
            .iter()
            .fold(0.0, |m, s| m.max((s - 1.0).abs()))
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.data().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.data().iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max |w(x) K(x,y) - w(y) K(y,x)|`.
    pub fn detailed_balance_residual(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for x in 0..n {
            for y in x + 1..n {
                let r = self.weights[x] * self.entries[(x, y)] - self.weights[y] * self.entries[(y, x)];
                worst = worst.max(r.abs());
            }
        }
        worst
    }

    /// The lazy version `(I + P) / 2`.
    pub fn lazy(&self) -> WeightedMatrix {
        let mut e = self.entries.clone();
        e.scale(0.5);
        for i in 0..self.n() {
            e[(i, i)] += 0.5;
        }
        WeightedMatrix {
            entries: e,
            weights: self.weights.clone(),
            kind: self.kind,
            symmetry: self.symmetry.clone(),
        }
    }

    /// The rank-one stochastic matrix whose rows all equal the weights.
    pub fn stationary(weights: Vec<f64>) -> WeightedMatrix {
        let n = weights.len();
        let mut e = DenseMatrix::zeros(n, n);
        for i in 0..n {
            e.row_mut(i).copy_from_slice(&weights);
        }
        WeightedMatrix::stochastic(e, weights)
    }

    /// `self - S_w`, as a general operator.
    pub fn minus_stationary(&self) -> WeightedMatrix {
        let mut e = self.entries.clone();
        for i in 0..self.n() {
            for (x, w) in e.row_mut(i).iter_mut().zip(&self.weights) {
                *x -= w;
            }
        }
        WeightedMatrix {
            entries: e,
            weights: self.weights.clone(),
            kind: MatrixKind::General,
            symmetry: self.symmetry.clone(),
        }
    }
}

/// The random-cluster chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dynamics {
    Sw,
    Hb,
    Sb,
    LazySb,
}

impl Dynamics {
    pub fn name(self) -> &'static str {
        match self {
            Dynamics::Sw => "sw",
            Dynamics::Hb => "hb",
            Dynamics::Sb => "sb",
            Dynamics::LazySb => "lazy-sb",
        }
    }
}

impl fmt::Display for Dynamics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dynamics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sw" => Dynamics::Sw,
            "hb" => Dynamics::Hb,
            "sb" => Dynamics::Sb,
            "lazy-sb" => Dynamics::LazySb,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown dynamics `{other}` (expected sw, hb, sb or lazy-sb)"
                )))
            }
        })
    }
}

/// Builds the exact transition matrix of a chain.
pub fn transition_matrix(
    g: &Graph,
    params: &ModelParams,
    dynamics: Dynamics,
    caps: &Caps,
) -> Result<WeightedMatrix> {
    Ok(match dynamics {
        Dynamics::Sw => sw_matrix_direct(g, params, caps)?,
        Dynamics::Hb => hb_matrix(g, params, caps)?,
        Dynamics::Sb => sb_matrix(g, params, caps)?,
        Dynamics::LazySb => sb_matrix(g, params, caps)?.lazy(),
    })
}

/// Symmetry hint for random-cluster matrices, skipped for small spaces.
pub(crate) fn rc_symmetry(g: &Graph) -> Option<Arc<StateSymmetry>> {
    if g.n_edges() >= 8 {
        Some(Arc::new(StateSymmetry::for_graph(g)))
    } else {
        None
    }
}

pub(crate) fn rc_weights(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<Vec<f64>> {
    Ok(rc_distribution(g, params, caps)?.weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    #[test]
    fn lazy_examples() {
        let id = WeightedMatrix::stochastic(DenseMatrix::identity(3), vec![1.0 / 3.0; 3]);
        assert_eq!(id.lazy().entries, id.entries);
        let g = generate(Family::Edge, 1).unwrap();
        let params = ModelParams::new(0.5, 2).unwrap();
        let sb = sb_matrix(&g, &params, &Caps::default()).unwrap().lazy();
        assert!((sb.get(0, 0) - 7.0 / 8.0).abs() < 1e-15);
        assert!((sb.get(0, 1) - 1.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn dynamics_names_parse() {
        for d in [Dynamics::Sw, Dynamics::Hb, Dynamics::Sb, Dynamics::LazySb] {
            assert_eq!(d.name().parse::<Dynamics>().unwrap(), d);
        }
        assert!("glauber".parse::<Dynamics>().is_err());
    }

    #[test]
    fn stationary_minus_itself_vanishes() {
        let s = WeightedMatrix::stationary(vec![0.25, 0.75]);
        assert_eq!(s.minus_stationary().entries.max_abs(), 0.0);
        assert_eq!(s.row_sum_error(), 0.0);
    }
}
