//! Exact spectral-gap laboratory for Markov chains on the random-cluster model.
//!
//! The crate builds the Swendsen-Wang, heat-bath and single-bond dynamics on
//! small multigraphs as dense transition matrices, checks the comparison
//! inequalities and operator identities between them, constructs planar
//! duals, and runs the same dynamics as Monte Carlo chains on large grids.
//!
//! Module map:
//! - [`graph`]: multigraphs, connectivity, rotation systems and planar duals.
//! - [`measures`]: random-cluster, Potts and joint (FKES) measures.
//! - [`dynamics`]: exact transition matrices and the joint-space building blocks.
//! - [`spectral`]: spectral gaps, weighted operator norms and mixing times.
//! - [`verify`]: the check catalogue and the suite runner.
//! - [`sampler`]: Monte Carlo chains, observables and autocorrelation.

pub mod dynamics;
mod error;
pub mod graph;
pub mod linalg;
pub mod measures;
pub mod sampler;
pub mod spectral;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{EdgeSubset, Graph, GraphSpec};
pub use measures::ModelParams;

/// Version string written into every report and CSV header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// State-space limits for the exact (enumerating) computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of random-cluster states `2^m`.
    pub states: usize,
    /// Maximum number of joint states `q^n * 2^m`.
    pub joint: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            states: 4096,
            joint: 300_000,
        }
    }
}

impl Caps {
    /// Fails unless `2^m` fits under the state cap.
    pub fn check_states(&self, m: usize) -> Result<usize> {
        let size = checked_pow(2, m as u32);
        match size {
            Some(s) if s <= self.states as u128 => Ok(s as usize),
            _ => Err(Error::CapExceeded {
                space: "random-cluster",
                size: format!("2^{m}"),
                cap: self.states,
                flag: "--cap-states",
            }),
        }
    }

    /// Fails unless `q^n * 2^m` fits under the joint cap.
    pub fn check_joint(&self, n: usize, m: usize, q: u32) -> Result<usize> {
        let size = checked_pow(q as u128, n as u32)
            .and_then(|a| checked_pow(2, m as u32).and_then(|b| a.checked_mul(b)));
        match size {
            Some(s) if s <= self.joint as u128 => Ok(s as usize),
            _ => Err(Error::CapExceeded {
                space: "joint",
                size: format!("{q}^{n}*2^{m}"),
                cap: self.joint,
                flag: "--cap-joint",
            }),
        }
    }
}

fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    base.checked_pow(exp)
}
