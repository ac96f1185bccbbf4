//! Random-cluster, Potts and joint measures by exact enumeration, and the
//! dual-parameter algebra.
//!
//! State encodings: a random-cluster state is an [`EdgeSubset`] bitmask; a
//! spin configuration is a base-`q` integer whose digit `i` (vertex 0 least
//! significant) is the color of vertex `i` in `0..q`; a joint state
//! `(σ, A)` has flat index `code * 2^m + bits`.

use crate::graph::{EdgeSubset, Graph};
use crate::{Caps, Error, Result};

/// Model parameters: edge probability `p` in (0,1) and integer `q >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    p: f64,
    q: u32,
}

impl ModelParams {
    pub fn new(p: f64, q: u32) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParams(format!("p must lie in (0,1), got {p}")));
        }
        if q < 1 {
            return Err(Error::InvalidParams("q must be at least 1".into()));
        }
        Ok(ModelParams { p, q })
    }

    /// Parameters with `p` anywhere in `[0, 1]`. The endpoints are meaningful
    /// for simulation only; exact measures need `0 < p < 1`.
    pub fn closed(p: f64, q: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParams(format!("p must lie in [0,1], got {p}")));
        }
        if q < 1 {
            return Err(Error::InvalidParams("q must be at least 1".into()));
        }
        Ok(ModelParams { p, q })
    }

    /// Parameters from inverse temperature, `p = 1 - e^{-β}`.
    pub fn from_beta(beta: f64, q: u32) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "beta must be positive and finite, got {beta}"
            )));
        }
        Self::new(-(-beta).exp_m1(), q)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn qf(&self) -> f64 {
        self.q as f64
    }

    /// `β = -ln(1 - p)`.
    pub fn beta(&self) -> f64 {
        -(-self.p).ln_1p()
    }

    /// Edge odds `p / (1 - p)`.
    pub fn odds(&self) -> f64 {
        self.p / (1.0 - self.p)
    }

    /// Parameters at the dual point.
    pub fn dual(&self) -> ModelParams {
        ModelParams {
            p: dual_parameter(self.p, self.q),
            q: self.q,
        }
    }
}

/// A weight vector over an indexed state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub weights: Vec<f64>,
    pub total: f64,
}

impl Distribution {
    /// Normalizes log-weights by subtracting the maximum before exponentiating.
    fn from_log_weights(logs: Vec<f64>) -> (Self, f64) {
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut weights: Vec<f64> = logs
            .iter()
            .map(|&l| if l == f64::NEG_INFINITY { 0.0 } else { (l - max).exp() })
            .collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        (Distribution { weights, total: 1.0 }, max + total.ln())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn min_positive(&self) -> f64 {
        self.weights
            .iter()
            .copied()
            .filter(|&w| w > 0.0)
            .fold(f64::INFINITY, f64::min)
    }
}

/// `ln` of the unnormalized random-cluster weight `(p/(1-p))^{|A|} q^{c(A)}`.
pub fn rc_log_weight(g: &Graph, params: &ModelParams, a: EdgeSubset) -> f64 {
    a.len() as f64 * params.odds().ln() + g.count_components(a) as f64 * params.qf().ln()
}

/// Unnormalized random-cluster weight `(p/(1-p))^{|A|} q^{c(A)}`.
pub fn rc_weight(g: &Graph, params: &ModelParams, a: EdgeSubset) -> f64 {
    params.odds().powi(a.len() as i32) * params.qf().powi(g.count_components(a) as i32)
}

/// `ln Z` by enumeration of all edge subsets.
pub fn log_partition_function(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<f64> {
    let size = caps.check_states(g.n_edges())?;
    let logs = (0..size as u64)
        .map(|b| rc_log_weight(g, params, EdgeSubset(b)))
        .collect();
    Ok(Distribution::from_log_weights(logs).1)
}

/// Partition function `Z = Σ_A (p/(1-p))^{|A|} q^{c(A)}`.
pub fn partition_function(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<f64> {
    log_partition_function(g, params, caps).map(f64::exp)
}

/// Random-cluster measure on the `2^m` edge subsets.
pub fn rc_distribution(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<Distribution> {
    let size = caps.check_states(g.n_edges())?;
    let logs = (0..size as u64)
        .map(|b| rc_log_weight(g, params, EdgeSubset(b)))
        .collect();
    Ok(Distribution::from_log_weights(logs).0)
}

/// Decodes a spin code into colors `0..q`, vertex 0 first.
pub fn decode_spins(code: usize, n: usize, q: u32, out: &mut Vec<u32>) {
    out.clear();
    let mut c = code;
    for _ in 0..n {
        out.push((c % q as usize) as u32);
        c /= q as usize;
    }
}

pub fn encode_spins(spins: &[u32], q: u32) -> usize {
    spins.iter().rev().fold(0, |acc, &s| acc * q as usize + s as usize)
}

/// Monochromatic edges `E(σ)`; self-loops are always included.
pub fn monochromatic_edges(g: &Graph, spins: &[u32]) -> EdgeSubset {
    let mut bits = 0u64;
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        if spins[u] == spins[v] {
            bits |= 1 << i;
        }
    }
    EdgeSubset(bits)
}

/// Number of spin configurations `q^n`, checked against the joint cap.
pub fn spin_count(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<usize> {
    let n = g.n_vertices();
    match (params.q as u128).checked_pow(n as u32) {
        Some(s) if s <= caps.joint as u128 => Ok(s as usize),
        _ => Err(Error::CapExceeded {
            space: "Potts",
            size: format!("{}^{}", params.q, n),
            cap: caps.joint,
            flag: "--cap-joint",
        }),
    }
}

/// `E(σ)` for every spin code.
pub fn monochromatic_table(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<Vec<EdgeSubset>> {
    let count = spin_count(g, params, caps)?;
    let mut spins = Vec::with_capacity(g.n_vertices());
    Ok((0..count)
        .map(|code| {
            decode_spins(code, g.n_vertices(), params.q, &mut spins);
            monochromatic_edges(g, &spins)
        })
        .collect())
}

/// Potts measure `π(σ) ∝ exp(β · #monochromatic edges)` over `q^n` codes.
pub fn potts_distribution(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<Distribution> {
    let beta = params.beta();
    let logs = monochromatic_table(g, params, caps)?
        .into_iter()
        .map(|e| beta * e.len() as f64)
        .collect();
    Ok(Distribution::from_log_weights(logs).0)
}

/// Joint measure `ν(σ, A) ∝ (p/(1-p))^{|A|} 1(A ⊆ E(σ))` over `q^n · 2^m`
/// states with flat index `code * 2^m + bits`.
pub fn fkes_distribution(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<Distribution> {
    let m = g.n_edges();
    caps.check_joint(g.n_vertices(), m, params.q)?;
    let mono = monochromatic_table(g, params, caps)?;
    let lodds = params.odds().ln();
    let mut logs = Vec::with_capacity(mono.len() << m);
    for e in mono {
        for bits in 0..1u64 << m {
            let a = EdgeSubset(bits);
            logs.push(if a.is_subset_of(e) {
                a.len() as f64 * lodds
            } else {
                f64::NEG_INFINITY
            });
        }
    }
    Ok(Distribution::from_log_weights(logs).0)
}

/// Dual parameter `p* = q(1-p) / (p + q(1-p))`.
pub fn dual_parameter(p: f64, q: u32) -> f64 {
    let qf = q as f64;
    qf * (1.0 - p) / (p + qf * (1.0 - p))
}

/// Self-dual point `√q / (1 + √q)`.
pub fn self_dual(q: u32) -> f64 {
    let s = (q as f64).sqrt();
    s / (1.0 + s)
}

/// Critical inverse temperature `ln(1 + √q)`.
pub fn beta_c(q: u32) -> f64 {
    (q as f64).sqrt().ln_1p()
}
