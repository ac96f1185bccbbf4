use super::{rc_weights, WeightedMatrix};
use crate::graph::{EdgeSubset, Graph};
use crate::linalg::{CsrMatrix, DenseMatrix};
use crate::measures::{fkes_distribution, monochromatic_table, ModelParams};
use crate::{Caps, Result};

/// Indexed joint states `(σ, A)` with the joint-space operators.
///
/// Built either over every joint state or over the support of the joint
/// measure (`A ⊆ E(σ)`). The support is closed under every edge operator and
/// carries all the mass of the block `M`, so products `M ... M*` agree on
/// both.
#[derive(Debug, Clone)]
pub struct JointSpace {
    m: usize,
    q: u32,
    states: Vec<(usize, EdgeSubset)>,
    weights: Vec<f64>,
    rc_weights: Vec<f64>,
    /// `M` restricted to the indexed states, random-cluster rows.
    m_block: DenseMatrix,
    m_star: CsrMatrix,
    edges: Vec<CsrMatrix>,
    average: CsrMatrix,
}

impl JointSpace {
    /// Joint states in the support of the joint measure.
    pub fn support(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<Self> {
        Self::build(g, params, caps, true)
    }

    /// All `q^n 2^m` joint states.
    pub fn full(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<Self> {
        Self::build(g, params, caps, false)
    }

    fn build(g: &Graph, params: &ModelParams, caps: &Caps, support_only: bool) -> Result<Self> {
        let m = g.n_edges();
        let rc_states = caps.check_states(m)?;
        let nu = fkes_distribution(g, params, caps)?;
        let mono = monochromatic_table(g, params, caps)?;
        let mut states = Vec::new();
        let mut weights = Vec::new();
        let mut index = vec![u32::MAX; nu.len()];
        for (code, &e) in mono.iter().enumerate() {
            for bits in 0..rc_states as u64 {
                let a = EdgeSubset(bits);
                if support_only && !a.is_subset_of(e) {
                    continue;
                }
                let flat = (code << m) | bits as usize;
                index[flat] = states.len() as u32;
                states.push((code, a));
                weights.push(nu.weights[flat]);
            }
        }
        let rc_w = rc_weights(g, params, caps)?;
        let qf = params.qf();
        let c_inv: Vec<f64> = (0..rc_states as u64)
            .map(|b| qf.powi(-(g.count_components(EdgeSubset(b)) as i32)))
            .collect();
        let mut m_block = DenseMatrix::zeros(rc_states, states.len());
        let mut star_rows = Vec::with_capacity(states.len());
        for (x, &(code, a)) in states.iter().enumerate() {
            if a.is_subset_of(mono[code]) {
                m_block[(a.index(), x)] = c_inv[a.index()];
            }
            star_rows.push(vec![(a.index(), 1.0)]);
        }
        let m_star = CsrMatrix::from_rows(rc_states, star_rows);
        let p = params.p();
        let lookup = |code: usize, a: EdgeSubset| index[(code << m) | a.index()] as usize;
        let edges: Vec<CsrMatrix> = (0..m)
            .map(|e| {
                let rows = states
                    .iter()
                    .map(|&(code, a)| {
                        if mono[code].contains(e) {
                            vec![(lookup(code, a.with(e)), p), (lookup(code, a.without(e)), 1.0 - p)]
                        } else {
                            vec![(lookup(code, a.without(e)), 1.0)]
                        }
                    })
                    .collect();
                CsrMatrix::from_rows(states.len(), rows)
            })
            .collect();
        let average = average_of(&edges, states.len());
        Ok(JointSpace {
            m,
            q: params.q(),
            states,
            weights,
            rc_weights: rc_w,
            m_block,
            m_star,
            edges,
            average,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n_edges(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `(spin code, subset)` of a local index.
    pub fn state(&self, x: usize) -> (usize, EdgeSubset) {
        self.states[x]
    }

    /// Flat joint index `code * 2^m + bits`.
    pub fn flat(&self, x: usize) -> usize {
        let (code, a) = self.states[x];
        (code << self.m) | a.index()
    }

    /// Joint measure on the indexed states.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Random-cluster measure.
    pub fn rc_weights(&self) -> &[f64] {
        &self.rc_weights
    }

    pub fn m_block(&self) -> &DenseMatrix {
        &self.m_block
    }

    pub fn m_star(&self) -> &CsrMatrix {
        &self.m_star
    }

    pub fn edge(&self, e: usize) -> &CsrMatrix {
        &self.edges[e]
    }

    /// `|E|^{-1} Σ_e T_e`.
    pub fn average(&self) -> &CsrMatrix {
        &self.average
    }

    /// Wraps a joint-space operator with the joint measure.
    pub fn weighted(&self, k: &CsrMatrix, kind: super::MatrixKind) -> WeightedMatrix {
        let dense = k.to_dense();
        match kind {
            super::MatrixKind::Stochastic => WeightedMatrix::stochastic(dense, self.weights.clone()),
            super::MatrixKind::General => WeightedMatrix::general(dense, self.weights.clone()),
        }
    }

    /// `M* M` on the joint space.
    pub fn m_star_m(&self) -> CsrMatrix {
        self.m_star.matmul(&CsrMatrix::from_dense(&self.m_block))
    }

    /// `M (T_{e_1} ... T_{e_k}) M*` for the given edge sequence.
    pub fn rc_product(&self, order: &[usize]) -> DenseMatrix {
        let mut x = self.m_block.clone();
        for &e in order {
            x = CsrMatrix::dense_mul(&x, &self.edges[e]);
        }
        CsrMatrix::dense_mul(&x, &self.m_star)
    }

    /// `M T^k M*` for `k = 0..=k_max`, with `T` the averaged edge operator.
    pub fn rc_powers(&self, k_max: usize) -> Vec<DenseMatrix> {
        let mut out = Vec::with_capacity(k_max + 1);
        let mut x = self.m_block.clone();
        for k in 0..=k_max {
            if k > 0 {
                x = CsrMatrix::dense_mul(&x, &self.average);
            }
            out.push(CsrMatrix::dense_mul(&x, &self.m_star));
        }
        out
    }

    /// Subtracts `S_μ` and wraps with the random-cluster weights.
    pub fn centered(&self, mut k: DenseMatrix) -> WeightedMatrix {
        for i in 0..k.rows() {
            for (x, w) in k.row_mut(i).iter_mut().zip(&self.rc_weights) {
                *x -= w;
            }
        }
        WeightedMatrix::general(k, self.rc_weights.clone())
    }
}

fn average_of(edges: &[CsrMatrix], n: usize) -> CsrMatrix {
    if edges.is_empty() {
        return CsrMatrix::identity(n);
    }
    let rows = (0..n)
        .map(|x| {
            let mut r = Vec::new();
            for t in edges {
                let (idx, val) = t.row(x);
                r.extend(idx.iter().zip(val).map(|(&j, &v)| (j, v)));
            }
            r
        })
        .collect();
    let mut avg = CsrMatrix::from_rows(n, rows);
    avg.scale(1.0 / edges.len() as f64);
    avg
}

/// `M`: random-cluster to joint block over the full joint space,
/// `M(B, (σ, A)) = q^{-c(B)} 1(A = B) 1(B ⊆ E(σ))`.
pub fn block_m_dense(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<DenseMatrix> {
    let js = JointSpace::full(g, params, caps)?;
    Ok(block_m(&js))
}

/// `M*`: joint to random-cluster block over the full joint space,
/// `M*((σ, A), B) = 1(A = B)`.
pub fn block_m_star_dense(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<DenseMatrix> {
    let js = JointSpace::full(g, params, caps)?;
    Ok(block_m_star(&js))
}

/// `M` over the states of `js`.
pub fn block_m(js: &JointSpace) -> DenseMatrix {
    js.m_block.clone()
}

/// `M*` over the states of `js`.
pub fn block_m_star(js: &JointSpace) -> DenseMatrix {
    js.m_star.to_dense()
}

/// Edge operator `T_e` over the states of `js`.
pub fn edge_operator(js: &JointSpace, e: usize) -> WeightedMatrix {
    js.weighted(&js.edges[e], super::MatrixKind::Stochastic)
}

/// All edge operators, in edge order.
pub fn edge_operators(js: &JointSpace) -> &[CsrMatrix] {
    &js.edges
}

/// `P_SW = M (Π_e T_e) M*` with the product in edge-index order.
pub fn sw_matrix_operator(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<WeightedMatrix> {
    let js = JointSpace::support(g, params, caps)?;
    let order: Vec<usize> = (0..g.n_edges()).collect();
    Ok(WeightedMatrix::stochastic(js.rc_product(&order), js.rc_weights.clone()))
}

/// `P_SB = M (|E|^{-1} Σ_e T_e) M*`.
pub fn sb_matrix_operator(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<WeightedMatrix> {
    let js = JointSpace::support(g, params, caps)?;
    let mut powers = js.rc_powers(1);
    Ok(WeightedMatrix::stochastic(powers.pop().unwrap(), js.rc_weights.clone()))
}

/// Which operator sits between `M` and `M*` in a centered composite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Composite {
    /// `T^k` for the averaged edge operator.
    Power(usize),
    /// The full product `Π_e T_e`.
    FullProduct,
}

/// `M K M* - S_μ` for `K = T^k` or `K = Π_e T_e`.
pub fn composite_rtr(
    g: &Graph,
    params: &ModelParams,
    caps: &Caps,
    which: Composite,
) -> Result<WeightedMatrix> {
    let js = JointSpace::support(g, params, caps)?;
    let k = match which {
        Composite::Power(k) => js.rc_powers(k).pop().unwrap(),
        Composite::FullProduct => js.rc_product(&(0..g.n_edges()).collect::<Vec<_>>()),
    };
    Ok(js.centered(k))
}

#[cfg(test)]
mod tests {
    use super::super::{sb_matrix, sw_matrix_direct};
    use super::*;
    use crate::graph::{generate, Family};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(p: f64, q: u32) -> ModelParams {
        ModelParams::new(p, q).unwrap()
    }

    fn self_adjoint_residual(k: &CsrMatrix, w: &[f64]) -> f64 {
        let d = k.to_dense();
        let mut worst = 0.0f64;
        for x in 0..w.len() {
            for y in 0..w.len() {
                worst = worst.max((w[x] * d[(x, y)] - w[y] * d[(y, x)]).abs());
            }
        }
        worst
    }

    #[test]
    fn k2_block_m_rows() {
        let g = generate(Family::Edge, 1).unwrap();
        let m = block_m_dense(&g, &params(0.5, 2), &Caps::default()).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 8));
        let row: Vec<f64> = m.row(1).iter().copied().filter(|&x| x != 0.0).collect();
        assert_eq!(row, vec![0.5, 0.5]);
        let star = block_m_star_dense(&g, &params(0.5, 2), &Caps::default()).unwrap();
        assert!(m.matmul(&star).max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn m_is_stochastic_and_m_mstar_is_identity() {
        let caps = Caps::default();
        let g = generate(Family::Path, 3).unwrap();
        for js in [
            JointSpace::support(&g, &params(0.4, 3), &caps).unwrap(),
            JointSpace::full(&g, &params(0.4, 3), &caps).unwrap(),
        ] {
            for s in js.m_block().row_sums() {
                assert!((s - 1.0).abs() < 1e-12);
            }
            let mm = CsrMatrix::dense_mul(js.m_block(), js.m_star());
            assert!(mm.max_abs_diff(&DenseMatrix::identity(4)) < 1e-15);
        }
    }

    #[test]
    fn edge_operator_cases_and_projection() {
        let caps = Caps::default();
        let g = generate(Family::Edge, 1).unwrap();
        let js = JointSpace::full(&g, &params(0.5, 2), &caps).unwrap();
        let t = js.edge(0);
        for x in 0..js.len() {
            let (code, a) = js.state(x);
            let (idx, val) = t.row(x);
            if code == 1 || code == 2 {
                assert_eq!(val, &[1.0]);
                assert_eq!(js.state(idx[0]), (code, a.without(0)));
            } else {
                assert_eq!(idx.len(), 2);
            }
        }
        assert!(t.matmul(t).to_dense().max_abs_diff(&t.to_dense()) < 1e-15);
    }

    #[test]
    fn edge_operators_commute_and_are_self_adjoint() {
        let caps = Caps::default();
        let g = generate(Family::Path, 3).unwrap();
        let js = JointSpace::support(&g, &params(0.3, 2), &caps).unwrap();
        let (a, b) = (js.edge(0), js.edge(1));
        let ab = a.matmul(b).to_dense();
        assert!(ab.max_abs_diff(&b.matmul(a).to_dense()) < 1e-15);
        for e in 0..2 {
            assert!(self_adjoint_residual(js.edge(e), js.weights()) < 1e-13);
        }
        assert!(self_adjoint_residual(&js.m_star_m(), js.weights()) < 1e-13);
    }

    #[test]
    fn operator_forms_match_direct() {
        let caps = Caps::default();
        for g in [
            generate(Family::Edge, 1).unwrap(),
            generate(Family::Path, 3).unwrap(),
            generate(Family::Cycle, 3).unwrap(),
            generate(Family::Grid, 2).unwrap(),
        ] {
            for p in [0.2, 0.5, 0.8] {
                for q in [2, 3] {
                    let pm = params(p, q);
                    let direct = sw_matrix_direct(&g, &pm, &caps).unwrap();
                    let op = sw_matrix_operator(&g, &pm, &caps).unwrap();
                    assert!(direct.entries.max_abs_diff(&op.entries) < 1e-12);
                    let sb = sb_matrix(&g, &pm, &caps).unwrap();
                    let sb_op = sb_matrix_operator(&g, &pm, &caps).unwrap();
                    assert!(sb.entries.max_abs_diff(&sb_op.entries) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn product_order_is_immaterial() {
        let g = generate(Family::Grid, 2).unwrap();
        let js = JointSpace::support(&g, &params(0.35, 3), &Caps::default()).unwrap();
        let fwd = js.rc_product(&[0, 1, 2, 3]);
        let rev = js.rc_product(&[3, 2, 1, 0]);
        assert!(fwd.max_abs_diff(&rev) < 1e-15);
    }

    #[test]
    fn repeated_factors_collapse() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in [generate(Family::Edge, 1).unwrap(), generate(Family::Path, 3).unwrap()] {
            let js = JointSpace::support(&g, &params(0.6, 2), &Caps::default()).unwrap();
            for _ in 0..5 {
                let alpha: Vec<usize> = (0..g.n_edges()).map(|_| rng.random_range(0..4)).collect();
                let mut seq = Vec::new();
                let mut support = Vec::new();
                for (e, &k) in alpha.iter().enumerate() {
                    seq.extend(std::iter::repeat_n(e, k));
                    if k > 0 {
                        support.push(e);
                    }
                }
                assert!(js.rc_product(&seq).max_abs_diff(&js.rc_product(&support)) < 1e-15);
            }
        }
    }

    #[test]
    fn composites() {
        let caps = Caps::default();
        let g = generate(Family::Path, 3).unwrap();
        let pm = params(0.45, 2);
        let sb = sb_matrix(&g, &pm, &caps).unwrap().minus_stationary();
        let k1 = composite_rtr(&g, &pm, &caps, Composite::Power(1)).unwrap();
        assert!(k1.entries.max_abs_diff(&sb.entries) < 1e-12);
        let sw = sw_matrix_direct(&g, &pm, &caps).unwrap().minus_stationary();
        let full = composite_rtr(&g, &pm, &caps, Composite::FullProduct).unwrap();
        assert!(full.entries.max_abs_diff(&sw.entries) < 1e-12);
        let k0 = composite_rtr(&g, &pm, &caps, Composite::Power(0)).unwrap();
        let id = WeightedMatrix::stochastic(DenseMatrix::identity(4), k0.weights.clone());
        assert!(k0.entries.max_abs_diff(&id.minus_stationary().entries) < 1e-15);
    }

    #[test]
    fn joint_cap_enforced() {
        let g = generate(Family::Grid, 3).unwrap();
        let err = JointSpace::support(&g, &params(0.5, 2), &Caps::default()).unwrap_err();
        assert!(err.to_string().contains("--cap-joint"));
    }
}
