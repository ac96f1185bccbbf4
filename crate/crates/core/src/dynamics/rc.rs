use super::{rc_symmetry, rc_weights, WeightedMatrix};
use crate::graph::{DisjointSets, EdgeSubset, Graph};
use crate::linalg::DenseMatrix;
use crate::measures::ModelParams;
use crate::{Caps, Result};

/// Swendsen-Wang transition matrix built procedurally, row by row.
///
/// Row `A`: every coloring of the components of `(V, A)` has weight
/// `q^{-c(A)}`; each yields the monochromatic set `E(σ)`, whose mass is then
/// spread over the subsets `B ⊆ E(σ)` with weight `p^{|B|} (1-p)^{|E(σ)|-|B|}`.
pub fn sw_matrix_direct(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<WeightedMatrix> {
    let states = caps.check_states(g.n_edges())?;
    let weights = rc_weights(g, params, caps)?;
    let m = g.n_edges();
    let q = params.q() as usize;
    let p = params.p();
    let mut entries = DenseMatrix::zeros(states, states);
    let mut dsu = DisjointSets::default();
    let mut colors: Vec<usize> = Vec::new();
    for a in 0..states {
        dsu.reset(g.n_vertices());
        for e in EdgeSubset(a as u64).iter() {
            let (u, v) = g.edge(e);
            dsu.union(u, v);
        }
        let labels = dsu.labels();
        let c = dsu.count();
        let mut inside = 0u64;
        let mut cross = Vec::new();
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            if labels[u] == labels[v] {
                inside |= 1 << i;
            } else {
                cross.push((i, labels[u], labels[v]));
            }
        }
        let row = entries.row_mut(a);
        colors.clear();
        colors.resize(c, 0);
        loop {
            let mut mono = inside;
            for &(i, lu, lv) in &cross {
                if colors[lu] == colors[lv] {
                    mono |= 1 << i;
                }
            }
            row[mono as usize] += 1.0;
            let mut k = 0;
            while k < c {
                colors[k] += 1;
                if colors[k] < q {
                    break;
                }
                colors[k] = 0;
                k += 1;
            }
            if k == c {
                break;
            }
        }
        let norm = (q as f64).powi(-(c as i32));
        row.iter_mut().for_each(|x| *x *= norm);
        // thin every kept set edge by edge
        for bit in 0..m {
            let b = 1usize << bit;
            for s in 0..states {
                if s & b != 0 && row[s] != 0.0 {
                    let w = row[s];
                    row[s ^ b] += (1.0 - p) * w;
                    row[s] = p * w;
                }
            }
        }
    }
    Ok(WeightedMatrix::stochastic(entries, weights).with_symmetry(rc_symmetry(g)))
}

/// Endpoints of edge `e` connected in `(V, A)`; self-loops always are.
fn endpoints_connected(g: &Graph, dsu: &mut DisjointSets, e: usize) -> bool {
    let (u, v) = g.edge(e);
    u == v || dsu.find(u) == dsu.find(v)
}

fn components_of(g: &Graph, dsu: &mut DisjointSets, a: EdgeSubset) {
    dsu.reset(g.n_vertices());
    for e in a.iter() {
        let (u, v) = g.edge(e);
        dsu.union(u, v);
    }
}

/// Heat-bath transition matrix (lazy, prefactor `1/(2|E|)`); connectivity
/// for edge `e` is evaluated in `(V, A \ e)`.
pub fn hb_matrix(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<WeightedMatrix> {
    single_edge_matrix(g, params, caps, Rule::HeatBath)
}

/// Single-bond transition matrix (prefactor `1/|E|`); connectivity is
/// evaluated in `(V, A)`.
pub fn sb_matrix(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<WeightedMatrix> {
    single_edge_matrix(g, params, caps, Rule::SingleBond)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Rule {
    HeatBath,
    SingleBond,
}

fn single_edge_matrix(
    g: &Graph,
    params: &ModelParams,
    caps: &Caps,
    rule: Rule,
) -> Result<WeightedMatrix> {
    let states = caps.check_states(g.n_edges())?;
    let weights = rc_weights(g, params, caps)?;
    let m = g.n_edges();
    let (p, q) = (params.p(), params.qf());
    let mut entries = DenseMatrix::zeros(states, states);
    let mut dsu = DisjointSets::default();
    let (prefactor, open_apart, close_apart) = match rule {
        Rule::HeatBath => (
            0.5 / m as f64,
            p / (p + q * (1.0 - p)),
            q * (1.0 - p) / (p + q * (1.0 - p)),
        ),
        Rule::SingleBond => (1.0 / m as f64, p / q, 1.0 - p / q),
    };
    for a in 0..states {
        let sa = EdgeSubset(a as u64);
        if rule == Rule::SingleBond {
            components_of(g, &mut dsu, sa);
        }
        let mut off = 0.0;
        for e in 0..m {
            if rule == Rule::HeatBath {
                components_of(g, &mut dsu, sa.without(e));
            }
            let connected = endpoints_connected(g, &mut dsu, e);
            let (target, prob) = if sa.contains(e) {
                let close = if connected { 1.0 - p } else { close_apart };
                (sa.without(e), close)
            } else {
                let open = if connected { p } else { open_apart };
                (sa.with(e), open)
            };
            let x = prefactor * prob;
            entries[(a, target.index())] += x;
            off += x;
        }
        entries[(a, a)] += 1.0 - off;
    }
    Ok(WeightedMatrix::stochastic(entries, weights).with_symmetry(rc_symmetry(g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    fn k2() -> Graph {
        generate(Family::Edge, 1).unwrap()
    }

    fn params(p: f64, q: u32) -> ModelParams {
        ModelParams::new(p, q).unwrap()
    }

    #[test]
    fn k2_sw_rows() {
        let sw = sw_matrix_direct(&k2(), &params(0.5, 2), &Caps::default()).unwrap();
        let want = [[0.75, 0.25], [0.5, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((sw.get(i, j) - want[i][j]).abs() < 1e-15);
            }
        }
        let sb = sb_matrix(&k2(), &params(0.5, 2), &Caps::default()).unwrap();
        assert!(sb.entries.max_abs_diff(&sw.entries) < 1e-15);
    }

    #[test]
    fn k2_hb_and_sb_entries() {
        let hb = hb_matrix(&k2(), &params(0.5, 2), &Caps::default()).unwrap();
        assert!((hb.get(0, 1) - 1.0 / 6.0).abs() < 1e-15);
        assert!((hb.get(1, 0) - 1.0 / 3.0).abs() < 1e-15);
        let sb = sb_matrix(&k2(), &params(0.5, 2), &Caps::default()).unwrap();
        assert!((sb.get(0, 1) - 0.25).abs() < 1e-15);
        assert!((sb.get(1, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn q1_sw_rows_are_bernoulli() {
        let g = generate(Family::Cycle, 3).unwrap();
        let sw = sw_matrix_direct(&g, &params(0.3, 1), &Caps::default()).unwrap();
        for a in 0..8 {
            for b in 0..8usize {
                let k = b.count_ones() as i32;
                let want = 0.3f64.powi(k) * 0.7f64.powi(3 - k);
                assert!((sw.get(a, b) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn stochastic_and_reversible_on_small_graphs() {
        let caps = Caps::default();
        for (g, pm) in [
            (generate(Family::Cycle, 3).unwrap(), params(0.3, 3)),
            (generate(Family::Path, 3).unwrap(), params(0.7, 2)),
            (generate(Family::Cycle, 4).unwrap(), params(0.4, 3)),
            (generate(Family::GridDual, 2).unwrap(), params(0.6, 2)),
            (Graph::new(3, vec![(0, 1), (1, 1), (1, 2), (2, 0), (0, 1)]).unwrap(), params(0.45, 3)),
        ] {
            for mat in [
                sw_matrix_direct(&g, &pm, &caps).unwrap(),
                hb_matrix(&g, &pm, &caps).unwrap(),
                sb_matrix(&g, &pm, &caps).unwrap(),
            ] {
                assert!(mat.row_sum_error() < 1e-12);
                assert!(mat.min_entry() >= -1e-15);
                assert!(mat.max_entry() <= 1.0 + 1e-15);
                assert!(mat.detailed_balance_residual() < 1e-14);
            }
        }
    }

    #[test]
    fn hb_is_lazy() {
        let g = generate(Family::Grid, 2).unwrap();
        let hb = hb_matrix(&g, &params(0.8, 3), &Caps::default()).unwrap();
        for a in 0..16 {
            assert!(hb.get(a, a) >= 0.5);
        }
    }

    #[test]
    fn sb_with_edge_present_uses_plain_p() {
        let g = generate(Family::Path, 3).unwrap();
        let sb = sb_matrix(&g, &params(0.3, 2), &Caps::default()).unwrap();
        // from {edge 0}, closing edge 0 has probability (1/m)(1-p)
        assert!((sb.get(0b01, 0b00) - 0.7 / 2.0).abs() < 1e-15);
        // opening edge 1 joins separate components: (1/m) p/q
        assert!((sb.get(0b01, 0b11) - 0.15 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn parallel_twin_keeps_endpoints_connected() {
        let g = Graph::new(2, vec![(0, 1), (0, 1)]).unwrap();
        let pm = params(0.5, 2);
        let hb = hb_matrix(&g, &pm, &Caps::default()).unwrap();
        // from {e0, e1}, removing e0 leaves e1: connected case, (1/4)(1-p)
        assert!((hb.get(0b11, 0b10) - 0.125).abs() < 1e-15);
        // from {e1}, e0's endpoints stay joined: opening uses (1/4) p
        assert!((hb.get(0b10, 0b11) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn caps_enforced() {
        let g = generate(Family::Grid, 4).unwrap();
        assert!(hb_matrix(&g, &params(0.5, 2), &Caps::default()).unwrap_err().is_cap());
    }
}
