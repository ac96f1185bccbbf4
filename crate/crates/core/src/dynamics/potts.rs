use super::WeightedMatrix;
use crate::graph::{DisjointSets, EdgeSubset, Graph};
use crate::linalg::DenseMatrix;
use crate::measures::{monochromatic_table, potts_distribution, ModelParams};
use crate::{Caps, Error, Result};

/// Swendsen-Wang chain on spin configurations: keep each monochromatic edge
/// with probability `p`, then recolor the resulting components uniformly.
///
/// `P(σ, τ) = Σ_{A ⊆ E(σ) ∩ E(τ)} p^{|A|} (1-p)^{|E(σ)|-|A|} q^{-c(A)}`.
pub fn sw_potts_matrix(g: &Graph, params: &ModelParams, caps: &Caps) -> Result<WeightedMatrix> {
    let n = g.n_vertices();
    let q = params.q() as usize;
    let size = (q as u128).checked_pow(n as u32).filter(|&s| s <= caps.states as u128);
    let Some(size) = size else {
        return Err(Error::CapExceeded {
            space: "Potts",
            size: format!("{q}^{n}"),
            cap: caps.states,
            flag: "--cap-states",
        });
    };
    let size = size as usize;
    let mono = monochromatic_table(g, params, caps)?;
    let weights = potts_distribution(g, params, caps)?.weights;
    let p = params.p();
    let place: Vec<usize> = (0..n).map(|v| q.pow(v as u32)).collect();
    let mut entries = DenseMatrix::zeros(size, size);
    let mut dsu = DisjointSets::default();
    let mut colors = Vec::new();
    for sigma in 0..size {
        let e_sigma = mono[sigma];
        let k = e_sigma.len() as i32;
        let row = entries.row_mut(sigma);
        // submasks of E(σ), including the empty set
        let mut a = e_sigma.0;
        loop {
            let sub = EdgeSubset(a);
            dsu.reset(n);
            for e in sub.iter() {
                let (u, v) = g.edge(e);
                dsu.union(u, v);
            }
            let labels = dsu.labels();
            let c = dsu.count();
            let keep = sub.len() as i32;
            let w = p.powi(keep) * (1.0 - p).powi(k - keep) * (q as f64).powi(-(c as i32));
            colors.clear();
            colors.resize(c, 0usize);
            loop {
                let tau: usize = (0..n).map(|v| colors[labels[v]] * place[v]).sum();
                row[tau] += w;
                let mut j = 0;
                while j < c {
                    colors[j] += 1;
                    if colors[j] < q {
                        break;
                    }
                    colors[j] = 0;
                    j += 1;
                }
                if j == c {
                    break;
                }
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & e_sigma.0;
        }
    }
    Ok(WeightedMatrix::stochastic(entries, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    #[test]
    fn k2_rows() {
        let g = generate(Family::Edge, 1).unwrap();
        let params = ModelParams::new(0.5, 2).unwrap();
        let pm = sw_potts_matrix(&g, &params, &Caps::default()).unwrap();
        // from a constant coloring: keep the edge (1/2) -> constant recolor,
        // drop it (1/2) -> independent recolor
        let row0 = [0.375, 0.125, 0.125, 0.375];
        // from a split coloring: always independent recolor
        let row1 = [0.25; 4];
        for j in 0..4 {
            assert!((pm.get(0, j) - row0[j]).abs() < 1e-15);
            assert!((pm.get(1, j) - row1[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn stochastic_and_reversible() {
        let g = generate(Family::Cycle, 3).unwrap();
        let params = ModelParams::new(0.6, 2).unwrap();
        let pm = sw_potts_matrix(&g, &params, &Caps::default()).unwrap();
        assert!(pm.row_sum_error() < 1e-12);
        assert!(pm.detailed_balance_residual() < 1e-14);
    }
}
