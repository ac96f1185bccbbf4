//! Graph automorphisms acting on random-cluster states, used to split
//! invariant symmetric matrices into independent blocks.
//!
//! The group is an elementary abelian 2-group generated by pairwise
//! commuting involutive automorphisms, so its irreducible characters are the
//! signs `(-1)^{popcount(s & b)}` and every invariant matrix decomposes into
//! one block per character.

use crate::graph::{automorphisms, DisjointSets, EdgePermutation, EdgeSubset, Graph};
use crate::linalg::DenseMatrix;

/// Upper bound on the group order.
pub const MAX_GROUP_ORDER: usize = 64;
const AUTOMORPHISM_LIMIT: usize = 4096;
/// Automorphisms kept for orbit representatives.
const MAX_LISTED: usize = 64;

/// A commuting-involution group acting on the `2^m` edge subsets.
#[derive(Debug, Clone)]
pub struct StateSymmetry {
    states: usize,
    /// `maps[b][x]`: image of state `x` under group element `b`.
    maps: Vec<Vec<u32>>,
    /// State maps of the listed automorphisms, not necessarily commuting.
    autos: Vec<Vec<u32>>,
    /// One state per orbit of the group generated by `autos`.
    starts: Vec<usize>,
}

struct Orbit {
    rep: usize,
    /// Distinct members with one group element reaching each.
    members: Vec<(usize, usize)>,
    stabilizer: Vec<usize>,
}

impl StateSymmetry {
    /// The trivial group.
    pub fn trivial(states: usize) -> Self {
        StateSymmetry {
            states,
            maps: vec![(0..states as u32).collect()],
            autos: Vec::new(),
            starts: (0..states).collect(),
        }
    }

    /// Largest commuting-involution group found greedily among the
    /// automorphisms of `g`, acting on all `2^m` states.
    pub fn for_graph(g: &Graph) -> Self {
        let m = g.n_edges();
        let states = 1usize << m;
        let all = automorphisms(g, AUTOMORPHISM_LIMIT);
        let autos: Vec<Vec<u32>> = all
            .iter()
            .filter(|a| !a.is_identity())
            .take(MAX_LISTED)
            .map(|a| state_map(a, states))
            .collect();
        let starts = orbit_starts(&autos, states);
        let mut candidates: Vec<EdgePermutation> = all
            .into_iter()
            .filter(|a| !a.is_identity() && a.is_involution())
            .collect();
        let moved = |a: &EdgePermutation| a.edges.iter().enumerate().filter(|(i, &j)| *i != j).count();
        candidates.sort_by_key(|a| moved(a));
        let ascending = greedy_group(&candidates);
        candidates.reverse();
        let descending = greedy_group(&candidates);
        let gens = if descending.len() > ascending.len() {
            descending
        } else {
            ascending
        };
        let mut maps = Vec::with_capacity(1 << gens.len());
        for b in 0..1usize << gens.len() {
            let mut perm = EdgePermutation {
                vertices: (0..g.n_vertices()).collect(),
                edges: (0..m).collect(),
            };
            for (i, gen) in gens.iter().enumerate() {
                if b >> i & 1 == 1 {
                    perm = gen.compose(&perm);
                }
            }
            maps.push(state_map(&perm, states));
        }
        StateSymmetry {
            states,
            maps,
            autos,
            starts,
        }
    }

    /// One state from each orbit under all listed automorphisms.
    pub fn orbit_starts(&self) -> &[usize] {
        &self.starts
    }

    /// Largest violation of `K(ax, ay) = K(x, y)` over the listed
    /// automorphisms (the ones behind [`StateSymmetry::orbit_starts`]).
    pub fn full_invariance_residual(&self, k: &DenseMatrix) -> f64 {
        self.autos.iter().fold(0.0, |w, map| w.max(map_residual(map, k)))
    }

    pub fn order(&self) -> usize {
        self.maps.len()
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn image(&self, element: usize, x: usize) -> usize {
        self.maps[element][x] as usize
    }

    /// Largest violation of `K(gx, gy) = K(x, y)` over the generators.
    pub fn invariance_residual(&self, k: &DenseMatrix) -> f64 {
        assert_eq!(k.rows(), self.states);
        let mut worst = 0.0f64;
        let mut b = 1;
        while b < self.order() {
            worst = worst.max(map_residual(&self.maps[b], k));
            b <<= 1;
        }
        worst
    }

    fn orbits(&self) -> Vec<Orbit> {
        let mut seen = vec![false; self.states];
        let mut out = Vec::new();
        for x in 0..self.states {
            if seen[x] {
                continue;
            }
            let mut members: Vec<(usize, usize)> = Vec::new();
            let mut stabilizer = Vec::new();
            for b in 0..self.order() {
                let y = self.maps[b][x] as usize;
                if y == x {
                    stabilizer.push(b);
                }
                if !seen[y] {
                    seen[y] = true;
                    members.push((y, b));
                }
            }
            out.push(Orbit {
                rep: x,
                members,
                stabilizer,
            });
        }
        out
    }

    /// Character blocks of a symmetric invariant matrix.
    ///
    /// The eigenvalues of the blocks, taken together, are the eigenvalues of
    /// `k`. The caller must make sure `k` is invariant.
    pub fn blocks(&self, k: &DenseMatrix) -> Vec<DenseMatrix> {
        let orbits = self.orbits();
        let sign = |s: usize, b: usize| if (s & b).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let mut out = Vec::with_capacity(self.order());
        for s in 0..self.order() {
            let valid: Vec<&Orbit> = orbits
                .iter()
                .filter(|o| o.stabilizer.iter().all(|&b| (s & b).count_ones() % 2 == 0))
                .collect();
            let d = valid.len();
            let mut block = DenseMatrix::zeros(d, d);
            for (i, o1) in valid.iter().enumerate() {
                let row = k.row(o1.rep);
                let size1 = o1.members.len() as f64;
                for (j, o2) in valid.iter().enumerate() {
                    let mut acc = 0.0;
                    for &(y, b) in &o2.members {
                        acc += sign(s, b) * row[y];
                    }
                    block[(i, j)] = (size1 / o2.members.len() as f64).sqrt() * acc;
                }
            }
            for i in 0..d {
                for j in 0..i {
                    let avg = 0.5 * (block[(i, j)] + block[(j, i)]);
                    block[(i, j)] = avg;
                    block[(j, i)] = avg;
                }
            }
            out.push(block);
        }
        out
    }
}

fn commutes(a: &EdgePermutation, b: &EdgePermutation) -> bool {
    a.compose(b) == b.compose(a)
}

fn greedy_group(candidates: &[EdgePermutation]) -> Vec<EdgePermutation> {
    let mut gens: Vec<EdgePermutation> = Vec::new();
    let mut elements: Vec<Vec<usize>> = match candidates.first() {
        Some(c) => vec![(0..c.edges.len()).collect()],
        None => return gens,
    };
    let mut members: Vec<EdgePermutation> = vec![EdgePermutation {
        vertices: (0..candidates[0].vertices.len()).collect(),
        edges: elements[0].clone(),
    }];
    for c in candidates {
        if members.len() * 2 > MAX_GROUP_ORDER {
            break;
        }
        if elements.contains(&c.edges) || !gens.iter().all(|g| commutes(g, c)) {
            continue;
        }
        let new: Vec<EdgePermutation> = members.iter().map(|m| c.compose(m)).collect();
        elements.extend(new.iter().map(|m| m.edges.clone()));
        members.extend(new);
        gens.push(c.clone());
    }
    gens
}

fn state_map(perm: &EdgePermutation, states: usize) -> Vec<u32> {
    (0..states as u64)
        .map(|x| perm.apply(EdgeSubset(x)).0 as u32)
        .collect()
}

fn map_residual(map: &[u32], k: &DenseMatrix) -> f64 {
    let mut worst = 0.0f64;
    for x in 0..k.rows() {
        let row = k.row(x);
        let grow = k.row(map[x] as usize);
        for (y, &v) in row.iter().enumerate() {
            worst = worst.max((grow[map[y] as usize] - v).abs());
        }
    }
    worst
}

/// Smallest state of each orbit under the group generated by `maps`.
fn orbit_starts(maps: &[Vec<u32>], states: usize) -> Vec<usize> {
    let mut dsu = DisjointSets::new(states);
    for map in maps {
        for (x, &y) in map.iter().enumerate() {
            dsu.union(x, y as usize);
        }
    }
    let mut seen = vec![false; states];
    let mut reps = Vec::new();
    for x in 0..states {
        let r = dsu.find(x);
        if !seen[r] {
            seen[r] = true;
            reps.push(x);
        }
    }
    reps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};
    use crate::linalg::symmetric_eigenvalues;

    /// Symmetric matrix invariant under the group: a function of the pair
    /// of subset sizes and component counts.
    fn invariant_matrix(g: &Graph) -> DenseMatrix {
        let n = 1usize << g.n_edges();
        let mut k = DenseMatrix::zeros(n, n);
        for x in 0..n {
            for y in 0..n {
                let (a, b) = (EdgeSubset(x as u64), EdgeSubset(y as u64));
                let inter = EdgeSubset(a.0 & b.0);
                k[(x, y)] = ((a.len() + b.len()) as f64).sin() * 0.1
                    + (g.count_components(inter) as f64).cos() * 0.01
                    + if x == y { 1.0 } else { 0.0 };
            }
        }
        k
    }

    #[test]
    fn group_orders_found() {
        assert_eq!(StateSymmetry::for_graph(&generate(Family::Grid, 3).unwrap()).order(), 4);
        assert_eq!(StateSymmetry::for_graph(&generate(Family::GridDual, 3).unwrap()).order(), 16);
        assert_eq!(StateSymmetry::for_graph(&generate(Family::Edge, 1).unwrap()).order(), 1);
        assert_eq!(StateSymmetry::for_graph(&generate(Family::Complete, 4).unwrap()).order(), 4);
    }

    #[test]
    fn blocks_preserve_spectrum() {
        for g in [
            generate(Family::Grid, 2).unwrap(),
            generate(Family::Complete, 4).unwrap(),
            generate(Family::GridDual, 2).unwrap(),
            generate(Family::Cycle, 5).unwrap(),
        ] {
            let sym = StateSymmetry::for_graph(&g);
            let k = invariant_matrix(&g);
            assert!(sym.invariance_residual(&k) < 1e-15);
            let mut from_blocks: Vec<f64> = sym
                .blocks(&k)
                .into_iter()
                .flat_map(symmetric_eigenvalues)
                .collect();
            from_blocks.sort_by(|a, b| b.total_cmp(a));
            let full = symmetric_eigenvalues(k);
            assert_eq!(from_blocks.len(), full.len());
            for (a, b) in from_blocks.iter().zip(&full) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn detects_broken_invariance() {
        let g = generate(Family::Grid, 2).unwrap();
        let sym = StateSymmetry::for_graph(&g);
        let mut k = invariant_matrix(&g);
        k[(1, 2)] += 0.5;
        assert!(sym.invariance_residual(&k) > 0.1);
    }

    #[test]
    fn orbit_starts_of_the_square() {
        let g = generate(Family::Grid, 2).unwrap();
        let sym = StateSymmetry::for_graph(&g);
        // subsets of C4 up to the dihedral group: sizes 0,1,2(adjacent),2(opposite),3,4
        assert_eq!(sym.orbit_starts().len(), 6);
        assert_eq!(sym.orbit_starts()[0], 0);
        assert!(sym.full_invariance_residual(&invariant_matrix(&g)) < 1e-15);
        assert_eq!(StateSymmetry::trivial(5).orbit_starts().len(), 5);
    }
}
