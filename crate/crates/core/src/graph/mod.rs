//! Finite multigraphs, connectivity queries, rotation systems and planar duals.
//!
//! Edges keep their input order everywhere; edge `i` is bit `i` of an
//! [`EdgeSubset`]. Parallel edges and self-loops are allowed. Edge-end ids
//! follow the file format: end `2i` is the first endpoint of edge `i`, end
//! `2i + 1` the second.

mod automorphism;
mod dsu;
mod embedding;
mod families;
mod io;

use std::collections::VecDeque;

pub use automorphism::{automorphisms, canonical_certificate, EdgePermutation};
pub use dsu::DisjointSets;
pub use embedding::{dual_config, dual_graph, face_count, trace_faces, DualMap};
pub use families::{generate, Family, GraphSpec};
pub use io::{parse_graph, to_json, write_graph};

use crate::{Error, Result};

/// A subset of edges encoded as a bitmask over edge indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EdgeSubset(pub u64);

impl EdgeSubset {
    pub const EMPTY: EdgeSubset = EdgeSubset(0);

    /// All `m` edges.
    pub fn full(m: usize) -> Self {
        EdgeSubset(mask(m))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn contains(self, e: usize) -> bool {
        self.0 >> e & 1 == 1
    }

    #[inline]
    pub fn with(self, e: usize) -> Self {
        EdgeSubset(self.0 | 1 << e)
    }

    #[inline]
    pub fn without(self, e: usize) -> Self {
        EdgeSubset(self.0 & !(1 << e))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Complement within the `m`-bit mask.
    pub fn complement(self, m: usize) -> Self {
        EdgeSubset(!self.0 & mask(m))
    }

    pub fn is_subset_of(self, other: EdgeSubset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(e)
            }
        })
    }
}

#[inline]
pub(crate) fn mask(m: usize) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

/// Finite multigraph with an optional rotation system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    rotations: Option<Vec<Vec<usize>>>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} = ({u}, {v}) has an endpoint >= vertex count {n}"
                )));
            }
        }
        Ok(Graph {
            n,
            edges,
            rotations: None,
        })
    }

    /// Attaches a rotation system: for each vertex, its edge-end ids in
    /// counterclockwise order.
    pub fn with_rotations(mut self, rotations: Vec<Vec<usize>>) -> Result<Self> {
        self.validate_rotations(&rotations)?;
        self.rotations = Some(rotations);
        Ok(self)
    }

    fn validate_rotations(&self, rotations: &[Vec<usize>]) -> Result<()> {
        if rotations.len() != self.n {
            return Err(Error::parse(
                "rotations",
                format!("expected {} cycles, found {}", self.n, rotations.len()),
            ));
        }
        let mut seen = vec![false; 2 * self.edges.len()];
        for (v, cycle) in rotations.iter().enumerate() {
            for &end in cycle {
                if end >= seen.len() {
                    return Err(Error::parse(
                        format!("rotations[{v}]"),
                        format!("edge-end {end} out of range (2m = {})", seen.len()),
                    ));
                }
                if seen[end] {
                    return Err(Error::parse(
                        format!("rotations[{v}]"),
                        format!("edge-end {end} appears more than once"),
                    ));
                }
                seen[end] = true;
                if self.end_vertex(end) != v {
                    return Err(Error::parse(
                        format!("rotations[{v}]"),
                        format!(
                            "edge-end {end} belongs to vertex {}, not {v}",
                            self.end_vertex(end)
                        ),
                    ));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::parse(
                format!("rotations[{}]", self.end_vertex(missing)),
                format!("edge-end {missing} is missing"),
            ));
        }
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> (usize, usize) {
        self.edges[i]
    }

    pub fn rotations(&self) -> Option<&[Vec<usize>]> {
        self.rotations.as_deref()
    }

    pub fn has_rotations(&self) -> bool {
        self.rotations.is_some()
    }

    /// Drops the rotation system.
    pub fn without_rotations(mut self) -> Self {
        self.rotations = None;
        self
    }

    /// Vertex at edge-end `end`.
    #[inline]
    pub fn end_vertex(&self, end: usize) -> usize {
        let (u, v) = self.edges[end / 2];
        if end % 2 == 0 {
            u
        } else {
            v
        }
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (u, v) = self.edges[e];
        u == v
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    /// Disjoint sets of `(V, A)`.
    pub fn components(&self, a: EdgeSubset) -> DisjointSets {
        let mut dsu = DisjointSets::new(self.n);
        for e in a.iter() {
            let (u, v) = self.edges[e];
            dsu.union(u, v);
        }
        dsu
    }

    /// Number of connected components of `(V, A)`, isolated vertices included.
    pub fn count_components(&self, a: EdgeSubset) -> usize {
        self.components(a).count()
    }

    /// Whether `u` and `v` are joined by a path in `(V, A)`.
    pub fn connected_in(&self, a: EdgeSubset, u: usize, v: usize) -> bool {
        if u == v {
            return true;
        }
        let mut dsu = self.components(a);
        dsu.find(u) == dsu.find(v)
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.count_components(EdgeSubset::full(self.n_edges())) == 1
    }

    /// Breadth-first component count; reference for [`Graph::count_components`].
    pub fn count_components_bfs(&self, a: EdgeSubset) -> usize {
        let mut adj = vec![Vec::new(); self.n];
        for e in a.iter() {
            let (u, v) = self.edges[e];
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> Graph {
        Graph::new(2, vec![(0, 1)]).unwrap()
    }

    #[test]
    fn component_counts() {
        let g = k2();
        assert_eq!(g.count_components(EdgeSubset::EMPTY), 2);
        assert_eq!(g.count_components(EdgeSubset::full(1)), 1);
        let path = generate(Family::Path, 3).unwrap();
        assert_eq!(path.count_components(EdgeSubset(0b01)), 2);
        let sq = generate(Family::Grid, 2).unwrap();
        assert_eq!(sq.count_components(EdgeSubset::full(4)), 1);
    }

    #[test]
    fn connectivity_predicate() {
        let g = k2();
        assert!(!g.connected_in(EdgeSubset::EMPTY, 0, 1));
        assert!(g.connected_in(EdgeSubset(1), 0, 1));
        assert!(g.connected_in(EdgeSubset::EMPTY, 1, 1));
        let c4 = generate(Family::Cycle, 4).unwrap();
        let (u, v) = c4.edge(3);
        assert!(c4.connected_in(EdgeSubset(0b0111), u, v));
    }

    #[test]
    fn self_loop_endpoints_always_connected() {
        let g = Graph::new(2, vec![(0, 0), (0, 1)]).unwrap();
        assert!(g.connected_in(EdgeSubset::EMPTY, 0, 0));
        assert_eq!(g.count_components(EdgeSubset(0b01)), 2);
    }

    #[test]
    fn dsu_matches_bfs_on_all_subsets() {
        for g in [
            generate(Family::Complete, 4).unwrap(),
            generate(Family::Grid, 2).unwrap(),
            Graph::new(4, vec![(0, 1), (0, 1), (2, 2), (1, 2), (3, 0), (2, 3), (1, 3)]).unwrap(),
        ] {
            let m = g.n_edges();
            for bits in 0..1u64 << m {
                let a = EdgeSubset(bits);
                assert_eq!(g.count_components(a), g.count_components_bfs(a));
            }
        }
    }

    #[test]
    fn rejects_bad_endpoints() {
        assert!(Graph::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn subset_ops() {
        let a = EdgeSubset(0b1010);
        assert_eq!(a.len(), 2);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(a.complement(4), EdgeSubset(0b0101));
        assert!(a.with(0).contains(0));
        assert!(!a.without(1).contains(1));
        assert!(EdgeSubset(0b10).is_subset_of(a));
    }
}
