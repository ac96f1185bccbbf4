use std::collections::HashMap;

use super::{EdgeSubset, Graph};
use crate::{Error, Result};

/// A graph automorphism acting on vertices and edge indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePermutation {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl EdgePermutation {
    pub fn is_identity(&self) -> bool {
        self.edges.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Image of an edge subset.
    pub fn apply(&self, a: EdgeSubset) -> EdgeSubset {
        let mut out = 0u64;
        for e in a.iter() {
            out |= 1 << self.edges[e];
        }
        EdgeSubset(out)
    }

    pub fn compose(&self, other: &EdgePermutation) -> EdgePermutation {
        EdgePermutation {
            vertices: other.vertices.iter().map(|&v| self.vertices[v]).collect(),
            edges: other.edges.iter().map(|&e| self.edges[e]).collect(),
        }
    }

    pub fn is_involution(&self) -> bool {
        self.edges.iter().enumerate().all(|(i, &j)| self.edges[j] == i)
            && self.vertices.iter().enumerate().all(|(i, &j)| self.vertices[j] == i)
    }
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

struct Incidence {
    mult: Vec<Vec<usize>>,
    degree: Vec<usize>,
    loops: Vec<usize>,
    classes: HashMap<(usize, usize), Vec<usize>>,
}

impl Incidence {
    fn new(g: &Graph) -> Self {
        let n = g.n_vertices();
        let mut mult = vec![vec![0; n]; n];
        let mut loops = vec![0; n];
        let mut classes: HashMap<_, Vec<usize>> = HashMap::new();
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            if u == v {
                loops[u] += 1;
            } else {
                mult[u][v] += 1;
                mult[v][u] += 1;
            }
            classes.entry(key(u, v)).or_default().push(i);
        }
        let degree = (0..n).map(|v| g.degree(v)).collect();
        Incidence {
            mult,
            degree,
            loops,
            classes,
        }
    }

    fn edge_map(&self, g: &Graph, pi: &[usize]) -> Vec<usize> {
        let mut map = vec![0; g.n_edges()];
        for (k, members) in &self.classes {
            let image = &self.classes[&key(pi[k.0], pi[k.1])];
            for (&from, &to) in members.iter().zip(image) {
                map[from] = to;
            }
        }
        map
    }
}

/// Graph automorphisms, at most `limit` of them.
///
/// Lists the vertex automorphisms found by backtracking (identity first),
/// each paired with the edge map sending the k-th parallel copy to the k-th
/// copy, followed by the transpositions of parallel edges (and of parallel
/// self-loops) that fix every vertex. Together these generate the full
/// automorphism group of the multigraph.
pub fn automorphisms(g: &Graph, limit: usize) -> Vec<EdgePermutation> {
    let n = g.n_vertices();
    let inc = Incidence::new(g);
    let mut out = Vec::new();
    let mut pi = vec![usize::MAX; n];
    let mut used = vec![false; n];
    search(g, &inc, 0, &mut pi, &mut used, &mut out, limit);
    let ident: Vec<usize> = (0..n).collect();
    let mut keys: Vec<_> = inc.classes.keys().copied().collect();
    keys.sort_unstable();
    for k in keys {
        let members = &inc.classes[&k];
        for w in members.windows(2) {
            if out.len() >= limit {
                return out;
            }
            let mut edges: Vec<usize> = (0..g.n_edges()).collect();
            edges.swap(w[0], w[1]);
            out.push(EdgePermutation {
                vertices: ident.clone(),
                edges,
            });
        }
    }
    out
}

fn search(
    g: &Graph,
    inc: &Incidence,
    i: usize,
    pi: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<EdgePermutation>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    let n = g.n_vertices();
    if i == n {
        out.push(EdgePermutation {
            vertices: pi.clone(),
            edges: inc.edge_map(g, pi),
        });
        return;
    }
    for w in 0..n {
        if used[w] || inc.degree[w] != inc.degree[i] || inc.loops[w] != inc.loops[i] {
            continue;
        }
        if (0..i).any(|j| inc.mult[i][j] != inc.mult[w][pi[j]]) {
            continue;
        }
        pi[i] = w;
        used[w] = true;
        search(g, inc, i + 1, pi, used, out, limit);
        used[w] = false;
        pi[i] = usize::MAX;
    }
}

const CERTIFICATE_BUDGET: u128 = 2_000_000;

/// Isomorphism-invariant certificate: the lexicographically least sorted
/// edge list over all relabelings that order vertices by (degree, loops).
///
/// Brute force, intended for graphs with about ten vertices or fewer.
pub fn canonical_certificate(g: &Graph) -> Result<Vec<usize>> {
    let n = g.n_vertices();
    let inc = Incidence::new(g);
    let mut classes: Vec<((usize, usize), Vec<usize>)> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (inc.degree[v], inc.loops[v]));
    for v in order {
        let k = (inc.degree[v], inc.loops[v]);
        match classes.last_mut() {
            Some((last, members)) if *last == k => members.push(v),
            _ => classes.push((k, vec![v])),
        }
    }
    let work: u128 = classes
        .iter()
        .map(|(_, m)| (1..=m.len() as u128).product::<u128>())
        .product();
    if work > CERTIFICATE_BUDGET {
        return Err(Error::InvalidInput(format!(
            "canonical certificate needs {work} relabelings (budget {CERTIFICATE_BUDGET})"
        )));
    }
    let mut perms: Vec<Vec<usize>> = classes.iter().map(|(_, m)| m.clone()).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    let mut label = vec![0; n];
    loop {
        let mut slot = 0;
        for p in &perms {
            for &v in p {
                label[v] = slot;
                slot += 1;
            }
        }
        let mut edges: Vec<_> = g
            .edges()
            .iter()
            .map(|&(u, v)| key(label[u], label[v]))
            .collect();
        edges.sort_unstable();
        if best.as_ref().is_none_or(|b| edges < *b) {
            best = Some(edges);
        }
        // odometer over the per-class permutations
        let mut c = 0;
        while c < perms.len() && !next_permutation(&mut perms[c]) {
            c += 1;
        }
        if c == perms.len() {
            break;
        }
    }
    let mut cert = vec![n, g.n_edges()];
    cert.extend(classes.iter().flat_map(|((d, l), m)| [*d, *l, m.len()]));
    for (u, v) in best.unwrap_or_default() {
        cert.push(u);
        cert.push(v);
    }
    Ok(cert)
}

/// Advances to the next lexicographic permutation; on the last one, resets
/// to the first and returns false.
fn next_permutation(xs: &mut [usize]) -> bool {
    let n = xs.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        xs.reverse();
        return false;
    }
    let mut j = n - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}
