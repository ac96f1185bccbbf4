//! Spectral gaps, weighted operator norms, exact mixing times and the
//! bounds relating gap and mixing time.

use crate::dynamics::{MatrixKind, WeightedMatrix};
use crate::graph::{DisjointSets, Graph};
use crate::linalg::{symmetric_eigenvalues, CsrMatrix, DenseMatrix};
use crate::measures::ModelParams;
use crate::symmetry::StateSymmetry;
use crate::{Caps, Error, Result};

/// Detailed-balance (or self-adjointness) residual accepted as exact.
pub const REVERSIBILITY_TOL: f64 = 1e-10;
/// Eigenvalues within this distance of 1 count as a unit eigenvalue.
pub const UNIT_EIGENVALUE_TOL: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-12;

/// Spectrum summary of a reversible chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub gap: f64,
    /// Largest absolute eigenvalue other than the top eigenvalue 1.
    pub second_modulus: f64,
    /// All eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Smallest eigenvalue.
    pub negative_tail: f64,
}

impl SpectralReport {
    pub fn states(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn second_largest(&self) -> Option<f64> {
        self.eigenvalues.get(1).copied()
    }
}

/// Indices with positive weight.
fn support(weights: &[f64]) -> Vec<usize> {
    (0..weights.len()).filter(|&i| weights[i] > 0.0).collect()
}

/// `max |w(x) K(x,y) - w(y) K(y,x)|`, relative to the largest weight.
fn adjointness_residual(km: &WeightedMatrix) -> f64 {
    let scale = km.weights.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    km.detailed_balance_residual() / scale
}

/// `D^{1/2} K D^{-1/2}` restricted to the support, averaged with its
/// transpose.
fn symmetrized(km: &WeightedMatrix, idx: &[usize]) -> DenseMatrix {
    let n = idx.len();
    let sq: Vec<f64> = idx.iter().map(|&i| km.weights[i].sqrt()).collect();
    let mut s = DenseMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..=a {
            let (x, y) = (idx[a], idx[b]);
            let v = 0.5
                * (sq[a] / sq[b] * km.entries[(x, y)] + sq[b] / sq[a] * km.entries[(y, x)]);
            s[(a, b)] = v;
            s[(b, a)] = v;
        }
    }
    s
}

/// Eigenvalues of a symmetrized operator, through symmetry blocks when the
/// hint applies.
fn eigenvalues_of(s: DenseMatrix, symmetry: Option<&StateSymmetry>) -> Vec<f64> {
    if let Some(sym) = symmetry {
        if sym.states() == s.rows() && sym.order() > 1 && sym.invariance_residual(&s) <= SYMMETRY_TOL
        {
            let mut vals: Vec<f64> = sym
                .blocks(&s)
                .into_iter()
                .flat_map(symmetric_eigenvalues)
                .collect();
            vals.sort_by(|a, b| b.total_cmp(a));
            return vals;
        }
    }
    symmetric_eigenvalues(s)
}

/// Spectral gap `1 - max{|ξ| : ξ ≠ 1}` of a reversible chain.
///
/// Fails for non-reversible input and when the eigenvalue 1 is not simple.
pub fn spectral_gap(pm: &WeightedMatrix) -> Result<SpectralReport> {
    let residual = adjointness_residual(pm);
    if residual > REVERSIBILITY_TOL {
        return Err(Error::NonReversible { residual });
    }
    let idx = support(&pm.weights);
    let full = idx.len() == pm.n();
    let s = symmetrized(pm, &idx);
    let eigenvalues = eigenvalues_of(s, if full { pm.symmetry.as_deref() } else { None });
    report(eigenvalues)
}

fn report(eigenvalues: Vec<f64>) -> Result<SpectralReport> {
    let units = eigenvalues
        .iter()
        .filter(|&&x| x >= 1.0 - UNIT_EIGENVALUE_TOL)
        .count();
    if units != 1 {
        return Err(Error::NonErgodic(format!(
            "eigenvalue 1 has multiplicity {units}"
        )));
    }
    let second_modulus = eigenvalues[1..]
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(SpectralReport {
        gap: 1.0 - second_modulus,
        second_modulus,
        negative_tail: *eigenvalues.last().unwrap(),
        eigenvalues,
    })
}

/// Operator norm in `L2(weights)` of a self-adjoint operator: the largest
/// absolute eigenvalue of its symmetrization on the support of the weights.
pub fn weighted_norm(km: &WeightedMatrix) -> Result<f64> {
    weighted_spectrum(km).map(|v| v.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// All eigenvalues (descending) of a self-adjoint operator in
/// `L2(weights)`, restricted to the support.
///
/// The symmetrized matrix is split along the connected components of its
/// nonzero pattern before diagonalizing.
pub fn weighted_spectrum(km: &WeightedMatrix) -> Result<Vec<f64>> {
    let residual = adjointness_residual(km);
    if residual > REVERSIBILITY_TOL {
        return Err(Error::NotSelfAdjoint { residual });
    }
    let idx = support(&km.weights);
    let full = idx.len() == km.n();
    let s = symmetrized(km, &idx);
    let n = s.rows();
    let mut dsu = DisjointSets::new(n);
    for a in 0..n {
        for (b, &v) in s.row(a).iter().enumerate().take(a) {
            if v != 0.0 {
                dsu.union(a, b);
            }
        }
    }
    if dsu.count() <= 1 {
        return Ok(eigenvalues_of(s, if full { km.symmetry.as_deref() } else { None }));
    }
    let labels = dsu.labels();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); dsu.count()];
    for (a, &l) in labels.iter().enumerate() {
        groups[l].push(a);
    }
    let mut vals = Vec::with_capacity(n);
    for group in groups {
        let k = group.len();
        let mut block = DenseMatrix::zeros(k, k);
        for (i, &a) in group.iter().enumerate() {
            for (j, &b) in group.iter().enumerate() {
                block[(i, j)] = s[(a, b)];
            }
        }
        vals.extend(symmetric_eigenvalues(block));
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// Eigenvalues (descending) of a sparse self-adjoint operator in
/// `L2(weights)`, restricted to the support and diagonalized one connected
/// component of the nonzero pattern at a time.
pub fn sparse_weighted_spectrum(k: &CsrMatrix, weights: &[f64]) -> Result<Vec<f64>> {
    let n = k.rows();
    let scale = weights.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut residual = 0.0f64;
    let mut dsu = DisjointSets::new(n);
    for x in 0..n {
        let (cols, vals) = k.row(x);
        for (&y, &v) in cols.iter().zip(vals) {
            residual = residual.max((weights[x] * v - weights[y] * k.get(y, x)).abs() / scale);
            if v != 0.0 && weights[x] > 0.0 && weights[y] > 0.0 {
                dsu.union(x, y);
            }
        }
    }
    if residual > REVERSIBILITY_TOL {
        return Err(Error::NotSelfAdjoint { residual });
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for x in (0..n).filter(|&x| weights[x] > 0.0) {
        groups.entry(dsu.find(x)).or_default().push(x);
    }
    let mut vals = Vec::with_capacity(n);
    let mut local = vec![usize::MAX; n];
    for group in groups.values() {
        for (i, &x) in group.iter().enumerate() {
            local[x] = i;
        }
        let mut block = DenseMatrix::zeros(group.len(), group.len());
        for (i, &x) in group.iter().enumerate() {
            let (cols, vs) = k.row(x);
            for (&y, &v) in cols.iter().zip(vs) {
                if weights[y] > 0.0 {
                    let j = local[y];
                    block[(i, j)] += 0.5 * (weights[x] / weights[y]).sqrt() * v;
                    block[(j, i)] += 0.5 * (weights[x] / weights[y]).sqrt() * v;
                }
            }
        }
        vals.extend(symmetric_eigenvalues(block));
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// Distance convention for the mixing time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MixingConvention {
    /// `Σ_y |P^t(x,y) - π(y)|`, without the factor 1/2.
    #[default]
    Literal,
    /// Total variation, `(1/2) Σ_y |P^t(x,y) - π(y)|`.
    TotalVariation,
}

impl MixingConvention {
    fn factor(self) -> f64 {
        match self {
            MixingConvention::Literal => 1.0,
            MixingConvention::TotalVariation => 0.5,
        }
    }
}

/// Default ceiling on the number of powering steps.
pub const MAX_MIXING_STEPS: usize = 1_000_000;

/// Structural ergodicity check: the transition graph must be strongly
/// connected and aperiodic.
pub fn check_ergodic(pm: &WeightedMatrix) -> Result<()> {
    let n = pm.n();
    if n == 0 {
        return Err(Error::NonErgodic("empty state space".into()));
    }
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..n).filter(|&y| pm.entries[(x, y)] > 0.0).collect())
        .collect();
    let mut radj = vec![Vec::new(); n];
    for (x, out) in adj.iter().enumerate() {
        for &y in out {
            radj[y].push(x);
        }
    }
    let levels = bfs(&adj, 0);
    if levels.contains(&usize::MAX) || bfs(&radj, 0).contains(&usize::MAX) {
        return Err(Error::NonErgodic("transition graph is not strongly connected".into()));
    }
    let mut period = 0usize;
    for (x, out) in adj.iter().enumerate() {
        for &y in out {
            let d = (levels[x] + 1).abs_diff(levels[y]);
            period = gcd(period, d);
        }
    }
    if period != 1 {
        return Err(Error::NonErgodic(format!("chain has period {period}")));
    }
    Ok(())
}

fn bfs(adj: &[Vec<usize>], start: usize) -> Vec<usize> {
    let mut level = vec![usize::MAX; adj.len()];
    let mut queue = std::collections::VecDeque::new();
    level[start] = 0;
    queue.push_back(start);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if level[y] == usize::MAX {
                level[y] = level[x] + 1;
                queue.push_back(y);
            }
        }
    }
    level
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact mixing time: the least `t` with
/// `max_x c Σ_y |P^t(x,y) - π(y)| <= 1/e`, where `c` is 1 or 1/2 by
/// convention. Powering starts from every state, or from one state per
/// symmetry orbit when the matrix carries a verified symmetry.
pub fn mixing_time_exact(
    pm: &WeightedMatrix,
    convention: MixingConvention,
    caps: &Caps,
) -> Result<usize> {
    mixing_time_with_limit(pm, convention, caps, MAX_MIXING_STEPS)
}

pub fn mixing_time_with_limit(
    pm: &WeightedMatrix,
    convention: MixingConvention,
    caps: &Caps,
    max_steps: usize,
) -> Result<usize> {
    let n = pm.n();
    if n > caps.states {
        return Err(Error::CapExceeded {
            space: "mixing",
            size: n.to_string(),
            cap: caps.states,
            flag: "--cap-states",
        });
    }
    if pm.kind != MatrixKind::Stochastic {
        return Err(Error::InvalidInput("mixing time needs a stochastic matrix".into()));
    }
    check_ergodic(pm)?;
    let starts: Vec<usize> = match pm.symmetry.as_deref() {
        Some(sym) if sym.states() == n && sym.full_invariance_residual(&pm.entries) <= SYMMETRY_TOL => {
            sym.orbit_starts().to_vec()
        }
        _ => (0..n).collect(),
    };
    let threshold = (-1.0f64).exp();
    let factor = convention.factor();
    let pi = &pm.weights;
    let nnz = pm.entries.data().iter().filter(|&&x| x != 0.0).count();
    let sparse = (nnz as f64) < 0.1 * (n * n) as f64;
    let csr = sparse.then(|| CsrMatrix::from_dense(&pm.entries));
    let distance = |row: &[f64]| factor * row.iter().zip(pi).map(|(a, b)| (a - b).abs()).sum::<f64>();
    // rows of P^t for the starts still above the threshold
    let mut active: Vec<usize> = starts;
    let mut rows = DenseMatrix::zeros(active.len(), n);
    for (r, &x) in active.iter().enumerate() {
        rows.row_mut(r).copy_from_slice(pm.entries.row(x));
    }
    for t in 1..=max_steps {
        let keep: Vec<usize> = (0..active.len())
            .filter(|&r| distance(rows.row(r)) > threshold)
            .collect();
        if keep.is_empty() {
            return Ok(t);
        }
        if keep.len() < active.len() {
            let mut next = DenseMatrix::zeros(keep.len(), n);
            for (i, &r) in keep.iter().enumerate() {
                next.row_mut(i).copy_from_slice(rows.row(r));
            }
            active = keep.iter().map(|&r| active[r]).collect();
            rows = next;
        }
        rows = match &csr {
            Some(c) => CsrMatrix::dense_mul(&rows, c),
            None => rows.matmul(&pm.entries),
        };
    }
    Err(Error::NonErgodic(format!(
        "distance still above 1/e after {max_steps} steps"
    )))
}

/// Bounds relating spectral gap and mixing time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingBounds {
    /// `1/gap - 1`.
    pub lower: f64,
    /// `ln(2e/π_min) / gap`.
    pub upper_general: f64,
    /// `(2 + |E| ln(1/(p(1-p))) + |V| ln q) / gap`.
    pub upper_rc: f64,
}

pub fn gap_mixing_bounds(g: &Graph, params: &ModelParams, gap: f64, pi_min: f64) -> MixingBounds {
    let (p, q) = (params.p(), params.qf());
    let rc = 2.0 + g.n_edges() as f64 * (1.0 / (p * (1.0 - p))).ln() + g.n_vertices() as f64 * q.ln();
    MixingBounds {
        lower: 1.0 / gap - 1.0,
        upper_general: (2.0 * std::f64::consts::E / pi_min).ln() / gap,
        upper_rc: rc / gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{hb_matrix, sb_matrix, sw_matrix_direct};
    use crate::graph::{generate, Family};
    use crate::measures::rc_distribution;

    fn k2() -> Graph {
        generate(Family::Edge, 1).unwrap()
    }

    fn half2() -> ModelParams {
        ModelParams::new(0.5, 2).unwrap()
    }

    #[test]
    fn k2_gaps() {
        let caps = Caps::default();
        let sw = spectral_gap(&sw_matrix_direct(&k2(), &half2(), &caps).unwrap()).unwrap();
        assert!((sw.gap - 0.75).abs() < 1e-14);
        assert!((sw.eigenvalues[1] - 0.25).abs() < 1e-14);
        let hb = spectral_gap(&hb_matrix(&k2(), &half2(), &caps).unwrap()).unwrap();
        assert!((hb.gap - 0.5).abs() < 1e-14);
        let sb = spectral_gap(&sb_matrix(&k2(), &half2(), &caps).unwrap()).unwrap();
        assert!((sb.gap - 0.75).abs() < 1e-14);
    }

    #[test]
    fn rank_one_has_unit_gap() {
        let s = WeightedMatrix::stationary(vec![0.2, 0.3, 0.5]);
        let r = spectral_gap(&s).unwrap();
        assert!((r.gap - 1.0).abs() < 1e-14);
        let mut caps = Caps::default();
        assert_eq!(mixing_time_exact(&s, MixingConvention::Literal, &caps).unwrap(), 1);
        caps.states = 2;
        assert!(mixing_time_exact(&s, MixingConvention::Literal, &caps).unwrap_err().is_cap());
    }

    #[test]
    fn rejects_nonreversible_and_reducible() {
        let cyc = DenseMatrix::from_rows(&[
            vec![0.1, 0.9, 0.0],
            vec![0.0, 0.1, 0.9],
            vec![0.9, 0.0, 0.1],
        ]);
        let w = WeightedMatrix::stochastic(cyc, vec![1.0 / 3.0; 3]);
        assert!(matches!(spectral_gap(&w), Err(Error::NonReversible { .. })));
        let split = WeightedMatrix::stochastic(DenseMatrix::identity(2), vec![0.5, 0.5]);
        assert!(matches!(spectral_gap(&split), Err(Error::NonErgodic(_))));
        assert!(matches!(
            mixing_time_exact(&split, MixingConvention::Literal, &Caps::default()),
            Err(Error::NonErgodic(_))
        ));
        let flip = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let flip = WeightedMatrix::stochastic(flip, vec![0.5, 0.5]);
        assert!(spectral_gap(&flip).unwrap().gap.abs() < 1e-14);
        assert!(check_ergodic(&flip).is_err());
    }

    #[test]
    fn weighted_norms() {
        let caps = Caps::default();
        let sb = sb_matrix(&k2(), &half2(), &caps).unwrap();
        let centered = sb.minus_stationary();
        assert!((weighted_norm(&centered).unwrap() - 0.25).abs() < 1e-14);
        let id = WeightedMatrix::stochastic(DenseMatrix::identity(2), sb.weights.clone());
        assert!((weighted_norm(&id.minus_stationary()).unwrap() - 1.0).abs() < 1e-14);
        let skew = WeightedMatrix::general(
            DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]),
            vec![0.5, 0.5],
        );
        assert!(matches!(weighted_norm(&skew), Err(Error::NotSelfAdjoint { .. })));
    }

    #[test]
    fn sparse_spectrum_matches_dense() {
        let caps = Caps::default();
        let g = generate(Family::Cycle, 4).unwrap();
        let hb = hb_matrix(&g, &ModelParams::new(0.35, 3).unwrap(), &caps).unwrap();
        let dense = weighted_spectrum(&hb).unwrap();
        let sparse = sparse_weighted_spectrum(&CsrMatrix::from_dense(&hb.entries), &hb.weights).unwrap();
        assert_eq!(dense.len(), sparse.len());
        for (a, b) in dense.iter().zip(&sparse) {
            assert!((a - b).abs() < 1e-12);
        }
        let blocks = CsrMatrix::from_rows(3, vec![vec![(0, 1.0)], vec![(1, 0.5), (2, 0.5)], vec![(1, 0.5), (2, 0.5)]]);
        let got = sparse_weighted_spectrum(&blocks, &[0.2, 0.4, 0.4]).unwrap();
        assert!((got[0] - 1.0).abs() < 1e-15 && (got[1] - 1.0).abs() < 1e-15 && got[2].abs() < 1e-15);
    }

    #[test]
    fn k2_mixing_times() {
        let caps = Caps::default();
        let hb = hb_matrix(&k2(), &half2(), &caps).unwrap();
        assert_eq!(mixing_time_exact(&hb, MixingConvention::Literal, &caps).unwrap(), 2);
        assert_eq!(mixing_time_exact(&hb, MixingConvention::TotalVariation, &caps).unwrap(), 1);
        let sb = sb_matrix(&k2(), &half2(), &caps).unwrap();
        assert_eq!(mixing_time_exact(&sb, MixingConvention::Literal, &caps).unwrap(), 1);
    }

    #[test]
    fn grid2_hb_golden() {
        let caps = Caps::default();
        let g = generate(Family::Grid, 2).unwrap();
        let hb = hb_matrix(&g, &half2(), &caps).unwrap();
        let r = spectral_gap(&hb).unwrap();
        assert!((r.gap - 0.114_900_367_055_777_89).abs() < 1e-12);
        assert_eq!(mixing_time_exact(&hb, MixingConvention::Literal, &caps).unwrap(), 16);
    }

    #[test]
    fn symmetric_route_matches_plain_route() {
        let caps = Caps::default();
        let g = generate(Family::Grid, 3).unwrap();
        let params = ModelParams::new(0.3, 2).unwrap();
        let mut hb = hb_matrix(&g, &params, &caps).unwrap();
        assert!(hb.symmetry.is_some());
        let with = spectral_gap(&hb).unwrap();
        hb.symmetry = None;
        let without = spectral_gap(&hb).unwrap();
        assert!((with.gap - without.gap).abs() < 1e-12);
        for (a, b) in with.eigenvalues.iter().zip(&without.eigenvalues).step_by(97) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn orbit_starts_give_the_same_mixing_time() {
        let caps = Caps::default();
        let g = generate(Family::Cycle, 5).unwrap();
        let params = ModelParams::new(0.6, 3).unwrap();
        let mut sb = sb_matrix(&g, &params, &caps).unwrap();
        sb.symmetry = Some(std::sync::Arc::new(StateSymmetry::for_graph(&g)));
        let fast = mixing_time_exact(&sb, MixingConvention::Literal, &caps).unwrap();
        sb.symmetry = None;
        let slow = mixing_time_exact(&sb, MixingConvention::Literal, &caps).unwrap();
        assert_eq!(fast, slow);
    }

    #[test]
    fn lazy_gap_by_recomputation() {
        let caps = Caps::default();
        let g = generate(Family::Cycle, 4).unwrap();
        let params = ModelParams::new(0.7, 3).unwrap();
        let sb = sb_matrix(&g, &params, &caps).unwrap();
        let plain = spectral_gap(&sb).unwrap();
        let lazy = spectral_gap(&sb.lazy()).unwrap();
        let want = 1.0 - (1.0 + plain.eigenvalues[1]) / 2.0;
        assert!((lazy.gap - want).abs() < 1e-12);
        assert!(plain.gap <= 2.0 * lazy.gap + 1e-12);
    }

    #[test]
    fn bounds_formulae() {
        let b = gap_mixing_bounds(&k2(), &half2(), 0.5, 1.0 / 3.0);
        assert!((b.upper_rc - 9.545_177_444_479_562).abs() < 1e-12);
        assert!((b.lower - 1.0).abs() < 1e-15);
        assert_eq!(gap_mixing_bounds(&k2(), &half2(), 1.0, 0.5).lower, 0.0);
        let mu = rc_distribution(&k2(), &half2(), &Caps::default()).unwrap();
        assert!((mu.min_positive() - 1.0 / 3.0).abs() < 1e-15);
    }
}
