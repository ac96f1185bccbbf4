//! Monte Carlo simulation of the cluster and single-edge chains.

mod autocorr;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{sw_potts_matrix, transition_matrix, Dynamics, WeightedMatrix};
use crate::graph::{DisjointSets, EdgeSubset, Graph, GraphSpec};
use crate::measures::{decode_spins, encode_spins, ModelParams};
use crate::{Caps, Error, Result, VERSION};

pub use autocorr::{autocorrelation, Autocorrelation, MIN_SERIES_LEN, WINDOW_FACTOR};

/// Name of the random number generator written into CSV headers.
pub const GENERATOR: &str = "ChaCha8Rng";
/// Version of the generator crate.
pub const GENERATOR_VERSION: &str = "rand_chacha-0.9";

/// Seeded generator used by every chain.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Simulated chains: the three random-cluster chains and the Potts-side
/// Swendsen-Wang chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChainKind {
    Sw,
    SwPotts,
    Hb,
    Sb,
}

impl ChainKind {
    pub fn name(self) -> &'static str {
        match self {
            ChainKind::Sw => "sw",
            ChainKind::SwPotts => "sw-potts",
            ChainKind::Hb => "hb",
            ChainKind::Sb => "sb",
        }
    }

    pub fn is_potts(self) -> bool {
        self == ChainKind::SwPotts
    }
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sw" => ChainKind::Sw,
            "sw-potts" => ChainKind::SwPotts,
            "hb" => ChainKind::Hb,
            "sb" => ChainKind::Sb,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown chain `{other}` (expected sw, sw-potts, hb or sb)"
                )))
            }
        })
    }
}

/// Current configuration of a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainState {
    /// Edge membership. For the Potts chain, the bond set of the last step.
    pub subset: Vec<bool>,
    /// Vertex colors; empty for the random-cluster chains.
    pub spins: Vec<u32>,
    pub step: u64,
}

impl ChainState {
    /// Index of the edge subset (bit `e` set when edge `e` is open).
    pub fn subset_index(&self) -> usize {
        self.subset
            .iter()
            .enumerate()
            .fold(0, |acc, (e, &open)| acc | (usize::from(open) << e))
    }

    pub fn open_edges(&self) -> usize {
        self.subset.iter().filter(|&&b| b).count()
    }
}

/// Graph, parameters and scratch space for stepping a chain.
pub struct Sampler<'g> {
    g: &'g Graph,
    p: f64,
    q: u32,
    /// `(neighbor, edge)` pairs per vertex.
    adjacency: Vec<Vec<(usize, usize)>>,
    dsu: DisjointSets,
    colors: Vec<u32>,
    stamp: Vec<u32>,
    generation: u32,
    queue: Vec<usize>,
}

impl<'g> Sampler<'g> {
    pub fn new(g: &'g Graph, params: &ModelParams) -> Self {
        let n = g.n_vertices();
        let mut adjacency = vec![Vec::new(); n];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            adjacency[u].push((v, e));
            if u != v {
                adjacency[v].push((u, e));
            }
        }
        Sampler {
            g,
            p: params.p(),
            q: params.q(),
            adjacency,
            dsu: DisjointSets::new(n),
            colors: vec![0; n],
            stamp: vec![0; n],
            generation: 0,
            queue: Vec::with_capacity(n),
        }
    }

    pub fn graph(&self) -> &Graph {
        self.g
    }

    fn union_open(&mut self, subset: &[bool]) {
        self.dsu.reset(self.g.n_vertices());
        for (e, &(u, v)) in self.g.edges().iter().enumerate() {
            if subset[e] {
                self.dsu.union(u, v);
            }
        }
    }

    /// One uniform color per component of the current partition, drawn in
    /// order of first appearance of the component's root.
    fn color_components<R: Rng>(&mut self, rng: &mut R) {
        const UNSET: u32 = u32::MAX;
        let n = self.g.n_vertices();
        self.colors.iter_mut().for_each(|c| *c = UNSET);
        for v in 0..n {
            let r = self.dsu.find(v);
            if self.colors[r] == UNSET {
                self.colors[r] = rng.random_range(0..self.q);
            }
        }
    }

    /// Swendsen-Wang step on edge subsets: color the components of `(V, A)`
    /// uniformly, then keep each monochromatic edge with probability `p`.
    pub fn sw_step<R: Rng>(&mut self, subset: &mut [bool], rng: &mut R) {
        self.union_open(subset);
        self.color_components(rng);
        for (e, &(u, v)) in self.g.edges().iter().enumerate() {
            let (ru, rv) = (self.dsu.find(u), self.dsu.find(v));
            let mono = self.colors[ru] == self.colors[rv];
            subset[e] = mono && rng.random::<f64>() < self.p;
        }
    }

    /// Swendsen-Wang step on colorings: keep each monochromatic edge with
    /// probability `p`, then recolor the components uniformly. The bond set
    /// drawn in between is written to `bonds`.
    pub fn sw_potts_step<R: Rng>(&mut self, spins: &mut [u32], bonds: &mut [bool], rng: &mut R) {
        for (e, &(u, v)) in self.g.edges().iter().enumerate() {
            bonds[e] = spins[u] == spins[v] && rng.random::<f64>() < self.p;
        }
        self.union_open(bonds);
        self.color_components(rng);
        for (v, s) in spins.iter_mut().enumerate() {
            *s = self.colors[self.dsu.find(v)];
        }
    }

    /// Breadth-first search from `u` to `v` over the edges accepted by
    /// `open`.
    fn connected<F: Fn(usize) -> bool>(&mut self, u: usize, v: usize, open: F) -> bool {
        if u == v {
            return true;
        }
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        let gen = self.generation;
        self.queue.clear();
        self.queue.push(u);
        self.stamp[u] = gen;
        let mut head = 0;
        while head < self.queue.len() {
            let x = self.queue[head];
            head += 1;
            for &(y, e) in &self.adjacency[x] {
                if self.stamp[y] != gen && open(e) {
                    if y == v {
                        return true;
                    }
                    self.stamp[y] = gen;
                    self.queue.push(y);
                }
            }
        }
        false
    }

    /// Heat-bath step: with probability 1/2 stay put; otherwise resample a
    /// uniform edge from its conditional law given the other edges, with
    /// connectivity tested in `(V, A \ e)`.
    pub fn hb_step<R: Rng>(&mut self, subset: &mut [bool], rng: &mut R) {
        let m = self.g.n_edges();
        if m == 0 {
            return;
        }
        let e = rng.random_range(0..m);
        if rng.random::<f64>() < 0.5 {
            return;
        }
        let (u, v) = self.g.edge(e);
        let joined = self.connected(u, v, |f| f != e && subset[f]);
        let (p, q) = (self.p, self.q as f64);
        let open = if joined { p } else { p / (p + q * (1.0 - p)) };
        subset[e] = rng.random::<f64>() < open;
    }

    /// Single-bond step: update a uniform edge, opening it with probability
    /// `p` when its endpoints are connected in `(V, A)` and `p/q` otherwise.
    pub fn sb_step<R: Rng>(&mut self, subset: &mut [bool], rng: &mut R) {
        let m = self.g.n_edges();
        if m == 0 {
            return;
        }
        let e = rng.random_range(0..m);
        let (u, v) = self.g.edge(e);
        let joined = subset[e] || self.connected(u, v, |f| subset[f]);
        let open = if joined { self.p } else { self.p / self.q as f64 };
        subset[e] = rng.random::<f64>() < open;
    }

    /// Advances `state` by one step of `kind`.
    pub fn step<R: Rng>(&mut self, kind: ChainKind, state: &mut ChainState, rng: &mut R) {
        match kind {
            ChainKind::Sw => self.sw_step(&mut state.subset, rng),
            ChainKind::SwPotts => self.sw_potts_step(&mut state.spins, &mut state.subset, rng),
            ChainKind::Hb => self.hb_step(&mut state.subset, rng),
            ChainKind::Sb => self.sb_step(&mut state.subset, rng),
        }
        state.step += 1;
    }

    /// Observables of the current state.
    pub fn observe(&mut self, state: &ChainState) -> Record {
        self.union_open(&state.subset);
        let magnetization = (!state.spins.is_empty()).then(|| {
            let mut counts = vec![0usize; self.q as usize];
            for &s in &state.spins {
                counts[s as usize] += 1;
            }
            *counts.iter().max().unwrap() as f64 / state.spins.len() as f64
        });
        Record {
            step: state.step,
            edges: state.open_edges(),
            components: self.dsu.count(),
            largest: self.dsu.largest(),
            magnetization,
        }
    }
}

/// Initial state: no open edges and, for the Potts chain, all spins 0.
pub fn initial_state(g: &Graph, kind: ChainKind) -> ChainState {
    ChainState {
        subset: vec![false; g.n_edges()],
        spins: if kind.is_potts() {
            vec![0; g.n_vertices()]
        } else {
            Vec::new()
        },
        step: 0,
    }
}

/// Observables recorded per kept step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub step: u64,
    pub edges: usize,
    pub components: usize,
    pub largest: usize,
    pub magnetization: Option<f64>,
}

/// Optional CSV columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observables {
    pub edges: bool,
    pub components: bool,
    pub largest: bool,
    pub magnetization: bool,
}

impl Observables {
    pub fn all_for(kind: ChainKind) -> Self {
        Observables {
            edges: true,
            components: true,
            largest: true,
            magnetization: kind.is_potts(),
        }
    }

    /// Parses a comma-separated subset of `edges,components,largest,magnetization`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut o = Observables {
            edges: false,
            components: false,
            largest: false,
            magnetization: false,
        };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "edges" => o.edges = true,
                "components" => o.components = true,
                "largest" => o.largest = true,
                "magnetization" => o.magnetization = true,
                other => {
                    return Err(Error::InvalidInput(format!("unknown observable `{other}`")))
                }
            }
        }
        Ok(o)
    }

    fn columns(&self) -> Vec<&'static str> {
        let mut c = vec!["step"];
        for (on, name) in [
            (self.edges, "edges"),
            (self.components, "components"),
            (self.largest, "largest"),
            (self.magnetization, "magnetization"),
        ] {
            if on {
                c.push(name);
            }
        }
        c
    }
}

/// Everything that determines a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub graph: GraphSpec,
    pub params: ModelParams,
    pub kind: ChainKind,
    pub steps: u64,
    pub burnin: u64,
    pub seed: u64,
    pub thin: u64,
    pub observables: Observables,
}

impl RunSpec {
    pub fn new(graph: GraphSpec, params: ModelParams, kind: ChainKind, steps: u64, seed: u64) -> Self {
        RunSpec {
            graph,
            params,
            kind,
            steps,
            burnin: 0,
            seed,
            thin: 1,
            observables: Observables::all_for(kind),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidInput("steps must be at least 1".into()));
        }
        if self.thin == 0 {
            return Err(Error::InvalidInput("thin must be at least 1".into()));
        }
        if self.observables.magnetization && !self.kind.is_potts() {
            return Err(Error::InvalidInput(
                "magnetization is only defined for the sw-potts chain".into(),
            ));
        }
        Ok(())
    }
}

/// Recorded time series of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRun {
    pub spec: RunSpec,
    pub records: Vec<Record>,
}

/// Runs burn-in, then `steps` steps, keeping every `thin`-th record.
/// Recorded steps are numbered from 1 after the burn-in.
pub fn run_chain(spec: &RunSpec) -> Result<ChainRun> {
    spec.validate()?;
    let g = spec.graph.build()?;
    let mut sampler = Sampler::new(&g, &spec.params);
    let mut rng = rng_from_seed(spec.seed);
    let mut state = initial_state(&g, spec.kind);
    for _ in 0..spec.burnin {
        sampler.step(spec.kind, &mut state, &mut rng);
    }
    state.step = 0;
    let mut records = Vec::with_capacity((spec.steps / spec.thin) as usize);
    for _ in 0..spec.steps {
        sampler.step(spec.kind, &mut state, &mut rng);
        if state.step % spec.thin == 0 {
            records.push(sampler.observe(&state));
        }
    }
    Ok(ChainRun {
        spec: spec.clone(),
        records,
    })
}

/// A float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl ChainRun {
    /// Writes the CSV with its two header rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let s = &self.spec;
        writeln!(w, "# generator={GENERATOR} version={GENERATOR_VERSION} seed={}", s.seed)?;
        writeln!(
            w,
            "# rcgap version={VERSION} graph={} chain={} p={} q={} steps={} burnin={} thin={}",
            s.graph,
            s.kind,
            format_float(s.params.p()),
            s.params.q(),
            s.steps,
            s.burnin,
            s.thin
        )?;
        let o = s.observables;
        writeln!(w, "{}", o.columns().join(","))?;
        let mut line = String::new();
        for r in &self.records {
            line.clear();
            line.push_str(&r.step.to_string());
            for (on, value) in [
                (o.edges, r.edges.to_string()),
                (o.components, r.components.to_string()),
                (o.largest, r.largest.to_string()),
            ] {
                if on {
                    line.push(',');
                    line.push_str(&value);
                }
            }
            if o.magnetization {
                line.push(',');
                line.push_str(&r.magnetization.map(format_float).unwrap_or_default());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn series(&self, f: impl Fn(&Record) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }
}

/// Exact transition matrix of a simulated chain, indexed like
/// [`state_index`].
pub fn exact_matrix(g: &Graph, params: &ModelParams, kind: ChainKind, caps: &Caps) -> Result<WeightedMatrix> {
    match kind {
        ChainKind::Sw => transition_matrix(g, params, Dynamics::Sw, caps),
        ChainKind::Hb => transition_matrix(g, params, Dynamics::Hb, caps),
        ChainKind::Sb => transition_matrix(g, params, Dynamics::Sb, caps),
        ChainKind::SwPotts => sw_potts_matrix(g, params, caps),
    }
}

/// Edge-subset index for the random-cluster chains, spin code for the
/// Potts chain.
pub fn state_index(state: &ChainState, q: u32) -> usize {
    if state.spins.is_empty() {
        state.subset_index()
    } else {
        encode_spins(&state.spins, q)
    }
}

fn state_from_index(g: &Graph, kind: ChainKind, q: u32, index: usize) -> ChainState {
    let mut s = initial_state(g, kind);
    if kind.is_potts() {
        decode_spins(index, g.n_vertices(), q, &mut s.spins);
    } else {
        let a = EdgeSubset(index as u64);
        for (e, slot) in s.subset.iter_mut().enumerate() {
            *slot = a.contains(e);
        }
    }
    s
}

/// Total-variation distance `(1/2) Σ |a - b|`.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Empirical one-step row against the exact one.
#[derive(Debug, Clone, PartialEq)]
pub struct RowCheck {
    pub empirical: Vec<f64>,
    pub exact: Vec<f64>,
    pub tv: f64,
    pub samples: usize,
}

/// Runs `samples` independent single steps from `start` and compares the
/// landing frequencies with the exact row.
pub fn check_row(
    g: &Graph,
    params: &ModelParams,
    kind: ChainKind,
    start: usize,
    samples: usize,
    seed: u64,
    caps: &Caps,
) -> Result<RowCheck> {
    let exact = exact_matrix(g, params, kind, caps)?;
    let n = exact.n();
    if start >= n {
        return Err(Error::InvalidInput(format!(
            "start state {start} out of range for {n} states"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()));
    }
    let mut sampler = Sampler::new(g, params);
    let mut rng = rng_from_seed(seed);
    let origin = state_from_index(g, kind, params.q(), start);
    let mut counts = vec![0usize; n];
    let mut state = origin.clone();
    for _ in 0..samples {
        state.subset.copy_from_slice(&origin.subset);
        state.spins.copy_from_slice(&origin.spins);
        sampler.step(kind, &mut state, &mut rng);
        counts[state_index(&state, params.q())] += 1;
    }
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    let exact_row = exact.entries.row(start).to_vec();
    let tv = total_variation(&empirical, &exact_row);
    Ok(RowCheck {
        empirical,
        exact: exact_row,
        tv,
        samples,
    })
}

/// Fraction of the `steps` post-burn-in states spent in each state.
pub fn occupation(
    g: &Graph,
    params: &ModelParams,
    kind: ChainKind,
    steps: u64,
    burnin: u64,
    seed: u64,
    caps: &Caps,
) -> Result<Vec<f64>> {
    let size = if kind.is_potts() {
        crate::measures::spin_count(g, params, caps)?
    } else {
        caps.check_states(g.n_edges())?
    };
    let mut sampler = Sampler::new(g, params);
    let mut rng = rng_from_seed(seed);
    let mut state = initial_state(g, kind);
    for _ in 0..burnin {
        sampler.step(kind, &mut state, &mut rng);
    }
    let mut counts = vec![0u64; size];
    for _ in 0..steps {
        sampler.step(kind, &mut state, &mut rng);
        counts[state_index(&state, params.q())] += 1;
    }
    Ok(counts.iter().map(|&c| c as f64 / steps.max(1) as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};
    use crate::measures::{potts_distribution, rc_distribution};

    fn params(p: f64, q: u32) -> ModelParams {
        ModelParams::new(p, q).unwrap()
    }

    #[test]
    fn chain_names_parse() {
        for k in [ChainKind::Sw, ChainKind::SwPotts, ChainKind::Hb, ChainKind::Sb] {
            assert_eq!(k.name().parse::<ChainKind>().unwrap(), k);
        }
        assert!("lazy".parse::<ChainKind>().is_err());
    }

    #[test]
    fn k2_sw_from_empty() {
        let g = generate(Family::Edge, 1).unwrap();
        let r = check_row(&g, &params(0.5, 2), ChainKind::Sw, 0, 100_000, 1, &Caps::default()).unwrap();
        // exact row (3/4, 1/4), binomial sd ~ 0.0014
        assert!((r.empirical[1] - 0.25).abs() < 3.0 * (0.25f64 * 0.75 / 1e5).sqrt());
    }

    #[test]
    fn k2_single_edge_rows() {
        let g = generate(Family::Edge, 1).unwrap();
        let caps = Caps::default();
        let hb = check_row(&g, &params(0.5, 2), ChainKind::Hb, 0, 100_000, 2, &caps).unwrap();
        assert!((hb.empirical[1] - 1.0 / 6.0).abs() < 3.0 * (5.0f64 / 36.0 / 1e5).sqrt());
        let sb = check_row(&g, &params(0.5, 2), ChainKind::Sb, 1, 100_000, 3, &caps).unwrap();
        assert!((sb.empirical[0] - 0.5).abs() < 3.0 * (0.25f64 / 1e5).sqrt());
    }

    #[test]
    fn sb_keeps_plain_p_for_open_edge() {
        let g = generate(Family::Path, 3).unwrap();
        let caps = Caps::default();
        // from {e0}: closing e0 has probability (1/2)(1-p) exactly
        let r = check_row(&g, &params(0.3, 2), ChainKind::Sb, 0b01, 100_000, 4, &caps).unwrap();
        assert!(r.tv < 0.01);
        assert!((r.exact[0b00] - 0.35).abs() < 1e-15);
    }

    #[test]
    fn potts_rows_match() {
        let g = generate(Family::Edge, 1).unwrap();
        let r = check_row(&g, &params(0.5, 2), ChainKind::SwPotts, 0, 100_000, 5, &Caps::default()).unwrap();
        assert!(r.tv < 0.01, "{}", r.tv);
    }

    #[test]
    fn q1_sw_is_bernoulli() {
        let g = generate(Family::Cycle, 3).unwrap();
        let r = check_row(&g, &params(0.3, 1), ChainKind::Sw, 0b101, 100_000, 6, &Caps::default()).unwrap();
        assert!(r.tv < 0.01);
    }

    #[test]
    fn potts_extremes() {
        let g = generate(Family::Grid, 2).unwrap();
        let mut sampler = Sampler::new(&g, &ModelParams::closed(1.0, 3).unwrap());
        let mut rng = rng_from_seed(9);
        let mut spins = vec![1u32; 4];
        let mut bonds = vec![false; 4];
        for _ in 0..20 {
            sampler.sw_potts_step(&mut spins, &mut bonds, &mut rng);
            assert!(spins.iter().all(|&s| s == spins[0]));
        }
        let h = occupation(&g, &ModelParams::closed(0.0, 2).unwrap(), ChainKind::SwPotts, 40_000, 0, 3, &Caps::default()).unwrap();
        assert!(h.iter().all(|&f| (f - 1.0 / 16.0).abs() < 0.01));
    }

    #[test]
    fn long_run_histograms() {
        let g = generate(Family::Grid, 2).unwrap();
        let pm = params(0.5, 2);
        let caps = Caps::default();
        let mu = rc_distribution(&g, &pm, &caps).unwrap().weights;
        let h = occupation(&g, &pm, ChainKind::Sw, 200_000, 100, 11, &caps).unwrap();
        assert!(total_variation(&h, &mu) < 0.02);
        let pi = potts_distribution(&g, &pm, &caps).unwrap().weights;
        let h = occupation(&g, &pm, ChainKind::SwPotts, 200_000, 100, 12, &caps).unwrap();
        assert!(total_variation(&h, &pi) < 0.02);
    }

    #[test]
    fn runs_are_reproducible_and_sized() {
        let spec = RunSpec::new(GraphSpec::Family(Family::Grid, 4), params(0.5, 2), ChainKind::Sw, 1000, 42);
        let a = run_chain(&spec).unwrap();
        let b = run_chain(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 1000);
        let mut one = spec.clone();
        one.steps = 1;
        assert_eq!(run_chain(&one).unwrap().records.len(), 1);
        one.steps = 0;
        assert!(run_chain(&one).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut spec = RunSpec::new(GraphSpec::Family(Family::Cycle, 5), params(0.6, 3), ChainKind::SwPotts, 10, 7);
        spec.thin = 5;
        let run = run_chain(&spec).unwrap();
        let mut buf = Vec::new();
        run.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# generator=ChaCha8Rng version=rand_chacha-0.9 seed=7");
        assert!(lines[1].starts_with("# rcgap version="));
        assert_eq!(lines[2], "step,edges,components,largest,magnetization");
        assert_eq!(lines.len(), 5);
        assert!(lines[3].starts_with("5,"));
        let mag = lines[4].rsplit(',').next().unwrap();
        assert_eq!(mag.split('e').next().unwrap().len(), 18);
    }

    #[test]
    fn observables_parse() {
        let o = Observables::parse("edges,largest").unwrap();
        assert_eq!(o.columns(), vec!["step", "edges", "largest"]);
        assert!(Observables::parse("energy").is_err());
        let mut spec = RunSpec::new(GraphSpec::Family(Family::Edge, 1), params(0.5, 2), ChainKind::Hb, 5, 1);
        spec.observables.magnetization = true;
        assert!(spec.validate().is_err());
    }
}
