use std::cell::OnceCell;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CheckGroup, CheckResult, SuiteConfig};
use crate::dynamics::{
    sb_matrix_operator, sw_matrix_operator, sw_potts_matrix, transition_matrix, Dynamics,
    JointSpace, WeightedMatrix,
};
use crate::graph::{dual_config, dual_graph, DualMap, EdgeSubset, Graph};
use crate::linalg::CsrMatrix;
use crate::measures::{rc_distribution, ModelParams};
use crate::spectral::{
    gap_mixing_bounds, mixing_time_with_limit, sparse_weighted_spectrum, spectral_gap,
    weighted_norm, SpectralReport,
};
use crate::Error;

/// Lowest eigenvalue accepted for the averaged edge operator.
const POSITIVITY_FLOOR: f64 = -1e-12;

const EQUALITIES: [&str; 14] = [
    "blocks.self-adjoint.m-star-m",
    "blocks.self-adjoint.edge",
    "blocks.idempotent",
    "blocks.commute",
    "blocks.norm.edge",
    "blocks.norm.m-star-m",
    "repr.sw-operator",
    "repr.sb-operator",
    "repr.edge-order",
    "repr.potts-gap",
    "repr.sw-equals-sb",
    "dual.measure",
    "dual.hb-entries",
    "dual.hb-gap",
];

pub(super) fn is_equality(id: &str) -> bool {
    EQUALITIES.contains(&id)
}

/// Why a check produced no numbers.
#[derive(Debug, Clone)]
enum Fail {
    Skip(String),
    Error(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        if e.is_cap() {
            Fail::Skip("cap".into())
        } else {
            Fail::Error(e.to_string())
        }
    }
}

type Res<T> = std::result::Result<T, Fail>;

enum Outcome {
    /// Two values that must agree, with the residual measuring the gap.
    Equal { lhs: f64, rhs: f64, residual: f64 },
    /// `lhs <= rhs`.
    AtMost { lhs: f64, rhs: f64 },
}

fn at_most(lhs: f64, rhs: f64) -> Outcome {
    Outcome::AtMost { lhs, rhs }
}

fn equal_values(lhs: f64, rhs: f64) -> Outcome {
    Outcome::Equal {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    }
}

fn residual(r: f64) -> Outcome {
    Outcome::Equal {
        lhs: r,
        rhs: 0.0,
        residual: r,
    }
}

/// Worst case over a family of inequalities: the one with smallest margin.
fn worst_of(items: impl IntoIterator<Item = (f64, f64)>) -> Outcome {
    let (lhs, rhs) = items
        .into_iter()
        .min_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
        .unwrap_or((0.0, 0.0));
    at_most(lhs, rhs)
}

fn csr_max_abs(k: &CsrMatrix) -> f64 {
    (0..k.rows())
        .flat_map(|i| k.row(i).1.iter().copied())
        .fold(0.0, |w, v| w.max(v.abs()))
}

fn sparse_adjointness(k: &CsrMatrix, w: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for x in 0..k.rows() {
        let (cols, vals) = k.row(x);
        for (&y, &v) in cols.iter().zip(vals) {
            worst = worst.max((w[x] * v - w[y] * k.get(y, x)).abs());
        }
    }
    worst
}

fn max_abs_eigenvalue(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |w, v| w.max(v.abs()))
}

struct DualSide {
    map: DualMap,
    params: ModelParams,
}

/// One graph and parameter pair with lazily built, shared ingredients.
struct Instance<'a> {
    g: &'a Graph,
    label: &'a str,
    params: &'a ModelParams,
    cfg: &'a SuiteConfig,
    matrices: [OnceCell<Res<WeightedMatrix>>; 4],
    gaps: [OnceCell<Res<SpectralReport>>; 4],
    joint: OnceCell<Res<JointSpace>>,
    dual: OnceCell<Res<DualSide>>,
    dual_hb: OnceCell<Res<WeightedMatrix>>,
}

fn slot(d: Dynamics) -> usize {
    match d {
        Dynamics::Sw => 0,
        Dynamics::Hb => 1,
        Dynamics::Sb => 2,
        Dynamics::LazySb => 3,
    }
}

impl<'a> Instance<'a> {
    fn new(g: &'a Graph, label: &'a str, params: &'a ModelParams, cfg: &'a SuiteConfig) -> Self {
        Instance {
            g,
            label,
            params,
            cfg,
            matrices: Default::default(),
            gaps: Default::default(),
            joint: OnceCell::new(),
            dual: OnceCell::new(),
            dual_hb: OnceCell::new(),
        }
    }

    fn matrix(&self, d: Dynamics) -> Res<&WeightedMatrix> {
        self.matrices[slot(d)]
            .get_or_init(|| match d {
                Dynamics::LazySb => Ok(self.matrix(Dynamics::Sb)?.lazy()),
                _ => Ok(transition_matrix(self.g, self.params, d, &self.cfg.caps)?),
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn report(&self, d: Dynamics) -> Res<&SpectralReport> {
        self.gaps[slot(d)]
            .get_or_init(|| Ok(spectral_gap(self.matrix(d)?)?))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn gap(&self, d: Dynamics) -> Res<f64> {
        Ok(self.report(d)?.gap)
    }

    fn joint(&self) -> Res<&JointSpace> {
        self.joint
            .get_or_init(|| Ok(JointSpace::support(self.g, self.params, &self.cfg.caps)?))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn dual(&self) -> Res<&DualSide> {
        self.dual
            .get_or_init(|| {
                if !self.g.has_rotations() {
                    return Err(Fail::Skip("no-embedding".into()));
                }
                Ok(DualSide {
                    map: dual_graph(self.g)?,
                    params: self.params.dual(),
                })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn dual_hb(&self) -> Res<&WeightedMatrix> {
        self.dual_hb
            .get_or_init(|| {
                let d = self.dual()?;
                Ok(transition_matrix(&d.map.dual, &d.params, Dynamics::Hb, &self.cfg.caps)?)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn record(&self, out: &mut Vec<CheckResult>, id: &str, f: impl FnOnce() -> Res<Outcome>) {
        let equality = is_equality(id);
        let tol = if equality {
            self.cfg.tol_equality
        } else {
            self.cfg.tol_inequality
        };
        let mut r = CheckResult {
            check: id.to_string(),
            graph: self.label.to_string(),
            p: self.params.p(),
            q: self.params.q(),
            lhs: None,
            rhs: None,
            margin: None,
            pass: true,
            tol,
            skipped: None,
            error: None,
        };
        match f() {
            Ok(Outcome::Equal { lhs, rhs, residual }) => {
                debug_assert!(equality, "{id} is not registered as an equality");
                r.lhs = Some(lhs);
                r.rhs = Some(rhs);
                r.margin = Some(residual);
                r.pass = residual.abs() <= tol;
            }
            Ok(Outcome::AtMost { lhs, rhs }) => {
                debug_assert!(!equality, "{id} is registered as an equality");
                let margin = rhs - lhs;
                r.lhs = Some(lhs);
                r.rhs = Some(rhs);
                r.margin = Some(margin);
                r.pass = margin >= -tol;
            }
            Err(Fail::Skip(reason)) => r.skipped = Some(reason),
            Err(Fail::Error(message)) => {
                r.pass = false;
                r.error = Some(message);
            }
        }
        out.push(r);
    }

    fn skip(&self, out: &mut Vec<CheckResult>, id: &str, reason: &str) {
        self.record(out, id, || Err(Fail::Skip(reason.into())));
    }
}

/// Runs the configured check groups on one instance.
pub fn check_instance(
    g: &Graph,
    label: &str,
    params: &ModelParams,
    cfg: &SuiteConfig,
) -> Vec<CheckResult> {
    let inst = Instance::new(g, label, params, cfg);
    let mut out = Vec::new();
    for group in &cfg.checks {
        match group {
            CheckGroup::BuildingBlocks => building_blocks(&inst, &mut out),
            CheckGroup::Representation => representation(&inst, &mut out),
            CheckGroup::SbHb => sb_hb(&inst, &mut out),
            CheckGroup::NormLemmas => norm_lemmas(&inst, &mut out),
            CheckGroup::MainTheorems => main_theorems(&inst, &mut out),
            CheckGroup::Duality => duality(&inst, &mut out),
            CheckGroup::SwDual => sw_dual(&inst, &mut out),
            CheckGroup::Mixing => mixing(&inst, &mut out),
        }
    }
    out
}

fn building_blocks(inst: &Instance, out: &mut Vec<CheckResult>) {
    inst.record(out, "blocks.self-adjoint.m-star-m", || {
        let js = inst.joint()?;
        Ok(residual(sparse_adjointness(&js.m_star_m(), js.weights())))
    });
    inst.record(out, "blocks.self-adjoint.edge", || {
        let js = inst.joint()?;
        let worst = (0..js.n_edges())
            .map(|e| sparse_adjointness(js.edge(e), js.weights()))
            .fold(0.0, f64::max);
        Ok(residual(worst))
    });
    inst.record(out, "blocks.idempotent", || {
        let js = inst.joint()?;
        let worst = (0..js.n_edges())
            .map(|e| {
                let t = js.edge(e);
                csr_max_abs(&t.matmul(t).add_scaled(-1.0, t))
            })
            .fold(0.0, f64::max);
        Ok(residual(worst))
    });
    inst.record(out, "blocks.commute", || {
        let js = inst.joint()?;
        let mut worst = 0.0f64;
        for e in 0..js.n_edges() {
            for f in e + 1..js.n_edges() {
                let (a, b) = (js.edge(e), js.edge(f));
                worst = worst.max(csr_max_abs(&a.matmul(b).add_scaled(-1.0, &b.matmul(a))));
            }
        }
        Ok(residual(worst))
    });
    inst.record(out, "blocks.norm.edge", || {
        let js = inst.joint()?;
        let mut worst = (1.0, 0.0);
        for e in 0..js.n_edges() {
            let norm = max_abs_eigenvalue(&sparse_weighted_spectrum(js.edge(e), js.weights())?);
            if (norm - 1.0).abs() >= worst.1 {
                worst = (norm, (norm - 1.0).abs());
            }
        }
        Ok(Outcome::Equal {
            lhs: worst.0,
            rhs: 1.0,
            residual: worst.1,
        })
    });
    inst.record(out, "blocks.norm.m-star-m", || {
        let js = inst.joint()?;
        let norm = max_abs_eigenvalue(&sparse_weighted_spectrum(&js.m_star_m(), js.weights())?);
        Ok(equal_values(norm, 1.0))
    });
    inst.record(out, "blocks.average-positive", || {
        let js = inst.joint()?;
        let spectrum = sparse_weighted_spectrum(js.average(), js.weights())?;
        Ok(at_most(POSITIVITY_FLOOR, *spectrum.last().unwrap_or(&0.0)))
    });
}

fn representation(inst: &Instance, out: &mut Vec<CheckResult>) {
    let (g, params, caps) = (inst.g, inst.params, &inst.cfg.caps);
    inst.record(out, "repr.sw-operator", || {
        let direct = inst.matrix(Dynamics::Sw)?;
        let op = sw_matrix_operator(g, params, caps)?;
        Ok(residual(direct.entries.max_abs_diff(&op.entries)))
    });
    inst.record(out, "repr.sb-operator", || {
        let direct = inst.matrix(Dynamics::Sb)?;
        let op = sb_matrix_operator(g, params, caps)?;
        Ok(residual(direct.entries.max_abs_diff(&op.entries)))
    });
    inst.record(out, "repr.edge-order", || {
        let js = inst.joint()?;
        let m = g.n_edges();
        let order: Vec<usize> = (0..m).collect();
        let base = js.rc_product(&order);
        let reversed: Vec<usize> = order.iter().rev().copied().collect();
        let mut shuffled = order.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(m as u64));
        let worst = [reversed, shuffled]
            .iter()
            .map(|o| js.rc_product(o).max_abs_diff(&base))
            .fold(0.0, f64::max);
        Ok(residual(worst))
    });
    inst.record(out, "repr.potts-gap", || {
        let potts = spectral_gap(&sw_potts_matrix(g, params, caps)?)?.gap;
        Ok(equal_values(potts, inst.gap(Dynamics::Sw)?))
    });
    if g.n_edges() == 1 {
        inst.record(out, "repr.sw-equals-sb", || {
            let sw = inst.matrix(Dynamics::Sw)?;
            let sb = inst.matrix(Dynamics::Sb)?;
            Ok(residual(sw.entries.max_abs_diff(&sb.entries)))
        });
    }
}

/// `(1 - p(1 - 1/q))^{-1}`.
fn hb_comparison_constant(params: &ModelParams) -> f64 {
    1.0 / (1.0 - params.p() * (1.0 - 1.0 / params.qf()))
}

fn sb_hb(inst: &Instance, out: &mut Vec<CheckResult>) {
    let c = hb_comparison_constant(inst.params);
    inst.record(out, "sb-hb.lower", || {
        Ok(at_most(0.5 * inst.gap(Dynamics::Sb)?, inst.gap(Dynamics::Hb)?))
    });
    inst.record(out, "sb-hb.upper", || {
        Ok(at_most(inst.gap(Dynamics::Hb)?, c * inst.gap(Dynamics::LazySb)?))
    });
    let pairs = |f: &dyn Fn(f64, f64) -> (f64, f64)| -> Res<Outcome> {
        let hb = inst.matrix(Dynamics::Hb)?;
        let lazy = inst.matrix(Dynamics::LazySb)?;
        let n = hb.n();
        let items = (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)));
        Ok(worst_of(items.map(|(a, b)| f(hb.get(a, b), lazy.get(a, b)))))
    };
    inst.record(out, "sb-hb.entrywise-lower", || pairs(&|hb, lazy| (lazy, hb)));
    inst.record(out, "sb-hb.entrywise-upper", || pairs(&|hb, lazy| (hb, c * lazy)));
}

/// `⌈m ln(m/ε)⌉` or its base-2 variant.
pub(crate) fn norm_bound_power(m: usize, eps: f64, base2: bool) -> usize {
    let x = m as f64 / eps;
    let log = if base2 { x.log2() } else { x.ln() };
    (m as f64 * log).ceil().max(1.0) as usize
}

fn norm_lemmas(inst: &Instance, out: &mut Vec<CheckResult>) {
    let m = inst.g.n_edges();
    let k_max = inst.cfg.k_max;
    let bound_powers: Vec<(f64, bool, usize)> = inst
        .cfg
        .eps
        .iter()
        .flat_map(|&eps| [false, true].map(|b2| (eps, b2, norm_bound_power(m, eps, b2))))
        .collect();
    let top = bound_powers
        .iter()
        .map(|t| t.2)
        .max()
        .unwrap_or(0)
        .max(k_max + 1);
    // norms of M T^k M* - S_μ for k = 0..=top, and of the full product
    let norms: OnceCell<Res<(Vec<f64>, f64, f64)>> = OnceCell::new();
    let norms = || {
        norms
            .get_or_init(|| {
                let js = inst.joint()?;
                let mut seq = Vec::with_capacity(top + 1);
                for k in js.rc_powers(top) {
                    seq.push(weighted_norm(&js.centered(k))?);
                }
                let order: Vec<usize> = (0..m).collect();
                let full = weighted_norm(&js.centered(js.rc_product(&order)))?;
                let t = max_abs_eigenvalue(&sparse_weighted_spectrum(js.average(), js.weights())?);
                Ok((seq, full, t))
            })
            .as_ref()
            .map_err(Clone::clone)
    };
    inst.record(out, "norm.monotone", || {
        let (seq, _, t) = norms()?;
        Ok(worst_of((1..=k_max).map(|k| (seq[k + 1], t * seq[k]))))
    });
    inst.record(out, "norm.doubling", || {
        let (seq, _, _) = norms()?;
        let items = (1..)
            .map(|j| 1usize << j)
            .take_while(|&k| k <= k_max)
            .map(|k| (seq[1].powi(k as i32), seq[k]));
        Ok(worst_of(items))
    });
    inst.record(out, "norm.power", || {
        let (seq, _, _) = norms()?;
        Ok(worst_of((1..=k_max).map(|k| (seq[1].powi(2 * k as i32), seq[k]))))
    });
    for &(eps, base2, k) in &bound_powers {
        let id = if base2 {
            format!("norm.bound-log2.eps={eps}")
        } else {
            format!("norm.bound.eps={eps}")
        };
        inst.record(out, &id, || {
            let (seq, full, _) = norms()?;
            Ok(at_most(seq[k], (1.0 - eps) * full + eps))
        });
    }
}

/// `⌈m ln(2m)⌉`.
pub(crate) fn proof_constant(m: usize) -> f64 {
    (m as f64 * (2.0 * m as f64).ln()).ceil()
}

fn main_theorems(inst: &Instance, out: &mut Vec<CheckResult>) {
    let m = inst.g.n_edges();
    let mf = m as f64;
    let k = proof_constant(m);
    let sw = || inst.gap(Dynamics::Sw);
    inst.record(out, "main.sw-sb.proof", || {
        Ok(at_most(sw()?, 4.0 * k * inst.gap(Dynamics::Sb)?))
    });
    inst.record(out, "main.sw-hb.proof", || {
        Ok(at_most(sw()?, 8.0 * k * inst.gap(Dynamics::Hb)?))
    });
    let stated = [
        ("main.sw-sb.stated", Dynamics::Sb, 8.0, mf.ln()),
        ("main.sw-hb.stated", Dynamics::Hb, 16.0, mf.ln()),
        ("main.sw-sb.stated-log2", Dynamics::Sb, 8.0, mf.log2()),
        ("main.sw-hb.stated-log2", Dynamics::Hb, 16.0, mf.log2()),
    ];
    for (id, d, c, log) in stated {
        if m < 2 {
            inst.skip(out, id, "m<2");
        } else {
            inst.record(out, id, || Ok(at_most(sw()?, c * mf * log * inst.gap(d)?)));
        }
    }
    inst.record(out, "main.lower", || {
        Ok(at_most(inst.gap(Dynamics::LazySb)?, sw()?))
    });
}

fn duality(inst: &Instance, out: &mut Vec<CheckResult>) {
    let caps = &inst.cfg.caps;
    let m = inst.g.n_edges();
    let flip = |a: usize| dual_config(&inst.dual().unwrap().map, EdgeSubset(a as u64)).index();
    inst.record(out, "dual.measure", || {
        let d = inst.dual()?;
        let mu = rc_distribution(inst.g, inst.params, caps)?;
        let nu = rc_distribution(&d.map.dual, &d.params, caps)?;
        let mut worst = 0.0f64;
        for (a, &w) in mu.weights.iter().enumerate() {
            let rel = (w - nu.weights[flip(a)]).abs() / w.max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
        }
        Ok(residual(worst))
    });
    inst.record(out, "dual.hb-entries", || {
        let hb = inst.matrix(Dynamics::Hb)?;
        let dual = inst.dual_hb()?;
        let states = 1usize << m;
        let flipped: Vec<usize> = (0..states).map(flip).collect();
        let mut worst = 0.0f64;
        for a in 0..states {
            let row = hb.entries.row(a);
            let drow = dual.entries.row(flipped[a]);
            for b in 0..states {
                worst = worst.max((row[b] - drow[flipped[b]]).abs());
            }
        }
        Ok(residual(worst))
    });
    inst.record(out, "dual.hb-gap", || {
        let dual = spectral_gap(inst.dual_hb()?)?.gap;
        Ok(equal_values(inst.gap(Dynamics::Hb)?, dual))
    });
}

fn sw_dual(inst: &Instance, out: &mut Vec<CheckResult>) {
    let m = inst.g.n_edges();
    if m < 2 {
        inst.skip(out, "dual.sw-bound", "m<2");
        return;
    }
    inst.record(out, "dual.sw-bound", || {
        let d = inst.dual()?;
        let (p, q) = (inst.params.p(), inst.params.qf());
        let c = 16.0 * q.min(1.0 / (1.0 - p));
        let dual_sw = transition_matrix(&d.map.dual, &d.params, Dynamics::Sw, &inst.cfg.caps)?;
        let dual_gap = spectral_gap(&dual_sw)?.gap;
        let mf = m as f64;
        Ok(at_most(inst.gap(Dynamics::Sw)?, c * mf * mf.ln() * dual_gap))
    });
}

fn mixing(inst: &Instance, out: &mut Vec<CheckResult>) {
    let caps = &inst.cfg.caps;
    for d in [Dynamics::Sw, Dynamics::Hb, Dynamics::Sb] {
        let computed: OnceCell<Res<(usize, f64, f64, f64)>> = OnceCell::new();
        let values = || {
            computed
                .get_or_init(|| {
                    let pm = inst.matrix(d)?;
                    let gap = inst.gap(d)?;
                    let pi_min = rc_distribution(inst.g, inst.params, caps)?.min_positive();
                    let b = gap_mixing_bounds(inst.g, inst.params, gap, pi_min);
                    let limit = b.upper_general.max(b.upper_rc).ceil() as usize + 1;
                    let tau = mixing_time_with_limit(pm, inst.cfg.convention, caps, limit)?;
                    Ok((tau, b.lower, b.upper_general, b.upper_rc))
                })
                .as_ref()
                .map_err(Clone::clone)
        };
        let name = d.name();
        inst.record(out, &format!("mixing.{name}.lower"), || {
            let &(tau, lower, _, _) = values()?;
            Ok(at_most(lower, tau as f64))
        });
        inst.record(out, &format!("mixing.{name}.upper"), || {
            let &(tau, _, upper, _) = values()?;
            Ok(at_most(tau as f64, upper))
        });
        inst.record(out, &format!("mixing.{name}.upper-rc"), || {
            let &(tau, _, _, upper) = values()?;
            Ok(at_most(tau as f64, upper))
        });
    }
}
