//! Named numeric checks over exact small instances and the suite runner
//! that turns them into a JSON-lines report.

mod checks;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::graph::{Family, GraphSpec};
use crate::measures::{self_dual, ModelParams};
use crate::spectral::MixingConvention;
use crate::{Caps, Error, Result, VERSION};

pub use checks::check_instance;

/// Default tolerance for equality checks.
pub const DEFAULT_TOL_EQUALITY: f64 = 1e-10;
/// Default slack for inequality checks.
pub const DEFAULT_TOL_INEQUALITY: f64 = 1e-9;
/// Default `ε` values for the norm bound.
pub const DEFAULT_EPS: [f64; 2] = [0.25, 0.5];
/// Default largest power in the norm-sequence checks.
pub const DEFAULT_K_MAX: usize = 8;

/// One line of the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub graph: String,
    pub p: f64,
    pub q: u32,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    /// `rhs - lhs` for inequalities, the residual for equalities.
    pub margin: Option<f64>,
    pub pass: bool,
    pub tol: f64,
    pub skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckResult {
    pub fn is_skipped(&self) -> bool {
        self.skipped.is_some()
    }

    /// True when `margin` is a residual rather than `rhs - lhs`.
    pub fn is_equality(&self) -> bool {
        checks::is_equality(&self.check)
    }
}

/// Groups of checks selectable with `--checks`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckGroup {
    BuildingBlocks,
    Representation,
    SbHb,
    NormLemmas,
    MainTheorems,
    Duality,
    SwDual,
    Mixing,
}

impl CheckGroup {
    pub const ALL: [CheckGroup; 8] = [
        CheckGroup::BuildingBlocks,
        CheckGroup::Representation,
        CheckGroup::SbHb,
        CheckGroup::NormLemmas,
        CheckGroup::MainTheorems,
        CheckGroup::Duality,
        CheckGroup::SwDual,
        CheckGroup::Mixing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckGroup::BuildingBlocks => "building-blocks",
            CheckGroup::Representation => "representation",
            CheckGroup::SbHb => "sb-hb",
            CheckGroup::NormLemmas => "norm-lemmas",
            CheckGroup::MainTheorems => "main-theorems",
            CheckGroup::Duality => "duality",
            CheckGroup::SwDual => "sw-dual",
            CheckGroup::Mixing => "mixing",
        }
    }

    /// Parses `all`, an empty string, or a comma-separated list of names.
    pub fn parse_list(s: &str) -> Result<Vec<CheckGroup>> {
        let s = s.trim();
        if s == "all" {
            return Ok(Self::ALL.to_vec());
        }
        let mut out: Vec<CheckGroup> = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let g = part.parse()?;
            if !out.contains(&g) {
                out.push(g);
            }
        }
        out.sort();
        Ok(out)
    }
}

impl fmt::Display for CheckGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|g| g.name()).collect();
                Error::InvalidInput(format!(
                    "unknown check group `{s}` (expected all or one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Settings shared by every instance of a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub checks: Vec<CheckGroup>,
    pub tol_equality: f64,
    pub tol_inequality: f64,
    pub eps: Vec<f64>,
    pub k_max: usize,
    pub caps: Caps,
    pub convention: MixingConvention,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            checks: CheckGroup::ALL.to_vec(),
            tol_equality: DEFAULT_TOL_EQUALITY,
            tol_inequality: DEFAULT_TOL_INEQUALITY,
            eps: DEFAULT_EPS.to_vec(),
            k_max: DEFAULT_K_MAX,
            caps: Caps::default(),
            convention: MixingConvention::Literal,
        }
    }
}

impl SuiteConfig {
    /// Uses one tolerance for equalities and inequalities alike.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol_equality = tol;
        self.tol_inequality = tol;
        self
    }
}

/// One instance of the corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub graph: GraphSpec,
    pub p: f64,
    pub q: u32,
}

impl CorpusEntry {
    pub fn new(graph: GraphSpec, p: f64, q: u32) -> Self {
        CorpusEntry { graph, p, q }
    }
}

/// Graphs of the default corpus.
pub fn default_graphs() -> Vec<GraphSpec> {
    vec![
        GraphSpec::Family(Family::Edge, 1),
        GraphSpec::Family(Family::Path, 3),
        GraphSpec::Family(Family::Cycle, 3),
        GraphSpec::Family(Family::Cycle, 4),
        GraphSpec::Family(Family::Complete, 4),
        GraphSpec::Family(Family::Grid, 2),
        GraphSpec::Family(Family::Grid, 3),
    ]
}

/// Default corpus: seven graphs, `p ∈ {0.2, 0.5, self-dual, 0.8}` and
/// `q ∈ {2, 3}`.
pub fn default_corpus() -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    for graph in default_graphs() {
        for choice in 0..4 {
            for q in [2, 3] {
                let p = [0.2, 0.5, self_dual(q), 0.8][choice];
                out.push(CorpusEntry::new(graph.clone(), p, q));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportHeader {
    pub kind: &'static str,
    pub version: &'static str,
    pub checks: Vec<CheckGroup>,
    pub tol_equality: f64,
    pub tol_inequality: f64,
    pub eps: Vec<f64>,
    pub k_max: usize,
    pub cap_states: usize,
    pub cap_joint: usize,
    pub convention: &'static str,
    pub instances: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    pub kind: &'static str,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Worst recorded margin per check id: the largest residual for
    /// equalities, the smallest `rhs - lhs` for inequalities.
    pub worst_margin: BTreeMap<String, f64>,
}

/// A complete suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub header: ReportHeader,
    pub results: Vec<CheckResult>,
    pub summary: ReportSummary,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// Results for one check id.
    pub fn by_check<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a CheckResult> + 'a {
        self.results.iter().filter(move |r| r.check == id)
    }

    /// Header line, one line per result, then the summary line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        write_line(&mut w, &self.header)?;
        for r in &self.results {
            write_line(&mut w, r)?;
        }
        write_line(&mut w, &self.summary)
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }
}

fn write_line<W: Write, T: Serialize>(w: &mut W, value: &T) -> Result<()> {
    let text = serde_json::to_string(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    writeln!(w, "{text}")?;
    Ok(())
}

fn convention_name(c: MixingConvention) -> &'static str {
    match c {
        MixingConvention::Literal => "literal",
        MixingConvention::TotalVariation => "total-variation",
    }
}

/// Runs the selected checks over the corpus, instance by instance, in
/// corpus order. Instance failures are recorded in the report.
pub fn run_suite(corpus: &[CorpusEntry], cfg: &SuiteConfig) -> SuiteReport {
    let header = ReportHeader {
        kind: "header",
        version: VERSION,
        checks: cfg.checks.clone(),
        tol_equality: cfg.tol_equality,
        tol_inequality: cfg.tol_inequality,
        eps: cfg.eps.clone(),
        k_max: cfg.k_max,
        cap_states: cfg.caps.states,
        cap_joint: cfg.caps.joint,
        convention: convention_name(cfg.convention),
        instances: corpus.len(),
    };
    let mut results = Vec::new();
    if !cfg.checks.is_empty() {
        for entry in corpus {
            results.extend(run_entry(entry, cfg));
        }
    }
    let summary = summarize(&results);
    SuiteReport {
        header,
        results,
        summary,
    }
}

fn run_entry(entry: &CorpusEntry, cfg: &SuiteConfig) -> Vec<CheckResult> {
    let label = entry.graph.to_string();
    let built = entry
        .graph
        .build()
        .and_then(|g| ModelParams::new(entry.p, entry.q).map(|params| (g, params)));
    match built {
        Ok((g, params)) => check_instance(&g, &label, &params, cfg),
        Err(e) => vec![CheckResult {
            check: "instance".into(),
            graph: label,
            p: entry.p,
            q: entry.q,
            lhs: None,
            rhs: None,
            margin: None,
            pass: false,
            tol: cfg.tol_equality,
            skipped: None,
            error: Some(e.to_string()),
        }],
    }
}

fn summarize(results: &[CheckResult]) -> ReportSummary {
    let mut worst: BTreeMap<String, f64> = BTreeMap::new();
    for r in results {
        let Some(m) = r.margin else { continue };
        let eq = r.is_equality();
        worst
            .entry(r.check.clone())
            .and_modify(|w| *w = if eq { w.max(m) } else { w.min(m) })
            .or_insert(m);
    }
    let skipped = results.iter().filter(|r| r.is_skipped()).count();
    let failed = results.iter().filter(|r| !r.pass).count();
    ReportSummary {
        kind: "summary",
        total: results.len(),
        passed: results.len() - failed - skipped,
        failed,
        skipped,
        worst_margin: worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_lists_parse() {
        assert_eq!(CheckGroup::parse_list("all").unwrap().len(), 8);
        assert!(CheckGroup::parse_list("").unwrap().is_empty());
        assert_eq!(
            CheckGroup::parse_list("mixing, duality,mixing").unwrap(),
            vec![CheckGroup::Duality, CheckGroup::Mixing]
        );
        assert!(CheckGroup::parse_list("lemmas").is_err());
    }

    #[test]
    fn default_corpus_shape() {
        let c = default_corpus();
        assert_eq!(c.len(), 56);
        assert!(c.iter().any(|e| (e.p - self_dual(3)).abs() < 1e-15 && e.q == 3));
    }

    #[test]
    fn empty_selection_gives_empty_report() {
        let cfg = SuiteConfig {
            checks: Vec::new(),
            ..SuiteConfig::default()
        };
        let r = run_suite(&default_corpus(), &cfg);
        assert!(r.results.is_empty());
        assert!(r.all_passed());
        assert_eq!(r.to_jsonl().lines().count(), 2);
    }

    #[test]
    fn broken_instance_is_recorded() {
        let entry = CorpusEntry::new(GraphSpec::Family(Family::Edge, 1), 1.5, 2);
        let r = run_suite(&[entry], &SuiteConfig::default());
        assert_eq!(r.results.len(), 1);
        assert!(!r.all_passed());
        assert!(r.results[0].error.is_some());
    }

    #[test]
    fn result_lines_follow_the_schema() {
        let cfg = SuiteConfig {
            checks: vec![CheckGroup::SbHb],
            ..SuiteConfig::default()
        };
        let entry = CorpusEntry::new(GraphSpec::Family(Family::Edge, 1), 0.5, 2);
        let text = run_suite(&[entry], &cfg).to_jsonl();
        let line = text.lines().nth(1).unwrap();
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        for k in ["check", "graph", "p", "q", "lhs", "rhs", "margin", "pass", "tol", "skipped"] {
            assert!(keys.contains(&k), "missing {k}");
        }
        assert_eq!(v["graph"], "edge");
    }
}
