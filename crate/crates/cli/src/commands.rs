use std::path::Path;

use rcgap::dynamics::{sw_potts_matrix, transition_matrix, Dynamics, WeightedMatrix};
use rcgap::graph::{canonical_certificate, dual_graph, to_json, write_graph};
use rcgap::sampler::{
    autocorrelation, check_row, run_chain, ChainKind, Observables, Record, RunSpec, GENERATOR,
    GENERATOR_VERSION,
};
use rcgap::spectral::{gap_mixing_bounds, mixing_time_exact, spectral_gap, MixingConvention};
use rcgap::verify::{default_corpus, default_graphs, run_suite, CheckGroup, CorpusEntry, SuiteConfig};
use rcgap::{Caps, Graph, GraphSpec, ModelParams};
use serde_json::{json, Value};

use crate::args::{
    parse_grid, CheckRowArgs, ChainArgs, DualArgs, ExactDynamics, Format, GapArgs, GraphArgs,
    MixingArgs, ModelArgs, Observable, OutArgs, PValue, RunArgs, SweepArgs, TauArgs, VerifyArgs,
};
use crate::error::CliError;
use crate::output::{emit, float, sink, Header, Table};

struct Model {
    spec: GraphSpec,
    graph: Graph,
    params: ModelParams,
}

impl Model {
    fn load(args: &ModelArgs) -> Result<Self, CliError> {
        let params = ModelParams::new(args.p.resolve(args.q), args.q)?;
        let graph = args.graph.build()?;
        Ok(Model {
            spec: args.graph.clone(),
            graph,
            params,
        })
    }

    fn header(&self, command: &'static str) -> Header {
        Header::new(command)
            .with("graph", self.spec.to_string())
            .with("vertices", self.graph.n_vertices())
            .with("edges", self.graph.n_edges())
            .with("p", self.params.p())
            .with("q", self.params.q())
    }
}

fn caps_header(h: Header, caps: &Caps) -> Header {
    h.with("cap_states", caps.states).with("cap_joint", caps.joint)
}

fn format_or(out: &OutArgs, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
    let format = out.format.unwrap_or(default);
    if allowed.contains(&format) {
        Ok(format)
    } else {
        Err(CliError::Usage(format!(
            "--format {} is not supported here (use {})",
            format.name(),
            allowed.iter().map(|f| f.name()).collect::<Vec<_>>().join(" or ")
        )))
    }
}

const TABLE_FORMATS: [Format; 3] = [Format::Text, Format::Csv, Format::Json];

fn exact_matrix(model: &Model, dynamics: ExactDynamics, caps: &Caps) -> Result<WeightedMatrix, CliError> {
    let rc = match dynamics {
        ExactDynamics::Sw => Dynamics::Sw,
        ExactDynamics::Hb => Dynamics::Hb,
        ExactDynamics::Sb => Dynamics::Sb,
        ExactDynamics::LazySb => Dynamics::LazySb,
        ExactDynamics::SwPotts => return Ok(sw_potts_matrix(&model.graph, &model.params, caps)?),
    };
    Ok(transition_matrix(&model.graph, &model.params, rc, caps)?)
}

pub fn exact_gap(args: &GapArgs) -> Result<(), CliError> {
    let format = format_or(&args.out, Format::Text, &TABLE_FORMATS)?;
    let model = Model::load(&args.model)?;
    let caps = args.caps.caps();
    let pm = exact_matrix(&model, args.dynamics, &caps)?;
    let report = spectral_gap(&pm)?;
    let header = caps_header(model.header("exact-gap").with("dynamics", args.dynamics.name()), &caps);
    let mut table = Table::new(vec![
        "states",
        "gap",
        "second_modulus",
        "second_eigenvalue",
        "smallest_eigenvalue",
    ]);
    table.push(vec![
        json!(report.states()),
        float(report.gap),
        float(report.second_modulus),
        report.second_largest().map_or(Value::Null, float),
        float(report.negative_tail),
    ]);
    emit(args.out.out.as_deref(), &table.render(&header, format))
}

pub fn exact_mixing(args: &MixingArgs) -> Result<(), CliError> {
    let format = format_or(&args.out, Format::Text, &TABLE_FORMATS)?;
    let model = Model::load(&args.model)?;
    let caps = args.caps.caps();
    let convention = MixingConvention::from(args.convention);
    let pm = exact_matrix(&model, args.dynamics, &caps)?;
    let report = spectral_gap(&pm)?;
    let tau = mixing_time_exact(&pm, convention, &caps)?;
    let pi_min = pm
        .weights
        .iter()
        .copied()
        .filter(|&w| w > 0.0)
        .fold(f64::INFINITY, f64::min);
    let bounds = gap_mixing_bounds(&model.graph, &model.params, report.gap, pi_min);
    let convention_name = match convention {
        MixingConvention::Literal => "literal",
        MixingConvention::TotalVariation => "total-variation",
    };
    let header = caps_header(
        model
            .header("exact-mixing")
            .with("dynamics", args.dynamics.name())
            .with("convention", convention_name),
        &caps,
    );
    let upper_rc = if args.dynamics == ExactDynamics::SwPotts {
        Value::Null
    } else {
        float(bounds.upper_rc)
    };
    let mut table = Table::new(vec![
        "states",
        "gap",
        "mixing_time",
        "lower",
        "upper_general",
        "upper_rc",
    ]);
    table.push(vec![
        json!(report.states()),
        float(report.gap),
        json!(tau),
        float(bounds.lower),
        float(bounds.upper_general),
        upper_rc,
    ]);
    emit(args.out.out.as_deref(), &table.render(&header, format))
}

fn corpus(args: &VerifyArgs) -> Vec<CorpusEntry> {
    if args.graph.is_empty() && args.p.is_empty() && args.q.is_empty() {
        return default_corpus();
    }
    let graphs = if args.graph.is_empty() {
        default_graphs()
    } else {
        args.graph.clone()
    };
    let ps = if args.p.is_empty() {
        vec![
            PValue::Value(0.2),
            PValue::Value(0.5),
            PValue::SelfDual,
            PValue::Value(0.8),
        ]
    } else {
        args.p.clone()
    };
    let qs = if args.q.is_empty() { vec![2, 3] } else { args.q.clone() };
    let mut entries = Vec::new();
    for g in &graphs {
        for &p in &ps {
            for &q in &qs {
                entries.push(CorpusEntry::new(g.clone(), p.resolve(q), q));
            }
        }
    }
    entries
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    format_or(&args.out, Format::Json, &[Format::Json])?;
    let checks = CheckGroup::parse_list(&args.checks).map_err(|e| CliError::Usage(e.to_string()))?;
    if args.eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(CliError::Usage("--eps values must lie in (0,1)".into()));
    }
    let mut cfg = SuiteConfig {
        checks,
        eps: args.eps.clone(),
        k_max: args.k_max,
        caps: args.caps.caps(),
        convention: args.convention.into(),
        ..SuiteConfig::default()
    };
    if let Some(tol) = args.tol {
        if !(tol >= 0.0) {
            return Err(CliError::Usage("--tol must be non-negative".into()));
        }
        cfg = cfg.with_tol(tol);
    }
    let report = run_suite(&corpus(args), &cfg);
    let mut w = sink(args.out.out.as_deref())?;
    report.write_jsonl(&mut w)?;
    w.flush()?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{} of {} checks failed",
            report.summary.failed, report.summary.total
        )))
    }
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let format = format_or(&args.out, Format::Csv, &TABLE_FORMATS)?;
    let grid = parse_grid(&args.p).map_err(CliError::Usage)?;
    let params: Vec<ModelParams> = grid
        .iter()
        .map(|&p| ModelParams::new(p, args.q))
        .collect::<Result<_, _>>()?;
    let graph = args.graph.build()?;
    let caps = args.caps.caps();
    caps.check_states(graph.n_edges())?;
    let m = graph.n_edges();
    let ratio_bound = (m >= 2).then(|| 16.0 * m as f64 * (m as f64).ln());
    let mut table = Table::new(vec!["p", "gap_sw", "gap_hb", "gap_sb", "ratio_sw_hb"]);
    let mut violations = Vec::new();
    for params in &params {
        let gap = |d: Dynamics| -> Result<f64, CliError> {
            Ok(spectral_gap(&transition_matrix(&graph, params, d, &caps)?)?.gap)
        };
        let (sw, hb, sb) = (gap(Dynamics::Sw)?, gap(Dynamics::Hb)?, gap(Dynamics::Sb)?);
        let ratio = sw / hb;
        if let Some(bound) = ratio_bound {
            if !(ratio <= bound) {
                violations.push(format!("p={}: ratio {ratio} exceeds {bound}", params.p()));
            }
        }
        table.push(vec![float(params.p()), float(sw), float(hb), float(sb), float(ratio)]);
    }
    let header = caps_header(
        Header::new("sweep")
            .with("graph", args.graph.to_string())
            .with("vertices", graph.n_vertices())
            .with("edges", m)
            .with("q", args.q)
            .with("p_grid", args.p.clone())
            .with("ratio_bound", ratio_bound.map_or(Value::Null, float)),
        &caps,
    );
    emit(args.out.out.as_deref(), &table.render(&header, format))?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(violations.join("; ")))
    }
}

fn run_spec(chain: &ChainArgs, steps: u64, burnin: u64, thin: u64) -> Result<RunSpec, CliError> {
    let m = &chain.model;
    let params = ModelParams::new(m.p.resolve(m.q), m.q)?;
    let mut spec = RunSpec::new(m.graph.clone(), params, chain.dynamics, steps, chain.seed);
    spec.burnin = burnin;
    spec.thin = thin;
    Ok(spec)
}

pub fn sample_run(args: &RunArgs) -> Result<(), CliError> {
    format_or(&args.out, Format::Csv, &[Format::Csv])?;
    let mut spec = run_spec(&args.chain, args.steps, args.burnin, args.thin)?;
    if let Some(list) = &args.observables {
        spec.observables = Observables::parse(list).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let run = run_chain(&spec)?;
    let mut w = sink(args.out.out.as_deref())?;
    run.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn chain_header(command: &'static str, chain: &ChainArgs, params: &ModelParams) -> Header {
    Header::new(command)
        .with("generator", GENERATOR)
        .with("generator_version", GENERATOR_VERSION)
        .with("seed", chain.seed)
        .with("graph", chain.model.graph.to_string())
        .with("chain", chain.dynamics.name())
        .with("p", params.p())
        .with("q", params.q())
}

pub fn sample_check_row(args: &CheckRowArgs) -> Result<(), CliError> {
    let format = format_or(&args.out, Format::Text, &TABLE_FORMATS)?;
    let model = Model::load(&args.chain.model)?;
    let caps = args.caps.caps();
    let check = check_row(
        &model.graph,
        &model.params,
        args.chain.dynamics,
        args.state,
        args.samples,
        args.chain.seed,
        &caps,
    )?;
    let pass = check.tv < args.tol;
    let header = caps_header(
        chain_header("sample-check-row", &args.chain, &model.params)
            .with("state", args.state)
            .with("samples", args.samples)
            .with("tol", args.tol),
        &caps,
    );
    let mut table = Table::new(vec!["states", "samples", "tv", "tol", "pass"]);
    table.push(vec![
        json!(check.exact.len()),
        json!(check.samples),
        float(check.tv),
        float(args.tol),
        json!(pass),
    ]);
    emit(args.out.out.as_deref(), &table.render(&header, format))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "total variation {} is not below {}",
            check.tv, args.tol
        )))
    }
}

fn observable_value(obs: Observable, r: &Record) -> f64 {
    match obs {
        Observable::Edges => r.edges as f64,
        Observable::Components => r.components as f64,
        Observable::Largest => r.largest as f64,
        Observable::Magnetization => r.magnetization.unwrap_or(f64::NAN),
    }
}

fn observable_name(obs: Observable) -> &'static str {
    match obs {
        Observable::Edges => "edges",
        Observable::Components => "components",
        Observable::Largest => "largest",
        Observable::Magnetization => "magnetization",
    }
}

pub fn sample_tau(args: &TauArgs) -> Result<(), CliError> {
    let format = format_or(&args.out, Format::Text, &TABLE_FORMATS)?;
    if args.observable == Observable::Magnetization && args.chain.dynamics != ChainKind::SwPotts {
        return Err(CliError::Usage(
            "magnetization is only defined for the sw-potts chain".into(),
        ));
    }
    let spec = run_spec(&args.chain, args.steps, args.burnin, args.thin)?;
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let run = run_chain(&spec)?;
    let series = run.series(|r| observable_value(args.observable, r));
    let ac = autocorrelation(&series).map_err(|e| CliError::Usage(e.to_string()))?;
    let header = chain_header("sample-tau", &args.chain, &spec.params)
        .with("steps", args.steps)
        .with("burnin", args.burnin)
        .with("thin", args.thin)
        .with("observable", observable_name(args.observable));
    let mut table = Table::new(vec!["samples", "tau", "window", "zero_variance"]);
    table.push(vec![
        json!(series.len()),
        float(ac.tau),
        json!(ac.window),
        json!(ac.zero_variance),
    ]);
    emit(args.out.out.as_deref(), &table.render(&header, format))
}

fn graph_value(g: &Graph) -> Value {
    serde_json::from_str(&to_json(g)).expect("graph json is valid")
}

fn print_json(doc: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(doc).expect("json values serialize");
    text.push('\n');
    emit(None, &text)
}

fn write_graph_file(g: &Graph, path: &Path) -> Result<(), CliError> {
    write_graph(g, path).map_err(|e| match e {
        rcgap::Error::Io(io) => CliError::io(path, io),
        other => CliError::Core(other),
    })
}

pub fn dual(args: &DualArgs) -> Result<(), CliError> {
    format_or(&args.out, Format::Json, &[Format::Json])?;
    let graph = args.graph.build()?;
    let map = dual_graph(&graph)?;
    let double = dual_graph(&map.dual)?;
    let isomorphic = match (canonical_certificate(&graph), canonical_certificate(&double.dual)) {
        (Ok(a), Ok(b)) => json!(a == b),
        _ => Value::Null,
    };
    let pairing: Vec<Value> = (0..graph.n_edges())
        .map(|e| {
            let (u, v) = graph.edge(e);
            let (f, g) = map.dual.edge(e);
            json!({ "edge": e, "primal": [u, v], "dual": [f, g] })
        })
        .collect();
    let header = Header::new("dual")
        .with("graph", args.graph.to_string())
        .with("out", args.out.out.as_ref().map(|p| p.display().to_string()));
    let doc = json!({
        "header": header.to_json(),
        "primal": graph_value(&graph),
        "dual": graph_value(&map.dual),
        "faces": map.faces,
        "pairing": pairing,
        "double_dual_isomorphic": isomorphic,
    });
    if let Some(path) = &args.out.out {
        write_graph_file(&map.dual, path)?;
    }
    print_json(&doc)
}

pub fn graph(args: &GraphArgs) -> Result<(), CliError> {
    format_or(&args.out, Format::Json, &[Format::Json])?;
    let graph = args.graph.build()?;
    let loops = (0..graph.n_edges()).filter(|&e| graph.is_loop(e)).count();
    let degrees: Vec<usize> = (0..graph.n_vertices()).map(|v| graph.degree(v)).collect();
    let header = Header::new("graph")
        .with("graph", args.graph.to_string())
        .with("out", args.out.out.as_ref().map(|p| p.display().to_string()));
    let doc = json!({
        "header": header.to_json(),
        "vertices": graph.n_vertices(),
        "edges": graph.n_edges(),
        "loops": loops,
        "connected": graph.is_connected(),
        "embedded": graph.has_rotations(),
        "max_degree": degrees.iter().copied().max().unwrap_or(0),
        "graph": graph_value(&graph),
    });
    if let Some(path) = &args.out.out {
        write_graph_file(&graph, path)?;
    }
    print_json(&doc)
}
