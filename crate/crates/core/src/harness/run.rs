//! Batch execution and persistence of experiment runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::chart::{emit_chart, Band, ChartSpec};
use super::config::{Charges, Experiment, ExperimentConfig, Family};
use crate::drunkwalk::{run_trials, s4_budget, select_target, Strategy, WalkTrace};
use crate::error::{Error, Result};
use crate::formulas::{
    dimacs_emit, dimacs_parse, gen_control_family, gen_random_ksat, margulis_expander, random_charges, round_half_even,
    tseitin, CnfFormula,
};
use crate::lineartest::xor_closure_test_with;
use crate::rng;
use crate::scaling::{
    conjoined_scaling, fit_scaling, log_conflicts, median_series, run_scaling, FitModel, ScalingFamily, ScalingFit,
    ScalingPoint,
};
use crate::shattering::{default_tau, shatter_report};
use crate::solver::{external_solve, resolve_solver_path, solve_with, SolveStatus, SolverConfig, SolverFingerprint};
use crate::topology::betti_of_formula;

/// Instances tried per item before a satisfiable one is declared missing.
pub const MAX_SAT_ATTEMPTS: u64 = 64;
pub const TOOL_VERSION: &str = concat!("solspace ", env!("CARGO_PKG_VERSION"));

const PROTOCOL_STREAM: u64 = u64::MAX;
const PAYLOAD_STREAM: u64 = u64::MAX - 1;

/// One item of a batch: its rows, or the error that stopped it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItemRecord {
    pub index: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub rows: Vec<Map<String, Value>>,
    /// Experiment-specific structured output.
    #[serde(skip_serializing_if = "Value::is_null", default)]
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub started_unix_ms: u128,
    pub wall_seconds: f64,
    pub item_seconds: Vec<f64>,
    /// Mean seconds per walk step, by strategy.
    #[serde(skip_serializing_if = "Map::is_empty", default)]
    pub step_seconds: Map<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub tool_version: String,
    pub solver: SolverFingerprint,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub external_solver: Option<PathBuf>,
    pub items: Vec<ItemRecord>,
    pub summary: Value,
    pub timing: Timing,
    pub run_dir: PathBuf,
}

impl RunRecord {
    pub fn failed_items(&self) -> usize {
        self.items.iter().filter(|i| i.error.is_some()).count()
    }
}

struct ItemOutput {
    instance_seed: Option<u64>,
    rows: Vec<Map<String, Value>>,
    detail: Value,
    traces: Vec<WalkTrace>,
}

fn row(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// CSV columns, in order, for each experiment.
pub fn columns(exp: Experiment) -> &'static [&'static str] {
    match exp {
        Experiment::Gen => &["index", "seed", "instance_seed", "family", "n", "clauses", "density", "file"],
        Experiment::Solve => &[
            "index", "seed", "instance_seed", "n", "clauses", "status", "conflicts", "decisions", "propagations", "restarts",
        ],
        Experiment::Homology => &[
            "index", "seed", "instance_seed", "n", "solutions", "face_counts", "betti", "top_boundary_rank", "euler_faces",
            "euler_betti", "euler_identity", "field",
        ],
        Experiment::Shatter => &[
            "index", "seed", "instance_seed", "n", "alpha", "probes_run", "sat_probes", "unsat_probes",
            "budget_exhausted_probes", "solutions_found", "cluster_count_lower_bound", "largest_cluster", "intra_mean",
            "intra_diameter", "inter_mean", "ratio", "inter_over_n", "linkage_threshold",
        ],
        Experiment::Drunkwalk => &[
            "index", "seed", "instance_seed", "n", "strategy", "trials", "budget", "hits", "hit_rate", "monotone_traces",
            "mean_final_distance", "start_distance", "tau",
        ],
        Experiment::Xortest => &[
            "index", "seed", "instance_seed", "n", "alpha", "pool_source", "pool_size", "triples_tested", "violations",
            "violation_rate",
        ],
        Experiment::Scaling => &["index", "seed", "series", "size", "n", "status", "conflicts", "log2_conflicts", "usable"],
    }
}

fn unix_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

/// Validates, executes and persists one experiment.
pub fn run(config: &ExperimentConfig) -> Result<RunRecord> {
    config.validate()?;
    let started_unix_ms = unix_ms();
    let started = Instant::now();
    let run_dir = create_run_dir(config, started_unix_ms)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidParameters(format!("cannot build worker pool: {e}")))?;
    let input = match &config.input {
        Some(p) => Some(dimacs_parse(&fs::read_to_string(p).map_err(|e| Error::io(p, e))?)?),
        None => None,
    };
    let item_count = if config.experiment == Experiment::Scaling { 1 } else { config.seeds };

    let results: Vec<(ItemRecord, Vec<WalkTrace>, f64)> = pool.install(|| {
        (0..item_count)
            .into_par_iter()
            .map(|i| {
                let seed = rng::derive(config.master_seed, i as u64);
                let t0 = Instant::now();
                let out = run_item(config, input.as_ref(), i, seed, &run_dir);
                let secs = t0.elapsed().as_secs_f64();
                match out {
                    Ok(o) => {
                        let rec = ItemRecord {
                            index: i,
                            seed,
                            instance_seed: o.instance_seed,
                            error: None,
                            rows: o.rows,
                            detail: o.detail,
                        };
                        (rec, o.traces, secs)
                    }
                    Err(e) => (
                        ItemRecord { index: i, seed, instance_seed: None, error: Some(e.to_string()), rows: vec![], detail: Value::Null },
                        vec![],
                        secs,
                    ),
                }
            })
            .collect()
    });

    let mut items = Vec::with_capacity(results.len());
    let mut traces = Vec::new();
    let mut item_seconds = Vec::with_capacity(results.len());
    for (rec, tr, secs) in results {
        items.push(rec);
        traces.extend(tr);
        item_seconds.push(secs);
    }
    let step_seconds = mean_step_seconds(&traces);
    for t in &mut traces {
        t.step_seconds.clear();
    }

    let summary = summarize(config, &items);
    write_outputs(config, &run_dir, &items, &summary, &traces)?;

    let external_solver = if config.experiment == Experiment::Solve {
        resolve_solver_path(config.solver_path.as_deref())
    } else {
        None
    };
    let record = RunRecord {
        config: config.clone(),
        tool_version: TOOL_VERSION.to_string(),
        solver: SolverConfig::default().with_budget(config.budget).fingerprint(),
        external_solver,
        items,
        summary,
        timing: Timing {
            started_unix_ms,
            wall_seconds: started.elapsed().as_secs_f64(),
            item_seconds,
            step_seconds,
        },
        run_dir: run_dir.clone(),
    };
    write_file(&run_dir.join("run.json"), &(serde_json::to_string_pretty(&record)? + "\n"))?;
    Ok(record)
}

fn create_run_dir(config: &ExperimentConfig, ms: u128) -> Result<PathBuf> {
    let parent = config.output_dir.join(config.experiment.name());
    fs::create_dir_all(&parent).map_err(|e| Error::io(&parent, e))?;
    let base = format!("{ms}-{}", config.master_seed);
    for k in 0.. {
        let name = if k == 0 { base.clone() } else { format!("{base}-{k}") };
        let dir = parent.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(Error::io(&dir, e)),
        }
    }
    unreachable!()
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn mean_step_seconds(traces: &[WalkTrace]) -> Map<String, Value> {
    let mut out = Map::new();
    for s in Strategy::ALL {
        let secs: Vec<f64> = traces.iter().filter(|t| t.strategy == s).flat_map(|t| t.step_seconds.iter().copied()).collect();
        if !secs.is_empty() {
            out.insert(s.to_string(), json!(secs.iter().sum::<f64>() / secs.len() as f64));
        }
    }
    out
}

/// Generates the instance for one item. With `require_sat`, unsatisfiable
/// draws are replaced by `derive(seed, j)` for `j = 1, 2, ...`.
fn instance(config: &ExperimentConfig, seed: u64, require_sat: bool) -> Result<(CnfFormula, u64)> {
    for j in 0..MAX_SAT_ATTEMPTS {
        let s = if j == 0 { seed } else { rng::derive(seed, j) };
        let f = generate(config, s)?;
        if !require_sat {
            return Ok((f, s));
        }
        match solve_with(&f, &[], SolverConfig::default().with_budget(config.budget))?.status {
            SolveStatus::Sat => return Ok((f, s)),
            SolveStatus::Unsat => continue,
            SolveStatus::BudgetExhausted => return Err(Error::BudgetExhausted { budget: config.budget }),
        }
    }
    Err(Error::InsufficientSample(format!("no satisfiable instance in {MAX_SAT_ATTEMPTS} draws")))
}

fn generate(config: &ExperimentConfig, seed: u64) -> Result<CnfFormula> {
    let n = config.n.unwrap_or(0);
    let alpha = config.alpha.unwrap_or(0.0);
    match config.family {
        Family::RandomKsat => gen_random_ksat(n, alpha, config.k, seed),
        Family::Tseitin => {
            let g = margulis_expander(config.m.unwrap_or(0))?;
            let charges = random_charges(g.num_vertices(), config.charges == Charges::Odd, &mut rng::stream(seed, 2));
            Ok(tseitin(&g, &charges)?.into_formula())
        }
        other => {
            let family = other.control().expect("control family");
            gen_control_family(family, n, round_half_even(alpha * n as f64), seed)
        }
    }
}

fn run_item(config: &ExperimentConfig, input: Option<&CnfFormula>, index: usize, seed: u64, run_dir: &Path) -> Result<ItemOutput> {
    let exp = config.experiment;
    if exp == Experiment::Scaling {
        return scaling_item(config, seed);
    }
    let needs_sat = config.require_sat && matches!(exp, Experiment::Shatter | Experiment::Drunkwalk | Experiment::Xortest);
    let (f, instance_seed) = match input {
        Some(f) => (f.clone(), None),
        None => {
            let (f, s) = instance(config, seed, needs_sat)?;
            (f, Some(s))
        }
    };
    let protocol_seed = rng::derive(seed, PROTOCOL_STREAM);
    let mut base = row(vec![
        ("index", json!(index)),
        ("seed", json!(seed)),
        ("instance_seed", json!(instance_seed)),
        ("n", json!(f.num_vars)),
    ]);
    let mut traces = Vec::new();
    let mut detail = Value::Null;
    let rows = match exp {
        Experiment::Gen => {
            let file = format!("instance-{index}.cnf");
            write_file(&run_dir.join(&file), &dimacs_emit(&f))?;
            base.insert("family".into(), json!(format!("{:?}", config.family)));
            base.insert("clauses".into(), json!(f.num_clauses()));
            base.insert("density".into(), json!(f.density()));
            base.insert("file".into(), json!(file));
            vec![base]
        }
        Experiment::Solve => {
            let r = match resolve_solver_path(config.solver_path.as_deref()) {
                Some(p) => external_solve(&f, &p)?,
                None => solve_with(&f, &[], SolverConfig::default().with_budget(config.budget))?,
            };
            base.insert("clauses".into(), json!(f.num_clauses()));
            base.insert("status".into(), json!(r.status.to_string()));
            let stats = r.stats;
            base.insert("conflicts".into(), json!(stats.map(|s| s.conflicts)));
            base.insert("decisions".into(), json!(stats.map(|s| s.decisions)));
            base.insert("propagations".into(), json!(stats.map(|s| s.propagations)));
            base.insert("restarts".into(), json!(stats.map(|s| s.restarts)));
            detail = json!({ "witness": r.witness.map(|w| w.to_bitstring()) });
            vec![base]
        }
        Experiment::Homology => {
            let b = betti_of_formula(&f, config.max_dim)?;
            base.insert("solutions".into(), json!(b.face_counts.first().copied().unwrap_or(0)));
            base.insert("face_counts".into(), json!(join(&b.face_counts)));
            base.insert("betti".into(), json!(join(&b.betti)));
            base.insert("top_boundary_rank".into(), json!(b.top_boundary_rank));
            base.insert("euler_faces".into(), json!(b.euler_from_faces()));
            base.insert("euler_betti".into(), json!(b.euler_from_betti()));
            base.insert("euler_identity".into(), json!(b.satisfies_euler_identity()));
            base.insert("field".into(), json!(b.field));
            detail = serde_json::to_value(&b)?;
            vec![base]
        }
        Experiment::Shatter => {
            let tau = config.tau.unwrap_or_else(|| default_tau(f.num_vars));
            let r = shatter_report(&f, config.fraction, config.probes, tau, protocol_seed)?;
            base.insert("alpha".into(), json!(f.density()));
            let v = serde_json::to_value(&r)?;
            for c in columns(exp) {
                if let Some(x) = v.get(*c) {
                    base.insert(c.to_string(), x.clone());
                }
            }
            detail = v;
            vec![base]
        }
        Experiment::Drunkwalk => {
            let tau = config.tau.unwrap_or_else(|| default_tau(f.num_vars));
            let target = select_target(&f, config.probes, tau, protocol_seed)?;
            let mut rows = Vec::new();
            for (si, &s) in config.strategies.iter().enumerate() {
                let budget = if s == Strategy::S4 { s4_budget(config.steps, f.num_vars) } else { config.steps };
                let ts = run_trials(&f, s, &target, budget, config.trials, rng::derive(protocol_seed, si as u64))?;
                let hits = ts.iter().filter(|t| t.hit()).count();
                let mut r = base.clone();
                r.insert("strategy".into(), json!(s.to_string()));
                r.insert("trials".into(), json!(config.trials));
                r.insert("budget".into(), json!(budget));
                r.insert("hits".into(), json!(hits));
                r.insert("hit_rate".into(), json!(hits as f64 / config.trials as f64));
                r.insert("monotone_traces".into(), json!(ts.iter().filter(|t| t.strictly_approaches()).count()));
                let finals: usize = ts.iter().map(|t| t.steps.last().map_or(0, |s| s.distance_to_target)).sum();
                r.insert("mean_final_distance".into(), json!(finals as f64 / ts.len() as f64));
                r.insert("start_distance".into(), json!(ts[0].steps[0].distance_to_target));
                r.insert("tau".into(), json!(tau));
                rows.push(r);
                traces.extend(ts);
            }
            detail = json!({ "target": target.target.to_bitstring(), "tau": tau });
            rows
        }
        Experiment::Xortest => {
            let r = xor_closure_test_with(&f, config.triples, config.probes, protocol_seed)?;
            base.insert("alpha".into(), json!(f.density()));
            let v = serde_json::to_value(&r)?;
            for c in columns(exp) {
                if let Some(x) = v.get(*c) {
                    base.insert(c.to_string(), x.clone());
                }
            }
            detail = json!({ "sampling": r.sampling });
            vec![base]
        }
        Experiment::Scaling => unreachable!(),
    };
    Ok(ItemOutput { instance_seed, rows, detail, traces })
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn scaling_family(config: &ExperimentConfig) -> ScalingFamily {
    match config.family {
        Family::Tseitin => ScalingFamily::Tseitin { odd_charge: config.charges == Charges::Odd },
        _ => ScalingFamily::RandomKsat { alpha: config.alpha.unwrap_or(0.0), k: config.k },
    }
}

/// Satisfiable random 3-SAT payload for conjoined scaling.
pub fn scaling_payload(config: &ExperimentConfig) -> Result<Option<CnfFormula>> {
    let Some(pn) = config.payload_n else { return Ok(None) };
    let mut payload_config = config.clone();
    payload_config.family = Family::RandomKsat;
    payload_config.n = Some(pn);
    payload_config.alpha = Some(config.payload_alpha);
    payload_config.k = 3;
    let (f, _) = instance(&payload_config, rng::derive(config.master_seed, PAYLOAD_STREAM), true)?;
    Ok(Some(f))
}

fn point_rows(index: usize, series: &str, points: &[ScalingPoint]) -> Vec<Map<String, Value>> {
    points
        .iter()
        .map(|p| {
            row(vec![
                ("index", json!(index)),
                ("seed", json!(p.seed)),
                ("series", json!(series)),
                ("size", json!(p.size)),
                ("n", json!(p.n)),
                ("status", json!(p.status.to_string())),
                ("conflicts", json!(p.conflicts)),
                ("log2_conflicts", json!(log_conflicts(p.conflicts))),
                ("usable", json!(p.usable())),
            ])
        })
        .collect()
}

fn default_model(config: &ExperimentConfig) -> FitModel {
    config.fit_model.unwrap_or(match config.family {
        Family::Tseitin => FitModel::ExpLinear,
        _ => FitModel::ExpTwoThirds,
    })
}

fn fit_value(points: &[ScalingPoint], model: FitModel) -> Value {
    match fit_scaling(points, model) {
        Ok(f) => serde_json::to_value(f).expect("fit serialises"),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn scaling_item(config: &ExperimentConfig, seed: u64) -> Result<ItemOutput> {
    let family = scaling_family(config);
    let bare = run_scaling(&family, &config.sizes, config.seeds_per_size, config.budget, seed)?;
    let model = default_model(config);
    let mut rows = point_rows(0, "core", &bare);
    let mut detail = json!({
        "family": family,
        "model": model,
        "fit": fit_value(&bare, model),
        "medians": median_series(&bare),
    });
    if let Some(payload) = scaling_payload(config)? {
        let joint = conjoined_scaling(&family, &payload, &config.sizes, config.seeds_per_size, config.budget, seed)?;
        rows.extend(point_rows(0, "conjoined", &joint));
        detail["payload_vars"] = json!(payload.num_vars);
        detail["conjoined_fit"] = fit_value(&joint, model);
        detail["conjoined_medians"] = json!(median_series(&joint));
    }
    Ok(ItemOutput { instance_seed: None, rows, detail, traces: vec![] })
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    Some(if k % 2 == 1 { v[k / 2] } else { (v[k / 2 - 1] + v[k / 2]) / 2.0 })
}

fn column_values(items: &[ItemRecord], col: &str) -> Vec<f64> {
    items.iter().flat_map(|i| &i.rows).filter_map(|r| r.get(col).and_then(Value::as_f64)).collect()
}

fn summarize(config: &ExperimentConfig, items: &[ItemRecord]) -> Value {
    let ok = items.iter().filter(|i| i.error.is_none()).count();
    let mut s = json!({
        "experiment": config.experiment,
        "items": items.len(),
        "items_failed": items.len() - ok,
        "alpha_c": super::ALPHA_C,
    });
    if let Some(a) = config.alpha {
        s["regime"] = json!(if a > super::ALPHA_C { "above alpha_c" } else { "below alpha_c" });
    }
    let medians = |cols: &[&str]| -> Map<String, Value> {
        cols.iter().map(|c| (format!("median_{c}"), json!(median(column_values(items, c))))).collect()
    };
    match config.experiment {
        Experiment::Shatter => {
            for (k, v) in medians(&["inter_over_n", "intra_mean", "ratio", "cluster_count_lower_bound", "solutions_found"]) {
                s[k] = v;
            }
        }
        Experiment::Xortest => {
            for (k, v) in medians(&["violation_rate", "pool_size"]) {
                s[k] = v;
            }
        }
        Experiment::Drunkwalk => {
            let mut by = Map::new();
            for st in &config.strategies {
                let rates: Vec<f64> = items
                    .iter()
                    .flat_map(|i| &i.rows)
                    .filter(|r| r.get("strategy").and_then(Value::as_str) == Some(&st.to_string()))
                    .filter_map(|r| r.get("hit_rate").and_then(Value::as_f64))
                    .collect();
                let mean = (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64);
                by.insert(st.to_string(), json!(mean));
            }
            s["hit_rate"] = Value::Object(by);
        }
        Experiment::Solve => {
            let mut counts = Map::new();
            for r in items.iter().flat_map(|i| &i.rows) {
                if let Some(st) = r.get("status").and_then(Value::as_str) {
                    let e = counts.entry(st.to_string()).or_insert(json!(0));
                    *e = json!(e.as_u64().unwrap_or(0) + 1);
                }
            }
            s["status_counts"] = Value::Object(counts);
        }
        Experiment::Homology => {
            let all = items.iter().flat_map(|i| &i.rows).all(|r| r.get("euler_identity") == Some(&json!(true)));
            s["euler_identity_all"] = json!(all);
        }
        Experiment::Scaling => {
            if let Some(d) = items.first().map(|i| &i.detail) {
                s["fit"] = d.get("fit").cloned().unwrap_or(Value::Null);
                if let Some(c) = d.get("conjoined_fit") {
                    s["conjoined_fit"] = c.clone();
                }
            }
        }
        Experiment::Gen => {}
    }
    s
}

fn csv_field(v: Option<&Value>) -> String {
    let s = match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

/// The batch as CSV: one row per result row, failed items as a row with
/// only `index`, `seed` and `error` filled.
pub fn to_csv(exp: Experiment, items: &[ItemRecord]) -> String {
    let cols = columns(exp);
    let mut out = cols.join(",") + ",error\n";
    for item in items {
        if let Some(e) = &item.error {
            let mut r = Map::new();
            r.insert("index".into(), json!(item.index));
            r.insert("seed".into(), json!(item.seed));
            let line: Vec<String> = cols.iter().map(|c| csv_field(r.get(*c))).collect();
            out += &format!("{},{}\n", line.join(","), csv_field(Some(&json!(e))));
            continue;
        }
        for r in &item.rows {
            let line: Vec<String> = cols.iter().map(|c| csv_field(r.get(*c))).collect();
            out += &line.join(",");
            out += ",\n";
        }
    }
    out
}

/// The chart for a batch, or `None` when there is nothing to plot.
pub fn chart_for(config: &ExperimentConfig, items: &[ItemRecord], summary: &Value) -> Option<ChartSpec> {
    let rows: Vec<&Map<String, Value>> = items.iter().flat_map(|i| &i.rows).collect();
    let num = |r: &Map<String, Value>, c: &str| r.get(c).and_then(Value::as_f64);
    let pts = |x: &str, y: &str| -> Vec<(f64, f64)> { rows.iter().filter_map(|r| Some((num(r, x)?, num(r, y)?))).collect() };
    let exp = config.experiment;
    let spec = match exp {
        Experiment::Gen => ChartSpec::new("generated instances", "index", "clauses", pts("index", "clauses")),
        Experiment::Solve => {
            let p = rows
                .iter()
                .filter_map(|r| Some((num(r, "index")?, log_conflicts(num(r, "conflicts")? as u64))))
                .collect();
            ChartSpec::new("solver conflicts", "instance", "log2 conflicts", p)
        }
        Experiment::Homology => ChartSpec::new("connected components", "instance", "beta_0", {
            rows.iter()
                .filter_map(|r| {
                    let b0 = r.get("betti")?.as_str()?.split(' ').next()?.parse::<f64>().ok()?;
                    Some((num(r, "index")?, b0))
                })
                .collect()
        }),
        Experiment::Shatter => {
            let mut c = ChartSpec::new("inter-cluster distance", "n", "inter / n", pts("n", "inter_over_n"));
            c.band = Some(Band { low: 0.35, high: 0.41, label: "reference band 0.35-0.41".into() });
            c
        }
        Experiment::Drunkwalk => {
            let p = rows
                .iter()
                .filter_map(|r| {
                    let s: Strategy = r.get("strategy")?.as_str()?.parse().ok()?;
                    let x = Strategy::ALL.iter().position(|&t| t == s)? as f64 + 1.0;
                    Some((x, num(r, "hit_rate")?))
                })
                .collect();
            ChartSpec::new("walk hit rate", "strategy (S1..S4)", "hit rate", p)
        }
        Experiment::Xortest => ChartSpec::new("XOR closure", "instance", "violation rate", pts("index", "violation_rate")),
        Experiment::Scaling => {
            let p = rows
                .iter()
                .filter(|r| r.get("series").and_then(Value::as_str) == Some("core") && r.get("usable") == Some(&json!(true)))
                .filter_map(|r| Some((num(r, "n")?, num(r, "log2_conflicts")?)))
                .collect();
            let mut c = ChartSpec::new("conflict scaling", "n", "log2 conflicts", p);
            c.overlay = summary.get("fit").and_then(|f| serde_json::from_value::<ScalingFit>(f.clone()).ok());
            c
        }
    };
    (!spec.points.is_empty()).then_some(spec)
}

fn write_outputs(config: &ExperimentConfig, dir: &Path, items: &[ItemRecord], summary: &Value, traces: &[WalkTrace]) -> Result<()> {
    write_file(&dir.join("data.csv"), &to_csv(config.experiment, items))?;
    let data = json!({ "experiment": config.experiment, "items": items, "summary": summary });
    write_file(&dir.join("data.json"), &(serde_json::to_string_pretty(&data)? + "\n"))?;
    if !traces.is_empty() {
        let mut text = String::new();
        for t in traces {
            text += &serde_json::to_string(t)?;
            text.push('\n');
        }
        write_file(&dir.join("traces.jsonl"), &text)?;
    }
    if let Some(spec) = chart_for(config, items, summary) {
        write_file(&dir.join("chart.svg"), &emit_chart(&spec)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(exp: Experiment, dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            n: Some(12),
            alpha: Some(3.0),
            seeds: 3,
            output_dir: dir.to_path_buf(),
            ..ExperimentConfig::new(exp)
        }
    }

    #[test]
    fn invalid_config_is_rejected_before_any_output() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(Experiment::Homology, dir.path());
        c.n = Some(30);
        assert!(matches!(run(&c), Err(Error::Config(_))));
        assert!(!dir.path().join("homology").exists());
    }

    #[test]
    fn homology_run_writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let rec = run(&cfg(Experiment::Homology, dir.path())).unwrap();
        assert_eq!(rec.items.len(), 3);
        assert_eq!(rec.failed_items(), 0);
        for f in ["data.csv", "data.json", "run.json", "chart.svg"] {
            assert!(rec.run_dir.join(f).is_file(), "{f}");
        }
        let csv = fs::read_to_string(rec.run_dir.join("data.csv")).unwrap();
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(rec.summary["euler_identity_all"], json!(true));
    }

    #[test]
    fn item_errors_are_recorded_and_batch_completes() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(Experiment::Xortest, dir.path());
        // At this density almost every draw is UNSAT and sat retries are off.
        c.alpha = Some(9.0);
        c.require_sat = false;
        let rec = run(&c).unwrap();
        assert_eq!(rec.items.len(), 3);
        assert!(rec.failed_items() > 0);
        let csv = fs::read_to_string(rec.run_dir.join("data.csv")).unwrap();
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn gen_writes_instances() {
        let dir = tempfile::tempdir().unwrap();
        let rec = run(&cfg(Experiment::Gen, dir.path())).unwrap();
        let text = fs::read_to_string(rec.run_dir.join("instance-1.cnf")).unwrap();
        let f = dimacs_parse(&text).unwrap();
        let g = gen_random_ksat(12, 3.0, 3, rng::derive(0, 1)).unwrap();
        assert_eq!((f.num_vars, f.clauses), (g.num_vars, g.clauses));
    }

    #[test]
    fn csv_quotes_fields() {
        assert_eq!(csv_field(Some(&json!("a,b"))), "\"a,b\"");
        assert_eq!(csv_field(Some(&json!(null))), "");
        assert_eq!(csv_field(Some(&json!(2.5))), "2.5");
    }
}
