//! Aggregate tables over persisted runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use super::config::Experiment;
use super::run::RunRecord;
use crate::error::{Error, Result};

/// Every `run.json` at or below `root`, sorted by path.
pub fn find_runs(root: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(p) = stack.pop() {
        if p.is_file() {
            if p.file_name().is_some_and(|n| n == "run.json") {
                out.push(p);
            }
            continue;
        }
        let entries = fs::read_dir(&p).map_err(|e| Error::io(&p, e))?;
        for e in entries {
            stack.push(e.map_err(|e| Error::io(&p, e))?.path());
        }
    }
    out.sort();
    Ok(out)
}

pub fn load_run(path: &Path) -> Result<RunRecord> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    Some(if k % 2 == 1 { v[k / 2] } else { (v[k / 2 - 1] + v[k / 2]) / 2.0 })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.3}"))
}

fn rows(runs: &[RunRecord], exp: Experiment) -> impl Iterator<Item = &serde_json::Map<String, Value>> {
    runs.iter()
        .filter(move |r| r.config.experiment == exp)
        .flat_map(|r| &r.items)
        .flat_map(|i| &i.rows)
}

/// Plain-text report of the runs under `root`: one line per run, then a
/// per-`n` shattering table and a strategy-by-`n` hit-rate table when such
/// runs are present.
pub fn report(root: &Path) -> Result<String> {
    let paths = find_runs(root)?;
    if paths.is_empty() {
        return Err(Error::UnsupportedInput(format!("no run.json under {}", root.display())));
    }
    let runs: Vec<RunRecord> = paths.iter().map(|p| load_run(p)).collect::<Result<_>>()?;
    let mut s = String::new();
    let _ = writeln!(s, "runs: {}", runs.len());
    for (p, r) in paths.iter().zip(&runs) {
        let _ = writeln!(
            s,
            "{:<10} items={:<4} failed={:<3} seed={:<20} {}",
            r.config.experiment.name(),
            r.items.len(),
            r.failed_items(),
            r.config.master_seed,
            p.parent().unwrap_or(p).display()
        );
    }

    let num = |r: &serde_json::Map<String, Value>, c: &str| r.get(c).and_then(Value::as_f64);

    let mut shatter: BTreeMap<u64, Vec<&serde_json::Map<String, Value>>> = BTreeMap::new();
    for r in rows(&runs, Experiment::Shatter) {
        if let Some(n) = r.get("n").and_then(Value::as_u64) {
            shatter.entry(n).or_default().push(r);
        }
    }
    if !shatter.is_empty() {
        let _ = writeln!(s, "\nshattering (medians over instances)");
        let _ = writeln!(s, "n,instances,solutions,clusters,intra_mean,inter_mean,ratio,inter_over_n");
        for (n, rs) in &shatter {
            let m = |c: &str| median(rs.iter().filter_map(|r| num(r, c)).collect());
            let _ = writeln!(
                s,
                "{n},{},{},{},{},{},{},{}",
                rs.len(),
                fmt_opt(m("solutions_found")),
                fmt_opt(m("cluster_count_lower_bound")),
                fmt_opt(m("intra_mean")),
                fmt_opt(m("inter_mean")),
                fmt_opt(m("ratio")),
                fmt_opt(m("inter_over_n"))
            );
        }
    }

    let mut walk: BTreeMap<(String, u64), Vec<f64>> = BTreeMap::new();
    for r in rows(&runs, Experiment::Drunkwalk) {
        if let (Some(st), Some(n), Some(h)) = (r.get("strategy").and_then(Value::as_str), r.get("n").and_then(Value::as_u64), num(r, "hit_rate")) {
            walk.entry((st.to_string(), n)).or_default().push(h);
        }
    }
    if !walk.is_empty() {
        let ns: Vec<u64> = {
            let mut v: Vec<u64> = walk.keys().map(|k| k.1).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let strategies: Vec<String> = {
            let mut v: Vec<String> = walk.keys().map(|k| k.0.clone()).collect();
            v.dedup();
            v
        };
        let _ = writeln!(s, "\nwalk hit rate (mean over instances)");
        let header: Vec<String> = ns.iter().map(|n| format!("n={n}")).collect();
        let _ = writeln!(s, "strategy,{}", header.join(","));
        for st in strategies {
            let cells: Vec<String> = ns
                .iter()
                .map(|n| {
                    walk.get(&(st.clone(), *n))
                        .map_or_else(|| "-".into(), |v| format!("{:.3}", v.iter().sum::<f64>() / v.len() as f64))
                })
                .collect();
            let _ = writeln!(s, "{st},{}", cells.join(","));
        }
    }

    let xor: Vec<(u64, f64)> = rows(&runs, Experiment::Xortest)
        .filter_map(|r| Some((r.get("n")?.as_u64()?, num(r, "violation_rate")?)))
        .collect();
    if !xor.is_empty() {
        let mut by: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
        for (n, v) in xor {
            by.entry(n).or_default().push(v);
        }
        let _ = writeln!(s, "\nXOR closure (median violation rate)");
        let _ = writeln!(s, "n,instances,violation_rate");
        for (n, v) in by {
            let k = v.len();
            let _ = writeln!(s, "{n},{k},{}", fmt_opt(median(v)));
        }
    }

    for r in runs.iter().filter(|r| r.config.experiment == Experiment::Scaling) {
        for key in ["fit", "conjoined_fit"] {
            if let Some(f) = r.summary.get(key).filter(|f| !f.is_null()) {
                let _ = writeln!(s, "\nscaling {key} (seed {}): {}", r.config.master_seed, f);
            }
        }
    }
    Ok(s)
}
