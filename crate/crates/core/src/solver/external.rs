use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use super::{verify_result, SolveResult, SolveStatus};
use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::formulas::{dimacs_emit, CnfFormula};

pub const SOLVER_ENV: &str = "SOLSPACE_SOLVER";

/// Explicit path first, then the `SOLSPACE_SOLVER` environment variable.
pub fn resolve_solver_path(explicit: Option<&Path>) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(SOLVER_ENV).filter(|s| !s.is_empty()).map(PathBuf::from))
}

/// Runs an external solver that takes a DIMACS path and speaks the
/// SAT-competition output format (`s ...` status, `v ...` model lines).
pub fn external_solve(f: &CnfFormula, solver_path: &Path) -> Result<SolveResult> {
    let mut file = tempfile::Builder::new()
        .prefix("solspace-")
        .suffix(".cnf")
        .tempfile()
        .map_err(|e| Error::io(std::env::temp_dir(), e))?;
    file.write_all(dimacs_emit(f).as_bytes())
        .map_err(|e| Error::io(file.path(), e))?;
    file.flush().map_err(|e| Error::io(file.path(), e))?;

    let started = Instant::now();
    let output = Command::new(solver_path)
        .arg(file.path())
        .output()
        .map_err(|e| Error::Bridge(format!("cannot run {}: {e}", solver_path.display())))?;
    let wall_time = started.elapsed().as_secs_f64();

    let code = output.status.code();
    if !matches!(code, Some(0) | Some(10) | Some(20)) {
        return Err(Error::Bridge(format!(
            "{} exited with {:?}",
            solver_path.display(),
            output.status
        )));
    }
    let stdout = String::from_utf8_lossy(&output.stdout);
    let (status, witness) = parse_competition_output(&stdout, f.num_vars)?;
    let expected_code = match status {
        SolveStatus::Sat => 10,
        SolveStatus::Unsat => 20,
        SolveStatus::BudgetExhausted => 0,
    };
    if code != Some(0) && code != Some(expected_code) {
        return Err(Error::Bridge(format!(
            "exit code {code:?} contradicts status line {status}"
        )));
    }
    let result = SolveResult {
        status,
        witness,
        stats: None,
        wall_time,
    };
    verify_result(f, &result).map_err(|e| Error::Bridge(e.to_string()))?;
    Ok(result)
}

/// Parses `s`/`v` lines. `s UNKNOWN` maps to the budget-exhausted outcome.
pub(crate) fn parse_competition_output(text: &str, n: usize) -> Result<(SolveStatus, Option<Assignment>)> {
    let mut status = None;
    let mut values: Vec<i64> = Vec::new();
    let mut terminated = false;
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            let s = match rest.trim() {
                "SATISFIABLE" => SolveStatus::Sat,
                "UNSATISFIABLE" => SolveStatus::Unsat,
                "UNKNOWN" => SolveStatus::BudgetExhausted,
                other => return Err(Error::Bridge(format!("unknown status line 's {other}'"))),
            };
            if status.replace(s).is_some() {
                return Err(Error::Bridge("multiple status lines".into()));
            }
        } else if let Some(rest) = line.strip_prefix('v') {
            for tok in rest.split_whitespace() {
                let x: i64 = tok
                    .parse()
                    .map_err(|_| Error::Bridge(format!("bad value token '{tok}'")))?;
                if x == 0 {
                    terminated = true;
                } else {
                    values.push(x);
                }
            }
        }
    }
    let status = status.ok_or_else(|| Error::Bridge("no status line in solver output".into()))?;
    if status != SolveStatus::Sat {
        return Ok((status, None));
    }
    if !terminated && values.is_empty() && n > 0 {
        return Err(Error::Bridge("SATISFIABLE without a model".into()));
    }
    let mut a = Assignment::zeros(n);
    for x in values {
        let v = x.unsigned_abs() as usize;
        if v == 0 || v > n {
            return Err(Error::Bridge(format!("model literal {x} out of range")));
        }
        a.set(v - 1, x > 0);
    }
    Ok((status, Some(a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_competition_output() {
        let (s, w) = parse_competition_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3).unwrap();
        assert_eq!(s, SolveStatus::Sat);
        assert_eq!(w.unwrap().to_bitstring(), "101");
        let (s, w) = parse_competition_output("s UNSATISFIABLE\n", 3).unwrap();
        assert_eq!((s, w), (SolveStatus::Unsat, None));
        assert!(parse_competition_output("nothing here", 3).is_err());
        assert!(parse_competition_output("s SATISFIABLE\nv 9 0\n", 3).is_err());
        assert!(parse_competition_output("s MAYBE\n", 3).is_err());
    }
}
