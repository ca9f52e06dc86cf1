use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};

use solspace::formulas::gen_random_ksat;
use solspace::rng;
use solspace::solver::{brute_force, external_solve};
use solspace::{CnfFormula, Error, FamilyTag, Literal, SolveStatus};

fn dimacs_bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_solspace-dimacs"))
}

fn script(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, format!("#!/bin/sh\n{body}\n")).unwrap();
    std::fs::set_permissions(&p, std::fs::Permissions::from_mode(0o755)).unwrap();
    p
}

fn contradiction() -> CnfFormula {
    CnfFormula::new(1, vec![vec![Literal::pos(1)], vec![Literal::neg(1)]], FamilyTag::Custom)
}

#[test]
fn bridge_agrees_with_brute_force() {
    let bin = dimacs_bin();
    for i in 0..100 {
        let f = gen_random_ksat(20, 3.5 + (i % 4) as f64 * 0.5, 3, rng::derive(77, i)).unwrap();
        let r = external_solve(&f, &bin).unwrap();
        assert_eq!(r.is_sat(), !brute_force(&f).unwrap().is_empty(), "instance {i}");
        assert!(r.stats.is_none());
        if let Some(w) = &r.witness {
            assert!(f.is_satisfied_by(w));
        }
    }
}

#[test]
fn trivial_instances() {
    let bin = dimacs_bin();
    let r = external_solve(&CnfFormula::empty(4), &bin).unwrap();
    assert_eq!(r.status, SolveStatus::Sat);
    assert_eq!(external_solve(&contradiction(), &bin).unwrap().status, SolveStatus::Unsat);
}

#[test]
fn misbehaving_solvers_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = CnfFormula::new(2, vec![vec![Literal::pos(1)], vec![Literal::pos(2)]], FamilyTag::Custom);
    let cases = [
        ("garbage.sh", "echo hello"),
        ("crash.sh", "exit 3"),
        ("wrong_model.sh", "echo 's SATISFIABLE'; echo 'v -1 2 0'; exit 10"),
        ("bad_token.sh", "echo 's SATISFIABLE'; echo 'v x 0'; exit 10"),
        ("wrong_code.sh", "echo 's UNSATISFIABLE'; exit 10"),
        ("out_of_range.sh", "echo 's SATISFIABLE'; echo 'v 1 2 3 0'; exit 10"),
    ];
    for (name, body) in cases {
        let p = script(dir.path(), name, body);
        match external_solve(&f, &p) {
            Err(Error::Bridge(_)) => {}
            other => panic!("{name}: expected a bridge error, got {other:?}"),
        }
    }
    let ok = script(dir.path(), "ok.sh", "echo 'c mock'; echo 's SATISFIABLE'; echo 'v 1 2 0'; exit 10");
    let r = external_solve(&f, &ok).unwrap();
    assert_eq!(r.witness.unwrap().to_bitstring(), "11");
    let missing = dir.path().join("does-not-exist");
    assert!(matches!(external_solve(&f, &missing), Err(Error::Bridge(_))));
}

#[test]
fn dimacs_front_end_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let sat = dir.path().join("sat.cnf");
    std::fs::write(&sat, "p cnf 2 1\n1 -2 0\n").unwrap();
    let unsat = dir.path().join("unsat.cnf");
    std::fs::write(&unsat, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let bad = dir.path().join("bad.cnf");
    std::fs::write(&bad, "p cnf 1 1\n5 0\n").unwrap();

    let out = std::process::Command::new(dimacs_bin()).arg(&sat).output().unwrap();
    assert_eq!(out.status.code(), Some(10));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("s SATISFIABLE") && text.contains("v "));

    let out = std::process::Command::new(dimacs_bin()).arg(&unsat).output().unwrap();
    assert_eq!(out.status.code(), Some(20));
    assert!(String::from_utf8(out.stdout).unwrap().contains("s UNSATISFIABLE"));

    let out = std::process::Command::new(dimacs_bin()).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
