use std::fmt::Write as _;

use super::{CnfFormula, FamilyTag, Literal};
use crate::error::{Error, Result};

/// Writes `p cnf N M` followed by one 0-terminated clause per line.
pub fn dimacs_emit(f: &CnfFormula) -> String {
    let mut out = String::with_capacity(16 + f.clauses.len() * 12);
    let _ = writeln!(out, "p cnf {} {}", f.num_vars, f.clauses.len());
    for clause in &f.clauses {
        for l in clause {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

/// Parses DIMACS CNF. Comment lines start with `c`; clauses may span lines.
/// Repeated literals in a clause are merged; a clause containing both
/// polarities of a variable is rejected.
pub fn dimacs_parse(text: &str) -> Result<CnfFormula> {
    let err = |line: usize, message: String| Error::Parse { line, message };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_start = 0;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(lineno, "duplicate header".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(err(lineno, format!("malformed header '{line}'")));
            }
            let n = parts[2]
                .parse::<usize>()
                .map_err(|_| err(lineno, format!("bad variable count '{}'", parts[2])))?;
            let m = parts[3]
                .parse::<usize>()
                .map_err(|_| err(lineno, format!("bad clause count '{}'", parts[3])))?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| err(lineno, "clause before 'p cnf' header".into()))?;
        for tok in line.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| err(lineno, format!("bad literal '{tok}'")))?;
            if x == 0 {
                current.sort_unstable();
                current.dedup();
                if current.windows(2).any(|w| w[0].var() == w[1].var()) {
                    return Err(err(lineno, "clause contains a variable in both polarities".into()));
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if current.is_empty() {
                current_start = lineno;
            }
            let lit = Literal::from_dimacs(x).ok_or_else(|| err(lineno, format!("bad literal '{tok}'")))?;
            if lit.var() as usize > n {
                return Err(err(lineno, format!("literal {x} exceeds variable count {n}")));
            }
            current.push(lit);
        }
    }

    let (n, m) = header.ok_or_else(|| err(last_line.max(1), "missing 'p cnf' header".into()))?;
    if !current.is_empty() {
        return Err(err(current_start, "clause is missing its 0 terminator".into()));
    }
    if clauses.len() != m {
        return Err(err(
            last_line.max(1),
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    Ok(CnfFormula::new(n, clauses, FamilyTag::Custom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::gen_random_ksat;
    use proptest::prelude::*;

    #[test]
    fn emit_exact_format() {
        let f = CnfFormula::new(2, vec![vec![Literal::pos(1), Literal::neg(2)]], FamilyTag::Custom);
        assert_eq!(dimacs_emit(&f), "p cnf 2 1\n1 -2 0\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match dimacs_parse("p cnf 2 1\n3 0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(dimacs_parse("p dnf 2 1\n1 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(dimacs_parse("p cnf 2 1\n1 2\n"), Err(Error::Parse { .. })));
        assert!(matches!(dimacs_parse("1 2 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(dimacs_parse("p cnf 2 2\n1 2 0\n"), Err(Error::Parse { .. })));
        assert!(matches!(dimacs_parse("p cnf 2 1\n1 -1 0\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn parse_accepts_comments_and_multiline_clauses() {
        let f = dimacs_parse("c hello\np cnf 3 2\n1 -2\n 3 0\n0\n").unwrap();
        assert_eq!(f.num_vars, 3);
        assert_eq!(f.clauses.len(), 2);
        assert_eq!(f.clauses[0].len(), 3);
        assert!(f.clauses[1].is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn round_trip(n in 3usize..40, alpha in 0.0f64..6.0, seed in any::<u64>()) {
            let f = gen_random_ksat(n, alpha, 3, seed).unwrap();
            let g = dimacs_parse(&dimacs_emit(&f)).unwrap();
            prop_assert_eq!(g.num_vars, f.num_vars);
            prop_assert_eq!(g.clauses, f.clauses);
        }
    }
}
