//! Conflict-driven clause learning.
//!
//! Two watched literals with blockers, activity branching on a binary heap,
//! first-UIP learning with recursive minimisation, phase saving, Luby
//! restarts and LBD-guided learnt-clause reduction. Assumptions are decided
//! first, one per decision level.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{SearchStats, SolveResult, SolveStatus, SolverConfig};
use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::formulas::{CnfFormula, Literal};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Lit(u32);

impl Lit {
    #[inline]
    fn new(var: usize, negative: bool) -> Lit {
        Lit(((var as u32) << 1) | negative as u32)
    }
    #[inline]
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    #[inline]
    fn idx(self) -> usize {
        self.0 as usize
    }
    #[inline]
    fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }
    fn from_literal(l: Literal) -> Lit {
        Lit::new(l.index(), !l.is_positive())
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;
const NO_REASON: u32 = u32::MAX;
/// Learnt-clause reduction runs after `REDUCE_BASE + k * REDUCE_STEP`
/// further conflicts, `k` counting earlier reductions.
const REDUCE_BASE: u64 = 2000;
const REDUCE_STEP: u64 = 300;

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f32,
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

/// Max-heap of variables keyed by activity.
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<u32>,
}

const NOT_IN_HEAP: u32 = u32::MAX;

impl VarHeap {
    fn new(n: usize) -> Self {
        Self {
            heap: Vec::with_capacity(n),
            pos: vec![NOT_IN_HEAP; n],
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != NOT_IN_HEAP
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = self.heap.len() as u32;
        self.heap.push(v as u32);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.pos[v] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0, act);
        }
        Some(top as usize)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if act[v as usize] <= act[p as usize] {
                break;
            }
            self.heap[i] = p;
            self.pos[p as usize] = i as u32;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let len = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let child = if right < len && act[self.heap[right] as usize] > act[self.heap[left] as usize] {
                right
            } else {
                left
            };
            let c = self.heap[child];
            if act[c as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = c;
            self.pos[c as usize] = i as u32;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }
}

/// Luby sequence 1, 1, 2, 1, 1, 2, 4, ... (0-based index).
pub fn luby(mut x: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

enum SearchOutcome {
    Sat,
    Unsat,
    Restart,
    Budget,
}

/// An incremental CDCL solver over variables `1..=num_vars`.
///
/// Clauses may be added between calls to [`Solver::solve`]; statistics
/// accumulate over the lifetime of the instance.
pub struct Solver {
    num_vars: usize,
    config: SolverConfig,
    clauses: Vec<Clause>,
    free_slots: Vec<u32>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watcher>>,
    vals: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f32,
    heap: VarHeap,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    to_clear: Vec<Lit>,
    ok: bool,
    next_reduce: u64,
    reductions: u64,
    stats: SearchStats,
}

/// Persisted description of a solver configuration, for run records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverFingerprint {
    pub engine: String,
    pub var_decay: f64,
    pub restart_base: u64,
    pub random_polarity: bool,
    pub conflict_budget: u64,
}

impl Solver {
    pub fn new(num_vars: usize, config: SolverConfig) -> Self {
        let mut s = Solver {
            num_vars,
            config,
            clauses: Vec::new(),
            free_slots: Vec::new(),
            learnts: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            vals: vec![UNDEF; 2 * num_vars],
            level: vec![0; num_vars],
            reason: vec![NO_REASON; num_vars],
            trail: Vec::with_capacity(num_vars),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; num_vars],
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::new(num_vars),
            polarity: vec![false; num_vars],
            seen: vec![false; num_vars],
            to_clear: Vec::new(),
            ok: true,
            next_reduce: 0,
            reductions: 0,
            stats: SearchStats::default(),
        };
        for v in 0..num_vars {
            s.heap.insert(v, &s.activity);
        }
        if config.random_polarity {
            s.reseed_phases(config.seed);
        }
        s
    }

    /// Loads every clause of `f`.
    pub fn from_formula(f: &CnfFormula, config: SolverConfig) -> Self {
        let mut s = Solver::new(f.num_vars, config);
        for c in &f.clauses {
            s.add_clause(c);
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Redraws every saved phase uniformly from a stream keyed by `seed`.
    pub fn reseed_phases(&mut self, seed: u64) {
        let mut r: ChaCha8Rng = rng::stream(seed, 0xC0FFEE);
        for p in self.polarity.iter_mut() {
            *p = r.gen_bool(0.5);
        }
    }

    /// Adds an irredundant clause. Must be called between solves.
    pub fn add_clause(&mut self, clause: &[Literal]) {
        debug_assert!(self.trail_lim.is_empty());
        if !self.ok {
            return;
        }
        let mut lits: Vec<Lit> = clause
            .iter()
            .map(|&l| {
                assert!(l.index() < self.num_vars, "literal {l} out of range");
                Lit::from_literal(l)
            })
            .collect();
        lits.sort_unstable();
        lits.dedup();
        let mut out = Vec::with_capacity(lits.len());
        for (i, &l) in lits.iter().enumerate() {
            if i + 1 < lits.len() && lits[i + 1] == !l {
                return; // tautology
            }
            match self.value(l) {
                TRUE => return,
                FALSE => {}
                _ => out.push(l),
            }
        }
        match out.len() {
            0 => self.refute_at_root(),
            1 => {
                self.enqueue(out[0], NO_REASON);
                if self.propagate().is_some() {
                    self.refute_at_root();
                }
            }
            _ => {
                let cref = self.alloc(out, false, 0);
                self.attach(cref);
            }
        }
    }

    /// A root-level conflict found while loading clauses.
    fn refute_at_root(&mut self) {
        self.ok = false;
        self.stats.conflicts += 1;
    }

    #[inline]
    fn value(&self, l: Lit) -> i8 {
        self.vals[l.idx()]
    }

    #[inline]
    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn alloc(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> u32 {
        let clause = Clause {
            lits,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        };
        if let Some(slot) = self.free_slots.pop() {
            self.clauses[slot as usize] = clause;
            slot
        } else {
            self.clauses.push(clause);
            (self.clauses.len() - 1) as u32
        }
    }

    fn attach(&mut self, cref: u32) {
        let c = &self.clauses[cref as usize];
        let (a, b) = (c.lits[0], c.lits[1]);
        self.watches[(!a).idx()].push(Watcher { cref, blocker: b });
        self.watches[(!b).idx()].push(Watcher { cref, blocker: a });
    }

    #[inline]
    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var();
        self.vals[l.idx()] = TRUE;
        self.vals[(!l).idx()] = FALSE;
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause if one is found.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.idx()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.vals[w.blocker.idx()] == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                let c = &mut self.clauses[cref as usize];
                if c.lits[0] == false_lit {
                    c.lits.swap(0, 1);
                }
                let first = c.lits[0];
                let nw = Watcher { cref, blocker: first };
                if first != w.blocker && self.vals[first.idx()] == TRUE {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.lits.len() {
                    let l = c.lits[k];
                    if self.vals[l.idx()] != FALSE {
                        c.lits.swap(1, k);
                        self.watches[(!l).idx()].push(nw);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.vals[first.idx()] == FALSE {
                    conflict = Some(cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                    self.qhead = self.trail.len();
                } else {
                    self.enqueue(first, cref);
                }
            }
            ws.truncate(j);
            self.watches[p.idx()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn abstract_level(&self, v: usize) -> u32 {
        1 << (self.level[v] & 31)
    }

    /// First-UIP analysis. Returns the learnt clause (asserting literal
    /// first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, usize) {
        let mut learnt: Vec<Lit> = vec![Lit(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let dl = self.decision_level() as u32;

        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = usize::from(p.is_some());
            let len = self.clauses[confl as usize].lits.len();
            for k in start..len {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= dl {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            confl = self.reason[lit.var()];
            self.seen[lit.var()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = !p.unwrap();

        // Recursive minimisation.
        let levels = learnt[1..]
            .iter()
            .fold(0u32, |acc, l| acc | self.abstract_level(l.var()));
        self.to_clear.clear();
        self.to_clear.extend_from_slice(&learnt);
        let mut keep = 1;
        for i in 1..learnt.len() {
            let l = learnt[i];
            if self.reason[l.var()] == NO_REASON || !self.lit_redundant(l, levels) {
                learnt[keep] = l;
                keep += 1;
            }
        }
        learnt.truncate(keep);
        for l in std::mem::take(&mut self.to_clear) {
            self.seen[l.var()] = false;
        }

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var()] > self.level[learnt[max_i].var()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var()] as usize
        };
        (learnt, bt)
    }

    fn lit_redundant(&mut self, p: Lit, levels: u32) -> bool {
        let mut stack = vec![p];
        let top = self.to_clear.len();
        while let Some(q) = stack.pop() {
            let cref = self.reason[q.var()];
            debug_assert_ne!(cref, NO_REASON);
            let len = self.clauses[cref as usize].lits.len();
            for k in 1..len {
                let l = self.clauses[cref as usize].lits[k];
                let v = l.var();
                if !self.seen[v] && self.level[v] > 0 {
                    if self.reason[v] != NO_REASON && (self.abstract_level(v) & levels) != 0 {
                        self.seen[v] = true;
                        stack.push(l);
                        self.to_clear.push(l);
                    } else {
                        for x in self.to_clear.drain(top..) {
                            self.seen[x.var()] = false;
                        }
                        return false;
                    }
                }
            }
        }
        true
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var()]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn cancel_until(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.vals[l.idx()] = UNDEF;
            self.vals[(!l).idx()] = UNDEF;
            self.reason[v] = NO_REASON;
            self.polarity[v] = !l.is_neg();
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.vals[2 * v] == UNDEF {
                return Some(Lit::new(v, !self.polarity[v]));
            }
        }
        None
    }

    fn locked(&self, cref: u32) -> bool {
        let c = &self.clauses[cref as usize];
        let first = c.lits[0];
        self.vals[first.idx()] == TRUE && self.reason[first.var()] == cref
    }

    fn reduce_db(&mut self) {
        let mut learnts = std::mem::take(&mut self.learnts);
        learnts.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.partial_cmp(&cb.activity).unwrap_or(std::cmp::Ordering::Equal))
                .then(a.cmp(&b))
        });
        let half = learnts.len() / 2;
        let mut kept = Vec::with_capacity(learnts.len());
        let mut removed = false;
        for (i, &cref) in learnts.iter().enumerate() {
            let c = &self.clauses[cref as usize];
            if i < half && c.lbd > 2 && c.lits.len() > 2 && !self.locked(cref) {
                self.clauses[cref as usize].deleted = true;
                removed = true;
            } else {
                kept.push(cref);
            }
        }
        if removed {
            let clauses = &self.clauses;
            for ws in self.watches.iter_mut() {
                ws.retain(|w| !clauses[w.cref as usize].deleted);
            }
            for (i, c) in self.clauses.iter_mut().enumerate() {
                if c.deleted && !c.lits.is_empty() {
                    c.lits = Vec::new();
                    self.free_slots.push(i as u32);
                }
            }
        }
        kept.sort_unstable();
        self.learnts = kept;
        self.reductions += 1;
        self.next_reduce = self.stats.conflicts + REDUCE_BASE + REDUCE_STEP * self.reductions;
    }

    fn search(&mut self, assumptions: &[Lit], restart_limit: u64, budget_left: &mut u64) -> SearchOutcome {
        let mut conflicts_here = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_here += 1;
                *budget_left = budget_left.saturating_sub(1);
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SearchOutcome::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let lbd = self.lbd(&learnt);
                    let first = learnt[0];
                    let cref = self.alloc(learnt, true, lbd);
                    self.learnts.push(cref);
                    self.attach(cref);
                    self.bump_clause(cref);
                    self.enqueue(first, cref);
                }
                self.var_inc /= self.config.var_decay;
                self.cla_inc /= 0.999;
            } else {
                if *budget_left == 0 {
                    self.cancel_until(0);
                    return SearchOutcome::Budget;
                }
                if conflicts_here >= restart_limit {
                    self.cancel_until(0);
                    return SearchOutcome::Restart;
                }
                if self.stats.conflicts >= self.next_reduce {
                    self.reduce_db();
                }
                let mut next = None;
                while self.decision_level() < assumptions.len() {
                    let a = assumptions[self.decision_level()];
                    match self.value(a) {
                        TRUE => self.trail_lim.push(self.trail.len()),
                        FALSE => {
                            self.cancel_until(0);
                            return SearchOutcome::Unsat;
                        }
                        _ => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let next = match next.or_else(|| self.pick_branch()) {
                    Some(l) => l,
                    None => return SearchOutcome::Sat,
                };
                self.stats.decisions += 1;
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, NO_REASON);
            }
        }
    }

    fn model(&self) -> Assignment {
        let mut a = Assignment::zeros(self.num_vars);
        for v in 0..self.num_vars {
            if self.vals[2 * v] == TRUE {
                a.set(v, true);
            }
        }
        a
    }

    /// Solves under `assumptions`. `Unsat` means unsatisfiable together with
    /// the assumptions; the formula alone may still be satisfiable.
    pub fn solve(&mut self, assumptions: &[Literal]) -> Result<SolveResult> {
        let started = Instant::now();
        for &a in assumptions {
            if a.index() >= self.num_vars {
                return Err(Error::InvalidParameters(format!(
                    "assumption {a} references a variable beyond {}",
                    self.num_vars
                )));
            }
        }
        let assumptions: Vec<Lit> = assumptions.iter().map(|&l| Lit::from_literal(l)).collect();
        let finish = |s: &Solver, status: SolveStatus, witness: Option<Assignment>| SolveResult {
            status,
            witness,
            stats: Some(s.stats),
            wall_time: started.elapsed().as_secs_f64(),
        };
        if !self.ok {
            return Ok(finish(self, SolveStatus::Unsat, None));
        }
        if self.propagate().is_some() {
            self.refute_at_root();
            return Ok(finish(self, SolveStatus::Unsat, None));
        }
        self.next_reduce = self.next_reduce.max(self.stats.conflicts + REDUCE_BASE);
        let mut budget_left = self.config.conflict_budget;
        let mut restarts = 0u64;
        loop {
            let limit = luby(restarts) * self.config.restart_base;
            match self.search(&assumptions, limit, &mut budget_left) {
                SearchOutcome::Sat => {
                    let model = self.model();
                    self.cancel_until(0);
                    return Ok(finish(self, SolveStatus::Sat, Some(model)));
                }
                SearchOutcome::Unsat => {
                    self.cancel_until(0);
                    return Ok(finish(self, SolveStatus::Unsat, None));
                }
                SearchOutcome::Budget => {
                    self.cancel_until(0);
                    return Ok(finish(self, SolveStatus::BudgetExhausted, None));
                }
                SearchOutcome::Restart => {
                    restarts += 1;
                    self.stats.restarts += 1;
                }
            }
        }
    }

    pub fn fingerprint(&self) -> SolverFingerprint {
        self.config.fingerprint()
    }
}

impl SolverConfig {
    pub fn fingerprint(&self) -> SolverFingerprint {
        SolverFingerprint {
            engine: format!("solspace-cdcl/{}", env!("CARGO_PKG_VERSION")),
            var_decay: self.var_decay,
            restart_base: self.restart_base,
            random_polarity: self.random_polarity,
            conflict_budget: self.conflict_budget,
        }
    }
}

/// Seeded helper for callers that need a per-item solver seed.
pub fn solver_seed(seed: u64, index: u64) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(rng::derive(seed, index));
    r.gen()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn heap_orders_by_activity() {
        let act = vec![0.5, 3.0, 1.0, 2.0];
        let mut h = VarHeap::new(4);
        for v in 0..4 {
            h.insert(v, &act);
        }
        let order: Vec<usize> = std::iter::from_fn(|| h.pop(&act)).collect();
        assert_eq!(order, vec![1, 3, 2, 0]);
    }

    #[test]
    fn incremental_blocking_exhausts_small_space() {
        let mut s = Solver::new(3, SolverConfig::default());
        let mut seen = std::collections::HashSet::new();
        loop {
            let r = s.solve(&[]).unwrap();
            match r.status {
                SolveStatus::Sat => {
                    let w = r.witness.unwrap();
                    assert!(seen.insert(w.clone()));
                    let block: Vec<Literal> =
                        (0..3).map(|i| Literal::new(i as u32 + 1, !w.get(i))).collect();
                    s.add_clause(&block);
                }
                SolveStatus::Unsat => break,
                SolveStatus::BudgetExhausted => unreachable!(),
            }
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn failed_assumption_does_not_poison_the_instance() {
        let mut s = Solver::new(2, SolverConfig::default());
        s.add_clause(&[Literal::pos(1), Literal::pos(2)]);
        let r = s.solve(&[Literal::neg(1), Literal::neg(2)]).unwrap();
        assert_eq!(r.status, SolveStatus::Unsat);
        let r = s.solve(&[]).unwrap();
        assert_eq!(r.status, SolveStatus::Sat);
    }
}
