use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::drunkwalk::Strategy;
use crate::error::{Error, FieldError, Result};
use crate::formulas::{dimacs_parse, ControlFamily};
use crate::scaling::FitModel;
use crate::solver::DEFAULT_CONFLICT_BUDGET;
use crate::topology::FORMULA_MAX_VARS;

pub const SCHEMA_VERSION: u32 = 1;
pub const MAX_WORKERS: usize = 256;
const MAX_EXPANDER_SIDE: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Gen,
    Solve,
    Homology,
    Shatter,
    Drunkwalk,
    Xortest,
    Scaling,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Gen,
        Experiment::Solve,
        Experiment::Homology,
        Experiment::Shatter,
        Experiment::Drunkwalk,
        Experiment::Xortest,
        Experiment::Scaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Gen => "gen",
            Experiment::Solve => "solve",
            Experiment::Homology => "homology",
            Experiment::Shatter => "shatter",
            Experiment::Drunkwalk => "drunkwalk",
            Experiment::Xortest => "xortest",
            Experiment::Scaling => "scaling",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidParameters(format!("unknown experiment '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    RandomKsat,
    Twosat,
    Hornsat,
    Xorsat,
    Tseitin,
}

impl Family {
    pub fn control(self) -> Option<ControlFamily> {
        match self {
            Family::Twosat => Some(ControlFamily::Twosat),
            Family::Hornsat => Some(ControlFamily::Hornsat),
            Family::Xorsat => Some(ControlFamily::Xorsat),
            _ => None,
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidParameters(format!("unknown family '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Charges {
    Odd,
    Even,
}

impl FromStr for Charges {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "odd" => Ok(Charges::Odd),
            "even" => Ok(Charges::Even),
            _ => Err(Error::InvalidParameters(format!("charges must be 'odd' or 'even', got '{s}'"))),
        }
    }
}

/// One experiment, serialised as flat JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: Experiment,

    #[serde(default = "d::family")]
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default = "d::k")]
    pub k: usize,
    /// Expander side for Tseitin instances.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default = "d::charges")]
    pub charges: Charges,
    /// DIMACS file used instead of a generated family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,

    #[serde(default = "d::fraction")]
    pub fraction: f64,
    #[serde(default = "d::probes")]
    pub probes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<usize>,
    #[serde(default = "d::budget")]
    pub budget: u64,
    #[serde(default = "d::steps")]
    pub steps: usize,
    #[serde(default = "d::trials")]
    pub trials: usize,
    #[serde(default = "d::triples")]
    pub triples: usize,
    #[serde(default)]
    pub sizes: Vec<usize>,
    #[serde(default = "d::seeds_per_size")]
    pub seeds_per_size: usize,
    /// Independent instances per run.
    #[serde(default = "d::seeds")]
    pub seeds: usize,
    #[serde(default = "d::max_dim")]
    pub max_dim: usize,
    #[serde(default = "d::strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_model: Option<FitModel>,
    /// Variables of a random 3-SAT payload conjoined to each scaling core.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload_n: Option<usize>,
    #[serde(default = "d::payload_alpha")]
    pub payload_alpha: f64,
    /// Replace UNSAT instances by the next satisfiable derived instance.
    #[serde(default = "d::require_sat")]
    pub require_sat: bool,

    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "d::workers")]
    pub workers: usize,
    #[serde(default = "d::output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_path: Option<PathBuf>,
}

mod d {
    use super::*;
    pub fn family() -> Family {
        Family::RandomKsat
    }
    pub fn k() -> usize {
        3
    }
    pub fn charges() -> Charges {
        Charges::Odd
    }
    pub fn fraction() -> f64 {
        crate::shattering::DEFAULT_FRACTION
    }
    pub fn probes() -> usize {
        crate::shattering::DEFAULT_PROBES
    }
    pub fn budget() -> u64 {
        DEFAULT_CONFLICT_BUDGET
    }
    pub fn steps() -> usize {
        crate::drunkwalk::DEFAULT_STEPS
    }
    pub fn trials() -> usize {
        50
    }
    pub fn triples() -> usize {
        200
    }
    pub fn seeds_per_size() -> usize {
        5
    }
    pub fn seeds() -> usize {
        1
    }
    pub fn max_dim() -> usize {
        crate::topology::DEFAULT_MAX_DIM
    }
    pub fn strategies() -> Vec<Strategy> {
        Strategy::ALL.to_vec()
    }
    pub fn payload_alpha() -> f64 {
        3.0
    }
    pub fn require_sat() -> bool {
        true
    }
    pub fn workers() -> usize {
        1
    }
    pub fn output_dir() -> PathBuf {
        PathBuf::from("runs")
    }
}

impl ExperimentConfig {
    /// Defaults for every field but the experiment.
    pub fn new(experiment: Experiment) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment,
            family: d::family(),
            n: None,
            alpha: None,
            k: d::k(),
            m: None,
            charges: d::charges(),
            input: None,
            fraction: d::fraction(),
            probes: d::probes(),
            tau: None,
            budget: d::budget(),
            steps: d::steps(),
            trials: d::trials(),
            triples: d::triples(),
            sizes: Vec::new(),
            seeds_per_size: d::seeds_per_size(),
            seeds: d::seeds(),
            max_dim: d::max_dim(),
            strategies: d::strategies(),
            fit_model: None,
            payload_n: None,
            payload_alpha: d::payload_alpha(),
            require_sat: d::require_sat(),
            master_seed: 0,
            workers: d::workers(),
            output_dir: d::output_dir(),
            solver_path: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Variable count of the instances this config generates, when known
    /// without generating them.
    pub fn instance_vars(&self) -> Option<usize> {
        match self.family {
            Family::Tseitin => self.m.map(|m| 4 * m * m),
            _ => self.n,
        }
    }

    fn is_sat_family(&self) -> bool {
        self.family != Family::Tseitin
    }

    /// Checks every field the experiment will use; all failures are
    /// reported together.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut bad = |field: &str, msg: String| errs.push(FieldError::new(field, msg));

        if self.schema_version != SCHEMA_VERSION {
            bad("schema_version", format!("expected {SCHEMA_VERSION}, got {}", self.schema_version));
        }
        if self.workers == 0 || self.workers > MAX_WORKERS {
            bad("workers", format!("must lie in 1..={MAX_WORKERS}, got {}", self.workers));
        }
        if self.output_dir.as_os_str().is_empty() {
            bad("output_dir", "must not be empty".into());
        }
        if self.budget == 0 {
            bad("budget", "conflict budget must be >= 1".into());
        }
        let exp = self.experiment;
        let uses_instance = exp != Experiment::Scaling;
        if uses_instance && exp != Experiment::Gen && self.seeds == 0 {
            bad("seeds", "must be >= 1".into());
        }
        if exp == Experiment::Gen && self.seeds == 0 {
            bad("seeds", "must be >= 1".into());
        }

        let mut input_vars = None;
        if let Some(path) = &self.input {
            if !matches!(exp, Experiment::Solve | Experiment::Homology | Experiment::Shatter | Experiment::Xortest | Experiment::Drunkwalk) {
                bad("input", format!("not used by the {exp} experiment"));
            } else {
                match std::fs::read_to_string(path) {
                    Ok(text) => match dimacs_parse(&text) {
                        Ok(f) => input_vars = Some(f.num_vars),
                        Err(e) => bad("input", e.to_string()),
                    },
                    Err(e) => bad("input", format!("cannot read {}: {e}", path.display())),
                }
            }
        } else if uses_instance {
            self.check_family(&mut bad);
        }

        if let Some(path) = &self.solver_path {
            if exp != Experiment::Solve {
                bad("solver_path", "the external solver is only used by the solve experiment".into());
            } else if !path.is_file() {
                bad("solver_path", format!("{} is not a file", path.display()));
            }
        }

        let vars = input_vars.or_else(|| self.instance_vars());
        let needs_sat_instance = matches!(exp, Experiment::Shatter | Experiment::Drunkwalk | Experiment::Xortest);
        if needs_sat_instance && self.input.is_none() && !self.is_sat_family() {
            bad("family", format!("the {exp} experiment needs a satisfiable family, not tseitin"));
        }

        match exp {
            Experiment::Gen | Experiment::Solve => {}
            Experiment::Homology => {
                if let Some(v) = vars {
                    if v > FORMULA_MAX_VARS {
                        bad("n", format!("homology is limited to {FORMULA_MAX_VARS} variables, instance has {v}"));
                    }
                }
                if self.max_dim > 24 {
                    bad("max_dim", format!("must be <= 24, got {}", self.max_dim));
                }
            }
            Experiment::Shatter | Experiment::Drunkwalk | Experiment::Xortest => {
                if !(0.0..1.0).contains(&self.fraction) {
                    bad("fraction", format!("must lie in [0, 1), got {}", self.fraction));
                }
                if self.probes == 0 {
                    bad("probes", "must be >= 1".into());
                }
                if exp == Experiment::Drunkwalk {
                    if self.trials == 0 {
                        bad("trials", "must be >= 1".into());
                    }
                    if self.strategies.is_empty() {
                        bad("strategies", "must name at least one strategy".into());
                    }
                }
                if exp == Experiment::Xortest && self.triples == 0 {
                    bad("triples", "must be >= 1".into());
                }
                if let (Some(t), Some(v)) = (self.tau, vars) {
                    if t > v {
                        bad("tau", format!("must be <= n = {v}, got {t}"));
                    }
                }
            }
            Experiment::Scaling => self.check_scaling(&mut bad),
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    fn check_alpha(&self, bad: &mut impl FnMut(&str, String)) {
        match self.alpha {
            None => bad("alpha", format!("required by the {:?} family", self.family)),
            Some(a) if !a.is_finite() || a < 0.0 => bad("alpha", format!("must be finite and >= 0, got {a}")),
            _ => {}
        }
    }

    fn check_family(&self, bad: &mut impl FnMut(&str, String)) {
        match self.family {
            Family::RandomKsat => {
                if self.k == 0 {
                    bad("k", "must be >= 1".into());
                }
                match self.n {
                    None => bad("n", "required by the random-ksat family".into()),
                    Some(n) if n < self.k.max(1) => bad("n", format!("must be >= k = {}, got {n}", self.k)),
                    _ => {}
                }
                self.check_alpha(bad);
            }
            Family::Twosat | Family::Hornsat | Family::Xorsat => {
                match self.n {
                    None => bad("n", "required by control families".into()),
                    Some(n) if n < 2 => bad("n", format!("must be >= 2, got {n}")),
                    _ => {}
                }
                self.check_alpha(bad);
            }
            Family::Tseitin => match self.m {
                None => bad("m", "required by the tseitin family".into()),
                Some(m) if !(2..=MAX_EXPANDER_SIDE).contains(&m) => {
                    bad("m", format!("must lie in 2..={MAX_EXPANDER_SIDE}, got {m}"))
                }
                _ => {}
            },
        }
    }

    fn check_scaling(&self, bad: &mut impl FnMut(&str, String)) {
        if self.sizes.is_empty() {
            bad("sizes", "must be nonempty".into());
        } else if !self.sizes.windows(2).all(|w| w[0] < w[1]) {
            bad("sizes", "must be strictly ascending".into());
        }
        if self.seeds_per_size == 0 {
            bad("seeds_per_size", "must be >= 1".into());
        }
        match self.family {
            Family::RandomKsat => {
                if self.k == 0 {
                    bad("k", "must be >= 1".into());
                }
                if let Some(&s) = self.sizes.first() {
                    if s < self.k.max(1) {
                        bad("sizes", format!("every size must be >= k = {}", self.k));
                    }
                }
                self.check_alpha(bad);
            }
            Family::Tseitin => {
                if self.sizes.iter().any(|&m| !(2..=MAX_EXPANDER_SIDE).contains(&m)) {
                    bad("sizes", format!("expander sides must lie in 2..={MAX_EXPANDER_SIDE}"));
                }
            }
            other => bad("family", format!("scaling supports random-ksat and tseitin, not {other:?}")),
        }
        if let Some(p) = self.payload_n {
            if p < 3 {
                bad("payload_n", format!("must be >= 3, got {p}"));
            }
            if !self.payload_alpha.is_finite() || self.payload_alpha < 0.0 {
                bad("payload_alpha", format!("must be finite and >= 0, got {}", self.payload_alpha));
            }
        }
    }
}
