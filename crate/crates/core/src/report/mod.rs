//! Case configuration files and the CSV artifacts behind the density, error,
//! moment, and oracle-comparison tables.
//!
//! The configuration format is flat `key = value` lines in UTF-8, `#`
//! comments, repeated keys forming lists. Recognized keys: `case_name`,
//! `problem`, `n_terms`, `t_values`, `u_min`, `u_max`, `u_step`, `r_value`,
//! `outputs`.

mod runs;

pub use runs::{run_all, run_density, run_error_table, run_moments, run_oracle_compare};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::algebra::{AlgebraError, Expr, Term};
use crate::djm::{Aggregation, EngineError, ProblemSpec};
use crate::exact::ExactError;
use crate::oracle::OracleError;
use crate::rational::{format_rational, parse_rational, rat_int, Rational};
use num_traits::{One, Signed, Zero};

/// A configuration problem, pointing at the offending line when known.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(
                f,
                "config line {line}, field `{}`: {}",
                self.field, self.message
            ),
            None => write!(f, "config field `{}`: {}", self.field, self.message),
        }
    }
}

impl ConfigError {
    fn new(line: Option<usize>, field: &str, message: impl Into<String>) -> Self {
        ConfigError {
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("no exact solution is available for this problem")]
    NoExactSolution,
    #[error("oracle comparison requires smooth initial data")]
    OracleNeedsSmoothInitial,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Requested artifact kinds, in emission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputKind {
    Density,
    ErrorTable,
    Moments,
    OracleCompare,
}

impl OutputKind {
    pub fn keyword(self) -> &'static str {
        match self {
            OutputKind::Density => "density",
            OutputKind::ErrorTable => "error_table",
            OutputKind::Moments => "moments",
            OutputKind::OracleCompare => "oracle_compare",
        }
    }

    fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "density" => OutputKind::Density,
            "error_table" => OutputKind::ErrorTable,
            "moments" => OutputKind::Moments,
            "oracle_compare" => OutputKind::OracleCompare,
            _ => return None,
        })
    }
}

/// Built-in initial conditions nameable in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    /// `e^{-u}`
    ExpNegU,
    /// `4u e^{-2u}`
    ScaledExp,
    /// `delta(u - r)`
    DiracAtR,
}

impl InitialKind {
    pub fn keyword(self) -> &'static str {
        match self {
            InitialKind::ExpNegU => "exp(-u)",
            InitialKind::ScaledExp => "4u*exp(-2u)",
            InitialKind::DiracAtR => "delta(u-r)",
        }
    }

    fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "exp(-u)" => InitialKind::ExpNegU,
            "4u*exp(-2u)" => InitialKind::ScaledExp,
            "delta(u-r)" => InitialKind::DiracAtR,
            _ => return None,
        })
    }

    pub fn expr(self) -> Expr {
        match self {
            InitialKind::ExpNegU => {
                Expr::from_term(Term::smooth(Rational::one(), 0, 0, rat_int(1)))
            }
            InitialKind::ScaledExp => {
                Expr::from_term(Term::smooth(rat_int(4), 0, 1, rat_int(2)))
            }
            InitialKind::DiracAtR => Expr::from_term(Term::dirac(Rational::one(), 0, 0)),
        }
    }
}

/// The problem a case runs: a built-in example or an explicit triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemRef {
    Example(u8),
    Custom {
        selection_power: u32,
        aggregation: Aggregation,
        initial: InitialKind,
    },
}

impl ProblemRef {
    pub fn references_radius(&self) -> bool {
        match self {
            ProblemRef::Example(id) => matches!(id, 3 | 4),
            ProblemRef::Custom { initial, .. } => *initial == InitialKind::DiracAtR,
        }
    }

    /// Example id when the reference is (or coincides with) a built-in case.
    pub fn example_id(&self) -> Option<u8> {
        match self {
            ProblemRef::Example(id) => Some(*id),
            ProblemRef::Custom { .. } => None,
        }
    }

    pub fn to_spec(&self) -> Result<ProblemSpec, EngineError> {
        match self {
            ProblemRef::Example(id) => ProblemSpec::example(*id),
            ProblemRef::Custom {
                selection_power,
                aggregation,
                initial,
            } => ProblemSpec::new(
                *selection_power,
                *aggregation,
                initial.expr(),
                *initial == InitialKind::DiracAtR,
            ),
        }
    }

    fn emit(&self) -> String {
        match self {
            ProblemRef::Example(id) => id.to_string(),
            ProblemRef::Custom {
                selection_power,
                aggregation,
                initial,
            } => {
                let agg = match aggregation {
                    Aggregation::None => "none",
                    Aggregation::ConstantUnit => "constant-unit",
                };
                format!(
                    "k={}, aggregation={}, initial={}",
                    selection_power,
                    agg,
                    initial.keyword()
                )
            }
        }
    }

    fn parse(value: &str, line: usize) -> Result<Self, ConfigError> {
        let value = value.trim();
        if let Ok(id) = value.parse::<u8>() {
            if (1..=6).contains(&id) {
                return Ok(ProblemRef::Example(id));
            }
            return Err(ConfigError::new(
                Some(line),
                "problem",
                format!("example id {id} out of range 1..=6"),
            ));
        }
        let mut selection_power = None;
        let mut aggregation = None;
        let mut initial = None;
        for part in value.split(',') {
            let part = part.trim();
            let (key, val) = part.split_once('=').ok_or_else(|| {
                ConfigError::new(
                    Some(line),
                    "problem",
                    format!("expected `key=value` in problem triple, got `{part}`"),
                )
            })?;
            match (key.trim(), val.trim()) {
                ("k", v) => {
                    selection_power = Some(v.parse::<u32>().map_err(|_| {
                        ConfigError::new(Some(line), "problem", "selection power must be a positive integer")
                    })?);
                }
                ("aggregation", "none") => aggregation = Some(Aggregation::None),
                ("aggregation", "constant-unit") => {
                    aggregation = Some(Aggregation::ConstantUnit)
                }
                ("aggregation", other) => {
                    return Err(ConfigError::new(
                        Some(line),
                        "problem",
                        format!("unknown aggregation `{other}` (none | constant-unit)"),
                    ));
                }
                ("initial", v) => {
                    initial = Some(InitialKind::from_keyword(v).ok_or_else(|| {
                        ConfigError::new(
                            Some(line),
                            "problem",
                            format!(
                                "unknown initial `{v}` (exp(-u) | 4u*exp(-2u) | delta(u-r))"
                            ),
                        )
                    })?);
                }
                (other, _) => {
                    return Err(ConfigError::new(
                        Some(line),
                        "problem",
                        format!("unknown problem field `{other}`"),
                    ));
                }
            }
        }
        match (selection_power, aggregation, initial) {
            (Some(k), Some(aggregation), Some(initial)) => Ok(ProblemRef::Custom {
                selection_power: k,
                aggregation,
                initial,
            }),
            _ => Err(ConfigError::new(
                Some(line),
                "problem",
                "custom problem needs k=, aggregation=, initial=",
            )),
        }
    }
}

/// One batch case: problem, truncation orders, evaluation times and grid,
/// and the artifacts to produce.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseConfig {
    pub case_name: String,
    pub problem: ProblemRef,
    pub n_terms: Vec<u32>,
    pub t_values: Vec<Rational>,
    pub u_min: Rational,
    pub u_max: Rational,
    pub u_step: Rational,
    pub r_value: Option<Rational>,
    pub outputs: BTreeSet<OutputKind>,
}

impl CaseConfig {
    /// Largest requested truncation order.
    pub fn max_terms(&self) -> u32 {
        self.n_terms.iter().copied().max().unwrap_or(0)
    }

    /// The evaluation grid `u_min, u_min + step, ..., <= u_max`, exact.
    pub fn u_grid(&self) -> Vec<Rational> {
        let mut grid = Vec::new();
        let mut u = self.u_min.clone();
        while u <= self.u_max {
            grid.push(u.clone());
            u += &self.u_step;
        }
        grid
    }

    /// Semantic validation shared by the parser and programmatic callers.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |field: &str, message: String| Err(ConfigError::new(None, field, message));
        if self.case_name.is_empty()
            || !self
                .case_name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return err(
                "case_name",
                format!("`{}` is not an identifier", self.case_name),
            );
        }
        if self.n_terms.is_empty() {
            return err("n_terms", "at least one truncation order is required".into());
        }
        if self.n_terms.iter().any(|&n| n == 0) {
            return err("n_terms", "truncation orders must be positive".into());
        }
        if self.u_step <= Rational::zero() {
            return err("u_step", "grid step must be positive".into());
        }
        if self.u_max < self.u_min {
            return err("u_max", "u_max must be at least u_min".into());
        }
        if self.u_min.is_negative() {
            return err("u_min", "u_min must be nonnegative".into());
        }
        let span = (&self.u_max - &self.u_min) / &self.u_step;
        if span > rat_int(2_000_000) {
            return err("u_step", "grid would exceed 2e6 points".into());
        }
        let needs_radius = self.problem.references_radius();
        if needs_radius {
            if self.r_value.is_none() {
                return err("r_value", "this problem requires a radius".into());
            }
            if self.u_min <= Rational::zero() {
                return err(
                    "u_min",
                    "u_min must be positive for problems with distributional content".into(),
                );
            }
        } else if self.r_value.is_some() {
            return err("r_value", "this problem does not take a radius".into());
        }
        if let Some(r) = &self.r_value {
            if !r.is_positive() {
                return err("r_value", "radius must be positive".into());
            }
        }
        Ok(())
    }

    /// Serializes in the canonical key order; `parse` restores it exactly.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("case_name = {}\n", self.case_name));
        out.push_str(&format!("problem = {}\n", self.problem.emit()));
        for n in &self.n_terms {
            out.push_str(&format!("n_terms = {n}\n"));
        }
        for t in &self.t_values {
            out.push_str(&format!("t_values = {}\n", format_rational(t)));
        }
        out.push_str(&format!("u_min = {}\n", format_rational(&self.u_min)));
        out.push_str(&format!("u_max = {}\n", format_rational(&self.u_max)));
        out.push_str(&format!("u_step = {}\n", format_rational(&self.u_step)));
        if let Some(r) = &self.r_value {
            out.push_str(&format!("r_value = {}\n", format_rational(r)));
        }
        for o in &self.outputs {
            out.push_str(&format!("outputs = {}\n", o.keyword()));
        }
        out
    }

    /// Parses the flat `key = value` format. Unknown keys, repeated scalar
    /// keys, and malformed values are reported with their line number.
    pub fn parse(text: &str) -> Result<CaseConfig, ConfigError> {
        let mut case_name: Option<(String, usize)> = None;
        let mut problem: Option<ProblemRef> = None;
        let mut n_terms: Vec<u32> = Vec::new();
        let mut t_values: Vec<Rational> = Vec::new();
        let mut u_min: Option<Rational> = None;
        let mut u_max: Option<Rational> = None;
        let mut u_step: Option<Rational> = None;
        let mut r_value: Option<Rational> = None;
        let mut outputs: BTreeSet<OutputKind> = BTreeSet::new();

        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::new(Some(line_no), "", "expected `key = value`")
            })?;
            let key = key.trim();
            let value = value.trim();
            let scalar_once = |prev: bool| -> Result<(), ConfigError> {
                if prev {
                    Err(ConfigError::new(
                        Some(line_no),
                        key,
                        "key given more than once",
                    ))
                } else {
                    Ok(())
                }
            };
            let rational = |field: &str| -> Result<Rational, ConfigError> {
                parse_rational(value).ok_or_else(|| {
                    ConfigError::new(Some(line_no), field, format!("`{value}` is not a number"))
                })
            };
            match key {
                "case_name" => {
                    scalar_once(case_name.is_some())?;
                    case_name = Some((value.to_string(), line_no));
                }
                "problem" => {
                    scalar_once(problem.is_some())?;
                    problem = Some(ProblemRef::parse(value, line_no)?);
                }
                "n_terms" => {
                    let n = value.parse::<u32>().map_err(|_| {
                        ConfigError::new(
                            Some(line_no),
                            "n_terms",
                            format!("`{value}` is not a nonnegative integer"),
                        )
                    })?;
                    n_terms.push(n);
                }
                "t_values" => t_values.push(rational("t_values")?),
                "u_min" => {
                    scalar_once(u_min.is_some())?;
                    u_min = Some(rational("u_min")?);
                }
                "u_max" => {
                    scalar_once(u_max.is_some())?;
                    u_max = Some(rational("u_max")?);
                }
                "u_step" => {
                    scalar_once(u_step.is_some())?;
                    u_step = Some(rational("u_step")?);
                }
                "r_value" => {
                    scalar_once(r_value.is_some())?;
                    r_value = Some(rational("r_value")?);
                }
                "outputs" => {
                    let kind = OutputKind::from_keyword(value).ok_or_else(|| {
                        ConfigError::new(
                            Some(line_no),
                            "outputs",
                            format!(
                                "unknown output `{value}` (density | error_table | moments | oracle_compare)"
                            ),
                        )
                    })?;
                    outputs.insert(kind);
                }
                other => {
                    return Err(ConfigError::new(
                        Some(line_no),
                        other,
                        "unknown key",
                    ));
                }
            }
        }

        let required = |field: &str| ConfigError::new(None, field, "missing required key");
        let config = CaseConfig {
            case_name: case_name.ok_or_else(|| required("case_name"))?.0,
            problem: problem.ok_or_else(|| required("problem"))?,
            n_terms,
            t_values,
            u_min: u_min.ok_or_else(|| required("u_min"))?,
            u_max: u_max.ok_or_else(|| required("u_max"))?,
            u_step: u_step.ok_or_else(|| required("u_step"))?,
            r_value,
            outputs,
        };
        config.validate()?;
        Ok(config)
    }
}

/// The canonical configuration behind each built-in example's figures and
/// tables.
///
/// The error-table grids for examples 1 and 2 stop where the truncated
/// series still tracks the exact solution (the published error tables sample
/// the plotted range, not the far tail where a truncated polynomial-times-
/// exponential inevitably separates).
pub fn canonical_config(example: u8) -> Result<CaseConfig, EngineError> {
    use OutputKind::*;
    let breakage_outputs: BTreeSet<OutputKind> = [Density, ErrorTable, Moments].into();
    let abe_outputs: BTreeSet<OutputKind> = [Density, Moments, OracleCompare].into();
    let dec = |s: &str| parse_rational(s).expect("literal");
    let config = match example {
        1 => CaseConfig {
            case_name: "example1".into(),
            problem: ProblemRef::Example(1),
            n_terms: vec![10, 15, 20, 25, 100],
            t_values: vec![dec("0.4"), dec("0.8"), dec("0.9"), dec("1.2"), dec("1.6")],
            u_min: dec("0.01"),
            u_max: rat_int(5),
            u_step: dec("0.01"),
            r_value: None,
            outputs: breakage_outputs,
        },
        2 => CaseConfig {
            case_name: "example2".into(),
            problem: ProblemRef::Example(2),
            n_terms: vec![10, 15, 20, 25],
            t_values: vec![dec("0.01"), dec("0.04"), dec("0.07"), dec("0.1")],
            u_min: dec("0.01"),
            u_max: rat_int(9),
            u_step: dec("0.01"),
            r_value: None,
            outputs: breakage_outputs,
        },
        3 => CaseConfig {
            case_name: "example3".into(),
            problem: ProblemRef::Example(3),
            n_terms: vec![5, 10, 15, 20],
            t_values: vec![dec("0.3"), rat_int(1)],
            u_min: dec("0.01"),
            u_max: rat_int(2),
            u_step: dec("0.01"),
            r_value: Some(rat_int(1)),
            outputs: breakage_outputs,
        },
        4 => CaseConfig {
            case_name: "example4".into(),
            problem: ProblemRef::Example(4),
            n_terms: vec![5, 10, 15, 20],
            t_values: vec![dec("0.05"), dec("0.2")],
            u_min: dec("0.01"),
            u_max: rat_int(2),
            u_step: dec("0.01"),
            r_value: Some(rat_int(1)),
            outputs: breakage_outputs,
        },
        5 => CaseConfig {
            case_name: "example5".into(),
            problem: ProblemRef::Example(5),
            n_terms: vec![1, 2, 3, 4, 5],
            t_values: vec![dec("0.2"), dec("0.4")],
            u_min: dec("0.01"),
            u_max: rat_int(10),
            u_step: dec("0.01"),
            r_value: None,
            outputs: abe_outputs,
        },
        6 => CaseConfig {
            case_name: "example6".into(),
            problem: ProblemRef::Example(6),
            n_terms: vec![1, 2, 3, 4],
            t_values: vec![dec("0.2"), dec("0.4")],
            u_min: dec("0.01"),
            u_max: rat_int(10),
            u_step: dec("0.01"),
            r_value: None,
            outputs: abe_outputs,
        },
        other => return Err(EngineError::UnknownExample(other)),
    };
    debug_assert!(config.validate().is_ok());
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_configs_round_trip() {
        for id in 1..=6u8 {
            let config = canonical_config(id).unwrap();
            let text = config.emit();
            let parsed = CaseConfig::parse(&text).unwrap();
            assert_eq!(parsed, config, "example {id}");
        }
    }

    #[test]
    fn custom_problem_round_trips() {
        let text = "\
case_name = custom-run
problem = k=2, aggregation=none, initial=exp(-u)
n_terms = 3
t_values = 0.5
u_min = 0
u_max = 4
u_step = 0.5
outputs = density
outputs = moments
";
        let config = CaseConfig::parse(text).unwrap();
        assert_eq!(
            config.problem,
            ProblemRef::Custom {
                selection_power: 2,
                aggregation: Aggregation::None,
                initial: InitialKind::ExpNegU,
            }
        );
        assert_eq!(CaseConfig::parse(&config.emit()).unwrap(), config);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "\
# a case
case_name = c1
problem = 1   # example one
n_terms = 2

u_min = 0.01
u_max = 1
u_step = 0.5
outputs = density
";
        let config = CaseConfig::parse(text).unwrap();
        assert_eq!(config.case_name, "c1");
        assert_eq!(config.u_grid().len(), 2); // 0.01, 0.51
    }

    #[test]
    fn errors_carry_line_and_field() {
        let text = "case_name = x\nproblem = 9\n";
        let err = CaseConfig::parse(text).unwrap_err();
        assert_eq!(err.line, Some(2));
        assert_eq!(err.field, "problem");

        let err = CaseConfig::parse("nonsense\n").unwrap_err();
        assert_eq!(err.line, Some(1));

        let err = CaseConfig::parse("case_name = a\ncase_name = b\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert_eq!(err.field, "case_name");

        let text = "case_name = x\nproblem = 3\nn_terms = 1\nu_min = 0.1\nu_max = 1\nu_step = 0.1\n";
        let err = CaseConfig::parse(text).unwrap_err();
        assert_eq!(err.field, "r_value");

        let text = "case_name = x\nproblem = 1\nn_terms = 0\nu_min = 0\nu_max = 1\nu_step = 0.1\n";
        let err = CaseConfig::parse(text).unwrap_err();
        assert_eq!(err.field, "n_terms");
    }

    #[test]
    fn radius_rules() {
        // radius on a smooth problem is rejected
        let text = "case_name = x\nproblem = 1\nn_terms = 1\nr_value = 1\nu_min = 0\nu_max = 1\nu_step = 0.1\n";
        assert_eq!(CaseConfig::parse(text).unwrap_err().field, "r_value");
        // u_min = 0 with distributional content is rejected
        let text = "case_name = x\nproblem = 3\nn_terms = 1\nr_value = 1\nu_min = 0\nu_max = 1\nu_step = 0.1\n";
        assert_eq!(CaseConfig::parse(text).unwrap_err().field, "u_min");
    }

    #[test]
    fn grid_is_inclusive_and_exact() {
        let config = canonical_config(1).unwrap();
        let grid = config.u_grid();
        assert_eq!(grid.len(), 500);
        assert_eq!(grid[0], parse_rational("0.01").unwrap());
        assert_eq!(grid[499], rat_int(5));
    }
}
