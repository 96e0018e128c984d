//! Problem definitions: coefficient expressions, grid, `d` range and solver
//! options, either loaded from a small `key = value` file or taken from the
//! built-in catalogue.
//!
//! ```text
//! # comment
//! name = "ex4.4"
//! K = "2+cos(pi*x)"
//! P = "2-cos(2*pi*x)"
//! r_lambda = 1        # r = r_alpha * (K/P)^r_lambda
//! r_alpha = 1
//! n_cells = 512
//! ```
//!
//! Either `r` (an expression) or `r_lambda` must be given, not both.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::expr::{self, Expression};
use crate::grid::{GridSpec, ScalarField};
use crate::solver::SolverOptions;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("config error{}{}: {message}", key.as_ref().map(|k| format!(" in key '{k}'")).unwrap_or_default(), line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config {
        key: Option<String>,
        line: Option<usize>,
        message: String,
    },
    #[error("unknown example '{0}' (known: {known})", known = BUILTIN_IDS.join(", "))]
    UnknownExample(String),
}

impl ScenarioError {
    fn config(key: Option<&str>, line: Option<usize>, message: impl Into<String>) -> Self {
        ScenarioError::Config {
            key: key.map(str::to_string),
            line,
            message: message.into(),
        }
    }
}

pub const BUILTIN_IDS: [&str; 8] = [
    "ex4.1a",
    "ex4.1b",
    "ex4.2a",
    "ex4.2b",
    "ex4.3",
    "ex4.4",
    "pk_manufactured",
    "a1_demo",
];

/// An expression together with the text it was parsed from.
#[derive(Debug, Clone)]
pub struct Formula {
    text: String,
    expr: Expression,
}

impl Formula {
    pub fn parse(text: &str) -> Result<Self, expr::ExprError> {
        Ok(Self {
            text: text.to_string(),
            expr: expr::parse(text)?,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn expr(&self) -> &Expression {
        &self.expr
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        self.expr == other.expr
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GrowthRate {
    Formula(Formula),
    /// `r = alpha * (K/P)^lambda`.
    Power { lambda: f64, alpha: f64 },
}

/// Log-spaced diffusion grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DGridSpec {
    pub d_min: f64,
    pub d_max: f64,
    pub points: usize,
}

impl Default for DGridSpec {
    fn default() -> Self {
        Self {
            d_min: 1e-4,
            d_max: 1e4,
            points: 81,
        }
    }
}

impl DGridSpec {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.d_min.is_finite() && self.d_min > 0.0) {
            return Err(ScenarioError::config(Some("d_min"), None, "d_min must be positive"));
        }
        if !(self.d_max.is_finite() && self.d_max > self.d_min) {
            return Err(ScenarioError::config(
                Some("d_max"),
                None,
                "d_max must exceed d_min",
            ));
        }
        if self.points < 2 {
            return Err(ScenarioError::config(
                Some("d_points"),
                None,
                "need at least 2 points",
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let (lo, hi) = (self.d_min.log10(), self.d_max.log10());
        let last = self.points - 1;
        (0..self.points)
            .map(|i| match i {
                0 => self.d_min,
                _ if i == last => self.d_max,
                _ => 10f64.powf(lo + (hi - lo) * i as f64 / last as f64),
            })
            .collect()
    }
}

/// Monotone relation between two coefficient fields, `follower = h(driver)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correlation {
    Positive,
    Negative,
}

/// Behaviour of `P/K` along `K` when `P = h(K)`: increasing means
/// `h'(t) > h(t)/t`, decreasing means `h'(t) < h(t)/t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioTrend {
    Increasing,
    Decreasing,
    Constant,
}

impl fmt::Display for Correlation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Correlation::Positive => "positive",
            Correlation::Negative => "negative",
        })
    }
}

impl fmt::Display for RatioTrend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatioTrend::Increasing => "increasing",
            RatioTrend::Decreasing => "decreasing",
            RatioTrend::Constant => "constant",
        })
    }
}

/// Structural facts known analytically for a scenario. Anything left as
/// `None` is detected from the sampled fields where possible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Relations {
    /// `P = h(K)` and the trend of `h(t)/t`.
    pub p_of_k: Option<RatioTrend>,
    /// `r = h(K)` with monotone `h`.
    pub r_of_k: Option<Correlation>,
    /// `r = h(K/P)` with monotone `h`.
    pub r_of_kp: Option<Correlation>,
}

/// Sampled coefficient fields on the scenario grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Fields {
    pub k: ScalarField,
    pub p: ScalarField,
    pub r: ScalarField,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub k: Formula,
    pub p: Formula,
    pub growth: GrowthRate,
    pub grid: GridSpec,
    pub d_grid: DGridSpec,
    pub opts: SolverOptions,
    pub relations: Relations,
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.k == other.k
            && self.p == other.p
            && self.growth == other.growth
            && self.grid == other.grid
            && self.d_grid == other.d_grid
            && self.opts == other.opts
    }
}

/// Growth rate `α (K/P)^λ`, exactly `α` for `λ = 0`.
pub fn power_growth(k: &ScalarField, p: &ScalarField, alpha: f64, lambda: f64) -> ScalarField {
    if lambda == 0.0 {
        ScalarField::constant(*k.grid(), alpha)
    } else {
        (k / p).map(|q| alpha * q.powf(lambda))
    }
}

impl Scenario {
    /// Samples `K`, `P` and `r` on `grid`.
    pub fn sample_on(&self, grid: &GridSpec) -> Result<Fields, ScenarioError> {
        let sample = |key: &str, f: &Formula| {
            f.expr()
                .sample(grid)
                .map_err(|e| ScenarioError::config(Some(key), None, e.to_string()))
        };
        let k = sample("K", &self.k)?;
        let p = sample("P", &self.p)?;
        let r = match &self.growth {
            GrowthRate::Formula(f) => sample("r", f)?,
            GrowthRate::Power { lambda, alpha } => power_growth(&k, &p, *alpha, *lambda),
        };
        Ok(Fields { k, p, r })
    }

    pub fn fields(&self) -> Result<Fields, ScenarioError> {
        self.sample_on(&self.grid)
    }

    pub fn d_values(&self) -> Vec<f64> {
        self.d_grid.values()
    }

    pub fn lambda(&self) -> Option<f64> {
        match self.growth {
            GrowthRate::Power { lambda, .. } => Some(lambda),
            GrowthRate::Formula(_) => None,
        }
    }

    /// Switches to the power family with exponent `lambda`, keeping `alpha`
    /// (1 when the scenario had an explicit growth expression).
    pub fn with_lambda(&self, lambda: f64) -> Self {
        let alpha = match self.growth {
            GrowthRate::Power { alpha, .. } => alpha,
            GrowthRate::Formula(_) => 1.0,
        };
        let mut out = self.clone();
        out.growth = GrowthRate::Power { lambda, alpha };
        out.relations.r_of_kp = power_correlation(lambda);
        out
    }

    pub fn with_cells(&self, n_cells: usize) -> Result<Self, ScenarioError> {
        let grid = GridSpec::new(self.grid.x0(), self.grid.x1(), n_cells)
            .map_err(|e| ScenarioError::config(Some("n_cells"), None, e.to_string()))?;
        Ok(Self { grid, ..self.clone() })
    }

    /// Checks strict positivity of every field at 4x the grid resolution.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.d_grid.validate()?;
        self.opts
            .validate()
            .map_err(|e| ScenarioError::config(None, None, e.to_string()))?;
        if let GrowthRate::Power { lambda, alpha } = self.growth {
            if !lambda.is_finite() {
                return Err(ScenarioError::config(Some("r_lambda"), None, "must be finite"));
            }
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(ScenarioError::config(Some("r_alpha"), None, "must be positive"));
            }
        }
        let fine = self.grid.refined(4);
        let fields = self.sample_on(&fine)?;
        for (key, f) in [("K", &fields.k), ("P", &fields.p), ("r", &fields.r)] {
            let (i, min) = f
                .values()
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
            if min <= 0.0 {
                return Err(ScenarioError::config(
                    Some(key),
                    None,
                    format!("{key} non-positive at x={} (value {min})", fine.node(i)),
                ));
            }
        }
        Ok(())
    }

    /// Renders the scenario in the file format accepted by [`load_scenario`].
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "name = \"{}\"", self.name);
        let _ = writeln!(s, "K = \"{}\"", self.k.text());
        let _ = writeln!(s, "P = \"{}\"", self.p.text());
        match &self.growth {
            GrowthRate::Formula(f) => {
                let _ = writeln!(s, "r = \"{}\"", f.text());
            }
            GrowthRate::Power { lambda, alpha } => {
                let _ = writeln!(s, "r_lambda = {lambda:?}");
                let _ = writeln!(s, "r_alpha = {alpha:?}");
            }
        }
        let _ = writeln!(s, "x0 = {:?}", self.grid.x0());
        let _ = writeln!(s, "x1 = {:?}", self.grid.x1());
        let _ = writeln!(s, "n_cells = {}", self.grid.n_cells());
        let _ = writeln!(s, "d_min = {:?}", self.d_grid.d_min);
        let _ = writeln!(s, "d_max = {:?}", self.d_grid.d_max);
        let _ = writeln!(s, "d_points = {}", self.d_grid.points);
        let _ = writeln!(s, "newton_tol = {:?}", self.opts.newton_tol);
        let _ = writeln!(s, "pt_tol = {:?}", self.opts.pt_tol);
        s
    }
}

fn power_correlation(lambda: f64) -> Option<Correlation> {
    if lambda > 0.0 {
        Some(Correlation::Positive)
    } else if lambda < 0.0 {
        Some(Correlation::Negative)
    } else {
        None
    }
}

const KNOWN_KEYS: [&str; 14] = [
    "name",
    "K",
    "P",
    "r",
    "r_lambda",
    "r_alpha",
    "x0",
    "x1",
    "n_cells",
    "d_min",
    "d_max",
    "d_points",
    "newton_tol",
    "pt_tol",
];

struct Entry {
    line: usize,
    value: String,
    quoted: bool,
}

fn split_value(raw: &str, line: usize, key: &str) -> Result<(String, bool), ScenarioError> {
    let raw = raw.trim();
    if let Some(rest) = raw.strip_prefix('"') {
        let end = rest
            .find('"')
            .ok_or_else(|| ScenarioError::config(Some(key), Some(line), "unterminated string"))?;
        let tail = rest[end + 1..].trim();
        if !(tail.is_empty() || tail.starts_with('#')) {
            return Err(ScenarioError::config(
                Some(key),
                Some(line),
                "unexpected text after closing quote",
            ));
        }
        Ok((rest[..end].to_string(), true))
    } else {
        let value = raw.split('#').next().unwrap_or("").trim();
        Ok((value.to_string(), false))
    }
}

/// Parses a scenario file and validates it.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut entries: BTreeMap<&str, Entry> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| ScenarioError::config(None, Some(line), "expected 'key = value'"))?;
        let key = key.trim();
        let Some(&known) = KNOWN_KEYS.iter().find(|k| **k == key) else {
            return Err(ScenarioError::config(Some(key), Some(line), "unknown key"));
        };
        let (value, quoted) = split_value(value, line, known)?;
        if entries
            .insert(known, Entry { line, value, quoted })
            .is_some()
        {
            return Err(ScenarioError::config(Some(known), Some(line), "duplicate key"));
        }
    }

    let formula = |key: &str| -> Result<Option<Formula>, ScenarioError> {
        let Some(e) = entries.get(key) else {
            return Ok(None);
        };
        if !e.quoted {
            return Err(ScenarioError::config(
                Some(key),
                Some(e.line),
                "expressions must be quoted strings",
            ));
        }
        Formula::parse(&e.value)
            .map(Some)
            .map_err(|err| ScenarioError::config(Some(key), Some(e.line), err.to_string()))
    };
    let number = |key: &str, default: f64| -> Result<f64, ScenarioError> {
        match entries.get(key) {
            None => Ok(default),
            Some(e) => e.value.parse::<f64>().map_err(|_| {
                ScenarioError::config(Some(key), Some(e.line), format!("not a number: '{}'", e.value))
            }),
        }
    };
    let count = |key: &str, default: usize| -> Result<usize, ScenarioError> {
        match entries.get(key) {
            None => Ok(default),
            Some(e) => e.value.parse::<usize>().map_err(|_| {
                ScenarioError::config(
                    Some(key),
                    Some(e.line),
                    format!("not a non-negative integer: '{}'", e.value),
                )
            }),
        }
    };

    let name = entries
        .get("name")
        .map(|e| e.value.clone())
        .unwrap_or_else(|| "custom".to_string());
    let k = formula("K")?.ok_or_else(|| ScenarioError::config(Some("K"), None, "missing key K"))?;
    let p = formula("P")?.ok_or_else(|| ScenarioError::config(Some("P"), None, "missing key P"))?;
    let growth = match (formula("r")?, entries.contains_key("r_lambda")) {
        (Some(_), true) => {
            return Err(ScenarioError::config(
                Some("r"),
                entries.get("r").map(|e| e.line),
                "give either r or r_lambda, not both",
            ))
        }
        (Some(f), false) => {
            if entries.contains_key("r_alpha") {
                return Err(ScenarioError::config(
                    Some("r_alpha"),
                    entries.get("r_alpha").map(|e| e.line),
                    "r_alpha requires r_lambda",
                ));
            }
            GrowthRate::Formula(f)
        }
        (None, true) => GrowthRate::Power {
            lambda: number("r_lambda", 1.0)?,
            alpha: number("r_alpha", 1.0)?,
        },
        (None, false) => {
            return Err(ScenarioError::config(
                Some("r"),
                None,
                "missing key r (or r_lambda)",
            ))
        }
    };

    let grid = GridSpec::new(
        number("x0", 0.0)?,
        number("x1", 1.0)?,
        count("n_cells", GridSpec::DEFAULT_CELLS)?,
    )
    .map_err(|e| ScenarioError::config(Some("n_cells"), None, e.to_string()))?;
    let defaults = DGridSpec::default();
    let d_grid = DGridSpec {
        d_min: number("d_min", defaults.d_min)?,
        d_max: number("d_max", defaults.d_max)?,
        points: count("d_points", defaults.points)?,
    };
    let base = SolverOptions::default();
    let opts = SolverOptions {
        newton_tol: number("newton_tol", base.newton_tol)?,
        pt_tol: number("pt_tol", base.pt_tol)?,
        ..base
    };
    let relations = Relations {
        r_of_kp: match growth {
            GrowthRate::Power { lambda, .. } => power_correlation(lambda),
            GrowthRate::Formula(_) => None,
        },
        ..Relations::default()
    };

    let scenario = Scenario {
        name,
        k,
        p,
        growth,
        grid,
        d_grid,
        opts,
        relations,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// One of the catalogued scenarios on `(0, 1)` with default grid and
/// `d` range. `ex4.4` uses the power family with `lambda = 1`; see
/// [`Scenario::with_lambda`].
pub fn builtin_example(id: &str) -> Result<Scenario, ScenarioError> {
    use Correlation::Positive;
    use RatioTrend::{Constant, Decreasing};

    const COS: &str = "cos(pi*x)";
    let k_cos = "2+cos(pi*x)";
    let (k, p, growth, relations): (String, String, Result<String, f64>, Relations) = match id {
        "ex4.1a" => (
            "(cos(2*pi*x)+2)^2".into(),
            "cos(2*pi*x)+2".into(),
            Ok("cos(pi*x)+2".into()),
            Relations {
                p_of_k: Some(Decreasing),
                ..Relations::default()
            },
        ),
        "ex4.1b" => (
            "(2*x^3-3*x^2+3)*exp(2*x^3-3*x^2)".into(),
            "exp(2*x^3-3*x^2)".into(),
            Ok("cos(2*pi*x)+3".into()),
            Relations {
                p_of_k: Some(Decreasing),
                ..Relations::default()
            },
        ),
        "ex4.2a" | "ex4.2b" => (
            k_cos.into(),
            format!("1+{COS}/5"),
            Ok(if id == "ex4.2a" {
                format!("5/4+{COS}/4")
            } else {
                format!("exp(4*{COS})")
            }),
            Relations {
                p_of_k: Some(Decreasing),
                r_of_k: Some(Positive),
                r_of_kp: Some(Positive),
            },
        ),
        "ex4.3" => {
            let k = format!("0.1+{COS}+5*{COS}^2-2*{COS}^3");
            let p = format!("1.5-3*{COS}+{COS}^2+3*{COS}^6");
            let r = format!("({k})/({p})");
            (
                k,
                p,
                Ok(r),
                Relations {
                    r_of_kp: Some(Positive),
                    ..Relations::default()
                },
            )
        }
        "ex4.4" => (
            k_cos.into(),
            "2-cos(2*pi*x)".into(),
            Err(1.0),
            Relations {
                r_of_kp: Some(Positive),
                ..Relations::default()
            },
        ),
        "pk_manufactured" => (
            k_cos.into(),
            k_cos.into(),
            Ok(k_cos.into()),
            Relations {
                p_of_k: Some(Constant),
                r_of_k: Some(Positive),
                r_of_kp: None,
            },
        ),
        "a1_demo" => (
            k_cos.into(),
            "2-cos(pi*x)".into(),
            Ok(k_cos.into()),
            Relations {
                p_of_k: Some(Decreasing),
                r_of_k: Some(Positive),
                r_of_kp: None,
            },
        ),
        other => return Err(ScenarioError::UnknownExample(other.to_string())),
    };

    let parse = |s: &str| Formula::parse(s).expect("built-in expressions parse");
    let growth = match growth {
        Ok(r) => GrowthRate::Formula(parse(&r)),
        Err(lambda) => GrowthRate::Power { lambda, alpha: 1.0 },
    };
    Ok(Scenario {
        name: id.to_string(),
        k: parse(&k),
        p: parse(&p),
        growth,
        grid: GridSpec::unit(GridSpec::DEFAULT_CELLS).expect("default grid"),
        d_grid: DGridSpec::default(),
        opts: SolverOptions::default(),
        relations,
    })
}
