//! Scenario definitions and the `key = value` config format.
//!
//! ```text
//! # Room-temperature run
//! alpha = 0.1
//! omega0 = 1e7
//! r = 10
//! temperature_K = 300
//! k = 0
//! engines = analytic, mcwf
//! ```
//!
//! `alpha`, `omega0`, `r` and `temperature_K` are required. Times are in
//! seconds; when `t_max` is omitted it defaults to `2/ω_c`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ionheat_core::analytic::InitialCondition;
use ionheat_core::mcwf::{RateModelKind, Scheme};
use ionheat_core::PhysicalParams;
use thiserror::Error;

/// Seed used when neither the config nor the command line sets one.
pub const DEFAULT_SEED: u64 = 0x1e47_5eed;
/// Default number of grid points.
pub const DEFAULT_POINTS: usize = 50;
/// Default trajectory count for config-file scenarios.
pub const DEFAULT_TRAJECTORIES: usize = 100_000;
/// The first non-zero point of a log grid sits at `t_max · LOG_GRID_SPAN`.
pub const LOG_GRID_SPAN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid `{key}`: {message}")]
    Validation { key: String, message: String },
}

impl ConfigError {
    fn invalid(key: &str, message: impl Into<String>) -> Self {
        Self::Validation {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Engine {
    Analytic,
    Mcwf,
    Markovian,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Analytic, Engine::Mcwf, Engine::Markovian];

    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Mcwf => "mcwf",
            Engine::Markovian => "markovian",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Engine::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| format!("unknown engine `{s}` (expected analytic, mcwf or markovian)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    /// `t = 0` followed by geometric spacing from `t_max · 10⁻³` to `t_max`.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub t_max: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn times(&self) -> Vec<f64> {
        let n = self.n_points;
        match self.spacing {
            Spacing::Linear => (0..n).map(|i| self.t_max * i as f64 / (n - 1) as f64).collect(),
            Spacing::Log => {
                let mut t = vec![0.0];
                let steps = (n - 2).max(1) as f64;
                t.extend((0..n - 1).map(|i| self.t_max * LOG_GRID_SPAN.powf(1.0 - i as f64 / steps)));
                if let Some(last) = t.last_mut() {
                    *last = self.t_max;
                }
                t
            }
        }
    }
}

/// Per-scenario settings of the quantum-jump ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOverrides {
    /// Truncation; `None` picks a size from the exact heating curve.
    pub dim: Option<usize>,
    pub n_traj: usize,
    pub seed: u64,
    pub dp_max: f64,
    pub leak_tol: f64,
    pub scheme: Scheme,
    pub rate_model: RateModelKind,
}

impl Default for SimOverrides {
    fn default() -> Self {
        Self {
            dim: None,
            n_traj: DEFAULT_TRAJECTORIES,
            seed: DEFAULT_SEED,
            dp_max: ionheat_core::mcwf::DEFAULT_DP_MAX,
            leak_tol: ionheat_core::mcwf::DEFAULT_LEAK_TOL,
            scheme: Scheme::Exact,
            rate_model: RateModelKind::TimeDependent,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: PhysicalParams,
    pub init: InitialCondition,
    pub grid: GridSpec,
    /// Sorted, without duplicates.
    pub engines: Vec<Engine>,
    pub sim: SimOverrides,
}

impl Scenario {
    pub fn has(&self, engine: Engine) -> bool {
        self.engines.contains(&engine)
    }

    /// Checks the invariants that cannot be expressed by the field types.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.engines.is_empty() {
            return Err(ConfigError::invalid("engines", "at least one engine is required"));
        }
        if !(self.grid.t_max > 0.0 && self.grid.t_max.is_finite()) {
            return Err(ConfigError::invalid("t_max", "must be positive and finite"));
        }
        if self.grid.n_points < 2 {
            return Err(ConfigError::invalid("n_points", "must be at least 2"));
        }
        if let Some(dim) = self.sim.dim {
            if dim < self.init.k() + 3 {
                return Err(ConfigError::invalid("dim", "must exceed k + 2"));
            }
        }
        if !(self.sim.dp_max > 0.0 && self.sim.dp_max <= 0.1) {
            return Err(ConfigError::invalid("dp_max", "must lie in (0, 0.1]"));
        }
        if !(self.sim.leak_tol > 0.0 && self.sim.leak_tol < 1.0) {
            return Err(ConfigError::invalid("leak_tol", "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Drops the ensemble when no trajectories are requested.
    pub(crate) fn normalize_engines(&mut self) {
        self.engines.sort();
        self.engines.dedup();
        if self.sim.n_traj == 0 {
            self.engines.retain(|e| *e != Engine::Mcwf);
        }
    }
}

const KEYS: &[&str] = &[
    "alpha",
    "omega0",
    "r",
    "temperature_K",
    "k",
    "t_max",
    "n_points",
    "spacing",
    "engines",
    "dim",
    "n_traj",
    "seed",
    "dp_max",
    "leak_tol",
    "scheme",
    "rates",
    "name",
];

/// Parses and validates a scenario. `name` is used unless the text sets one.
pub fn parse_config(text: &str, name: &str) -> Result<Scenario, ConfigError> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Parse {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(ConfigError::Parse {
                line,
                message: format!("unknown key `{key}`"),
            });
        };
        if entries.insert(known, (line, value)).is_some() {
            return Err(ConfigError::Parse {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
    }

    let get = |key: &str| entries.get(key).copied();
    fn parse<T: FromStr>(key: &str, entry: (usize, &str)) -> Result<T, ConfigError> {
        entry.1.parse().map_err(|_| ConfigError::Parse {
            line: entry.0,
            message: format!("cannot parse `{}` for `{key}`", entry.1),
        })
    }
    let required = |key: &str| -> Result<f64, ConfigError> {
        let entry = get(key).ok_or_else(|| ConfigError::invalid(key, "missing required key"))?;
        let v: f64 = parse(key, entry)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(ConfigError::invalid(key, format!("must be positive and finite, got {v}")))
        }
    };

    let alpha = required("alpha")?;
    let omega0 = required("omega0")?;
    let r = required("r")?;
    let temperature = required("temperature_K")?;
    let params = PhysicalParams::new(alpha, omega0, r, temperature)
        .map_err(|e| ConfigError::invalid("alpha", e.to_string()))?;

    let k = get("k").map(|e| parse::<usize>("k", e)).transpose()?.unwrap_or(0);
    let init = InitialCondition::fock(k).map_err(|e| ConfigError::invalid("k", e.to_string()))?;

    let t_max = match get("t_max") {
        Some(e) => {
            let v: f64 = parse("t_max", e)?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::invalid("t_max", "must be positive and finite"));
            }
            v
        }
        None => 2.0 / params.omega_c(),
    };
    let n_points = get("n_points").map(|e| parse("n_points", e)).transpose()?.unwrap_or(DEFAULT_POINTS);
    let spacing = match get("spacing").map(|e| e.1) {
        None | Some("log") => Spacing::Log,
        Some("linear") => Spacing::Linear,
        Some(other) => return Err(ConfigError::invalid("spacing", format!("expected linear or log, got `{other}`"))),
    };
    let engines = match get("engines") {
        None => vec![Engine::Analytic, Engine::Mcwf],
        Some((_, value)) => value
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<Engine>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|m| ConfigError::invalid("engines", m))?,
    };

    let mut sim = SimOverrides::default();
    if let Some(e) = get("dim") {
        sim.dim = Some(parse("dim", e)?);
    }
    if let Some(e) = get("n_traj") {
        sim.n_traj = parse("n_traj", e)?;
    }
    if let Some(e) = get("seed") {
        sim.seed = parse("seed", e)?;
    }
    if let Some(e) = get("dp_max") {
        sim.dp_max = parse("dp_max", e)?;
    }
    if let Some(e) = get("leak_tol") {
        sim.leak_tol = parse("leak_tol", e)?;
    }
    sim.scheme = match get("scheme").map(|e| e.1) {
        None | Some("exact") => Scheme::Exact,
        Some("stepped") => Scheme::Stepped,
        Some(other) => return Err(ConfigError::invalid("scheme", format!("expected exact or stepped, got `{other}`"))),
    };
    sim.rate_model = match get("rates").map(|e| e.1) {
        None | Some("time_dependent") => RateModelKind::TimeDependent,
        Some("frozen") => RateModelKind::FrozenAsymptotic,
        Some(other) => {
            return Err(ConfigError::invalid("rates", format!("expected time_dependent or frozen, got `{other}`")))
        }
    };

    let name = get("name").map(|e| e.1.to_string()).unwrap_or_else(|| name.to_string());
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(ConfigError::invalid("name", "use letters, digits, `_` or `-`"));
    }

    let mut scenario = Scenario {
        name,
        params,
        init,
        grid: GridSpec {
            t_max,
            n_points,
            spacing,
        },
        engines,
        sim,
    };
    scenario.validate()?;
    scenario.normalize_engines();
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1_LIKE: &str = "alpha = 0.1\nomega0 = 1e7\nr = 10\ntemperature_K = 300\nk = 0";

    #[test]
    fn minimal_config_gets_defaults() {
        let s = parse_config(FIG1_LIKE, "custom").unwrap();
        assert_eq!(s.name, "custom");
        assert_eq!(s.params.temperature(), 300.0);
        assert_eq!(s.engines, vec![Engine::Analytic, Engine::Mcwf]);
        assert!((s.grid.t_max * s.params.omega_c() - 2.0).abs() < 1e-12);
        assert_eq!(s.grid.spacing, Spacing::Log);
        assert_eq!(s.sim.seed, DEFAULT_SEED);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = format!("# header\n\n{FIG1_LIKE}  # trailing\nengines = analytic , markovian\n");
        let s = parse_config(&text, "x").unwrap();
        assert_eq!(s.engines, vec![Engine::Analytic, Engine::Markovian]);
    }

    #[test]
    fn negative_physical_value_names_key() {
        let text = FIG1_LIKE.replace("r = 10", "r = -1");
        match parse_config(&text, "x") {
            Err(ConfigError::Validation { key, .. }) => assert_eq!(key, "r"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_engine_list_is_rejected() {
        let text = format!("{FIG1_LIKE}\nengines =\n");
        match parse_config(&text, "x") {
            Err(ConfigError::Validation { key, .. }) => assert_eq!(key, "engines"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = format!("{FIG1_LIKE}\nbogus = 1\n");
        assert_eq!(
            parse_config(&text, "x"),
            Err(ConfigError::Parse {
                line: 6,
                message: "unknown key `bogus`".into()
            })
        );
        let text = format!("{FIG1_LIKE}\nk = 1\n");
        assert!(matches!(parse_config(&text, "x"), Err(ConfigError::Parse { line: 6, .. })));
        let text = format!("{FIG1_LIKE}\nn_points = many\n");
        assert!(matches!(parse_config(&text, "x"), Err(ConfigError::Parse { line: 6, .. })));
        assert!(matches!(parse_config("alpha 0.1", "x"), Err(ConfigError::Parse { line: 1, .. })));
    }

    #[test]
    fn missing_required_key() {
        let text = FIG1_LIKE.replace("omega0 = 1e7\n", "");
        match parse_config(&text, "x") {
            Err(ConfigError::Validation { key, .. }) => assert_eq!(key, "omega0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_trajectories_drop_the_ensemble() {
        let text = format!("{FIG1_LIKE}\nn_traj = 0\n");
        let s = parse_config(&text, "x").unwrap();
        assert_eq!(s.engines, vec![Engine::Analytic]);
    }

    #[test]
    fn grids() {
        let lin = GridSpec {
            t_max: 2.0,
            n_points: 5,
            spacing: Spacing::Linear,
        };
        assert_eq!(lin.times(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let log = GridSpec {
            t_max: 2.0,
            n_points: 5,
            spacing: Spacing::Log,
        };
        let t = log.times();
        assert_eq!(t.len(), 5);
        assert_eq!(t[0], 0.0);
        assert!((t[1] - 2e-3).abs() < 1e-15);
        assert_eq!(t[4], 2.0);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }
}
