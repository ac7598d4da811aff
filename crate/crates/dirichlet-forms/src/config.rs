//! Experiment configuration: per-scenario defaults, a flat key-value config
//! file, and CLI-flag overrides carrying the same key names.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DF_OUT";

/// Parameters shared by every experiment command.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub grid_a: f64,
    pub grid_b: f64,
    pub grid_n: usize,
    pub circumference: f64,
    pub circle_n: usize,
    pub seed: u64,
    pub paths: usize,
    pub horizon: f64,
    pub burn_in: f64,
    /// Number of random forms in the round-trip scenario.
    pub forms: usize,
    pub out_dir: PathBuf,
    pub tolerances: Tolerances,
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("df-out"), PathBuf::from)
}

impl ExperimentConfig {
    /// Ornstein-Uhlenbeck reproduction defaults.
    pub fn ou_defaults() -> Self {
        Self {
            scenario: "ou-verify".into(),
            grid_a: -6.0,
            grid_b: 6.0,
            grid_n: 601,
            circumference: 2.0 * std::f64::consts::PI,
            circle_n: 400,
            seed: 42,
            paths: 10_000,
            horizon: 20_000.0,
            burn_in: 10.0,
            forms: 50,
            out_dir: default_out_dir(),
            tolerances: Tolerances::default(),
        }
    }

    /// Heat-form spectrum defaults: circle plus a Neumann line grid.
    pub fn heat_defaults() -> Self {
        Self {
            scenario: "heat".into(),
            grid_a: 0.0,
            grid_b: std::f64::consts::PI,
            grid_n: 201,
            ..Self::ou_defaults()
        }
    }

    /// Correspondence round-trip defaults.
    pub fn roundtrip_defaults() -> Self {
        Self { scenario: "roundtrip".into(), seed: 0, ..Self::ou_defaults() }
    }

    /// Capacity table defaults: a short line grid keeps the
    /// projected-gradient oracle well conditioned.
    pub fn capacity_defaults() -> Self {
        Self {
            scenario: "capacity".into(),
            grid_a: -1.0,
            grid_b: 1.0,
            grid_n: 41,
            ..Self::ou_defaults()
        }
    }

    /// Applies `key = value` pairs from a flat config file. Keys carry the
    /// same names as the CLI flags.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (kv, line) in parse_key_values(&text)? {
            self.apply_key(&kv.0, &kv.1).map_err(|e| Error::Parse {
                line,
                message: format!("{e}"),
            })?;
        }
        Ok(())
    }

    /// Applies one override; `key` uses the CLI spelling (`grid-n`, `seed`, ...).
    pub fn apply_key(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidConfig(format!("{key}: {what} (got `{value}`)"));
        match key {
            "grid-a" => self.grid_a = value.parse().map_err(|_| bad("expected a number"))?,
            "grid-b" => self.grid_b = value.parse().map_err(|_| bad("expected a number"))?,
            "grid-n" => self.grid_n = value.parse().map_err(|_| bad("expected an integer"))?,
            "circumference" => {
                self.circumference = value.parse().map_err(|_| bad("expected a number"))?;
            }
            "circle-n" => self.circle_n = value.parse().map_err(|_| bad("expected an integer"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("expected an integer"))?,
            "paths" => self.paths = value.parse().map_err(|_| bad("expected an integer"))?,
            "horizon" => self.horizon = value.parse().map_err(|_| bad("expected a number"))?,
            "burn-in" => self.burn_in = value.parse().map_err(|_| bad("expected a number"))?,
            "forms" => self.forms = value.parse().map_err(|_| bad("expected an integer"))?,
            "out" => self.out_dir = PathBuf::from(value),
            _ => return Err(Error::InvalidConfig(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Validates every numeric field against the preconditions of the
    /// operations it feeds.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !self.grid_a.is_finite() || !self.grid_b.is_finite() || self.grid_a >= self.grid_b {
            return fail(format!("grid bounds must satisfy a < b, got [{}, {}]", self.grid_a, self.grid_b));
        }
        if self.grid_n < 2 {
            return fail(format!("grid-n must be at least 2, got {}", self.grid_n));
        }
        if !(self.circumference > 0.0) {
            return fail(format!("circumference must be positive, got {}", self.circumference));
        }
        if self.circle_n < 3 {
            return fail(format!("circle-n must be at least 3, got {}", self.circle_n));
        }
        if self.paths < 1 {
            return fail("paths must be at least 1".into());
        }
        if !(self.horizon > 0.0) {
            return fail(format!("horizon must be positive, got {}", self.horizon));
        }
        if !(self.burn_in >= 0.0) || self.burn_in >= self.horizon {
            return fail(format!(
                "burn-in must lie in [0, horizon), got {} with horizon {}",
                self.burn_in, self.horizon
            ));
        }
        if self.forms < 1 {
            return fail("forms must be at least 1".into());
        }
        Ok(())
    }
}

/// Parses a flat `key = value` document; `#` starts a comment, blank lines
/// are skipped. Returns pairs with their line numbers.
pub fn parse_key_values(text: &str) -> Result<Vec<((String, String), usize)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Parse { line, message: format!("expected `key = value`, got `{content}`") });
        };
        out.push(((key.trim().to_string(), value.trim().to_string()), line));
    }
    Ok(out)
}

/// Renders the effective configuration as the same flat key-value document
/// the parser accepts. Handy for reports.
pub fn render_key_values(cfg: &ExperimentConfig) -> String {
    let mut map = BTreeMap::new();
    map.insert("grid-a", format!("{}", cfg.grid_a));
    map.insert("grid-b", format!("{}", cfg.grid_b));
    map.insert("grid-n", format!("{}", cfg.grid_n));
    map.insert("circumference", format!("{}", cfg.circumference));
    map.insert("circle-n", format!("{}", cfg.circle_n));
    map.insert("seed", format!("{}", cfg.seed));
    map.insert("paths", format!("{}", cfg.paths));
    map.insert("horizon", format!("{}", cfg.horizon));
    map.insert("burn-in", format!("{}", cfg.burn_in));
    map.insert("forms", format!("{}", cfg.forms));
    map.insert("out", cfg.out_dir.display().to_string());
    let mut s = String::new();
    for (k, v) in map {
        s.push_str(&format!("{k} = {v}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ExperimentConfig::ou_defaults().validate().unwrap();
        ExperimentConfig::heat_defaults().validate().unwrap();
        ExperimentConfig::roundtrip_defaults().validate().unwrap();
        ExperimentConfig::capacity_defaults().validate().unwrap();
    }

    #[test]
    fn key_value_parsing_and_overrides() {
        let mut cfg = ExperimentConfig::ou_defaults();
        let text = "# comment\n  grid-n = 301\nseed= 7 # trailing\n\nhorizon =500.5\n";
        for ((k, v), _) in parse_key_values(text).unwrap() {
            cfg.apply_key(&k, &v).unwrap();
        }
        assert_eq!(cfg.grid_n, 301);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.horizon, 500.5);
        cfg.validate().unwrap();
    }

    #[test]
    fn malformed_lines_report_their_number() {
        let text = "grid-n = 5\nnot a pair\n";
        match parse_key_values(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut cfg = ExperimentConfig::ou_defaults();
        assert!(cfg.apply_key("grid-q", "1").is_err());
    }

    #[test]
    fn validation_catches_bad_fields() {
        let mut cfg = ExperimentConfig::ou_defaults();
        cfg.grid_n = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::ou_defaults();
        cfg.grid_a = 2.0;
        cfg.grid_b = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::ou_defaults();
        cfg.burn_in = cfg.horizon + 1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rendered_config_parses_back() {
        let cfg = ExperimentConfig::capacity_defaults();
        let text = render_key_values(&cfg);
        let mut other = ExperimentConfig::ou_defaults();
        for ((k, v), _) in parse_key_values(&text).unwrap() {
            other.apply_key(&k, &v).unwrap();
        }
        assert_eq!(other.grid_n, cfg.grid_n);
        assert_eq!(other.grid_a, cfg.grid_a);
        assert_eq!(other.seed, cfg.seed);
    }
}
