//! Run configuration: defaults, then a TOML file, then command-line overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gridfn::{Encoding, FunctionSpec, GridSpec, DEFAULT_QUAD_POINTS};
use crate::sparsesim::{Backend, Mode};
use crate::variants::QpeEngine;

/// Every tunable of every subcommand. Fields left `None` are filled per command by
/// [`RunConfig::resolve`] before the config is hashed and embedded in a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub function: Option<String>,
    pub interval: Option<[f64; 2]>,
    pub encoding: Encoding,
    pub n: Option<u32>,
    pub n_range: Option<[u32; 2]>,
    pub r: Option<usize>,
    pub r_values: Option<Vec<usize>>,
    pub k_margin: Option<f64>,
    pub t_override: Option<f64>,
    pub backend: Option<Backend>,
    pub mode: Mode,
    pub digits: u32,
    pub rescale: bool,
    pub empirical: bool,
    pub seed: u64,
    pub m: Option<u32>,
    pub t: Option<f64>,
    pub epsilon_fail: Option<f64>,
    pub engine: Option<QpeEngine>,
    /// `qpe` or `exact`.
    pub estimator: Option<String>,
    /// `plus` or `target`.
    pub initial: Option<String>,
    /// Overlap of the verification candidate with the target.
    pub lambda: Option<f64>,
    pub trials: Option<u64>,
    pub shots: Option<u64>,
    pub points: Option<usize>,
    pub quad_points: usize,
    pub fit_n: Option<u32>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            function: None,
            interval: None,
            encoding: Encoding::Pointwise,
            n: None,
            n_range: None,
            r: None,
            r_values: None,
            k_margin: None,
            t_override: None,
            backend: None,
            mode: Mode::Postselect,
            digits: crate::adiabatic::DEFAULT_DIGITS,
            rescale: true,
            empirical: true,
            seed: 0,
            m: None,
            t: None,
            epsilon_fail: None,
            engine: None,
            estimator: None,
            initial: None,
            lambda: None,
            trials: None,
            shots: None,
            points: None,
            quad_points: DEFAULT_QUAD_POINTS,
            fit_n: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    PrepAdiabatic,
    Bounds,
    Qpe,
    EstimateNorm,
    Integrate,
    Hadamard,
    Verify,
    GroverRudolph,
    Table1,
    Fig2,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::PrepAdiabatic => "prep-adiabatic",
            Command::Bounds => "bounds",
            Command::Qpe => "qpe",
            Command::EstimateNorm => "estimate-norm",
            Command::Integrate => "integrate",
            Command::Hadamard => "hadamard",
            Command::Verify => "verify",
            Command::GroverRudolph => "grover-rudolph",
            Command::Table1 => "table1",
            Command::Fig2 => "fig2",
        }
    }
}

pub const FIG2_FUNCTION: &str = "lognormal:0,0.5";
pub const FIG2_INTERVAL: [f64; 2] = [0.0, 3.0];

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
    }

    /// Accepts the `config` object embedded in a report, or a whole report.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON config: {e}")))?;
        let inner = match value.get("config") {
            Some(c) if value.get("schema_version").is_some() => c.clone(),
            _ => value,
        };
        serde_json::from_value(inner).map_err(|e| Error::Config(format!("invalid JSON config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            return Self::from_json_str(&text);
        }
        Self::from_toml_str(&text)
    }

    /// Fills command-specific defaults and validates what the command needs.
    pub fn resolve(mut self, cmd: Command) -> Result<Self> {
        use Command::*;
        if cmd == Fig2 && self.function.is_none() {
            self.function = Some(FIG2_FUNCTION.into());
            self.interval.get_or_insert(FIG2_INTERVAL);
        }
        self.interval.get_or_insert([0.0, 1.0]);
        match cmd {
            PrepAdiabatic | Bounds => {
                self.r.get_or_insert(128);
                self.k_margin.get_or_insert(crate::rank1::DEFAULT_K_MARGIN);
                self.backend.get_or_insert(Backend::Exact);
            }
            Qpe => {
                self.m.get_or_insert(8);
                self.engine.get_or_insert(QpeEngine::Circuit);
                self.initial.get_or_insert_with(|| "plus".into());
                self.shots.get_or_insert(1);
            }
            EstimateNorm => {
                self.m.get_or_insert(12);
                self.epsilon_fail.get_or_insert(0.01);
                self.engine.get_or_insert(QpeEngine::Eigenspace);
            }
            Integrate => {
                self.estimator.get_or_insert_with(|| "qpe".into());
                self.m.get_or_insert(30);
                self.epsilon_fail.get_or_insert(1e-3);
                self.engine.get_or_insert(QpeEngine::Eigenspace);
            }
            Hadamard => {
                self.initial.get_or_insert_with(|| "plus".into());
                self.points.get_or_insert(32);
            }
            Verify => {
                self.trials.get_or_insert(100);
            }
            Table1 => {
                self.n.get_or_insert(16);
            }
            Fig2 => {
                self.n_range.get_or_insert([5, 9]);
                self.r.get_or_insert(128);
                self.r_values.get_or_insert_with(|| vec![64, 128, 256, 512, 1024]);
                self.fit_n.get_or_insert(6);
                self.k_margin.get_or_insert(4.0);
                self.backend.get_or_insert(Backend::Taylor { m: crate::sparsesim::DEFAULT_TAYLOR_ORDER });
            }
            GroverRudolph => {}
        }
        if !matches!(cmd, Table1 | Fig2) && self.n.is_none() {
            return Err(Error::Config(format!("{} needs --n", cmd.name())));
        }
        if cmd != Table1 && self.function.is_none() {
            return Err(Error::Config(format!("{} needs --fn", cmd.name())));
        }
        if let Some(f) = &self.function {
            f.parse::<FunctionSpec>()?;
        }
        self.check_numbers()?;
        Ok(self)
    }

    fn check_numbers(&self) -> Result<()> {
        let [a, b] = self.interval.unwrap_or([0.0, 1.0]);
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Config(format!("interval [{a}, {b}] is empty")));
        }
        if self.r == Some(0) || self.r_values.as_ref().is_some_and(|v| v.contains(&0)) {
            return Err(Error::Config("r must be at least 1".into()));
        }
        if let Some(k) = self.k_margin {
            if !(k > 0.0) {
                return Err(Error::Config(format!("k_margin = {k} must be positive")));
            }
        }
        if let Some(t) = self.t_override {
            if !(t > 0.0) {
                return Err(Error::Config(format!("T = {t} must be positive")));
            }
        }
        if let Some(e) = self.epsilon_fail {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::Config(format!("epsilon_fail = {e} must lie in (0, 1)")));
            }
        }
        if let Some(l) = self.lambda {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::Config(format!("lambda = {l} must lie in [0, 1]")));
            }
        }
        if let Some([lo, hi]) = self.n_range {
            if lo == 0 || lo > hi {
                return Err(Error::Config(format!("bad n range {lo}..{hi}")));
            }
        }
        if self.digits == 0 || self.digits > crate::gridfn::MAX_DIGIT_BITS {
            return Err(Error::Config(format!("digits = {} outside 1..=62", self.digits)));
        }
        Ok(())
    }

    pub fn function_spec(&self) -> Result<FunctionSpec> {
        self.function
            .as_deref()
            .ok_or_else(|| Error::Config("no function given".into()))?
            .parse()
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let n = self.n.ok_or_else(|| Error::Config("no n given".into()))?;
        self.grid_at(n)
    }

    pub fn grid_at(&self, n: u32) -> Result<GridSpec> {
        let [a, b] = self.interval.unwrap_or([0.0, 1.0]);
        GridSpec::new(a, b, n).map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_hash_stability() {
        let cfg = RunConfig::from_toml_str("function = \"uniform\"\nn = 4\nbackend = \"taylor:7\"\n").unwrap();
        assert_eq!(cfg.backend, Some(Backend::Taylor { m: 7 }));
        let again: RunConfig = toml::from_str(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.hash(), again.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml_str("nn = 3").is_err());
    }

    #[test]
    fn resolve_fills_per_command_defaults() {
        let cfg = RunConfig::default().resolve(Command::Fig2).unwrap();
        assert_eq!(cfg.function.as_deref(), Some(FIG2_FUNCTION));
        assert_eq!(cfg.interval, Some(FIG2_INTERVAL));
        let err = RunConfig::default().resolve(Command::Bounds).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
