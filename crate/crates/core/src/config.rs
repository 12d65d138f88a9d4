//! Experiment configuration: built-in defaults, TOML overrides, CLI seed.
//!
//! Every knob of the benchmark harness lives here so that a run is fully
//! determined by `(config, seed)`. Unknown keys in a config file are
//! rejected.

use serde::Deserialize;
use std::path::Path;

use crate::bsm::MarketParams;
use crate::error::{Error, Result};
use crate::payoff::AverageKind;
use crate::qae::QaeConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub qubits: u32,
    pub cutoff: f64,
    pub payoff_bits: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSweepConfig {
    pub ks: Vec<u64>,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSweepConfig {
    /// Phase-register widths of the single-qubit sweep; the step count grows
    /// as `D·(2^m - 1)` per width.
    pub phase_bits: Vec<u32>,
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsianConfig {
    pub periods: u32,
    pub period_qubits: u32,
    pub kind: AverageKind,
    pub payoff_bits: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig1Config {
    pub paths: u64,
    pub steps: u32,
    pub s0: f64,
    pub drift: f64,
    pub vol: f64,
    pub maturity: f64,
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub market: MarketParams,
    pub grid: GridConfig,
    pub qae: QaeConfig,
    pub classical: ClassicalSweepConfig,
    pub quantum_sweep: QuantumSweepConfig,
    pub strikes: Vec<f64>,
    pub asian: AsianConfig,
    pub fig1: Fig1Config,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            market: MarketParams::new(100.0, 100.0, 0.05, 0.2, 1.0, 0.1)
                .expect("default market params are valid"),
            grid: GridConfig {
                qubits: 8,
                cutoff: 4.0,
                payoff_bits: 16,
            },
            qae: QaeConfig::default(),
            classical: ClassicalSweepConfig {
                ks: vec![100, 1_000, 10_000, 100_000, 1_000_000],
                trials: 100,
            },
            quantum_sweep: QuantumSweepConfig {
                phase_bits: (7..=20).collect(),
                trials: 100,
            },
            strikes: vec![60.0, 80.0, 100.0, 120.0, 140.0],
            asian: AsianConfig {
                periods: 2,
                period_qubits: 3,
                kind: AverageKind::Arithmetic,
                payoff_bits: 16,
            },
            fig1: Fig1Config {
                paths: 5,
                steps: 252,
                s0: 3.0,
                drift: 0.1,
                vol: 0.25,
                maturity: 1.0,
            },
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    /// Load overrides from a TOML file on top of the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::config(format!("{e}")))?;
        let mut cfg = ExperimentConfig::default();
        if let Some(seed) = file.seed {
            cfg.seed = seed;
        }
        if let Some(m) = file.market {
            let base = cfg.market;
            cfg.market = MarketParams::new(
                m.s0.unwrap_or(base.s0),
                m.strike.unwrap_or(base.strike),
                m.rate.unwrap_or(base.rate),
                m.vol.unwrap_or(base.vol),
                m.maturity.unwrap_or(base.maturity),
                m.drift.unwrap_or(base.drift),
            )?;
        }
        if let Some(g) = file.grid {
            if let Some(q) = g.qubits {
                cfg.grid.qubits = q;
            }
            if let Some(c) = g.cutoff {
                cfg.grid.cutoff = c;
            }
            if let Some(b) = g.payoff_bits {
                cfg.grid.payoff_bits = b;
            }
        }
        if let Some(q) = file.qae {
            if let Some(v) = q.phase_bits {
                cfg.qae.phase_bits = v;
            }
            if let Some(v) = q.repetitions {
                cfg.qae.repetitions = v;
            }
            if let Some(v) = q.shots_per_bit {
                cfg.qae.shots_per_bit = v;
            }
        }
        if let Some(c) = file.classical {
            if let Some(ks) = c.ks {
                cfg.classical.ks = ks;
            }
            if let Some(t) = c.trials {
                cfg.classical.trials = t;
            }
        }
        if let Some(q) = file.quantum_sweep {
            if let Some(bits) = q.phase_bits {
                cfg.quantum_sweep.phase_bits = bits;
            }
            if let Some(t) = q.trials {
                cfg.quantum_sweep.trials = t;
            }
        }
        if let Some(s) = file.sweep {
            if let Some(strikes) = s.strikes {
                cfg.strikes = strikes;
            }
        }
        if let Some(a) = file.asian {
            if let Some(v) = a.periods {
                cfg.asian.periods = v;
            }
            if let Some(v) = a.period_qubits {
                cfg.asian.period_qubits = v;
            }
            if let Some(k) = a.kind {
                cfg.asian.kind = parse_kind(&k)?;
            }
            if let Some(v) = a.payoff_bits {
                cfg.asian.payoff_bits = v;
            }
        }
        if let Some(f) = file.fig1 {
            if let Some(v) = f.paths {
                cfg.fig1.paths = v;
            }
            if let Some(v) = f.steps {
                cfg.fig1.steps = v;
            }
            if let Some(v) = f.s0 {
                cfg.fig1.s0 = v;
            }
            if let Some(v) = f.drift {
                cfg.fig1.drift = v;
            }
            if let Some(v) = f.vol {
                cfg.fig1.vol = v;
            }
            if let Some(v) = f.maturity {
                cfg.fig1.maturity = v;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.qae.validate()?;
        if self.grid.qubits == 0 {
            return Err(Error::config("grid.qubits must be >= 1".to_string()));
        }
        if self.grid.payoff_bits == 0 || self.grid.payoff_bits > 52 {
            return Err(Error::config(
                "grid.payoff_bits must be in 1..=52".to_string(),
            ));
        }
        if !(self.grid.cutoff.is_finite() && self.grid.cutoff > 0.0) {
            return Err(Error::config("grid.cutoff must be > 0".to_string()));
        }
        if self.classical.ks.is_empty() || self.classical.trials == 0 {
            return Err(Error::config(
                "classical sweep needs ks and trials".to_string(),
            ));
        }
        if self.quantum_sweep.phase_bits.is_empty() || self.quantum_sweep.trials == 0 {
            return Err(Error::config(
                "quantum sweep needs phase_bits and trials".to_string(),
            ));
        }
        if self.strikes.is_empty() {
            return Err(Error::config("strike sweep must not be empty".to_string()));
        }
        if self.fig1.paths == 0 || self.fig1.steps == 0 {
            return Err(Error::config("fig1 needs paths and steps".to_string()));
        }
        Ok(())
    }
}

fn parse_kind(s: &str) -> Result<AverageKind> {
    match s {
        "arithmetic" => Ok(AverageKind::Arithmetic),
        "geometric" => Ok(AverageKind::Geometric),
        other => Err(Error::config(format!(
            "asian.kind must be \"arithmetic\" or \"geometric\", got \"{other}\""
        ))),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    market: Option<MarketSection>,
    grid: Option<GridSection>,
    qae: Option<QaeSection>,
    classical: Option<ClassicalSection>,
    quantum_sweep: Option<QuantumSweepSection>,
    sweep: Option<SweepSection>,
    asian: Option<AsianSection>,
    fig1: Option<Fig1Section>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarketSection {
    s0: Option<f64>,
    strike: Option<f64>,
    rate: Option<f64>,
    vol: Option<f64>,
    maturity: Option<f64>,
    drift: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    qubits: Option<u32>,
    cutoff: Option<f64>,
    payoff_bits: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QaeSection {
    phase_bits: Option<u32>,
    repetitions: Option<u32>,
    shots_per_bit: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassicalSection {
    ks: Option<Vec<u64>>,
    trials: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuantumSweepSection {
    phase_bits: Option<Vec<u32>>,
    trials: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    strikes: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AsianSection {
    periods: Option<u32>,
    period_qubits: Option<u32>,
    kind: Option<String>,
    payoff_bits: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Fig1Section {
    paths: Option<u64>,
    steps: Option<u32>,
    s0: Option<f64>,
    drift: Option<f64>,
    vol: Option<f64>,
    maturity: Option<f64>,
}
