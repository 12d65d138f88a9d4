//! Payoff functions, fixed-point quantization, and path-average arithmetic.
//!
//! The rotation oracle needs payoff values in `[0,1]`, so a payoff `v` is
//! clamped to `[0, v_max]`, normalized by `v_max`, and rounded onto the
//! `2^bits + 1`-point lattice `{k·2^-bits : k = 0..=2^bits}`. Evaluation on
//! the oracle path is exact integer arithmetic on the lattice codes; the
//! clamp at zero is the sign-test semantics of the reversible `max{0,·}`
//! circuit. The top lattice point is included so a payoff that saturates
//! `v_max` quantizes to exactly 1 (the saturating code occupies the extra
//! qubit of the payoff register).
//!
//! Quantization uses round-to-nearest, ties to even, so the worst-case error
//! is half a lattice step and the documented bound `v_max·2^-bits` holds with
//! slack everywhere except at exact saturation.

use std::io::Write;

use crate::bsm::MarketParams;
use crate::dist::GridSpec;
use crate::error::{Error, Result};

/// Fixed-point lattice metadata: `bits` fractional bits with `scale` the
/// weight of the most significant one. The quantization step is
/// `scale/2^(bits-1)`; for normalized payoffs `scale = 1/2` and the step is
/// `2^-bits`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointSpec {
    pub bits: u32,
    pub scale: f64,
}

impl FixedPointSpec {
    pub fn normalized(bits: u32) -> Self {
        FixedPointSpec { bits, scale: 0.5 }
    }

    pub fn step(&self) -> f64 {
        self.scale / (1u64 << (self.bits - 1)) as f64
    }
}

/// A payoff tabulated on a grid, quantized and normalized to `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedPayoff {
    pub grid: GridSpec,
    /// Lattice codes; value `= code·2^-bits`, code in `0..=2^bits`.
    pub codes: Vec<u64>,
    /// Normalized values `ṽ(j) = code·2^-bits`, exact in f64 for bits ≤ 52.
    pub values: Vec<f64>,
    /// Normalization cap in currency units.
    pub v_max: f64,
    pub fp: FixedPointSpec,
}

impl QuantizedPayoff {
    /// Exact expectation `Σ p_j ṽ(j)` against a probability table.
    pub fn expectation(&self, probs: &[f64]) -> f64 {
        self.values.iter().zip(probs).map(|(&v, &p)| v * p).sum()
    }
}

/// European call payoff as a function of the terminal Brownian value:
/// `v(x) = max{0, S0·exp(σx + (r - σ²/2)T) - K}`.
pub fn euro_payoff(p: &MarketParams) -> impl Fn(f64) -> f64 + '_ {
    move |x: f64| {
        let s_t = p.s0 * (p.vol * x + (p.rate - 0.5 * p.vol * p.vol) * p.maturity).exp();
        (s_t - p.strike).max(0.0)
    }
}

/// Quantize `fn(x_j)` over the grid: clamp to `[0, v_max]`, divide by
/// `v_max`, and round to the nearest lattice code (ties to even).
pub fn quantize_payoff(
    payoff: impl Fn(f64) -> f64,
    grid: GridSpec,
    bits: u32,
    v_max: f64,
) -> Result<QuantizedPayoff> {
    let raw: Vec<f64> = (0..grid.len()).map(|j| payoff(grid.point(j))).collect();
    quantize_table(&raw, grid, bits, v_max)
}

/// Quantize an already-tabulated payoff (one raw value per grid point).
pub fn quantize_table(
    raw: &[f64],
    grid: GridSpec,
    bits: u32,
    v_max: f64,
) -> Result<QuantizedPayoff> {
    if !(v_max.is_finite() && v_max > 0.0) {
        return Err(Error::domain(format!("v_max must be > 0, got {v_max}")));
    }
    if bits == 0 || bits > 52 {
        return Err(Error::domain(format!(
            "payoff bits must be in 1..=52, got {bits}"
        )));
    }
    if raw.len() != grid.len() {
        return Err(Error::domain(format!(
            "payoff table has {} entries for a {}-point grid",
            raw.len(),
            grid.len()
        )));
    }
    let denom = (1u64 << bits) as f64;
    let codes: Vec<u64> = raw
        .iter()
        .map(|&value| {
            // Sign test realizes max{0, a}; the upper clamp realizes the cap.
            let clamped = value.clamp(0.0, v_max);
            (clamped / v_max * denom).round_ties_even() as u64
        })
        .collect();
    let values = codes.iter().map(|&c| c as f64 / denom).collect();
    Ok(QuantizedPayoff {
        grid,
        codes,
        values,
        v_max,
        fp: FixedPointSpec::normalized(bits),
    })
}

/// One GBM step: `prev·exp(σx + (r - σ²/2)Δt)`.
pub fn stock_step(prev: f64, x: f64, dt: f64, p: &MarketParams) -> f64 {
    prev * (p.vol * x + (p.rate - 0.5 * p.vol * p.vol) * dt).exp()
}

/// The same step in the log domain: `log_prev + σx + (r - σ²/2)Δt`.
pub fn log_stock_step(log_prev: f64, x: f64, dt: f64, p: &MarketParams) -> f64 {
    log_prev + p.vol * x + (p.rate - 0.5 * p.vol * p.vol) * dt
}

/// Averaging convention for path-dependent payoffs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AverageKind {
    Arithmetic,
    Geometric,
}

impl AverageKind {
    pub fn label(&self) -> &'static str {
        match self {
            AverageKind::Arithmetic => "arithmetic",
            AverageKind::Geometric => "geometric",
        }
    }
}

/// Batch path average: `(1/L)Σ S_l` or `exp((1/L)Σ log S_l)`.
pub fn path_average(prices: &[f64], kind: AverageKind) -> Result<f64> {
    if prices.is_empty() {
        return Err(Error::domain(
            "path_average needs a nonempty path".to_string(),
        ));
    }
    if prices.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
        return Err(Error::domain(
            "path_average needs positive prices".to_string(),
        ));
    }
    let n = prices.len() as f64;
    Ok(match kind {
        AverageKind::Arithmetic => prices.iter().sum::<f64>() / n,
        AverageKind::Geometric => (prices.iter().map(|s| s.ln()).sum::<f64>() / n).exp(),
    })
}

/// Sequential running average over a price path.
///
/// The update is invertible given the price just added: the scratch needed to
/// extend the average one step can be uncomputed, which is what lets the
/// circuit version discard its intermediate registers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunningAverage {
    kind: AverageKind,
    count: u64,
    /// Running arithmetic mean of prices, or of log-prices for the geometric
    /// kind.
    acc: f64,
}

impl RunningAverage {
    pub fn new(kind: AverageKind) -> Self {
        RunningAverage {
            kind,
            count: 0,
            acc: 0.0,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    fn map(&self, price: f64) -> f64 {
        match self.kind {
            AverageKind::Arithmetic => price,
            AverageKind::Geometric => price.ln(),
        }
    }

    /// Fold in the next price: `acc_l = acc_{l-1} + (z_l - acc_{l-1})/l`.
    pub fn update(&mut self, next_price: f64) {
        self.count += 1;
        let z = self.map(next_price);
        self.acc += (z - self.acc) / self.count as f64;
    }

    /// Inverse of [`RunningAverage::update`]: removes the price that was
    /// added last, recovering the previous state:
    /// `acc_{l-1} = (l·acc_l - z_l)/(l-1)`.
    pub fn invert_update(&mut self, last_price: f64) -> Result<()> {
        if self.count == 0 {
            return Err(Error::domain(
                "nothing to invert: running average is empty".to_string(),
            ));
        }
        let z = self.map(last_price);
        if self.count == 1 {
            self.acc = 0.0;
        } else {
            let l = self.count as f64;
            self.acc = (l * self.acc - z) / (l - 1.0);
        }
        self.count -= 1;
        Ok(())
    }

    /// Current average value.
    pub fn value(&self) -> Result<f64> {
        if self.count == 0 {
            return Err(Error::domain(
                "running average over an empty path".to_string(),
            ));
        }
        Ok(match self.kind {
            AverageKind::Arithmetic => self.acc,
            AverageKind::Geometric => self.acc.exp(),
        })
    }
}

/// Write the quantized table as CSV with columns `j,x_j,v_exact,v_quantized`.
pub fn write_payoff_csv<W: Write>(
    q: &QuantizedPayoff,
    payoff: impl Fn(f64) -> f64,
    out: &mut W,
) -> Result<()> {
    writeln!(out, "j,x_j,v_exact,v_quantized")?;
    for (j, &v) in q.values.iter().enumerate() {
        let x = q.grid.point(j);
        writeln!(out, "{j},{x},{},{}", payoff(x), v * q.v_max)?;
    }
    Ok(())
}
