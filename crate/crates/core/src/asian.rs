//! Asian option pricing on an L-period product state.
//!
//! Each period contributes an independent Brownian increment with variance
//! `Δt = T/L`, loaded as one `m`-qubit Gaussian grid; the composite index
//! register is the flat concatenation `|j_1, …, j_L⟩` with the first period
//! in the most significant position. A path maps to prices by repeated
//! steps `S_{l+1} = S_l·exp(σ x_{j_l} + (r - σ²/2)Δt)` from `S_0`, and the
//! payoff is `max{0, A - K}` on the arithmetic or geometric average of the
//! period prices.
//!
//! The brute-force oracle enumerates every path and sums
//! `Σ p_{j_1,…,j_L} ṽ(path)` with the same quantized payoff table the
//! quantum state uses, so the composite state's ancilla mass must reproduce
//! it exactly.

use rand::Rng;
use rayon::prelude::*;

use crate::bsm::MarketParams;
use crate::dist::{gaussian_grid, DiscreteDist};
use crate::error::{Error, Result};
use crate::mc::McEstimate;
use crate::payoff::{stock_step, AverageKind, RunningAverage};
use crate::qae::{error_upper_bound, QaeConfig, QaeSampler};
use crate::statevec::{exact_mu, neumaier_sum, QuantumState, RegisterLayout};

/// Paths the exact enumeration oracle is willing to visit.
pub const ENUMERATION_CAP: usize = 1 << 20;

/// An L-period Asian call specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsianSpec {
    pub params: MarketParams,
    /// Number of averaging periods L; `Δt = T/L`.
    pub periods: u32,
    /// Grid qubits per period.
    pub period_qubits: u32,
    pub kind: AverageKind,
    /// Cutoff multiplier of each per-period Gaussian grid.
    pub cutoff: f64,
}

impl AsianSpec {
    pub fn new(
        params: MarketParams,
        periods: u32,
        period_qubits: u32,
        kind: AverageKind,
        cutoff: f64,
    ) -> Result<Self> {
        if periods == 0 {
            return Err(Error::domain("Asian spec needs periods >= 1".to_string()));
        }
        if period_qubits == 0 {
            return Err(Error::domain(
                "Asian spec needs period_qubits >= 1".to_string(),
            ));
        }
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::domain("cutoff must be > 0".to_string()));
        }
        let spec = AsianSpec {
            params,
            periods,
            period_qubits,
            kind,
            cutoff,
        };
        if spec.index_qubits() > 32 {
            return Err(Error::resource(format!(
                "composite index register of {} qubits is not representable",
                spec.index_qubits()
            )));
        }
        Ok(spec)
    }

    pub fn dt(&self) -> f64 {
        self.params.maturity / self.periods as f64
    }

    pub fn index_qubits(&self) -> u32 {
        self.periods * self.period_qubits
    }

    pub fn path_count(&self) -> usize {
        1usize << self.index_qubits()
    }

    /// Split a flat path index into per-period grid indices, first period
    /// most significant.
    pub fn path_digits(&self, path: usize) -> Vec<usize> {
        let m = self.period_qubits;
        let mask = (1usize << m) - 1;
        (0..self.periods)
            .map(|l| (path >> ((self.periods - 1 - l) * m)) & mask)
            .collect()
    }
}

/// The L identical per-period increment distributions (variance `Δt` each).
pub fn asian_product_dist(spec: &AsianSpec) -> Result<Vec<DiscreteDist>> {
    let one = gaussian_grid(spec.dt(), spec.period_qubits, spec.cutoff)?;
    Ok(vec![one; spec.periods as usize])
}

fn average_for_path(spec: &AsianSpec, xs: &[f64], digits: &[usize]) -> f64 {
    let dt = spec.dt();
    let mut price = spec.params.s0;
    let mut run = RunningAverage::new(spec.kind);
    for &j in digits {
        price = stock_step(price, xs[j], dt, &spec.params);
        run.update(price);
    }
    run.value().expect("path has at least one period")
}

/// Average stock price along the path selected by the per-period indices.
pub fn path_to_average(spec: &AsianSpec, indices: &[usize]) -> Result<f64> {
    if indices.len() != spec.periods as usize {
        return Err(Error::domain(format!(
            "path needs {} indices, got {}",
            spec.periods,
            indices.len()
        )));
    }
    let dist = gaussian_grid(spec.dt(), spec.period_qubits, spec.cutoff)?;
    let xs: Vec<f64> = (0..dist.grid.len()).map(|j| dist.grid.point(j)).collect();
    if indices.iter().any(|&j| j >= xs.len()) {
        return Err(Error::domain("path index out of grid range".to_string()));
    }
    Ok(average_for_path(spec, &xs, indices))
}

/// Largest payoff reachable on the grid (every increment at `+x_max`); the
/// default normalization cap. Falls back to 1 when the payoff is
/// identically zero on the grid.
pub fn default_v_max(spec: &AsianSpec) -> Result<f64> {
    let dist = gaussian_grid(spec.dt(), spec.period_qubits, spec.cutoff)?;
    let top = dist.grid.len() - 1;
    let digits = vec![top; spec.periods as usize];
    let xs: Vec<f64> = (0..dist.grid.len()).map(|j| dist.grid.point(j)).collect();
    let best = average_for_path(spec, &xs, &digits) - spec.params.strike;
    Ok(if best > 0.0 { best } else { 1.0 })
}

fn quantize_value(pay: f64, v_max: f64, bits: u32) -> f64 {
    let denom = (1u64 << bits) as f64;
    (pay.clamp(0.0, v_max) / v_max * denom).round_ties_even() / denom
}

/// Exact expectation of the normalized, quantized Asian payoff over all
/// `(2^m)^L` paths. This is the brute-force oracle the quantum pipeline is
/// checked against.
pub fn asian_exact_expectation(spec: &AsianSpec, payoff_bits: u32, v_max: f64) -> Result<f64> {
    if spec.path_count() > ENUMERATION_CAP {
        return Err(Error::resource(format!(
            "{} paths exceed the enumeration cap of {ENUMERATION_CAP}",
            spec.path_count()
        )));
    }
    if !(v_max.is_finite() && v_max > 0.0) {
        return Err(Error::domain("v_max must be > 0".to_string()));
    }
    let dist = gaussian_grid(spec.dt(), spec.period_qubits, spec.cutoff)?;
    let xs: Vec<f64> = (0..dist.grid.len()).map(|j| dist.grid.point(j)).collect();
    let log_probs: Vec<f64> = dist.probs.iter().map(|&p| p.ln()).collect();
    let strike = spec.params.strike;
    let total = spec.path_count();
    // Stripe by the leading period index; stripes are reduced in order so
    // the result is independent of the rayon schedule.
    let stripes = 1usize << spec.period_qubits;
    let per_stripe = total / stripes;
    let partials: Vec<f64> = (0..stripes)
        .into_par_iter()
        .map(|s| {
            let mut terms = Vec::with_capacity(per_stripe);
            for rest in 0..per_stripe {
                let path = s * per_stripe + rest;
                let digits = spec.path_digits(path);
                let log_p: f64 = digits.iter().map(|&j| log_probs[j]).sum();
                let avg = average_for_path(spec, &xs, &digits);
                let v = quantize_value(avg - strike, v_max, payoff_bits);
                terms.push(log_p.exp() * v);
            }
            neumaier_sum(terms.into_iter())
        })
        .collect();
    Ok(neumaier_sum(partials.into_iter()))
}

/// Build the composite state `Σ √p_path |path⟩(√(1-ṽ)|0⟩ + √ṽ|1⟩)` over the
/// flat `L·m`-qubit index register plus the ancilla.
pub fn asian_composite_state(
    spec: &AsianSpec,
    payoff_bits: u32,
    v_max: f64,
) -> Result<QuantumState> {
    let layout = RegisterLayout::new(spec.index_qubits(), 0, 0)?;
    if spec.path_count() > ENUMERATION_CAP {
        return Err(Error::resource(format!(
            "{} paths exceed the enumeration cap of {ENUMERATION_CAP}",
            spec.path_count()
        )));
    }
    let dist = gaussian_grid(spec.dt(), spec.period_qubits, spec.cutoff)?;
    let xs: Vec<f64> = (0..dist.grid.len()).map(|j| dist.grid.point(j)).collect();
    let root_p: Vec<f64> = dist.probs.iter().map(|&p| p.sqrt()).collect();
    let mut state = QuantumState::zero(layout);
    state.amps[0] = num_complex::Complex64::new(0.0, 0.0);
    for path in 0..spec.path_count() {
        let digits = spec.path_digits(path);
        let amp: f64 = digits.iter().map(|&j| root_p[j]).product();
        let avg = average_for_path(spec, &xs, &digits);
        let v = quantize_value(avg - spec.params.strike, v_max, payoff_bits);
        state.amps[2 * path] = num_complex::Complex64::new(amp * (1.0 - v).sqrt(), 0.0);
        state.amps[2 * path + 1] = num_complex::Complex64::new(amp * v.sqrt(), 0.0);
    }
    Ok(state)
}

/// Result of one quantum Asian pricing run.
#[derive(Debug, Clone, Copy)]
pub struct AsianQuantumPrice {
    pub price: f64,
    pub mu_hat: f64,
    pub theta_hat: f64,
    /// Exact ancilla mass of the constructed state (equals the enumeration
    /// oracle).
    pub exact_mu: f64,
    pub v_max: f64,
    /// Walk-operator applications per phase-estimation run, `2^m - 1`.
    pub k_q_per_run: u64,
    /// Total walk-operator applications over all repetitions.
    pub k_q_total: u64,
    /// Price-scale error bound `e^{-rT}·v_max·ε_Q(θ̂, k_q_per_run)`.
    pub eps_bound: f64,
}

/// Price the Asian call through the amplitude-estimation pipeline: build the
/// composite state, run `D` phase estimations, median, rescale by the payoff
/// cap, and discount.
pub fn asian_quantum_price<R: Rng + ?Sized>(
    spec: &AsianSpec,
    payoff_bits: u32,
    qae: &QaeConfig,
    rng: &mut R,
) -> Result<AsianQuantumPrice> {
    qae.validate()?;
    let v_max = default_v_max(spec)?;
    let state = asian_composite_state(spec, payoff_bits, v_max)?;
    let mu_exact = exact_mu(&state);
    let sampler = QaeSampler::new(&state, qae.phase_bits)?;
    let mut runs = Vec::with_capacity(qae.repetitions as usize);
    let mut k_q_total = 0u64;
    for _ in 0..qae.repetitions {
        let est = sampler.estimate_once(rng);
        k_q_total += est.phase.unitary_applications;
        runs.push(est);
    }
    runs.sort_by(|a, b| a.a_hat.total_cmp(&b.a_hat));
    let median = runs[(runs.len() - 1) / 2];
    let discount = (-spec.params.rate * spec.params.maturity).exp();
    let k_q_per_run = (1u64 << qae.phase_bits) - 1;
    Ok(AsianQuantumPrice {
        price: discount * v_max * median.a_hat,
        mu_hat: median.a_hat,
        theta_hat: median.phase.theta_hat,
        exact_mu: mu_exact,
        v_max,
        k_q_per_run,
        k_q_total,
        eps_bound: discount * v_max * error_upper_bound(median.phase.theta_hat, k_q_per_run)?,
    })
}

/// Classical Monte Carlo on the same discretized dynamics: per period the
/// increment is drawn from the grid distribution, and the payoff is the real
/// (unquantized) Asian call payoff, discounted.
pub fn asian_mc_price<R: Rng + ?Sized>(
    spec: &AsianSpec,
    samples: u64,
    rng: &mut R,
) -> Result<McEstimate> {
    if samples < 2 {
        return Err(Error::domain(
            "asian_mc_price needs samples >= 2".to_string(),
        ));
    }
    let dist = gaussian_grid(spec.dt(), spec.period_qubits, spec.cutoff)?;
    let xs: Vec<f64> = (0..dist.grid.len()).map(|j| dist.grid.point(j)).collect();
    let mut cum = Vec::with_capacity(dist.probs.len());
    let mut acc = 0.0;
    for &p in &dist.probs {
        acc += p;
        cum.push(acc);
    }
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    let mut digits = vec![0usize; spec.periods as usize];
    for i in 0..samples {
        for d in digits.iter_mut() {
            let u: f64 = rng.random();
            *d = cum.partition_point(|&c| c <= u).min(xs.len() - 1);
        }
        let avg = average_for_path(spec, &xs, &digits);
        let pay = (avg - spec.params.strike).max(0.0);
        let delta = pay - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (pay - mean);
    }
    let discount = (-spec.params.rate * spec.params.maturity).exp();
    let var = m2 / (samples - 1) as f64;
    Ok(McEstimate {
        mean: discount * mean,
        std_error: discount * (var / samples as f64).sqrt(),
        samples,
    })
}
