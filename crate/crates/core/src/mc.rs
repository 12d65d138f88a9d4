//! Classical Monte Carlo pricing baseline, Chebyshev sample-complexity
//! arithmetic, and the log-log power-law fitter used by the error-scaling
//! benchmarks.
//!
//! The estimator is plain iid sampling with no variance reduction: the
//! benchmark compares the quantum estimator against vanilla Monte Carlo.
//! For a payoff with variance bound `λ²`, Chebyshev's inequality
//! `P[|Π̂ - Π| ≥ ε] ≤ λ²/(k ε²)` fixes the sample count
//! `k = ⌈λ²/(δ ε²)⌉` for failure probability `δ`.
//!
//! Error curves `Error(k) = a·k^ζ` are fitted by unweighted least squares in
//! (log k, log Error) space.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bsm::{bsm_call_price, call_payoff, gbm_terminal, MarketParams};
use crate::error::{Error, Result};

/// Monte Carlo price estimate: discounted sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Fitted power law `Error = a·k^ζ` over a set of (steps, error) samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub points: Vec<(u64, f64)>,
    /// Fitted amplitude `a = exp(intercept)`.
    pub amplitude: f64,
    /// Fitted exponent `ζ` (slope in log-log space).
    pub exponent: f64,
    /// RMS of the residuals in log-log space.
    pub residual: f64,
}

/// Price the European call by averaging the discounted payoff over `k` iid
/// terminal samples under Q.
pub fn mc_price_european<R: Rng + ?Sized>(
    p: &MarketParams,
    k: u64,
    rng: &mut R,
) -> Result<McEstimate> {
    if k < 2 {
        return Err(Error::domain(format!(
            "mc_price_european needs k >= 2 for a standard error, got {k}"
        )));
    }
    let sqrt_t = p.maturity.sqrt();
    // Welford accumulation: stable mean/variance in one pass.
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    for i in 0..k {
        let z: f64 = rng.sample(StandardNormal);
        let s_t = gbm_terminal(p.s0, p.rate, p.vol, p.maturity, sqrt_t * z);
        let pay = call_payoff(s_t, p.strike);
        let delta = pay - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (pay - mean);
    }
    let discount = (-p.rate * p.maturity).exp();
    let var = m2 / (k - 1) as f64;
    Ok(McEstimate {
        mean: discount * mean,
        std_error: discount * (var / k as f64).sqrt(),
        samples: k,
    })
}

/// Smallest sample count `k` with `λ²/(k ε²) ≤ δ`.
pub fn chebyshev_samples(lambda: f64, epsilon: f64, delta: f64) -> Result<u64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!("lambda must be > 0, got {lambda}")));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::domain(format!("epsilon must be > 0, got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!(
            "delta must be in (0,1), got {delta}"
        )));
    }
    let raw = lambda * lambda / (delta * epsilon * epsilon);
    Ok(raw.ceil() as u64)
}

/// Unweighted least-squares fit of `log(error) = log(a) + ζ·log(k)`.
pub fn fit_power_law(points: &[(u64, f64)]) -> Result<ScalingReport> {
    if points.len() < 3 {
        return Err(Error::domain(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    for &(k, err) in points {
        if k < 1 {
            return Err(Error::domain("power-law fit requires k >= 1".to_string()));
        }
        if !(err.is_finite() && err > 0.0) {
            return Err(Error::domain(format!(
                "power-law fit requires positive errors, got {err} at k={k}"
            )));
        }
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(k, _)| (k as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, e)| e.ln()).collect();
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::domain(
            "power-law fit needs at least two distinct k".to_string(),
        ));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(ScalingReport {
        points: points.to_vec(),
        amplitude: intercept.exp(),
        exponent: slope,
        residual,
    })
}

/// Mean absolute pricing error `E|Π̂ - Π|` per sample count, averaged over
/// independent trials.
///
/// Trials run in parallel; trial `(i, j)` draws from ChaCha stream
/// `i*trials + j` of the master seed, so results are independent of the
/// thread count.
pub fn mc_error_sweep(
    p: &MarketParams,
    ks: &[u64],
    trials: u64,
    master_seed: u64,
) -> Result<Vec<(u64, f64)>> {
    if trials < 1 {
        return Err(Error::domain(
            "mc_error_sweep needs trials >= 1".to_string(),
        ));
    }
    let analytic = bsm_call_price(p).price;
    ks.iter()
        .enumerate()
        .map(|(i, &k)| {
            let errors: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|j| {
                    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
                    rng.set_stream(i as u64 * trials + j);
                    mc_price_european(p, k, &mut rng).map(|est| (est.mean - analytic).abs())
                })
                .collect::<Result<Vec<f64>>>()?;
            // Sum in trial order: deterministic under any parallelism degree.
            Ok((k, errors.iter().sum::<f64>() / trials as f64))
        })
        .collect()
}
