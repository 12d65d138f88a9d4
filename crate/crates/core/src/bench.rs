//! End-to-end pricing pipelines and the error-scaling experiments.
//!
//! The European quantum pipeline runs grid → state preparation → payoff
//! rotation → phase estimation → median → rescale → discount:
//!
//! ```text
//! Π̂ = e^(-rT) · v_max · μ̂,    μ̂ = (1 - cos(θ̂/2))/2
//! ```
//!
//! The scaling experiment prices the call two ways at matched confidence:
//! vanilla Monte Carlo over a grid of sample counts, and repeated
//! single-qubit phase estimation of the angle `θ = 2·arccos(1 - 2Π/S0)`
//! encoding the analytic price, with the step count `k_Q = D·shots·(2^m-1)`
//! counting every application of the single-qubit unitary across the `D`
//! median repetitions. Both error curves are fitted to `Error = a·k^ζ`.
//!
//! The per-estimate error bound uses `k = shots·(2^m - 1)`, the unitary
//! count of one repetition, which is what sets the phase resolution; the
//! `D` repetitions raise confidence, not resolution.
//!
//! Sweep cells run in parallel on ChaCha streams derived from
//! `(seed, cell index)`, and rows are emitted in sorted order, so outputs
//! are byte-identical for a fixed `(config, seed)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::io::Write;

use crate::asian::{AsianQuantumPrice, AsianSpec};
use crate::bsm::{bsm_call_price, gbm_path, MarketParams, Measure};
use crate::config::ExperimentConfig;
use crate::dist::gaussian_grid;
use crate::error::{Error, Result};
use crate::mc::{fit_power_law, mc_error_sweep, ScalingReport};
use crate::payoff::{euro_payoff, quantize_payoff};
use crate::qae::{error_upper_bound, median_boost, single_qubit_pe, PhaseEstimate, QaeSampler};
use crate::statevec::{exact_mu, mu_to_theta, prepare_chi, theta_to_mu};

/// One phase-estimation repetition of a pricing run.
#[derive(Debug, Clone, Copy)]
pub struct RepetitionTrace {
    pub run_id: u32,
    pub theta_hat: f64,
    pub mu_hat: f64,
    pub pi_hat: f64,
    pub k_q: u64,
}

/// Result of the full European quantum pricing pipeline.
#[derive(Debug, Clone)]
pub struct EuroQuantumResult {
    pub reps: Vec<RepetitionTrace>,
    pub grid_qubits: u32,
    pub phase_bits: u32,
    pub repetitions: u32,
    pub v_max: f64,
    pub mu_hat: f64,
    pub theta_hat: f64,
    pub pi_hat: f64,
    pub pi_analytic: f64,
    /// Exact ancilla mass of the prepared state.
    pub mu_exact: f64,
    /// Price-scale discretization + quantization error
    /// `|e^(-rT)·v_max·μ - Π|`, computable because μ is exact in simulation.
    pub nu_est: f64,
    /// Price-scale phase-estimation bound
    /// `e^(-rT)·v_max·ε_Q(θ̂, 2^m - 1)`.
    pub eps_bound: f64,
    pub k_q_total: u64,
}

/// Run the coherent European pipeline under the given config.
pub fn price_european_quantum(
    cfg: &ExperimentConfig,
    rng: &mut ChaCha8Rng,
) -> Result<EuroQuantumResult> {
    cfg.qae.validate()?;
    let market = cfg.market;
    let dist = gaussian_grid(market.maturity, cfg.grid.qubits, cfg.grid.cutoff)?;
    let payoff = euro_payoff(&market);
    let top = payoff(dist.grid.x_max);
    let v_max = if top > 0.0 { top } else { 1.0 };
    let quantized = quantize_payoff(&payoff, dist.grid, cfg.grid.payoff_bits, v_max)?;
    let chi = prepare_chi(&dist, &quantized)?;
    let mu_exact = exact_mu(&chi);
    let sampler = QaeSampler::new(&chi, cfg.qae.phase_bits)?;

    let discount = (-market.rate * market.maturity).exp();
    let mut reps = Vec::with_capacity(cfg.qae.repetitions as usize);
    let mut estimates = Vec::with_capacity(cfg.qae.repetitions as usize);
    let mut k_q_total = 0u64;
    for run_id in 0..cfg.qae.repetitions {
        let est = sampler.estimate_once(rng);
        k_q_total += est.phase.unitary_applications;
        reps.push(RepetitionTrace {
            run_id,
            theta_hat: est.phase.theta_hat,
            mu_hat: est.a_hat,
            pi_hat: discount * v_max * est.a_hat,
            k_q: est.phase.unitary_applications,
        });
        estimates.push(est);
    }
    estimates.sort_by(|a, b| a.a_hat.total_cmp(&b.a_hat));
    let median = estimates[(estimates.len() - 1) / 2];

    let analytic = bsm_call_price(&market).price;
    let k_q_per_run = (1u64 << cfg.qae.phase_bits) - 1;
    Ok(EuroQuantumResult {
        reps,
        grid_qubits: cfg.grid.qubits,
        phase_bits: cfg.qae.phase_bits,
        repetitions: cfg.qae.repetitions,
        v_max,
        mu_hat: median.a_hat,
        theta_hat: median.phase.theta_hat,
        pi_hat: discount * v_max * median.a_hat,
        pi_analytic: analytic,
        mu_exact,
        nu_est: (discount * v_max * mu_exact - analytic).abs(),
        eps_bound: discount * v_max * error_upper_bound(median.phase.theta_hat, k_q_per_run)?,
        k_q_total,
    })
}

/// Exact-μ price of the discretized pipeline (no sampling), used to study
/// the discretization error ν as the grid grows.
pub fn discretized_price(
    market: &MarketParams,
    qubits: u32,
    cutoff: f64,
    bits: u32,
) -> Result<f64> {
    let dist = gaussian_grid(market.maturity, qubits, cutoff)?;
    let payoff = euro_payoff(market);
    let top = payoff(dist.grid.x_max);
    let v_max = if top > 0.0 { top } else { 1.0 };
    let quantized = quantize_payoff(&payoff, dist.grid, bits, v_max)?;
    let mu: f64 = quantized.expectation(&dist.probs);
    Ok((-market.rate * market.maturity).exp() * v_max * mu)
}

/// One point of the quantum error-scaling sweep.
#[derive(Debug, Clone, Copy)]
pub struct QuantumSweepPoint {
    pub phase_bits: u32,
    /// Total single-qubit unitary applications `D·shots·(2^m - 1)`.
    pub k_q: u64,
    /// Mean pricing error over the trials.
    pub mean_error: f64,
    /// Mean rescaled phase-estimation bound over the trials.
    pub mean_bound: f64,
}

/// `D`-fold median of single-qubit phase estimations.
pub fn single_qubit_median(
    theta: f64,
    m: u32,
    shots_per_bit: u32,
    repetitions: u32,
    rng: &mut ChaCha8Rng,
) -> Result<PhaseEstimate> {
    let runs: Vec<PhaseEstimate> = (0..repetitions)
        .map(|_| single_qubit_pe(theta, m, shots_per_bit, rng))
        .collect::<Result<_>>()?;
    median_boost(&runs)
}

/// Single-qubit quantum error sweep against the analytic price, following
/// the `θ = 2·arccos(1 - 2Π/S0)` rescaling.
pub fn quantum_error_sweep(
    market: &MarketParams,
    phase_bits: &[u32],
    trials: u64,
    repetitions: u32,
    shots_per_bit: u32,
    master_seed: u64,
) -> Result<Vec<QuantumSweepPoint>> {
    let analytic = bsm_call_price(market).price;
    let mu_star = analytic / market.s0;
    let theta_star = mu_to_theta(mu_star)?;
    phase_bits
        .iter()
        .enumerate()
        .map(|(mi, &m)| {
            let per_run = shots_per_bit as u64 * ((1u64 << m) - 1);
            let cells: Vec<(f64, f64)> = (0..trials)
                .into_par_iter()
                .map(|trial| -> Result<(f64, f64)> {
                    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
                    rng.set_stream(mi as u64 * trials + trial);
                    let med =
                        single_qubit_median(theta_star, m, shots_per_bit, repetitions, &mut rng)?;
                    let pi_hat = market.s0 * theta_to_mu(med.theta_hat)?;
                    let bound = market.s0 * error_upper_bound(med.theta_hat, per_run)?;
                    Ok(((pi_hat - analytic).abs(), bound))
                })
                .collect::<Result<_>>()?;
            let mean_error = cells.iter().map(|c| c.0).sum::<f64>() / trials as f64;
            let mean_bound = cells.iter().map(|c| c.1).sum::<f64>() / trials as f64;
            Ok(QuantumSweepPoint {
                phase_bits: m,
                k_q: repetitions as u64 * per_run,
                mean_error,
                mean_bound,
            })
        })
        .collect()
}

/// Output of the error-scaling experiment: both fitted curves plus the raw
/// sweep points.
#[derive(Debug, Clone)]
pub struct Fig2Output {
    pub classical_points: Vec<(u64, f64)>,
    pub classical_fit: ScalingReport,
    pub quantum_points: Vec<QuantumSweepPoint>,
    pub quantum_fit: ScalingReport,
}

/// Classical-vs-quantum error scaling at matched confidence.
pub fn fig2_experiment(cfg: &ExperimentConfig) -> Result<Fig2Output> {
    let classical_points = mc_error_sweep(
        &cfg.market,
        &cfg.classical.ks,
        cfg.classical.trials,
        cfg.seed,
    )?;
    let classical_fit = fit_power_law(&classical_points)?;
    let quantum_points = quantum_error_sweep(
        &cfg.market,
        &cfg.quantum_sweep.phase_bits,
        cfg.quantum_sweep.trials,
        cfg.qae.repetitions,
        cfg.qae.shots_per_bit,
        // A fixed offset separates the quantum streams from the classical
        // sweep's.
        cfg.seed ^ 0x9e37_79b9_7f4a_7c15,
    )?;
    let quantum_fit = fit_power_law(
        &quantum_points
            .iter()
            .map(|p| (p.k_q, p.mean_error))
            .collect::<Vec<_>>(),
    )?;
    Ok(Fig2Output {
        classical_points,
        classical_fit,
        quantum_points,
        quantum_fit,
    })
}

/// One row of the strike-robustness experiment.
#[derive(Debug, Clone, Copy)]
pub struct Fig3Row {
    pub strike: f64,
    pub zeta_q: f64,
    pub zeta_c: f64,
    pub ratio: f64,
}

/// Fit the quantum scaling exponent per strike and report the ratio to the
/// classical exponent, taken as -1/2.
pub fn fig3_experiment(cfg: &ExperimentConfig) -> Result<Vec<Fig3Row>> {
    const ZETA_C: f64 = -0.5;
    cfg.strikes
        .iter()
        .enumerate()
        .map(|(si, &strike)| {
            let market = MarketParams::new(
                cfg.market.s0,
                strike,
                cfg.market.rate,
                cfg.market.vol,
                cfg.market.maturity,
                cfg.market.drift,
            )?;
            let points = quantum_error_sweep(
                &market,
                &cfg.quantum_sweep.phase_bits,
                cfg.quantum_sweep.trials,
                cfg.qae.repetitions,
                cfg.qae.shots_per_bit,
                cfg.seed.wrapping_add(si as u64),
            )?;
            let fit = fit_power_law(
                &points
                    .iter()
                    .map(|p| (p.k_q, p.mean_error))
                    .collect::<Vec<_>>(),
            )?;
            Ok(Fig3Row {
                strike,
                zeta_q: fit.exponent,
                zeta_c: ZETA_C,
                ratio: fit.exponent / ZETA_C,
            })
        })
        .collect()
}

/// Sampled real-world (P-measure) stock paths, one row per time point.
pub fn fig1_paths(cfg: &ExperimentConfig) -> Result<Vec<(f64, u64, f64)>> {
    let f = cfg.fig1;
    let market = MarketParams::new(
        f.s0,
        f.s0, // strike is irrelevant for path sampling
        cfg.market.rate,
        f.vol,
        f.maturity,
        f.drift,
    )?;
    let times: Vec<f64> = (1..=f.steps)
        .map(|l| f.maturity * l as f64 / f.steps as f64)
        .collect();
    let mut rows = Vec::with_capacity((f.paths * (f.steps as u64 + 1)) as usize);
    for path_id in 0..f.paths {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(path_id);
        let path = gbm_path(&market, &times, Measure::P, &mut rng)?;
        rows.push((0.0, path_id, f.s0));
        for (t, s) in times.iter().zip(&path) {
            rows.push((*t, path_id, *s));
        }
    }
    Ok(rows)
}

pub fn write_fig1_csv<W: Write>(rows: &[(f64, u64, f64)], out: &mut W) -> Result<()> {
    writeln!(out, "t,path_id,price")?;
    for (t, id, s) in rows {
        writeln!(out, "{t},{id},{s}")?;
    }
    Ok(())
}

pub fn write_fig2_csv<W: Write>(fig2: &Fig2Output, out: &mut W) -> Result<()> {
    writeln!(out, "k,error_classical,error_quantum,bound_quantum")?;
    let mut rows: Vec<(u64, String)> = fig2
        .classical_points
        .iter()
        .map(|&(k, e)| (k, format!("{k},{e},nan,nan")))
        .chain(fig2.quantum_points.iter().map(|p| {
            (
                p.k_q,
                format!("{},nan,{},{}", p.k_q, p.mean_error, p.mean_bound),
            )
        }))
        .collect();
    rows.sort_by_key(|r| r.0);
    for (_, row) in rows {
        writeln!(out, "{row}")?;
    }
    Ok(())
}

pub fn write_fig3_csv<W: Write>(rows: &[Fig3Row], out: &mut W) -> Result<()> {
    writeln!(out, "strike,zeta_q,zeta_c,ratio")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.strike, r.zeta_q, r.zeta_c, r.ratio)?;
    }
    Ok(())
}

pub fn write_euro_trace_csv<W: Write>(result: &EuroQuantumResult, out: &mut W) -> Result<()> {
    writeln!(
        out,
        "run_id,n,m,D,k_q,mu_hat,theta_hat,pi_hat,pi_analytic,nu_est,eps_bound"
    )?;
    for rep in &result.reps {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            rep.run_id,
            result.grid_qubits,
            result.phase_bits,
            result.repetitions,
            rep.k_q,
            rep.mu_hat,
            rep.theta_hat,
            rep.pi_hat,
            result.pi_analytic,
            result.nu_est,
            result.eps_bound,
        )?;
    }
    Ok(())
}

/// Asian trace rows share the European schema plus the path structure; the
/// reference column holds the exact enumeration price (there is no closed
/// form), and the discretization column is not computable, so it is `nan`.
pub fn write_asian_trace_csv<W: Write>(
    spec: &AsianSpec,
    result: &AsianQuantumPrice,
    phase_bits: u32,
    repetitions: u32,
    out: &mut W,
) -> Result<()> {
    writeln!(
        out,
        "run_id,n,m,D,k_q,mu_hat,theta_hat,pi_hat,pi_analytic,nu_est,eps_bound,L,m_per_period,kind"
    )?;
    let discount = (-spec.params.rate * spec.params.maturity).exp();
    let reference = discount * result.v_max * result.exact_mu;
    writeln!(
        out,
        "0,{},{},{},{},{},{},{},{},nan,{},{},{},{}",
        spec.index_qubits(),
        phase_bits,
        repetitions,
        result.k_q_total,
        result.mu_hat,
        result.theta_hat,
        result.price,
        reference,
        result.eps_bound,
        spec.periods,
        spec.period_qubits,
        spec.kind.label(),
    )?;
    Ok(())
}

/// Quick invariant battery for the `selftest` subcommand. Returns the
/// printed report; any failed check is an error.
pub fn selftest(cfg: &ExperimentConfig) -> Result<String> {
    use crate::dist::grover_rudolph;
    use crate::mc::mc_price_european;
    use crate::statevec::{apply_q, apply_v, states_equal_up_to_phase, StatePrepCircuit};

    let mut report = String::new();
    let mut check = |name: &str, ok: bool, detail: String| -> Result<()> {
        if ok {
            report.push_str(&format!("PASS {name} ({detail})\n"));
            Ok(())
        } else {
            report.push_str(&format!("FAIL {name} ({detail})\n"));
            Err(Error::domain(format!(
                "selftest failed at {name}: {detail}"
            )))
        }
    };

    // Distribution loading reproduces sqrt(p) exactly.
    let dist = gaussian_grid(cfg.market.maturity, 8, cfg.grid.cutoff)?;
    let prep = grover_rudolph(&dist);
    let worst = prep
        .amps
        .amps
        .iter()
        .zip(&dist.probs)
        .map(|(a, &p)| (a.re - p.sqrt()).abs())
        .fold(0.0f64, f64::max);
    check(
        "grover_rudolph_exactness",
        worst <= 1e-12,
        format!("max dev {worst:.2e}"),
    )?;

    // chi encodes the weighted payoff expectation.
    let payoff = euro_payoff(&cfg.market);
    let v_max = payoff(dist.grid.x_max).max(1.0);
    let q = quantize_payoff(&payoff, dist.grid, cfg.grid.payoff_bits, v_max)?;
    let chi = prepare_chi(&dist, &q)?;
    let mu = exact_mu(&chi);
    let direct = q.expectation(&dist.probs);
    check(
        "chi_mu_identity",
        (mu - direct).abs() <= 1e-12,
        format!("dev {:.2e}", (mu - direct).abs()),
    )?;

    // V expectation identity.
    let mut v_chi = chi.clone();
    apply_v(&mut v_chi);
    let dev = (chi.inner(&v_chi).re - (1.0 - 2.0 * mu)).abs();
    check(
        "reflection_v_expectation",
        dev <= 1e-12,
        format!("dev {dev:.2e}"),
    )?;

    // Projector U against the F Z F-dagger circuit on chi itself.
    let small_dist = gaussian_grid(cfg.market.maturity, 5, cfg.grid.cutoff)?;
    let small_q = quantize_payoff(&payoff, small_dist.grid, 10, v_max)?;
    let small_chi = prepare_chi(&small_dist, &small_q)?;
    let circuit = StatePrepCircuit::new(&small_dist, &small_q)?;
    let mut a = small_chi.clone();
    apply_q(&mut a, &small_chi)?;
    let mut b = small_chi.clone();
    apply_v(&mut b);
    circuit.apply_u_circuit(&mut b)?;
    apply_v(&mut b);
    circuit.apply_u_circuit(&mut b)?;
    check(
        "u_circuit_route",
        states_equal_up_to_phase(&a, &b, 1e-10),
        "Q via projector vs F Z F-dagger".to_string(),
    )?;

    // QPE outcome table is a symmetric probability distribution.
    let sampler = QaeSampler::new(&small_chi, 6)?;
    let table = sampler.table();
    let total: f64 = table.iter().sum();
    let sym = (1..table.len())
        .map(|x| (table[x] - table[table.len() - x]).abs())
        .fold(0.0f64, f64::max);
    check(
        "qpe_distribution",
        (total - 1.0).abs() <= 1e-10 && sym <= 1e-10,
        format!("sum dev {:.2e}, asym {sym:.2e}", (total - 1.0).abs()),
    )?;

    // Discounted martingale property of the Q-measure sampler.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let k = 100_000u64;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let sqrt_t = cfg.market.maturity.sqrt();
    for _ in 0..k {
        use rand::Rng;
        let z: f64 = rng.sample(rand_distr::StandardNormal);
        let s = crate::bsm::gbm_terminal(
            cfg.market.s0,
            cfg.market.rate,
            cfg.market.vol,
            cfg.market.maturity,
            sqrt_t * z,
        );
        let d = (-cfg.market.rate * cfg.market.maturity).exp() * s;
        sum += d;
        sumsq += d * d;
    }
    let mean = sum / k as f64;
    let se = ((sumsq / k as f64 - mean * mean) / k as f64).sqrt();
    check(
        "martingale",
        (mean - cfg.market.s0).abs() <= 3.0 * se,
        format!(
            "mean {mean:.4} vs s0 {} (3se {:.4})",
            cfg.market.s0,
            3.0 * se
        ),
    )?;

    // Monte Carlo agrees with the closed form.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 1);
    let est = mc_price_european(&cfg.market, 200_000, &mut rng)?;
    let analytic = bsm_call_price(&cfg.market).price;
    check(
        "mc_vs_analytic",
        (est.mean - analytic).abs() <= 4.0 * est.std_error,
        format!("mc {:.4} vs analytic {analytic:.4}", est.mean),
    )?;

    Ok(report)
}
