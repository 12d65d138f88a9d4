//! Cross-module integration tests: the quantum pipeline against independent
//! oracles, and reductions between the European and Asian paths.

mod common;

use qpricer::asian::{asian_composite_state, default_v_max, AsianSpec};
use qpricer::bench::{fig2_experiment, price_european_quantum, write_fig2_csv};
use qpricer::bsm::{bsm_call_price, bsm_call_variance, MarketParams};
use qpricer::config::ExperimentConfig;
use qpricer::dist::gaussian_grid;
use qpricer::mc::chebyshev_samples;
use qpricer::payoff::{euro_payoff, quantize_payoff, AverageKind};
use qpricer::qae::{mean_estimate_01, QaeSampler};
use qpricer::statevec::{exact_mu, prepare_chi};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn atm() -> MarketParams {
    MarketParams::new(100.0, 100.0, 0.05, 0.2, 1.0, 0.1).unwrap()
}

#[test]
fn analytic_variance_matches_quadrature() {
    for &k in &[70.0, 100.0, 130.0] {
        for &vol in &[0.15, 0.3] {
            let p = MarketParams::new(100.0, k, 0.05, vol, 1.0, 0.1).unwrap();
            let closed = bsm_call_variance(&p);
            let quad = common::quadrature_payoff_variance(&p);
            assert!(
                (closed - quad).abs() / quad <= 1e-9,
                "K={k}, vol={vol}: {closed} vs {quad}"
            );
        }
    }
}

#[test]
fn quantum_price_tracks_analytic_across_strikes() {
    for &strike in &[80.0, 100.0, 120.0] {
        let cfg = ExperimentConfig {
            market: MarketParams::new(100.0, strike, 0.05, 0.2, 1.0, 0.1).unwrap(),
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let out = price_european_quantum(&cfg, &mut rng).unwrap();
        assert!(
            (out.pi_hat - out.pi_analytic).abs() <= out.eps_bound + out.nu_est,
            "K={strike}: pi_hat {} vs {} (eps {}, nu {})",
            out.pi_hat,
            out.pi_analytic,
            out.eps_bound,
            out.nu_est
        );
    }
}

#[test]
fn mean_estimation_hits_exact_mu_at_spec_tolerance() {
    // Euro-call grid, n = 8, m = 10 phase bits, delta = 0.1: the estimate
    // lands within 4/2^10 of the exact ancilla mass in at least 90% of 200
    // seeded runs.
    let market = atm();
    let dist = gaussian_grid(market.maturity, 8, 4.0).unwrap();
    let payoff = euro_payoff(&market);
    let v_max = payoff(dist.grid.x_max);
    let quantized = quantize_payoff(&payoff, dist.grid, 16, v_max).unwrap();
    let chi = prepare_chi(&dist, &quantized).unwrap();
    let mu = exact_mu(&chi);
    let tol = 4.0 / 1024.0;
    let runs = 200;
    let mut ok = 0;
    for run in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        rng.set_stream(run);
        let est = mean_estimate_01(&dist, &quantized, 1024, 0.1, &mut rng).unwrap();
        if (est.mu_hat - mu).abs() <= tol {
            ok += 1;
        }
    }
    assert!(ok * 10 >= runs * 9, "{ok}/{runs} runs within 4/2^m");
}

#[test]
fn asian_single_period_reduces_to_european() {
    // With one period the composite state must equal the European chi built
    // on the same grid, payoff bits, and cap, and so must the QPE outcome
    // table.
    let market = atm();
    let spec = AsianSpec::new(market, 1, 6, AverageKind::Arithmetic, 4.0).unwrap();
    let v_max_asian = default_v_max(&spec).unwrap();

    let dist = gaussian_grid(market.maturity, 6, 4.0).unwrap();
    let payoff = euro_payoff(&market);
    let v_max_euro = payoff(dist.grid.x_max);
    assert!(
        (v_max_asian - v_max_euro).abs() < 1e-9,
        "caps diverge: {v_max_asian} vs {v_max_euro}"
    );

    let bits = 12;
    let asian_state = asian_composite_state(&spec, bits, v_max_asian).unwrap();
    let quantized = quantize_payoff(&payoff, dist.grid, bits, v_max_euro).unwrap();
    let euro_state = prepare_chi(&dist, &quantized).unwrap();
    for (a, b) in asian_state.amps.iter().zip(&euro_state.amps) {
        assert!((a - b).norm() <= 1e-12);
    }

    let asian_table = QaeSampler::new(&asian_state, 6).unwrap();
    let euro_table = QaeSampler::new(&euro_state, 6).unwrap();
    for (p, q) in asian_table.table().iter().zip(euro_table.table()) {
        assert!((p - q).abs() <= 1e-12);
    }
}

#[test]
fn chebyshev_budget_is_honest_for_the_call() {
    // The sample count from the exact variance bound really does deliver
    // the promised confidence (checked at a coarse epsilon for speed).
    let p = atm();
    let lambda = bsm_call_variance(&p).sqrt();
    let analytic = bsm_call_price(&p).price;
    let (eps, delta) = (1.0, 0.1);
    let k = chebyshev_samples(lambda, eps, delta).unwrap();
    let runs = 100;
    let mut bad = 0;
    for run in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(3003);
        rng.set_stream(run);
        let est = qpricer::mc::mc_price_european(&p, k, &mut rng).unwrap();
        if (est.mean - analytic).abs() >= eps {
            bad += 1;
        }
    }
    assert!(
        (bad as f64) / (runs as f64) <= delta,
        "{bad}/{runs} runs missed at eps={eps}"
    );
}

#[test]
fn fig2_output_is_reproducible() {
    let mut cfg = ExperimentConfig::default();
    cfg.classical.ks = vec![100, 1_000, 10_000];
    cfg.classical.trials = 10;
    cfg.quantum_sweep.phase_bits = vec![6, 9, 12];
    cfg.quantum_sweep.trials = 10;
    cfg.seed = 11;
    let mut a = Vec::new();
    write_fig2_csv(&fig2_experiment(&cfg).unwrap(), &mut a).unwrap();
    let mut b = Vec::new();
    write_fig2_csv(&fig2_experiment(&cfg).unwrap(), &mut b).unwrap();
    assert_eq!(a, b, "fig2 output must be byte-identical for a fixed seed");
}
