//! Phase estimation two ways: the exact outcome distribution of coherent
//! multi-qubit QPE over the walk operator, and the single-qubit iterative
//! sampler with median boosting.
//!
//! ```bash
//! cargo run --example phase_estimation
//! ```

use qpricer::bsm::MarketParams;
use qpricer::dist::gaussian_grid;
use qpricer::payoff::{euro_payoff, quantize_payoff};
use qpricer::qae::{
    median_boost, median_failure_bound, needed_repetitions, single_qubit_pe, QaeSampler,
};
use qpricer::statevec::{exact_mu, mu_to_theta, prepare_chi, theta_to_mu};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qpricer::Result<()> {
    let market = MarketParams::new(100.0, 100.0, 0.05, 0.2, 1.0, 0.1)?;
    let dist = gaussian_grid(market.maturity, 6, 4.0)?;
    let payoff = euro_payoff(&market);
    let v_max = payoff(dist.grid.x_max);
    let quantized = quantize_payoff(&payoff, dist.grid, 12, v_max)?;
    let chi = prepare_chi(&dist, &quantized)?;
    let mu = exact_mu(&chi);
    let theta = mu_to_theta(mu)?;

    let m = 7;
    let sampler = QaeSampler::new(&chi, m)?;
    let table = sampler.table();
    let turns = theta / (2.0 * std::f64::consts::PI);
    println!("Exact QPE outcome distribution, m = {m} phase bits:");
    println!(
        "  target theta = {theta:.6} rad = {turns:.6} turns (x* = {:.2})",
        turns * 128.0
    );
    let mut peaks: Vec<(usize, f64)> = table
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, p)| p > 0.01)
        .collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (x, p) in peaks.iter().take(6) {
        println!("  P(x = {x:>3}) = {p:.4}");
    }
    println!("  (two branches: x and 2^m - x encode the eigenphases +-theta)");

    // Single-qubit iterative estimation of the same angle.
    println!("\nSingle-qubit iterative estimation of theta, one shot per bit:");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in [6u32, 10, 14] {
        let reps = 24;
        let runs: Vec<_> = (0..reps)
            .map(|_| single_qubit_pe(theta, m, 1, &mut rng))
            .collect::<qpricer::Result<_>>()?;
        let med = median_boost(&runs)?;
        println!(
            "  m = {m:>2}: theta_hat = {:.6}, |dtheta| = {:.2e}, mu err = {:.2e}, k_Q = {}",
            med.theta_hat,
            (med.theta_hat - theta).abs(),
            (theta_to_mu(med.theta_hat)? - mu).abs(),
            med.unitary_applications,
        );
    }

    println!("\nMedian boosting budget:");
    let delta = 1.0 - 8.0 / (std::f64::consts::PI * std::f64::consts::PI);
    for d in [1u32, 5, 11, 19, 24] {
        println!(
            "  D = {d:>2}: failure bound {:.5}",
            median_failure_bound(delta, d)
        );
    }
    println!(
        "  repetitions for 99.5% confidence: D = {}",
        needed_repetitions(0.005)
    );
    Ok(())
}
