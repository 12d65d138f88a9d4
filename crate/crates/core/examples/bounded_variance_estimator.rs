//! Mean estimation for an unbounded payoff with a known variance bound:
//! standardize around a pilot mean, split into signs, and estimate the
//! dyadic range levels f_{0,1}, f_{1,2}, f_{2,4}, ... each through the
//! [0,1]-bounded estimator.
//!
//! ```bash
//! cargo run --release --example bounded_variance_estimator
//! ```

use qpricer::dist::dist_from_probs;
use qpricer::qae::{mean_estimate_bounded_variance, range_level};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qpricer::Result<()> {
    println!("range functions f_a_b(x) = x/b on [a, b):");
    for (a, b, x) in [
        (0.0, 1.0, 0.5),
        (1.0, 2.0, 1.5),
        (2.0, 4.0, 3.0),
        (4.0, 8.0, 5.0),
    ] {
        println!("  f_{{{a},{b}}}({x}) = {}", range_level(a, b)(x));
    }

    // A discrete payoff with a known mean and standard deviation.
    let dist = dist_from_probs(&[0.15, 0.35, 0.30, 0.20])?;
    let values = [12.0, 19.0, 25.0, 31.0];
    let mean: f64 = dist.probs.iter().zip(&values).map(|(&p, &v)| p * v).sum();
    let second: f64 = dist
        .probs
        .iter()
        .zip(&values)
        .map(|(&p, &v)| p * v * v)
        .sum();
    let lambda = (second - mean * mean).sqrt() * 1.1; // a valid known bound
    println!("\ntarget mean = {mean:.6}, payoff sd bound lambda = {lambda:.4}");

    for eps_frac in [0.5, 0.25, 0.125] {
        let eps = lambda * eps_frac;
        let mut hits = 0;
        let runs = 40;
        for seed in 0..runs {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let est = mean_estimate_bounded_variance(&dist, &values, lambda, eps, &mut rng)?;
            if (est.estimate - mean).abs() <= eps {
                hits += 1;
            }
        }
        println!(
            "  eps = {eps:>7.4} (lambda/{:.0}): within eps in {hits}/{runs} runs",
            1.0 / eps_frac
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let est = mean_estimate_bounded_variance(&dist, &values, lambda, lambda / 8.0, &mut rng)?;
    println!("\none run at eps = lambda/8:");
    println!("  estimate    = {:.6}", est.estimate);
    println!("  pilot mean  = {:.6}", est.pilot_mean);
    println!("  levels/sign = {}", est.levels_per_sign);
    println!("  k_Q total   = {}", est.unitary_applications);
    Ok(())
}
