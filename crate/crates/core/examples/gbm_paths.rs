//! Sample geometric Brownian motion paths under the real-world measure and
//! check the discounted martingale property under the pricing measure.
//!
//! ```bash
//! cargo run --example gbm_paths
//! ```

use qpricer::bsm::{gbm_path, gbm_terminal, MarketParams, Measure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() -> qpricer::Result<()> {
    // A small stock: S0 = $3, drift 10%, vol 25%.
    let market = MarketParams::new(3.0, 3.0, 0.05, 0.25, 1.0, 0.1)?;
    let times: Vec<f64> = (1..=12).map(|m| m as f64 / 12.0).collect();

    println!("Five P-measure sample paths (monthly, one year):");
    print!("{:>6}", "month");
    for p in 0..5 {
        print!("  path{p:>2}");
    }
    println!();
    let paths: Vec<Vec<f64>> = (0..5)
        .map(|p| {
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            rng.set_stream(p);
            gbm_path(&market, &times, Measure::P, &mut rng)
        })
        .collect::<qpricer::Result<_>>()?;
    for (i, _t) in times.iter().enumerate() {
        print!("{:>6}", i + 1);
        for path in &paths {
            print!("  {:>6.3}", path[i]);
        }
        println!();
    }

    // Under Q the discounted terminal price averages back to S0.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 200_000;
    let discount = (-market.rate * market.maturity).exp();
    let mean: f64 = (0..n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            discount * gbm_terminal(market.s0, market.rate, market.vol, market.maturity, z)
        })
        .sum::<f64>()
        / n as f64;
    println!("\nQ-measure martingale check over {n} samples:");
    println!("  mean e^(-rT) S_T = {mean:.5}  (S0 = {})", market.s0);
    Ok(())
}
