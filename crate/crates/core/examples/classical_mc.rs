//! Vanilla Monte Carlo pricing baseline: estimate, standard error, and the
//! 1/sqrt(k) error decay against the closed form.
//!
//! ```bash
//! cargo run --release --example classical_mc
//! ```

use qpricer::bsm::{bsm_call_price, MarketParams};
use qpricer::mc::{fit_power_law, mc_error_sweep, mc_price_european};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qpricer::Result<()> {
    let market = MarketParams::new(100.0, 100.0, 0.05, 0.2, 1.0, 0.1)?;
    let analytic = bsm_call_price(&market).price;

    println!("Monte Carlo estimates vs analytic price {analytic:.6}:");
    for k in [1_000u64, 10_000, 100_000, 1_000_000] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let est = mc_price_european(&market, k, &mut rng)?;
        println!(
            "  k = {k:>8}: price = {:>9.5} +- {:.5}  (z = {:+.2})",
            est.mean,
            est.std_error,
            (est.mean - analytic) / est.std_error
        );
    }

    println!("\nMean |error| over 50 trials per k, fitted to a power law:");
    let points = mc_error_sweep(&market, &[100, 1_000, 10_000, 100_000], 50, 7)?;
    for &(k, err) in &points {
        println!("  k = {k:>8}: mean error = {err:.5}");
    }
    let fit = fit_power_law(&points)?;
    println!(
        "  fit: Error = {:.3} * k^{:.4}  (residual {:.3})",
        fit.amplitude, fit.exponent, fit.residual
    );
    Ok(())
}
