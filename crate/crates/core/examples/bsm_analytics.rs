//! Closed-form Black-Scholes-Merton analytics: price, the d-arguments, the
//! exact payoff variance, and the Chebyshev sample budget it implies.
//!
//! ```bash
//! cargo run --example bsm_analytics
//! ```

use qpricer::bsm::{bsm_call_price, MarketParams};
use qpricer::mc::chebyshev_samples;

fn main() -> qpricer::Result<()> {
    let market = MarketParams::new(100.0, 100.0, 0.05, 0.2, 1.0, 0.1)?;
    let quote = bsm_call_price(&market);

    println!("European call, S0 = 100, K = 100, r = 5%, vol = 20%, T = 1y");
    println!("  price     = {:.6}", quote.price);
    println!("  d1        = {:.6}", quote.d1);
    println!("  d2        = {:.6}", quote.d2);
    println!("  d3        = {:.6}", quote.d3);
    println!("  variance  = {:.6}", quote.variance);
    println!("  payoff sd = {:.6}", quote.variance.sqrt());

    let lambda = quote.variance.sqrt();
    println!("\nChebyshev sample counts k with lambda^2/(k eps^2) <= delta:");
    for (eps, delta) in [(1.0, 0.05), (0.1, 0.05), (0.1, 0.01), (0.01, 0.01)] {
        println!(
            "  eps = {eps:>5}, delta = {delta}: k = {}",
            chebyshev_samples(lambda, eps, delta)?
        );
    }

    println!("\nPrice across strikes (same vol and maturity):");
    for strike in [60.0, 80.0, 100.0, 120.0, 140.0] {
        let p = MarketParams::new(100.0, strike, 0.05, 0.2, 1.0, 0.1)?;
        println!(
            "  K = {strike:>6.1}: price = {:>9.5}",
            bsm_call_price(&p).price
        );
    }
    Ok(())
}
