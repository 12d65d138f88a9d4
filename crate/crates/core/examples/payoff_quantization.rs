//! Fixed-point quantization of the call payoff for the rotation oracle:
//! normalized table, worst-case error against the bound, and the sequential
//! path-average update with its inverse.
//!
//! ```bash
//! cargo run --example payoff_quantization
//! ```

use qpricer::bsm::MarketParams;
use qpricer::dist::gaussian_grid;
use qpricer::payoff::{euro_payoff, path_average, quantize_payoff, AverageKind, RunningAverage};

fn main() -> qpricer::Result<()> {
    let market = MarketParams::new(100.0, 100.0, 0.05, 0.2, 1.0, 0.1)?;
    let grid = gaussian_grid(market.maturity, 6, 4.0)?.grid;
    let payoff = euro_payoff(&market);
    let v_max = payoff(grid.x_max);

    for bits in [4u32, 8, 12, 16] {
        let q = quantize_payoff(&payoff, grid, bits, v_max)?;
        let worst = (0..grid.len())
            .map(|j| (q.values[j] * v_max - payoff(grid.point(j)).clamp(0.0, v_max)).abs())
            .fold(0.0f64, f64::max);
        let bound = v_max * 2f64.powi(-(bits as i32));
        println!(
            "bits = {bits:>2}: worst |v_max*v_tilde - v| = {worst:>10.6} (bound {bound:>10.6})"
        );
    }

    let q = quantize_payoff(&payoff, grid, 8, v_max)?;
    println!("\nTable around the strike kink (8 bits, v_max = {v_max:.4}):");
    for j in 28..36 {
        println!(
            "  j = {j:>2}: x = {:+.4}, payoff = {:>9.5}, quantized = {:>9.5} (code {:>3})",
            grid.point(j),
            payoff(grid.point(j)),
            q.values[j] * v_max,
            q.codes[j]
        );
    }

    // The running average used by the path-dependent payoff is invertible.
    let prices = [101.3, 98.7, 104.2, 99.1];
    let mut run = RunningAverage::new(AverageKind::Geometric);
    for &s in &prices {
        run.update(s);
    }
    println!("\nSequential geometric average of {prices:?}:");
    println!("  running = {:.9}", run.value()?);
    println!(
        "  batch   = {:.9}",
        path_average(&prices, AverageKind::Geometric)?
    );
    run.invert_update(prices[3])?;
    println!(
        "  after inverting the last update: {:.9} over {} prices",
        run.value()?,
        run.count()
    );
    Ok(())
}
