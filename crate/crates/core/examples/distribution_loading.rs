//! Load a discretized Gaussian into amplitudes with the level-by-level
//! splitting recursion and verify the result against sqrt(p) directly.
//!
//! ```bash
//! cargo run --example distribution_loading
//! ```

use qpricer::dist::{gaussian_grid, grover_rudolph, level_probs};

fn main() -> qpricer::Result<()> {
    let n = 8;
    let dist = gaussian_grid(1.0, n, 4.0)?;
    println!(
        "Gaussian grid: 2^{n} points on [{:+.1}, {:+.1}], step {:.5}",
        -dist.grid.x_max, dist.grid.x_max, dist.grid.delta_x
    );

    println!("\nCoarse probabilities by level (first entries):");
    for m in 1..=4 {
        let level = level_probs(&dist, m)?;
        let shown: Vec<String> = level.iter().take(4).map(|p| format!("{p:.4}")).collect();
        println!(
            "  level {m}: [{}{}]",
            shown.join(", "),
            if level.len() > 4 { ", ..." } else { "" }
        );
    }

    let prep = grover_rudolph(&dist);
    let worst = prep
        .amps
        .amps
        .iter()
        .zip(&dist.probs)
        .map(|(a, &p)| (a.re - p.sqrt()).abs())
        .fold(0.0f64, f64::max);
    println!(
        "\nLoaded {} amplitudes with {} split angles.",
        dist.grid.len(),
        prep.angle_ops
    );
    println!("Max |amplitude - sqrt(p)| = {worst:.2e}");
    println!("Norm of the state        = {:.15}", prep.amps.norm_sq());

    println!("\nCenter of the loaded distribution:");
    let mid = dist.grid.len() / 2;
    for j in mid - 3..mid + 3 {
        println!(
            "  j = {j:>3}: x = {:+.4}, p = {:.6}, amp = {:.6}",
            dist.grid.point(j),
            dist.probs[j],
            prep.amps.amps[j].re
        );
    }
    Ok(())
}
