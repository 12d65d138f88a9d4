//! The error-scaling comparison: classical Monte Carlo vs single-qubit
//! phase estimation at matched confidence, fitted to Error = a k^zeta, plus
//! the strike sweep of the exponent ratio.
//!
//! ```bash
//! cargo run --release --example error_scaling
//! ```

use qpricer::bench::{fig2_experiment, fig3_experiment};
use qpricer::config::{ClassicalSweepConfig, ExperimentConfig, QuantumSweepConfig};

fn main() -> qpricer::Result<()> {
    // Fewer trials than the benchmark defaults so the example stays quick;
    // the full width of the sweep is kept because short ranges make the
    // fitted exponent noisy.
    let mut cfg = ExperimentConfig {
        classical: ClassicalSweepConfig {
            ks: vec![100, 1_000, 10_000, 100_000],
            trials: 50,
        },
        quantum_sweep: QuantumSweepConfig {
            phase_bits: (7..=20).collect(),
            trials: 50,
        },
        seed: 0,
        ..Default::default()
    };

    let out = fig2_experiment(&cfg)?;
    println!("classical sweep (k, mean |error|):");
    for &(k, e) in &out.classical_points {
        println!("  k = {k:>8}: {e:.5}");
    }
    println!("quantum sweep (k_Q, mean |error|, mean bound):");
    for p in &out.quantum_points {
        println!(
            "  m = {:>2}, k_Q = {:>8}: {:.6}  (bound {:.6})",
            p.phase_bits, p.k_q, p.mean_error, p.mean_bound
        );
    }
    println!(
        "\nfitted exponents: zeta_C = {:.4}, zeta_Q = {:.4}, ratio = {:.3}",
        out.classical_fit.exponent,
        out.quantum_fit.exponent,
        out.quantum_fit.exponent / out.classical_fit.exponent
    );

    cfg.strikes = vec![60.0, 100.0, 140.0];
    println!("\nstrike sweep (zeta_C fixed at -0.5):");
    for row in fig3_experiment(&cfg)? {
        println!(
            "  K = {:>6.1}: zeta_Q = {:.4}, ratio = {:.3}",
            row.strike, row.zeta_q, row.ratio
        );
    }
    Ok(())
}
