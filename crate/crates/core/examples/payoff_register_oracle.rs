//! The payoff rotation through an explicit register: compute the quantized
//! payoff into scratch qubits, rotate the ancilla off the register value,
//! uncompute, and verify the scratch comes back clean.
//!
//! ```bash
//! cargo run --example payoff_register_oracle
//! ```

use num_complex::Complex64;
use qpricer::bsm::MarketParams;
use qpricer::dist::gaussian_grid;
use qpricer::payoff::{euro_payoff, quantize_payoff};
use qpricer::statevec::{
    apply_r_with_register, discard_scratch, exact_mu, prepare_chi, scratch_stray_mass,
    scratch_trace_purity, QuantumState, RegisterLayout,
};

fn main() -> qpricer::Result<()> {
    let market = MarketParams::new(100.0, 100.0, 0.05, 0.2, 1.0, 0.1)?;
    let dist = gaussian_grid(market.maturity, 5, 4.0)?;
    let payoff = euro_payoff(&market);
    let v_max = payoff(dist.grid.x_max);
    let bits = 6;
    let quantized = quantize_payoff(&payoff, dist.grid, bits, v_max)?;

    // Index register loaded with the distribution, payoff register and
    // ancilla in |0>. The register needs bits + 1 qubits so the saturating
    // top code fits.
    let layout = RegisterLayout::new(5, bits + 1, 0)?;
    let mut state = QuantumState::zero(layout);
    state.amps[0] = Complex64::new(0.0, 0.0);
    for (j, &p) in dist.probs.iter().enumerate() {
        state.amps[j << (1 + bits + 1)] = Complex64::new(p.sqrt(), 0.0);
    }

    println!(
        "register: {} index + {} payoff + 1 ancilla qubits ({} amplitudes)",
        layout.index_qubits,
        layout.scratch_qubits,
        layout.dim()
    );
    apply_r_with_register(&mut state, &quantized)?;

    println!("after compute -> rotate -> uncompute:");
    println!(
        "  stray scratch mass   = {:.2e}",
        scratch_stray_mass(&state)
    );
    println!(
        "  reduced-state purity = {:.15}",
        scratch_trace_purity(&state)
    );

    let reduced = discard_scratch(&state)?;
    let direct = prepare_chi(&dist, &quantized)?;
    let max_dev = reduced
        .amps
        .iter()
        .zip(&direct.amps)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    println!("  max deviation from the direct preparation = {max_dev:.2e}");
    println!(
        "  ancilla mass mu = {:.9} (direct {:.9})",
        exact_mu(&reduced),
        exact_mu(&direct)
    );
    Ok(())
}
