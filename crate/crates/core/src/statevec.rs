//! Dense state-vector engine for the amplitude-estimation pipeline.
//!
//! The composite register is ordered, from most to least significant bit:
//!
//! ```text
//! [ phase (m, only inside QPE) | index (n) | payoff scratch (s) | ancilla (1) ]
//! ```
//!
//! so a basis index decomposes as `i = (((y·2^n + j)·2^s + sc)·2 + b`.
//!
//! The pipeline state is
//!
//! ```text
//! |χ⟩ = Σ_j √p_j |j⟩ (√(1-ṽ_j) |0⟩ + √(ṽ_j) |1⟩),
//! ```
//!
//! whose ancilla-1 mass is the expectation `μ = Σ_j p_j ṽ_j`. The reflections
//!
//! ```text
//! V = I - 2·I⊗|1⟩⟨1|      Z = I - 2|0…0⟩⟨0…0|
//! U = I - 2|χ⟩⟨χ|         S = V U V        Q = U S = U V U V
//! ```
//!
//! give the walk operator Q whose eigenphases ±θ satisfy `1 - 2μ = cos(θ/2)`.
//! U is applied through the projector formula; the circuit construction
//! `U = F Z F†` (with `F` the state-preparation unitary built from the
//! Grover-Rudolph rotations and the payoff rotation) is kept as an
//! independent cross-check path.
//!
//! States are mutated in place and owned by one task at a time; every kernel
//! is sequential and deterministic.

use num_complex::Complex64;
use std::io::Write;

use crate::dist::{grover_rudolph_angles, DiscreteDist};
use crate::error::{Error, Result};
use crate::payoff::QuantizedPayoff;

/// Hard cap on the total simulated register width.
pub const MAX_QUBITS: u32 = 24;

/// Width of each sub-register of the simulated state. The ancilla is always
/// exactly one qubit and is the least significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    pub index_qubits: u32,
    pub scratch_qubits: u32,
    pub phase_qubits: u32,
}

impl RegisterLayout {
    pub fn new(index_qubits: u32, scratch_qubits: u32, phase_qubits: u32) -> Result<Self> {
        let total = index_qubits + scratch_qubits + phase_qubits + 1;
        if total > MAX_QUBITS {
            return Err(Error::resource(format!(
                "register of {total} qubits exceeds the {MAX_QUBITS}-qubit cap"
            )));
        }
        Ok(RegisterLayout {
            index_qubits,
            scratch_qubits,
            phase_qubits,
        })
    }

    pub fn total_qubits(&self) -> u32 {
        self.index_qubits + self.scratch_qubits + self.phase_qubits + 1
    }

    pub fn dim(&self) -> usize {
        1usize << self.total_qubits()
    }

    #[inline]
    pub fn ancilla_bit(&self, i: usize) -> usize {
        i & 1
    }

    #[inline]
    pub fn scratch_of(&self, i: usize) -> usize {
        (i >> 1) & ((1 << self.scratch_qubits) - 1)
    }

    #[inline]
    pub fn index_of(&self, i: usize) -> usize {
        (i >> (1 + self.scratch_qubits)) & ((1 << self.index_qubits) - 1)
    }
}

/// Complex amplitude vector over a [`RegisterLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub layout: RegisterLayout,
    pub amps: Vec<Complex64>,
}

/// Compensated (Neumaier) sum; keeps reductions accurate to ~1e-15 relative
/// regardless of the term count.
pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

impl QuantumState {
    pub fn zero(layout: RegisterLayout) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amps[0] = Complex64::new(1.0, 0.0);
        QuantumState { layout, amps }
    }

    pub fn norm_sq(&self) -> f64 {
        neumaier_sum(self.amps.iter().map(|a| a.norm_sqr()))
    }

    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Build `|χ⟩` directly from a distribution and a quantized payoff sharing
/// the same grid. All amplitudes are real and nonnegative.
pub fn prepare_chi(dist: &DiscreteDist, payoff: &QuantizedPayoff) -> Result<QuantumState> {
    if dist.grid != payoff.grid {
        return Err(Error::domain(
            "distribution and payoff are tabulated on different grids".to_string(),
        ));
    }
    let layout = RegisterLayout::new(dist.grid.qubits, 0, 0)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
    for (j, (&p, &v)) in dist.probs.iter().zip(&payoff.values).enumerate() {
        let root_p = p.sqrt();
        amps[2 * j] = Complex64::new(root_p * (1.0 - v).sqrt(), 0.0);
        amps[2 * j + 1] = Complex64::new(root_p * v.sqrt(), 0.0);
    }
    Ok(QuantumState { layout, amps })
}

/// Ancilla-1 probability mass: `μ = ⟨χ|(I ⊗ |1⟩⟨1|)|χ⟩`.
pub fn exact_mu(state: &QuantumState) -> f64 {
    neumaier_sum(
        state
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & 1 == 1)
            .map(|(_, a)| a.norm_sqr()),
    )
}

/// `V = I - 2·I⊗|1⟩⟨1|`: flips the sign of every ancilla-1 amplitude.
pub fn apply_v(state: &mut QuantumState) {
    for a in state.amps.iter_mut().skip(1).step_by(2) {
        *a = -*a;
    }
}

/// `Z = I - 2|0…0⟩⟨0…0|`: flips the sign of the all-zeros amplitude.
pub fn apply_z(state: &mut QuantumState) {
    state.amps[0] = -state.amps[0];
}

/// `U = I - 2|χ⟩⟨χ|` via the projector formula: `ψ → ψ - 2⟨χ|ψ⟩χ`.
pub fn apply_u(state: &mut QuantumState, chi: &QuantumState) -> Result<()> {
    if state.layout != chi.layout {
        return Err(Error::domain(
            "state and χ have different register layouts".to_string(),
        ));
    }
    let overlap = chi.inner(state);
    let twice = 2.0 * overlap;
    for (a, c) in state.amps.iter_mut().zip(&chi.amps) {
        *a -= twice * c;
    }
    Ok(())
}

/// One Grover step `Q = U V U V` (rightmost factor applied first).
pub fn apply_q(state: &mut QuantumState, chi: &QuantumState) -> Result<()> {
    apply_v(state);
    apply_u(state, chi)?;
    apply_v(state);
    apply_u(state, chi)?;
    Ok(())
}

/// Angle from mean: `θ = 2·arccos(1 - 2μ) ∈ [0, 2π]`.
pub fn mu_to_theta(mu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::domain(format!("mu must be in [0,1], got {mu}")));
    }
    Ok(2.0 * (1.0 - 2.0 * mu).acos())
}

/// Mean from angle: `μ = (1 - cos(θ/2))/2`, the inverse of [`mu_to_theta`].
pub fn theta_to_mu(theta: f64) -> Result<f64> {
    if !(0.0..=2.0 * std::f64::consts::PI + 1e-12).contains(&theta) {
        return Err(Error::domain(format!(
            "theta must be in [0, 2π], got {theta}"
        )));
    }
    Ok((1.0 - (theta / 2.0).cos()) / 2.0)
}

/// The state-preparation unitary `F = R (G ⊗ I)` as an explicit circuit:
/// the Grover-Rudolph controlled rotations followed by the payoff rotation.
/// Provides forward/inverse application on a scratchless register, which
/// realizes `U = F Z F†` without the projector shortcut.
pub struct StatePrepCircuit {
    index_qubits: u32,
    /// Split angles per level, `angles[m][k]` controls index qubit `m`
    /// (counted from the most significant) on prefix `k`.
    gr_angles: Vec<Vec<f64>>,
    /// Ancilla rotation `(cos, sin) = (√(1-ṽ_j), √(ṽ_j))` per grid point.
    rotation: Vec<(f64, f64)>,
}

impl StatePrepCircuit {
    pub fn new(dist: &DiscreteDist, payoff: &QuantizedPayoff) -> Result<Self> {
        if dist.grid != payoff.grid {
            return Err(Error::domain(
                "distribution and payoff are tabulated on different grids".to_string(),
            ));
        }
        Ok(StatePrepCircuit {
            index_qubits: dist.grid.qubits,
            gr_angles: grover_rudolph_angles(dist),
            rotation: payoff
                .values
                .iter()
                .map(|&v| ((1.0 - v).sqrt(), v.sqrt()))
                .collect(),
        })
    }

    fn check_layout(&self, state: &QuantumState) -> Result<()> {
        if state.layout.index_qubits != self.index_qubits
            || state.layout.scratch_qubits != 0
            || state.layout.phase_qubits != 0
        {
            return Err(Error::domain(
                "state layout does not match the preparation circuit".to_string(),
            ));
        }
        Ok(())
    }

    /// Rotate index qubit `m` (MSB-first) by the level-`m` angles. `inverse`
    /// applies the transposed rotations.
    fn apply_level(&self, state: &mut QuantumState, m: usize, inverse: bool) {
        let n = self.index_qubits;
        let bit = 1usize << (1 + (n - 1 - m as u32));
        let angles = &self.gr_angles[m];
        let dim = state.layout.dim();
        for i in 0..dim {
            if i & bit != 0 {
                continue;
            }
            let j = state.layout.index_of(i);
            let k = j >> (n - m as u32);
            let (c, s) = (angles[k].cos(), angles[k].sin());
            let hi = i | bit;
            let a0 = state.amps[i];
            let a1 = state.amps[hi];
            if inverse {
                state.amps[i] = c * a0 + s * a1;
                state.amps[hi] = -s * a0 + c * a1;
            } else {
                state.amps[i] = c * a0 - s * a1;
                state.amps[hi] = s * a0 + c * a1;
            }
        }
    }

    fn apply_payoff_rotation(&self, state: &mut QuantumState, inverse: bool) {
        let dim = state.layout.dim();
        for i in (0..dim).step_by(2) {
            let j = state.layout.index_of(i);
            let (c, s) = self.rotation[j];
            let a0 = state.amps[i];
            let a1 = state.amps[i + 1];
            if inverse {
                state.amps[i] = c * a0 + s * a1;
                state.amps[i + 1] = -s * a0 + c * a1;
            } else {
                state.amps[i] = c * a0 - s * a1;
                state.amps[i + 1] = s * a0 + c * a1;
            }
        }
    }

    /// `F|ψ⟩`.
    pub fn apply_forward(&self, state: &mut QuantumState) -> Result<()> {
        self.check_layout(state)?;
        for m in 0..self.gr_angles.len() {
            self.apply_level(state, m, false);
        }
        self.apply_payoff_rotation(state, false);
        Ok(())
    }

    /// `F†|ψ⟩`.
    pub fn apply_inverse(&self, state: &mut QuantumState) -> Result<()> {
        self.check_layout(state)?;
        self.apply_payoff_rotation(state, true);
        for m in (0..self.gr_angles.len()).rev() {
            self.apply_level(state, m, true);
        }
        Ok(())
    }

    /// `U = F Z F†`, the circuit route to the reflection about `|χ⟩`.
    pub fn apply_u_circuit(&self, state: &mut QuantumState) -> Result<()> {
        self.apply_inverse(state)?;
        apply_z(state);
        self.apply_forward(state)
    }
}

/// Rotate the ancilla through an explicit payoff register: compute
/// `|j⟩|0⟩ → |j⟩|code_j⟩`, rotate the ancilla by the value the register
/// holds, then uncompute the register.
///
/// Requires `scratch_qubits = bits + 1` (one extra qubit so the saturating
/// top code fits) and a scratch register in `|0…0⟩`; all scratch amplitude
/// returns there exactly.
pub fn apply_r_with_register(state: &mut QuantumState, payoff: &QuantizedPayoff) -> Result<()> {
    let layout = state.layout;
    if layout.index_qubits != payoff.grid.qubits {
        return Err(Error::domain(
            "payoff grid does not match the index register".to_string(),
        ));
    }
    if layout.scratch_qubits != payoff.fp.bits + 1 {
        return Err(Error::domain(format!(
            "payoff register needs {} scratch qubits, layout has {}",
            payoff.fp.bits + 1,
            layout.scratch_qubits
        )));
    }
    let stray = scratch_stray_mass(state);
    if stray > 1e-12 {
        return Err(Error::domain(format!(
            "scratch register must enter in |0…0⟩ (stray mass {stray:.3e})"
        )));
    }

    let compute = |state: &mut QuantumState| {
        // Transposition |j, 0, b⟩ ↔ |j, code_j, b⟩; exact permutation.
        for j in 0..payoff.codes.len() {
            let code = payoff.codes[j] as usize;
            if code == 0 {
                continue;
            }
            for b in 0..2usize {
                let src = (j << (1 + layout.scratch_qubits)) | b;
                let dst = src | (code << 1);
                state.amps.swap(src, dst);
            }
        }
    };

    compute(state);
    // Ancilla rotation controlled by the value in the payoff register only.
    let denom = (1u64 << payoff.fp.bits) as f64;
    let dim = layout.dim();
    for i in (0..dim).step_by(2) {
        let sc = layout.scratch_of(i);
        let v = (sc as f64 / denom).min(1.0);
        let (c, s) = ((1.0 - v).sqrt(), v.sqrt());
        let a0 = state.amps[i];
        let a1 = state.amps[i + 1];
        state.amps[i] = c * a0 - s * a1;
        state.amps[i + 1] = s * a0 + c * a1;
    }
    compute(state);
    Ok(())
}

/// Total probability mass outside the scratch = |0…0⟩ subspace.
pub fn scratch_stray_mass(state: &QuantumState) -> f64 {
    neumaier_sum(
        state
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| state.layout.scratch_of(*i) != 0)
            .map(|(_, a)| a.norm_sqr()),
    )
}

/// Purity `Tr ρ²` of the reduced state after tracing out the scratch
/// register. Equals 1 exactly when scratch is unentangled.
pub fn scratch_trace_purity(state: &QuantumState) -> f64 {
    let layout = state.layout;
    let outer = 1usize << (layout.index_qubits + 1);
    let inner = 1usize << layout.scratch_qubits;
    // rho[(u,u')] = sum_sc psi[u,sc] conj(psi[u',sc]); u = (j,b).
    let at = |u: usize, sc: usize| {
        let j = u >> 1;
        let b = u & 1;
        state.amps[(j << (1 + layout.scratch_qubits)) | (sc << 1) | b]
    };
    let mut purity = 0.0;
    for u in 0..outer {
        for up in 0..outer {
            let mut rho = Complex64::new(0.0, 0.0);
            for sc in 0..inner {
                rho += at(u, sc) * at(up, sc).conj();
            }
            purity += rho.norm_sqr();
        }
    }
    purity
}

/// Drop the scratch register of a scratch-clean state.
pub fn discard_scratch(state: &QuantumState) -> Result<QuantumState> {
    let stray = scratch_stray_mass(state);
    if stray > 1e-12 {
        return Err(Error::domain(format!(
            "cannot discard an entangled scratch register (stray mass {stray:.3e})"
        )));
    }
    let layout = RegisterLayout::new(state.layout.index_qubits, 0, state.layout.phase_qubits)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
    let shift = state.layout.scratch_qubits;
    for (i, a) in amps.iter_mut().enumerate() {
        let b = i & 1;
        let rest = i >> 1;
        *a = state.amps[(rest << (1 + shift)) | b];
    }
    Ok(QuantumState { layout, amps })
}

/// Diagnostics for the rotation structure of Q on the 2-plane
/// `span{|χ⟩, V|χ⟩}`.
#[derive(Debug, Clone, Copy)]
pub struct GroverDiagnostics {
    /// Numerically determined eigenphase magnitude of Q, in `[0, π]`.
    pub eigenphase: f64,
    /// The canonical θ ∈ [0, 2π] with `1 - 2μ = cos(θ/2)`; equals the
    /// eigenphase for μ ≤ 1/2 and its `2π` complement above.
    pub canonical_theta: f64,
    /// θ under the alternative reading that the eigenphase is `2θ`.
    pub half_convention_theta: f64,
    /// Exact ancilla-1 mass of `|χ⟩`.
    pub mu: f64,
    /// Phase φ of the `|χ⊥⟩` component in `V|χ⟩` (unconstrained; recorded
    /// only).
    pub perp_phase: f64,
}

/// Measure the rotation Q performs on `span{|χ⟩, V|χ⟩}` and report the angle
/// under both conventions. The canonical θ is pinned by requiring
/// `theta_to_mu(θ) = exact_mu(χ)`.
pub fn grover_diagnostics(chi: &QuantumState) -> Result<GroverDiagnostics> {
    let mu = exact_mu(chi);
    let mut v_chi = chi.clone();
    apply_v(&mut v_chi);
    // Orthonormalize {chi, V chi}.
    let overlap = chi.inner(&v_chi);
    let mut perp = v_chi.clone();
    for (a, c) in perp.amps.iter_mut().zip(&chi.amps) {
        *a -= overlap * c;
    }
    let perp_norm = perp.norm_sq().sqrt();
    if perp_norm < 1e-9 {
        // V fixes chi (mu = 0) or negates it (mu = 1): Q acts as identity up
        // to phase; eigenphase 0 resp. 2pi under the canonical convention.
        let canonical = mu_to_theta(mu)?;
        return Ok(GroverDiagnostics {
            eigenphase: 0.0,
            canonical_theta: canonical,
            half_convention_theta: 0.0,
            mu,
            perp_phase: 0.0,
        });
    }
    for a in perp.amps.iter_mut() {
        *a /= perp_norm;
    }
    let perp_phase = perp.inner(&v_chi).arg();

    // 2x2 restriction of Q in the orthonormal basis {chi, perp}.
    let mut q_chi = chi.clone();
    apply_q(&mut q_chi, chi)?;
    let mut q_perp = perp.clone();
    apply_q(&mut q_perp, chi)?;
    let m00 = chi.inner(&q_chi);
    let m01 = chi.inner(&q_perp);
    let m10 = perp.inner(&q_chi);
    let m11 = perp.inner(&q_perp);
    let trace = m00 + m11;
    let det = m00 * m11 - m01 * m10;
    let disc = (trace * trace - 4.0 * det).sqrt();
    let lambda = (trace + disc) / 2.0;
    let eigenphase = lambda.arg().abs();

    let canonical = if mu <= 0.5 {
        eigenphase
    } else {
        2.0 * std::f64::consts::PI - eigenphase
    };
    Ok(GroverDiagnostics {
        eigenphase,
        canonical_theta: canonical,
        half_convention_theta: eigenphase / 2.0,
        mu,
        perp_phase,
    })
}

/// Compare two states up to a global phase.
pub fn states_equal_up_to_phase(a: &QuantumState, b: &QuantumState, tol: f64) -> bool {
    if a.layout != b.layout {
        return false;
    }
    let (pivot, _) = a
        .amps
        .iter()
        .enumerate()
        .max_by(|(_, x), (_, y)| x.norm_sqr().total_cmp(&y.norm_sqr()))
        .expect("nonempty state");
    if a.amps[pivot].norm_sqr() < tol * tol {
        return b.amps.iter().all(|x| x.norm_sqr() < tol * tol);
    }
    let phase = b.amps[pivot] / a.amps[pivot];
    let phase = phase / phase.norm();
    a.amps
        .iter()
        .zip(&b.amps)
        .all(|(x, y)| (phase * x - y).norm() <= tol)
}

/// Debug dump: one row per basis state, columns `basis_index,re,im`.
pub fn write_state_csv<W: Write>(state: &QuantumState, out: &mut W) -> Result<()> {
    writeln!(out, "basis_index,re,im")?;
    for (i, a) in state.amps.iter().enumerate() {
        writeln!(out, "{i},{},{}", a.re, a.im)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bsm::MarketParams;
    use crate::dist::{dist_from_probs, gaussian_grid, DiscreteDist};
    use crate::payoff::{euro_payoff, quantize_payoff};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn euro_chi(n: u32, bits: u32) -> (DiscreteDist, QuantizedPayoff, QuantumState) {
        let p = MarketParams::new(100.0, 100.0, 0.05, 0.2, 1.0, 0.1).unwrap();
        let dist = gaussian_grid(p.maturity, n, 4.0).unwrap();
        let payoff = euro_payoff(&p);
        let v_max = payoff(dist.grid.x_max);
        let q = quantize_payoff(&payoff, dist.grid, bits, v_max).unwrap();
        let chi = prepare_chi(&dist, &q).unwrap();
        (dist, q, chi)
    }

    fn random_state(layout: RegisterLayout, seed: u64) -> QuantumState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<Complex64> = (0..layout.dim())
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in amps.iter_mut() {
            *a /= norm;
        }
        QuantumState { layout, amps }
    }

    #[test]
    fn prepare_chi_mu_identity() {
        let (dist, q, chi) = euro_chi(8, 16);
        let direct: f64 = q.expectation(&dist.probs);
        assert!((exact_mu(&chi) - direct).abs() < 1e-12);
        assert!((chi.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prepare_chi_degenerate_payoffs() {
        let dist = gaussian_grid(1.0, 4, 4.0).unwrap();
        let zero = quantize_payoff(|_| 0.0, dist.grid, 8, 1.0).unwrap();
        let chi = prepare_chi(&dist, &zero).unwrap();
        assert_eq!(exact_mu(&chi), 0.0);
        for (j, &p) in dist.probs.iter().enumerate() {
            assert!((chi.amps[2 * j].re - p.sqrt()).abs() < 1e-14);
            assert_eq!(chi.amps[2 * j + 1], Complex64::new(0.0, 0.0));
        }
        let one = quantize_payoff(|_| 1.0, dist.grid, 8, 1.0).unwrap();
        let chi = prepare_chi(&dist, &one).unwrap();
        assert!((exact_mu(&chi) - 1.0).abs() < 1e-14);
        for j in 0..dist.probs.len() {
            assert_eq!(chi.amps[2 * j], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn prepare_chi_rejects_grid_mismatch() {
        let dist = gaussian_grid(1.0, 4, 4.0).unwrap();
        let other = gaussian_grid(1.0, 5, 4.0).unwrap();
        let q = quantize_payoff(|_| 0.5, other.grid, 8, 1.0).unwrap();
        assert!(prepare_chi(&dist, &q).is_err());
    }

    #[test]
    fn exact_mu_product_states() {
        let layout = RegisterLayout::new(2, 0, 0).unwrap();
        let mut state = QuantumState::zero(layout);
        assert_eq!(exact_mu(&state), 0.0);
        // (|0> + |1>)/sqrt2 on the ancilla of basis index 0.
        state.amps[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        state.amps[1] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        assert!((exact_mu(&state) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn v_is_an_involution_and_matches_expectation() {
        let (_, _, chi) = euro_chi(6, 12);
        let mu = exact_mu(&chi);
        let mut v_chi = chi.clone();
        apply_v(&mut v_chi);
        let expect = chi.inner(&v_chi).re;
        assert!((expect - (1.0 - 2.0 * mu)).abs() < 1e-12);
        apply_v(&mut v_chi);
        for (a, b) in v_chi.amps.iter().zip(&chi.amps) {
            assert!((a - b).norm() < 1e-14);
        }
        // Ancilla-|0> product state is untouched.
        let dist = gaussian_grid(1.0, 4, 4.0).unwrap();
        let zero = quantize_payoff(|_| 0.0, dist.grid, 8, 1.0).unwrap();
        let mut fixed = prepare_chi(&dist, &zero).unwrap();
        let before = fixed.clone();
        apply_v(&mut fixed);
        assert_eq!(fixed.amps, before.amps);
    }

    #[test]
    fn u_reflects_chi_and_fixes_orthogonal_states() {
        let (_, _, chi) = euro_chi(5, 10);
        let mut state = chi.clone();
        apply_u(&mut state, &chi).unwrap();
        for (a, b) in state.amps.iter().zip(&chi.amps) {
            assert!((a + b).norm() < 1e-12);
        }
        // Project a random state orthogonal to chi; U must fix it.
        let mut orth = random_state(chi.layout, 3);
        let c = chi.inner(&orth);
        for (a, x) in orth.amps.iter_mut().zip(&chi.amps) {
            *a -= c * x;
        }
        let before = orth.clone();
        apply_u(&mut orth, &chi).unwrap();
        for (a, b) in orth.amps.iter().zip(&before.amps) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn unitarity_and_involutions_on_random_states() {
        let (_, _, chi) = euro_chi(5, 10);
        for seed in 0..5u64 {
            let mut state = random_state(chi.layout, seed);
            let before = state.clone();
            apply_v(&mut state);
            apply_v(&mut state);
            apply_z(&mut state);
            apply_z(&mut state);
            apply_u(&mut state, &chi).unwrap();
            assert!((state.norm_sq() - 1.0).abs() < 1e-10);
            apply_u(&mut state, &chi).unwrap();
            for (a, b) in state.amps.iter().zip(&before.amps) {
                assert!((a - b).norm() < 1e-12);
            }
            apply_q(&mut state, &chi).unwrap();
            assert!((state.norm_sq() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn circuit_u_matches_projector_u() {
        let (dist, q, chi) = euro_chi(5, 8);
        let circuit = StatePrepCircuit::new(&dist, &q).unwrap();
        // F|0...0> = chi.
        let mut from_zero = QuantumState::zero(chi.layout);
        circuit.apply_forward(&mut from_zero).unwrap();
        for (a, b) in from_zero.amps.iter().zip(&chi.amps) {
            assert!((a - b).norm() < 1e-12);
        }
        for seed in 0..4u64 {
            let mut a = random_state(chi.layout, 100 + seed);
            let mut b = a.clone();
            apply_u(&mut a, &chi).unwrap();
            circuit.apply_u_circuit(&mut b).unwrap();
            for (x, y) in a.amps.iter().zip(&b.amps) {
                assert!((x - y).norm() < 1e-12, "projector and circuit U disagree");
            }
        }
    }

    #[test]
    fn q_is_identity_on_chi_at_mu_endpoints() {
        let dist = gaussian_grid(1.0, 4, 4.0).unwrap();
        for v in [0.0, 1.0] {
            let q = quantize_payoff(move |_| v, dist.grid, 8, 1.0).unwrap();
            let chi = prepare_chi(&dist, &q).unwrap();
            let mut state = chi.clone();
            apply_q(&mut state, &chi).unwrap();
            assert!(states_equal_up_to_phase(&chi, &state, 1e-12));
        }
    }

    #[test]
    fn q_preserves_the_two_plane() {
        let (_, _, chi) = euro_chi(5, 10);
        let mut v_chi = chi.clone();
        apply_v(&mut v_chi);
        // psi = normalized combination of chi and V chi.
        let mut psi = chi.clone();
        for (a, b) in psi.amps.iter_mut().zip(&v_chi.amps) {
            *a = 0.6 * *a + Complex64::new(0.0, 0.8) * b;
        }
        let norm = psi.norm_sq().sqrt();
        for a in psi.amps.iter_mut() {
            *a /= norm;
        }
        apply_q(&mut psi, &chi).unwrap();
        // Residual after projecting onto the orthonormalized plane basis.
        let overlap = chi.inner(&v_chi);
        let mut perp = v_chi.clone();
        for (a, c) in perp.amps.iter_mut().zip(&chi.amps) {
            *a -= overlap * c;
        }
        let pn = perp.norm_sq().sqrt();
        for a in perp.amps.iter_mut() {
            *a /= pn;
        }
        let c1 = chi.inner(&psi);
        let c2 = perp.inner(&psi);
        let mut residual = psi.clone();
        for ((a, x), y) in residual.amps.iter_mut().zip(&chi.amps).zip(&perp.amps) {
            *a -= c1 * x + c2 * y;
        }
        assert!(residual.norm_sq() < 1e-10);
    }

    #[test]
    fn mu_theta_round_trip() {
        assert_eq!(mu_to_theta(0.0).unwrap(), 0.0);
        assert!((mu_to_theta(1.0).unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((mu_to_theta(0.5).unwrap() - std::f64::consts::PI).abs() < 1e-14);
        // Frozen: 2*arccos(0.79).
        assert!((mu_to_theta(0.105).unwrap() - 1.319_974_658_774_996_8).abs() < 1e-12);
        for mu in [0.0, 0.03, 0.2, 0.5, 0.77, 1.0] {
            let theta = mu_to_theta(mu).unwrap();
            assert!((theta_to_mu(theta).unwrap() - mu).abs() < 1e-13);
        }
        assert!(mu_to_theta(-0.1).is_err());
        assert!(mu_to_theta(1.1).is_err());
        assert!(theta_to_mu(-0.1).is_err());
        assert!(theta_to_mu(7.0).is_err());
    }

    #[test]
    fn eigenphase_matches_canonical_theta_across_mu_grid() {
        // Pins the phase convention: the eigenphase of Q reproduces exact_mu
        // through theta_to_mu for mu below 1/2 and its complement above.
        let dist = dist_from_probs(&[0.3, 0.2, 0.4, 0.1]).unwrap();
        let mut mu = 0.05;
        while mu <= 0.951 {
            let q = quantize_payoff(move |_| mu, dist.grid, 40, 1.0).unwrap();
            let chi = prepare_chi(&dist, &q).unwrap();
            let diag = grover_diagnostics(&chi).unwrap();
            let recovered = theta_to_mu(diag.canonical_theta).unwrap();
            assert!(
                (recovered - diag.mu).abs() < 1e-10,
                "mu {mu}: recovered {recovered} vs exact {}",
                diag.mu
            );
            // The half-angle reading fails everywhere except the endpoints;
            // both are reported so the discrepancy stays visible.
            if (0.1..0.9).contains(&mu) {
                let wrong = theta_to_mu(diag.half_convention_theta).unwrap();
                assert!((wrong - diag.mu).abs() > 1e-3);
            }
            mu += 0.05;
        }
    }

    #[test]
    fn r_with_register_matches_prepare_chi() {
        let p = MarketParams::new(100.0, 100.0, 0.05, 0.2, 1.0, 0.1).unwrap();
        let dist = gaussian_grid(p.maturity, 5, 4.0).unwrap();
        let payoff = euro_payoff(&p);
        let v_max = payoff(dist.grid.x_max);
        let q = quantize_payoff(&payoff, dist.grid, 6, v_max).unwrap();

        let layout = RegisterLayout::new(5, 7, 0).unwrap();
        let mut state = QuantumState::zero(layout);
        // Load the index register with the distribution amplitudes.
        state.amps[0] = Complex64::new(0.0, 0.0);
        for (j, &pj) in dist.probs.iter().enumerate() {
            state.amps[j << (1 + 7)] = Complex64::new(pj.sqrt(), 0.0);
        }
        apply_r_with_register(&mut state, &q).unwrap();

        assert!(scratch_stray_mass(&state) <= 1e-12);
        assert!(scratch_trace_purity(&state) >= 1.0 - 1e-12);
        let reduced = discard_scratch(&state).unwrap();
        let chi = prepare_chi(&dist, &q).unwrap();
        for (a, b) in reduced.amps.iter().zip(&chi.amps) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((exact_mu(&reduced) - exact_mu(&chi)).abs() < 1e-13);
    }

    #[test]
    fn r_with_register_rejects_dirty_scratch() {
        let dist = gaussian_grid(1.0, 3, 4.0).unwrap();
        let q = quantize_payoff(|_| 0.4, dist.grid, 4, 1.0).unwrap();
        let layout = RegisterLayout::new(3, 5, 0).unwrap();
        let mut state = QuantumState::zero(layout);
        state.amps[0] = Complex64::new(0.0, 0.0);
        state.amps[1 << 1] = Complex64::new(1.0, 0.0); // scratch = 1
        assert!(apply_r_with_register(&mut state, &q).is_err());
    }

    #[test]
    fn r_with_register_zero_payoff_roundtrips() {
        let dist = gaussian_grid(1.0, 3, 4.0).unwrap();
        let q = quantize_payoff(|_| 0.0, dist.grid, 4, 1.0).unwrap();
        let layout = RegisterLayout::new(3, 5, 0).unwrap();
        let mut state = QuantumState::zero(layout);
        state.amps[0] = Complex64::new(0.0, 0.0);
        for (j, &pj) in dist.probs.iter().enumerate() {
            state.amps[j << 6] = Complex64::new(pj.sqrt(), 0.0);
        }
        let before = state.clone();
        apply_r_with_register(&mut state, &q).unwrap();
        for (a, b) in state.amps.iter().zip(&before.amps) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn layout_cap_enforced() {
        assert!(RegisterLayout::new(20, 0, 10).is_err());
        assert!(RegisterLayout::new(10, 0, 10).is_ok());
    }

    #[test]
    fn state_csv_dump_shape() {
        let layout = RegisterLayout::new(1, 0, 0).unwrap();
        let state = QuantumState::zero(layout);
        let mut buf = Vec::new();
        write_state_csv(&state, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("basis_index,re,im\n"));
        assert_eq!(text.lines().count(), 5);
    }
}
