//! Discretized Gaussian distributions and Grover-Rudolph amplitude loading.
//!
//! The Brownian increment over time `T` has density
//! `p_T(x) = exp(-x²/2T)/√(2πT)`. The density is truncated to
//! `[-x_max, x_max]` with `x_max = c·√T` and sampled at `2^n` points
//! `x_j = -x_max + j·Δx`, `Δx = 2·x_max/(2^n - 1)`, giving probabilities
//! `p_j = p_T(x_j)/C` with `C = Σ_j p_T(x_j)`.
//!
//! The Grover-Rudolph construction loads `Σ_j √p_j |j⟩` one qubit at a time.
//! At level `m` the coarse probabilities are
//!
//! ```text
//! p_k^(m) = Σ_{j = k·2^(n-m)}^{(k+1)·2^(n-m) - 1} p_j
//! ```
//!
//! and each node splits by the angle `θ_k^(m) = arccos √(p_2k^(m+1)/p_k^(m))`,
//! sending `cos θ` of the amplitude to the left child and `sin θ` to the
//! right. The builder simulates the resulting state directly (no gate
//! synthesis); its classical cost is linear in the state size even though the
//! circuit it models has depth O(n).

use num_complex::Complex64;
use std::io::Write;

use crate::error::{Error, Result};

/// A `2^n`-point symmetric grid on `[-x_max, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub qubits: u32,
    pub x_max: f64,
    pub delta_x: f64,
    /// Cutoff multiplier `c` with `x_max = c·√T`.
    pub cutoff_mult: f64,
}

impl GridSpec {
    /// Number of grid points, `2^n`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        1usize << self.qubits
    }

    /// Grid point `x_j = -x_max + j·Δx`. The endpoints are included exactly.
    pub fn point(&self, j: usize) -> f64 {
        if j + 1 == self.len() {
            self.x_max
        } else {
            -self.x_max + j as f64 * self.delta_x
        }
    }
}

/// A normalized distribution over the grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDist {
    pub grid: GridSpec,
    pub probs: Vec<f64>,
    /// Normalization `C = Σ_j p_T(x_j)` of the raw density values.
    pub norm_const: f64,
}

/// Unit-norm amplitude vector, the simulated output of the loading circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    pub amps: Vec<Complex64>,
}

impl AmplitudeVector {
    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Result of the level-by-level state preparation, with the number of split
/// angles computed (Θ(2^n) in total).
#[derive(Debug, Clone, PartialEq)]
pub struct StatePrep {
    pub amps: AmplitudeVector,
    pub angle_ops: usize,
}

/// Discretize the centered Gaussian with variance `variance_time` onto a
/// `2^n`-point grid with cutoff `x_max = c·√variance_time`.
pub fn gaussian_grid(variance_time: f64, n: u32, c: f64) -> Result<DiscreteDist> {
    if !(variance_time.is_finite() && variance_time > 0.0) {
        return Err(Error::domain(format!(
            "variance_time must be > 0, got {variance_time}"
        )));
    }
    if n == 0 {
        return Err(Error::domain("grid needs at least 1 qubit".to_string()));
    }
    if n > 26 {
        return Err(Error::resource(format!(
            "grid of 2^{n} points exceeds the cap"
        )));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::domain(format!(
            "cutoff multiplier must be > 0, got {c}"
        )));
    }
    let x_max = c * variance_time.sqrt();
    let len = 1usize << n;
    let delta_x = 2.0 * x_max / (len as f64 - 1.0);
    let grid = GridSpec {
        qubits: n,
        x_max,
        delta_x,
        cutoff_mult: c,
    };
    let norm = 1.0 / (2.0 * std::f64::consts::PI * variance_time).sqrt();
    let mut raw: Vec<f64> = (0..len)
        .map(|j| {
            let x = grid.point(j);
            norm * (-x * x / (2.0 * variance_time)).exp()
        })
        .collect();
    // Enforce exact symmetry: x_j and x_{2^n-1-j} are reflections of each
    // other but the affine grid map rounds them slightly differently.
    for j in 0..len / 2 {
        let avg = 0.5 * (raw[j] + raw[len - 1 - j]);
        raw[j] = avg;
        raw[len - 1 - j] = avg;
    }
    let norm_const: f64 = raw.iter().sum();
    let probs = raw.iter().map(|&p| p / norm_const).collect();
    Ok(DiscreteDist {
        grid,
        probs,
        norm_const,
    })
}

fn level_probs_unchecked(d: &DiscreteDist, m: u32) -> Vec<f64> {
    let n = d.grid.qubits;
    let block = 1usize << (n - m);
    d.probs.chunks(block).map(|c| c.iter().sum()).collect()
}

/// Coarse probabilities `p_k^(m)` at level `m`, `1 ≤ m ≤ n`.
pub fn level_probs(d: &DiscreteDist, m: u32) -> Result<Vec<f64>> {
    if m < 1 || m > d.grid.qubits {
        return Err(Error::domain(format!(
            "level must be in 1..={}, got {m}",
            d.grid.qubits
        )));
    }
    Ok(level_probs_unchecked(d, m))
}

/// Build the amplitude vector `Σ √p_j |j⟩` by the level-by-level splitting
/// recursion.
///
/// A node with zero coarse probability (a dead branch) is split with
/// `f = 1/2`; the branch carries zero amplitude, so the choice never reaches
/// an observable.
pub fn grover_rudolph(d: &DiscreteDist) -> StatePrep {
    let n = d.grid.qubits;
    let mut level: Vec<f64> = vec![1.0];
    let mut prev_probs: Vec<f64> = vec![1.0];
    let mut angle_ops = 0usize;
    for m in 0..n {
        let next_probs = level_probs_unchecked(d, m + 1);
        let mut next = vec![0.0f64; 1 << (m + 1)];
        for (k, &amp) in level.iter().enumerate() {
            let parent = prev_probs[k];
            let f = if parent == 0.0 {
                0.5
            } else {
                (next_probs[2 * k] / parent).clamp(0.0, 1.0)
            };
            let theta = f.sqrt().acos();
            angle_ops += 1;
            next[2 * k] = amp * theta.cos();
            next[2 * k + 1] = amp * theta.sin();
        }
        level = next;
        prev_probs = next_probs;
    }
    let amps = level.iter().map(|&a| Complex64::new(a, 0.0)).collect();
    StatePrep {
        amps: AmplitudeVector { amps },
        angle_ops,
    }
}

/// Split angles `θ_k^(m) = arccos √f(k,m)` for every level, in the order the
/// loading circuit applies them. Used to replay the preparation as a unitary
/// on a full register.
pub fn grover_rudolph_angles(d: &DiscreteDist) -> Vec<Vec<f64>> {
    let n = d.grid.qubits;
    let mut prev_probs: Vec<f64> = vec![1.0];
    let mut levels = Vec::with_capacity(n as usize);
    for m in 0..n {
        let next_probs = level_probs_unchecked(d, m + 1);
        let angles: Vec<f64> = prev_probs
            .iter()
            .enumerate()
            .map(|(k, &parent)| {
                let f = if parent == 0.0 {
                    0.5
                } else {
                    (next_probs[2 * k] / parent).clamp(0.0, 1.0)
                };
                f.sqrt().acos()
            })
            .collect();
        levels.push(angles);
        prev_probs = next_probs;
    }
    levels
}

/// Write the distribution as CSV with columns `j,x_j,p_j`.
pub fn write_dist_csv<W: Write>(d: &DiscreteDist, out: &mut W) -> Result<()> {
    writeln!(out, "j,x_j,p_j")?;
    for (j, &p) in d.probs.iter().enumerate() {
        writeln!(out, "{j},{},{p}", d.grid.point(j))?;
    }
    Ok(())
}

/// Build a distribution directly from explicit probabilities (for tests and
/// synthetic inputs). Values are normalized; the grid is the unit interval
/// analogue of the Gaussian layout.
pub fn dist_from_probs(probs: &[f64]) -> Result<DiscreteDist> {
    let len = probs.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::domain(format!(
            "probability table length must be a power of two >= 2, got {len}"
        )));
    }
    if probs.iter().any(|&p| !(p.is_finite() && p >= 0.0)) {
        return Err(Error::domain(
            "probabilities must be finite and >= 0".to_string(),
        ));
    }
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return Err(Error::domain(
            "probabilities must not all be zero".to_string(),
        ));
    }
    let n = len.trailing_zeros();
    let x_max = 1.0;
    let grid = GridSpec {
        qubits: n,
        x_max,
        delta_x: 2.0 * x_max / (len as f64 - 1.0),
        cutoff_mult: 1.0,
    };
    Ok(DiscreteDist {
        grid,
        probs: probs.iter().map(|&p| p / total).collect(),
        norm_const: total,
    })
}
