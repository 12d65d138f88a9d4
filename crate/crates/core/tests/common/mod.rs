//! Independent oracles shared by the integration suites.
//!
//! Everything in here deliberately avoids the library's analytic pricing
//! path: prices come from direct numerical quadrature of the risk-neutral
//! expectation, so agreement is evidence rather than tautology.

// Each test target compiles this module separately and uses a subset of it.
#![allow(dead_code)]

use qpricer::bsm::MarketParams;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            acc += w * f(mid + half * x);
        }
        total += acc * half;
    }
    total
}

/// Call price by quadrature of the discounted risk-neutral expectation
/// `e^(-rT) ∫ max(0, S0 e^(σ√T z + (r-σ²/2)T) - K) φ(z) dz`.
pub fn quadrature_call_price(p: &MarketParams) -> f64 {
    let sig_sqrt_t = p.vol * p.maturity.sqrt();
    let drift = (p.rate - 0.5 * p.vol * p.vol) * p.maturity;
    // Kink: the z above which the payoff is positive.
    let z_star = ((p.strike / p.s0).ln() - drift) / sig_sqrt_t;
    let z_hi = z_star.max(0.0) + 45.0;
    let density = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let integrand = |z: f64| (p.s0 * (sig_sqrt_t * z + drift).exp() - p.strike) * density(z);
    let integral = integrate(integrand, z_star, z_hi, 40, 40);
    (-p.rate * p.maturity).exp() * integral
}

/// Quadrature of the payoff's second moment, for variance cross-checks.
pub fn quadrature_payoff_variance(p: &MarketParams) -> f64 {
    let sig_sqrt_t = p.vol * p.maturity.sqrt();
    let drift = (p.rate - 0.5 * p.vol * p.vol) * p.maturity;
    let z_star = ((p.strike / p.s0).ln() - drift) / sig_sqrt_t;
    let z_hi = z_star.max(0.0) + 45.0;
    let density = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let payoff = |z: f64| p.s0 * (sig_sqrt_t * z + drift).exp() - p.strike;
    let mean = integrate(|z| payoff(z) * density(z), z_star, z_hi, 40, 40);
    let second = integrate(|z| payoff(z) * payoff(z) * density(z), z_star, z_hi, 40, 40);
    second - mean * mean
}
