//! Gauss-Hermite rules, normalized oscillator functions and a bounded scalar minimizer.

use std::num::NonZeroUsize;

use gauss_quad::hermite::GaussHermite;
use gauss_quad::legendre::GaussLegendre;

/// Gauss-Hermite nodes with both the `e^{−x²}` weights and the scaled weights
/// `λᵢ = wᵢ e^{xᵢ²}` used against products of oscillator functions.
#[derive(Debug, Clone)]
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub scaled: Vec<f64>,
}

impl HermiteRule {
    /// Nodes come from the Golub-Welsch solver; weights are rebuilt as
    /// `λᵢ = 1/(n φ_{n−1}(xᵢ)²)`, which stays finite where `e^{xᵢ²}` overflows.
    pub fn new(n: usize) -> HermiteRule {
        let n = n.max(1);
        let rule = GaussHermite::new(NonZeroUsize::new(n).expect("n ≥ 1"));
        let mut nodes: Vec<f64> = rule.nodes().copied().collect();
        nodes.sort_by(f64::total_cmp);
        let scaled: Vec<f64> = nodes
            .iter()
            .map(|&x| {
                let phi = hermite_functions(n - 1, x);
                1.0 / (n as f64 * phi[n - 1].powi(2))
            })
            .collect();
        let weights = nodes
            .iter()
            .zip(&scaled)
            .map(|(x, l)| l * (-x * x).exp())
            .collect();
        HermiteRule {
            nodes,
            weights,
            scaled,
        }
    }

    /// `∫ f(z) e^{−z²/2σ²}/(√(2π)σ) dz`.
    pub fn gaussian_average(&self, sigma: f64, f: impl Fn(f64) -> f64) -> f64 {
        let s = std::f64::consts::SQRT_2 * sigma;
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(s * x))
            .sum();
        sum / std::f64::consts::PI.sqrt()
    }
}

/// Normalized oscillator functions `φ₀(x) … φ_nmax(x)` with `φ_n = H_n e^{−x²/2}/√(2ⁿn!√π)`.
pub fn hermite_functions(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp());
    if nmax >= 1 {
        out.push(std::f64::consts::SQRT_2 * x * out[0]);
    }
    for n in 1..nmax {
        let k = n as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * x * out[n] - (k / (k + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Gauss-Legendre integral of `f` over `[a, b]`.
pub fn legendre_integral(n: usize, a: f64, b: f64, f: impl FnMut(f64) -> f64) -> f64 {
    GaussLegendre::new(NonZeroUsize::new(n.max(1)).expect("n ≥ 1")).integrate(a, b, f)
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`; returns `(x, f(x))`.
pub fn minimize_bounded(mut a: f64, mut b: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}
