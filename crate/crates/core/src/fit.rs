//! Long-range coefficient extraction: least squares of `E(r) = E₀ + C₃/r³ + C₆/r⁶`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongRangeFit {
    pub e0: f64,
    pub c3: f64,
    pub c6: f64,
    /// Root-mean-square residual of the fit.
    pub rms: f64,
}

/// Fit window in units of `r_B`.
pub const DEFAULT_WINDOW: (f64, f64) = (8.0, 25.0);

pub fn fit_inverse_powers(r: &[f64], e: &[f64]) -> Result<LongRangeFit> {
    fit_weighted(r, e, None)
}

/// Weighted least squares; columns are rescaled by the smallest `r` so the
/// normal problem stays well conditioned.
pub fn fit_weighted(r: &[f64], e: &[f64], w: Option<&[f64]>) -> Result<LongRangeFit> {
    if r.len() != e.len() || r.len() < 3 {
        return Err(Error::Domain(format!(
            "fit needs ≥ 3 matching points, got {}/{}",
            r.len(),
            e.len()
        )));
    }
    let r0 = r.iter().copied().fold(f64::INFINITY, f64::min);
    let n = r.len();
    let weight = |i: usize| w.map_or(1.0, |w| w[i].sqrt());
    let a = DMatrix::from_fn(n, 3, |i, j| weight(i) * (r0 / r[i]).powi(3 * j as i32));
    let b = DVector::from_fn(n, |i, _| weight(i) * e[i]);
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|m| Error::Domain(format!("fit solve failed: {m}")))?;
    let resid = &a * &x - &b;
    Ok(LongRangeFit {
        e0: x[0],
        c3: x[1] * r0.powi(3),
        c6: x[2] * r0.powi(6),
        rms: (resid.norm_squared() / n as f64).sqrt(),
    })
}

/// Evenly spaced grid over `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_coefficients() {
        let r = linspace(8.0, 25.0, 40);
        let e: Vec<f64> = r
            .iter()
            .map(|x| 2.0 - 0.25 / x.powi(3) + 1.5 / x.powi(6))
            .collect();
        let f = fit_inverse_powers(&r, &e).unwrap();
        assert!((f.e0 - 2.0).abs() < 1e-12);
        assert!((f.c3 + 0.25).abs() < 1e-9);
        assert!((f.c6 - 1.5).abs() < 1e-6);
    }
}
