//! Perturbative long-range coefficient tables for the sixteen lowest pair
//! states, at zero field and in a weak DC field, together with the
//! bookkeeping that matches numerically fitted tracks to table rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{linspace, LongRangeFit};
use crate::pair::{bare_surfaces_in, fit_tracks, PairBasis, SurfaceOptions};
use crate::rotor::DipoleMoments;
use crate::surface::{Sigma, StateLabel, Surface};

/// One zero-field row: `E = E⁰ + C₃/r³ + C₆/r⁶` on the collision axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroFieldRow {
    pub n: u32,
    pub jtot: u32,
    pub y: i32,
    pub sigma: Sigma,
    pub term: &'static str,
    pub e0: f64,
    pub c3: f64,
    /// `C₆ · 6B/d⁴`.
    pub c6x6: f64,
}

pub fn zero_field_table() -> Vec<ZeroFieldRow> {
    use Sigma::{Minus as M, Plus as P};
    let s3 = 3f64.sqrt();
    let rows: [(u32, u32, i32, Sigma, &str, f64, f64, f64); 16] = [
        (0, 0, 0, P, "Sigma_g", 0.0, 0.0, -1.0),
        (1, 1, 0, P, "Sigma_u", 2.0, -2.0 / 3.0, -22.0 / 45.0),
        (2, 1, 1, M, "Pi_g", 2.0, -1.0 / 3.0, -19.0 / 45.0),
        (3, 1, -1, M, "Pi_g", 2.0, -1.0 / 3.0, -19.0 / 45.0),
        (4, 1, 1, P, "Pi_u", 2.0, 1.0 / 3.0, -19.0 / 45.0),
        (5, 1, -1, P, "Pi_u", 2.0, 1.0 / 3.0, -19.0 / 45.0),
        (6, 1, 0, M, "Sigma_g", 2.0, 2.0 / 3.0, -22.0 / 45.0),
        (7, 2, 0, P, "Sigma_g", 4.0, 0.0, -(48.0 - 39.0 * s3) / 50.0),
        (8, 2, 0, P, "Sigma_g", 4.0, 0.0, -(48.0 + 39.0 * s3) / 50.0),
        (9, 2, 1, M, "Pi_u", 4.0, 0.0, -39.0 / 20.0),
        (10, 2, -1, M, "Pi_u", 4.0, 0.0, -39.0 / 20.0),
        (11, 2, 2, P, "Delta_g", 4.0, 0.0, -24.0 / 25.0),
        (12, 2, -2, P, "Delta_g", 4.0, 0.0, -24.0 / 25.0),
        (13, 2, 1, P, "Pi_g", 4.0, 0.0, -51.0 / 25.0),
        (14, 2, -1, P, "Pi_g", 4.0, 0.0, -51.0 / 25.0),
        (15, 2, 0, M, "Sigma_u", 4.0, 0.0, -6.0 / 25.0),
    ];
    rows.iter()
        .map(|&(n, jtot, y, sigma, term, e0, c3, c6x6)| ZeroFieldRow {
            n,
            jtot,
            y,
            sigma,
            term,
            e0,
            c3,
            c6x6,
        })
        .collect()
}

/// Auxiliary angular quantities of the DC table at one polar angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DcAux {
    /// `Υ = 1 − 3cos²θ`.
    pub upsilon: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    /// `tan ξ = (14 − Υ)(2 + Υ) / 26(1 + Υ)`.
    pub xi: f64,
    /// `cos(ξ/2) + sin(ξ/2)`.
    pub c_plus: f64,
    /// `cos(ξ/2) − sin(ξ/2)`.
    pub c_minus: f64,
}

impl DcAux {
    pub fn new(beta: f64, theta: f64) -> DcAux {
        let u = 1.0 - 3.0 * theta.cos().powi(2);
        let m = DipoleMoments::perturbative(beta);
        let ang = 2.0 - u - u * u;
        let a1 = if ang.abs() < 1e-15 {
            0.0
        } else {
            40.0 * ang * (m.f0 * m.f1 + m.f2 * m.g0).powi(2) / (beta * beta)
        };
        let a2 = 33.0 + 6.0 * u - u * u / 2.0;
        let a3 = (26.0 * (1.0 + u)).hypot((14.0 - u) * (2.0 + u)) / 2.0;
        let xi = mixing_angle(u);
        let (c_plus, c_minus) = mixing_coefficients(u);
        DcAux {
            upsilon: u,
            a1,
            a2,
            a3,
            xi,
            c_plus,
            c_minus,
        }
    }
}

/// `ξ(Υ)` on the branch continuous through `Υ = −1`.
pub fn mixing_angle(upsilon: f64) -> f64 {
    ((14.0 - upsilon) * (2.0 + upsilon)).atan2(26.0 * (1.0 + upsilon))
}

/// `c±(θ) = cos(ξ/2) ± sin(ξ/2)` as a function of `Υ`.
pub fn mixing_coefficients(upsilon: f64) -> (f64, f64) {
    let (s, c) = (mixing_angle(upsilon) / 2.0).sin_cos();
    (c + s, c - s)
}

/// One DC row: `E = E⁰ + C₃h(θ)/r³ + C₆(θ)/r⁶` with `E⁰` relative to `2E_{0,0}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DcRow {
    pub n: u32,
    pub jtot: u32,
    /// `|M₁| + |M₂|`.
    pub m: u32,
    /// Sub-index tag `"", "-", "+", "0"`.
    pub mu: &'static str,
    pub sigma: Sigma,
    pub e0: f64,
    /// Full `1/r³` coefficient including its angular factor.
    pub c3: f64,
    /// `C₆(θ) · 6B/d⁴`.
    pub c6x6: f64,
}

/// The DC table as printed, with Table-1 moments and `ħω̄ = 2B + Bβ²/6`, `ħδ = 3Bβ²/20`.
pub fn dc_table(beta: f64, theta: f64) -> Vec<DcRow> {
    use Sigma::{Minus as M, Plus as P};
    let x = DcAux::new(beta, theta);
    let u = x.upsilon;
    let DipoleMoments {
        g0,
        g1,
        g2,
        f0,
        f1,
        f2,
    } = DipoleMoments::perturbative(beta);
    let wb = 2.0 + beta * beta / 6.0;
    let d = 3.0 * beta * beta / 20.0;
    let rows: [(u32, u32, u32, &str, Sigma, f64, f64, f64); 16] = [
        (0, 0, 0, "", P, 0.0, g0 * g0 * u, -1.0),
        (
            1,
            1,
            1,
            "-",
            P,
            wb - d / 3.0,
            (g0 * g1 - f1 * f1) * u - f1 * f1,
            -x.a1 - (21.0 + u) / 45.0,
        ),
        (
            2,
            1,
            1,
            "-",
            M,
            wb - d / 3.0,
            (g0 * g1 + f1 * f1) * u + f1 * f1,
            -x.a1 - (21.0 + u) / 45.0,
        ),
        (
            3,
            1,
            1,
            "+",
            P,
            wb - d / 3.0,
            g0 * g1 * u + f1 * f1,
            -19.0 / 45.0,
        ),
        (
            4,
            1,
            1,
            "+",
            M,
            wb - d / 3.0,
            g0 * g1 * u - f1 * f1,
            -19.0 / 45.0,
        ),
        (
            5,
            1,
            0,
            "",
            P,
            wb + 2.0 * d / 3.0,
            (g0 * g2 + f0 * f0) * u,
            x.a1 - (20.0 - u) / 45.0,
        ),
        (
            6,
            1,
            0,
            "",
            M,
            wb + 2.0 * d / 3.0,
            (g0 * g2 - f0 * f0) * u,
            x.a1 - (20.0 - u) / 45.0,
        ),
        (
            7,
            2,
            2,
            "",
            M,
            2.0 * (wb - d / 3.0),
            g1 * g1 * u,
            -3.0 * (46.0 + 19.0 * u) / 100.0,
        ),
        (
            8,
            2,
            2,
            "-",
            P,
            2.0 * (wb - d / 3.0),
            g1 * g1 * u,
            -3.0 * (22.0 - 5.0 * u) / 100.0,
        ),
        (
            9,
            2,
            2,
            "0",
            P,
            2.0 * (wb - d / 3.0),
            g1 * g1 * u,
            -3.0 * (x.a2 + x.a3) / 100.0,
        ),
        (
            10,
            2,
            2,
            "+",
            P,
            2.0 * (wb - d / 3.0),
            g1 * g1 * u,
            -3.0 * (x.a2 - x.a3) / 200.0,
        ),
        (
            11,
            2,
            1,
            "-",
            P,
            2.0 * (wb + d / 6.0),
            (g1 * g2 - f2 * f2) * u - f2 * f2,
            -3.0 * (13.0 + 2.0 * u + 2.0 * u * u) / 100.0,
        ),
        (
            12,
            2,
            1,
            "-",
            M,
            2.0 * (wb + d / 6.0),
            (g1 * g2 + f2 * f2) * u + f2 * f2,
            -39.0 / 20.0,
        ),
        (
            13,
            2,
            1,
            "+",
            P,
            2.0 * (wb + d / 6.0),
            g1 * g2 * u + f2 * f2,
            -3.0 * (27.0 + 5.0 * u) / 100.0,
        ),
        (
            14,
            2,
            1,
            "+",
            M,
            2.0 * (wb + d / 6.0),
            g1 * g2 * u - f2 * f2,
            -3.0 * (27.0 - 19.0 * u) / 100.0,
        ),
        (
            15,
            2,
            0,
            "",
            P,
            2.0 * (wb + 2.0 * d / 3.0),
            g2 * g2 * u,
            -3.0 * (34.0 - 14.0 * u - u * u) / 100.0,
        ),
    ];
    rows.iter()
        .map(|&(n, jtot, m, mu, sigma, e0, c3, c6x6)| DcRow {
            n,
            jtot,
            m,
            mu,
            sigma,
            e0,
            c3,
            c6x6,
        })
        .collect()
}

/// A numerically fitted track set against a table: one entry per table row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RowComparison {
    pub n: u32,
    pub label: StateLabel,
    pub table_e0: f64,
    pub table_c3: f64,
    pub table_c6x6: f64,
    pub fit: LongRangeFit,
    /// Relative C₃ deviation, or absolute deviation over `scale_c3` when the reference is zero.
    pub dev_c3: f64,
    pub dev_c6: f64,
}

/// Reference scale for vanishing `C₃` entries: the first-excited manifold value `d²/3`.
pub const C3_SCALE: f64 = 1.0 / 3.0;

pub fn deviation(fitted: f64, reference: f64, scale: f64) -> f64 {
    if reference.abs() < 1e-3 * scale {
        (fitted - reference).abs() / scale
    } else {
        ((fitted - reference) / reference).abs()
    }
}

/// Pair tracks with rows sharing `key`, ordering both sides by their
/// energy at `r_ref` (table prediction vs fitted curve).
pub fn match_rows<K: Ord + Copy>(
    row_keys: &[K],
    row_energy: &[f64],
    track_keys: &[K],
    track_energy: &[f64],
) -> Option<Vec<usize>> {
    let mut out = vec![usize::MAX; row_keys.len()];
    let mut keys: Vec<K> = row_keys.to_vec();
    keys.sort();
    keys.dedup();
    for k in keys {
        let mut rows: Vec<usize> = (0..row_keys.len()).filter(|&i| row_keys[i] == k).collect();
        let mut tr: Vec<usize> = (0..track_keys.len())
            .filter(|&i| track_keys[i] == k)
            .collect();
        if rows.len() != tr.len() {
            return None;
        }
        rows.sort_by(|&a, &b| row_energy[a].total_cmp(&row_energy[b]).then(a.cmp(&b)));
        tr.sort_by(|&a, &b| track_energy[a].total_cmp(&track_energy[b]).then(a.cmp(&b)));
        for (r, t) in rows.into_iter().zip(tr) {
            out[r] = t;
        }
    }
    Some(out)
}

/// Grid points used across the fit window.
pub const FIT_POINTS: usize = 60;

fn fitted_surface(
    beta: f64,
    theta: f64,
    window: (f64, f64),
) -> Result<(Surface, Vec<LongRangeFit>, f64)> {
    let opts = SurfaceOptions::default();
    let basis = PairBasis::new(opts.jmax_single, beta)?;
    let rs = linspace(window.0, window.1, FIT_POINTS);
    let surface = bare_surfaces_in(&basis, &rs, theta, &opts)?;
    let fits = fit_tracks(&surface, window)?;
    Ok((surface, fits, 2.0 * basis.e00))
}

fn compare(
    keys: &[(u32, u32, Sigma)],
    rows: &[(u32, f64, f64, f64)],
    surface: &Surface,
    fits: &[LongRangeFit],
    offset: f64,
    r_ref: f64,
) -> Result<Vec<RowComparison>> {
    let row_energy: Vec<f64> = rows
        .iter()
        .map(|&(_, e0, c3, c6x6)| e0 + c3 / r_ref.powi(3) + c6x6 / 6.0 / r_ref.powi(6))
        .collect();
    let track_keys: Vec<(u32, u32, Sigma)> = surface
        .tracks
        .iter()
        .map(|t| (t.label.jtot, t.label.proj, t.label.sigma))
        .collect();
    let track_energy: Vec<f64> = fits
        .iter()
        .map(|f| f.e0 - offset + f.c3 / r_ref.powi(3) + f.c6 / r_ref.powi(6))
        .collect();
    let idx = match_rows(keys, &row_energy, &track_keys, &track_energy)
        .ok_or_else(|| Error::Domain("tracks do not match the table row symmetries".into()))?;
    Ok(rows
        .iter()
        .zip(idx)
        .map(|(&(n, e0, c3, c6x6), t)| {
            let mut fit = fits[t];
            fit.e0 -= offset;
            RowComparison {
                n,
                label: surface.tracks[t].label,
                table_e0: e0,
                table_c3: c3,
                table_c6x6: c6x6,
                fit,
                dev_c3: deviation(fit.c3, c3, C3_SCALE),
                dev_c6: deviation(6.0 * fit.c6, c6x6, 1.0),
            }
        })
        .collect())
}

/// Zero-field table against tracks fitted on the collision axis over `window`.
pub fn compare_zero_field(window: (f64, f64)) -> Result<Vec<RowComparison>> {
    let (surface, fits, offset) = fitted_surface(0.0, 0.0, window)?;
    let table = zero_field_table();
    let keys: Vec<(u32, u32, Sigma)> = table
        .iter()
        .map(|r| (r.jtot, r.y.unsigned_abs(), r.sigma))
        .collect();
    let rows: Vec<(u32, f64, f64, f64)> = table.iter().map(|r| (r.n, r.e0, r.c3, r.c6x6)).collect();
    compare(&keys, &rows, &surface, &fits, offset, window.0)
}

/// DC table at `(beta, theta)` against tracks fitted over `window`.
pub fn compare_dc(beta: f64, theta: f64, window: (f64, f64)) -> Result<Vec<RowComparison>> {
    if !(beta > 0.0) {
        return Err(Error::Config(format!(
            "DC table comparison needs beta > 0, got {beta}"
        )));
    }
    let (surface, fits, offset) = fitted_surface(beta, theta, window)?;
    let table = dc_table(beta, theta);
    let keys: Vec<(u32, u32, Sigma)> = table.iter().map(|r| (r.jtot, r.m, r.sigma)).collect();
    let rows: Vec<(u32, f64, f64, f64)> = table.iter().map(|r| (r.n, r.e0, r.c3, r.c6x6)).collect();
    compare(&keys, &rows, &surface, &fits, offset, window.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_rows() {
        let t = zero_field_table();
        assert_eq!(t.len(), 16);
        assert_eq!(t[0].c6x6, -1.0);
        let c3: Vec<f64> = t[1..7].iter().map(|r| r.c3).collect();
        assert!(c3.contains(&(-2.0 / 3.0)) && c3.contains(&(2.0 / 3.0)));
        let s3 = 3f64.sqrt();
        assert!((t[7].c6x6 + (48.0 - 39.0 * s3) / 50.0).abs() < 1e-15);
        assert!((t[8].c6x6 + (48.0 + 39.0 * s3) / 50.0).abs() < 1e-15);
        for r in &t {
            let p = r.sigma.sign() * if r.jtot % 2 == 0 { 1 } else { -1 };
            assert_eq!(r.term.ends_with('g'), p == 1, "row {}", r.n);
        }
    }

    #[test]
    fn xi_at_plane() {
        let x = DcAux::new(0.1, std::f64::consts::FRAC_PI_2);
        assert!((x.xi.tan() - 0.75).abs() < 1e-14);
        assert!((x.a3 - 32.5).abs() < 1e-12);
        assert_eq!(x.a1, 0.0);
        assert!((x.c_plus.powi(2) + x.c_minus.powi(2) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn small_beta_limit_of_row5() {
        let th: f64 = 0.4;
        let u = 1.0 - 3.0 * th.cos().powi(2);
        let r = &dc_table(1e-6, th)[5];
        assert!((r.c3 - u / 3.0).abs() < 1e-9);
    }

    #[test]
    fn matching_by_energy() {
        let m = match_rows(&[1, 1, 2], &[0.5, 0.1, 3.0], &[2, 1, 1], &[2.9, 0.2, 0.4]).unwrap();
        assert_eq!(m, vec![2, 1, 0]);
        assert!(match_rows(&[1], &[0.0], &[2], &[0.0]).is_none());
    }
}
