//! Transverse harmonic confinement: trapped 3D potentials, saddle geometry,
//! Gaussian-traced 2D potentials and the transverse band spectrum of the
//! reduced DC+AC model.

use nalgebra::{DMatrix, Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::floquet::{cubic_by_eigensolver, m0_detunings, AcFieldConfig};
use crate::linalg::eigh_real;
use crate::pair::{v_eff_3d_dc, GroundCoefficients};
use crate::quadrature::{hermite_functions, HermiteRule};
use crate::surface::{track, Sigma, StateLabel, Surface, Track};

/// Harmonic confinement along `e_z` for the relative coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapConfig {
    pub omega_perp: f64,
    /// Single-molecule mass in natural units.
    pub mass: f64,
    /// Oscillator states in the band computation.
    pub n_osc: usize,
    /// Gauss-Hermite nodes for the Gaussian trace.
    pub trace_nodes: usize,
    /// Relative change tolerated when the trace node count is doubled.
    pub trace_tol: f64,
}

impl TrapConfig {
    pub fn new(omega_perp: f64, mass: f64) -> Result<Self> {
        if !(omega_perp > 0.0) || !(mass > 0.0) {
            return Err(Error::Config(format!(
                "trap needs omega_perp > 0 and mass > 0, got {omega_perp}, {mass}"
            )));
        }
        Ok(TrapConfig {
            omega_perp,
            mass,
            n_osc: 60,
            trace_nodes: 64,
            trace_tol: 1e-8,
        })
    }

    /// `a⊥ = √(ħ/mω⊥)` with the single-molecule mass.
    pub fn a_perp(&self) -> f64 {
        (1.0 / (self.mass * self.omega_perp)).sqrt()
    }

    /// Oscillator length of the relative motion (reduced mass `m/2`).
    pub fn relative_length(&self) -> f64 {
        (2.0 / (self.mass * self.omega_perp)).sqrt()
    }

    /// `(1/4)mω⊥²z²`.
    pub fn trap_energy(&self, z: f64) -> f64 {
        0.25 * self.mass * self.omega_perp.powi(2) * z * z
    }
}

/// Which effective interaction sits under the trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PotentialMode {
    Dc {
        beta: f64,
    },
    /// Dressed ground branch of the reduced `M = 0` model, measured from its `r → ∞` value.
    DcAc {
        beta: f64,
        ac: AcFieldConfig,
    },
}

impl PotentialMode {
    pub fn beta(&self) -> f64 {
        match *self {
            PotentialMode::Dc { beta } | PotentialMode::DcAc { beta, .. } => beta,
        }
    }

    /// Untrapped effective potential at `(ρ, z)`.
    pub fn v3d(&self, rho: f64, z: f64) -> f64 {
        let r = rho.hypot(z);
        let theta = rho.atan2(z);
        match *self {
            PotentialMode::Dc { beta } => v_eff_3d_dc(r, theta, beta),
            PotentialMode::DcAc { beta, ac } => {
                dressed_ground_m0(r, theta, &ac, beta) - dressed_ground_m0_asymptote(&ac)
            }
        }
    }
}

/// Top branch of the reduced symmetric `M = 0` model.
pub fn dressed_ground_m0(r: f64, theta: f64, ac: &AcFieldConfig, beta: f64) -> f64 {
    let d = m0_detunings(r, theta, ac, beta);
    cubic_by_eigensolver([d[0], d[1], d[2]], ac.omega_rabi)[0]
}

pub fn dressed_ground_m0_asymptote(ac: &AcFieldConfig) -> f64 {
    cubic_by_eigensolver([0.0, ac.delta, 2.0 * ac.delta], ac.omega_rabi)[0]
}

/// `V(ρ, z) + (1/4)mω⊥²z²`.
pub fn v_trapped(rho: f64, z: f64, mode: &PotentialMode, trap: &TrapConfig) -> Result<f64> {
    if rho == 0.0 && z == 0.0 {
        return domain("trapped potential is singular at the origin");
    }
    Ok(mode.v3d(rho, z) + trap.trap_energy(z))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaddleRegime {
    TwoSaddles,
    SingleSaddle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddlePoint {
    pub rho: f64,
    /// Upper of the two mirror saddles (`z ≥ 0`).
    pub z: f64,
    pub barrier: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleGeometry {
    pub regime: SaddleRegime,
    pub closed_form: SaddlePoint,
    /// Newton refinement on `∇V = 0`; `None` when it failed, with the reason in `diagnostic`.
    pub numeric: Option<SaddlePoint>,
    /// Negative Hessian eigenvalues at the numeric point.
    pub hessian_negative: usize,
    pub diagnostic: Option<String>,
}

/// DC trapped potential in the `C₃;0, C₆;0` form with its gradient.
#[derive(Debug, Clone, Copy)]
struct DcTrapped {
    c3: f64,
    c6: f64,
    k: f64,
}

impl DcTrapped {
    fn value(&self, rho: f64, z: f64) -> f64 {
        let r2 = rho * rho + z * z;
        let r = r2.sqrt();
        self.c3 * (rho * rho - 2.0 * z * z) / r.powi(5) + self.c6 / r2.powi(3) + self.k * z * z
    }

    fn grad(&self, rho: f64, z: f64) -> Vector2<f64> {
        let r = rho.hypot(z);
        let u = rho * rho - 2.0 * z * z;
        let r5 = r.powi(5);
        let r7 = r.powi(7);
        let r8 = r.powi(8);
        Vector2::new(
            self.c3 * (2.0 * rho / r5 - 5.0 * rho * u / r7) - 6.0 * self.c6 * rho / r8,
            self.c3 * (-4.0 * z / r5 - 5.0 * z * u / r7) - 6.0 * self.c6 * z / r8
                + 2.0 * self.k * z,
        )
    }

    fn hessian(&self, rho: f64, z: f64) -> Matrix2<f64> {
        let h = 1e-6 * rho.hypot(z);
        let dr = (self.grad(rho + h, z) - self.grad(rho - h, z)) / (2.0 * h);
        let dz = (self.grad(rho, z + h) - self.grad(rho, z - h)) / (2.0 * h);
        let m = Matrix2::from_columns(&[dr, dz]);
        (m + m.transpose()) / 2.0
    }
}

/// Saddle points of the DC trapped potential: closed form from the saddle
/// length `ℓ⊥ = (12C₃;0/mω⊥²)^{1/5}` plus Newton refinement.
pub fn saddle_geometry(beta: f64, trap: &TrapConfig) -> Result<SaddleGeometry> {
    if !(beta > 0.0) {
        return Err(Error::Config(format!(
            "saddle geometry needs beta > 0, got {beta}"
        )));
    }
    let g = GroundCoefficients::from_beta(beta);
    let pot = DcTrapped {
        c3: g.c3,
        c6: g.c6,
        k: 0.25 * trap.mass * trap.omega_perp.powi(2),
    };
    let rs = g.r_star();
    let ell = saddle_length(&g, trap);
    let (regime, closed_form) = if ell > rs {
        let cos_t = (1.0 - (rs / ell).powi(3)).sqrt() / 5f64.sqrt();
        let sin_t = (1.0 - cos_t * cos_t).sqrt();
        let barrier = g.c3 / ell.powi(3) + g.c6 / ell.powi(6);
        (
            SaddleRegime::TwoSaddles,
            SaddlePoint {
                rho: ell * sin_t,
                z: ell * cos_t,
                barrier,
            },
        )
    } else {
        (
            SaddleRegime::SingleSaddle,
            SaddlePoint {
                rho: rs,
                z: 0.0,
                barrier: g.v_star(),
            },
        )
    };
    let mut x = Vector2::new(closed_form.rho, closed_form.z);
    let mut diagnostic = None;
    let mut ok = false;
    for _ in 0..100 {
        let gr = pot.grad(x[0], x[1]);
        let step = match pot.hessian(x[0], x[1]).lu().solve(&gr) {
            Some(s) => s,
            None => {
                diagnostic = Some("singular Hessian during refinement".to_string());
                break;
            }
        };
        x -= step;
        if x[0] <= 0.0 {
            diagnostic = Some("refinement left the half plane rho > 0".to_string());
            break;
        }
        if step.norm() < 1e-13 * x.norm() {
            ok = true;
            break;
        }
    }
    if !ok && diagnostic.is_none() {
        diagnostic = Some("Newton refinement did not converge".to_string());
    }
    let (numeric, hessian_negative) = if ok {
        let z = x[1].abs();
        let ev = pot.hessian(x[0], z).symmetric_eigenvalues();
        let neg = ev.iter().filter(|&&e| e < 0.0).count();
        (
            Some(SaddlePoint {
                rho: x[0],
                z,
                barrier: pot.value(x[0], z),
            }),
            neg,
        )
    } else {
        (None, 0)
    };
    Ok(SaddleGeometry {
        regime,
        closed_form,
        numeric,
        hessian_negative,
        diagnostic,
    })
}

/// `ℓ⊥ = (12C₃;0/mω⊥²)^{1/5}`.
pub fn saddle_length(g: &GroundCoefficients, trap: &TrapConfig) -> f64 {
    (12.0 * g.c3 / (trap.mass * trap.omega_perp.powi(2))).powf(0.2)
}

/// Gaussian trace `(1/√(2π)a⊥) ∫dz e^{−z²/2a⊥²} V(ρ, z)`.
pub fn v_eff_2d(rho: f64, mode: &PotentialMode, trap: &TrapConfig) -> Result<f64> {
    if !(rho > 0.0) {
        return domain("v_eff_2d needs rho > 0");
    }
    let a = trap.a_perp();
    let f = |z: f64| mode.v3d(rho, z);
    let v = HermiteRule::new(trap.trace_nodes).gaussian_average(a, f);
    let v2 = HermiteRule::new(2 * trap.trace_nodes).gaussian_average(a, f);
    let residual = (v - v2).abs() / v2.abs().max(f64::MIN_POSITIVE);
    if residual > trap.trace_tol {
        return Err(Error::Convergence {
            what: format!("Gaussian trace at rho={rho}"),
            residual,
        });
    }
    Ok(v2)
}

/// Transverse band spectrum of the reduced `M = 0` model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandSpectrum {
    pub rho: Vec<f64>,
    /// Tracked bands: internal branch in `label.jtot`, oscillator index in `label.band`.
    pub surface: Surface,
    /// `Ẽ(∞)` of each internal branch: three symmetric (descending) then the antisymmetric one.
    pub asymptotes: [f64; 4],
    /// At each `ρ`: the ground band energy and the smallest distance to any
    /// band with `k > 0`, over all bands and over the bands that can couple to
    /// it (symmetric internal branch, even `k`).
    pub ground: Vec<f64>,
    pub separation_all: Vec<f64>,
    pub separation_coupled: Vec<f64>,
}

struct BandPoint {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

fn internal_m0(rho: f64, z: f64, ac: &AcFieldConfig, beta: f64) -> ([[f64; 3]; 3], f64) {
    let r = rho.hypot(z);
    let d = m0_detunings(r, rho.atan2(z), ac, beta);
    let s = std::f64::consts::SQRT_2 * ac.omega_rabi;
    ([[-d[0], -s, 0.0], [-s, -d[1], -s], [0.0, -s, -d[2]]], -d[3])
}

/// Full band problem at one `ρ`: block `(internal i, oscillator k)` index `i·n + k`,
/// symmetric internal states first, antisymmetric last.
fn band_point(
    rho: f64,
    ac: &AcFieldConfig,
    beta: f64,
    trap: &TrapConfig,
    n: usize,
    nodes: usize,
) -> BandPoint {
    let rule = HermiteRule::new(nodes);
    let b = trap.relative_length();
    let phis: Vec<Vec<f64>> = rule
        .nodes
        .iter()
        .map(|&x| hermite_functions(n - 1, x))
        .collect();
    let ints: Vec<([[f64; 3]; 3], f64)> = rule
        .nodes
        .iter()
        .map(|&x| internal_m0(rho, b * x, ac, beta))
        .collect();
    let dim = 4 * n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for (q, (phi, (hs, ha))) in phis.iter().zip(&ints).enumerate() {
        let l = rule.scaled[q];
        for ka in 0..n {
            for kb in 0..=ka {
                let w = l * phi[ka] * phi[kb];
                for i in 0..3 {
                    for j in 0..3 {
                        h[(i * n + ka, j * n + kb)] += w * hs[i][j];
                    }
                }
                h[(3 * n + ka, 3 * n + kb)] += w * ha;
            }
        }
    }
    for i in 0..4 {
        for ka in 0..n {
            for kb in 0..ka {
                h[(i * n + kb, i * n + ka)] = h[(i * n + ka, i * n + kb)];
            }
            for j in 0..4 {
                for kb in 0..ka {
                    h[(j * n + kb, i * n + ka)] = h[(i * n + ka, j * n + kb)];
                }
            }
            h[(i * n + ka, i * n + ka)] += ka as f64 * trap.omega_perp;
        }
    }
    let (values, vectors) = eigh_real(&h);
    BandPoint { values, vectors }
}

/// Bands `Ẽ_{i,k}(ρ)` of `p_z²/m + (1/4)mω⊥²z² − ħω⊥/2 + H̃_int(ρ, z)` for the
/// lowest `kmax + 1` transverse states of each internal branch, tracked from
/// the largest `ρ` inward.
pub fn z_band_spectrum(
    rho_grid: &[f64],
    ac: &AcFieldConfig,
    beta: f64,
    trap: &TrapConfig,
    kmax: usize,
) -> Result<BandSpectrum> {
    if rho_grid.is_empty() || rho_grid.iter().any(|&r| !(r > 0.0)) {
        return domain("band grid must be non-empty and positive");
    }
    if !(beta > 0.0) {
        return Err(Error::Config(format!(
            "the reduced M = 0 model needs beta > 0, got {beta}"
        )));
    }
    let n = trap.n_osc.max(8);
    if kmax >= n {
        return Err(Error::Config(format!(
            "kmax={kmax} must be below n_osc={n}"
        )));
    }
    let nodes = 2 * n;
    let mut outer = rho_grid.to_vec();
    outer.sort_by(|a, b| b.total_cmp(a));
    let inner = *outer.last().expect("non-empty");
    let g1 = band_point(inner, ac, beta, trap, n, nodes);
    let g2 = band_point(inner, ac, beta, trap, 2 * n, 2 * nodes);
    let shift = (top_k0(&g1, n) - top_k0(&g2, 2 * n)).abs();
    if shift > 1e-6 * trap.omega_perp {
        return Err(Error::Convergence {
            what: format!("band basis at rho={inner}"),
            residual: shift / trap.omega_perp,
        });
    }
    let points: Vec<BandPoint> = {
        use rayon::prelude::*;
        outer
            .par_iter()
            .map(|&r| band_point(r, ac, beta, trap, n, nodes))
            .collect()
    };
    // asymptotic internal states
    let (hs, ha) = internal_m0(1e12, 0.0, ac, beta);
    let hs = nalgebra::Matrix3::from_fn(|i, j| hs[i][j]);
    let se = hs.symmetric_eigen();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let asymptotes = [
        se.eigenvalues[order[0]],
        se.eigenvalues[order[1]],
        se.eigenvalues[order[2]],
        ha,
    ];
    // start indices: dominant (internal branch, k) of each state at the outer point
    let p0 = &points[0];
    let weight = |col: usize, branch: usize, k: usize| -> f64 {
        let v = p0.vectors.column(col);
        if branch == 3 {
            v[3 * n + k].powi(2)
        } else {
            let u = se.eigenvectors.column(order[branch]);
            (0..3).map(|i| u[i] * v[i * n + k]).sum::<f64>().powi(2)
        }
    };
    let mut start = Vec::new();
    let mut labels = Vec::new();
    for branch in 0..4 {
        for k in 0..=kmax {
            let col = (0..p0.values.len())
                .max_by(|&a, &b| weight(a, branch, k).total_cmp(&weight(b, branch, k)))
                .expect("non-empty");
            start.push(col);
            let sigma = if branch == 3 {
                Sigma::Minus
            } else {
                Sigma::Plus
            };
            let jtot = if branch == 3 { 1 } else { branch as u32 };
            labels.push(StateLabel {
                jtot,
                proj: 0,
                mu: 0,
                sigma,
                parity: Some(if k % 2 == 0 { 1 } else { -1 }),
                band: Some(k as u32),
            });
        }
    }
    let eigs: Vec<crate::linalg::Eigen> = points
        .iter()
        .map(|p| crate::linalg::Eigen {
            values: p.values.clone(),
            vectors: crate::linalg::to_complex(&p.vectors),
        })
        .collect();
    let raw = track(&eigs, &start, 1e-14);
    let m = outer.len();
    let mut tracks = Vec::new();
    for (t, label) in raw.into_iter().zip(labels) {
        let mut energies = t.energies;
        let mut overlaps = t.overlaps;
        energies.reverse();
        overlaps.reverse();
        tracks.push(Track {
            label,
            energies,
            overlaps,
            crossings: t.crossings.iter().map(|&s| m - 1 - s).collect(),
            photon_offset: Some(label.jtot as f64 * ac.delta),
        });
    }
    // ground band and separations, in ascending-ρ order
    let ground_track = &tracks[0];
    let mut ground = Vec::with_capacity(m);
    let mut sep_all = Vec::with_capacity(m);
    let mut sep_coupled = Vec::with_capacity(m);
    for (s, p) in points.iter().enumerate() {
        let eg = ground_track.energies[m - 1 - s];
        let gcol = (0..p.values.len())
            .min_by(|&a, &b| {
                (p.values[a] - eg)
                    .abs()
                    .total_cmp(&(p.values[b] - eg).abs())
            })
            .expect("non-empty");
        let mut all = f64::INFINITY;
        let mut coupled = f64::INFINITY;
        for c in 0..p.values.len() {
            if c == gcol {
                continue;
            }
            let (k, coupled_weight) = band_content(&p.vectors, c, n);
            if k == 0 {
                continue;
            }
            let d = (p.values[c] - eg).abs();
            all = all.min(d);
            if coupled_weight > 0.5 {
                coupled = coupled.min(d);
            }
        }
        ground.push(eg);
        sep_all.push(all);
        sep_coupled.push(coupled);
    }
    ground.reverse();
    sep_all.reverse();
    sep_coupled.reverse();
    let mut rho = rho_grid.to_vec();
    rho.sort_by(f64::total_cmp);
    let surface = Surface {
        theta: std::f64::consts::FRAC_PI_2,
        core: rho.iter().map(|&r| r < 1.0).collect(),
        r: rho.clone(),
        tracks,
    };
    Ok(BandSpectrum {
        rho,
        surface,
        asymptotes,
        ground,
        separation_all: sep_all,
        separation_coupled: sep_coupled,
    })
}

fn top_k0(p: &BandPoint, n: usize) -> f64 {
    (0..p.values.len())
        .filter(|&c| band_content(&p.vectors, c, n).0 == 0)
        .map(|c| p.values[c])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Dominant oscillator index of one eigenvector and its weight on the
/// symmetric internal states with even `k`.
fn band_content(v: &DMatrix<f64>, col: usize, n: usize) -> (usize, f64) {
    let mut wk = vec![0.0; n];
    let mut coupled = 0.0;
    for i in 0..4 {
        for (k, w) in wk.iter_mut().enumerate() {
            let x = v[(i * n + k, col)].powi(2);
            *w += x;
            if i < 3 && k % 2 == 0 {
                coupled += x;
            }
        }
    }
    let k = (0..n)
        .max_by(|&a, &b| wk[a].total_cmp(&wk[b]))
        .expect("n > 0");
    (k, coupled)
}

/// Adiabaticity budget `ħω⊥ − 2ħΔ − V_eff^2D(ρ)`; satisfied when `V_eff^2D`
/// stays below `threshold` times the budget.
pub fn adiabaticity_margin(
    rho: f64,
    ac: &AcFieldConfig,
    beta: f64,
    trap: &TrapConfig,
    threshold: f64,
) -> Result<(f64, bool)> {
    let budget = trap.omega_perp - 2.0 * ac.delta;
    let v = v_eff_2d(rho, &PotentialMode::DcAc { beta, ac: *ac }, trap)?;
    Ok((budget - v, budget > 0.0 && v < threshold * budget))
}
