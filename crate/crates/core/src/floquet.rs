//! Rotating-wave dressing of pair states by a monochromatic microwave field,
//! with and without a static field, plus the closed-form reduced models.
//!
//! Photon bookkeeping: a bare pair state of manifold `J` is paired with `−J`
//! photons, so its dressed diagonal is `E − Jω = −ħΔ_J`. The ground pair is
//! the top of the dressed spectrum for blue detuning.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::wigner_d1;
use crate::error::{domain, Error, Result};
use crate::linalg::{eigh, eigvalsh, to_complex, CMatrix, CVector, Eigen};
use crate::pair::PairBasis;
use crate::quadrature::minimize_bounded;
use crate::surface::{assign_mu, track, Sigma, StateLabel, Surface, Track};
use crate::tables::{dc_table, mixing_coefficients};

/// Microwave drive: polarization `q`, detuning `Δ = ω − ω₀` and Rabi frequency `Ω`,
/// both in units of `B/ħ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcFieldConfig {
    pub q: i32,
    pub delta: f64,
    pub omega_rabi: f64,
}

impl AcFieldConfig {
    pub fn new(q: i32, delta: f64, omega_rabi: f64) -> Result<Self> {
        if q.abs() > 1 {
            return Err(Error::Config(format!(
                "polarization q={q} must be -1, 0 or 1"
            )));
        }
        if !(delta > 0.0) {
            return Err(Error::Config(format!(
                "detuning must be positive (blue), got {delta}"
            )));
        }
        if !(omega_rabi >= 0.0) {
            return Err(Error::Config(format!(
                "Rabi frequency must be non-negative, got {omega_rabi}"
            )));
        }
        Ok(AcFieldConfig {
            q,
            delta,
            omega_rabi,
        })
    }

    /// Condon radius `(d²/3ħΔ)^{1/3}` of the field-free resonance.
    pub fn r_condon(&self) -> f64 {
        (1.0 / (3.0 * self.delta)).cbrt()
    }

    /// Collision-frame couplings `Ω_Y = Ω D¹_{q,Y}(φ, θ, 0)*`, ordered `Y = −1, 0, +1`.
    pub fn omega_y(&self, phi: f64, theta: f64) -> [Complex64; 3] {
        [-1, 0, 1].map(|y| {
            self.omega_rabi
                * wigner_d1(self.q, y, phi, theta)
                    .expect("|q|,|Y| ≤ 1")
                    .conj()
        })
    }
}

/// `c± = [(1 ± 1/√3)/2]^{1/2}`: mixing of `|1,0;1,0⟩` and the symmetric
/// `|1,1;1,−1⟩` in the field-free `J = 2, Y = 0` states.
pub const C_PLUS_AC: f64 = 0.888_073_833_977_115_3;
pub const C_MINUS_AC: f64 = 0.459_700_843_380_983;

/// `c±(θ) = cos(ξ/2) ± sin(ξ/2)` of the DC-dressed `J = 2` states; unrelated to [`C_PLUS_AC`].
pub fn c_pm_dc(theta: f64) -> (f64, f64) {
    mixing_coefficients(1.0 - 3.0 * theta.cos().powi(2))
}

/// One collision-frame basis state of the explicit RWA matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RwaState {
    pub jtot: u32,
    pub y: i32,
    pub name: &'static str,
}

const fn st(jtot: u32, y: i32, name: &'static str) -> RwaState {
    RwaState { jtot, y, name }
}

pub const SYMMETRIC_STATES: [RwaState; 10] = [
    st(0, 0, "0;0"),
    st(1, -1, "1;-1"),
    st(1, 0, "1;0"),
    st(1, 1, "1;+1"),
    st(2, -2, "2;-2"),
    st(2, -1, "2;-1"),
    st(2, 0, "2;0+"),
    st(2, 0, "2;0-"),
    st(2, 1, "2;+1"),
    st(2, 2, "2;+2"),
];

pub const ANTISYMMETRIC_STATES: [RwaState; 6] = [
    st(1, -1, "1;-1"),
    st(1, 0, "1;0"),
    st(1, 1, "1;+1"),
    st(2, -1, "2;-1"),
    st(2, 0, "2;0"),
    st(2, 1, "2;+1"),
];

pub fn rwa_states(sigma: Sigma) -> &'static [RwaState] {
    match sigma {
        Sigma::Plus => &SYMMETRIC_STATES,
        Sigma::Minus => &ANTISYMMETRIC_STATES,
    }
}

/// `(Y, excited, lower, coefficient)`: the RWA matrix carries `−coefficient·Ω_Y`
/// at `(excited, lower)` and its conjugate at `(lower, excited)`.
fn couplings(sigma: Sigma) -> Vec<(i32, usize, usize, f64)> {
    let s2 = std::f64::consts::SQRT_2;
    let (cp, cm) = (C_PLUS_AC, C_MINUS_AC);
    match sigma {
        Sigma::Plus => vec![
            (-1, 1, 0, s2),
            (-1, 4, 1, s2),
            (-1, 5, 2, 1.0),
            (-1, 6, 3, cp),
            (-1, 7, 3, -cm),
            (0, 2, 0, s2),
            (0, 5, 1, 1.0),
            (0, 6, 2, s2 * cm),
            (0, 7, 2, s2 * cp),
            (0, 8, 3, 1.0),
            (1, 3, 0, s2),
            (1, 6, 1, cp),
            (1, 7, 1, -cm),
            (1, 8, 2, 1.0),
            (1, 9, 3, s2),
        ],
        Sigma::Minus => vec![
            (-1, 3, 1, -1.0),
            (-1, 4, 2, -1.0),
            (0, 3, 0, 1.0),
            (0, 5, 2, 1.0),
            (1, 4, 0, 1.0),
            (1, 5, 1, -1.0),
        ],
    }
}

/// Product-space kets (columns) of the explicit states in a field-free basis.
pub fn explicit_kets(basis: &PairBasis, sigma: Sigma) -> Result<DMatrix<f64>> {
    if basis.beta != 0.0 {
        return domain("explicit collision-frame states need a field-free pair basis");
    }
    let n = basis.n_single();
    let idx = |j: u32, m: i32| {
        basis
            .singles
            .iter()
            .position(|s| s.j == j && s.m == m)
            .expect("J ≤ 1 present")
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ket = |terms: &[(f64, (u32, i32), (u32, i32))]| {
        let mut v = nalgebra::DVector::<f64>::zeros(n * n);
        for &(c, a, b) in terms {
            v[idx(a.0, a.1) * n + idx(b.0, b.1)] += c;
        }
        v
    };
    let s = sigma.sign() as f64;
    let one = |y: i32| ket(&[(h, (0, 0), (1, y)), (s * h, (1, y), (0, 0))]);
    let mut cols = Vec::new();
    match sigma {
        Sigma::Plus => {
            cols.push(ket(&[(1.0, (0, 0), (0, 0))]));
            for y in -1..=1 {
                cols.push(one(y));
            }
            let a = ket(&[(1.0, (1, 0), (1, 0))]);
            let b = ket(&[(h, (1, 1), (1, -1)), (h, (1, -1), (1, 1))]);
            cols.push(ket(&[(1.0, (1, -1), (1, -1))]));
            cols.push(ket(&[(h, (1, 0), (1, -1)), (h, (1, -1), (1, 0))]));
            cols.push(&a * C_MINUS_AC + &b * C_PLUS_AC);
            cols.push(&a * C_PLUS_AC - &b * C_MINUS_AC);
            cols.push(ket(&[(h, (1, 0), (1, 1)), (h, (1, 1), (1, 0))]));
            cols.push(ket(&[(1.0, (1, 1), (1, 1))]));
        }
        Sigma::Minus => {
            for y in -1..=1 {
                cols.push(one(y));
            }
            cols.push(ket(&[(h, (1, 0), (1, -1)), (-h, (1, -1), (1, 0))]));
            cols.push(ket(&[(h, (1, 1), (1, -1)), (-h, (1, -1), (1, 1))]));
            cols.push(ket(&[(h, (1, 0), (1, 1)), (-h, (1, 1), (1, 0))]));
        }
    }
    Ok(DMatrix::from_columns(&cols))
}

/// Field-free pair energies `E_{J;Y;σ}(r)` of the explicit states, read from
/// the collision-axis diagonalization by maximal overlap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollisionLevels {
    pub r: f64,
    pub sigma: Sigma,
    pub energies: Vec<f64>,
    /// Overlap of each explicit state with the eigenvector it was assigned.
    pub purity: Vec<f64>,
}

pub fn collision_levels(basis: &PairBasis, sigma: Sigma, r: f64) -> Result<CollisionLevels> {
    let kets = explicit_kets(basis, sigma)?;
    let h = basis.sector_hamiltonian(sigma, r, 0.0, 0.0)?;
    let e = eigh(&h);
    let p = basis.sector_basis(sigma);
    let proj = to_complex(&(kets.transpose() * p)) * &e.vectors;
    let k = kets.ncols();
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for s in 0..k {
        for i in 0..e.values.len() {
            let w = proj[(s, i)].norm_sqr();
            if w > 1e-6 {
                cand.push((w, s, i));
            }
        }
    }
    cand.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut energies = vec![f64::NAN; k];
    let mut purity = vec![0.0; k];
    let mut used = vec![false; e.values.len()];
    for (w, s, i) in cand {
        if energies[s].is_nan() && !used[i] {
            energies[s] = e.values[i];
            purity[s] = w;
            used[i] = true;
        }
    }
    if energies.iter().any(|x| x.is_nan()) {
        return Err(Error::Convergence {
            what: format!("collision-frame labels at r={r}"),
            residual: 1.0,
        });
    }
    Ok(CollisionLevels {
        r,
        sigma,
        energies,
        purity,
    })
}

/// Explicit RWA Hamiltonian of the AC-only problem in the collision frame:
/// `H̃ = −ħ[diag(Δ_{J;Y}) + couplings]` with `Δ_{J;Y} = JΔ − (E_{J;Y} − 2BJ)`.
pub fn build_rwa_ac(
    levels: &CollisionLevels,
    theta: f64,
    phi: f64,
    cfg: &AcFieldConfig,
) -> Result<CMatrix> {
    let states = rwa_states(levels.sigma);
    if levels.energies.len() != states.len() {
        return domain("collision levels do not match the explicit basis");
    }
    let om = 2.0 + cfg.delta;
    let n = states.len();
    let mut h = CMatrix::zeros(n, n);
    for (k, s) in states.iter().enumerate() {
        h[(k, k)] = Complex64::new(levels.energies[k] - s.jtot as f64 * om, 0.0);
    }
    let oy = cfg.omega_y(phi, theta);
    for (y, e, l, c) in couplings(levels.sigma) {
        let m = oy[(y + 1) as usize] * c;
        h[(e, l)] -= m;
        h[(l, e)] -= m.conj();
    }
    Ok(h)
}

/// Couplings of the explicit matrix as `(Y, excited, lower, coefficient)`, for inspection.
pub fn explicit_couplings(sigma: Sigma) -> Vec<(i32, usize, usize, f64)> {
    couplings(sigma)
}

/// Rough size `Ω d²/(r³ B)` of the off-resonant terms dropped by the RWA.
pub fn off_resonant_estimate(r: f64, cfg: &AcFieldConfig) -> f64 {
    cfg.omega_rabi / r.powi(3)
}

/// RWA Hamiltonian on numerically diagonalized bare pair states.
#[derive(Debug, Clone)]
pub struct NumericRwa {
    pub hamiltonian: CMatrix,
    pub jtot: Vec<u32>,
    pub proj: Vec<u32>,
    /// Bare eigenvectors as columns in sector coordinates.
    pub bare: CMatrix,
}

/// Drive frequency `ω = (E_{1,|q|} − E_{0,0})/ħ + Δ` of one molecule.
pub fn drive_frequency(basis: &PairBasis, cfg: &AcFieldConfig) -> f64 {
    let i1 = single_index(basis, 1, cfg.q.abs());
    basis.single_energy[i1] - basis.e00 + cfg.delta
}

/// Field amplitude `E_AC = Ω/|⟨φ_{1,q}|d_q|φ_{0,0}⟩|`.
pub fn field_amplitude(basis: &PairBasis, cfg: &AcFieldConfig) -> f64 {
    let i1 = single_index(basis, 1, cfg.q);
    let i0 = single_index(basis, 0, 0);
    cfg.omega_rabi / basis.single_dipole(cfg.q)[(i1, i0)].abs()
}

fn single_index(basis: &PairBasis, j: u32, m: i32) -> usize {
    basis
        .singles
        .iter()
        .position(|s| s.j == j && s.m == m)
        .expect("basis holds J ≤ 1")
}

/// Numbers of bare states per sector kept in the dressed problem (`J₁, J₂ ≤ 1`).
pub const DRESSED_COUNTS: (usize, usize) = (10, 6);

pub fn numeric_rwa(
    basis: &PairBasis,
    sigma: Sigma,
    r: f64,
    theta: f64,
    phi: f64,
    cfg: &AcFieldConfig,
) -> Result<NumericRwa> {
    let keep = match sigma {
        Sigma::Plus => DRESSED_COUNTS.0,
        Sigma::Minus => DRESSED_COUNTS.1,
    };
    let e = eigh(&basis.sector_hamiltonian(sigma, r, theta, phi)?);
    let bare = e.vectors.columns(0, keep).into_owned();
    let p = to_complex(basis.sector_basis(sigma));
    let full = &p * &bare;
    let jd = basis.product_diag(|s| s.j as f64);
    let md = basis.product_diag(|s| s.m.unsigned_abs() as f64);
    let expect = |d: &[f64], k: usize| -> f64 {
        full.column(k)
            .iter()
            .zip(d)
            .map(|(c, x)| c.norm_sqr() * x)
            .sum()
    };
    let jtot: Vec<u32> = (0..keep).map(|k| expect(&jd, k).round() as u32).collect();
    let proj: Vec<u32> = (0..keep).map(|k| expect(&md, k).round() as u32).collect();
    let om = drive_frequency(basis, cfg);
    let eac = field_amplitude(basis, cfg);
    let dm = full.adjoint() * basis.total_dipole(cfg.q) * &full;
    let mut h = CMatrix::zeros(keep, keep);
    for a in 0..keep {
        h[(a, a)] = Complex64::new(e.values[a] - 2.0 * basis.e00 - jtot[a] as f64 * om, 0.0);
        for b in 0..keep {
            if jtot[a] == jtot[b] + 1 {
                let w = dm[(a, b)] * (-eac);
                h[(a, b)] += w;
                h[(b, a)] += w.conj();
            }
        }
    }
    Ok(NumericRwa {
        hamiltonian: h,
        jtot,
        proj,
        bare,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DressingMode {
    AcOnly,
    DcAc { beta: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DressedOptions {
    pub jmax_single: u32,
    pub degeneracy_tol: f64,
    pub phi: f64,
}

impl Default for DressedOptions {
    fn default() -> Self {
        DressedOptions {
            jmax_single: 2,
            degeneracy_tol: 1e-14,
            phi: 0.0,
        }
    }
}

/// Dressed surfaces share the bare layout; each track records `JΔ` in `photon_offset`.
pub type DressedSurface = Surface;

/// Dressed adiabatic curves along `rs` at polar angle `theta`, both sectors.
///
/// `AcOnly` uses the explicit collision-frame matrices with numerically
/// diagonalized field-free detunings; `DcAc` dresses the numeric DC surfaces.
/// Energies are relative to twice the single-molecule ground energy.
pub fn dressed_surfaces(
    rs: &[f64],
    theta: f64,
    cfg: &AcFieldConfig,
    mode: DressingMode,
    opts: &DressedOptions,
) -> Result<DressedSurface> {
    if rs.is_empty() || rs.iter().any(|&r| !(r > 0.0)) {
        return domain("radial grid must be non-empty and positive");
    }
    let beta = match mode {
        DressingMode::AcOnly => 0.0,
        DressingMode::DcAc { beta } if beta > 0.0 => beta,
        DressingMode::DcAc { beta } => {
            return Err(Error::Config(format!(
                "dc_ac dressing needs beta > 0, got {beta}"
            )))
        }
    };
    let basis = PairBasis::new(opts.jmax_single.max(1), beta)?;
    let mut outer: Vec<f64> = rs.to_vec();
    outer.sort_by(|a, b| b.total_cmp(a));
    let n = rs.len();
    let mut tracks = Vec::new();
    let mut asym = Vec::new();
    for sigma in [Sigma::Plus, Sigma::Minus] {
        // per point: dressed eigenpairs in a fixed representation and (J, proj) per eigenstate
        let points: Vec<(Eigen, Vec<(u32, u32)>)> = outer
            .par_iter()
            .map(|&r| -> Result<_> {
                match mode {
                    DressingMode::AcOnly => {
                        let lv = collision_levels(&basis, sigma, r)?;
                        let mut h = build_rwa_ac(&lv, theta, opts.phi, cfg)?;
                        let shift = Complex64::new(2.0 * basis.e00, 0.0);
                        for k in 0..h.nrows() {
                            h[(k, k)] -= shift;
                        }
                        let st = rwa_states(sigma);
                        let e = eigh(&h);
                        let jv: Vec<u32> = st.iter().map(|s| s.jtot).collect();
                        let pv: Vec<u32> = st.iter().map(|s| s.y.unsigned_abs()).collect();
                        let labels = dominant_labels(&e.vectors, &jv, &pv);
                        Ok((e, labels))
                    }
                    DressingMode::DcAc { .. } => {
                        let nr = numeric_rwa(&basis, sigma, r, theta, opts.phi, cfg)?;
                        let e = eigh(&nr.hamiltonian);
                        let labels = dominant_labels(&e.vectors, &nr.jtot, &nr.proj);
                        let vectors = &nr.bare * &e.vectors;
                        Ok((
                            Eigen {
                                values: e.values,
                                vectors,
                            },
                            labels,
                        ))
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let labels0 = points[0].1.clone();
        let eigs: Vec<Eigen> = points.into_iter().map(|p| p.0).collect();
        let start: Vec<usize> = (0..eigs[0].values.len()).collect();
        let raw = track(&eigs, &start, opts.degeneracy_tol);
        for (k, t) in raw.into_iter().enumerate() {
            let (jtot, proj) = labels0[k];
            let mut energies = t.energies.clone();
            let mut overlaps = t.overlaps.clone();
            energies.reverse();
            overlaps.reverse();
            asym.push(t.energies[0]);
            tracks.push(Track {
                label: StateLabel {
                    jtot,
                    proj,
                    mu: 0,
                    sigma,
                    parity: None,
                    band: None,
                },
                energies,
                overlaps,
                crossings: t.crossings.iter().map(|&s| n - 1 - s).collect(),
                photon_offset: Some(jtot as f64 * cfg.delta),
            });
        }
    }
    let mut labels: Vec<StateLabel> = tracks.iter().map(|t| t.label).collect();
    assign_mu(&mut labels, &asym);
    for (t, l) in tracks.iter_mut().zip(labels) {
        t.label = l;
    }
    let mut r = rs.to_vec();
    r.sort_by(f64::total_cmp);
    Ok(Surface {
        theta,
        core: r.iter().map(|&x| x < 1.0).collect(),
        r,
        tracks,
    })
}

/// Labels of each dressed eigenvector (column of `u`) by the basis values carrying most weight.
fn dominant_labels(u: &CMatrix, jv: &[u32], pv: &[u32]) -> Vec<(u32, u32)> {
    (0..u.ncols())
        .map(|k| {
            let w: Vec<f64> = u.column(k).iter().map(|c| c.norm_sqr()).collect();
            (dominant(&w, jv), dominant(&w, pv))
        })
        .collect()
}

fn dominant(weights: &[f64], values: &[u32]) -> u32 {
    let mut acc: std::collections::BTreeMap<u32, f64> = Default::default();
    for (w, v) in weights.iter().zip(values) {
        *acc.entry(*v).or_insert(0.0) += w;
    }
    acc.into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|x| x.0)
        .unwrap_or(0)
}

/// Second-order dressed ground state from explicit detunings:
/// `−Δ_{0;0} + Σ_Y 2|Ω_Y|²/(Δ_{1;Y} − Δ_{0;0})`, in the same energy zero as [`build_rwa_ac`].
pub fn perturbative_ground(
    levels: &CollisionLevels,
    theta: f64,
    phi: f64,
    cfg: &AcFieldConfig,
) -> Result<f64> {
    if levels.sigma != Sigma::Plus {
        return domain("the dressed ground state lives in the symmetric sector");
    }
    let om = 2.0 + cfg.delta;
    let det = |k: usize| SYMMETRIC_STATES[k].jtot as f64 * om - levels.energies[k];
    let oy = cfg.omega_y(phi, theta);
    let d0 = det(0);
    let mut e = -d0;
    for (i, k) in [1usize, 2, 3].into_iter().enumerate() {
        e += 2.0 * oy[i].norm_sqr() / (det(k) - d0);
    }
    Ok(e)
}

/// Large-r expansion of [`perturbative_ground`]:
/// `2Ω²/Δ + (2Ω²/Δ²)(2 − 3q²)(1 − 3cos²θ)/6r³`, from `C₃ = −2/3` (`Y = 0`) and `+1/3` (`|Y| = 1`).
pub fn perturbative_ground_asymptotic(r: f64, theta: f64, cfg: &AcFieldConfig) -> f64 {
    let o2 = cfg.omega_rabi.powi(2);
    let q2 = (cfg.q * cfg.q) as f64;
    let u = 1.0 - 3.0 * theta.cos().powi(2);
    2.0 * o2 / cfg.delta + 2.0 * o2 / cfg.delta.powi(2) * (2.0 - 3.0 * q2) * u / (6.0 * r.powi(3))
}

/// Three-state model of the Condon-point resonance:
/// `Ẽ/ħ = −Δ₊ + √(Δ₋² + 2Ω² sin²θ)` for `q = 0` and `−Δ₊ + √(Δ₋² + 2Ω²)` for `|q| = 1`,
/// with `Δ_{0;0} ≈ 0` and `Δ_{1;±1} ≈ Δ − d²/3ħr³`.
pub fn three_state_resonant_model(r: f64, theta: f64, cfg: &AcFieldConfig) -> f64 {
    let d11 = cfg.delta - 1.0 / (3.0 * r.powi(3));
    let (dp, dm) = (d11 / 2.0, d11 / 2.0);
    let o2 = cfg.omega_rabi.powi(2);
    let c2 = if cfg.q == 0 {
        2.0 * o2 * theta.sin().powi(2)
    } else {
        2.0 * o2
    };
    -dp + (dm * dm + c2).sqrt()
}

/// Dressed ground potential: adiabatically continued from `r → ∞`, where it
/// is the top of the symmetric dressed spectrum, and it stays on top.
pub fn dressed_ground(
    levels: &CollisionLevels,
    theta: f64,
    phi: f64,
    cfg: &AcFieldConfig,
) -> Result<f64> {
    let e = eigvalsh(&build_rwa_ac(levels, theta, phi, cfg)?);
    Ok(*e.last().expect("non-empty"))
}

/// Avoided-crossing gap near `r_C` and where it is smallest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub gap: f64,
    pub r: f64,
}

/// Splitting of the two dressed states carrying the ground pair and its
/// bright partner (the drive applied to `|0;0⟩`, kept on the resonant
/// `|Y| = 1` states) at one separation.
pub fn gap_at(basis: &PairBasis, r: f64, theta: f64, cfg: &AcFieldConfig) -> Result<f64> {
    let lv = collision_levels(basis, Sigma::Plus, r)?;
    let h = build_rwa_ac(&lv, theta, 0.0, cfg)?;
    let e = eigh(&h);
    let n = h.nrows();
    let mut bright = CVector::zeros(n);
    for k in [1usize, 3] {
        bright[k] = -h[(k, 0)];
    }
    let nb = bright.norm();
    if nb < 1e-14 * cfg.omega_rabi.max(1e-300) {
        bright[1] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        bright[3] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    } else {
        bright /= Complex64::new(nb, 0.0);
    }
    let mut w: Vec<(f64, usize)> = (0..n)
        .map(|k| {
            let col = e.vectors.column(k);
            (col[0].norm_sqr() + bright.dotc(&col).norm_sqr(), k)
        })
        .collect();
    w.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok((e.values[w[0].1] - e.values[w[1].1]).abs())
}

/// Minimal ground/bright splitting over `r ∈ [0.8, 1.2] r_C`.
pub fn shielding_gap(basis: &PairBasis, theta: f64, cfg: &AcFieldConfig) -> Result<GapResult> {
    let rc = cfg.r_condon();
    let xs: Vec<f64> = (0..41).map(|i| 0.8 + 0.01 * i as f64).collect();
    let vals: Vec<f64> = xs
        .iter()
        .map(|&x| gap_at(basis, x * rc, theta, cfg))
        .collect::<Result<_>>()?;
    let k = (0..vals.len())
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .expect("non-empty");
    let lo = xs[k.saturating_sub(1)];
    let hi = xs[(k + 1).min(xs.len() - 1)];
    let f = |x: f64| gap_at(basis, x * rc, theta, cfg).unwrap_or(f64::INFINITY);
    let (x, g) = minimize_bounded(lo, hi, 1e-9, f);
    Ok(if g <= vals[k] {
        GapResult { gap: g, r: x * rc }
    } else {
        GapResult {
            gap: vals[k],
            r: xs[k] * rc,
        }
    })
}

/// Separation where the dressed ground state crosses the top antisymmetric
/// dressed state, searched over `[1.02, 1.8] r_C`.
pub fn antisymmetric_crossing(basis: &PairBasis, theta: f64, cfg: &AcFieldConfig) -> Result<f64> {
    let rc = cfg.r_condon();
    let f = |x: f64| -> f64 {
        let r = x * rc;
        let top = |sigma| -> f64 {
            let lv = collision_levels(basis, sigma, r).expect("labels");
            let h = build_rwa_ac(&lv, theta, 0.0, cfg).expect("explicit matrix");
            *eigvalsh(&h).last().expect("non-empty")
        };
        top(Sigma::Plus) - top(Sigma::Minus)
    };
    let mut conv = roots::SimpleConvergency {
        eps: 1e-12,
        max_iter: 200,
    };
    roots::find_root_brent(1.02, 1.8, &f, &mut conv)
        .map(|x| x * rc)
        .map_err(|e| Error::Convergence {
            what: format!("antisymmetric crossing: {e:?}"),
            residual: f64::NAN,
        })
}

/// `(r_C, r_C')` of the AC-only problem: `(d²/3ħΔ)^{1/3}` and `2^{1/3} r_C`.
pub fn ac_only_condon_radii(cfg: &AcFieldConfig) -> (f64, f64) {
    let rc = cfg.r_condon();
    (rc, 2f64.cbrt() * rc)
}

/// Condon points of the DC+AC problem at polar angle `θ`, from the table `C₃`:
/// `r_C` exists for `cos²θ < 1/3`, `r_C'` for `cos²θ > 1/3`.
pub fn condon_points(theta: f64, cfg: &AcFieldConfig, beta: f64) -> (Option<f64>, Option<f64>) {
    let t = dc_table(beta, std::f64::consts::FRAC_PI_2);
    let (c00, c10p, c10m) = (t[0].c3, t[5].c3, t[6].c3);
    let u = 1.0 - 3.0 * theta.cos().powi(2);
    if u.abs() < 1e-12 {
        return (None, None);
    }
    let rc = ((c10p - c00) * u / cfg.delta).cbrt();
    let rcp = ((c00 - c10m) * (-u) / cfg.delta).cbrt();
    if u > 0.0 {
        (Some(rc), None)
    } else {
        (None, Some(rcp))
    }
}

/// Dressed `M = 0` energies from the reduced four-state model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedM0 {
    /// Symmetric `J = 0, 1, 2` branches (descending energy, adiabatic labels).
    pub symmetric: [f64; 3],
    pub antisymmetric: f64,
    /// Detunings `Δ_{J;0;+}` and `Δ_{1;0;−}` used.
    pub detunings: [f64; 4],
    /// True when the closed form was replaced by the eigensolver.
    pub fallback: bool,
}

/// Table detunings `Δ_J = JΔ − (C₃Υ/r³ + C₆/r⁶)` of the `M = 0` states:
/// `[J=0, J=1 (σ=+), J=2, J=1 (σ=−)]`.
pub fn m0_detunings(r: f64, theta: f64, cfg: &AcFieldConfig, beta: f64) -> [f64; 4] {
    let t = dc_table(beta, theta);
    let e = |n: usize| t[n].c3 / r.powi(3) + t[n].c6x6 / 6.0 / r.powi(6);
    [
        -e(0),
        cfg.delta - e(5),
        2.0 * cfg.delta - e(15),
        cfg.delta - e(6),
    ]
}

/// Closed-form (Cardano) roots of `−A` with
/// `A = [[Δ₀, √2Ω, 0], [√2Ω, Δ₁, √2Ω], [0, √2Ω, Δ₂]]`, descending. `None` near a triple root.
pub fn cubic_closed_form(d: [f64; 3], omega: f64) -> Option<[f64; 3]> {
    let mean = (d[0] + d[1] + d[2]) / 3.0;
    let a = [d[0] - mean, d[1] - mean, d[2] - mean];
    let o2 = omega * omega;
    let p = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]) / 2.0 + 4.0 * o2;
    let q = a[0] * a[1] * a[2] + 2.0 * o2 * a[1];
    let scale = d.iter().map(|x| x.abs()).fold(omega.abs(), f64::max);
    if p <= 1e-24 * scale * scale {
        return None;
    }
    // y³ − P y − Q = 0 with y = λ − Δ̄ an eigenvalue of A
    let disc = (p.powi(3) / 27.0 - q * q / 4.0).max(0.0);
    let u = Complex64::new(q / 2.0, disc.sqrt()).cbrt();
    let mut out = [0.0; 3];
    for (j, o) in out.iter_mut().enumerate() {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 3.0);
        *o = -(2.0 * (w * u).re + mean);
    }
    out.sort_by(|x, y| y.total_cmp(x));
    Some(out)
}

/// Direct diagonalization of the same 3×3 problem, descending.
pub fn cubic_by_eigensolver(d: [f64; 3], omega: f64) -> [f64; 3] {
    let s = std::f64::consts::SQRT_2 * omega;
    let a = Matrix3::new(-d[0], -s, 0.0, -s, -d[1], -s, 0.0, -s, -d[2]);
    let mut v: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    [v[0], v[1], v[2]]
}

pub fn reduced_m0_model(r: f64, theta: f64, cfg: &AcFieldConfig, beta: f64) -> ReducedM0 {
    let det = m0_detunings(r, theta, cfg, beta);
    let d = [det[0], det[1], det[2]];
    let (symmetric, fallback) = match cubic_closed_form(d, cfg.omega_rabi) {
        Some(x) => (x, false),
        None => (cubic_by_eigensolver(d, cfg.omega_rabi), true),
    };
    ReducedM0 {
        symmetric,
        antisymmetric: -det[3],
        detunings: det,
        fallback,
    }
}

/// Validity guard of the reduced model: `Δ ≤ δ/5`.
pub fn reduced_model_valid(cfg: &AcFieldConfig, delta_dc: f64) -> bool {
    cfg.delta <= delta_dc / 5.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermiticity_defect;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn cfg(q: i32, ratio: f64) -> AcFieldConfig {
        AcFieldConfig::new(q, 3e-6, 3e-6 * ratio).unwrap()
    }

    #[test]
    fn c_pm_constants() {
        let s3 = 3f64.sqrt();
        assert!((C_PLUS_AC - ((1.0 + 1.0 / s3) / 2.0).sqrt()).abs() < 1e-16);
        assert!((C_MINUS_AC - ((1.0 - 1.0 / s3) / 2.0).sqrt()).abs() < 1e-16);
        let (p, m) = c_pm_dc(FRAC_PI_2);
        assert!((p * p + m * m - 2.0).abs() < 1e-14);
    }

    #[test]
    fn explicit_couplings_match_dipole_operator() {
        let basis = PairBasis::new(2, 0.0).unwrap();
        for sigma in [Sigma::Plus, Sigma::Minus] {
            let k = to_complex(&explicit_kets(&basis, sigma).unwrap());
            for y in -1..=1 {
                let m = k.adjoint() * basis.total_dipole(y) * &k * Complex64::new(3f64.sqrt(), 0.0);
                let mut want = CMatrix::zeros(k.ncols(), k.ncols());
                for (yy, e, l, c) in couplings(sigma) {
                    if yy == y {
                        want[(e, l)] = Complex64::new(c, 0.0);
                    }
                }
                for e in 0..k.ncols() {
                    for l in 0..e {
                        let st = rwa_states(sigma);
                        if st[e].jtot == st[l].jtot + 1 {
                            assert!(
                                (m[(e, l)] - want[(e, l)]).norm() < 1e-12,
                                "{sigma:?} Y={y} ({e},{l})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn zero_rabi_gives_detunings() {
        let basis = PairBasis::new(2, 0.0).unwrap();
        let lv = collision_levels(&basis, Sigma::Plus, 60.0).unwrap();
        let h = build_rwa_ac(&lv, 0.7, 0.3, &cfg(0, 0.0)).unwrap();
        assert!((h.clone() - CMatrix::from_diagonal(&h.diagonal())).norm() == 0.0);
        assert!(lv.purity.iter().all(|&p| p > 0.999));
    }

    #[test]
    fn in_plane_linear_couplings() {
        let c = cfg(0, 0.25);
        let oy = c.omega_y(0.0, FRAC_PI_2);
        assert!((oy[0].norm() - c.omega_rabi / SQRT_2).abs() < 1e-18);
        assert!(oy[1].norm() < 1e-18);
        let c1 = cfg(1, 0.25);
        for th in [0.0, 0.4, 1.3] {
            let oy = c1.omega_y(0.9, th);
            // the printed Ω_± pair with Y = ∓1 here
            assert!((oy[0].norm() - c1.omega_rabi * (1.0 - th.cos()) / 2.0).abs() < 1e-18);
            assert!((oy[2].norm() - c1.omega_rabi * (1.0 + th.cos()) / 2.0).abs() < 1e-18);
        }
    }

    #[test]
    fn explicit_and_numeric_engines_agree() {
        let basis = PairBasis::new(2, 0.0).unwrap();
        let c = cfg(0, 0.25);
        let r = 1.1 * c.r_condon();
        for sigma in [Sigma::Plus, Sigma::Minus] {
            let lv = collision_levels(&basis, sigma, r).unwrap();
            let a = eigvalsh(&build_rwa_ac(&lv, 0.8, 0.0, &c).unwrap());
            let b = eigvalsh(
                &numeric_rwa(&basis, sigma, r, 0.8, 0.0, &c)
                    .unwrap()
                    .hamiltonian,
            );
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-4 * c.omega_rabi, "{sigma:?} {x} {y}");
            }
        }
    }

    #[test]
    fn rwa_hermitian_and_phi_independent() {
        let basis = PairBasis::new(2, 0.0).unwrap();
        let c = cfg(1, 0.25);
        let lv = collision_levels(&basis, Sigma::Plus, 70.0).unwrap();
        let h0 = build_rwa_ac(&lv, 1.0, 0.0, &c).unwrap();
        let h1 = build_rwa_ac(&lv, 1.0, 2.1, &c).unwrap();
        assert!(hermiticity_defect(&h1) < 1e-13 * c.omega_rabi);
        for (x, y) in eigvalsh(&h0).iter().zip(eigvalsh(&h1)) {
            assert!((x - y).abs() < 1e-12 * c.omega_rabi.max(1e-300) + 1e-18);
        }
    }

    #[test]
    fn three_state_limits() {
        let c = cfg(0, 0.25);
        let rc = c.r_condon();
        let e = three_state_resonant_model(rc, FRAC_PI_2, &c);
        assert!((e - SQRT_2 * c.omega_rabi).abs() < 1e-18);
        let r = 0.9 * rc;
        let d = c.delta - 1.0 / (3.0 * r.powi(3));
        let e = three_state_resonant_model(r, 0.0, &c);
        assert!((e - (-d / 2.0 + (d / 2.0).abs())).abs() < 1e-20);
    }

    #[test]
    fn cardano_matches_eigensolver() {
        let c = AcFieldConfig::new(0, 3e-6, 0.75e-6).unwrap();
        for &r in &[30.0, 48.0, 70.0, 200.0] {
            for &th in &[0.0, 0.6, FRAC_PI_2] {
                let m = reduced_m0_model(r, th, &c, 0.1);
                let d = [m.detunings[0], m.detunings[1], m.detunings[2]];
                let ev = cubic_by_eigensolver(d, c.omega_rabi);
                for k in 0..3 {
                    assert!((m.symmetric[k] - ev[k]).abs() < 1e-10 * c.delta);
                }
            }
        }
        let z = cubic_closed_form([0.0, 1e-6, 3e-6], 0.0).unwrap();
        assert!(
            (z[0] - 0.0).abs() < 1e-20
                && (z[1] + 1e-6).abs() < 1e-20
                && (z[2] + 3e-6).abs() < 1e-20
        );
        assert!(cubic_closed_form([1.0, 1.0, 1.0], 0.0).is_none());
    }

    #[test]
    fn condon_points_in_plane_and_magic() {
        let c = cfg(0, 0.25);
        let (rc, rcp) = condon_points(FRAC_PI_2, &c, 1e-8);
        assert!((rc.unwrap() - c.r_condon()).abs() < 1e-6 * c.r_condon());
        assert!(rcp.is_none());
        let magic = (1.0 / 3f64.sqrt()).acos();
        assert_eq!(condon_points(magic, &c, 0.1), (None, None));
        assert!(condon_points(0.1, &c, 0.1).1.is_some());
        let (a, b) = ac_only_condon_radii(&c);
        assert!((b / a - 2f64.cbrt()).abs() < 1e-15);
    }
}
