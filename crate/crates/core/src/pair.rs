//! Two-molecule internal Hamiltonian: DC-dressed product basis, the
//! dipole-dipole operator, Born-Oppenheimer surfaces and characteristic
//! length and energy scales of the DC-shielded ground state.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{c1, AngMom};
use crate::error::{Error, Result};
use crate::fit::{fit_inverse_powers, LongRangeFit};
use crate::linalg::{eigh, to_complex, CMatrix, CVector, Eigen};
use crate::rotor::{pendulum_spectrum, DipoleMoments, MoleculeParams, DEFAULT_JMAX};
use crate::surface::{assign_mu, track, Sigma, StateLabel, Surface, Track};

/// Product basis of DC-dressed single-molecule states `|φ_{J,M}⟩` with
/// `J ≤ jmax_single`, plus its symmetric and antisymmetric subspaces.
#[derive(Debug, Clone)]
pub struct PairBasis {
    pub jmax_single: u32,
    pub beta: f64,
    pub singles: Vec<AngMom>,
    pub single_energy: Vec<f64>,
    /// `E_{0,0}` of one molecule.
    pub e00: f64,
    dq: [DMatrix<f64>; 3],
    dd: Vec<(i32, i32, DMatrix<f64>)>,
    sym: DMatrix<f64>,
    anti: DMatrix<f64>,
    pub sym_pairs: Vec<(usize, usize)>,
    pub anti_pairs: Vec<(usize, usize)>,
}

impl PairBasis {
    pub fn new(jmax_single: u32, beta: f64) -> Result<PairBasis> {
        if jmax_single == 0 {
            return Err(Error::Config("pair basis needs jmax_single ≥ 1".into()));
        }
        let rotor = pendulum_spectrum(beta, DEFAULT_JMAX.max(jmax_single + 4))?;
        let singles: Vec<AngMom> = (0..=jmax_single as i32)
            .flat_map(|j| (-j..=j).map(move |m| AngMom { j: j as u32, m }))
            .collect();
        let n = singles.len();
        let nb = rotor.basis.len();
        let v = DMatrix::from_fn(nb, n, |i, k| {
            rotor.level(singles[k].j, singles[k].m).vector[i]
        });
        let single_energy: Vec<f64> = singles.iter().map(|s| rotor.energy(s.j, s.m)).collect();
        let dq = [-1, 0, 1].map(|q| v.transpose() * rotor.basis.dipole(q) * &v);
        let mut dd = Vec::new();
        for q1 in -1..=1 {
            for q2 in -1..=1 {
                dd.push((
                    q1,
                    q2,
                    dq[(q1 + 1) as usize].kronecker(&dq[(q2 + 1) as usize]),
                ));
            }
        }
        let mut sym_pairs = Vec::new();
        let mut anti_pairs = Vec::new();
        for a in 0..n {
            for b in a..n {
                sym_pairs.push((a, b));
                if a != b {
                    anti_pairs.push((a, b));
                }
            }
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut sym = DMatrix::zeros(n * n, sym_pairs.len());
        for (c, &(a, b)) in sym_pairs.iter().enumerate() {
            if a == b {
                sym[(a * n + a, c)] = 1.0;
            } else {
                sym[(a * n + b, c)] = h;
                sym[(b * n + a, c)] = h;
            }
        }
        let mut anti = DMatrix::zeros(n * n, anti_pairs.len());
        for (c, &(a, b)) in anti_pairs.iter().enumerate() {
            anti[(a * n + b, c)] = h;
            anti[(b * n + a, c)] = -h;
        }
        Ok(PairBasis {
            jmax_single,
            beta,
            singles,
            single_energy,
            e00: rotor.energy(0, 0),
            dq,
            dd,
            sym,
            anti,
            sym_pairs,
            anti_pairs,
        })
    }

    pub fn n_single(&self) -> usize {
        self.singles.len()
    }

    pub fn dim(&self) -> usize {
        self.singles.len().pow(2)
    }

    pub fn sector_dim(&self, sigma: Sigma) -> usize {
        match sigma {
            Sigma::Plus => self.sym_pairs.len(),
            Sigma::Minus => self.anti_pairs.len(),
        }
    }

    /// Columns spanning the σ subspace inside the product space.
    pub fn sector_basis(&self, sigma: Sigma) -> &DMatrix<f64> {
        match sigma {
            Sigma::Plus => &self.sym,
            Sigma::Minus => &self.anti,
        }
    }

    /// Single-molecule `d_q` in the dressed basis.
    pub fn single_dipole(&self, q: i32) -> &DMatrix<f64> {
        &self.dq[(q + 1) as usize]
    }

    /// `d_{q;1} + d_{q;2}` over the product space.
    pub fn total_dipole(&self, q: i32) -> CMatrix {
        let n = self.n_single();
        let id = DMatrix::<f64>::identity(n, n);
        let d = self.single_dipole(q);
        to_complex(&(d.kronecker(&id) + id.kronecker(d)))
    }

    /// Diagonal of a product-space operator built from a per-molecule function of the label.
    pub fn product_diag(&self, f: impl Fn(AngMom) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for a in &self.singles {
            for b in &self.singles {
                out.push(f(*a) + f(*b));
            }
        }
        out
    }

    /// `Σ_j (B J_j² − E_DC d_{0;j})`, diagonal in the dressed product basis.
    pub fn h0_diag(&self) -> Vec<f64> {
        let n = self.n_single();
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                out.push(self.single_energy[a] + self.single_energy[b]);
            }
        }
        out
    }

    /// `V_dd(r, θ, φ)` over the product basis, units `d²/r_B³ = B`.
    pub fn vdd(&self, r: f64, theta: f64, phi: f64) -> Result<CMatrix> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("separation r={r} must be positive")));
        }
        let dim = self.dim();
        let mut v = CMatrix::zeros(dim, dim);
        let inv = 1.0 / r.powi(3);
        for (q1, q2, m) in &self.dd {
            let t = dipolar_tensor(*q1, *q2, theta, phi) * inv;
            if t.norm() == 0.0 {
                continue;
            }
            v.zip_apply(m, |x, y| *x += t * y);
        }
        Ok(v)
    }

    /// Full internal Hamiltonian over the product basis.
    pub fn hamiltonian(&self, r: f64, theta: f64, phi: f64) -> Result<CMatrix> {
        let mut h = self.vdd(r, theta, phi)?;
        for (i, e) in self.h0_diag().into_iter().enumerate() {
            h[(i, i)] += e;
        }
        Ok(h)
    }

    /// Hamiltonian restricted to one permutation sector.
    pub fn sector_hamiltonian(
        &self,
        sigma: Sigma,
        r: f64,
        theta: f64,
        phi: f64,
    ) -> Result<CMatrix> {
        let h = self.hamiltonian(r, theta, phi)?;
        Ok(project(&h, self.sector_basis(sigma)))
    }

    /// Angular momentum component `n·(J₁ + J₂)` for a unit vector `(θ, φ)`,
    /// built on the rotor labels (exact at zero field).
    pub fn total_j_along(&self, theta: f64, phi: f64) -> CMatrix {
        let n = self.n_single();
        let mut jz = CMatrix::zeros(n, n);
        let mut jp = CMatrix::zeros(n, n);
        for (a, sa) in self.singles.iter().enumerate() {
            jz[(a, a)] = Complex64::new(sa.m as f64, 0.0);
            for (b, sb) in self.singles.iter().enumerate() {
                if sa.j == sb.j && sa.m == sb.m + 1 {
                    let j = sb.j as f64;
                    let m = sb.m as f64;
                    jp[(a, b)] = Complex64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
                }
            }
        }
        let jm = jp.adjoint();
        let jx = (&jp + &jm) * Complex64::new(0.5, 0.0);
        let jy = (&jp - &jm) * Complex64::new(0.0, -0.5);
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let j1 = jx * Complex64::new(st * cp, 0.0)
            + jy * Complex64::new(st * sp, 0.0)
            + jz * Complex64::new(ct, 0.0);
        let id = CMatrix::identity(n, n);
        j1.kronecker(&id) + id.kronecker(&j1)
    }
}

/// `T_{q1 q2}(θ, φ) = (−1)^{q1} δ_{q1,−q2} − 3(−1)^{q1+q2} C_{−q1} C_{−q2}`, so that
/// `V_dd = Σ T_{q1q2} d_{q1;1} d_{q2;2} / r³`.
pub fn dipolar_tensor(q1: i32, q2: i32, theta: f64, phi: f64) -> Complex64 {
    let sign = |k: i32| if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let mut t = -3.0 * sign(q1 + q2) * c1(-q1, theta, phi) * c1(-q2, theta, phi);
    if q1 == -q2 {
        t += sign(q1);
    }
    t
}

/// `Pᵀ H P` for a real isometry `P`.
pub fn project(h: &CMatrix, p: &DMatrix<f64>) -> CMatrix {
    let pc = to_complex(p);
    pc.transpose() * h * pc
}

pub fn vdd_matrix(r: f64, theta: f64, phi: f64, basis: &PairBasis) -> Result<CMatrix> {
    basis.vdd(r, theta, phi)
}

/// Options for a radial surface computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceOptions {
    pub jmax_single: u32,
    /// Number of lowest states tracked per sector; `None` tracks the `J₁,J₂ ≤ 1` states.
    pub n_track: Option<(usize, usize)>,
    pub degeneracy_tol: f64,
}

impl Default for SurfaceOptions {
    fn default() -> Self {
        SurfaceOptions {
            jmax_single: 2,
            n_track: None,
            degeneracy_tol: 1e-11,
        }
    }
}

/// Diagonalize one sector along `r` (ascending) at fixed angle.
pub fn sector_spectra(
    basis: &PairBasis,
    sigma: Sigma,
    rs: &[f64],
    theta: f64,
    phi: f64,
) -> Result<Vec<Eigen>> {
    rs.par_iter()
        .map(|&r| {
            basis
                .sector_hamiltonian(sigma, r, theta, phi)
                .map(|h| eigh(&h))
        })
        .collect()
}

/// Bare Born-Oppenheimer surfaces along `rs` at polar angle `theta`.
///
/// Tracks start at the largest `r`, where labels are read from expectation
/// values; both sectors are kept separate throughout.
pub fn bare_surfaces(rs: &[f64], theta: f64, beta: f64, opts: &SurfaceOptions) -> Result<Surface> {
    let basis = PairBasis::new(opts.jmax_single, beta)?;
    bare_surfaces_in(&basis, rs, theta, opts)
}

pub fn bare_surfaces_in(
    basis: &PairBasis,
    rs: &[f64],
    theta: f64,
    opts: &SurfaceOptions,
) -> Result<Surface> {
    if rs.is_empty() || rs.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Domain(
            "radial grid must be non-empty and positive".into(),
        ));
    }
    let mut order: Vec<usize> = (0..rs.len()).collect();
    order.sort_by(|&a, &b| rs[b].total_cmp(&rs[a]));
    let outer: Vec<f64> = order.iter().map(|&i| rs[i]).collect();
    let low = basis.n_single().min(4);
    let (ns, na) = opts.n_track.unwrap_or((sym_count(low), anti_count(low)));
    let jdiag = basis.product_diag(|s| s.j as f64);
    let mdiag = basis.product_diag(|s| s.m.unsigned_abs() as f64);
    let jr = basis.total_j_along(theta, 0.0);
    let mut tracks = Vec::new();
    let mut asym = Vec::new();
    for (sigma, count) in [(Sigma::Plus, ns), (Sigma::Minus, na)] {
        let eigs = sector_spectra(basis, sigma, &outer, theta, 0.0)?;
        let p = to_complex(basis.sector_basis(sigma));
        let start: Vec<usize> = (0..count.min(basis.sector_dim(sigma))).collect();
        let raw = track(&eigs, &start, opts.degeneracy_tol);
        for t in raw {
            let v: CVector = &p * &t.vectors[0];
            let jtot = expect_diag(&v, &jdiag).round() as u32;
            let proj = if basis.beta == 0.0 {
                let jv = &jr * &v;
                jv.norm_squared().sqrt().round() as u32
            } else {
                expect_diag(&v, &mdiag).round() as u32
            };
            let parity = (basis.beta == 0.0)
                .then(|| (sigma.sign() * if jtot.is_multiple_of(2) { 1 } else { -1 }) as i8);
            let mut energies = t.energies.clone();
            let mut overlaps = t.overlaps.clone();
            energies.reverse();
            overlaps.reverse();
            let n = rs.len();
            let crossings: Vec<usize> = t.crossings.iter().map(|&s| n - 1 - s).collect();
            asym.push(t.energies[0]);
            tracks.push(Track {
                label: StateLabel {
                    jtot,
                    proj,
                    mu: 0,
                    sigma,
                    parity,
                    band: None,
                },
                energies,
                overlaps,
                crossings,
                photon_offset: None,
            });
        }
    }
    let mut labels: Vec<StateLabel> = tracks.iter().map(|t| t.label).collect();
    assign_mu(&mut labels, &asym);
    for (t, l) in tracks.iter_mut().zip(labels) {
        t.label = l;
    }
    let mut sorted_r = rs.to_vec();
    sorted_r.sort_by(f64::total_cmp);
    Ok(Surface {
        theta,
        core: sorted_r.iter().map(|&r| r < 1.0).collect(),
        r: sorted_r,
        tracks,
    })
}

fn sym_count(n: usize) -> usize {
    n * (n + 1) / 2
}

fn anti_count(n: usize) -> usize {
    n * (n - 1) / 2
}

fn expect_diag(v: &CVector, diag: &[f64]) -> f64 {
    v.iter().zip(diag).map(|(c, d)| c.norm_sqr() * d).sum()
}

/// Fit every track over the part of the grid inside `window`.
pub fn fit_tracks(surface: &Surface, window: (f64, f64)) -> Result<Vec<LongRangeFit>> {
    let idx: Vec<usize> = (0..surface.r.len())
        .filter(|&i| surface.r[i] >= window.0 - 1e-12 && surface.r[i] <= window.1 + 1e-12)
        .collect();
    let r: Vec<f64> = idx.iter().map(|&i| surface.r[i]).collect();
    surface
        .tracks
        .iter()
        .map(|t| {
            let e: Vec<f64> = idx.iter().map(|&i| t.energies[i]).collect();
            fit_inverse_powers(&r, &e)
        })
        .collect()
}

/// Long-range coefficients of the DC ground state: `C₃;0 = g₀²`, `C₆;0 = −d⁴/6B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundCoefficients {
    pub c3: f64,
    pub c6: f64,
}

impl GroundCoefficients {
    pub fn from_beta(beta: f64) -> Self {
        let g0 = DipoleMoments::perturbative(beta).g0;
        GroundCoefficients {
            c3: g0 * g0,
            c6: -1.0 / 6.0,
        }
    }

    /// `r⋆ = (2|C₆|/C₃)^{1/3}`.
    pub fn r_star(&self) -> f64 {
        (2.0 * self.c6.abs() / self.c3).cbrt()
    }

    /// `V⋆ = C₃²/4|C₆|`.
    pub fn v_star(&self) -> f64 {
        self.c3 * self.c3 / (4.0 * self.c6.abs())
    }
}

/// `V_eff^3D(r, θ) = C₃;0(1 − 3cos²θ)/r³ + C₆;0/r⁶`.
pub fn v_eff_3d_dc(r: f64, theta: f64, beta: f64) -> f64 {
    let c = GroundCoefficients::from_beta(beta);
    let u = 1.0 - 3.0 * theta.cos().powi(2);
    c.c3 * u / r.powi(3) + c.c6 / r.powi(6)
}

/// Characteristic scales in natural units, with SI values when the molecule carries them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharScales {
    pub r_b: f64,
    pub r_star: Option<f64>,
    pub r_delta: Option<f64>,
    pub r_c: Option<f64>,
    pub v_star: Option<f64>,
    pub omega_c: Option<f64>,
    /// Saddle length `(12C₃;0/mω⊥²)^{1/5}`.
    pub ell_perp: Option<f64>,
    pub a_perp: Option<f64>,
    pub s0: Option<f64>,
    pub kappa: f64,
    pub si: Option<CharScalesSi>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharScalesSi {
    pub r_b_m: f64,
    pub r_star_m: Option<f64>,
    pub r_delta_m: Option<f64>,
    pub r_c_m: Option<f64>,
    pub v_star_j: Option<f64>,
    pub omega_c_rad_s: Option<f64>,
    pub ell_perp_m: Option<f64>,
    pub a_perp_m: Option<f64>,
}

/// Scales for optional `beta`, AC detuning `delta_ac` and trap frequency
/// `omega_perp` (all natural units). Scales whose inputs are absent stay `None`.
pub fn characteristic_scales(
    params: &MoleculeParams,
    beta: Option<f64>,
    delta_ac: Option<f64>,
    omega_perp: Option<f64>,
) -> Result<CharScales> {
    params.validate()?;
    let m = params.natural_mass();
    let ground = match beta {
        Some(b) if b > 0.0 => Some(GroundCoefficients::from_beta(b)),
        Some(b) => return Err(Error::Config(format!("r_star needs beta > 0, got {b}"))),
        None => None,
    };
    if let Some(d) = delta_ac {
        if !(d > 0.0) {
            return Err(Error::Config(format!(
                "r_C needs a positive detuning, got {d}"
            )));
        }
    }
    if let Some(w) = omega_perp {
        if !(w > 0.0) {
            return Err(Error::Config(format!(
                "ell_perp needs omega_perp > 0, got {w}"
            )));
        }
    }
    let r_star = ground.map(|g| g.r_star());
    let v_star = ground.map(|g| g.v_star());
    let omega_c = ground.map(|g| (12.0 * g.c3 / (m * g.r_star().powi(5))).sqrt());
    let s0 = ground.map(|g| (m * g.c6.abs()).sqrt() / g.r_star().powi(2));
    let r_delta = beta.map(|b| {
        let rot = pendulum_spectrum(b, DEFAULT_JMAX).expect("valid beta");
        (1.0 / rot.delta).cbrt()
    });
    let r_c = delta_ac.map(|d| (1.0 / (3.0 * d)).cbrt());
    let ell_perp = match (ground, omega_perp) {
        (Some(g), Some(w)) => Some((12.0 * g.c3 / (m * w * w)).powf(0.2)),
        _ => None,
    };
    let a_perp = omega_perp.map(|w| (1.0 / (m * w)).sqrt());
    let kappa = m.powf(1.5);
    let si = params.scale().map(|u| CharScalesSi {
        r_b_m: u.length_m,
        r_star_m: r_star.map(|x| u.length(x)),
        r_delta_m: r_delta.map(|x| u.length(x)),
        r_c_m: r_c.map(|x| u.length(x)),
        v_star_j: v_star.map(|x| u.energy(x)),
        omega_c_rad_s: omega_c.map(|x| u.angular_frequency(x)),
        ell_perp_m: ell_perp.map(|x| u.length(x)),
        a_perp_m: a_perp.map(|x| u.length(x)),
    });
    Ok(CharScales {
        r_b: 1.0,
        r_star,
        r_delta,
        r_c,
        v_star,
        omega_c,
        ell_perp,
        a_perp,
        s0,
        kappa,
        si,
    })
}
