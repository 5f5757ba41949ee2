//! A single rigid rotor in a DC field (the spherical pendulum), its induced
//! and transition dipole moments, two-level microwave dressing and the
//! tensor light shift.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::angular::{rotor_dipole, tensor_c20, AngMom};
use crate::error::{Error, Result};
use crate::linalg::eigh_real;
use crate::units::UnitScale;

pub const DEFAULT_JMAX: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    Natural,
    Si,
}

/// Molecule constants. In `Si` units `d` is in Debye, `b` is `B/h` in Hz and
/// `m` in amu; in `Natural` units `d = b = 1` and `m` is the dimensionless mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeParams {
    pub d: f64,
    pub b: f64,
    pub m: f64,
    pub units: UnitSystem,
}

impl MoleculeParams {
    pub fn natural(mass: f64) -> Self {
        MoleculeParams {
            d: 1.0,
            b: 1.0,
            m: mass,
            units: UnitSystem::Natural,
        }
    }

    pub fn si(dipole_debye: f64, b_hz: f64, mass_amu: f64) -> Self {
        MoleculeParams {
            d: dipole_debye,
            b: b_hz,
            m: mass_amu,
            units: UnitSystem::Si,
        }
    }

    /// SrO: 8.9 D, B = h·10 GHz, 104 amu.
    pub fn sro() -> Self {
        Self::si(8.9, 10e9, 104.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0 && self.b > 0.0 && self.m > 0.0) {
            return Err(Error::Config(format!(
                "molecule parameters must be positive: {self:?}"
            )));
        }
        Ok(())
    }

    /// Conversion to SI, or `None` for parameters given in natural units.
    pub fn scale(&self) -> Option<UnitScale> {
        match self.units {
            UnitSystem::Si => Some(UnitScale::from_si(self.d, self.b, self.m)),
            UnitSystem::Natural => None,
        }
    }

    /// Mass in units of `ħ²/(B r_B²)`.
    pub fn natural_mass(&self) -> f64 {
        match self.units {
            UnitSystem::Si => UnitScale::from_si(self.d, self.b, self.m).mass,
            UnitSystem::Natural => self.m * self.b.cbrt() / (self.d * self.d).powf(2.0 / 3.0),
        }
    }
}

/// Rotor basis `|J, M⟩` with `J ≤ jmax`, ordered by `J` then `M`, and the
/// spherical components `d_{−1}, d_0, d_{+1}` of the dipole operator.
#[derive(Debug)]
pub struct RotorBasis {
    pub jmax: u32,
    pub states: Vec<AngMom>,
    dq: [DMatrix<f64>; 3],
}

impl RotorBasis {
    pub fn get(jmax: u32) -> Arc<RotorBasis> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<RotorBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(jmax)
            .or_insert_with(|| Arc::new(RotorBasis::build(jmax)))
            .clone()
    }

    fn build(jmax: u32) -> RotorBasis {
        let states: Vec<AngMom> = (0..=jmax as i32)
            .flat_map(|j| (-j..=j).map(move |m| AngMom { j: j as u32, m }))
            .collect();
        let n = states.len();
        let dq = [-1, 0, 1].map(|q| {
            DMatrix::from_fn(n, n, |a, b| {
                let (sa, sb) = (states[a], states[b]);
                if sa.m != sb.m + q {
                    return 0.0;
                }
                rotor_dipole(sb.j as i32, sb.m, q, sa.j as i32)
            })
        });
        RotorBasis { jmax, states, dq }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index(&self, j: u32, m: i32) -> usize {
        (j * j) as usize + (m + j as i32) as usize
    }

    /// `d_q` for `q ∈ {−1, 0, +1}`.
    pub fn dipole(&self, q: i32) -> &DMatrix<f64> {
        &self.dq[(q + 1) as usize]
    }
}

/// One labeled pendulum eigenstate.
#[derive(Debug, Clone)]
pub struct RotorLevel {
    pub label: AngMom,
    pub energy: f64,
    pub vector: DVector<f64>,
}

/// Eigenpairs of `B J² − d₀E_DC + V₂C^(2)_0` in units of `B`.
#[derive(Debug, Clone)]
pub struct DcDressedRotor {
    pub beta: f64,
    pub jmax: u32,
    pub basis: Arc<RotorBasis>,
    pub levels: Vec<RotorLevel>,
    /// `ħδ = E_{1,0} − E_{1,±1}`.
    pub delta: f64,
    /// `ħω̄ = Σ_M (E_{1,M} − E_{0,0})/3`.
    pub omega_bar: f64,
    /// False when the cutoff is below the recommended `J_max ≥ 4`.
    pub cutoff_ok: bool,
}

impl DcDressedRotor {
    pub fn level(&self, j: u32, m: i32) -> &RotorLevel {
        &self.levels[self.basis.index(j, m)]
    }

    pub fn energy(&self, j: u32, m: i32) -> f64 {
        self.level(j, m).energy
    }

    /// `⟨φ_a| d_q |φ_b⟩`.
    pub fn matrix_element(&self, a: (u32, i32), q: i32, b: (u32, i32)) -> f64 {
        let va = &self.level(a.0, a.1).vector;
        let vb = &self.level(b.0, b.1).vector;
        va.dot(&(self.basis.dipole(q) * vb))
    }
}

pub fn pendulum_spectrum(beta: f64, jmax: u32) -> Result<DcDressedRotor> {
    pendulum_spectrum_with_tensor(beta, 0.0, jmax)
}

/// Pendulum spectrum with an additional tensor light shift `V₂` (units of `B`)
/// entering through the diagonal of `C^(2)_0`.
pub fn pendulum_spectrum_with_tensor(beta: f64, v2: f64, jmax: u32) -> Result<DcDressedRotor> {
    if jmax < 2 {
        return Err(Error::Config(format!(
            "rotor cutoff J_max={jmax} cannot hold the J=1 manifold"
        )));
    }
    if !(beta >= 0.0) {
        return Err(Error::Domain(format!(
            "field strength β={beta} must be non-negative"
        )));
    }
    let basis = RotorBasis::get(jmax);
    let n = basis.len();
    let d0 = basis.dipole(0);
    let mut levels: Vec<Option<RotorLevel>> = vec![None; n];
    for m in -(jmax as i32)..=(jmax as i32) {
        let js: Vec<u32> = (m.unsigned_abs()..=jmax).collect();
        let idx: Vec<usize> = js.iter().map(|&j| basis.index(j, m)).collect();
        let k = idx.len();
        let h = DMatrix::from_fn(k, k, |a, b| {
            let mut v = -beta * d0[(idx[a], idx[b])];
            if a == b {
                let j = js[a] as f64;
                let (num, den) = tensor_c20(js[a], m);
                v += j * (j + 1.0) + v2 * num as f64 / den as f64;
            }
            v
        });
        let (vals, vecs) = eigh_real(&h);
        for (s, &e) in vals.iter().enumerate() {
            let label = AngMom { j: js[s], m };
            let mut full = DVector::zeros(n);
            for (a, &i) in idx.iter().enumerate() {
                full[i] = vecs[(a, s)];
            }
            if full[basis.index(label.j, m)] < 0.0 {
                full.neg_mut();
            }
            levels[basis.index(label.j, m)] = Some(RotorLevel {
                label,
                energy: e,
                vector: full,
            });
        }
    }
    let levels: Vec<RotorLevel> = levels
        .into_iter()
        .map(|l| l.expect("every state labeled"))
        .collect();
    let e = |j: u32, m: i32| levels[basis.index(j, m)].energy;
    let delta = e(1, 0) - e(1, 1);
    let omega_bar = (e(1, -1) + e(1, 0) + e(1, 1)) / 3.0 - e(0, 0);
    Ok(DcDressedRotor {
        beta,
        jmax,
        basis,
        levels,
        delta,
        omega_bar,
        cutoff_ok: jmax >= 4,
    })
}

/// Second-order Stark energy `E_{J,M}/B`.
pub fn perturbative_energy(j: u32, m: i32, beta: f64) -> f64 {
    let jf = j as f64;
    let shift = if j == 0 {
        -1.0 / 3.0
    } else {
        (1.0 - 3.0 * (m * m) as f64 / (jf * (jf + 1.0))) / ((2.0 * jf - 1.0) * (2.0 * jf + 3.0))
    };
    jf * (jf + 1.0) + beta * beta / 2.0 * shift
}

/// `|E_{0,0}(jmax) − E_{0,0}(2·jmax)|`, the basis-cutoff self-test.
pub fn cutoff_stability(beta: f64, jmax: u32) -> Result<f64> {
    let a = pendulum_spectrum(beta, jmax)?.energy(0, 0);
    let b = pendulum_spectrum(beta, 2 * jmax)?.energy(0, 0);
    Ok((a - b).abs())
}

/// Permanent (`g`) and transition (`f`) dipole moments of the `J ≤ 1` states, units of `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleMoments {
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub f0: f64,
    pub f1: f64,
    pub f2: f64,
}

impl DipoleMoments {
    /// Third-order expansions in `β`, with `g₁` in the printed quotient form.
    pub fn perturbative(beta: f64) -> Self {
        let b2 = beta * beta;
        let r3 = 1.0 / 3f64.sqrt();
        DipoleMoments {
            g0: beta / 3.0 * (1.0 - 7.0 * b2 / 360.0),
            g1: beta / 10.0 / (1.0 - 3.0 * b2 / 5600.0),
            g2: -beta / 5.0 * (1.0 - 19.0 * b2 / 350.0),
            f0: r3 * (1.0 - 43.0 * b2 / 360.0),
            f1: r3 * (1.0 - 49.0 * b2 / 1440.0),
            f2: 3.0 * beta / 20.0 * (1.0 + 11.0 * b2 / 1400.0),
        }
    }

    /// `g₁` read as a product `(β/10)(1 − 3β²/5600)` instead of a quotient.
    pub fn g1_product_form(beta: f64) -> f64 {
        beta / 10.0 * (1.0 - 3.0 * beta * beta / 5600.0)
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.g0, self.g1, self.g2, self.f0, self.f1, self.f2]
    }

    pub const NAMES: [&'static str; 6] = ["g0", "g1", "g2", "f0", "f1", "f2"];
}

pub fn dipole_moments(rotor: &DcDressedRotor) -> DipoleMoments {
    DipoleMoments {
        g0: rotor.matrix_element((0, 0), 0, (0, 0)),
        g1: rotor.matrix_element((1, 1), 0, (1, 1)),
        g2: rotor.matrix_element((1, 0), 0, (1, 0)),
        f0: rotor.matrix_element((1, 0), 0, (0, 0)),
        f1: rotor.matrix_element((1, 1), 1, (0, 0)),
        f2: rotor.matrix_element((1, 0), -1, (1, 1)),
    }
}

/// Two-level microwave dressing of the `J = 0 ↔ 1` transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcDressedLevels {
    pub ground: f64,
    pub excited: f64,
    /// `(+Ω²/Δ, −Δ − Ω²/Δ)`, absent at zero detuning.
    pub weak: Option<(f64, f64)>,
}

pub fn ac_dressed_levels(delta: f64, omega_rabi: f64) -> AcDressedLevels {
    let root = (delta * delta / 4.0 + omega_rabi * omega_rabi).sqrt();
    let weak = (delta != 0.0).then(|| {
        let s = omega_rabi * omega_rabi / delta;
        (s, -delta - s)
    });
    AcDressedLevels {
        ground: -delta / 2.0 + root,
        excited: -delta / 2.0 - root,
        weak,
    }
}

/// `⟨J,M| C^(2)_0 |J,M⟩` as (numerator, denominator).
pub fn tensor_shift(j: u32, m: i32) -> Result<(i64, i64)> {
    if m.unsigned_abs() > j {
        return Err(Error::Domain(format!("|M|={} exceeds J={j}", m.abs())));
    }
    Ok(tensor_c20(j, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_rotor() {
        let r = pendulum_spectrum(0.0, 6).unwrap();
        for l in &r.levels {
            let j = l.label.j as f64;
            assert!((l.energy - j * (j + 1.0)).abs() < 1e-13);
        }
        let m = dipole_moments(&r);
        let r3 = 1.0 / 3f64.sqrt();
        assert!((m.f0 - r3).abs() < 1e-14 && (m.f1 - r3).abs() < 1e-14);
        for g in [m.g0, m.g1, m.g2, m.f2] {
            assert!(g.abs() < 1e-14);
        }
    }

    #[test]
    fn ground_energy_quartic_bound() {
        let beta: f64 = 0.2;
        let r = pendulum_spectrum(beta, 20).unwrap();
        let oracle = pendulum_spectrum(beta, 40).unwrap();
        let e = r.energy(0, 0);
        assert!((e - oracle.energy(0, 0)).abs() < 1e-12);
        let remainder = e + beta * beta / 6.0;
        // fourth-order coefficient of the pendulum ground state is 11/1080
        assert!(
            remainder.abs() <= 1.1 * 11.0 / 1080.0 * beta.powi(4),
            "{remainder}"
        );
        assert!((e - (-0.006667)).abs() < 2e-5);
    }

    #[test]
    fn splitting_and_mean_gap() {
        let beta: f64 = 0.2;
        let r = pendulum_spectrum(beta, 20).unwrap();
        assert!((r.delta - 3.0 * beta * beta / 20.0).abs() < 0.05 * beta.powi(4));
        assert!((r.omega_bar - (2.0 + beta * beta / 6.0)).abs() < 0.05 * beta.powi(4));
    }

    #[test]
    fn g0_at_tenth() {
        let r = pendulum_spectrum(0.1, 20).unwrap();
        let m = dipole_moments(&r);
        let p = DipoleMoments::perturbative(0.1);
        assert!((p.g0 - 0.033_326_9).abs() < 1e-7);
        assert!((m.g0 - p.g0).abs() < 5e-5, "{}", m.g0);
        assert!(m.g2 < 0.0);
        let oracle = dipole_moments(&pendulum_spectrum(0.1, 40).unwrap());
        assert!((m.g2 - oracle.g2).abs() < 1e-14);
        assert!((m.g2 - p.g2).abs() < 0.1f64.powi(4));
    }

    #[test]
    fn rejects_small_cutoff() {
        assert!(matches!(pendulum_spectrum(0.1, 1), Err(Error::Config(_))));
        assert!(!pendulum_spectrum(0.1, 3).unwrap().cutoff_ok);
    }

    #[test]
    fn two_level_dressing() {
        let l = ac_dressed_levels(1.0, 0.0);
        assert_eq!((l.ground, l.excited), (0.0, -1.0));
        let l = ac_dressed_levels(1.0, 0.25);
        // 2×2 oracle [[0, Ω], [Ω, −Δ]]
        let h = DMatrix::from_row_slice(2, 2, &[0.0, 0.25, 0.25, -1.0]);
        let (v, _) = eigh_real(&h);
        assert!((l.ground - v[1]).abs() < 1e-15 && (l.excited - v[0]).abs() < 1e-15);
        assert!((l.ground - 0.059017).abs() < 1e-6);
        let l = ac_dressed_levels(1.0, 1e-3);
        let (w, _) = l.weak.unwrap();
        assert!(((l.ground - w) / w).abs() < 2e-6);
        let l = ac_dressed_levels(0.0, 0.3);
        assert!(l.weak.is_none());
        assert!((l.ground - 0.3).abs() < 1e-15 && (l.excited + 0.3).abs() < 1e-15);
    }

    #[test]
    fn tensor_sum_rule() {
        assert_eq!(tensor_shift(1, 0).unwrap(), (2, 5));
        assert_eq!(tensor_shift(1, 1).unwrap(), (-1, 5));
        assert!(tensor_shift(0, 1).is_err());
        for j in 1..6u32 {
            let s: f64 = (-(j as i32)..=j as i32)
                .map(|m| {
                    let (a, b) = tensor_shift(j, m).unwrap();
                    a as f64 / b as f64
                })
                .sum();
            assert!(s.abs() < 1e-14);
        }
    }

    #[test]
    fn tensor_shift_moves_j1_levels() {
        let v2 = 0.01;
        let a = pendulum_spectrum_with_tensor(0.0, v2, 8).unwrap();
        assert!((a.energy(1, 0) - 2.0 - 0.4 * v2).abs() < 1e-14);
        assert!((a.energy(1, 1) - 2.0 + 0.2 * v2).abs() < 1e-14);
    }
}
