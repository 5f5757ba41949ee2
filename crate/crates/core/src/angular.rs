//! Angular-momentum algebra for integer spins: Clebsch-Gordan coefficients,
//! rank-1 reduced spherical harmonics, the j=1 Wigner rotation matrix and
//! single-rotor dipole matrix elements. Condon-Shortley phases throughout.

use nalgebra::Matrix3;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// A rotor state `|J, M⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AngMom {
    pub j: u32,
    pub m: i32,
}

impl AngMom {
    pub fn new(j: i32, m: i32) -> Result<Self> {
        if j < 0 {
            return domain(format!("negative angular momentum j={j}"));
        }
        if m.abs() > j {
            return domain(format!("|m|={} exceeds j={j}", m.abs()));
        }
        Ok(AngMom { j: j as u32, m })
    }
}

/// Spherical component index `q` of a rank-`k` tensor, `|q| ≤ k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphericalComponent {
    pub k: u32,
    pub q: i32,
}

impl SphericalComponent {
    pub fn new(k: u32, q: i32) -> Result<Self> {
        if q.unsigned_abs() > k {
            return domain(format!("|q|={} exceeds rank {k}", q.abs()));
        }
        Ok(SphericalComponent { k, q })
    }
}

fn factorial(n: i64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Squared CG coefficient times its sign, as an exact rational.
fn clebsch_gordan_exact(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> (BigRational, i32) {
    let zero = (BigRational::zero(), 0);
    if m != m1 + m2 || j < (j1 - j2).abs() || j > j1 + j2 {
        return zero;
    }
    if m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return zero;
    }
    let f = factorial;
    let pre = BigRational::new(
        BigInt::from(2 * j + 1) * f(j1 + j2 - j) * f(j1 - j2 + j) * f(-j1 + j2 + j),
        f(j1 + j2 + j + 1),
    );
    let norm = f(j1 + m1) * f(j1 - m1) * f(j2 + m2) * f(j2 - m2) * f(j + m) * f(j - m);
    let kmin = 0.max(j2 - j - m1).max(j1 - j + m2);
    let kmax = (j1 + j2 - j).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = f(k)
            * f(j1 + j2 - j - k)
            * f(j1 - m1 - k)
            * f(j2 + m2 - k)
            * f(j - j2 + m1 + k)
            * f(j - j1 - m2 + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return zero;
    }
    let sign = if sum.is_negative() { -1 } else { 1 };
    let sq = pre * BigRational::from_integer(norm) * &sum * &sum;
    (sq, sign)
}

/// `(j1,m1; j2,m2 | j,m)` from the exact Racah sum.
///
/// Vanishes when `m ≠ m1 + m2`, when the triangle rule fails or when any
/// `|m| > j`.
pub fn clebsch_gordan(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> Result<f64> {
    if j1 < 0 || j2 < 0 || j < 0 {
        return domain(format!("negative j in CG ({j1},{j2},{j})"));
    }
    let (sq, sign) = clebsch_gordan_exact(
        j1 as i64, m1 as i64, j2 as i64, m2 as i64, j as i64, m as i64,
    );
    if sign == 0 {
        return Ok(0.0);
    }
    let v = sq.to_f64().unwrap_or(f64::NAN).sqrt();
    Ok(sign as f64 * v)
}

/// Reduced spherical harmonic `C^(1)_q(θ, φ)`.
pub fn c1(q: i32, theta: f64, phi: f64) -> Complex64 {
    match q {
        0 => Complex64::new(theta.cos(), 0.0),
        1 => -Complex64::from_polar(theta.sin() / 2f64.sqrt(), phi),
        -1 => Complex64::from_polar(theta.sin() / 2f64.sqrt(), -phi),
        _ => Complex64::zero(),
    }
}

/// Small Wigner matrix `d¹_{q,Y}(θ)`.
pub fn small_d1(q: i32, y: i32, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match (q, y) {
        (1, 1) | (-1, -1) => (1.0 + c) / 2.0,
        (1, -1) | (-1, 1) => (1.0 - c) / 2.0,
        (1, 0) | (0, -1) => -s * r,
        (0, 1) | (-1, 0) => s * r,
        (0, 0) => c,
        _ => 0.0,
    }
}

/// `D¹_{q,Y}(φ, θ, 0) = ⟨1,q| e^{−iφJz} e^{−iθJy} |1,Y⟩`.
pub fn wigner_d1(q: i32, y: i32, phi: f64, theta: f64) -> Result<Complex64> {
    if q.abs() > 1 || y.abs() > 1 {
        return domain(format!("wigner_d1 index out of range (q={q}, Y={y})"));
    }
    Ok(Complex64::from_polar(
        small_d1(q, y, theta),
        -(q as f64) * phi,
    ))
}

/// The full 3×3 rotation matrix with rows `q` and columns `Y`, both ordered −1, 0, +1.
pub fn d1_matrix(phi: f64, theta: f64) -> Matrix3<Complex64> {
    Matrix3::from_fn(|i, j| {
        let (q, y) = (i as i32 - 1, j as i32 - 1);
        Complex64::from_polar(small_d1(q, y, theta), -(q as f64) * phi)
    })
}

/// Direction of a dipole transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

/// `⟨J±1, M+q| d_q |J, M⟩` in units of the permanent dipole.
pub fn dipole_element(j: i32, m: i32, q: i32, direction: Direction) -> Result<f64> {
    AngMom::new(j, m)?;
    if q.abs() > 1 {
        return domain(format!("dipole component q={q}"));
    }
    let jp = match direction {
        Direction::Up => j + 1,
        Direction::Down => j - 1,
    };
    if jp < 0 || (m + q).abs() > jp {
        return domain(format!("target |{jp},{}⟩ does not exist", m + q));
    }
    Ok(rotor_dipole(j, m, q, jp))
}

/// Dipole matrix element between arbitrary rotor states, zero unless `J' = J ± 1`.
pub(crate) fn rotor_dipole(j: i32, m: i32, q: i32, jp: i32) -> f64 {
    if (jp - j).abs() != 1 || (m + q).abs() > jp {
        return 0.0;
    }
    let a = clebsch_gordan(j, m, 1, q, jp, m + q).unwrap_or(0.0);
    let b = clebsch_gordan(j, 0, 1, 0, jp, 0).unwrap_or(0.0);
    a * b * (((2 * j + 1) as f64) / ((2 * jp + 1) as f64)).sqrt()
}

/// `⟨J,M| C^(2)_0 |J,M⟩ = (J(J+1) − 3M²)/((2J−1)(2J+3))` as a reduced fraction.
pub fn tensor_c20(j: u32, m: i32) -> (i64, i64) {
    let (j, m) = (j as i64, m as i64);
    let num = j * (j + 1) - 3 * m * m;
    let den = (2 * j - 1) * (2 * j + 3);
    if num == 0 {
        return (0, 1);
    }
    let g = gcd(num.abs(), den.abs());
    let s = if den < 0 { -1 } else { 1 };
    (s * num / g, s * den / g)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
