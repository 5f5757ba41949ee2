//! Small dense Hermitian eigenproblems with deterministic ordering and phases.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Diagonalize a Hermitian matrix. Eigenvectors are phase-fixed so that the
/// first non-negligible component is real and positive.
pub fn eigh(h: &CMatrix) -> Eigen {
    let n = h.nrows();
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let e = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let mut vectors = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (k, &i) in order.iter().enumerate() {
        values.push(e.eigenvalues[i]);
        let mut col = e.eigenvectors.column(i).into_owned();
        fix_phase(&mut col);
        vectors.set_column(k, &col);
    }
    Eigen { values, vectors }
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(h: &CMatrix) -> Vec<f64> {
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let mut v: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Real symmetric eigenproblem, ascending, first significant component positive.
pub fn eigh_real(h: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = h.nrows();
    let sym = (h + h.transpose()) * 0.5;
    let e = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let mut vecs = DMatrix::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (k, &i) in order.iter().enumerate() {
        vals.push(e.eigenvalues[i]);
        let mut col = e.eigenvectors.column(i).into_owned();
        let big = col.amax();
        if let Some(c) = col.iter().find(|c| c.abs() > 1e-8 * big) {
            if *c < 0.0 {
                col.neg_mut();
            }
        }
        vecs.set_column(k, &col);
    }
    (vals, vecs)
}

pub fn fix_phase(col: &mut CVector) {
    let big = col.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if let Some(c) = col.iter().find(|c| c.norm() > 1e-8 * big).copied() {
        let ph = c.conj() / c.norm();
        col.iter_mut().for_each(|x| *x *= ph);
    }
}

/// Frobenius norm of `a − a†`.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    (a - a.adjoint()).norm()
}

pub fn to_complex(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

/// `⟨u| A |v⟩`.
pub fn braket(u: &CVector, a: &CMatrix, v: &CVector) -> Complex64 {
    u.dotc(&(a * v))
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_splitting() {
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.5),
                Complex64::new(0.0, -0.5),
                Complex64::new(1.0, 0.0),
            ],
        );
        let e = eigh(&h);
        let w = (0.25f64 + 0.25).sqrt();
        assert!((e.values[0] - (0.5 - w)).abs() < 1e-14);
        assert!((e.values[1] - (0.5 + w)).abs() < 1e-14);
        let v0 = e.vectors.column(0).into_owned();
        assert!(v0[0].im.abs() < 1e-14 && v0[0].re > 0.0);
        let hv = &h * &v0;
        assert!((hv - v0 * Complex64::new(e.values[0], 0.0)).norm() < 1e-13);
    }
}
