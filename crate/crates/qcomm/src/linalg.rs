//! Complex linear algebra primitives shared by the whole crate.
//!
//! Thin wrappers over [`nalgebra`] dense types with the handful of
//! decompositions the quantum layer needs:
//!
//! | Function | Computes | Used for |
//! |----------|----------|----------|
//! | [`eigh`] | eigensystem of a Hermitian matrix | validation, entropies, matrix functions |
//! | [`singular_values`] | singular value list | trace norm |
//! | [`svd_uv`] | full SVD with factors | Uhlmann unitaries, polar decompositions |
//! | [`kron`] | Kronecker product | tensor products of states/operators |
//! | [`hermiticity_deviation`] | max entry of \|m − m†\| | Hermiticity checks |
//!
//! All matrices are dynamically sized over `Complex<f64>`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex (column) vector used throughout the crate.
pub type CVector = DVector<Complex64>;

/// Shorthand complex constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Identity matrix of the given dimension.
pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Maximum entrywise magnitude of `m - m†` (0 for exactly Hermitian input).
///
/// Returns an error if the matrix is not square.
pub fn hermiticity_deviation(m: &CMatrix) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    Ok(dev)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns `(eigenvalues, eigenvectors)` where eigenvalues are real and
/// `eigenvectors` holds the corresponding orthonormal eigenvectors as
/// columns. The input is symmetrized as `(m + m†)/2` before decomposition to
/// shed floating-point noise, but the caller is expected to have verified
/// Hermiticity within its own tolerance first.
///
/// # Errors
///
/// [`Error::NotSquare`] for non-square input.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let decomp = sym.symmetric_eigen();
    let values = decomp.eigenvalues.iter().copied().collect();
    Ok((values, decomp.eigenvectors))
}

/// Singular values of an arbitrary rectangular matrix, descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    sv
}

/// Full SVD `m = U Σ V†`.
///
/// Returns `(u, sigma, v_t)` with `sigma` the singular values and `v_t = V†`.
pub fn svd_uv(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let sigma = svd.singular_values.iter().copied().collect();
    (u, sigma, v_t)
}

/// Kronecker product `a ⊗ b`.
///
/// Factor order matches the crate convention: `a` is the most significant
/// axis, so `(a ⊗ b)[(i0*rb + i1, j0*cb + j1)] = a[(i0,j0)] * b[(i1,j1)]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of two column vectors.
pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let (la, lb) = (a.len(), b.len());
    CVector::from_fn(la * lb, |i, _| a[i / lb] * b[i % lb])
}

/// Apply a real scalar function to a Hermitian matrix through its eigensystem:
/// `f(m) = V diag(f(λ)) V†`.
///
/// The eigenvalue filter `f` receives each eigenvalue and returns the
/// transformed value; it is the caller's responsibility to handle labels
/// outside `f`'s domain (e.g. clamping small negatives before `sqrt`).
pub fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let (vals, vecs) = eigh(m)?;
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| c64(f(v), 0.0)),
    ));
    Ok(&vecs * d * vecs.adjoint())
}

/// `true` when `m† m = I` within `tol` (max entrywise deviation).
pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    unitarity_deviation(m) <= tol
}

/// Max entrywise magnitude of `m†m − I`.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let mut dev: f64 = 0.0;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) };
            dev = dev.max((gram[(i, j)] - target).norm());
        }
    }
    dev
}

/// Real part of the trace.
pub fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// Inner product `⟨a|b⟩` with the physics convention (conjugate-linear in `a`).
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Outer product `|a⟩⟨b|`.
pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    CMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pauli_y() -> CMatrix {
        CMatrix::from_row_slice(
            2,
            2,
            &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)],
        )
    }

    #[test]
    fn eigh_recovers_pauli_y_spectrum() {
        let (vals, vecs) = eigh(&pauli_y()).unwrap();
        let mut sorted = vals.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_abs_diff_eq!(sorted[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sorted[1], 1.0, epsilon = 1e-12);
        // Reconstruction: V diag(λ) V† = m.
        let d =
            CMatrix::from_diagonal(&CVector::from_iterator(2, vals.iter().map(|&v| c64(v, 0.0))));
        let rebuilt = &vecs * d * vecs.adjoint();
        assert!((rebuilt - pauli_y()).norm() < 1e-12);
    }

    #[test]
    fn singular_values_of_signed_diagonal() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1.0, 0.0), c64(-1.0, 0.0)]));
        let sv = singular_values(&m);
        assert_abs_diff_eq!(sv[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sv[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn svd_reconstructs() {
        let m = CMatrix::from_row_slice(
            2,
            3,
            &[
                c64(1.0, 0.5),
                c64(0.0, -1.0),
                c64(2.0, 0.0),
                c64(0.3, 0.3),
                c64(-1.0, 0.0),
                c64(0.0, 0.7),
            ],
        );
        let (u, s, v_t) = svd_uv(&m);
        let sigma = CMatrix::from_fn(u.ncols(), v_t.nrows(), |i, j| {
            if i == j {
                c64(s[i], 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        let rebuilt = u * sigma * v_t;
        assert!((rebuilt - m).norm() < 1e-10);
    }

    #[test]
    fn kron_matches_hand_example() {
        let i2 = identity(2);
        assert!((kron(&i2, &i2) - identity(4)).norm() < 1e-15);
        // |0⟩ ⊗ |1⟩ = basis index 1 of dim 4 (factor 0 most significant).
        let e0 = CVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]);
        let e1 = CVector::from_vec(vec![c64(0.0, 0.0), c64(1.0, 0.0)]);
        let v = kron_vec(&e0, &e1);
        assert_abs_diff_eq!(v[1].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.iter().map(|z| z.norm_sqr()).sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn hermitian_map_sqrt_of_diagonal() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(4.0, 0.0), c64(9.0, 0.0)]));
        let s = hermitian_map(&m, f64::sqrt).unwrap();
        assert_abs_diff_eq!(s[(0, 0)].re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[(1, 1)].re, 3.0, epsilon = 1e-12);
        assert!(s[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn hermiticity_deviation_detects_asymmetry() {
        let mut m = identity(2);
        m[(0, 1)] = c64(0.0, 1e-3);
        let dev = hermiticity_deviation(&m).unwrap();
        assert!(dev > 9e-4 && dev < 2e-3);
    }

    #[test]
    fn unitarity_check() {
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[c64(1.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0)],
        )
        .scale(std::f64::consts::FRAC_1_SQRT_2);
        assert!(is_unitary(&h, 1e-12));
        assert!(!is_unitary(&h.scale(1.01), 1e-6));
    }
}
