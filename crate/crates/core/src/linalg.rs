//! Dense complex linear algebra used by the χ picture.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const CZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let svd = SVD::new(m.clone(), false, false);
    svd.singular_values[0]
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    SVD::new(m.clone(), false, false).singular_values.iter().copied().collect()
}

/// Thin SVD `m = U diag(s) V^H` with singular values in descending order.
pub fn svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let svd = SVD::new(m.clone(), true, true);
    let s = svd.singular_values.iter().copied().collect();
    (svd.u.expect("u requested"), s, svd.v_t.expect("v requested"))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Complex Schur form `m = Q U Q^H`; returns `(Q, U)`.
///
/// The shifted QR iteration can stall on exactly defective input (e.g. the
/// χ image of a Jordan block off `C_i`). After an iteration budget it is
/// restarted on fixed unitary similarities of `m`, whose rounding breaks
/// the stall.
pub fn schur(m: &CMatrix) -> (CMatrix, CMatrix) {
    let n = m.nrows();
    let budget = 100 * n.max(1);
    if let Some(s) = Schur::try_new(m.clone(), f64::EPSILON, budget) {
        return s.unpack();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5c4);
    for _ in 0..8 {
        let z = CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let v = z.qr().q();
        let b = v.adjoint() * m * &v;
        if let Some(s) = Schur::try_new(b, f64::EPSILON, 4 * budget) {
            let (q, u) = s.unpack();
            return (v * q, u);
        }
    }
    Schur::new(m.clone()).unpack()
}

/// Eigenvalues (with algebraic multiplicity) read off the Schur diagonal.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let (_, u) = schur(m);
    (0..u.nrows()).map(|i| u[(i, i)]).collect()
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    m.clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Domain("matrix is singular".into()))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Numerical rank with threshold `tol` on the singular values.
pub fn rank(m: &CMatrix, tol: f64) -> usize {
    singular_values(m).into_iter().filter(|&s| s > tol).count()
}
