//! Quaternionic matrices acting on the right ℍ-module ℍⁿ.
//!
//! A matrix `T = A + B j` (with `A`, `B` having entries in `C_i`) is mapped to
//! its complex adjoint representation
//!
//! ```text
//! χ(T) = [[ A,       B      ],
//!         [ -conj B, conj A ]]
//! ```
//!
//! which is a real-linear, injective *-homomorphism into 2n×2m complex
//! matrices. A column vector `v = a + b j` corresponds to `[a; -conj b]`, and
//! right multiplication by `i` corresponds to complex scalar multiplication.
//! All eigen and singular value work is done on χ(T).

mod decomp;
mod slice;

pub use decomp::{cartesian, modulus, polar, sqrt_positive, Cartesian, Polar};
pub use slice::{extend, restrict, slice_split, AntiSelfAdjointUnitary, PlusBasis};

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, CZERO};
use crate::quaternion::Quaternion;

/// Tolerance for membership in the image of χ.
pub const CHI_TOL: f64 = 1e-12;

/// Largest χ dimension handled by a dense SVD in [`QMatrix::op_norm`].
pub const DENSE_NORM_LIMIT: usize = 400;

#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Quaternion::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Quaternion::ONE)
    }

    /// `q I`.
    pub fn scalar(n: usize, q: Quaternion) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = q;
        }
        m
    }

    pub fn from_diag(d: &[Quaternion]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &q) in d.iter().enumerate() {
            m[(i, i)] = q;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Quaternion>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(QMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Quaternion>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_row_major(n, m, rows.concat())
    }

    /// Column vector as an n×1 matrix.
    pub fn column(v: &[Quaternion]) -> Self {
        QMatrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    /// A complex matrix viewed as a quaternionic matrix with entries in `C_i`.
    pub fn from_complex(m: &CMatrix) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| Quaternion::from_complex(m[(r, c)]))
    }

    /// Entries standard-normal in each component.
    pub fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        Self::from_fn(rows, cols, |_, _| random_quaternion(rng))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Quaternion] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Quaternion> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_col(&mut self, c: usize, v: &[Quaternion]) {
        for (r, &q) in v.iter().enumerate() {
            self[(r, c)] = q;
        }
    }

    pub fn diagonal(&self) -> Vec<Quaternion> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|q| q * s)
    }

    /// `q · T`, entrywise left multiplication.
    pub fn left_scalar(&self, q: Quaternion) -> Self {
        self.map(|x| q * x)
    }

    /// `T · q`, entrywise right multiplication.
    pub fn right_scalar(&self, q: Quaternion) -> Self {
        self.map(|x| x * q)
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&q| f(q)).collect() }
    }

    /// `(Tv)_r = Σ_c T_rc v_c`.
    pub fn apply(&self, v: &[Quaternion]) -> Vec<Quaternion> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `XT - TX`.
    pub fn commutator(&self, other: &QMatrix) -> QMatrix {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    /// Operator norm `sup ‖Tx‖ / ‖x‖`, the largest singular value of χ(T).
    ///
    /// Dense SVD up to [`DENSE_NORM_LIMIT`]; beyond that, power iteration on
    /// `T*T` run to a relative change of 1e-15.
    pub fn op_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        if 2 * self.rows.max(self.cols) <= DENSE_NORM_LIMIT {
            linalg::spectral_norm(&self.chi())
        } else {
            self.power_norm(1e-15, 20_000)
        }
    }

    /// Largest singular value by power iteration on `T*T`, seeded deterministically.
    pub fn power_norm(&self, rtol: f64, max_iter: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut v: Vec<Quaternion> = (0..self.cols).map(|_| random_quaternion(&mut rng)).collect();
        let adj = self.adjoint();
        let mut lambda = 0.0;
        for _ in 0..max_iter {
            let nv = vec_norm(&v);
            if nv == 0.0 {
                return 0.0;
            }
            v.iter_mut().for_each(|q| *q = *q / nv);
            let w = adj.apply(&self.apply(&v));
            let next = inner(&v, &w).re();
            v = w;
            if (next - lambda).abs() <= rtol * next.abs() {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.max(0.0).sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && (self - &self.adjoint()).max_abs() <= tol
    }

    /// The complex adjoint representation χ(T).
    pub fn chi(&self) -> CMatrix {
        let (n, m) = (self.rows, self.cols);
        let mut out = CMatrix::zeros(2 * n, 2 * m);
        for r in 0..n {
            for c in 0..m {
                let (a, b) = self[(r, c)].to_pair();
                out[(r, c)] = a;
                out[(r, m + c)] = b;
                out[(n + r, c)] = -b.conj();
                out[(n + r, m + c)] = a.conj();
            }
        }
        out
    }

    /// Inverse of χ; rejects matrices outside its image.
    pub fn chi_inv(m: &CMatrix) -> Result<QMatrix> {
        Self::chi_inv_tol(m, CHI_TOL)
    }

    pub fn chi_inv_tol(m: &CMatrix, tol: f64) -> Result<QMatrix> {
        let defect = chi_defect(m)?;
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if defect > tol * scale {
            return Err(Error::Validation(format!(
                "matrix is not in the image of χ (symplectic defect {defect:e})"
            )));
        }
        let (n, k) = (m.nrows() / 2, m.ncols() / 2);
        Ok(QMatrix::from_fn(n, k, |r, c| Quaternion::from_pair(m[(r, c)], m[(r, k + c)])))
    }

    /// Nearest preimage: averages the two copies of each block.
    pub(crate) fn chi_project(m: &CMatrix) -> QMatrix {
        let (n, k) = (m.nrows() / 2, m.ncols() / 2);
        QMatrix::from_fn(n, k, |r, c| {
            let a = (m[(r, c)] + m[(n + r, k + c)].conj()) * 0.5;
            let b = (m[(r, k + c)] - m[(n + r, c)].conj()) * 0.5;
            Quaternion::from_pair(a, b)
        })
    }

    /// Entries as complex numbers when every entry lies in `C_i`.
    pub fn to_complex(&self, tol: f64) -> Result<CMatrix> {
        let mut out = CMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let (a, b) = self[(r, c)].to_pair();
                if b.norm() > tol {
                    return Err(Error::Validation(format!("entry ({r},{c}) leaves the slice C_i")));
                }
                out[(r, c)] = a;
            }
        }
        Ok(out)
    }

    /// Real coordinates `(w, x, y, z)` of every entry, row-major.
    pub fn to_real_coords(&self) -> Vec<f64> {
        self.data.iter().flat_map(|q| q.to_array()).collect()
    }

    pub fn from_real_coords(rows: usize, cols: usize, coords: &[f64]) -> Self {
        assert_eq!(coords.len(), 4 * rows * cols);
        QMatrix {
            rows,
            cols,
            data: coords.chunks_exact(4).map(|c| Quaternion::new(c[0], c[1], c[2], c[3])).collect(),
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> QMatrix {
        QMatrix::from_fn(rows.len(), cols.len(), |r, c| self[(rows.start + r, cols.start + c)])
    }

    pub fn inverse(&self) -> Result<QMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let inv = linalg::inverse(&self.chi())?;
        Ok(QMatrix::chi_project(&inv))
    }

    /// Numerical quaternionic rank; singular values of χ come in pairs.
    pub fn rank(&self, tol: f64) -> usize {
        linalg::rank(&self.chi(), tol) / 2
    }
}

/// `‖J₀ M − conj(M) J₀‖_max`, the distance-like defect from the image of χ.
pub fn chi_defect(m: &CMatrix) -> Result<f64> {
    if m.nrows() % 2 != 0 || m.ncols() % 2 != 0 {
        return Err(Error::Dimension("χ preimage needs even dimensions".into()));
    }
    let (n, k) = (m.nrows() / 2, m.ncols() / 2);
    let mut defect: f64 = 0.0;
    for r in 0..n {
        for c in 0..k {
            defect = defect.max((m[(r, c)] - m[(n + r, k + c)].conj()).norm());
            defect = defect.max((m[(r, k + c)] + m[(n + r, c)].conj()).norm());
        }
    }
    Ok(defect)
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    fn index(&self, (r, c): (usize, usize)) -> &Quaternion {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quaternion {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix sum dimension mismatch");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix difference dimension mismatch");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, o: &QMatrix) -> QMatrix {
        self.matmul(o)
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        self.map(|q| -q)
    }
}

/// `⟨x, y⟩ = Σ conj(x_r) y_r`.
pub fn inner(x: &[Quaternion], y: &[Quaternion]) -> Quaternion {
    x.iter().zip(y).map(|(&a, &b)| a.conj() * b).sum()
}

pub fn vec_norm(x: &[Quaternion]) -> f64 {
    x.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
}

/// `v = a + b j ↦ [a; -conj b]`.
pub fn vec_to_complex(v: &[Quaternion]) -> CVector {
    let n = v.len();
    let mut out = CVector::from_element(2 * n, CZERO);
    for (r, q) in v.iter().enumerate() {
        let (a, b) = q.to_pair();
        out[r] = a;
        out[n + r] = -b.conj();
    }
    out
}

pub fn vec_from_complex(u: &[Complex64]) -> Vec<Quaternion> {
    let n = u.len() / 2;
    (0..n).map(|r| Quaternion::from_pair(u[r], -u[n + r].conj())).collect()
}

pub fn random_quaternion(rng: &mut impl Rng) -> Quaternion {
    Quaternion::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

/// Orthonormal basis of the right ℍ-span of `vectors`, by modified
/// Gram–Schmidt with column pivoting (largest residual first, ties to the
/// lowest index) and one reorthogonalization pass. Vectors whose residual
/// falls below `tol` times the largest input norm are dropped. At most
/// `max_rank` vectors are returned.
pub fn orthonormal_span(vectors: &[Vec<Quaternion>], tol: f64, max_rank: usize) -> Vec<Vec<Quaternion>> {
    let mut work: Vec<Vec<Quaternion>> = vectors.to_vec();
    let scale = work.iter().map(|v| vec_norm(v)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<Quaternion>> = Vec::new();
    if scale == 0.0 {
        return basis;
    }
    let mut used = vec![false; work.len()];
    while basis.len() < max_rank {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in work.iter().enumerate() {
            if used[i] {
                continue;
            }
            let nv = vec_norm(v);
            if best.is_none_or(|(_, b)| nv > b * (1.0 + 1e-12)) {
                best = Some((i, nv));
            }
        }
        let Some((idx, nv)) = best else { break };
        if nv <= tol * scale {
            break;
        }
        used[idx] = true;
        let mut q = work[idx].clone();
        for _ in 0..2 {
            for b in &basis {
                let h = inner(b, &q);
                for (qi, &bi) in q.iter_mut().zip(b) {
                    *qi -= bi * h;
                }
            }
        }
        let nq = vec_norm(&q);
        if nq <= tol * scale {
            continue;
        }
        q.iter_mut().for_each(|x| *x = *x / nq);
        for (i, v) in work.iter_mut().enumerate() {
            if used[i] {
                continue;
            }
            let h = inner(&q, v);
            for (vi, &qi) in v.iter_mut().zip(&q) {
                *vi -= qi * h;
            }
        }
        basis.push(q);
    }
    basis
}

/// Stacks column vectors into a matrix.
pub fn from_columns(n: usize, cols: &[Vec<Quaternion>]) -> QMatrix {
    let mut m = QMatrix::zeros(n, cols.len());
    for (c, v) in cols.iter().enumerate() {
        m.set_col(c, v);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn chi_of_units() {
        let cj = QMatrix::from_diag(&[Quaternion::J]).chi();
        assert_eq!(cj[(0, 0)], CZERO);
        assert_eq!(cj[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(cj[(1, 0)], Complex64::new(-1.0, 0.0));
        assert_eq!(cj[(1, 1)], CZERO);
        let ci = QMatrix::from_diag(&[Quaternion::I]).chi();
        assert_eq!(ci[(0, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(ci[(1, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(ci[(0, 1)], CZERO);
    }

    #[test]
    fn chi_roundtrip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = QMatrix::random(4, 4, &mut rng);
        assert_eq!(QMatrix::chi_inv(&r.chi()).unwrap(), r);
    }

    #[test]
    fn chi_inv_rejects_non_symplectic() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        assert!(matches!(QMatrix::chi_inv(&m), Err(Error::Validation(_))));
        let odd = CMatrix::zeros(3, 2);
        assert!(QMatrix::chi_inv(&odd).is_err());
    }

    #[test]
    fn vector_action_matches_chi() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = QMatrix::random(3, 2, &mut rng);
        let v: Vec<Quaternion> = (0..2).map(|_| random_quaternion(&mut rng)).collect();
        let direct = vec_to_complex(&t.apply(&v));
        let via = t.chi() * vec_to_complex(&v);
        assert!((direct - via).norm() < 1e-13);
        // right linearity T(vq) = (Tv)q
        let s = q(0.3, -1.0, 2.0, 0.5);
        let vs: Vec<_> = v.iter().map(|&x| x * s).collect();
        let lhs = t.apply(&vs);
        let rhs: Vec<_> = t.apply(&v).into_iter().map(|x| x * s).collect();
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!(a.dist(*b) < 1e-13);
        }
    }

    #[test]
    fn adjoint_satisfies_inner_product_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = QMatrix::random(3, 4, &mut rng);
        let x: Vec<Quaternion> = (0..3).map(|_| random_quaternion(&mut rng)).collect();
        let y: Vec<Quaternion> = (0..4).map(|_| random_quaternion(&mut rng)).collect();
        let lhs = inner(&x, &t.apply(&y));
        let rhs = inner(&t.adjoint().apply(&x), &y);
        assert!(lhs.dist(rhs) < 1e-12);
    }

    #[test]
    fn op_norm_examples() {
        assert!((QMatrix::identity(3).op_norm() - 1.0).abs() < 1e-14);
        assert!((QMatrix::from_diag(&[Quaternion::J * 2.0]).op_norm() - 2.0).abs() < 1e-14);
        assert_eq!(QMatrix::zeros(2, 3).op_norm(), 0.0);
    }

    #[test]
    fn power_norm_agrees_with_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let t = QMatrix::random(8, 8, &mut rng);
        let dense = t.op_norm();
        let power = t.power_norm(1e-15, 100_000);
        assert!((dense - power).abs() < 1e-6 * dense, "{dense} vs {power}");
    }

    #[test]
    fn orthonormal_span_of_dependent_vectors() {
        let a = vec![Quaternion::ONE, Quaternion::ZERO];
        let b = vec![Quaternion::J, Quaternion::ZERO];
        let c = vec![Quaternion::I, Quaternion::K];
        let basis = orthonormal_span(&[a, b, c], 1e-10, 2);
        assert_eq!(basis.len(), 2);
        assert!(inner(&basis[0], &basis[1]).norm() < 1e-14);
        for v in &basis {
            assert!((vec_norm(v) - 1.0).abs() < 1e-14);
        }
    }
}
