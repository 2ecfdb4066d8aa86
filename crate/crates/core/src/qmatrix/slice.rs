//! Slice splitting `H = H₊ ⊕ H₋` along an anti-self-adjoint unitary `J`
//! and the extension of `C_i`-linear operators on `H₊` to ℍ-linear ones.

use num_complex::Complex64;

use super::{from_columns, vec_from_complex, QMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::quaternion::{ImaginaryUnit, Quaternion};

/// Tolerance on `J* = −J` and `J*J = I`.
pub const J_TOL: f64 = 1e-10;

/// `J` with `J* = −J` and `J*J = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct AntiSelfAdjointUnitary(QMatrix);

impl AntiSelfAdjointUnitary {
    pub fn new(j: QMatrix) -> Result<Self> {
        if !j.is_square() {
            return Err(Error::Dimension("J must be square".into()));
        }
        let skew = (&j + &j.adjoint()).max_abs();
        let unit = (&j.adjoint().matmul(&j) - &QMatrix::identity(j.rows())).max_abs();
        if skew > J_TOL || unit > J_TOL {
            return Err(Error::Validation(format!(
                "J is not an anti-self-adjoint unitary (skew defect {skew:e}, unitary defect {unit:e})"
            )));
        }
        Ok(AntiSelfAdjointUnitary(j))
    }

    pub(crate) fn new_unchecked(j: QMatrix) -> Self {
        AntiSelfAdjointUnitary(j)
    }

    /// `diag(i, …, i)`.
    pub fn standard(n: usize) -> Self {
        AntiSelfAdjointUnitary(QMatrix::scalar(n, Quaternion::I))
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    /// Largest of `‖J* + J‖`, `‖J*J − I‖`, `‖JJ* − I‖` (max-entry norms).
    pub fn defect(&self) -> f64 {
        let j = &self.0;
        let id = QMatrix::identity(j.rows());
        let adj = j.adjoint();
        (j + &adj)
            .max_abs()
            .max((&adj.matmul(j) - &id).max_abs())
            .max((&j.matmul(&adj) - &id).max_abs())
    }
}

/// `x± = ½(x ∓ J x m)`.
pub fn slice_split(
    x: &[Quaternion],
    j: &AntiSelfAdjointUnitary,
    m: ImaginaryUnit,
) -> (Vec<Quaternion>, Vec<Quaternion>) {
    let jx = j.matrix().apply(x);
    let mq = m.as_quaternion();
    let plus = x.iter().zip(&jx).map(|(&a, &b)| (a - b * mq) * 0.5).collect();
    let minus = x.iter().zip(&jx).map(|(&a, &b)| (a + b * mq) * 0.5).collect();
    (plus, minus)
}

/// An orthonormal basis `e_1..e_n` of `H₊ = { x : J x = x i }`, stored as
/// the columns of a unitary `E` with `J = E (iI) E*`.
#[derive(Clone, Debug)]
pub struct PlusBasis {
    j: AntiSelfAdjointUnitary,
    e: QMatrix,
}

impl PlusBasis {
    /// Eigenvectors of the Hermitian matrix `−i χ(J)` for eigenvalue `+1`,
    /// in the eigen-solver's ascending order.
    pub fn new(j: &AntiSelfAdjointUnitary) -> Self {
        let n = j.dim();
        let h = j.matrix().chi() * Complex64::new(0.0, -1.0);
        let (values, vectors) = linalg::hermitian_eigen(&h);
        let cols: Vec<Vec<Quaternion>> = (0..2 * n)
            .filter(|&k| values[k] > 0.0)
            .map(|k| {
                let col: Vec<Complex64> = vectors.column(k).iter().copied().collect();
                vec_from_complex(&col)
            })
            .collect();
        PlusBasis { j: j.clone(), e: from_columns(n, &cols) }
    }

    /// Accepts a caller-supplied basis after checking `E*E = I` and `J E = E i`.
    pub fn from_columns(j: &AntiSelfAdjointUnitary, e: QMatrix) -> Result<Self> {
        let n = j.dim();
        if e.rows() != n || e.cols() != n {
            return Err(Error::Validation(format!(
                "basis of H+ must have {n} vectors of length {n}, got {}x{}",
                e.rows(),
                e.cols()
            )));
        }
        let ortho = (&e.adjoint().matmul(&e) - &QMatrix::identity(n)).max_abs();
        let eigen = (&j.matrix().matmul(&e) - &e.right_scalar(Quaternion::I)).max_abs();
        if ortho > 1e-10 || eigen > 1e-10 {
            return Err(Error::Validation(format!(
                "columns do not form an orthonormal basis of H+ (orthonormality {ortho:e}, J-eigen {eigen:e})"
            )));
        }
        Ok(PlusBasis { j: j.clone(), e })
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.e
    }

    pub fn j(&self) -> &AntiSelfAdjointUnitary {
        &self.j
    }
}

/// The unique ℍ-linear `T̃` commuting with `J` whose restriction to `H₊`
/// (in the basis `E`) is `tp`: `T̃ = E tp E*`.
pub fn extend(tp: &CMatrix, basis: &PlusBasis) -> Result<QMatrix> {
    let n = basis.j.dim();
    if tp.nrows() != n || tp.ncols() != n {
        return Err(Error::Dimension(format!(
            "operator on H+ must be {n}x{n}, got {}x{}",
            tp.nrows(),
            tp.ncols()
        )));
    }
    let e = &basis.e;
    Ok(e.matmul(&QMatrix::from_complex(tp)).matmul(&e.adjoint()))
}

/// Restriction of a `J`-commuting operator to `H₊`, as a complex matrix in
/// the basis `E`.
pub fn restrict(v: &QMatrix, basis: &PlusBasis) -> Result<CMatrix> {
    let j = basis.j.matrix();
    let n = j.rows();
    if v.rows() != n || v.cols() != n {
        return Err(Error::Dimension("operator and J differ in size".into()));
    }
    let comm = v.commutator(j).max_abs();
    let scale = v.max_abs().max(1.0);
    if comm > 1e-10 * scale {
        return Err(Error::Validation(format!("operator does not commute with J (defect {comm:e})")));
    }
    let e = &basis.e;
    e.adjoint().matmul(v).matmul(e).to_complex(1e-9 * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::{inner, random_quaternion};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn split_examples() {
        let j = AntiSelfAdjointUnitary::standard(2);
        let x = [Quaternion::ONE, Quaternion::ZERO];
        let (p, m) = slice_split(&x, &j, ImaginaryUnit::I);
        assert_eq!(p, vec![Quaternion::ONE, Quaternion::ZERO]);
        assert_eq!(m, vec![Quaternion::ZERO; 2]);
        let x = [Quaternion::J, Quaternion::ZERO];
        let (p, m) = slice_split(&x, &j, ImaginaryUnit::I);
        assert_eq!(p, vec![Quaternion::ZERO; 2]);
        assert_eq!(m, vec![Quaternion::J, Quaternion::ZERO]);
    }

    #[test]
    fn split_components_are_eigenvectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = crate::testing::random_unitary(3, &mut rng);
        let j = AntiSelfAdjointUnitary::new(
            u.matmul(&QMatrix::scalar(3, Quaternion::I)).matmul(&u.adjoint()),
        )
        .unwrap();
        let m = ImaginaryUnit::new(1.0, 2.0, -0.5).unwrap();
        let x: Vec<Quaternion> = (0..3).map(|_| random_quaternion(&mut rng)).collect();
        let (p, mi) = slice_split(&x, &j, m);
        let mq = m.as_quaternion();
        for r in 0..3 {
            assert!((p[r] + mi[r]).dist(x[r]) < 1e-14);
        }
        let jp = j.matrix().apply(&p);
        let jm = j.matrix().apply(&mi);
        for r in 0..3 {
            assert!(jp[r].dist(p[r] * mq) < 1e-13);
            assert!(jm[r].dist(-(mi[r] * mq)) < 1e-13);
        }
    }

    #[test]
    fn plus_basis_is_orthonormal_eigenbasis() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let u = crate::testing::random_unitary(4, &mut rng);
        let j = AntiSelfAdjointUnitary::new(
            u.matmul(&QMatrix::scalar(4, Quaternion::I)).matmul(&u.adjoint()),
        )
        .unwrap();
        let b = PlusBasis::new(&j);
        assert!(PlusBasis::from_columns(&j, b.matrix().clone()).is_ok());
        for c in 0..4 {
            let e = b.matrix().col(c);
            for d in 0..4 {
                let f = b.matrix().col(d);
                let expect = if c == d { 1.0 } else { 0.0 };
                assert!(inner(&e, &f).dist(Quaternion::real(expect)) < 1e-13);
            }
        }
    }

    #[test]
    fn extend_identity_and_bad_basis() {
        let j = AntiSelfAdjointUnitary::standard(3);
        let b = PlusBasis::new(&j);
        let id = extend(&CMatrix::identity(3, 3), &b).unwrap();
        assert!((&id - &QMatrix::identity(3)).max_abs() < 1e-14);
        let wrong = QMatrix::scalar(3, Quaternion::J);
        assert!(matches!(PlusBasis::from_columns(&j, wrong), Err(Error::Validation(_))));
        assert!(matches!(
            PlusBasis::from_columns(&j, QMatrix::identity(2)),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn restrict_rejects_non_commuting() {
        let j = AntiSelfAdjointUnitary::standard(1);
        let b = PlusBasis::new(&j);
        let v = QMatrix::from_diag(&[Quaternion::J]);
        assert!(matches!(restrict(&v, &b), Err(Error::Validation(_))));
    }

    #[test]
    fn j_validation() {
        assert!(AntiSelfAdjointUnitary::new(QMatrix::identity(2)).is_err());
        assert!(AntiSelfAdjointUnitary::new(QMatrix::scalar(2, Quaternion::K)).is_ok());
    }
}
