//! Positive square roots, polar and Cartesian decompositions.

use num_complex::Complex64;

use super::{from_columns, inner, orthonormal_span, vec_from_complex, QMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CZERO};
use crate::quaternion::{cluster_points, Quaternion, Sphere};

/// Negative eigenvalues above `-PSD_CLIP * ‖P‖` are treated as zero.
pub const PSD_CLIP: f64 = 1e-12;

/// Relative singular value threshold separating the range from the kernel.
pub const RANK_TOL: f64 = 1e-10;

/// Relative defect `‖T*T − TT*‖ / ‖T‖²` accepted as normal.
pub const NORMAL_TOL: f64 = 1e-10;

/// The unique positive square root of a positive matrix.
pub fn sqrt_positive(p: &QMatrix) -> Result<QMatrix> {
    if !p.is_square() {
        return Err(Error::Dimension("square root of a non-square matrix".into()));
    }
    let scale = p.op_norm();
    if !p.is_hermitian(1e-10 * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::Domain("square root needs a self-adjoint matrix".into()));
    }
    let (values, vectors) = linalg::hermitian_eigen(&p.chi());
    let floor = -PSD_CLIP * scale;
    if let Some(&min) = values.first() {
        if min < floor {
            return Err(Error::Domain(format!("square root of an indefinite matrix (eigenvalue {min:e})")));
        }
    }
    let roots: Vec<f64> = values.iter().map(|&v| v.max(0.0).sqrt()).collect();
    Ok(QMatrix::chi_project(&scaled_gram(&vectors, &roots, &vectors)))
}

/// `|T| = (T*T)^{1/2}`.
pub fn modulus(t: &QMatrix) -> Result<QMatrix> {
    sqrt_positive(&t.adjoint().matmul(t))
}

/// `T = W0 |T|` with `N(W0) = N(T)`.
#[derive(Clone, Debug)]
pub struct Polar {
    pub w0: QMatrix,
    pub abs: QMatrix,
    /// Quaternionic rank of `T` (and of `W0`).
    pub rank: usize,
}

/// Polar decomposition from the SVD of χ(T). Singular values at or below
/// `RANK_TOL * σ_max` are sent to zero in the partial isometry, which pins
/// the kernel of `W0` to the kernel of `T`.
pub fn polar(t: &QMatrix) -> Polar {
    polar_with_tol(t, RANK_TOL)
}

pub fn polar_with_tol(t: &QMatrix, rank_tol: f64) -> Polar {
    let (n, m) = (t.rows(), t.cols());
    if n == 0 || m == 0 {
        return Polar { w0: QMatrix::zeros(n, m), abs: QMatrix::zeros(m, m), rank: 0 };
    }
    let (u, s, v_t) = linalg::svd(&t.chi());
    let smax = s[0];
    let cut = rank_tol * smax;
    let complex_rank = s.iter().filter(|&&x| x > cut && x > 0.0).count();
    let k = s.len();
    let mut w = CMatrix::zeros(2 * n, 2 * m);
    for idx in 0..complex_rank {
        w += u.column(idx) * v_t.row(idx);
    }
    let mut abs = CMatrix::zeros(2 * m, 2 * m);
    for idx in 0..k {
        let row = v_t.row(idx);
        abs += row.adjoint() * row * Complex64::new(s[idx], 0.0);
    }
    Polar {
        w0: QMatrix::chi_project(&w),
        abs: QMatrix::chi_project(&abs),
        rank: complex_rank / 2,
    }
}

/// `T = A + ½ J B` for a normal `T`.
#[derive(Clone, Debug)]
pub struct Cartesian {
    /// `(T + T*)/2`.
    pub a: QMatrix,
    /// `|T − T*|`.
    pub b: QMatrix,
    pub j: super::AntiSelfAdjointUnitary,
    /// Quaternionic dimension of `N(T − T*)`, where `J` is a convention.
    pub kernel_dim: usize,
    pub kernel_convention: &'static str,
}

pub const KERNEL_CONVENTION: &str = "J acts as right-slice multiplication by i in an eigenbasis of T on N(T-T*)";

pub fn cartesian(t: &QMatrix) -> Result<Cartesian> {
    if !t.is_square() {
        return Err(Error::Dimension("Cartesian decomposition of a non-square matrix".into()));
    }
    let norm = t.op_norm();
    let tstar = t.adjoint();
    let defect = (&tstar.matmul(t) - &t.matmul(&tstar)).op_norm();
    if defect > NORMAL_TOL * norm * norm {
        return Err(Error::Domain(format!(
            "Cartesian decomposition needs a normal matrix (defect {:e})",
            defect / (norm * norm).max(f64::MIN_POSITIVE)
        )));
    }
    let a = (t + &tstar).scale(0.5);
    let diff = t - &tstar;
    let b = abs_of_skew(&diff);
    let eig = unitary_diagonalize(t, 1e-9 * norm.max(1.0))?;
    let n = t.rows();
    let jdiag = QMatrix::scalar(n, Quaternion::I);
    let j = eig.basis.matmul(&jdiag).matmul(&eig.basis.adjoint());
    let j = (&j - &j.adjoint()).scale(0.5);
    let kernel_dim = eig
        .values
        .iter()
        .filter(|d| d.x.abs() <= 1e-9 * norm.max(1.0))
        .count();
    Ok(Cartesian {
        a,
        b,
        j: super::AntiSelfAdjointUnitary::new_unchecked(j),
        kernel_dim,
        kernel_convention: KERNEL_CONVENTION,
    })
}

/// `|D|` for anti-self-adjoint `D`, from the eigenvalues `±μ` of the
/// Hermitian `−iχ(D)`; avoids the square root of `D*D`, which would lose
/// half the digits on the kernel.
fn abs_of_skew(d: &QMatrix) -> QMatrix {
    let h = d.chi() * Complex64::new(0.0, -1.0);
    let (values, vectors) = linalg::hermitian_eigen(&h);
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    QMatrix::chi_project(&scaled_gram(&vectors, &abs, &vectors))
}

/// `T = U diag(values) U*` for a normal `T`, with `U` unitary and every
/// value in `C_i` with nonnegative imaginary part.
#[derive(Clone, Debug)]
pub struct UnitaryDiagonalization {
    pub basis: QMatrix,
    pub values: Vec<Quaternion>,
}

/// Eigenvectors of χ(T) are grouped by sphere, mapped back to ℍⁿ and
/// orthonormalized over ℍ; each vector is then rotated so its Rayleigh
/// quotient lands in the upper half of `C_i`. Assumes `T` normal.
pub fn unitary_diagonalize(t: &QMatrix, cluster_tol: f64) -> Result<UnitaryDiagonalization> {
    let n = t.rows();
    let (q, u) = linalg::schur(&t.chi());
    let lambdas: Vec<Complex64> = (0..2 * n).map(|i| u[(i, i)]).collect();
    let pts: Vec<Sphere> = lambdas.iter().map(|z| Sphere::new(z.re, z.im.abs())).collect();
    let groups = cluster_points(&pts, cluster_tol);
    let mut cols: Vec<Vec<Quaternion>> = Vec::with_capacity(n);
    for g in &groups {
        let mult = g.len().div_ceil(2);
        // eigenvectors for λ and λ̄ mix into non-eigenvectors; keep one side of a nonreal sphere
        let nonreal = g.iter().map(|&k| lambdas[k].im.abs()).sum::<f64>() / g.len() as f64 > cluster_tol;
        let vectors: Vec<Vec<Quaternion>> = g
            .iter()
            .filter(|&&k| !nonreal || lambdas[k].im > 0.0)
            .map(|&k| {
                let col: Vec<Complex64> = q.column(k).iter().copied().collect();
                vec_from_complex(&col)
            })
            .collect();
        let span = orthonormal_span(&vectors, 1e-8, mult);
        if span.len() != mult {
            return Err(Error::Domain(format!(
                "eigenspace of dimension {} where {mult} was expected",
                span.len()
            )));
        }
        cols.extend(span);
    }
    if cols.len() != n {
        return Err(Error::Domain("eigenvector basis is incomplete".into()));
    }
    let cols = orthonormal_span(&cols, 1e-8, n);
    if cols.len() != n {
        return Err(Error::Domain("eigenvector basis is rank deficient".into()));
    }
    let mut values = Vec::with_capacity(n);
    let mut rotated = Vec::with_capacity(n);
    for v in cols {
        let d = inner(&v, &t.apply(&v));
        let rot = rotation_to_i(d);
        let v: Vec<Quaternion> = v.into_iter().map(|x| x * rot).collect();
        let d = rot.conj() * d * rot;
        values.push(Quaternion::new(d.w, d.x.abs(), 0.0, 0.0));
        rotated.push(v);
    }
    Ok(UnitaryDiagonalization { basis: from_columns(n, &rotated), values })
}

/// Unit `u` with `u⁻¹ q u` in `C_i` with nonnegative `i` component.
pub(crate) fn rotation_to_i(q: Quaternion) -> Quaternion {
    let Some(m) = q.axis() else {
        return Quaternion::ONE;
    };
    // u i u⁻¹ = m  for  u ∝ 1 − m i
    let u = Quaternion::ONE - m.as_quaternion() * Quaternion::I;
    if u.norm() < 1e-8 {
        // m ≈ −i
        return Quaternion::J;
    }
    u / u.norm()
}

/// `A diag(s) B^H`.
fn scaled_gram(a: &CMatrix, s: &[f64], b: &CMatrix) -> CMatrix {
    let mut scaled = a.clone();
    for (c, &sv) in s.iter().enumerate() {
        scaled.column_mut(c).scale_mut(sv);
    }
    let out = scaled * b.adjoint();
    out.map(|z| if z.norm() == 0.0 { CZERO } else { z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::random_quaternion;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn modulus_examples() {
        let m = modulus(&QMatrix::from_diag(&[Quaternion::real(-2.0)])).unwrap();
        assert!(m[(0, 0)].dist(Quaternion::real(2.0)) < 1e-14);
        // unitary: a unit quaternion diagonal
        let u = Quaternion::new(1.0, 2.0, -1.0, 0.5);
        let u = u / u.norm();
        let m = modulus(&QMatrix::from_diag(&[u, Quaternion::J])).unwrap();
        assert!((&m - &QMatrix::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn sqrt_rejects_bad_input() {
        let indefinite = QMatrix::from_diag(&[Quaternion::real(1.0), Quaternion::real(-1.0)]);
        assert!(matches!(sqrt_positive(&indefinite), Err(Error::Domain(_))));
        let skew = QMatrix::from_diag(&[Quaternion::I]);
        assert!(matches!(sqrt_positive(&skew), Err(Error::Domain(_))));
    }

    #[test]
    fn polar_examples() {
        let p = polar(&QMatrix::identity(2));
        assert!((&p.w0 - &QMatrix::identity(2)).max_abs() < 1e-14);
        assert!((&p.abs - &QMatrix::identity(2)).max_abs() < 1e-14);
        let p = polar(&QMatrix::from_diag(&[Quaternion::I * 2.0]));
        assert!(p.w0[(0, 0)].dist(Quaternion::I) < 1e-14);
        assert!(p.abs[(0, 0)].dist(Quaternion::real(2.0)) < 1e-14);
        let p = polar(&QMatrix::zeros(3, 3));
        assert_eq!(p.rank, 0);
        assert_eq!(p.w0.max_abs(), 0.0);
        assert_eq!(p.abs.max_abs(), 0.0);
    }

    #[test]
    fn cartesian_of_single_entries() {
        let c = cartesian(&QMatrix::from_diag(&[Quaternion::real(3.0)])).unwrap();
        assert!(c.a[(0, 0)].dist(Quaternion::real(3.0)) < 1e-14);
        assert!(c.b.max_abs() < 1e-14);
        assert_eq!(c.kernel_dim, 1);
        let j = c.j.matrix()[(0, 0)];
        assert!((j.norm() - 1.0).abs() < 1e-14 && j.w.abs() < 1e-14);

        let c = cartesian(&QMatrix::from_diag(&[Quaternion::new(1.0, 0.0, 2.0, 0.0)])).unwrap();
        assert!(c.a[(0, 0)].dist(Quaternion::ONE) < 1e-14);
        assert!(c.b[(0, 0)].dist(Quaternion::real(4.0)) < 1e-13);
        assert!(c.j.matrix()[(0, 0)].dist(Quaternion::J) < 1e-14);
        assert_eq!(c.kernel_dim, 0);

        let t = QMatrix::from_diag(&[Quaternion::I, Quaternion::new(1.0, 0.0, 0.0, 1.0)]);
        let c = cartesian(&t).unwrap();
        let expect = QMatrix::from_diag(&[Quaternion::I, Quaternion::K]);
        assert!((c.j.matrix() - &expect).max_abs() < 1e-13);
    }

    #[test]
    fn cartesian_rejects_non_normal() {
        let t = QMatrix::from_rows(&[
            vec![Quaternion::ZERO, Quaternion::ONE],
            vec![Quaternion::ZERO, Quaternion::ZERO],
        ])
        .unwrap();
        assert!(matches!(cartesian(&t), Err(Error::Domain(_))));
    }

    #[test]
    fn rotation_to_i_standardizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let q = random_quaternion(&mut rng);
            let u = rotation_to_i(q);
            let d = u.conj() * q * u;
            assert!(d.y.abs() < 1e-13 && d.z.abs() < 1e-13 && d.x >= -1e-13);
            assert!((d.x - q.im_norm()).abs() < 1e-12);
        }
        let d = rotation_to_i(-Quaternion::I);
        let r = d.conj() * (-Quaternion::I) * d;
        assert!(r.dist(Quaternion::I) < 1e-15);
    }
}
