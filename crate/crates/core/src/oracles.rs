//! Independent reference computations used to cross-check the main paths.
//!
//! Nothing here is on a decision path; these routines exist so tests and
//! the verification suite can compare against a second method.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qmatrix::QMatrix;
use crate::quaternion::{Quaternion, Sphere};

/// Spectral projection of a diagonalizable `T` onto the spheres of `sigma`,
/// from the eigenvectors of χ(T): eigenvalues are assigned to the nearest
/// sphere of `sigma ∪ tau` (so each conjugate pair lands together).
pub fn eigenprojection(t: &QMatrix, sigma: &[Sphere], tau: &[Sphere]) -> Result<QMatrix> {
    let chi = t.chi();
    let n2 = chi.nrows();
    let (q, u) = linalg::schur(&chi);
    let lambdas: Vec<Complex64> = (0..n2).map(|i| u[(i, i)]).collect();
    let scale = u.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let upper: f64 = (0..n2).flat_map(|r| (r + 1..n2).map(move |c| (r, c))).map(|(r, c)| u[(r, c)].norm()).fold(0.0, f64::max);

    // eigenvectors of the triangular factor
    let y = if upper <= 1e-10 * scale {
        CMatrix::identity(n2, n2)
    } else {
        let eps = f64::EPSILON * scale;
        let mut y = CMatrix::zeros(n2, n2);
        for k in 0..n2 {
            y[(k, k)] = Complex64::new(1.0, 0.0);
            for j in (0..k).rev() {
                let acc: Complex64 = (j + 1..=k).map(|l| u[(j, l)] * y[(l, k)]).sum();
                let mut den = u[(j, j)] - lambdas[k];
                if den.norm() < eps {
                    den = Complex64::new(eps, 0.0);
                }
                y[(j, k)] = -acc / den;
            }
            let nrm = y.column(k).norm();
            y.column_mut(k).unscale_mut(nrm);
        }
        y
    };
    let x = &q * &y;
    let xinv = linalg::inverse(&x).map_err(|_| Error::Domain("operator is not diagonalizable".into()))?;
    let in_sigma = |z: Complex64| {
        let s = Sphere::new(z.re, z.im.abs());
        let ds = sigma.iter().map(|a| a.dist(s)).fold(f64::INFINITY, f64::min);
        let dt = tau.iter().map(|a| a.dist(s)).fold(f64::INFINITY, f64::min);
        ds < dt
    };
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n2,
        lambdas.iter().map(|&z| Complex64::new(if in_sigma(z) { 1.0 } else { 0.0 }, 0.0)),
    ));
    Ok(QMatrix::chi_project(&(&x * d * xinv)))
}

/// `Σ_{k<terms} T^k s^{−1−k}`, the left S-resolvent when `‖T‖ < |s|`.
pub fn series_left_resolvent(t: &QMatrix, s: Quaternion, terms: usize) -> QMatrix {
    let n = t.rows();
    let sinv = s.inv();
    let mut power = QMatrix::identity(n);
    let mut coeff = sinv;
    let mut sum = QMatrix::zeros(n, n);
    for _ in 0..terms {
        sum = &sum + &power.right_scalar(coeff);
        power = t.matmul(&power);
        coeff = coeff * sinv;
    }
    sum
}

/// Operator norm by power iteration, independent of the dense SVD.
pub fn power_norm(t: &QMatrix) -> f64 {
    t.power_norm(1e-15, 200_000)
}

/// `[[Re, −Im], [Im, Re]]`, a real algebra homomorphism.
pub fn realify(m: &CMatrix) -> DMatrix<f64> {
    let (r, c) = (m.nrows(), m.ncols());
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

fn unrealify(m: &DMatrix<f64>) -> CMatrix {
    let (r, c) = (m.nrows() / 2, m.ncols() / 2);
    CMatrix::from_fn(r, c, |i, j| Complex64::new(m[(i, j)], m[(r + i, j)]))
}

/// Real null space of the linear map with matrix `a` (columns = unknowns),
/// from the eigen-decomposition of `aᵀa`.
fn null_space(a: &DMatrix<f64>, rel_tol: f64) -> Vec<nalgebra::DVector<f64>> {
    let ata = a.transpose() * a;
    let eig = SymmetricEigen::new(ata);
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let thresh = rel_tol * top.max(1.0).sqrt();
    (0..eig.eigenvalues.len())
        .filter(|&k| eig.eigenvalues[k].max(0.0).sqrt() <= thresh)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect()
}

/// Result of the multi-start idempotent search.
#[derive(Clone, Debug, PartialEq)]
pub enum SearchOutcome<W> {
    /// A nontrivial idempotent in the searched algebra.
    Found(W),
    /// Every start converged, always to `0` or `I`.
    NoneFound,
    /// Some starts failed to converge and none found a witness.
    Inconclusive { converged: usize, starts: usize },
}

impl<W> SearchOutcome<W> {
    pub fn found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    fn map<V>(self, f: impl FnOnce(W) -> V) -> SearchOutcome<V> {
        match self {
            SearchOutcome::Found(w) => SearchOutcome::Found(f(w)),
            SearchOutcome::NoneFound => SearchOutcome::NoneFound,
            SearchOutcome::Inconclusive { converged, starts } => SearchOutcome::Inconclusive { converged, starts },
        }
    }
}

const MAX_KICKS: usize = 16;
const MAX_ITER: usize = 2000;
/// Iterations without halving `‖F‖` before a kick.
const STALL: usize = 60;
const DIVERGED: f64 = 100.0;

enum Start {
    Trivial,
    Nontrivial(DMatrix<f64>),
    Failed,
}

/// Damped Newton on `F(c) = E(c)² − E(c)`, `E(c) = Σ c_k B_k`.
///
/// Steps solve the Gauss–Newton system with a tiny ridge and are capped in
/// length; they are not required to decrease `‖F‖`, since a monotone scheme
/// stalls at the saddle where the scalar part equals `½`. Exact stalls and
/// long non-contracting wanders are escaped by small random kicks, at most
/// `MAX_KICKS` times.
fn solve_from(basis: &[DMatrix<f64>], mut c: Vec<f64>, rng: &mut ChaCha8Rng) -> Start {
    let dim = basis[0].nrows();
    let id = DMatrix::<f64>::identity(dim, dim);
    let combine = |c: &[f64]| {
        let mut e = DMatrix::<f64>::zeros(dim, dim);
        for (ck, b) in c.iter().zip(basis) {
            e += b * *ck;
        }
        e
    };
    let mut kicks = 0;
    let mut best = (f64::INFINITY, 0usize);
    for iter in 0..MAX_ITER {
        let e = combine(&c);
        let f = &e * &e - &e;
        let fnorm = f.norm();
        if fnorm < 0.5 * best.0 {
            best = (fnorm, iter);
        }
        if fnorm <= 1e-12 * e.norm().max(1.0) {
            let trivial = e.norm() <= 1e-6 || (&e - &id).norm() <= 1e-6;
            return if trivial { Start::Trivial } else { Start::Nontrivial(e) };
        }
        let jac = DMatrix::from_fn(dim * dim, basis.len(), |r, k| {
            let b = &basis[k];
            let (i, j) = (r % dim, r / dim);
            (b.row(i) * e.column(j))[0] + (e.row(i) * b.column(j))[0] - b[(i, j)]
        });
        let jt = jac.transpose();
        let g = &jt * nalgebra::DVector::from_column_slice(f.as_slice());
        let mut h = &jt * &jac;
        let ridge = 1e-12 * h.diagonal().max().max(1.0);
        for k in 0..h.nrows() {
            h[(k, k)] += ridge;
        }
        let step = h.cholesky().map(|ch| ch.solve(&(-&g)));
        match step {
            Some(step)
                if g.norm() > 1e-14 * fnorm && step.iter().all(|x| x.is_finite()) && iter - best.1 < STALL =>
            {
                let cn = c.iter().map(|x| x * x).sum::<f64>().sqrt();
                let cap = 10.0 * (1.0 + cn);
                let scale = if step.norm() > cap { cap / step.norm() } else { 1.0 };
                c.iter_mut().zip(step.iter()).for_each(|(a, b)| *a += scale * b);
            }
            _ => {
                if kicks == MAX_KICKS {
                    break;
                }
                kicks += 1;
                best = (f64::INFINITY, iter);
                // a wander to large coefficients is restarted from scratch
                let restart = c.iter().map(|x| x * x).sum::<f64>().sqrt() > DIVERGED;
                for ck in c.iter_mut() {
                    let kick: f64 = StandardNormal.sample(rng);
                    *ck = if restart { kick } else { *ck + 0.1 * kick };
                }
            }
        }
    }
    Start::Failed
}

/// Searches the real span of `basis` for a nontrivial idempotent from
/// `starts` seeded random starting points. The witness reported is the
/// lexicographically smallest (by entries) among those found.
pub fn idempotent_search(basis: &[DMatrix<f64>], starts: usize, seed: u64) -> SearchOutcome<DMatrix<f64>> {
    if basis.is_empty() {
        return SearchOutcome::NoneFound;
    }
    let results: Vec<Start> = (0..starts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let c: Vec<f64> = (0..basis.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
            solve_from(basis, c, &mut rng)
        })
        .collect();
    let mut converged = 0;
    let mut best: Option<DMatrix<f64>> = None;
    for r in results {
        match r {
            Start::Trivial => converged += 1,
            Start::Nontrivial(e) => {
                converged += 1;
                let smaller = best.as_ref().is_none_or(|b| {
                    e.iter().zip(b.iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne())
                        == Some(std::cmp::Ordering::Less)
                });
                if smaller {
                    best = Some(e);
                }
            }
            Start::Failed => {}
        }
    }
    match best {
        Some(e) => SearchOutcome::Found(e),
        None if converged == starts => SearchOutcome::NoneFound,
        None => SearchOutcome::Inconclusive { converged, starts },
    }
}

fn orthonormalize(vs: Vec<DMatrix<f64>>) -> Vec<DMatrix<f64>> {
    let mut out: Vec<DMatrix<f64>> = Vec::new();
    for mut v in vs {
        for _ in 0..2 {
            for b in &out {
                let h = b.dot(&v);
                v -= b * h;
            }
        }
        let n = v.norm();
        if n > 1e-8 {
            out.push(v / n);
        }
    }
    out
}

/// Idempotent search over the commutant of a quaternionic matrix, with the
/// commutant computed here from the real coordinates of `X ↦ XT − TX`.
pub fn quaternion_idempotent_search(t: &QMatrix, starts: usize, seed: u64) -> SearchOutcome<QMatrix> {
    let n = t.rows();
    let unknowns = 4 * n * n;
    let mut a = DMatrix::<f64>::zeros(unknowns, unknowns);
    for k in 0..unknowns {
        let mut coords = vec![0.0; unknowns];
        coords[k] = 1.0;
        let x = QMatrix::from_real_coords(n, n, &coords);
        let col = t.commutator(&x).to_real_coords();
        a.set_column(k, &nalgebra::DVector::from_vec(col));
    }
    let basis: Vec<DMatrix<f64>> = null_space(&a, 1e-6)
        .into_iter()
        .map(|v| realify(&QMatrix::from_real_coords(n, n, v.as_slice()).chi()))
        .collect();
    let basis = orthonormalize(basis);
    idempotent_search(&basis, starts, seed).map(|e| QMatrix::chi_project(&unrealify(&e)))
}

/// Idempotent search over the commutant of a complex matrix.
pub fn complex_idempotent_search(s: &CMatrix, starts: usize, seed: u64) -> SearchOutcome<CMatrix> {
    let n = s.nrows();
    let unknowns = 2 * n * n;
    let mut a = DMatrix::<f64>::zeros(unknowns, unknowns);
    let to_x = |v: &[f64]| CMatrix::from_fn(n, n, |r, c| Complex64::new(v[2 * (r * n + c)], v[2 * (r * n + c) + 1]));
    for k in 0..unknowns {
        let mut coords = vec![0.0; unknowns];
        coords[k] = 1.0;
        let x = to_x(&coords);
        let d = &x * s - s * &x;
        let col: Vec<f64> = d.transpose().iter().flat_map(|z| [z.re, z.im]).collect();
        a.set_column(k, &nalgebra::DVector::from_vec(col));
    }
    let basis: Vec<DMatrix<f64>> = null_space(&a, 1e-6).into_iter().map(|v| realify(&to_x(v.as_slice()))).collect();
    let basis = orthonormalize(basis);
    idempotent_search(&basis, starts, seed).map(|e| unrealify(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jordan(n: usize, lambda: Quaternion) -> QMatrix {
        QMatrix::from_fn(n, n, |r, c| {
            if r == c {
                lambda
            } else if c == r + 1 {
                Quaternion::ONE
            } else {
                Quaternion::ZERO
            }
        })
    }

    #[test]
    fn eigenprojection_of_diag_i_3() {
        let t = QMatrix::from_diag(&[Quaternion::I, Quaternion::real(3.0)]);
        let p = eigenprojection(&t, &[Sphere::new(0.0, 1.0)], &[Sphere::new(3.0, 0.0)]).unwrap();
        let expect = QMatrix::from_diag(&[Quaternion::ONE, Quaternion::ZERO]);
        assert!((&p - &expect).max_abs() < 1e-14);
    }

    #[test]
    fn eigenprojection_of_triangular() {
        // [[1, 1], [0, 2]]: projection onto eigenvalue 1 is [[1, -1], [0, 0]]
        let t = QMatrix::from_rows(&[
            vec![Quaternion::ONE, Quaternion::ONE],
            vec![Quaternion::ZERO, Quaternion::real(2.0)],
        ])
        .unwrap();
        let p = eigenprojection(&t, &[Sphere::new(1.0, 0.0)], &[Sphere::new(2.0, 0.0)]).unwrap();
        let expect = QMatrix::from_rows(&[
            vec![Quaternion::ONE, Quaternion::real(-1.0)],
            vec![Quaternion::ZERO, Quaternion::ZERO],
        ])
        .unwrap();
        assert!((&p - &expect).max_abs() < 1e-12);
    }

    #[test]
    fn series_matches_scalar_inverse() {
        let t = QMatrix::from_diag(&[Quaternion::real(0.5)]);
        let s = Quaternion::new(0.0, 2.0, 0.0, 0.0);
        let r = series_left_resolvent(&t, s, 80);
        let expect = (s - Quaternion::real(0.5)).inv();
        assert!(r[(0, 0)].dist(expect) < 1e-14);
    }

    #[test]
    fn power_norm_matches_svd() {
        let t = QMatrix::from_rows(&[
            vec![Quaternion::new(1.0, 2.0, 0.0, -1.0), Quaternion::J],
            vec![Quaternion::K, Quaternion::real(-3.0)],
        ])
        .unwrap();
        assert!((power_norm(&t) - t.op_norm()).abs() < 1e-10);
    }

    #[test]
    fn search_finds_projection_of_diag() {
        let t = QMatrix::from_diag(&[Quaternion::ONE, Quaternion::real(2.0)]);
        let SearchOutcome::Found(e) = quaternion_idempotent_search(&t, 16, 1) else { panic!("expected witness") };
        assert!((&e.matmul(&e) - &e).max_abs() < 1e-9);
        assert!(t.commutator(&e).max_abs() < 1e-9);
    }

    #[test]
    fn search_finds_nothing_for_jordan_blocks() {
        let t = jordan(2, Quaternion::ZERO);
        assert_eq!(quaternion_idempotent_search(&t, 16, 2), SearchOutcome::NoneFound);
        let t = jordan(3, Quaternion::new(1.0, 1.0, 0.0, 0.0));
        assert_eq!(quaternion_idempotent_search(&t, 16, 3), SearchOutcome::NoneFound);
    }

    #[test]
    fn complex_search() {
        let j2 = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(2.0, 1.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(2.0, 1.0)],
        );
        assert_eq!(complex_idempotent_search(&j2, 16, 4), SearchOutcome::NoneFound);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]));
        assert!(complex_idempotent_search(&d, 16, 5).found());
    }
}
