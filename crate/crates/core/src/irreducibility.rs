//! Commutants and (strong) irreducibility decisions for quaternionic and
//! complex matrices.
//!
//! Strong irreducibility is decided from the Jordan structure of χ(T): the
//! commutant contains no nontrivial idempotent exactly when the spectrum is
//! one sphere carrying one quaternionic Jordan block. Borderline rank or
//! clustering decisions are reported as indeterminate rather than guessed.

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::oracles::{quaternion_idempotent_search, SearchOutcome};
use crate::qmatrix::{extend, AntiSelfAdjointUnitary, PlusBasis, QMatrix};
use crate::quaternion::{cluster_points, sort_spheres, ImaginaryUnit, Quaternion, Sphere};
use crate::scalculus::{build_contour, riesz_projection, DEFAULT_NODES};

/// Tolerances for the structural decision, relative to `max(1, ‖T‖)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructuralTolerances {
    /// Eigenvalues closer than this are one cluster.
    pub cluster: f64,
    /// Clusters closer than this are too close to call.
    pub cluster_gap: f64,
    /// Singular values below this count towards the nullity.
    pub rank: f64,
    /// Singular values between `rank` and this are indeterminate.
    pub rank_gray: f64,
}

impl Default for StructuralTolerances {
    fn default() -> Self {
        StructuralTolerances { cluster: 1e-4, cluster_gap: 1e-3, rank: 1e-8, rank_gray: 1e-4 }
    }
}

/// Real basis of `{X : XT = TX}`, orthonormal in real coordinates.
#[derive(Clone, Debug)]
pub struct CommutantBasis {
    pub t: QMatrix,
    pub basis: Vec<QMatrix>,
}

impl CommutantBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Largest `‖XT − TX‖ / (‖X‖‖T‖)` over the basis.
    pub fn defect(&self) -> f64 {
        let nt = self.t.op_norm().max(f64::MIN_POSITIVE);
        self.basis
            .iter()
            .map(|x| self.t.commutator(x).op_norm() / (x.op_norm() * nt))
            .fold(0.0, f64::max)
    }
}

/// Null space of a real linear map given column by column, by SVD.
fn real_null_space(a: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let unknowns = a.ncols();
    // pad to square so the full right singular basis is available
    let a = if a.nrows() < unknowns {
        let mut p = DMatrix::zeros(unknowns, unknowns);
        p.view_mut((0, 0), (a.nrows(), unknowns)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = SVD::new(a, false, true);
    let vt = svd.v_t.expect("v requested");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let thresh = rel_tol * top.max(1.0);
    let mut out: Vec<DVector<f64>> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= thresh)
        .map(|k| vt.row(k).transpose())
        .collect();
    // fix signs so the output does not depend on the solver's choice
    for v in &mut out {
        if let Some(p) = v.iter().copied().find(|x| x.abs() > 1e-12) {
            if p < 0.0 {
                v.neg_mut();
            }
        }
    }
    out
}

/// Matrix of `X ↦ (XA₁ − A₁X, XA₂ − A₂X, …)` in real coordinates.
fn commutator_map(ops: &[&QMatrix]) -> DMatrix<f64> {
    let n = ops[0].rows();
    let unknowns = 4 * n * n;
    let mut a = DMatrix::<f64>::zeros(unknowns * ops.len(), unknowns);
    for k in 0..unknowns {
        let mut coords = vec![0.0; unknowns];
        coords[k] = 1.0;
        let x = QMatrix::from_real_coords(n, n, &coords);
        for (block, t) in ops.iter().enumerate() {
            let col = x.commutator(t).to_real_coords();
            for (r, v) in col.into_iter().enumerate() {
                a[(block * unknowns + r, k)] = v;
            }
        }
    }
    a
}

const NULL_TOL: f64 = 1e-9;

pub fn commutant(t: &QMatrix) -> Result<CommutantBasis> {
    require_square(t)?;
    let n = t.rows();
    let basis = real_null_space(&commutator_map(&[t]), NULL_TOL)
        .into_iter()
        .map(|v| QMatrix::from_real_coords(n, n, v.as_slice()))
        .collect();
    Ok(CommutantBasis { t: t.clone(), basis })
}

fn require_square(t: &QMatrix) -> Result<()> {
    if !t.is_square() {
        return Err(Error::Validation("operator must be square".into()));
    }
    if t.rows() == 0 {
        return Err(Error::Validation("operator must be at least 1x1".into()));
    }
    Ok(())
}

/// A decision with an optional witness; `value == None` means indeterminate.
#[derive(Clone, Debug)]
pub struct Decision<W> {
    pub value: Option<bool>,
    pub witness: Option<W>,
    pub detail: String,
}

impl<W> Decision<W> {
    fn yes(detail: impl Into<String>) -> Self {
        Decision { value: Some(true), witness: None, detail: detail.into() }
    }

    fn no(witness: Option<W>, detail: impl Into<String>) -> Self {
        Decision { value: Some(false), witness, detail: detail.into() }
    }

    fn indeterminate(detail: impl Into<String>) -> Self {
        Decision { value: None, witness: None, detail: detail.into() }
    }

    pub fn is_indeterminate(&self) -> bool {
        self.value.is_none()
    }
}

fn generic_coefficients(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Whether no nontrivial orthogonal projection commutes with `T`, i.e.
/// `true` means irreducible. A reducing projection is returned as witness.
pub fn is_irreducible(t: &QMatrix) -> Result<Decision<QMatrix>> {
    require_square(t)?;
    let n = t.rows();
    let adj = t.adjoint();
    let star_algebra: Vec<QMatrix> = real_null_space(&commutator_map(&[t, &adj]), NULL_TOL)
        .into_iter()
        .map(|v| QMatrix::from_real_coords(n, n, v.as_slice()))
        .collect();
    // self-adjoint parts with the real-scalar component removed
    let id = QMatrix::identity(n);
    let parts: Vec<QMatrix> = star_algebra
        .iter()
        .map(|b| {
            let h = (b + &b.adjoint()).scale(0.5);
            let tr = h.diagonal().iter().map(|q| q.re()).sum::<f64>() / n as f64;
            &h - &id.scale(tr)
        })
        .filter(|h| h.max_abs() > 1e-8)
        .collect();
    if parts.is_empty() {
        return Ok(Decision::yes("commutant of {T, T*} contains only real scalars among self-adjoint elements"));
    }
    let g = generic_coefficients(parts.len(), 0x1bb);
    let h = parts.iter().zip(&g).fold(QMatrix::zeros(n, n), |acc, (p, &c)| &acc + &p.scale(c));
    let (values, vectors) = linalg::hermitian_eigen(&h.chi());
    // split at the largest gap of the (doubled) spectrum
    let (cut, gap) = values
        .windows(2)
        .enumerate()
        .map(|(k, w)| (k + 1, w[1] - w[0]))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let spread = values.last().unwrap() - values.first().unwrap();
    if gap <= 1e-6 * spread.max(f64::MIN_POSITIVE) {
        return Ok(Decision::indeterminate("self-adjoint commutant element has no usable spectral gap"));
    }
    let low = vectors.columns(0, cut);
    let p = QMatrix::chi_project(&(&low * low.adjoint()));
    let defect = t.commutator(&p).op_norm() / t.op_norm().max(1.0);
    if defect > 1e-8 {
        return Ok(Decision::indeterminate(format!("spectral projection fails to commute (defect {defect:e})")));
    }
    Ok(Decision::no(Some(p), "spectral projection of a self-adjoint element of the commutant of {T, T*}"))
}

/// Spheres of χ-eigenvalues grouped at `tol`; each group is a cluster mean.
fn eigen_clusters(lambdas: &[Complex64], tol: f64) -> Vec<(Sphere, Vec<usize>)> {
    let pts: Vec<Sphere> = lambdas.iter().map(|z| Sphere::new(z.re, z.im.abs())).collect();
    let mut groups: Vec<(Sphere, Vec<usize>)> = cluster_points(&pts, tol)
        .into_iter()
        .map(|g| {
            let k = g.len() as f64;
            let re = g.iter().map(|&i| pts[i].re).sum::<f64>() / k;
            let rad = g.iter().map(|&i| pts[i].rad).sum::<f64>() / k;
            (Sphere::new(re, rad), g)
        })
        .collect();
    groups.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.rad.total_cmp(&b.0.rad)));
    groups
}

fn min_pairwise(spheres: &[Sphere]) -> f64 {
    let mut d = f64::INFINITY;
    for (i, a) in spheres.iter().enumerate() {
        for b in &spheres[i + 1..] {
            d = d.min(a.dist(*b));
        }
    }
    d
}

/// Counts singular values below `lo`; `None` if any falls in `[lo, hi)`.
fn nullity(m: &CMatrix, lo: f64, hi: f64) -> (Option<usize>, f64) {
    let s = linalg::singular_values(m);
    let gray = s.iter().copied().filter(|&x| x >= lo && x < hi).fold(f64::NAN, f64::min);
    if !gray.is_nan() {
        return (None, gray);
    }
    (Some(s.iter().filter(|&&x| x < lo).count()), f64::NAN)
}

/// Riesz projection of `x` onto the first of several well-separated
/// spheres, if `x` has them.
fn split_projection(x: &QMatrix, tol: &StructuralTolerances) -> Option<QMatrix> {
    let scale = x.op_norm().max(1.0);
    let clusters = eigen_clusters(&linalg::eigenvalues(&x.chi()), tol.cluster * scale);
    if clusters.len() < 2 {
        return None;
    }
    let spheres: Vec<Sphere> = clusters.iter().map(|c| c.0).collect();
    if min_pairwise(&spheres) < tol.cluster_gap * scale {
        return None;
    }
    let contour = build_contour(&spheres[..1], &spheres[1..], ImaginaryUnit::I, DEFAULT_NODES, 0.0).ok()?;
    riesz_projection(x, &contour).ok()
}

fn is_nontrivial_idempotent(p: &QMatrix, t: &QMatrix) -> bool {
    let n = p.rows();
    let idem = (&p.matmul(p) - p).op_norm();
    let comm = t.commutator(p).op_norm() / t.op_norm().max(1.0);
    let zero = p.op_norm();
    let one = (p - &QMatrix::identity(n)).op_norm();
    idem <= 1e-8 * p.op_norm().max(1.0) && comm <= 1e-8 && zero > 1e-6 && one > 1e-6
}

pub fn is_strongly_irreducible(t: &QMatrix) -> Result<Decision<QMatrix>> {
    is_strongly_irreducible_with(t, &StructuralTolerances::default())
}

pub fn is_strongly_irreducible_with(t: &QMatrix, tol: &StructuralTolerances) -> Result<Decision<QMatrix>> {
    require_square(t)?;
    let n = t.rows();
    let scale = t.op_norm().max(1.0);
    let chi = t.chi();
    let clusters = eigen_clusters(&linalg::eigenvalues(&chi), tol.cluster * scale);
    let spheres: Vec<Sphere> = clusters.iter().map(|c| c.0).collect();

    if spheres.len() >= 2 {
        let gap = min_pairwise(&spheres);
        if gap < tol.cluster_gap * scale {
            return Ok(Decision::indeterminate(format!(
                "eigenvalue clusters {gap:e} apart: too close to separate"
            )));
        }
        let contour = build_contour(&spheres[..1], &spheres[1..], ImaginaryUnit::I, DEFAULT_NODES, 0.0)?;
        let p = riesz_projection(t, &contour)?;
        return Ok(Decision::no(
            Some(p),
            format!("{} spheres in the spectrum; Riesz projection onto the first", spheres.len()),
        ));
    }

    let s = spheres[0];
    let real = s.rad <= tol.cluster * scale;
    let lambda = Complex64::new(s.re, if real { 0.0 } else { s.rad });
    let shifted = &chi - CMatrix::identity(2 * n, 2 * n) * lambda;
    let (null, gray) = nullity(&shifted, tol.rank * scale, tol.rank_gray * scale);
    let Some(null) = null else {
        return Ok(Decision::indeterminate(format!(
            "singular value {gray:e} of χ(T) − λ is between the rank thresholds"
        )));
    };
    let one_block = if real { 2 } else { 1 };
    if null == one_block {
        return Ok(Decision::yes("single sphere carrying one quaternionic Jordan block"));
    }
    if null < one_block {
        return Ok(Decision::indeterminate(format!(
            "nullity {null} of χ(T) − λ is below the minimum {one_block}"
        )));
    }

    // several blocks on one sphere: a generic commutant element separates them
    let comm = commutant(t)?;
    let g = generic_coefficients(comm.dim(), 0x5ee1);
    let generic = comm.basis.iter().zip(&g).fold(QMatrix::zeros(n, n), |acc, (b, &c)| &acc + &b.scale(c));
    for x in std::iter::once(&generic).chain(comm.basis.iter()) {
        if let Some(p) = split_projection(x, tol) {
            if is_nontrivial_idempotent(&p, t) {
                return Ok(Decision::no(
                    Some(p),
                    format!("{} Jordan blocks on one sphere; Riesz projection of a commutant element", null / (one_block)),
                ));
            }
        }
    }
    Ok(Decision::indeterminate(format!(
        "{} Jordan blocks detected but no idempotent witness was constructed",
        null / one_block
    )))
}

/// Same decision for a complex matrix acting on ℂⁿ.
pub fn complex_is_strongly_irreducible(sp: &CMatrix, tol: &StructuralTolerances) -> Result<Decision<CMatrix>> {
    let n = sp.nrows();
    if n == 0 || sp.ncols() != n {
        return Err(Error::Validation("operator must be square".into()));
    }
    let scale = linalg::spectral_norm(sp).max(1.0);
    let lambdas = linalg::eigenvalues(sp);
    let mut centers: Vec<(Complex64, usize)> = Vec::new();
    for z in &lambdas {
        match centers.iter_mut().find(|(c, _)| (*c - z).norm() <= tol.cluster * scale) {
            Some((c, k)) => {
                *c = (*c * *k as f64 + z) / (*k as f64 + 1.0);
                *k += 1;
            }
            None => centers.push((*z, 1)),
        }
    }
    centers.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    if centers.len() >= 2 {
        let mut gap = f64::INFINITY;
        for (i, a) in centers.iter().enumerate() {
            for b in &centers[i + 1..] {
                gap = gap.min((a.0 - b.0).norm());
            }
        }
        if gap < tol.cluster_gap * scale {
            return Ok(Decision::indeterminate(format!("eigenvalue clusters {gap:e} apart")));
        }
        let p = complex_riesz(sp, centers[0].0, 0.5 * gap);
        return Ok(Decision::no(Some(p), format!("{} distinct eigenvalues", centers.len())));
    }
    let lambda = centers[0].0;
    let shifted = sp - CMatrix::identity(n, n) * lambda;
    let (null, gray) = nullity(&shifted, tol.rank * scale, tol.rank_gray * scale);
    match null {
        None => Ok(Decision::indeterminate(format!("singular value {gray:e} between the rank thresholds"))),
        Some(1) => Ok(Decision::yes("one eigenvalue with one Jordan block")),
        Some(0) => Ok(Decision::indeterminate("no numerical kernel at the eigenvalue")),
        Some(k) => {
            let p = complex_block_witness(sp, tol);
            let detail = format!("{k} Jordan blocks for one eigenvalue");
            Ok(match p {
                Some(p) => Decision::no(Some(p), detail),
                None => Decision::indeterminate(format!("{detail}; no idempotent witness constructed")),
            })
        }
    }
}

/// `(1/2πi)∮ (z − S)⁻¹ dz` on a circle, trapezoid rule.
fn complex_riesz(sp: &CMatrix, center: Complex64, radius: f64) -> CMatrix {
    let n = sp.nrows();
    let nodes = DEFAULT_NODES;
    let mut sum = CMatrix::zeros(n, n);
    for k in 0..nodes {
        let rot = Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / nodes as f64);
        let z = center + rot;
        let res = linalg::inverse(&(CMatrix::identity(n, n) * z - sp)).expect("node off the spectrum");
        sum += res * (rot / nodes as f64);
    }
    sum
}

fn complex_block_witness(sp: &CMatrix, tol: &StructuralTolerances) -> Option<CMatrix> {
    let n = sp.nrows();
    let unknowns = 2 * n * n;
    let to_x = |v: &[f64]| CMatrix::from_fn(n, n, |r, c| Complex64::new(v[2 * (r * n + c)], v[2 * (r * n + c) + 1]));
    let mut a = DMatrix::<f64>::zeros(unknowns, unknowns);
    for k in 0..unknowns {
        let mut coords = vec![0.0; unknowns];
        coords[k] = 1.0;
        let x = to_x(&coords);
        let d = &x * sp - sp * &x;
        for (r, z) in d.transpose().iter().enumerate() {
            a[(2 * r, k)] = z.re;
            a[(2 * r + 1, k)] = z.im;
        }
    }
    let basis: Vec<CMatrix> = real_null_space(&a, NULL_TOL).iter().map(|v| to_x(v.as_slice())).collect();
    let g = generic_coefficients(basis.len(), 0xc0);
    let generic = basis.iter().zip(&g).fold(CMatrix::zeros(n, n), |acc, (b, &c)| acc + b * Complex64::new(c, 0.0));
    let scale = linalg::spectral_norm(&generic).max(1.0);
    let lambdas = linalg::eigenvalues(&generic);
    let first = lambdas.iter().copied().min_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)))?;
    let gap = lambdas.iter().map(|z| (z - first).norm()).filter(|&d| d > tol.cluster * scale).fold(f64::INFINITY, f64::min);
    if !gap.is_finite() || gap < tol.cluster_gap * scale {
        return None;
    }
    Some(complex_riesz(&generic, first, 0.5 * gap))
}

/// Both sides of the extension lemma for `Sp` on `H₊` and `J`.
#[derive(Clone, Debug)]
pub struct ExtensionReport {
    pub extended: QMatrix,
    pub complex: Decision<CMatrix>,
    pub quaternionic: Decision<QMatrix>,
}

impl ExtensionReport {
    /// `Some(true)` when both decisions are determinate and equal.
    pub fn agree(&self) -> Option<bool> {
        Some(self.complex.value? == self.quaternionic.value?)
    }
}

pub fn extension_irreducibility_check(sp: &CMatrix, j: &AntiSelfAdjointUnitary) -> Result<ExtensionReport> {
    let basis = PlusBasis::new(j);
    let extended = extend(sp, &basis)?;
    let tol = StructuralTolerances::default();
    Ok(ExtensionReport {
        complex: complex_is_strongly_irreducible(sp, &tol)?,
        quaternionic: is_strongly_irreducible_with(&extended, &tol)?,
        extended,
    })
}

/// Structural decisions plus, on request and for `n ≤ 3`, a brute-force
/// idempotent search.
#[derive(Clone, Debug)]
pub struct IrreducibilityReport {
    pub strong: Decision<QMatrix>,
    pub irreducible: Decision<QMatrix>,
    /// `Some(agrees)` when the brute-force search ran and was conclusive.
    pub oracle: Option<bool>,
    pub oracle_checked: bool,
}

pub const ORACLE_MAX_N: usize = 3;
pub const ORACLE_STARTS: usize = 64;

pub fn irreducibility_report(t: &QMatrix, with_oracle: bool, seed: u64) -> Result<IrreducibilityReport> {
    let strong = is_strongly_irreducible(t)?;
    let irreducible = is_irreducible(t)?;
    let mut oracle = None;
    let mut oracle_checked = false;
    if with_oracle && t.rows() <= ORACLE_MAX_N {
        oracle_checked = true;
        let found = match quaternion_idempotent_search(t, ORACLE_STARTS, seed) {
            SearchOutcome::Found(_) => Some(true),
            SearchOutcome::NoneFound => Some(false),
            SearchOutcome::Inconclusive { .. } => None,
        };
        oracle = match (found, strong.value) {
            (Some(f), Some(s)) => Some(f != s),
            _ => None,
        };
    }
    Ok(IrreducibilityReport { strong, irreducible, oracle, oracle_checked })
}

impl IrreducibilityReport {
    pub fn to_json(&self) -> Value {
        let tri = |v: Option<bool>| v.map_or(json!("indeterminate"), Value::Bool);
        json!({
            "strongly_irreducible": tri(self.strong.value),
            "irreducible": tri(self.irreducible.value),
            "witness": self.strong.witness.as_ref().map_or(Value::Null, crate::io::matrix_to_json),
            "reducing_witness": self.irreducible.witness.as_ref().map_or(Value::Null, crate::io::matrix_to_json),
            "detail": self.strong.detail,
            "method": "structural",
            "oracle_checked": self.oracle_checked,
            "oracle_agrees": self.oracle,
        })
    }
}

/// Upper Jordan block `J_n(λ)`.
pub fn jordan_block(n: usize, lambda: Quaternion) -> QMatrix {
    QMatrix::from_fn(n, n, |r, c| match c.checked_sub(r) {
        Some(0) => lambda,
        Some(1) => Quaternion::ONE,
        _ => Quaternion::ZERO,
    })
}

/// The exhaustive small-matrix suite: diagonal with distinct and repeated
/// entries, Jordan blocks with real and nonreal eigenvalues, and `random`
/// seeded random matrices, all of size at most 3.
pub fn small_suite(random: usize, seed: u64) -> Vec<(String, QMatrix)> {
    let q = Quaternion::new;
    let mut out: Vec<(String, QMatrix)> = vec![
        ("diag(1)".into(), QMatrix::from_diag(&[q(1.0, 0.0, 0.0, 0.0)])),
        ("diag(1+i)".into(), QMatrix::from_diag(&[q(1.0, 1.0, 0.0, 0.0)])),
        ("diag(1,2)".into(), QMatrix::from_diag(&[q(1.0, 0.0, 0.0, 0.0), q(2.0, 0.0, 0.0, 0.0)])),
        ("diag(i,3)".into(), QMatrix::from_diag(&[Quaternion::I, q(3.0, 0.0, 0.0, 0.0)])),
        ("diag(i,j)".into(), QMatrix::from_diag(&[Quaternion::I, Quaternion::J])),
        ("diag(1+i,2-k)".into(), QMatrix::from_diag(&[q(1.0, 1.0, 0.0, 0.0), q(2.0, 0.0, 0.0, -1.0)])),
        ("diag(1,1)".into(), QMatrix::identity(2)),
        ("diag(2,2,2)".into(), QMatrix::scalar(3, q(2.0, 0.0, 0.0, 0.0))),
        ("diag(1+j,1+j)".into(), QMatrix::scalar(2, q(1.0, 0.0, 1.0, 0.0))),
        ("diag(i,i,1)".into(), QMatrix::from_diag(&[Quaternion::I, Quaternion::I, Quaternion::ONE])),
        ("J2(0)".into(), jordan_block(2, Quaternion::ZERO)),
        ("J2(3)".into(), jordan_block(2, q(3.0, 0.0, 0.0, 0.0))),
        ("J2(2+i)".into(), jordan_block(2, q(2.0, 1.0, 0.0, 0.0))),
        ("J3(1+i)".into(), jordan_block(3, q(1.0, 1.0, 0.0, 0.0))),
        ("J3(-1)".into(), jordan_block(3, q(-1.0, 0.0, 0.0, 0.0))),
        ("J3(0.5j+0.5k)".into(), jordan_block(3, q(0.0, 0.0, 0.5, 0.5))),
    ];
    // J2(λ) ⊕ (λ) and J2(λ) ⊕ (μ) on one and two spheres
    let mut j2_plus = |name: &str, a: Quaternion, b: Quaternion| {
        let mut m = QMatrix::zeros(3, 3);
        let j = jordan_block(2, a);
        for r in 0..2 {
            for c in 0..2 {
                m[(r, c)] = j[(r, c)];
            }
        }
        m[(2, 2)] = b;
        out.push((name.into(), m));
    };
    j2_plus("J2(i)+(i)", Quaternion::I, Quaternion::I);
    j2_plus("J2(i)+(j)", Quaternion::I, Quaternion::J);
    j2_plus("J2(1)+(2)", Quaternion::ONE, q(2.0, 0.0, 0.0, 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..random {
        let n = 1 + k % 3;
        out.push((format!("random{k}(n={n})"), QMatrix::random(n, n, &mut rng)));
    }
    out
}

/// Complex counterpart of [`small_suite`] for the extension lemma, sizes at most 3.
pub fn complex_suite(random: usize, seed: u64) -> Vec<(String, CMatrix)> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let diag = |d: &[Complex64]| CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d));
    let jordan = |n: usize, l: Complex64| {
        CMatrix::from_fn(n, n, |r, k| match k.checked_sub(r) {
            Some(0) => l,
            Some(1) => c(1.0, 0.0),
            _ => c(0.0, 0.0),
        })
    };
    let mut out: Vec<(String, CMatrix)> = vec![
        ("(1)".into(), diag(&[c(1.0, 0.0)])),
        ("(1+2i)".into(), diag(&[c(1.0, 2.0)])),
        ("diag(1,2)".into(), diag(&[c(1.0, 0.0), c(2.0, 0.0)])),
        ("diag(i,-i)".into(), diag(&[c(0.0, 1.0), c(0.0, -1.0)])),
        ("diag(2,2)".into(), diag(&[c(2.0, 0.0), c(2.0, 0.0)])),
        ("diag(1+i,1+i)".into(), diag(&[c(1.0, 1.0), c(1.0, 1.0)])),
        ("diag(1,1,3)".into(), diag(&[c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)])),
        ("J2(0)".into(), jordan(2, c(0.0, 0.0))),
        ("J2(1+i)".into(), jordan(2, c(1.0, 1.0))),
        ("J3(2)".into(), jordan(3, c(2.0, 0.0))),
        ("J3(-i)".into(), jordan(3, c(0.0, -1.0))),
    ];
    let mut j2_plus = |name: &str, a: Complex64, b: Complex64| {
        let mut m = CMatrix::zeros(3, 3);
        m.view_mut((0, 0), (2, 2)).copy_from(&jordan(2, a));
        m[(2, 2)] = b;
        out.push((name.into(), m));
    };
    j2_plus("J2(i)+(i)", c(0.0, 1.0), c(0.0, 1.0));
    j2_plus("J2(i)+(-i)", c(0.0, 1.0), c(0.0, -1.0));
    j2_plus("J2(1)+(2)", c(1.0, 0.0), c(2.0, 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..random {
        let n = 1 + k % 3;
        out.push((format!("random{k}(n={n})"), crate::testing::random_complex(n, n, &mut rng)));
    }
    out
}

/// Sorted spectrum spheres used in reports.
pub fn spectrum_spheres(t: &QMatrix) -> Vec<Sphere> {
    let scale = t.op_norm().max(1.0);
    let mut s: Vec<Sphere> = eigen_clusters(&linalg::eigenvalues(&t.chi()), 1e-4 * scale).into_iter().map(|c| c.0).collect();
    sort_spheres(&mut s);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn commutant_dimensions() {
        assert_eq!(commutant(&QMatrix::identity(2)).unwrap().dim(), 16);
        let d = commutant(&QMatrix::from_diag(&[Quaternion::ONE, q(2.0, 0.0, 0.0, 0.0)])).unwrap();
        assert_eq!(d.dim(), 8);
        assert!(d.defect() < 1e-10);
        assert_eq!(commutant(&jordan_block(2, Quaternion::ZERO)).unwrap().dim(), 8);
    }

    #[test]
    fn reducibility_examples() {
        let d = is_irreducible(&QMatrix::from_diag(&[Quaternion::ONE, q(2.0, 0.0, 0.0, 0.0)])).unwrap();
        assert_eq!(d.value, Some(false));
        let w = d.witness.unwrap();
        let e1 = QMatrix::from_diag(&[Quaternion::ONE, Quaternion::ZERO]);
        let e2 = QMatrix::from_diag(&[Quaternion::ZERO, Quaternion::ONE]);
        assert!((&w - &e1).max_abs() < 1e-10 || (&w - &e2).max_abs() < 1e-10);
        assert_eq!(is_irreducible(&QMatrix::from_diag(&[Quaternion::J])).unwrap().value, Some(true));
        assert_eq!(is_irreducible(&jordan_block(2, Quaternion::ZERO)).unwrap().value, Some(true));
    }

    #[test]
    fn strong_irreducibility_examples() {
        let t = QMatrix::from_diag(&[Quaternion::I, q(3.0, 0.0, 0.0, 0.0)]);
        let d = is_strongly_irreducible(&t).unwrap();
        assert_eq!(d.value, Some(false));
        let expect = QMatrix::from_diag(&[Quaternion::ONE, Quaternion::ZERO]);
        assert!((&d.witness.unwrap() - &expect).max_abs() < 1e-10);

        let d = is_strongly_irreducible(&jordan_block(3, q(1.0, 1.0, 0.0, 0.0))).unwrap();
        assert_eq!(d.value, Some(true), "{}", d.detail);

        let qq = q(0.5, 1.0, -2.0, 0.3);
        let t = QMatrix::from_diag(&[qq, qq]);
        let d = is_strongly_irreducible(&t).unwrap();
        assert_eq!(d.value, Some(false), "{}", d.detail);
        assert!(is_nontrivial_idempotent(d.witness.as_ref().unwrap(), &t));
    }

    #[test]
    fn non_square_is_rejected() {
        assert!(matches!(is_strongly_irreducible(&QMatrix::zeros(2, 3)), Err(Error::Validation(_))));
    }

    #[test]
    fn extension_examples() {
        let c = |re, im| Complex64::new(re, im);
        let j = AntiSelfAdjointUnitary::standard(2);
        let jb = CMatrix::from_row_slice(2, 2, &[c(2.0, 1.0), c(1.0, 0.0), c(0.0, 0.0), c(2.0, 1.0)]);
        let r = extension_irreducibility_check(&jb, &j).unwrap();
        assert_eq!((r.complex.value, r.quaternionic.value), (Some(true), Some(true)));
        let d = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let r = extension_irreducibility_check(&d, &j).unwrap();
        assert_eq!((r.complex.value, r.quaternionic.value), (Some(false), Some(false)));
        let d = CMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, -2.0)]);
        let r = extension_irreducibility_check(&d, &j).unwrap();
        assert_eq!((r.complex.value, r.quaternionic.value), (Some(false), Some(false)));
        assert_eq!(r.agree(), Some(true));
    }

    #[test]
    fn small_suite_is_decided() {
        for (name, t) in small_suite(6, 7) {
            let d = is_strongly_irreducible(&t).unwrap();
            assert!(!d.is_indeterminate(), "{name}: {}", d.detail);
        }
    }

    #[test]
    fn structural_decision_matches_brute_force() {
        for (name, t) in small_suite(20, 11) {
            let r = irreducibility_report(&t, true, 99).unwrap();
            assert_eq!(r.oracle, Some(true), "{name}: {}", r.strong.detail);
            if r.strong.value == Some(true) {
                assert_eq!(r.irreducible.value, Some(true), "{name}");
            }
        }
    }

    #[test]
    fn extension_equivalence_on_complex_suite() {
        for (name, sp) in complex_suite(9, 4) {
            let n = sp.nrows();
            let j = AntiSelfAdjointUnitary::standard(n);
            let r = extension_irreducibility_check(&sp, &j).unwrap();
            assert_eq!(r.agree(), Some(true), "{name}: {} / {}", r.complex.detail, r.quaternionic.detail);
        }
    }
}
