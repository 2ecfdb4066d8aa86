//! `Δ_q(T)`, the S-spectrum, the S-point spectrum and the S-resolvents.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qmatrix::QMatrix;
use crate::quaternion::{cluster_points, slice_embed, sphere_of, ImaginaryUnit, Quaternion, Sphere};

/// Default relative tie radius for clustering χ eigenvalues into spheres.
pub const SPECTRUM_TOL: f64 = 1e-6;

/// Relative distance to the spectrum below which resolvents are refused.
pub const RESOLVENT_GUARD: f64 = 1e-8;

/// Relative singular value threshold for kernel dimensions.
pub const KERNEL_TOL: f64 = 1e-8;

/// `Δ_q(T) = T² − 2 re(q) T + |q|² I`.
pub fn delta(t: &QMatrix, q: Quaternion) -> Result<QMatrix> {
    require_square(t)?;
    let n = t.rows();
    let t2 = t.matmul(t);
    let lin = t.scale(2.0 * q.re());
    Ok(&(&t2 - &lin) + &QMatrix::scalar(n, Quaternion::real(q.norm_sqr())))
}

fn require_square(t: &QMatrix) -> Result<()> {
    if t.is_square() {
        Ok(())
    } else {
        Err(Error::Validation("operator must be square".into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    #[serde(flatten)]
    pub sphere: Sphere,
    /// Quaternionic algebraic multiplicity.
    pub mult: usize,
}

/// `σ_S(T)` as spheres with multiplicities summing to `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalSpectrum {
    pub entries: Vec<SpectrumEntry>,
}

impl SphericalSpectrum {
    pub fn spheres(&self) -> Vec<Sphere> {
        self.entries.iter().map(|e| e.sphere).collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.mult).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distance from `[q]` to the nearest sphere.
    pub fn distance_to(&self, q: Quaternion) -> f64 {
        let s = sphere_of(q);
        self.entries.iter().map(|e| e.sphere.dist(s)).fold(f64::INFINITY, f64::min)
    }
}

/// Eigenvalues of χ(T) circularized into spheres. Eigenvalues within
/// `tol * max(1, ‖T‖)` of each other (single linkage in the `(re, rad)`
/// plane) form one sphere; its multiplicity is half the cluster size,
/// since χ lists every quaternionic eigenvalue together with its conjugate.
pub fn spherical_spectrum(t: &QMatrix, tol: f64) -> Result<SphericalSpectrum> {
    require_square(t)?;
    let norm = t.op_norm();
    Ok(spectrum_from_eigenvalues(&linalg::eigenvalues(&t.chi()), tol * norm.max(1.0)))
}

pub(crate) fn spectrum_from_eigenvalues(lambdas: &[Complex64], abs_tol: f64) -> SphericalSpectrum {
    let pts: Vec<Sphere> = lambdas.iter().map(|z| Sphere::new(z.re, z.im.abs())).collect();
    let mut entries: Vec<SpectrumEntry> = cluster_points(&pts, abs_tol)
        .into_iter()
        .map(|g| {
            let k = g.len() as f64;
            let mut re = g.iter().map(|&i| pts[i].re).sum::<f64>() / k;
            // rounding residue of an exactly zero real part
            if re.abs() <= 1e-8 * abs_tol {
                re = 0.0;
            }
            let mut rad = g.iter().map(|&i| pts[i].rad).sum::<f64>() / k;
            if rad <= abs_tol {
                rad = 0.0;
            }
            SpectrumEntry { sphere: Sphere::new(re, rad), mult: g.len().div_ceil(2) }
        })
        .collect();
    entries.sort_by(|a, b| a.sphere.re.total_cmp(&b.sphere.re).then(a.sphere.rad.total_cmp(&b.sphere.rad)));
    SphericalSpectrum { entries }
}

/// Smallest singular value of `Δ_q(T)` at a point of `s`, via χ.
pub fn delta_smin(t: &QMatrix, s: Sphere) -> f64 {
    let q = slice_embed(s, ImaginaryUnit::I, true);
    let d = delta(t, q).expect("square");
    linalg::singular_values(&d.chi()).last().copied().unwrap_or(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSpectrumEntry {
    #[serde(flatten)]
    pub sphere: Sphere,
    /// `dim_ℍ N(Δ_q(T))`.
    pub kernel_dim: usize,
    /// `dim_ℍ { v : T v = v λ }` for `λ` the upper trace of the sphere.
    pub eigen_dim: usize,
    pub mult: usize,
}

/// Spheres with a nontrivial kernel of `Δ_q(T)`, with kernel dimensions.
pub fn point_spectrum(t: &QMatrix, tol: f64) -> Result<Vec<PointSpectrumEntry>> {
    let spec = spherical_spectrum(t, tol)?;
    let norm = t.op_norm().max(1.0);
    let n = t.rows();
    let chi = t.chi();
    let mut out = Vec::new();
    for e in &spec.entries {
        let d = delta(t, slice_embed(e.sphere, ImaginaryUnit::I, true))?;
        let kernel = 2 * n - linalg::rank(&d.chi(), KERNEL_TOL * norm * norm);
        let shifted = &chi - &CMatrix::from_diagonal_element(2 * n, 2 * n, e.sphere.upper());
        let null = 2 * n - linalg::rank(&shifted, KERNEL_TOL * norm);
        let eigen_dim = if e.sphere.is_real() { null / 2 } else { null };
        if kernel > 0 {
            out.push(PointSpectrumEntry {
                sphere: e.sphere,
                kernel_dim: kernel / 2,
                eigen_dim,
                mult: e.mult,
            });
        }
    }
    Ok(out)
}

/// `S_L⁻¹(s,T)` and `S_R⁻¹(s,T)` at one point of the resolvent set.
#[derive(Clone, Debug)]
pub struct SResolventSample {
    pub s: Quaternion,
    pub left: QMatrix,
    pub right: QMatrix,
}

/// Precomputed data for evaluating S-resolvents of one operator at many points.
#[derive(Clone, Debug)]
pub struct Resolvent {
    chi_t: CMatrix,
    chi_t2: CMatrix,
    n: usize,
    norm: f64,
    spectrum: SphericalSpectrum,
    guard: f64,
}

impl Resolvent {
    pub fn new(t: &QMatrix) -> Result<Self> {
        require_square(t)?;
        let spectrum = spherical_spectrum(t, SPECTRUM_TOL)?;
        Ok(Self::with_spectrum(t, spectrum))
    }

    pub fn with_spectrum(t: &QMatrix, spectrum: SphericalSpectrum) -> Self {
        let chi_t = t.chi();
        let chi_t2 = &chi_t * &chi_t;
        Resolvent {
            n: t.rows(),
            norm: t.op_norm(),
            chi_t,
            chi_t2,
            spectrum,
            guard: RESOLVENT_GUARD,
        }
    }

    pub fn spectrum(&self) -> &SphericalSpectrum {
        &self.spectrum
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// χ(Δ_s(T))⁻¹, refusing points too close to the spectrum.
    fn delta_inv(&self, s: Quaternion) -> Result<CMatrix> {
        let dist = self.spectrum.distance_to(s);
        let threshold = self.guard * self.norm.max(f64::MIN_POSITIVE);
        let d = &self.chi_t2 - &self.chi_t * Complex64::new(2.0 * s.re(), 0.0)
            + CMatrix::from_diagonal_element(2 * self.n, 2 * self.n, Complex64::new(s.norm_sqr(), 0.0));
        if dist < threshold {
            return Err(Error::Singular { distance: dist, threshold, condition: condition(&d) });
        }
        linalg::inverse(&d).map_err(|_| Error::Singular {
            distance: dist,
            threshold,
            condition: f64::INFINITY,
        })
    }

    /// χ(T − s̄ I).
    fn shifted(&self, s: Quaternion) -> CMatrix {
        &self.chi_t - &chi_scalar(self.n, s.conj())
    }

    /// χ(S_L⁻¹(s,T)) = −χ(Δ_s)⁻¹ χ(T − s̄).
    pub(crate) fn left_chi(&self, s: Quaternion) -> Result<CMatrix> {
        Ok(-(self.delta_inv(s)? * self.shifted(s)))
    }

    /// χ(S_R⁻¹(s,T)) = −χ(T − s̄) χ(Δ_s)⁻¹.
    pub(crate) fn right_chi(&self, s: Quaternion) -> Result<CMatrix> {
        Ok(-(self.shifted(s) * self.delta_inv(s)?))
    }

    pub fn left(&self, s: Quaternion) -> Result<QMatrix> {
        Ok(QMatrix::chi_project(&self.left_chi(s)?))
    }

    pub fn right(&self, s: Quaternion) -> Result<QMatrix> {
        Ok(QMatrix::chi_project(&self.right_chi(s)?))
    }

    pub fn sample(&self, s: Quaternion) -> Result<SResolventSample> {
        let dinv = self.delta_inv(s)?;
        let sh = self.shifted(s);
        Ok(SResolventSample {
            s,
            left: QMatrix::chi_project(&-(&dinv * &sh)),
            right: QMatrix::chi_project(&-(&sh * &dinv)),
        })
    }
}

fn condition(m: &CMatrix) -> f64 {
    let s = linalg::singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// χ(q I) for an n×n scalar matrix.
pub(crate) fn chi_scalar(n: usize, q: Quaternion) -> CMatrix {
    QMatrix::scalar(n, q).chi()
}

/// χ(q · M) computed blockwise.
pub(crate) fn chi_left_scalar(q: Quaternion, m: &CMatrix) -> CMatrix {
    let n = m.nrows() / 2;
    let (a, b) = q.to_pair();
    let top = m.rows(0, n);
    let bot = m.rows(n, n);
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    out.rows_mut(0, n).copy_from(&(top * a + bot * b));
    out.rows_mut(n, n).copy_from(&(top * (-b.conj()) + bot * a.conj()));
    out
}

/// χ(M · q) computed blockwise.
pub(crate) fn chi_right_scalar(m: &CMatrix, q: Quaternion) -> CMatrix {
    let k = m.ncols() / 2;
    let (a, b) = q.to_pair();
    let left = m.columns(0, k);
    let right = m.columns(k, k);
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    out.columns_mut(0, k).copy_from(&(left * a - right * b.conj()));
    out.columns_mut(k, k).copy_from(&(left * b + right * a.conj()));
    out
}

/// S-resolvents of `T` at `s`.
pub fn s_resolvent(t: &QMatrix, s: Quaternion) -> Result<SResolventSample> {
    Resolvent::new(t)?.sample(s)
}

/// `‖S_L⁻¹ s − T S_L⁻¹ − I‖ / (‖S_L⁻¹‖ (|s| + ‖T‖))`.
pub fn left_identity_residual(t: &QMatrix, r: &SResolventSample) -> f64 {
    let n = t.rows();
    let res = &(&r.left.right_scalar(r.s) - &t.matmul(&r.left)) - &QMatrix::identity(n);
    res.op_norm() / (r.left.op_norm() * (r.s.norm() + t.op_norm())).max(f64::MIN_POSITIVE)
}

/// `‖s S_R⁻¹ − S_R⁻¹ T − I‖ / (‖S_R⁻¹‖ (|s| + ‖T‖))`.
pub fn right_identity_residual(t: &QMatrix, r: &SResolventSample) -> f64 {
    let n = t.rows();
    let res = &(&r.right.left_scalar(r.s) - &r.right.matmul(t)) - &QMatrix::identity(n);
    res.op_norm() / (r.right.op_norm() * (r.s.norm() + t.op_norm())).max(f64::MIN_POSITIVE)
}

/// Residual of the S-resolvent equation
/// `S_R(s) S_L(p) = [(S_R(s) − S_L(p)) p − s̄ (S_R(s) − S_L(p))] (p² − 2re(s) p + |s|²)⁻¹`,
/// relative to the size of the terms involved.
pub fn resolvent_equation_residual(rs: &SResolventSample, rp: &SResolventSample) -> Result<f64> {
    let (s, p) = (rs.s, rp.s);
    let lhs = rs.right.matmul(&rp.left);
    let diff = &rs.right - &rp.left;
    let c = p * p - p * (2.0 * s.re()) + Quaternion::real(s.norm_sqr());
    let cinv = c.try_inv()?;
    let rhs = (&diff.right_scalar(p) - &diff.left_scalar(s.conj())).right_scalar(cinv);
    let scale = (rs.right.op_norm() * rp.left.op_norm())
        .max(diff.op_norm() * (p.norm() + s.norm()) * cinv.norm())
        .max(1.0);
    Ok((&lhs - &rhs).op_norm() / scale)
}
