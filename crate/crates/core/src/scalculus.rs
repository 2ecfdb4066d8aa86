//! Axially symmetric contours, the S-functional calculus by trapezoidal
//! quadrature, Riesz projections and the Riesz decomposition.
//!
//! A circle in the slice `C_m` is parametrized counterclockwise as
//! `s(θ) = c + r e^{mθ}`, so `ds = m r e^{mθ} dθ` and
//! `ds_m = −ds·m = r e^{mθ} dθ`. With `N` equispaced nodes the weight of a
//! node in `(1/2π)∫ … ds_m …` is `r e^{mθ_k} / N`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::qmatrix::{from_columns, orthonormal_span, QMatrix};
use crate::quaternion::{hausdorff, separation, ImaginaryUnit, Quaternion, Sphere};
use crate::spectrum::{
    chi_left_scalar, chi_right_scalar, spherical_spectrum, Resolvent, SphericalSpectrum, SPECTRUM_TOL,
};

pub const DEFAULT_NODES: usize = 128;
pub const MIN_NODES: usize = 16;

/// Largest accepted ratio between the enclosed radius and the excluded
/// distance of a real-centered circle.
const MAX_RADIUS_RATIO: f64 = 0.5;

/// One circle, or a conjugate pair of circles when `offset > 0`, with
/// centers `center ± m·offset` in `C_m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: f64,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub offset: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl Circle {
    fn centers(&self) -> Vec<(f64, f64)> {
        if self.offset > 0.0 {
            vec![(self.center, self.offset), (self.center, -self.offset)]
        } else {
            vec![(self.center, 0.0)]
        }
    }
}

/// Boundary of an axially symmetric domain, traced in the slice `C_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    pub m: ImaginaryUnit,
    pub circles: Vec<Circle>,
    pub nodes: usize,
    /// Smallest distance from the contour to the excluded spheres' traces.
    pub clearance: f64,
}

#[derive(Serialize, Deserialize)]
struct ContourJson {
    m: [f64; 3],
    circles: Vec<Circle>,
    nodes: usize,
}

impl Contour {
    pub fn new(m: ImaginaryUnit, circles: Vec<Circle>, nodes: usize) -> Result<Self> {
        if nodes < MIN_NODES {
            return Err(Error::Validation(format!("at least {MIN_NODES} nodes per circle are required")));
        }
        if circles.is_empty() || circles.iter().any(|c| !(c.radius > 0.0) || c.offset < 0.0) {
            return Err(Error::Validation("contour needs circles with positive radius".into()));
        }
        Ok(Contour { m, circles, nodes, clearance: f64::NAN })
    }

    /// The same circles traced in another slice.
    pub fn in_slice(&self, m: ImaginaryUnit) -> Self {
        Contour { m, ..self.clone() }
    }

    pub fn with_nodes(&self, nodes: usize) -> Result<Self> {
        Contour::new(self.m, self.circles.clone(), nodes).map(|c| Contour { clearance: self.clearance, ..c })
    }

    /// `(s_k, w_k)` with `w_k = r e^{mθ_k} / N`, in a fixed order.
    pub fn nodes(&self) -> Vec<(Quaternion, Quaternion)> {
        let n = self.nodes;
        let mut out = Vec::with_capacity(n * self.circles.len() * 2);
        for c in &self.circles {
            for (cx, cy) in c.centers() {
                let center = self.m.slice_point(cx, cy);
                for k in 0..n {
                    let theta = 2.0 * PI * k as f64 / n as f64;
                    let rot = self.m.exp(theta) * c.radius;
                    out.push((center + rot, rot / n as f64));
                }
            }
        }
        out
    }

    /// Whether the point `(x, y)` of `C_m` lies inside some circle.
    pub fn encloses(&self, x: f64, y: f64) -> bool {
        self.circles
            .iter()
            .any(|c| c.centers().into_iter().any(|(cx, cy)| (x - cx).hypot(y - cy) < c.radius))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ContourJson { m: self.m.components(), circles: self.circles.clone(), nodes: self.nodes })
            .expect("contour serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let c: ContourJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let [x, y, z] = c.m;
        Contour::new(ImaginaryUnit::new(x, y, z)?, c.circles, c.nodes)
    }
}

/// Trace points `(re, ±rad)` of a sphere in any slice.
fn traces(s: Sphere) -> Vec<(f64, f64)> {
    if s.rad > 0.0 {
        vec![(s.re, s.rad), (s.re, -s.rad)]
    } else {
        vec![(s.re, 0.0)]
    }
}

fn dist_to_traces(x: f64, y: f64, spheres: &[Sphere]) -> f64 {
    spheres
        .iter()
        .flat_map(|&s| traces(s))
        .map(|(a, b)| (x - a).hypot(y - b))
        .fold(f64::INFINITY, f64::min)
}

fn clearance_of(circles: &[Circle], other: &[Sphere]) -> f64 {
    circles
        .iter()
        .flat_map(|c| c.centers().into_iter().map(move |(x, y)| (x, y, c.radius)))
        .map(|(x, y, r)| (dist_to_traces(x, y, other) - r).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Circles around every sphere of `sigma` that exclude every sphere of
/// `other`.
///
/// The first choice is a single circle centered on ℝ at the midpoint of
/// `sigma`'s real parts; its radius is the geometric mean of the enclosed
/// radius and the excluded distance. If that circle does not fit (the
/// enclosed radius exceeds half the excluded distance, or the clearance is
/// below a quarter of the separation), each sphere gets its own circle by
/// the same rule, and a nonreal sphere whose real-centered circle would
/// swallow other traces gets a conjugate pair of circles around `re ± m rad`
/// with half the distance to the nearest other trace as radius.
pub fn build_contour(
    sigma: &[Sphere],
    other: &[Sphere],
    m: ImaginaryUnit,
    nodes: usize,
    min_separation: f64,
) -> Result<Contour> {
    if sigma.is_empty() {
        return Err(Error::Partition("cannot build a contour around an empty set".into()));
    }
    let d = separation(sigma, other);
    if d < min_separation {
        return Err(Error::Separation { gap: d, required: min_separation });
    }
    let scale = sigma.iter().chain(other).map(|s| s.re.abs().max(s.rad)).fold(1.0, f64::max);

    let lo = sigma.iter().map(|s| s.re).fold(f64::INFINITY, f64::min);
    let hi = sigma.iter().map(|s| s.re).fold(f64::NEG_INFINITY, f64::max);
    let c = 0.5 * (lo + hi);
    let r_in = sigma.iter().map(|s| (s.re - c).hypot(s.rad)).fold(0.0, f64::max);
    let r_out = dist_to_traces(c, 0.0, other);
    if r_out.is_infinite() {
        let radius = (2.0 * r_in).max(0.25 * scale);
        let circles = vec![Circle { center: c, radius, offset: 0.0 }];
        return Ok(Contour { clearance: f64::INFINITY, ..Contour::new(m, circles, nodes)? });
    }
    if r_in <= MAX_RADIUS_RATIO * r_out {
        let radius = (r_in.max(0.25 * r_out) * r_out).sqrt();
        let circles = vec![Circle { center: c, radius, offset: 0.0 }];
        let clearance = clearance_of(&circles, other);
        if clearance >= 0.25 * d {
            return Ok(Contour { clearance, ..Contour::new(m, circles, nodes)? });
        }
    }

    let mut circles = Vec::with_capacity(sigma.len());
    for (idx, &s) in sigma.iter().enumerate() {
        let rest: Vec<Sphere> = sigma
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != idx)
            .map(|(_, &x)| x)
            .chain(other.iter().copied())
            .collect();
        let r_out = dist_to_traces(s.re, 0.0, &rest);
        if s.rad <= MAX_RADIUS_RATIO * r_out {
            let radius = if r_out.is_finite() {
                (s.rad.max(0.25 * r_out) * r_out).sqrt()
            } else {
                (2.0 * s.rad).max(0.25 * scale)
            };
            let circle = Circle { center: s.re, radius, offset: 0.0 };
            if clearance_of(&[circle], other) >= 0.25 * d {
                circles.push(circle);
                continue;
            }
        }
        let near = dist_to_traces(s.re, s.rad, &rest).min(2.0 * s.rad);
        circles.push(Circle { center: s.re, radius: 0.5 * near, offset: s.rad });
    }
    let clearance = clearance_of(&circles, other);
    Ok(Contour { clearance, ..Contour::new(m, circles, nodes)? })
}

/// A slice function handle evaluable at contour nodes.
#[derive(Clone)]
pub struct SliceFn {
    f: Arc<dyn Fn(Quaternion) -> Quaternion + Send + Sync>,
    intrinsic: bool,
    name: String,
}

impl std::fmt::Debug for SliceFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SliceFn").field("name", &self.name).field("intrinsic", &self.intrinsic).finish()
    }
}

impl SliceFn {
    /// `intrinsic` declares that `f` maps every slice `C_m` into itself.
    pub fn new(
        name: impl Into<String>,
        intrinsic: bool,
        f: impl Fn(Quaternion) -> Quaternion + Send + Sync + 'static,
    ) -> Self {
        SliceFn { f: Arc::new(f), intrinsic, name: name.into() }
    }

    pub fn constant(c: f64) -> Self {
        SliceFn::new(format!("{c}"), true, move |_| Quaternion::real(c))
    }

    /// `Σ a_k q^k` with real coefficients, lowest degree first.
    pub fn real_polynomial(coeffs: &[f64]) -> Self {
        let coeffs = coeffs.to_vec();
        SliceFn::new(format!("poly{coeffs:?}"), true, move |q| {
            coeffs.iter().rev().fold(Quaternion::ZERO, |acc, &a| acc * q + Quaternion::real(a))
        })
    }

    /// `1` on the closed discs bounded by `contour`, `0` elsewhere; locally
    /// constant on a neighborhood of the enclosed spectrum and of the rest.
    pub fn indicator(contour: &Contour) -> Self {
        let circles = contour.circles.clone();
        SliceFn::new("indicator", true, move |q| {
            let (x, y) = (q.re(), q.im_norm());
            let inside = circles.iter().any(|c| {
                c.centers().into_iter().any(|(cx, cy)| (x - cx).hypot(y - cy) <= c.radius * (1.0 + 1e-9))
            });
            Quaternion::real(if inside { 1.0 } else { 0.0 })
        })
    }

    /// `f̂(q) = conj(f(conj q))`.
    pub fn hat(&self) -> Self {
        let f = self.f.clone();
        SliceFn::new(format!("hat({})", self.name), self.intrinsic, move |q| f(q.conj()).conj())
    }

    pub fn eval(&self, q: Quaternion) -> Quaternion {
        (self.f)(q)
    }

    pub fn is_intrinsic(&self) -> bool {
        self.intrinsic
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Node-wise χ matrices summed in node order.
fn quadrature(
    nodes: &[(Quaternion, Quaternion)],
    term: impl Fn(Quaternion, Quaternion) -> Result<CMatrix> + Sync,
) -> Result<CMatrix> {
    let terms: Vec<CMatrix> = nodes.par_iter().map(|&(s, w)| term(s, w)).collect::<Result<_>>()?;
    let mut iter = terms.into_iter();
    let first = iter.next().ok_or_else(|| Error::Validation("contour without nodes".into()))?;
    Ok(iter.fold(first, |acc, t| acc + t))
}

/// `P = (1/2π) ∫ ds_m S_R⁻¹(s,T)` over the contour.
pub fn riesz_projection(t: &QMatrix, contour: &Contour) -> Result<QMatrix> {
    let res = Resolvent::new(t)?;
    riesz_projection_with(&res, contour)
}

pub fn riesz_projection_with(res: &Resolvent, contour: &Contour) -> Result<QMatrix> {
    let nodes = contour.nodes();
    let sum = quadrature(&nodes, |s, w| Ok(chi_left_scalar(w, &res.right_chi(s)?)))?;
    Ok(QMatrix::chi_project(&sum))
}

/// Output of the functional calculus; `intrinsic` is false when the handle
/// was not declared slice-preserving, in which case slice independence is
/// not guaranteed.
#[derive(Clone, Debug)]
pub struct CalcValue {
    pub value: QMatrix,
    pub intrinsic: bool,
}

/// `f(T) = (1/2π)∫ S_L⁻¹(s,T) ds_m f(s)` (left) or
/// `(1/2π)∫ f(s) ds_m S_R⁻¹(s,T)` (right).
pub fn func_calc(f: &SliceFn, side: Side, t: &QMatrix, contour: &Contour) -> Result<CalcValue> {
    let res = Resolvent::new(t)?;
    let nodes = contour.nodes();
    let sum = match side {
        Side::Left => quadrature(&nodes, |s, w| Ok(chi_right_scalar(&res.left_chi(s)?, w * f.eval(s))))?,
        Side::Right => quadrature(&nodes, |s, w| Ok(chi_left_scalar(f.eval(s) * w, &res.right_chi(s)?)))?,
    };
    Ok(CalcValue { value: QMatrix::chi_project(&sum), intrinsic: f.is_intrinsic() })
}

/// `‖f(T)* − f̂(T*)‖` from two independent left-calculus quadratures.
pub fn calc_adjoint_check(f: &SliceFn, t: &QMatrix, contour: &Contour) -> Result<f64> {
    let ft = func_calc(f, Side::Left, t, contour)?.value;
    let fhat = func_calc(&f.hat(), Side::Left, &t.adjoint(), contour)?.value;
    Ok((&ft.adjoint() - &fhat).op_norm())
}

/// Residuals certifying the four steps of the Riesz decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszCertificate {
    /// `max ‖P² − P‖` over both projections.
    pub idempotent: f64,
    /// `max ‖P* − P‖`.
    pub self_adjoint: f64,
    /// `‖P_σ + P_τ − I‖`.
    pub sum_identity: f64,
    /// `max(‖P_σ P_τ‖, ‖P_τ P_σ‖)`.
    pub product_zero: f64,
    /// `max ‖TP − PT‖ / ‖T‖`.
    pub commutes: f64,
    /// Hausdorff distance between restricted spectra and the partition.
    pub restricted_spectrum: f64,
}

/// Tolerances for [`RieszCertificate::passes`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszTolerances {
    pub projection: f64,
    pub restricted_spectrum: f64,
}

impl Default for RieszTolerances {
    fn default() -> Self {
        RieszTolerances { projection: 1e-10, restricted_spectrum: 1e-8 }
    }
}

impl RieszCertificate {
    pub fn passes(&self, tol: &RieszTolerances) -> bool {
        self.idempotent <= tol.projection
            && self.self_adjoint <= tol.projection
            && self.sum_identity <= tol.projection
            && self.product_zero <= tol.projection
            && self.commutes <= tol.projection
            && self.restricted_spectrum <= tol.restricted_spectrum
    }

    /// `(name, value)` pairs in reporting order.
    pub fn entries(&self) -> [(&'static str, f64); 6] {
        [
            ("step1_idempotent", self.idempotent),
            ("step1_self_adjoint", self.self_adjoint),
            ("step2_sum_identity", self.sum_identity),
            ("step2_product_zero", self.product_zero),
            ("step3_commutes", self.commutes),
            ("step4_restricted_spectrum", self.restricted_spectrum),
        ]
    }
}

/// `T` restricted to an invariant subspace.
#[derive(Clone, Debug)]
pub struct InvariantPart {
    pub projection: QMatrix,
    /// Orthonormal columns spanning the range of the projection.
    pub basis: QMatrix,
    /// `V* T V` in that basis.
    pub restricted: QMatrix,
    pub spectrum: SphericalSpectrum,
    pub contour: Contour,
}

#[derive(Clone, Debug)]
pub struct RieszPair {
    pub sigma: InvariantPart,
    pub tau: InvariantPart,
    pub certificate: RieszCertificate,
}

/// Options shared by the Riesz routines.
#[derive(Clone, Copy, Debug)]
pub struct RieszOptions {
    pub nodes: usize,
    pub m: ImaginaryUnit,
    /// Tie radius (relative to `max(1, ‖T‖)`) for matching partition spheres.
    pub match_tol: f64,
    pub min_separation: f64,
}

impl Default for RieszOptions {
    fn default() -> Self {
        RieszOptions { nodes: DEFAULT_NODES, m: ImaginaryUnit::I, match_tol: 1e-6, min_separation: 1e-6 }
    }
}

/// Splits `T` along a partition `σ ∪ τ = σ_S(T)` and certifies the result.
pub fn riesz_decompose(t: &QMatrix, sigma: &[Sphere], tau: &[Sphere], opts: &RieszOptions) -> Result<RieszPair> {
    if !t.is_square() {
        return Err(Error::Validation("operator must be square".into()));
    }
    if sigma.is_empty() || tau.is_empty() {
        return Err(Error::Partition(format!(
            "both parts must be nonempty ({} empty)",
            if sigma.is_empty() { "σ" } else { "τ" }
        )));
    }
    let res = Resolvent::new(t)?;
    let norm = res.norm().max(1.0);
    let spec = res.spectrum().spheres();
    let tie = opts.match_tol * norm;
    let part_of = |s: &Sphere| -> Option<usize> { spec.iter().position(|x| x.dist(*s) <= tie) };
    let mut claimed = vec![0usize; spec.len()];
    for s in sigma.iter().chain(tau) {
        match part_of(s) {
            Some(k) => claimed[k] += 1,
            None => {
                return Err(Error::Partition(format!("sphere ({}, {}) is not in the spectrum", s.re, s.rad)));
            }
        }
    }
    if let Some(k) = claimed.iter().position(|&c| c != 1) {
        let what = if claimed[k] == 0 { "is not covered" } else { "is claimed twice" };
        return Err(Error::Partition(format!(
            "spectral sphere ({}, {}) {what}",
            spec[k].re, spec[k].rad
        )));
    }
    // use the computed spheres, not the caller's approximations
    let snap = |set: &[Sphere]| -> Vec<Sphere> { set.iter().map(|s| spec[part_of(s).unwrap()]).collect() };
    let (sigma, tau) = (snap(sigma), snap(tau));

    let c_sigma = build_contour(&sigma, &tau, opts.m, opts.nodes, opts.min_separation)?;
    let c_tau = build_contour(&tau, &sigma, opts.m, opts.nodes, opts.min_separation)?;
    let p_sigma = riesz_projection_with(&res, &c_sigma)?;
    let p_tau = riesz_projection_with(&res, &c_tau)?;

    let n = t.rows();
    let id = QMatrix::identity(n);
    let idem = |p: &QMatrix| (&p.matmul(p) - p).op_norm();
    let sa = |p: &QMatrix| (&p.adjoint() - p).op_norm();
    let comm = |p: &QMatrix| t.commutator(p).op_norm() / norm;

    let sigma_part = invariant_part(t, p_sigma, c_sigma)?;
    let tau_part = invariant_part(t, p_tau, c_tau)?;
    let (ps, pt) = (&sigma_part.projection, &tau_part.projection);
    let certificate = RieszCertificate {
        idempotent: idem(ps).max(idem(pt)),
        self_adjoint: sa(ps).max(sa(pt)),
        sum_identity: (&(ps + pt) - &id).op_norm(),
        product_zero: ps.matmul(pt).op_norm().max(pt.matmul(ps).op_norm()),
        commutes: comm(ps).max(comm(pt)),
        restricted_spectrum: hausdorff(&sigma_part.spectrum.spheres(), &sigma)
            .max(hausdorff(&tau_part.spectrum.spheres(), &tau)),
    };
    Ok(RieszPair { sigma: sigma_part, tau: tau_part, certificate })
}

fn invariant_part(t: &QMatrix, p: QMatrix, contour: Contour) -> Result<InvariantPart> {
    let n = t.rows();
    let cols: Vec<Vec<Quaternion>> = (0..n).map(|c| p.col(c)).collect();
    let span = orthonormal_span(&cols, 1e-8, n);
    let basis = from_columns(n, &span);
    let restricted = basis.adjoint().matmul(t).matmul(&basis);
    let spectrum = if span.is_empty() {
        SphericalSpectrum { entries: Vec::new() }
    } else {
        spherical_spectrum(&restricted, SPECTRUM_TOL)?
    };
    Ok(InvariantPart { projection: p, basis, restricted, spectrum, contour })
}

/// Contour enclosing the whole spectrum of `T`.
pub fn full_contour(t: &QMatrix, m: ImaginaryUnit, nodes: usize) -> Result<Contour> {
    let spec = spherical_spectrum(t, SPECTRUM_TOL)?;
    build_contour(&spec.spheres(), &[], m, nodes, 0.0)
}
