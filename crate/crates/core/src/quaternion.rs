//! Quaternion scalars, imaginary units, spheres `[q]` and circularization.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tie radius used when comparing spheres.
pub const SPHERE_TOL: f64 = 1e-9;

/// `q = w + x i + y j + z k`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    /// Embeds a complex number into the slice `C_i`.
    pub fn from_complex(c: Complex64) -> Self {
        Quaternion::new(c.re, c.im, 0.0, 0.0)
    }

    /// Builds `a + b j` from two elements of `C_i`.
    pub fn from_pair(a: Complex64, b: Complex64) -> Self {
        Quaternion::new(a.re, a.im, b.re, b.im)
    }

    /// Splits `q = a + b j` with `a, b` in `C_i`.
    pub fn to_pair(self) -> (Complex64, Complex64) {
        (Complex64::new(self.w, self.x), Complex64::new(self.y, self.z))
    }

    pub fn re(self) -> f64 {
        self.w
    }

    pub fn im(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    pub fn im_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(self) -> bool {
        self.w == 0.0 && self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    pub fn try_inv(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::Domain("inverse of the zero quaternion".into()));
        }
        Ok(self.conj() * (1.0 / n2))
    }

    /// Panics on zero; use [`Quaternion::try_inv`] when the input is untrusted.
    pub fn inv(self) -> Self {
        self.try_inv().expect("quaternion inverse of zero")
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Axis `m_q` with `q = re(q) + m_q |im(q)|`; `None` for real `q`.
    pub fn axis(self) -> Option<ImaginaryUnit> {
        ImaginaryUnit::new(self.x, self.y, self.z).ok()
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }

    pub fn dist(self, other: Quaternion) -> f64 {
        (self - other).norm()
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Quaternion::real(w)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

// Hamilton table: ij = k, jk = i, ki = j.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        let (a1, b1, c1, d1) = (self.w, self.x, self.y, self.z);
        let (a2, b2, c2, d2) = (o.w, o.x, o.y, o.z);
        Quaternion::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, o: Quaternion) {
        *self = *self * o;
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, s: f64) -> Quaternion {
        self.scale(1.0 / s)
    }
}

impl std::iter::Sum for Quaternion {
    fn sum<I: Iterator<Item = Quaternion>>(iter: I) -> Quaternion {
        iter.fold(Quaternion::ZERO, |a, b| a + b)
    }
}

/// A unit `m` in the sphere of imaginary units, `m² = -1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImaginaryUnit {
    x: f64,
    y: f64,
    z: f64,
}

impl ImaginaryUnit {
    pub const I: ImaginaryUnit = ImaginaryUnit { x: 1.0, y: 0.0, z: 0.0 };
    pub const J: ImaginaryUnit = ImaginaryUnit { x: 0.0, y: 1.0, z: 0.0 };
    pub const K: ImaginaryUnit = ImaginaryUnit { x: 0.0, y: 0.0, z: 1.0 };

    /// Normalizes `(x, y, z)`; rejects the zero vector.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Validation("imaginary unit must be a nonzero finite 3-vector".into()));
        }
        Ok(ImaginaryUnit { x: x / n, y: y / n, z: z / n })
    }

    pub fn components(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn as_quaternion(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    /// The point `alpha + m beta` of the slice `C_m`.
    pub fn slice_point(self, alpha: f64, beta: f64) -> Quaternion {
        Quaternion::new(alpha, beta * self.x, beta * self.y, beta * self.z)
    }

    /// `e^{m theta}`.
    pub fn exp(self, theta: f64) -> Quaternion {
        self.slice_point(theta.cos(), theta.sin())
    }
}

impl Default for ImaginaryUnit {
    fn default() -> Self {
        ImaginaryUnit::I
    }
}

/// The similarity class `[q] = { p : re p = re q, |im p| = |im q| }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub re: f64,
    pub rad: f64,
}

impl Sphere {
    pub fn new(re: f64, rad: f64) -> Self {
        Sphere { re, rad: rad.abs() }
    }

    pub fn is_real(self) -> bool {
        self.rad == 0.0
    }

    /// Distance in the `(re, rad)` half-plane.
    pub fn dist(self, other: Sphere) -> f64 {
        (self.re - other.re).hypot(self.rad - other.rad)
    }

    /// Upper trace `re + i rad` in `C_i`.
    pub fn upper(self) -> Complex64 {
        Complex64::new(self.re, self.rad)
    }

    pub fn approx_eq(self, other: Sphere, tol: f64) -> bool {
        self.dist(other) <= tol
    }
}

pub fn sphere_of(q: Quaternion) -> Sphere {
    Sphere::new(q.re(), q.im_norm())
}

/// `re + m (sign * rad)`.
pub fn slice_embed(s: Sphere, m: ImaginaryUnit, positive: bool) -> Quaternion {
    let b = if positive { s.rad } else { -s.rad };
    m.slice_point(s.re, b)
}

/// Circularization of a conjugation-symmetric set of complex points.
///
/// Every point must have its conjugate in the set within `tol`; the
/// resulting spheres are deduplicated with the same tie radius and are
/// returned sorted by `(re, rad)`.
pub fn circularize(points: &[Complex64], tol: f64) -> Result<Vec<Sphere>> {
    for (idx, z) in points.iter().enumerate() {
        let zc = z.conj();
        if !points.iter().any(|w| (w - zc).norm() <= tol) {
            return Err(Error::Validation(format!(
                "point {idx} ({z}) has no conjugate partner within {tol:e}"
            )));
        }
    }
    let spheres: Vec<Sphere> = points.iter().map(|z| Sphere::new(z.re, z.im.abs())).collect();
    Ok(dedup_spheres(&spheres, tol))
}

/// Merges spheres closer than `tol` (single linkage) and sorts the result.
pub fn dedup_spheres(spheres: &[Sphere], tol: f64) -> Vec<Sphere> {
    let groups = cluster_points(spheres, tol);
    let mut out: Vec<Sphere> = groups
        .iter()
        .map(|g| {
            let n = g.len() as f64;
            let re = g.iter().map(|&i| spheres[i].re).sum::<f64>() / n;
            let rad = g.iter().map(|&i| spheres[i].rad).sum::<f64>() / n;
            Sphere::new(re, rad)
        })
        .collect();
    sort_spheres(&mut out);
    out
}

pub fn sort_spheres(spheres: &mut [Sphere]) {
    spheres.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.rad.total_cmp(&b.rad)));
}

/// Single-linkage clusters of indices, each cluster in ascending index order.
pub(crate) fn cluster_points(spheres: &[Sphere], tol: f64) -> Vec<Vec<usize>> {
    let n = spheres.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        let mut c = i;
        while label[c] != r {
            let next = label[c];
            label[c] = r;
            c = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if spheres[i].dist(spheres[j]) <= tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of_group: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match root_of_group.iter().position(|&x| x == r) {
            Some(g) => groups[g].push(i),
            None => {
                root_of_group.push(r);
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// Hausdorff distance between two finite sphere sets in the `(re, rad)` plane.
pub fn hausdorff(a: &[Sphere], b: &[Sphere]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let one_way = |x: &[Sphere], y: &[Sphere]| {
        x.iter()
            .map(|p| y.iter().map(|q| p.dist(*q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Minimum pairwise distance between two sphere sets.
pub fn separation(a: &[Sphere], b: &[Sphere]) -> f64 {
    a.iter()
        .flat_map(|p| b.iter().map(move |q| p.dist(*q)))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hamilton_table() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * j, k);
        assert_eq!(j * i, -k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        for u in [i, j, k] {
            assert_eq!(u * u, -Quaternion::ONE);
        }
        assert_eq!(i * j * k, -Quaternion::ONE);
        assert_eq!(Quaternion::new(1.0, 1.0, 1.0, 1.0).norm(), 2.0);
    }

    #[test]
    fn zero_has_no_inverse() {
        assert!(matches!(Quaternion::ZERO.try_inv(), Err(Error::Domain(_))));
        let q = Quaternion::new(1.0, -2.0, 0.5, 3.0);
        let e = q * q.inv() - Quaternion::ONE;
        assert!(e.norm() < 1e-15);
    }

    #[test]
    fn spheres_of_simple_points() {
        assert_eq!(sphere_of(Quaternion::I), Sphere::new(0.0, 1.0));
        assert_eq!(sphere_of(Quaternion::real(3.0)), Sphere::new(3.0, 0.0));
        assert_eq!(sphere_of(Quaternion::new(1.0, 0.0, 2.0, 0.0)), Sphere::new(1.0, 2.0));
    }

    #[test]
    fn circularize_examples() {
        let s = circularize(&[c(1.0, 2.0), c(1.0, -2.0)], SPHERE_TOL).unwrap();
        assert_eq!(s, vec![Sphere::new(1.0, 2.0)]);
        let s = circularize(&[c(5.0, 0.0)], SPHERE_TOL).unwrap();
        assert_eq!(s, vec![Sphere::new(5.0, 0.0)]);
        let s = circularize(&[c(0.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)], SPHERE_TOL).unwrap();
        assert_eq!(s, vec![Sphere::new(0.0, 1.0), Sphere::new(3.0, 0.0)]);
    }

    #[test]
    fn circularize_rejects_asymmetric_sets() {
        let err = circularize(&[c(1.0, 2.0)], SPHERE_TOL).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn slice_embed_examples() {
        let s = slice_embed(Sphere::new(0.0, 1.0), ImaginaryUnit::I, true);
        assert_eq!(s, Quaternion::I);
        let s = slice_embed(Sphere::new(1.0, 2.0), ImaginaryUnit::J, false);
        assert_eq!(s, Quaternion::new(1.0, 0.0, -2.0, 0.0));
        for m in [ImaginaryUnit::I, ImaginaryUnit::J, ImaginaryUnit::new(1.0, 1.0, 1.0).unwrap()] {
            assert_eq!(slice_embed(Sphere::new(3.0, 0.0), m, true), Quaternion::real(3.0));
        }
    }

    #[test]
    fn hausdorff_of_shifted_sets() {
        let a = [Sphere::new(0.0, 1.0), Sphere::new(3.0, 0.0)];
        let b = [Sphere::new(0.0, 1.5), Sphere::new(3.0, 0.0)];
        assert!((hausdorff(&a, &b) - 0.5).abs() < 1e-15);
        assert!((separation(&a[..1], &a[1..]) - 10f64.sqrt()).abs() < 1e-15);
    }
}
