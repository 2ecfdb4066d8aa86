//! Seeded generators for the randomized suites.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMatrix;
use crate::qmatrix::{random_quaternion, QMatrix};
use crate::quaternion::{ImaginaryUnit, Quaternion, Sphere};

/// Haar-ish unitary from the Cayley transform of a random anti-self-adjoint matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> QMatrix {
    let z = QMatrix::random(n, n, rng);
    let a = (&z - &z.adjoint()).scale(0.5);
    let id = QMatrix::identity(n);
    let num = &id - &a;
    let den = (&id + &a).inverse().expect("I + A is invertible for anti-self-adjoint A");
    num.matmul(&den)
}

/// `U diag(values) U*` for a random unitary `U`.
pub fn random_normal_with(values: &[Quaternion], rng: &mut impl Rng) -> QMatrix {
    let u = random_unitary(values.len(), rng);
    u.matmul(&QMatrix::from_diag(values)).matmul(&u.adjoint())
}

/// A point of the sphere `s` in a random slice.
pub fn random_point_on(s: Sphere, rng: &mut impl Rng) -> Quaternion {
    let m = random_unit(rng);
    m.slice_point(s.re, s.rad)
}

pub fn random_unit(rng: &mut impl Rng) -> ImaginaryUnit {
    loop {
        let (x, y, z): (f64, f64, f64) =
            (rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        if let Ok(m) = ImaginaryUnit::new(x, y, z) {
            return m;
        }
    }
}

/// `count` spheres with pairwise `(re, rad)` distance at least `min_sep`,
/// inside the box `[-2, 2] × [0, 2]`; roughly a third are real.
pub fn separated_spheres(count: usize, min_sep: f64, rng: &mut impl Rng) -> Vec<Sphere> {
    let mut out: Vec<Sphere> = Vec::with_capacity(count);
    while out.len() < count {
        let re = rng.random_range(-2.0..2.0);
        let rad = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..2.0) };
        let s = Sphere::new(re, rad);
        if out.iter().all(|o| o.dist(s) >= min_sep) {
            out.push(s);
        }
    }
    out
}

/// A random normal `n×n` matrix whose spectrum is exactly `spheres`
/// (each sphere repeated according to `mults`).
pub fn random_normal_on(spheres: &[Sphere], mults: &[usize], rng: &mut impl Rng) -> QMatrix {
    let values: Vec<Quaternion> = spheres
        .iter()
        .zip(mults)
        .flat_map(|(&s, &k)| std::iter::repeat_n(s, k))
        .map(|s| random_point_on(s, rng))
        .collect();
    random_normal_with(&values, rng)
}

pub fn random_complex(n: usize, m: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(n, m, |_, _| {
        num_complex::Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_vector(n: usize, rng: &mut impl Rng) -> Vec<Quaternion> {
    (0..n).map(|_| random_quaternion(rng)).collect()
}

/// Random invertible matrix with condition number kept moderate by
/// mixing a random matrix with the identity.
pub fn random_invertible(n: usize, rng: &mut impl Rng) -> QMatrix {
    let z = QMatrix::random(n, n, rng).scale(0.3);
    &QMatrix::identity(n) + &z
}
