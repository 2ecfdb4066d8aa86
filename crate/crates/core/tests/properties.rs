use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quatcalc::discretize::{kernel_op, midpoints, mult_op};
use quatcalc::irreducibility::{is_irreducible, is_strongly_irreducible, jordan_block, spectrum_spheres};
use quatcalc::qmatrix::{cartesian, extend, polar, restrict, slice_split, AntiSelfAdjointUnitary, PlusBasis};
use quatcalc::quaternion::{circularize, hausdorff, sphere_of};
use quatcalc::scalculus::{riesz_decompose, RieszOptions, RieszTolerances};
use quatcalc::spectrum::{
    left_identity_residual, resolvent_equation_residual, right_identity_residual, spherical_spectrum, Resolvent,
    SPECTRUM_TOL,
};
use quatcalc::{testing, ImaginaryUnit, QMatrix, Quaternion, Sphere};

fn quat() -> impl Strategy<Value = Quaternion> {
    [-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64].prop_map(|[w, x, y, z]| Quaternion::new(w, x, y, z))
}

fn nonzero_quat() -> impl Strategy<Value = Quaternion> {
    quat().prop_filter("nonzero", |q| q.norm() > 1e-3)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn spheres_close(a: &[Sphere], b: &[Sphere], tol: f64) -> bool {
    a.len() == b.len() && hausdorff(a, b) <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn product_is_associative_and_bilinear(p in quat(), q in quat(), r in quat(), a in -5.0..5.0f64) {
        let scale = p.norm() * q.norm() * r.norm() + 1.0;
        prop_assert!(((p * q) * r).dist(p * (q * r)) <= 1e-14 * scale);
        prop_assert!(((p + q) * r).dist(p * r + q * r) <= 1e-14 * scale);
        prop_assert!((p * (q * a)).dist((p * q) * a) <= 1e-14 * scale * (a.abs() + 1.0));
    }

    #[test]
    fn norm_is_multiplicative(p in quat(), q in quat()) {
        let lhs = (p * q).norm();
        let rhs = p.norm() * q.norm();
        prop_assert!((lhs - rhs).abs() <= 1e-14 * rhs.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn conjugation_reverses_products(p in quat(), q in quat()) {
        prop_assert!((p * q).conj().dist(q.conj() * p.conj()) <= 1e-13 * (p.norm() * q.norm() + 1.0));
    }

    #[test]
    fn spheres_are_similarity_classes(q in quat(), s in nonzero_quat()) {
        let conj = s.inv() * q * s;
        prop_assert!(sphere_of(conj).approx_eq(sphere_of(q), 1e-12 * (q.norm() + 1.0)));
    }

    #[test]
    fn circularization_is_idempotent(points in prop::collection::vec((-3.0..3.0f64, 0.0..3.0f64), 1..6)) {
        let pts: Vec<Complex64> = points.iter().flat_map(|&(a, b)| [Complex64::new(a, b), Complex64::new(a, -b)]).collect();
        let once = circularize(&pts, 1e-12).unwrap();
        let pre: Vec<Complex64> = once.iter().flat_map(|s| [s.upper(), s.upper().conj()]).collect();
        prop_assert_eq!(circularize(&pre, 1e-12).unwrap(), once);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn chi_is_a_star_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = QMatrix::random(6, 6, &mut r);
        let b = QMatrix::random(6, 6, &mut r);
        let lhs = a.matmul(&b).chi();
        let rhs = a.chi() * b.chi();
        prop_assert!((lhs - rhs).norm() <= 1e-13 * a.op_norm() * b.op_norm());
        prop_assert_eq!(a.adjoint().chi(), a.chi().adjoint());
        prop_assert_eq!(QMatrix::chi_inv(&a.chi()).unwrap(), a);
    }

    #[test]
    fn operator_norm_identities(seed in any::<u64>(), n in 1usize..7) {
        let t = QMatrix::random(n, n + 1, &mut rng(seed));
        let norm = t.op_norm();
        prop_assert!((norm - t.adjoint().op_norm()).abs() <= 1e-12 * norm);
        prop_assert!((t.adjoint().matmul(&t).op_norm() - norm * norm).abs() <= 1e-12 * norm * norm);
        prop_assert!((norm - t.power_norm(1e-15, 20_000)).abs() <= 1e-6 * norm);
    }

    #[test]
    fn polar_partial_isometry(seed in any::<u64>(), n in 1usize..6, deficit in 0usize..3) {
        let mut r = rng(seed);
        let k = n.saturating_sub(deficit).max(1);
        let t = QMatrix::random(n, k, &mut r).matmul(&QMatrix::random(k, n, &mut r));
        let p = polar(&t);
        let norm = t.op_norm();
        prop_assert!((&t - &p.w0.matmul(&p.abs)).op_norm() <= 1e-10 * norm);
        let wtw = p.w0.adjoint().matmul(&p.w0);
        prop_assert!((&wtw.matmul(&wtw) - &wtw).op_norm() <= 1e-10);
        prop_assert!((&wtw.adjoint() - &wtw).op_norm() <= 1e-10);
        prop_assert_eq!(p.w0.rank(1e-8 * norm), t.rank(1e-8 * norm));
        prop_assert_eq!(p.rank, k);
    }

    #[test]
    fn cartesian_reconstructs_normal_matrices(seed in any::<u64>(), n in 1usize..6, real in 0usize..3) {
        let mut r = rng(seed);
        let mut values: Vec<Quaternion> = (0..n).map(|_| quatcalc::qmatrix::random_quaternion(&mut r)).collect();
        for v in values.iter_mut().take(real) {
            *v = Quaternion::real(v.re());
        }
        let t = testing::random_normal_with(&values, &mut r);
        let d = cartesian(&t).unwrap();
        let norm = t.op_norm();
        let j = d.j.matrix();
        prop_assert!((&(&t - &d.a) - &j.matmul(&d.b).scale(0.5)).op_norm() <= 1e-9 * norm);
        prop_assert!(d.j.defect() <= 1e-12);
        prop_assert!(j.commutator(&t).op_norm() <= 1e-10 * norm);
        prop_assert!(j.commutator(&t.adjoint()).op_norm() <= 1e-10 * norm);
    }

    #[test]
    fn slice_split_recombines(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let u = testing::random_unitary(n, &mut r);
        let j = AntiSelfAdjointUnitary::new(u.matmul(&QMatrix::scalar(n, Quaternion::I)).matmul(&u.adjoint())).unwrap();
        let m = testing::random_unit(&mut r);
        let x = testing::random_vector(n, &mut r);
        let (p, q) = slice_split(&x, &j, m);
        let mq = m.as_quaternion();
        let (jp, jq) = (j.matrix().apply(&p), j.matrix().apply(&q));
        for k in 0..n {
            prop_assert!((p[k] + q[k]).dist(x[k]) <= 1e-13);
            prop_assert!(jp[k].dist(p[k] * mq) <= 1e-12);
            prop_assert!(jq[k].dist(-(q[k] * mq)) <= 1e-12);
        }
    }

    #[test]
    fn extension_roundtrip(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let u = testing::random_unitary(n, &mut r);
        let j = AntiSelfAdjointUnitary::new(u.matmul(&QMatrix::scalar(n, Quaternion::I)).matmul(&u.adjoint())).unwrap();
        let basis = PlusBasis::new(&j);
        let tp = testing::random_complex(n, n, &mut r);
        let t = extend(&tp, &basis).unwrap();
        let tp_norm = quatcalc::linalg::spectral_norm(&tp);
        prop_assert!((t.op_norm() - tp_norm).abs() <= 1e-12 * tp_norm);
        prop_assert!(t.commutator(j.matrix()).op_norm() <= 1e-12 * tp_norm);
        let back = extend(&restrict(&t, &basis).unwrap(), &basis).unwrap();
        prop_assert!((&back - &t).op_norm() <= 1e-12 * tp_norm);
        let adj = extend(&tp.adjoint(), &basis).unwrap();
        prop_assert!((&adj - &t.adjoint()).op_norm() <= 1e-12 * tp_norm);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn resolvent_identities(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = QMatrix::random(5, 5, &mut r);
        let res = Resolvent::new(&t).unwrap();
        let scale = res.norm();
        let mut samples = Vec::new();
        while samples.len() < 4 {
            let s = quatcalc::qmatrix::random_quaternion(&mut r) * scale;
            if res.spectrum().distance_to(s) > 0.05 * scale {
                samples.push(res.sample(s).unwrap());
            }
        }
        for s in &samples {
            prop_assert!(left_identity_residual(&t, s) <= 1e-12);
            prop_assert!(right_identity_residual(&t, s) <= 1e-12);
        }
        for w in samples.windows(2) {
            prop_assert!(resolvent_equation_residual(&w[0], &w[1]).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn spectrum_is_similarity_and_adjoint_invariant(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let t = QMatrix::random(n, n, &mut r);
        let s = testing::random_invertible(n, &mut r);
        let similar = s.inverse().unwrap().matmul(&t).matmul(&s);
        let a = spherical_spectrum(&t, SPECTRUM_TOL).unwrap();
        let b = spherical_spectrum(&similar, SPECTRUM_TOL).unwrap();
        let c = spherical_spectrum(&t.adjoint(), SPECTRUM_TOL).unwrap();
        prop_assert_eq!(a.total_multiplicity(), n);
        prop_assert!(spheres_close(&a.spheres(), &b.spheres(), 1e-8 * t.op_norm().max(1.0)));
        prop_assert!(spheres_close(&a.spheres(), &c.spheres(), 1e-10 * t.op_norm().max(1.0)));
    }

    #[test]
    fn riesz_steps_on_separated_normal_matrices(seed in any::<u64>(), count in 2usize..4) {
        let mut r = rng(seed);
        let spheres = testing::separated_spheres(count, 0.5, &mut r);
        let mults: Vec<usize> = (0..count).map(|k| 1 + k % 2).collect();
        let t = testing::random_normal_on(&spheres, &mults, &mut r);
        let (sigma, tau) = spheres.split_at(1);
        let pair = riesz_decompose(&t, sigma, tau, &RieszOptions::default()).unwrap();
        prop_assert!(pair.certificate.passes(&RieszTolerances::default()), "{:?}", pair.certificate);
        prop_assert_eq!(pair.sigma.basis.cols(), mults[0]);
    }

    #[test]
    fn slice_choice_does_not_matter(seed in any::<u64>()) {
        let mut r = rng(seed);
        let spheres = testing::separated_spheres(2, 0.5, &mut r);
        let t = testing::random_normal_on(&spheres, &[2, 1], &mut r);
        let m = testing::random_unit(&mut r);
        let base = RieszOptions::default();
        let pi = riesz_decompose(&t, &spheres[..1], &spheres[1..], &base).unwrap();
        let pm = riesz_decompose(&t, &spheres[..1], &spheres[1..], &RieszOptions { m, ..base }).unwrap();
        prop_assert!((&pi.sigma.projection - &pm.sigma.projection).op_norm() <= 1e-8);
    }

    #[test]
    fn strong_irreducibility_is_similarity_invariant(seed in any::<u64>(), pick in 0usize..6) {
        let mut r = rng(seed);
        let q = Quaternion::new;
        let t = match pick {
            0 => jordan_block(3, q(1.0, 1.0, 0.0, 0.0)),
            1 => jordan_block(2, Quaternion::ZERO),
            2 => QMatrix::from_diag(&[Quaternion::I, Quaternion::J]),
            3 => QMatrix::from_diag(&[Quaternion::ONE, q(2.0, 0.0, 0.0, 0.0)]),
            4 => jordan_block(4, Quaternion::K),
            _ => QMatrix::random(3, 3, &mut r),
        };
        let s = testing::random_invertible(t.rows(), &mut r);
        let similar = s.inverse().unwrap().matmul(&t).matmul(&s);
        let a = is_strongly_irreducible(&t).unwrap();
        let b = is_strongly_irreducible(&similar).unwrap();
        prop_assert!(a.value.is_some());
        prop_assert_eq!(a.value, b.value);
        if a.value == Some(true) {
            prop_assert_eq!(is_irreducible(&t).unwrap().value, Some(true));
        }
        if spectrum_spheres(&t).len() >= 2 {
            prop_assert_eq!(a.value, Some(false));
        }
    }

    #[test]
    fn kernel_adjoint_is_reflected_conjugate(n in 1usize..40, a in quat(), b in quat()) {
        let k = move |x: f64, y: f64| a * (x * y) + b * (x - y * y);
        let kt = move |x: f64, y: f64| k(y, x).conj();
        let op = kernel_op("k", k, n).unwrap();
        let adj = kernel_op("k*", kt, n).unwrap();
        prop_assert_eq!(op.t.adjoint(), adj.t);
    }

    #[test]
    fn multiplication_by_x_has_real_spectrum(n in 1usize..40) {
        let s = mult_op("x", Quaternion::real, n).unwrap();
        let spec = spherical_spectrum(&s.t, SPECTRUM_TOL).unwrap();
        prop_assert_eq!(spec.len(), n);
        prop_assert!(spec.entries.iter().all(|e| e.sphere.rad == 0.0 && (0.0..=1.0).contains(&e.sphere.re)));
        let mids = midpoints(n);
        prop_assert!(spec.entries.iter().zip(&mids).all(|(e, x)| (e.sphere.re - x).abs() <= 1e-12));
    }
}

#[test]
fn imaginary_unit_rejects_zero() {
    assert!(ImaginaryUnit::new(0.0, 0.0, 0.0).is_err());
}

#[test]
fn associativity_over_ten_thousand_triples() {
    let mut r = rng(17);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let [p, q, s] = [0; 3].map(|_| quatcalc::qmatrix::random_quaternion(&mut r));
        let scale = p.norm() * q.norm() * s.norm();
        worst = worst.max(((p * q) * s).dist(p * (q * s)) / scale);
    }
    assert!(worst <= 1e-14, "{worst:e}");
}
