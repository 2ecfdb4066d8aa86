//! The verification suite: every acceptance criterion as a list of measured
//! residuals against named tolerances.
//!
//! Reports are deterministic for a fixed seed except for wall-clock
//! measurements, which are flagged `volatile` and omitted from JSON values.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::discretize::{self, factorization_example, norm_sweep, Which};
use crate::error::{Error, Result};
use crate::irreducibility::{
    complex_suite, extension_irreducibility_check, irreducibility_report, is_strongly_irreducible, jordan_block,
    small_suite,
};
use crate::linalg;
use crate::oracles::eigenprojection;
use crate::qmatrix::{cartesian, extend, polar, random_quaternion, restrict, AntiSelfAdjointUnitary, PlusBasis, QMatrix};
use crate::quaternion::{sphere_of, ImaginaryUnit, Quaternion, Sphere};
use crate::scalculus::{build_contour, riesz_decompose, riesz_projection, RieszOptions, DEFAULT_NODES};
use crate::spectrum::{left_identity_residual, resolvent_equation_residual, right_identity_residual, Resolvent};
use crate::testing;

/// `(name, default, meaning)` for every tolerance the suite uses.
pub const TOLERANCES: &[(&str, f64, &str)] = &[
    ("volterra_window", 5e-3, "half-width of the window around 1/pi at the largest grid"),
    ("volterra_rate", 2.0, "C in error <= C/n over the sweep"),
    ("volterra_runtime", 60.0, "seconds allowed for the Volterra criterion"),
    ("rank_one_rate", 2.0, "c in |norm - 1/6| <= c/n"),
    ("rank_one_bound", 1.0 / 3.0, "strict upper bound on the rank-one norm"),
    ("factorization", 1e-12, "relative residual of T = (W+K)S"),
    ("delta", 0.5, "strict upper bound on the compact perturbation norm"),
    ("normality", 1e-10, "relative normality defect of the normal example"),
    ("nonnormality", 1e-3, "lower bound on the relative normality defect of the non-normal example"),
    ("riesz_oracle", 1e-8, "distance between quadrature and eigenvector projections"),
    ("riesz_steps", 1e-10, "idempotent, self-adjoint, sum, product and commutation residuals"),
    ("riesz_spectrum", 1e-8, "Hausdorff error of restricted spectra"),
    ("resolvent_identity", 1e-12, "relative residual of the left and right resolvent identities"),
    ("resolvent_equation", 1e-10, "relative residual of the S-resolvent equation"),
    ("cartesian", 1e-9, "relative reconstruction residual of T = A + JB/2"),
    ("cartesian_invariants", 1e-10, "J and commutation invariants"),
    ("polar", 1e-10, "relative residual of T = W0|T| and kernel alignment"),
    ("extension_norm", 1e-12, "relative norm change under extension"),
    ("extension_roundtrip", 1e-12, "relative extend/restrict roundtrip error"),
    ("slice", 1e-8, "distance between projections computed in two slices"),
];

/// Named tolerances, initialised from [`TOLERANCES`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(TOLERANCES.iter().map(|&(k, v, _)| (k.to_string(), v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    /// Overrides one tolerance; unknown names and non-positive values are rejected.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let key = name.replace('-', "_");
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::Validation(format!("tolerance {name} must be a positive number, got {value}")));
        }
        match self.0.get_mut(&key) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::Validation(format!(
                "unknown tolerance '{name}' (known: {})",
                TOLERANCES.iter().map(|t| t.0.replace('_', "-")).collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    /// Sets every tolerance to `value`.
    pub fn set_all(&mut self, value: f64) -> Result<()> {
        let names: Vec<String> = self.0.keys().cloned().collect();
        names.iter().try_for_each(|k| self.set(k, value))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub tol: Tolerances,
    /// Cap on the size of the random matrices (the grids are not capped).
    pub max_n: Option<usize>,
    pub nodes: usize,
    /// Largest Volterra grid; the sweep doubles from 64 up to it.
    pub volterra_n: usize,
    pub trials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 2024,
            tol: Tolerances::default(),
            max_n: None,
            nodes: DEFAULT_NODES,
            volterra_n: 1024,
            trials: 20,
        }
    }
}

impl VerifyConfig {
    fn size(&self, n: usize) -> usize {
        self.max_n.map_or(n, |cap| n.min(cap).max(1))
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cmp {
    AtMost,
    Below,
    Above,
    Equal,
}

impl Cmp {
    fn holds(self, value: f64, tolerance: f64) -> bool {
        match self {
            Cmp::AtMost => value <= tolerance,
            Cmp::Below => value < tolerance,
            Cmp::Above => value > tolerance,
            Cmp::Equal => value == tolerance,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Cmp::AtMost => "<=",
            Cmp::Below => "<",
            Cmp::Above => ">",
            Cmp::Equal => "==",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub cmp: Cmp,
    pub tolerance: f64,
    pub passed: bool,
    /// Wall-clock values differ between runs.
    pub volatile: bool,
}

impl Measurement {
    pub fn new(name: impl Into<String>, value: f64, cmp: Cmp, tolerance: f64) -> Self {
        // NaN never passes
        let passed = cmp.holds(value, tolerance);
        Measurement { name: name.into(), value, cmp, tolerance, passed, volatile: false }
    }

    fn volatile(mut self) -> Self {
        self.volatile = true;
        self
    }

    pub fn to_json(&self) -> Value {
        let value = if self.volatile || !self.value.is_finite() { Value::Null } else { json!(self.value) };
        json!({
            "name": self.name,
            "value": value,
            "cmp": self.cmp,
            "tolerance": self.tolerance,
            "passed": self.passed,
        })
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} = {:.3e} {} {:.3e}",
            if self.passed { "ok  " } else { "FAIL" },
            self.name,
            self.value,
            self.cmp.symbol(),
            self.tolerance
        )
    }
}

#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    pub measurements: Vec<Measurement>,
    pub notes: Vec<String>,
}

impl Criterion {
    fn new(id: &'static str, title: &'static str) -> Self {
        Criterion { id, title, measurements: Vec::new(), notes: Vec::new() }
    }

    fn push(&mut self, name: impl Into<String>, value: f64, cmp: Cmp, tolerance: f64) {
        self.measurements.push(Measurement::new(name, value, cmp, tolerance));
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn passed(&self) -> bool {
        !self.measurements.is_empty() && self.measurements.iter().all(|m| m.passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "title": self.title,
            "passed": self.passed(),
            "measurements": self.measurements.iter().map(Measurement::to_json).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }

    /// `PASS id: title` followed by one indented line per measurement.
    pub fn summary(&self) -> String {
        let mut out = format!("{} {}: {}", if self.passed() { "PASS" } else { "FAIL" }, self.id, self.title);
        for m in &self.measurements {
            out.push_str("\n    ");
            out.push_str(&m.line());
        }
        for n in &self.notes {
            out.push_str("\n    note: ");
            out.push_str(n);
        }
        out
    }
}

pub type CriterionFn = fn(&VerifyConfig) -> Result<Criterion>;

/// All criteria in reporting order.
pub const CRITERIA: &[(&str, CriterionFn)] = &[
    ("volterra", volterra),
    ("rank_one", rank_one),
    ("factorization", factorization),
    ("normality", normality),
    ("riesz", riesz),
    ("resolvent", resolvent),
    ("cartesian", cartesian_criterion),
    ("polar", polar_criterion),
    ("extension", extension),
    ("irreducibility_oracle", irreducibility_oracle),
    ("slice_independence", slice_independence),
];

/// Runs one criterion by id; an internal error becomes a failed criterion.
pub fn run_one(id: &str, cfg: &VerifyConfig) -> Result<Criterion> {
    let &(name, f) = CRITERIA
        .iter()
        .find(|(n, _)| *n == id)
        .ok_or_else(|| Error::Validation(format!("unknown criterion '{id}'")))?;
    Ok(f(cfg).unwrap_or_else(|e| {
        let mut c = Criterion::new(name, "internal error");
        c.push("error", f64::NAN, Cmp::AtMost, 0.0);
        c.note(e.to_string());
        c
    }))
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<Criterion> {
    CRITERIA.iter().map(|(id, _)| run_one(id, cfg).expect("listed criterion")).collect()
}

pub fn report_json(cfg: &VerifyConfig, results: &[Criterion]) -> Value {
    json!({
        "seed": cfg.seed,
        "max_n": cfg.max_n,
        "nodes": cfg.nodes,
        "volterra_n": cfg.volterra_n,
        "trials": cfg.trials,
        "tolerances": cfg.tol,
        "passed": results.iter().all(Criterion::passed),
        "criteria": results.iter().map(Criterion::to_json).collect::<Vec<_>>(),
    })
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    // NaN propagates so that a broken residual cannot pass
    it.into_iter().fold(0.0, |a: f64, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

fn volterra(cfg: &VerifyConfig) -> Result<Criterion> {
    let mut c = Criterion::new("volterra", "Volterra norm converges to 1/pi");
    let tol = &cfg.tol;
    let start = Instant::now();
    let sizes = discretize::sweep_sizes(64.min(cfg.volterra_n), cfg.volterra_n)?;
    let rows = norm_sweep(Which::Nonnormal, &sizes)?;
    let elapsed = start.elapsed().as_secs_f64();
    let last = rows.last().expect("nonempty sweep");
    c.push(format!("|norm(n={}) - 1/pi|", last.n), last.error, Cmp::AtMost, tol.get("volterra_window"));
    let increases = rows.windows(2).filter(|w| w[1].error >= w[0].error).count();
    c.push("sweep error increases", increases as f64, Cmp::Equal, 0.0);
    c.push("max n*error", max_of(rows.iter().map(|r| r.n as f64 * r.error)), Cmp::AtMost, tol.get("volterra_rate"));
    c.measurements.push(Measurement::new("runtime seconds", elapsed, Cmp::AtMost, tol.get("volterra_runtime")).volatile());
    for r in &rows {
        c.note(format!("n={} norm={:.12} error={:.3e}", r.n, r.norm, r.error));
    }
    Ok(c)
}

fn rank_one(cfg: &VerifyConfig) -> Result<Criterion> {
    let mut c = Criterion::new("rank_one", "rank-one kernel norm near 1/6 and below 1/3");
    let mut sizes: Vec<usize> = (4..=64).collect();
    sizes.extend(discretize::sweep_sizes(128, cfg.volterra_n.max(128))?);
    let rows = norm_sweep(Which::Normal, &sizes)?;
    c.push("max n*|norm - 1/6|", max_of(rows.iter().map(|r| r.n as f64 * r.error)), Cmp::AtMost, cfg.tol.get("rank_one_rate"));
    c.push("max norm over n>=4", max_of(rows.iter().map(|r| r.norm)), Cmp::Below, cfg.tol.get("rank_one_bound"));
    c.note(format!("sizes 4..=64 and {:?}", &sizes[61..]));
    Ok(c)
}

fn factorization(cfg: &VerifyConfig) -> Result<Criterion> {
    let mut c = Criterion::new("factorization", "T = (W+K)S at n = 96 with |K| < delta");
    for which in [Which::Normal, Which::Nonnormal] {
        let d = factorization_example(which, 96)?.diagnostics;
        c.push(format!("{which}: residual/|T|"), d.residual_rel, Cmp::AtMost, cfg.tol.get("factorization"));
        c.push(format!("{which}: |K|"), d.k_norm, Cmp::Below, cfg.tol.get("delta"));
    }
    Ok(c)
}

fn normality(cfg: &VerifyConfig) -> Result<Criterion> {
    let mut c = Criterion::new("normality", "normality certificates of the two examples");
    let normal = factorization_example(Which::Normal, 96)?.diagnostics;
    let nonnormal = factorization_example(Which::Nonnormal, 96)?.diagnostics;
    c.push("normal: |TT*-T*T|/|T|^2", normal.normality_defect, Cmp::AtMost, cfg.tol.get("normality"));
    c.push("nonnormal: |TT*-T*T|/|T|^2", nonnormal.normality_defect, Cmp::Above, cfg.tol.get("nonnormality"));
    if normal.normality_defect > cfg.tol.get("normality") {
        c.note(
            "T = chi[0,1/3](x) x + (1/2) x int y^2 g is not normal: the rank-one part x ⊗ y^2 is not self-adjoint \
             and does not commute with the multiplication part",
        );
    }
    Ok(c)
}

/// Splits `n` into `k` positive multiplicities.
fn split(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| n / k + usize::from(i < n % k)).collect()
}

fn riesz(cfg: &VerifyConfig) -> Result<Criterion> {
    let mut c = Criterion::new("riesz", "Riesz projections match the eigenvector oracle");
    let mut rng = cfg.rng(5);
    let n = cfg.size(6);
    let opts = RieszOptions { nodes: cfg.nodes, ..RieszOptions::default() };
    let (mut oracle, mut steps, mut spectrum) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..cfg.trials {
        let count = n.clamp(2, 3).min(n);
        if count < 2 {
            c.note("size cap below 2 leaves nothing to split");
            break;
        }
        let spheres = testing::separated_spheres(count, 0.5, &mut rng);
        let t = testing::random_normal_on(&spheres, &split(n, count), &mut rng);
        let cut = rng.random_range(1..count);
        let (sigma, tau) = spheres.split_at(cut);
        let pair = riesz_decompose(&t, sigma, tau, &opts)?;
        let p_oracle = eigenprojection(&t, sigma, tau)?;
        oracle.push((&pair.sigma.projection - &p_oracle).op_norm());
        let cert = pair.certificate;
        steps.push(max_of([cert.idempotent, cert.self_adjoint, cert.sum_identity, cert.product_zero, cert.commutes]));
        spectrum.push(cert.restricted_spectrum);
    }
    c.push("max |P - P_oracle|", max_of(oracle), Cmp::AtMost, cfg.tol.get("riesz_oracle"));
    c.push("max step I-III residual", max_of(steps), Cmp::AtMost, cfg.tol.get("riesz_steps"));
    c.push("max restricted spectrum error", max_of(spectrum), Cmp::AtMost, cfg.tol.get("riesz_spectrum"));
    c.note(format!("{} trials, n = {n}, {} nodes per circle", cfg.trials, cfg.nodes));
    Ok(c)
}

fn resolvent(cfg: &VerifyConfig) -> Result<Criterion> {
    let mut c = Criterion::new("resolvent", "S-resolvent identities and resolvent equation");
    let mut rng = cfg.rng(6);
    let n = cfg.size(5);
    let (mut left, mut right, mut equation) = (Vec::new(), Vec::new(), Vec::new());
    let mut skipped = 0usize;
    for _ in 0..cfg.trials {
        let t = QMatrix::random(n, n, &mut rng);
        let res = Resolvent::new(&t)?;
        let scale = res.norm().max(1.0);
        let mut samples = Vec::with_capacity(20);
        while samples.len() < 20 {
            let s = random_quaternion(&mut rng) * scale;
            if res.spectrum().distance_to(s) < 0.05 * scale {
                skipped += 1;
                continue;
            }
            samples.push(res.sample(s)?);
        }
        for r in &samples {
            left.push(left_identity_residual(&t, r));
            right.push(right_identity_residual(&t, r));
        }
        for w in samples.windows(2) {
            equation.push(resolvent_equation_residual(&w[0], &w[1])?);
        }
    }
    let tol = cfg.tol.get("resolvent_identity");
    c.push("max left identity residual", max_of(left), Cmp::AtMost, tol);
    c.push("max right identity residual", max_of(right), Cmp::AtMost, tol);
    c.push("max resolvent equation residual", max_of(equation), Cmp::AtMost, cfg.tol.get("resolvent_equation"));
    c.note(format!("{} matrices of size {n}, 20 points each; {skipped} points near the spectrum redrawn", cfg.trials));
    Ok(c)
}

fn cartesian_criterion(cfg: &VerifyConfig) -> Result<Criterion> {
    let mut c = Criterion::new("cartesian", "T = (T+T*)/2 + J|T-T*|/2 for normal T");
    let mut rng = cfg.rng(7);
    let n = cfg.size(5);
    let (mut recon, mut inv) = (Vec::new(), Vec::new());
    let mut with_kernel = 0;
    for trial in 0..cfg.trials {
        let mut values: Vec<Quaternion> = (0..n).map(|_| random_quaternion(&mut rng)).collect();
        // every other trial: real eigenvalues and a repeated sphere
        if trial % 2 == 1 {
            values[0] = Quaternion::real(values[0].re());
            if n > 2 {
                values[1] = Quaternion::real(values[1].re());
                values[2] = testing::random_point_on(sphere_of(values[n - 1]), &mut rng);
            }
        }
        let t = testing::random_normal_with(&values, &mut rng);
        let norm = t.op_norm();
        let d = cartesian(&t)?;
        if d.kernel_dim > 0 {
            with_kernel += 1;
        }
        let j = d.j.matrix();
        let ts = t.adjoint();
        let id = QMatrix::identity(n);
        recon.push((&(&t - &d.a) - &j.matmul(&d.b).scale(0.5)).op_norm() / norm);
        let diff = &t - &ts;
        inv.push(max_of([
            (j + &j.adjoint()).op_norm(),
            (&j.adjoint().matmul(j) - &id).op_norm(),
            (&j.matmul(&j.adjoint()) - &id).op_norm(),
            j.commutator(&t).op_norm() / norm,
            j.commutator(&ts).op_norm() / norm,
            d.a.commutator(&d.b).op_norm() / (norm * norm),
            d.a.commutator(j).op_norm() / norm,
            d.b.commutator(j).op_norm() / norm,
            (&d.b.matmul(&d.b) - &diff.adjoint().matmul(&diff)).op_norm() / (norm * norm),
        ]));
    }
    c.push("max reconstruction residual/|T|", max_of(recon), Cmp::AtMost, cfg.tol.get("cartesian"));
    c.push("max J/commutation defect", max_of(inv), Cmp::AtMost, cfg.tol.get("cartesian_invariants"));
    c.note(format!("{} normal matrices of size {n}; {with_kernel} with nontrivial N(T-T*)", cfg.trials));
    Ok(c)
}

fn polar_criterion(cfg: &VerifyConfig) -> Result<Criterion> {
    let mut c = Criterion::new("polar", "T = W0|T| with N(W0) = N(T)");
    let mut rng = cfg.rng(8);
    let n = cfg.size(5);
    let (mut resid, mut iso, mut kernel) = (Vec::new(), Vec::new(), Vec::new());
    let mut rank_mismatch = 0usize;
    let mut cases: Vec<(usize, QMatrix)> = (0..cfg.trials)
        .map(|k| {
            let r = n - (k % n.min(4));
            let t = QMatrix::random(n, r, &mut rng).matmul(&QMatrix::random(r, n, &mut rng));
            (r, t)
        })
        .collect();
    cases.push((0, QMatrix::zeros(n, n)));
    for (r, t) in &cases {
        let p = polar(t);
        let norm = t.op_norm();
        let scale = norm.max(f64::MIN_POSITIVE);
        resid.push((t - &p.w0.matmul(&p.abs)).op_norm() / scale);
        let wtw = p.w0.adjoint().matmul(&p.w0);
        iso.push(max_of([(&wtw.matmul(&wtw) - &wtw).op_norm(), (&wtw.adjoint() - &wtw).op_norm()]));
        kernel.push(t.matmul(&(&QMatrix::identity(n) - &wtw)).op_norm() / scale);
        let rank_tol = 1e-8 * norm.max(1.0);
        let ranks = [p.rank, p.w0.rank(rank_tol), t.rank(rank_tol)];
        if ranks.iter().any(|&x| x != *r) {
            rank_mismatch += 1;
            c.note(format!("expected rank {r}, got polar/W0/T ranks {ranks:?}"));
        }
    }
    let tol = cfg.tol.get("polar");
    c.push("max residual/|T|", max_of(resid), Cmp::AtMost, tol);
    c.push("max partial isometry defect", max_of(iso), Cmp::AtMost, tol);
    c.push("max |T(I - W0*W0)|/|T|", max_of(kernel), Cmp::AtMost, tol);
    c.push("rank mismatches", rank_mismatch as f64, Cmp::Equal, 0.0);
    c.note(format!("{} matrices of size {n} with ranks {}..={n}, plus the zero matrix", cases.len(), n - n.min(4) + 1));
    Ok(c)
}

fn random_j(n: usize, rng: &mut ChaCha8Rng) -> Result<AntiSelfAdjointUnitary> {
    let u = testing::random_unitary(n, rng);
    let j = u.matmul(&QMatrix::scalar(n, Quaternion::I)).matmul(&u.adjoint());
    AntiSelfAdjointUnitary::new((&j - &j.adjoint()).scale(0.5))
}

fn extension(cfg: &VerifyConfig) -> Result<Criterion> {
    let mut c = Criterion::new("extension", "extension preserves norms, inverts restriction, and preserves irreducibility");
    let mut rng = cfg.rng(9);
    let n = cfg.size(4);
    let (mut norm_err, mut restrict_err, mut roundtrip_err) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..cfg.trials {
        let j = random_j(n, &mut rng)?;
        let basis = PlusBasis::new(&j);
        let tp = testing::random_complex(n, n, &mut rng);
        let tp_norm = linalg::spectral_norm(&tp);
        let ext = extend(&tp, &basis)?;
        norm_err.push((ext.op_norm() - tp_norm).abs() / tp_norm);
        restrict_err.push(linalg::spectral_norm(&(restrict(&ext, &basis)? - &tp)) / tp_norm);
        // J-commuting by construction: products and sums of J and an extension
        let v = &(&ext.matmul(&ext) + &j.matrix().scale(2.0)) + &QMatrix::identity(n);
        let back = extend(&restrict(&v, &basis)?, &basis)?;
        roundtrip_err.push((&back - &v).op_norm() / v.op_norm());
    }
    c.push("max relative norm change", max_of(norm_err), Cmp::AtMost, cfg.tol.get("extension_norm"));
    c.push("max |restrict(extend(Tp)) - Tp|/|Tp|", max_of(restrict_err), Cmp::AtMost, cfg.tol.get("extension_roundtrip"));
    c.push("max |extend(restrict(V)) - V|/|V|", max_of(roundtrip_err), Cmp::AtMost, cfg.tol.get("extension_roundtrip"));

    let suite = complex_suite(12, cfg.seed);
    let (mut disagree, mut undecided) = (0usize, 0usize);
    for (name, sp) in &suite {
        let k = sp.nrows();
        for j in [AntiSelfAdjointUnitary::standard(k), random_j(k, &mut rng)?] {
            let r = extension_irreducibility_check(sp, &j)?;
            match r.agree() {
                Some(true) => {}
                Some(false) => {
                    disagree += 1;
                    c.note(format!("{name}: complex {:?} vs quaternionic {:?}", r.complex.value, r.quaternionic.value));
                }
                None => {
                    undecided += 1;
                    c.note(format!("{name}: undecided ({} / {})", r.complex.detail, r.quaternionic.detail));
                }
            }
        }
    }
    c.push("irreducibility disagreements", disagree as f64, Cmp::Equal, 0.0);
    c.push("irreducibility undecided", undecided as f64, Cmp::Equal, 0.0);
    c.note(format!("{} J-commuting operators of size {n}; {} complex operators of size <= 3, two J each", cfg.trials, suite.len()));
    Ok(c)
}

fn four_by_four() -> Vec<(String, QMatrix)> {
    let block = |a: &QMatrix, b: &QMatrix| {
        let (p, q) = (a.rows(), b.rows());
        QMatrix::from_fn(p + q, p + q, |r, c| match (r < p, c < p) {
            (true, true) => a[(r, c)],
            (false, false) => b[(r - p, c - p)],
            _ => Quaternion::ZERO,
        })
    };
    vec![
        ("J4(i)".into(), jordan_block(4, Quaternion::I)),
        ("J2(1)+J2(1)".into(), block(&jordan_block(2, Quaternion::ONE), &jordan_block(2, Quaternion::ONE))),
        ("J3(j)+(2)".into(), block(&jordan_block(3, Quaternion::J), &QMatrix::from_diag(&[Quaternion::real(2.0)]))),
        ("diag(i,j,k,1)".into(), QMatrix::from_diag(&[Quaternion::I, Quaternion::J, Quaternion::K, Quaternion::ONE])),
    ]
}

fn irreducibility_oracle(cfg: &VerifyConfig) -> Result<Criterion> {
    let mut c = Criterion::new("irreducibility_oracle", "structural strong irreducibility matches brute-force search");
    let suite = small_suite(20, cfg.seed);
    let suite_len = suite.len();
    let (mut disagree, mut inconclusive) = (0usize, 0usize);
    for (k, (name, t)) in suite.iter().enumerate() {
        let r = irreducibility_report(t, true, cfg.seed.wrapping_add(k as u64))?;
        match r.oracle {
            Some(true) => {}
            Some(false) => {
                disagree += 1;
                c.note(format!("{name}: structural {:?} disagrees with search ({})", r.strong.value, r.strong.detail));
            }
            None => {
                inconclusive += 1;
                c.note(format!("{name}: inconclusive ({})", r.strong.detail));
            }
        }
    }
    c.push("oracle disagreements", disagree as f64, Cmp::Equal, 0.0);
    c.push("oracle inconclusive", inconclusive as f64, Cmp::Equal, 0.0);

    let mut rng = cfg.rng(10);
    let mut pool: Vec<(String, QMatrix)> = suite.into_iter().filter(|(_, t)| t.rows() <= cfg.size(4)).collect();
    pool.extend(four_by_four().into_iter().filter(|(_, t)| t.rows() <= cfg.size(4)));
    let mut changed = 0usize;
    let trials = 50;
    for k in 0..trials {
        let (name, t) = &pool[k % pool.len()];
        let s = testing::random_invertible(t.rows(), &mut rng);
        let similar = s.matmul(t).matmul(&s.inverse()?);
        let (a, b) = (is_strongly_irreducible(t)?, is_strongly_irreducible(&similar)?);
        if a.value.is_none() || a.value != b.value {
            changed += 1;
            c.note(format!("{name}: {:?} became {:?} ({})", a.value, b.value, b.detail));
        }
    }
    c.push("similarity changes", changed as f64, Cmp::Equal, 0.0);
    c.note(format!("{suite_len} operators of size <= 3 against the search; {trials} similarity trials over {} operators", pool.len()));
    Ok(c)
}

fn slice_independence(cfg: &VerifyConfig) -> Result<Criterion> {
    let mut c = Criterion::new("slice_independence", "projections agree in the slices of i and (i+j)/sqrt2");
    let mut rng = cfg.rng(11);
    let n = cfg.size(6);
    let m = ImaginaryUnit::new(1.0, 1.0, 0.0)?;
    let mut diffs = Vec::new();
    for trial in 0..cfg.trials {
        let count = n.clamp(2, 3).min(n);
        if count < 2 {
            c.note("size cap below 2 leaves nothing to split");
            break;
        }
        let spheres = testing::separated_spheres(count, 0.5, &mut rng);
        let mults = split(n, count);
        // alternate normal and similarity-transformed (non-normal) operators
        let t = if trial % 2 == 0 {
            testing::random_normal_on(&spheres, &mults, &mut rng)
        } else {
            let d = testing::random_normal_on(&spheres, &mults, &mut rng);
            let s = testing::random_invertible(n, &mut rng);
            s.matmul(&d).matmul(&s.inverse()?)
        };
        let (sigma, tau): (Vec<Sphere>, Vec<Sphere>) = (spheres[..1].to_vec(), spheres[1..].to_vec());
        let contour = build_contour(&sigma, &tau, ImaginaryUnit::I, cfg.nodes, 1e-6)?;
        let pi = riesz_projection(&t, &contour)?;
        let pm = riesz_projection(&t, &contour.in_slice(m))?;
        diffs.push((&pi - &pm).op_norm());
    }
    c.push("max |P_i - P_m|", max_of(diffs), Cmp::AtMost, cfg.tol.get("slice"));
    c.note(format!("{} operators of size {n}, half of them non-normal", cfg.trials));
    Ok(c)
}
