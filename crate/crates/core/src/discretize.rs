//! Midpoint discretizations of multiplication, kernel and Volterra
//! operators on `L²([0,1]; ℍ)`, and the two factorization examples.
//!
//! Cells are `[r h, (r+1) h)` with `h = 1/n` and midpoints
//! `x_r = (r + ½) h`. Quaternion-valued kernels stay on the left of the
//! function values, so a kernel `k` becomes the matrix `h k(x_r, x_c)`.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::qmatrix::QMatrix;
use crate::quaternion::Quaternion;
use crate::spectrum::{spherical_spectrum, SPECTRUM_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Multiplication,
    Kernel,
    Volterra,
    Composite,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Multiplication => "multiplication",
            Kind::Kernel => "kernel",
            Kind::Volterra => "volterra",
            Kind::Composite => "composite",
        };
        f.write_str(s)
    }
}

pub const MIDPOINT_CONVENTION: &str = "midpoint";
pub const VOLTERRA_CONVENTION: &str = "midpoint, half-weight diagonal cell";

/// A discretized operator on the uniform grid with `n` cells.
#[derive(Clone, Debug)]
pub struct GridOperator {
    pub n: usize,
    pub t: QMatrix,
    pub kind: Kind,
    /// Identifier of the defining function(s).
    pub label: String,
    pub convention: &'static str,
}

impl GridOperator {
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn to_json(&self) -> Value {
        let mut v = crate::io::matrix_to_json(&self.t);
        let obj = v.as_object_mut().expect("matrix json is an object");
        obj.insert("n".into(), json!(self.n));
        obj.insert("kind".into(), json!(self.kind.to_string()));
        obj.insert("label".into(), json!(self.label));
        obj.insert("convention".into(), json!(self.convention));
        v
    }
}

/// Cell midpoints of the uniform grid.
pub fn midpoints(n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    (0..n).map(|r| (r as f64 + 0.5) * h).collect()
}

/// `⟨f, g⟩_h = h Σ conj(f_r) g_r`.
pub fn discrete_inner(f: &[Quaternion], g: &[Quaternion]) -> Quaternion {
    let h = 1.0 / f.len() as f64;
    f.iter().zip(g).map(|(a, b)| a.conj() * *b).sum::<Quaternion>() * h
}

fn require_cells(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Validation(format!("grid needs at least {min} cells, got {n}")));
    }
    Ok(())
}

/// `diag f(x_r)`.
pub fn mult_op(label: &str, f: impl Fn(f64) -> Quaternion, n: usize) -> Result<GridOperator> {
    require_cells(n, 1)?;
    let x = midpoints(n);
    let d: Vec<Quaternion> = x.iter().map(|&x| f(x)).collect();
    Ok(GridOperator {
        n,
        t: QMatrix::from_diag(&d),
        kind: Kind::Multiplication,
        label: label.into(),
        convention: MIDPOINT_CONVENTION,
    })
}

/// `h k(x_r, x_c)`.
pub fn kernel_op(label: &str, k: impl Fn(f64, f64) -> Quaternion, n: usize) -> Result<GridOperator> {
    require_cells(n, 1)?;
    let x = midpoints(n);
    let h = 1.0 / n as f64;
    Ok(GridOperator {
        n,
        t: QMatrix::from_fn(n, n, |r, c| k(x[r], x[c]) * h),
        kind: Kind::Kernel,
        label: label.into(),
        convention: MIDPOINT_CONVENTION,
    })
}

/// `g ↦ ∫₀ˣ k(x, y) g(y) dy`: weight `h` below the diagonal, `h/2` on it.
pub fn volterra_kernel_op(label: &str, k: impl Fn(f64, f64) -> Quaternion, n: usize) -> Result<GridOperator> {
    require_cells(n, 2)?;
    let x = midpoints(n);
    let h = 1.0 / n as f64;
    let t = QMatrix::from_fn(n, n, |r, c| match c.cmp(&r) {
        std::cmp::Ordering::Less => k(x[r], x[c]) * h,
        std::cmp::Ordering::Equal => k(x[r], x[c]) * (0.5 * h),
        std::cmp::Ordering::Greater => Quaternion::ZERO,
    });
    Ok(GridOperator { n, t, kind: Kind::Volterra, label: label.into(), convention: VOLTERRA_CONVENTION })
}

/// `(Kg)(x) = (j/2) ∫₀ˣ g(t) dt`.
pub fn volterra_op(n: usize) -> Result<GridOperator> {
    volterra_kernel_op("j/2", |_, _| Quaternion::J * 0.5, n)
}

/// `(Kg)(x) = ½ ∫₀¹ x y g(y) dy`.
pub fn rank_one_op(n: usize) -> Result<GridOperator> {
    kernel_op("xy/2", |x, y| Quaternion::real(0.5 * x * y), n)
}

pub const VOLTERRA_NORM: f64 = std::f64::consts::FRAC_1_PI;
pub const RANK_ONE_NORM: f64 = 1.0 / 6.0;
pub const RANK_ONE_BOUND: f64 = 1.0 / 3.0;
pub const DELTA: f64 = 0.5;

fn indicator_third(x: f64) -> f64 {
    if x <= 1.0 / 3.0 {
        1.0
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Normal,
    Nonnormal,
}

impl std::str::FromStr for Which {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(Which::Normal),
            "nonnormal" | "non-normal" => Ok(Which::Nonnormal),
            other => Err(Error::Validation(format!("unknown example '{other}' (normal | nonnormal)"))),
        }
    }
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::Normal => "normal",
            Which::Nonnormal => "nonnormal",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    /// `‖T − (W+K)S‖ / ‖T‖`.
    pub residual_rel: f64,
    pub residual: f64,
    pub t_norm: f64,
    pub k_norm: f64,
    /// Continuum value or bound that `k_norm` is compared against.
    pub k_reference: f64,
    pub k_reference_kind: &'static str,
    pub delta: f64,
    /// `‖TT* − T*T‖ / ‖T‖²`.
    pub normality_defect: f64,
    /// `‖(W*W)² − W*W‖`: zero iff `W` is a partial isometry.
    pub w_partial_isometry_defect: f64,
    /// Spheres in the spectrum of the finite section of `S`.
    pub s_sphere_count: usize,
    pub s_strongly_irreducible: bool,
    pub s_note: &'static str,
}

#[derive(Clone, Debug)]
pub struct FactorizationExample {
    pub which: Which,
    pub n: usize,
    pub t: QMatrix,
    pub w: QMatrix,
    pub k: QMatrix,
    pub s: QMatrix,
    pub diagnostics: Diagnostics,
}

const S_NOTE: &str = "finite sections of the multiplication operator are diagonal with distinct entries, hence \
strongly reducible; strong irreducibility of the continuum operator rests on its empty point spectrum";

/// Assembles `T` from its definition and `W`, `K`, `S` separately, then
/// measures the factorization residual and the diagnostics.
pub fn factorization_example(which: Which, n: usize) -> Result<FactorizationExample> {
    if n == 0 || n % 3 != 0 {
        return Err(Error::Validation(format!("n must be a positive multiple of 3, got {n}")));
    }
    let x = midpoints(n);
    let h = 1.0 / n as f64;
    let w = mult_op("chi[0,1/3]", |x| Quaternion::real(indicator_third(x)), n)?.t;
    let s = mult_op("x", Quaternion::real, n)?.t;
    let (t, k, k_reference, k_reference_kind) = match which {
        Which::Normal => {
            let t = QMatrix::from_fn(n, n, |r, c| {
                let local = if r == c { indicator_third(x[r]) * x[r] } else { 0.0 };
                Quaternion::real(local + h * 0.5 * x[r] * x[c] * x[c])
            });
            (t, rank_one_op(n)?.t, RANK_ONE_BOUND, "bound")
        }
        Which::Nonnormal => {
            let half_j = Quaternion::J * 0.5;
            let t = QMatrix::from_fn(n, n, |r, c| {
                let local = if r == c { Quaternion::real(indicator_third(x[r]) * x[r]) } else { Quaternion::ZERO };
                let weight = match c.cmp(&r) {
                    std::cmp::Ordering::Less => h,
                    std::cmp::Ordering::Equal => 0.5 * h,
                    std::cmp::Ordering::Greater => 0.0,
                };
                local + half_j * (weight * x[c])
            });
            (t, volterra_op(n)?.t, VOLTERRA_NORM, "exact")
        }
    };
    let factored = (&w + &k).matmul(&s);
    let t_norm = t.op_norm();
    let residual = (&t - &factored).op_norm();
    let ta = t.adjoint();
    let normality_defect = (&t.matmul(&ta) - &ta.matmul(&t)).op_norm() / (t_norm * t_norm);
    let wtw = w.adjoint().matmul(&w);
    let spec = spherical_spectrum(&s, SPECTRUM_TOL)?;
    let diagnostics = Diagnostics {
        residual_rel: residual / t_norm,
        residual,
        t_norm,
        k_norm: k.op_norm(),
        k_reference,
        k_reference_kind,
        delta: DELTA,
        normality_defect,
        w_partial_isometry_defect: (&wtw.matmul(&wtw) - &wtw).max_abs(),
        s_sphere_count: spec.len(),
        // a diagonal matrix is strongly irreducible only in size 1
        s_strongly_irreducible: n == 1,
        s_note: S_NOTE,
    };
    Ok(FactorizationExample { which, n, t, w, k, s, diagnostics })
}

/// One row of a norm-convergence sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub norm: f64,
    pub reference: f64,
    pub error: f64,
}

/// Grid sizes `a, 2a, 4a, …` up to `b`.
pub fn sweep_sizes(a: usize, b: usize) -> Result<Vec<usize>> {
    if a < 2 || b < a {
        return Err(Error::Validation(format!("sweep range {a}:{b} must satisfy 2 ≤ a ≤ b")));
    }
    let mut out = vec![];
    let mut n = a;
    while n <= b {
        out.push(n);
        n *= 2;
    }
    Ok(out)
}

/// `‖K‖` over the sizes for the compact part of the chosen example.
pub fn norm_sweep(which: Which, sizes: &[usize]) -> Result<Vec<SweepRow>> {
    sizes
        .iter()
        .map(|&n| {
            let (k, reference) = match which {
                Which::Normal => (rank_one_op(n)?, RANK_ONE_NORM),
                Which::Nonnormal => (volterra_op(n)?, VOLTERRA_NORM),
            };
            let norm = k.t.op_norm();
            Ok(SweepRow { n, norm, reference, error: (norm - reference).abs() })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("n,norm,reference,error\n");
    for r in rows {
        out.push_str(&format!("{},{:.15e},{:.15e},{:.6e}\n", r.n, r.norm, r.reference, r.error));
    }
    out
}
