//! Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
//!
//! Tolerances are the suite defaults pinned in `quatcalc::verify::TOLERANCES`;
//! this target restates them so a change there shows up here.

use quatcalc::verify::{run_all, VerifyConfig, TOLERANCES};

const PINNED: &[(&str, f64)] = &[
    ("volterra_window", 5e-3),
    ("volterra_rate", 2.0),
    ("volterra_runtime", 60.0),
    ("rank_one_rate", 2.0),
    ("rank_one_bound", 1.0 / 3.0),
    ("factorization", 1e-12),
    ("delta", 0.5),
    ("normality", 1e-10),
    ("nonnormality", 1e-3),
    ("riesz_oracle", 1e-8),
    ("riesz_steps", 1e-10),
    ("riesz_spectrum", 1e-8),
    ("resolvent_identity", 1e-12),
    ("resolvent_equation", 1e-10),
    ("cartesian", 1e-9),
    ("cartesian_invariants", 1e-10),
    ("polar", 1e-10),
    ("extension_norm", 1e-12),
    ("extension_roundtrip", 1e-12),
    ("slice", 1e-8),
];

#[test]
fn acceptance() {
    assert_eq!(TOLERANCES.len(), PINNED.len());
    for (&(name, value, _), &(pinned, expect)) in TOLERANCES.iter().zip(PINNED) {
        assert_eq!((name, value), (pinned, expect), "tolerance {name} drifted");
    }

    let cfg = VerifyConfig::default();
    let results = run_all(&cfg);
    println!();
    for c in &results {
        println!("{}", c.summary());
    }
    let passed = results.iter().filter(|c| c.passed()).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    let failed: Vec<&str> = results.iter().filter(|c| !c.passed()).map(|c| c.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
