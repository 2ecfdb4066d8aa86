"""Smoke test for the quatcalc_py extension module.

Build and run:

    cargo build --release -p quatcalc-python --features extension-module
    cp target/release/libquatcalc_py.so python/quatcalc_py.so
    python3 python/smoke_test.py
"""

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import quatcalc_py as qc  # noqa: E402


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


def main():
    i, j = qc.Quaternion(0, 1), qc.Quaternion(0, 0, 1)
    assert i * j == qc.Quaternion(0, 0, 0, 1)
    assert j * i == -qc.Quaternion(0, 0, 0, 1)
    assert close(abs(qc.Quaternion(1, 2, 2, 4)), 5.0)

    t = qc.QMatrix([[[0, 1, 0, 0], 0], [0, 3]])
    assert t.shape == (2, 2)
    spheres = qc.spectrum(t)
    assert [(s["re"], s["mult"]) for s in spheres] == [(0.0, 1), (3.0, 1)]
    assert close(spheres[0]["rad"], 1.0)

    r = qc.riesz(t, [(0.0, 1.0)], [(3.0, 0.0)])
    assert r["passed"], r["residuals"]
    p = r["sigma"]["projection"]
    assert (p - qc.QMatrix.diag([1, 0])).max_abs() < 1e-10

    w0, a, rank = qc.polar(t)
    assert rank == 2 and (w0 @ a - t).max_abs() < 1e-10

    a, b, jm = qc.cartesian(t)
    half_jb = qc.QMatrix.diag([0.5, 0.5]) @ jm @ b
    assert (a + half_jb - t).max_abs() < 1e-9

    ex = qc.factorization_example("nonnormal", 96)
    assert ex["diagnostics"]["residual_rel"] <= 1e-12
    assert ((ex["w"] + ex["k"]) @ ex["s"] - ex["t"]).op_norm() <= 1e-12 * ex["t"].op_norm()

    rep = qc.irreducibility_report(qc.QMatrix([[0, 1], [0, 0]]), oracle=True)
    assert rep["strongly_irreducible"] is True and rep["oracle_agrees"] is True

    v = qc.verify_suite(only=["riesz", "polar"], trials=3)
    assert v["passed"], v

    try:
        qc.spectrum(qc.QMatrix([[1, 2]]))
    except qc.QuatcalcError as e:
        assert "square" in str(e)
    else:
        raise AssertionError("non-square input accepted")

    assert math.isfinite(qc.QMatrix.identity(3).op_norm())
    print("smoke test passed")


if __name__ == "__main__":
    main()
