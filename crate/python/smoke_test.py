#!/usr/bin/env python3
"""Smoke test for the eraser_py extension module.

Builds nothing itself: run `cargo build -p eraser-py` (or --release) first.
The script locates the compiled cdylib, exposes it under the importable name
eraser_py, and exercises the main types and operations.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def import_extension():
    candidates = [
        REPO_ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("liberaser_py.so", "eraser_py.so", "liberaser_py.dylib")
    ]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        sys.exit("eraser_py cdylib not found; run `cargo build -p eraser-py` first")
    stage = Path(tempfile.mkdtemp(prefix="eraser_py_"))
    shutil.copy2(lib, stage / "eraser_py.so")
    sys.path.insert(0, str(stage))
    import eraser_py

    return eraser_py


def close(a, b, tol=1e-10):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    ep = import_extension()

    # Spot configuration: |c1|^2 = 0.5, mirrors, |r3|^2 = 0.1, |q| = 0.6.
    cfg = ep.ApparatusConfig(0.5, 1.0, 1.0, 0.1, 0.6)
    for route in ("evolved", "closed_form"):
        rep = cfg.triality("D1", route=route)
        close(rep.p, 0.8)
        close(rep.v, 0.36)
        close(rep.c, 0.48)
        close(rep.d, math.sqrt(0.8704))
        close(rep.p**2 + rep.v**2 + rep.c**2, 1.0)
        assert rep.route == route
    assert cfg.route_discrepancy("D1") <= 1e-10

    probs = cfg.detector_probabilities()
    close(probs["D1"], 0.5, 1e-12)
    close(sum(probs.values()), 1.0, 1e-12)

    rho = cfg.conditional_rho_gamma("D1")
    close(rho[0][0].real, 0.1, 1e-12)
    close(rho[1][1].real, 0.9, 1e-12)
    close(abs(rho[0][1]), 0.18, 1e-12)

    # Conventional erasure: full-visibility fringes behind D1.
    conv = ep.ApparatusConfig.conventional_eraser()
    rep = conv.triality("D1")
    close(rep.p, 0.0, 1e-12)
    close(rep.v, 1.0, 1e-12)
    close(rep.c, 0.0, 1e-12)
    v, offset = conv.fringe("D1")
    close(v, 1.0, 1e-12)
    close(offset, 0.0, 1e-12)
    v_mix, _ = conv.fringe()  # unconditioned ensemble is flat
    close(v_mix, 0.0, 1e-12)

    # Bell state has unit concurrence; product state has none.
    s = 1 / math.sqrt(2)
    bell = [[0.5, 0, 0, 0.5], [0, 0, 0, 0], [0, 0, 0, 0], [0.5, 0, 0, 0.5]]
    close(ep.concurrence_mixed(bell), 1.0, 1e-9)
    product = [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    close(ep.concurrence_mixed(product), 0.0, 1e-9)
    close(ep.herm_eigvals([[0.5, s * 0.5], [s * 0.5, 0.5]])[0], 0.5 + s * 0.5, 1e-12)

    # Scenario round trip and sweep endpoints.
    scn = ep.preset_scenario("fig4a")
    text = scn.serialize()
    assert ep.parse_scenario(text).serialize() == text
    rows = scn.sweep_rows("D1")
    assert len(rows) == 101
    q0, qmax = rows[0], rows[-1]
    close(q0[2], 0.0)  # V = 0 at q = 0
    close(qmax[3], 0.0)  # C = 0 at q = 1
    try:
        ep.parse_scenario("[source]\nc1_sq = 2\n")
    except ValueError as e:
        assert "outside [0, 1]" in str(e)
    else:
        raise AssertionError("invalid scenario text must raise ValueError")

    # Monte Carlo screen behind D1 reproduces the analytic visibility.
    run = ep.parse_scenario(text).screen("D1")
    close(run.analytic_v, 0.36, 1e-12)
    assert run.agrees_3sigma
    assert abs(run.estimated_v - 0.36) <= 3 * run.estimated_v_stderr
    assert len(run.positions) == 100_000
    assert sum(run.histogram) == 100_000

    print("eraser_py smoke test passed")


if __name__ == "__main__":
    main()
