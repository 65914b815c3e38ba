"""Acceptance criteria 1-9. Each test prints one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` or ``python3 tests/test_acceptance.py``.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from entobs import verify
from entobs.evolution import conjugation_defects, unitary_defects
from entobs.linalg import eigh_batch, exp_unitary
from entobs.report import build_report

RESULTS = {}


def announce(number, title, passed, detail):
    line = f"ACCEPTANCE {number} {'PASS' if passed else 'FAIL'}: {title} ({detail})"
    RESULTS[number] = line
    print("\n" + line, flush=True)
    return passed


def worst(reports):
    return max(r.max_abs_error for r in reports)


def test_1_closed_forms():
    t0 = time.perf_counter()
    reports = verify.closed_forms(trials=1000)
    dt = time.perf_counter() - t0
    ok = all(r.passed for r in reports) and sum(r.trials for r in reports if "corrected" in r.claim) == 6000
    ok = announce(1, "closed forms equal the oracle", ok and dt < 5.0,
                  f"max error {worst(reports):.2e} <= 1e-12, {dt:.2f} s < 5 s")
    assert ok


def test_2_observable_relations():
    reports = verify.observable_relations(trials=1000)
    ok = announce(2, "observable relations equal the oracle", all(r.passed for r in reports),
                  f"max error {worst(reports):.2e} <= 1e-12")
    assert ok


def test_3_form_invariance():
    t0 = time.perf_counter()
    reports = verify.invariance(trials=100, tol=1e-10)
    dt = time.perf_counter() - t0
    ok = announce(3, "family form and relation survive evolution", all(r.passed for r in reports) and dt < 30,
                  f"{len(reports)} pairings, max error {worst(reports):.2e} <= 1e-10, {dt:.2f} s < 30 s")
    assert ok


def test_4_conservation():
    reports = verify.conservation(trials=100, tol=1e-10)
    ok = announce(4, "conservation and breaking witness", all(r.passed for r in reports),
                  "; ".join(f"{r.claim}: {r.notes or f'{r.max_abs_error:.2e}'}" for r in reports))
    assert ok


def test_5_figure_surfaces():
    t0 = time.perf_counter()
    reports = [r for r in verify.figures(101, 101) if r.claim.startswith("fig.")]
    dt = time.perf_counter() - t0
    captions = [r for r in reports if "caption" in r.claim]
    pointwise = [r for r in reports if "oracle" in r.claim]
    ok = all(r.passed for r in reports) and dt < 60
    ok = announce(5, "figure surfaces", ok,
                  f"caption max {worst(captions):.2e} <= 1e-6, pointwise max {worst(pointwise):.2e} <= 1e-10, "
                  f"{dt:.2f} s < 60 s; " + ", ".join(c.claim.split(" caption N, ")[0] + ": "
                                                    + c.claim.split(" caption N, ")[1] for c in captions))
    assert ok


def test_6_entanglement_generation():
    reports = verify.entanglement_generation(theta=np.pi / 4)
    ok = announce(6, "separable mixtures become entangled", all(r.passed for r in reports),
                  "; ".join(r.notes for r in reports[:1]) + f"; {len(reports)} pairings")
    assert ok


def test_7_kernel_properties():
    rng = np.random.default_rng(20240607)
    a = rng.normal(size=(10_000, 4, 4)) + 1j * rng.normal(size=(10_000, 4, 4))
    h = 0.5 * (a + np.conj(np.swapaxes(a, 1, 2)))
    w, v = eigh_batch(h)
    resid = float(np.max(np.abs(h @ v - v * w[:, None, :])))
    times = np.linspace(0.0, 10.0, 20)
    unit = max(unitary_defects(h[k], times) for k in range(50))
    u_single = max(float(np.max(np.abs(exp_unitary(h[k], 2.5).conj().T @ exp_unitary(h[k], 2.5) - np.eye(4))))
                   for k in range(50))
    drift = 0.0
    for k in range(50):
        b = a[k] @ a[k].conj().T
        d = conjugation_defects(b / np.trace(b).real, h[k], times)
        drift = max(drift, d["hermiticity"], d["trace"], d["spectrum"])
    ok = announce(7, "kernel properties", max(resid, unit, u_single, drift) <= 1e-12,
                  f"eigen residual {resid:.2e}, unitarity {max(unit, u_single):.2e}, evolution drift {drift:.2e}")
    assert ok


def test_8_discrepancy_report():
    expected = {"closed_form_families_3_6", "observable_half_placement", "n_psi_missing_square",
                "mixed_6_non_hermitian", "v_symbol_reuse"}
    runs = [build_report(seed=20240607) for _ in range(2)]
    flags = [{s.category for s in summary if s.flagged} for _, summary in runs]
    devs = [[s.max_deviation for s in summary] for _, summary in runs]
    stable = all(a == b or (np.isnan(a) and np.isnan(b)) for a, b in zip(*devs))
    ok = announce(8, "discrepancy report", flags[0] == flags[1] == expected and stable,
                  f"{len(flags[0])} flagged, max deviations stable across runs: {stable}")
    assert ok


def test_9_cli_determinism(tmp_path):
    cli = [sys.executable, "-m", "entobs.cli"]
    outs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        subprocess.run(cli + ["surface", "--figure", "1", "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    verify_run = subprocess.run(cli + ["verify", "--suite", "all"], capture_output=True, text=True)
    identical = outs[0] == outs[1]
    ok = announce(9, "CLI determinism", identical and verify_run.returncode == 0,
                  f"surface byte-identical: {identical}, verify --suite all exit {verify_run.returncode}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
