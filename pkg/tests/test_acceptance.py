"""Acceptance suite: one test per criterion, run at the stated tolerances.

Criterion 1 and the Q_n half of criterion 10 are expected to fail; the
targets they check are not attained by the definitions implemented here.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from sublevel import AlgebraicPoly, TrigPoly, height
from sublevel.cli import run
from sublevel.cnseq import cn
from sublevel.experiments import (SamplingLaw, best_constant_probe, conj3_trial, jqn_closed, pn,
                                  qn, trial_rng)
from sublevel.mahler import (CycloEvalPlan, farey_angles, log_mplus_phiN, mahler_jensen,
                             mahler_quadrature, mahler_quadrature_poly, phiN_growth,
                             phiN_log_evaluator)
from sublevel.meanmeasure import (corollary1_bound, estimate_J, estimate_K, lemma2_trial,
                                  mean_log_minus_p, theorem1_bound)


def random_family(n, count, seed):
    """(n+1)-term polynomials, frequencies 0..n, random overall scale."""
    out = []
    for i in range(count):
        rng = trial_rng(seed, i)
        p = SamplingLaw(exponents="dense").draw(n, rng)
        out.append(p.on_circle().scale(10 ** rng.uniform(-1, 1)))
    return out


FAMILY = [(n, f) for n in (2, 3) for f in random_family(n, 100, seed=500 + n)]


def test_criterion_01_cn_limit_reproduction():
    t0 = time.perf_counter()
    res = subprocess.run([sys.executable, "-m", "sublevel", "cn", "--n-max", "200000000"],
                         capture_output=True, text=True, timeout=300, check=False)
    elapsed = time.perf_counter() - t0
    assert res.returncode == 0, res.stderr
    last = [ln for ln in res.stdout.splitlines() if not ln.startswith("#")][-1]
    n, _, ratio = last.split(",")
    assert int(n) == 200_000_000 and elapsed < 300
    assert abs(float(ratio) - 0.900316322) <= 1e-8, f"n^-1 C_n = {float(ratio):.10f}"


def test_criterion_02_base_constants():
    assert math.exp(cn(1)) == 0.5
    c2 = 2.0 * (0.5 * 3 * math.sqrt(2) / math.pi) ** 0.5  # one step from C_1
    assert math.exp(cn(2)) == pytest.approx(c2, rel=1e-12)


def test_criterion_03_two_term_closed_form():
    f = TrigPoly.from_terms([(0, 1), (1, -1)])
    u = [0.25, 0.5, 1.0, 1.9]
    c = estimate_J(f, u, samples=10**7, seed=3)
    for ui, est, se in zip(u, c.estimates, c.std_errors):
        assert abs(est - 2 / math.pi * math.asin(ui / 2)) <= 3 * se


@pytest.mark.parametrize("n", [2, 4, 6])
def test_criterion_04_qn_closed_form(n):
    u = np.logspace(-3, 0, 10)
    c = estimate_J(qn(n).on_circle(), u, samples=10**6, seed=n)
    for ui, est, se in zip(u, c.estimates, c.std_errors):
        assert abs(est - jqn_closed(n, ui)) <= 3 * se + 1e-12


def test_criterion_05_theorem_bound():
    violations = []
    for k, (n, f) in enumerate(FAMILY):
        H = height(f)
        u = H * np.logspace(-4, 0.5, 12)
        c = estimate_J(f, u, samples=1 << 16, seed=k)
        bound = theorem1_bound(n, H, u)
        bad = c.estimates > bound + 3 * c.std_errors
        violations += [(k, float(x)) for x in u[bad]]
    assert violations == []


def test_criterion_06_j_below_k():
    violations = []
    for k, (n, f) in enumerate(FAMILY[::10]):
        for u in (0.05, 0.2, 0.5):
            j = estimate_J(f, [u], samples=1 << 16, seed=k)
            kk = estimate_K(f, u, samples=1 << 16, seed=k, return_details=True)
            if j.estimates[0] > kk.value + 3 * math.hypot(j.std_errors[0], kk.xi_std_error):
                violations.append((k, u))
    assert len(FAMILY[::10]) == 20 and violations == []


def test_criterion_07_interval_lemma():
    rep = lemma2_trial(42, 10_000)
    assert rep.trials == 10_000 and rep.violations == 0


def test_criterion_08_mahler_cross_route():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        d = int(rng.integers(1, 13))
        p = tuple(rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1))
        P = AlgebraicPoly(p)
        j, q = mahler_jensen(P), mahler_quadrature_poly(P)
        assert abs(j.log_m - q.log_m) <= j.err + q.err
    for N in range(1, 31):
        plan = CycloEvalPlan.build(N)
        sing = [2 * math.pi * float(x) for x in farey_angles(N)]
        t = mahler_quadrature(phiN_log_evaluator(plan), sing, tol=1e-9)
        assert abs(t.m - 1.0) <= 1e-6, N


def test_criterion_09_phiN_growth():
    for N in range(1, 21):
        r = log_mplus_phiN(N, seed=N)
        assert abs(r.log_mplus_quadrature - r.log_mplus_sampling) <= 1e-3, N
    table = phiN_growth([5, 10, 20, 40, 80])
    vals = [r.log_mplus_quadrature for r in table.rows]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert math.isfinite(table.exponent)  # reported, not judged


def test_criterion_10_pn_qn_mahler_inequalities():
    p_fail = [n for n in range(2, 13) if not mahler_jensen(pn(n)).log_m_minus > -1]
    q_vals = {n: mahler_jensen(qn(n)).log_m_minus for n in range(2, 13)}
    q_fail = {n: round(v, 4) for n, v in q_vals.items() if not v < -2 * n / math.pi}
    assert p_fail == [], f"P_n fails at {p_fail}"
    assert q_fail == {}, f"log M-(q_n) not below -2n/pi at {q_fail}"


def test_criterion_11_log_minus_moments():
    violations = []
    for k, (n, f) in enumerate(FAMILY):
        for p in (1, 2):
            m, se = mean_log_minus_p(f, p, samples=1 << 16, seed=k, return_error=True)
            if m > corollary1_bound(n, height(f), p) + 3 * se:
                violations.append((k, p))
    assert violations == []


DETERMINISM_CASES = [
    ["jf", "--coeffs", "1,0.5j,-0.7", "--u", "0.01:2:8", "--samples", "600000"],
    ["kf", "--coeffs", "1,-0.4,0.3j", "--u", "0.1,0.4", "--samples", "300000"],
    ["xi", "--coeffs", "1,-1", "--u", "0.5", "--v", "0.3", "--samples", "300000"],
    ["mahler", "--coeffs", "1,1,0,-1,-1,-1,-1,-1,0,1,1"],
    ["cn", "--n-max", "100000"],
    ["phin-growth", "--N-list", "3,7", "--samples", "600000"],
    ["conj3", "--n", "3", "--trials", "30"],
    ["best-constant", "--n", "2", "--trials", "5", "--samples", "300000"],
    ["lemma2", "--trials", "200"],
    ["examples", "--n-list", "2,5"],
]


@pytest.mark.parametrize("argv", DETERMINISM_CASES, ids=lambda a: a[0])
def test_criterion_12_determinism(capsys, argv):
    outs = []
    for threads in ("1", "4", "1"):
        assert run(argv + ["--seed", "17", "--threads", threads]) == 0
        outs.append([ln for ln in capsys.readouterr().out.splitlines() if not ln.startswith("#")])
    assert outs[0] == outs[1] == outs[2]


def test_criterion_13_conjecture_probes():
    rep = conj3_trial(4, 1000, seed=7)
    assert rep.endpoint_checks["P_n"]["log_m_minus"] == rep.upper
    assert rep.endpoint_checks["Q_n"]["log_m_minus"] == rep.lower
    assert {e["status"] for e in rep.endpoint_checks.values()} == {"ok"}
    assert rep.summary["count"] + len(rep.failures) == 1000
    for v in rep.violations:
        assert v["confirmed"] and v["reverify_tol"] == pytest.approx(1e-12)
    probe = best_constant_probe(2, 200, np.logspace(-3, 0.5, 15), seed=0)
    assert probe.trials == 200 and math.isfinite(probe.value)
