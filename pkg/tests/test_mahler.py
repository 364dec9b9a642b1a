import math
from fractions import Fraction

import numpy as np
import pytest

from sublevel import AccuracyError, AlgebraicPoly, InvalidInputError
from sublevel.mahler import (CycloEvalPlan, coefficient_log_evaluator, farey_angles, is_outer,
                             log_mplus_phiN, mahler_jensen, mahler_quadrature,
                             mahler_quadrature_poly, mobius_table, phiN_growth,
                             phiN_log_evaluator, roots, totient_table, unit_crossings)
from sublevel.quadrature import integrate_log

LEHMER = AlgebraicPoly((1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1))
# log M+(1 - z) = -log M-(1 - z): scipy.quad oracle of log+(2 sin(t/2)) / (2 pi)
LOG_MPLUS_1MZ = 0.3230659472194502


def random_poly(rng, deg):
    return AlgebraicPoly(tuple(rng.uniform(-1, 1, deg + 1) + 1j * rng.uniform(-1, 1, deg + 1)))


# ------------------------------------------------------------------ roots

def test_roots_trivial():
    assert roots(AlgebraicPoly((-2, 1))).roots == pytest.approx([2])
    assert sorted(roots(AlgebraicPoly((-1, 0, 1))).roots.real) == pytest.approx([-1, 1])


def test_roots_of_phi3():
    r = roots(AlgebraicPoly((1, 1, 1)), tol=1e-13)
    assert np.allclose(np.abs(r.roots), 1, atol=1e-13)
    assert np.allclose(r.roots ** 3, 1, atol=1e-12)
    assert r.max_residual <= 1e-13


def test_roots_with_zero_and_multiple_roots():
    p = AlgebraicPoly((0, 0, 1, 3, 3, 1))  # z^2 (1 + z)^3
    r = roots(p)
    assert np.sum(r.roots == 0) == 2
    assert np.allclose(r.roots[r.roots != 0], -1, atol=1e-10)


def test_roots_certificate_random():
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = random_poly(rng, int(rng.integers(1, 13)))
        r = roots(p)
        assert len(r) == p.degree
        assert r.max_residual <= 1e-12
        # reconstruct the polynomial from its roots
        rebuilt = p.leading * np.poly(r.roots)[::-1]
        np.testing.assert_allclose(rebuilt, p.coefficients, atol=1e-9 * np.abs(p.coefficients).max())


def test_roots_reject_constant():
    with pytest.raises(InvalidInputError):
        roots(AlgebraicPoly((3,)))


# ------------------------------------------------------------------ quadrature

def test_quadrature_sine_log():
    q = integrate_log(lambda t: np.log(2 * np.abs(np.sin(t / 2))), [0.0], tol=1e-12)
    assert abs(q.mean_log) <= 1e-11
    assert q.mean_log_plus == pytest.approx(LOG_MPLUS_1MZ, abs=1e-11)
    assert q.mean_log_plus + q.mean_log_minus == pytest.approx(q.mean_log, abs=1e-14)


def test_quadrature_budget_error_carries_best():
    with pytest.raises(AccuracyError) as exc:
        integrate_log(lambda t: np.log(2 * np.abs(np.sin(t / 2))), [0.0], tol=1e-14, max_panels=10)
    assert exc.value.best is not None


def test_mahler_quadrature_constant():
    t = mahler_quadrature(lambda th: np.full(np.shape(th), math.log(2.0)), [], tol=1e-12)
    assert t.m == pytest.approx(2) and t.m_plus == pytest.approx(2) and t.m_minus == 1


def test_mahler_quadrature_one_minus_z():
    t = mahler_quadrature(lambda th: np.log(2 * np.abs(np.sin(th / 2))), [0.0], tol=1e-10)
    assert abs(math.log(t.m)) <= 1e-8
    j = mahler_jensen(AlgebraicPoly((1, -1)))
    assert j.m == pytest.approx(1, abs=1e-12)
    assert t.log_m_plus == pytest.approx(j.log_m_plus, abs=t.err + j.err + 1e-12)


def test_p2_routes_agree_with_sampling():
    p2 = AlgebraicPoly((1, 1, 1))
    j = mahler_jensen(p2)
    q = mahler_quadrature_poly(p2)
    assert j.m == pytest.approx(1, abs=1e-12) and q.m == pytest.approx(1, abs=1e-9)
    assert j.log_m_plus == pytest.approx(q.log_m_plus, abs=j.err + q.err)
    from sublevel.meanmeasure import mean_log_minus_p
    m, se = mean_log_minus_p(p2.on_circle(), 1, samples=1 << 20, seed=0, return_error=True)
    assert abs(m - j.log_m_plus) <= 3 * se


# ------------------------------------------------------------------ Jensen route

def test_jensen_simple():
    t = mahler_jensen(AlgebraicPoly((-2, 1)))
    assert t.m == pytest.approx(2, rel=1e-14)
    assert t.m_minus == pytest.approx(1)


def test_jensen_lehmer_regression():
    t = mahler_jensen(LEHMER)
    assert t.m == pytest.approx(1.17628081825991, rel=1e-12)
    tight = mahler_jensen(LEHMER, tol=1e-14, quad_tol=1e-13)
    assert tight.m == pytest.approx(t.m, rel=1e-13)


def test_triple_invariants_random():
    rng = np.random.default_rng(3)
    for _ in range(10):
        t = mahler_jensen(random_poly(rng, 6))
        assert t.m_plus >= 1 and t.m_minus <= 1
        assert abs(t.log_m - t.log_m_plus - t.log_m_minus) <= 2 * t.err + 1e-14


def test_route_agreement_random():
    rng = np.random.default_rng(4)
    for _ in range(10):
        p = random_poly(rng, int(rng.integers(1, 13)))
        j, q = mahler_jensen(p), mahler_quadrature_poly(p)
        tol = j.err + q.err
        assert abs(j.log_m - q.log_m) <= tol
        assert abs(j.log_m_plus - q.log_m_plus) <= tol
        assert abs(j.log_m_minus - q.log_m_minus) <= tol


def test_multiplicativity():
    rng = np.random.default_rng(5)
    p, q = random_poly(rng, 4), random_poly(rng, 5)
    a, b, c = mahler_jensen(p), mahler_jensen(q), mahler_jensen(p * q)
    assert c.log_m == pytest.approx(a.log_m + b.log_m, abs=a.err + b.err + c.err + 1e-12)


def test_unit_crossings_of_one_minus_z():
    # |1 - e^{it}| = 1 at t = pi/3 and 5 pi/3
    ang = np.sort(unit_crossings(AlgebraicPoly((1, -1))))
    assert ang == pytest.approx([math.pi / 3, 5 * math.pi / 3], abs=1e-12)


# ------------------------------------------------------------------ cyclotomic product

def test_mobius_and_totient():
    assert list(mobius_table(12)[1:]) == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]
    assert list(totient_table(10)[1:]) == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]


@pytest.mark.parametrize("N", [1, 2, 3, 6, 10, 30, 100])
def test_plan_degree_invariant(N):
    plan = CycloEvalPlan.build(N)
    assert plan.mobius[0] == 1 and set(plan.mobius) <= {-1, 0, 1}
    assert plan.degree() == sum(totient_table(N)[1:]) == len(farey_angles(N))


def test_plan_cap():
    with pytest.raises(InvalidInputError):
        CycloEvalPlan.build(201)
    with pytest.raises(InvalidInputError):
        CycloEvalPlan.build(0)


def test_expand_small_products():
    assert CycloEvalPlan.build(1).expand().coeffs == (-1, 1)
    assert CycloEvalPlan.build(2).expand().coeffs == (-1, 0, 1)
    # (z - 1)(z + 1)(z^2 + z + 1) = z^4 + z^3 - z - 1
    assert CycloEvalPlan.build(3).expand().coeffs == (-1, -1, 0, 1, 1)


def test_phiN_evaluator_points():
    assert phiN_log_evaluator(CycloEvalPlan.build(1))(math.pi) == pytest.approx(math.log(2))
    assert phiN_log_evaluator(CycloEvalPlan.build(2))(math.pi / 2) == pytest.approx(math.log(2))
    # float 2 pi / 3 misses the root by ~1e-16, so log|.| is large and negative
    assert phiN_log_evaluator(CycloEvalPlan.build(3))(2 * math.pi / 3) < -30


def test_phiN_evaluator_matches_expansion():
    plan = CycloEvalPlan.build(12)
    th = np.linspace(0.05, 6.2, 50)
    direct = coefficient_log_evaluator(plan.expand())(th)
    np.testing.assert_allclose(phiN_log_evaluator(plan)(th), direct, atol=1e-9)


@pytest.mark.parametrize("N", [1, 5, 12])
def test_phiN_jensen_measure_is_one(N):
    assert mahler_jensen(CycloEvalPlan.build(N).expand()).log_m == pytest.approx(0, abs=1e-10)


def test_farey():
    assert farey_angles(1) == [Fraction(0)]
    assert farey_angles(2) == [Fraction(0), Fraction(1, 2)]
    assert farey_angles(3) == [Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)]
    f = farey_angles(25)
    assert all(a < b for a, b in zip(f, f[1:]))
    assert all(x.denominator <= 25 for x in f)
    with pytest.raises(InvalidInputError):
        farey_angles(0)


def test_farey_angles_are_phiN_roots():
    plan = CycloEvalPlan.build(7)
    p = plan.expand()
    z = np.exp(2j * math.pi * np.array([float(x) for x in farey_angles(7)]))
    assert np.max(np.abs(p(z))) <= 1e-10


def test_log_mplus_phiN_small():
    r1 = log_mplus_phiN(1, samples=1 << 20)
    assert r1.log_mplus_quadrature == pytest.approx(LOG_MPLUS_1MZ, abs=1e-7)
    assert abs(r1.log_mplus_sampling - r1.log_mplus_quadrature) <= 3 * r1.sampling_std_error
    r2 = log_mplus_phiN(2, samples=1 << 20)
    # theta -> 2 theta maps |z - 1| onto |z^2 - 1| and preserves period means
    assert r2.log_mplus_quadrature == pytest.approx(r1.log_mplus_quadrature, abs=1e-7)


def test_growth_table_csv():
    t = phiN_growth([3, 6], samples=1 << 16)
    lines = t.to_csv().splitlines()
    assert lines[0] == "N,log_mplus_quadrature,log_mplus_sampling,err"
    assert len(lines) == 3
    assert t.rows[0].log_mplus_quadrature < t.rows[1].log_mplus_quadrature
    assert math.isfinite(t.exponent)


# ------------------------------------------------------------------ outer

def test_outer_examples():
    a = is_outer(AlgebraicPoly((-2, 1)))
    assert a and a.residual <= 1e-10
    b = is_outer(AlgebraicPoly((-0.5, 1)))
    assert not b and b.residual == pytest.approx(math.log(2), abs=1e-9)
    c = is_outer(AlgebraicPoly((1, 1, 1)))
    assert c and c.residual <= 1e-9
    d = is_outer(AlgebraicPoly((0, 1)))
    assert not d and "zero" in d.diagnostic
    assert is_outer(AlgebraicPoly((5,)))


def test_outer_iff_jensen_residual_vanishes():
    rng = np.random.default_rng(8)
    for _ in range(10):
        r = is_outer(random_poly(rng, 5))
        assert r.outer == (r.residual <= 1e-8)
