import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sublevel import (AlgebraicPoly, InvalidInputError, NotNormalizableError, TrigPoly,
                      bandwidth, derivative, evaluate, height, normalize)

ONE_MINUS_CHI1 = TrigPoly.from_terms([(0, 1), (1, -1)])


def test_construction_merges_exact_duplicates_and_drops_zeros():
    f = TrigPoly.from_terms([(1.0, 2), (0.0, 1), (1.0, -2), (3.0, 0)])
    assert f.freqs == (0.0,)
    assert f.coeffs == (1 + 0j,)


def test_no_tolerance_merging():
    f = TrigPoly.from_terms([(1.0, 1), (1.0 + 1e-15, 1)])
    assert len(f) == 2


def test_direct_constructor_validates():
    with pytest.raises(InvalidInputError):
        TrigPoly((1.0, 0.0), (1, 1))
    with pytest.raises(InvalidInputError):
        TrigPoly((0.0,), (0,))


@pytest.mark.parametrize("f, x, expected", [
    (TrigPoly.from_terms([(0, 1)]), 17.3, 1 + 0j),
    (ONE_MINUS_CHI1, math.pi, 2 + 0j),
])
def test_evaluate_trivial(f, x, expected):
    assert evaluate(f, x) == pytest.approx(expected, abs=1e-15)


def test_evaluate_sine_identity():
    # |1 - e^{ix}| = 2 |sin(x/2)|
    val = evaluate(ONE_MINUS_CHI1, math.pi / 3)
    assert abs(val) == pytest.approx(1.0, abs=1e-15)
    assert val == pytest.approx(1 - cmath.exp(1j * math.pi / 3), abs=1e-15)


def test_evaluate_vectorised_shape():
    x = np.linspace(0, 1, 12).reshape(3, 4)
    assert evaluate(ONE_MINUS_CHI1, x).shape == (3, 4)


def test_zero_polynomial_rejected():
    z = TrigPoly.zero()
    for fn in (lambda: evaluate(z, 0.0), lambda: height(z), lambda: bandwidth(z)):
        with pytest.raises(InvalidInputError):
            fn()


def test_derivative_examples():
    d = derivative(ONE_MINUS_CHI1, 1)
    assert d.freqs == (1.0,) and d.coeffs[0] == pytest.approx(-1j)
    d2 = derivative(TrigPoly.from_terms([(2, 1)]), 2)
    assert d2.freqs == (2.0,) and d2.coeffs[0] == pytest.approx(-4)
    assert derivative(TrigPoly.from_terms([(0, 3)]), 1).is_zero
    with pytest.raises(InvalidInputError):
        derivative(ONE_MINUS_CHI1, 0)


def test_height_and_bandwidth():
    assert height(ONE_MINUS_CHI1) == 1
    assert height(TrigPoly.from_terms([(0, 0.5), (1, 2), (3, -1)])) == 2
    assert height(TrigPoly.from_coeffs([0.5, 1, 0.5])) == 1
    assert bandwidth(TrigPoly.from_terms([(0, 1)])) == 0
    assert bandwidth(ONE_MINUS_CHI1) == 1
    assert bandwidth(TrigPoly.from_terms([(-3, 1), (5, 1)])) == 8


def test_normalize_examples():
    h, mod, scale = normalize(ONE_MINUS_CHI1)
    assert h == ONE_MINUS_CHI1 and mod == 0 and scale == 1
    h, mod, scale = normalize(TrigPoly.from_terms([(2, 1), (4, 1)]))
    assert h.freqs == (0.0, 1.0) and mod == -2 and scale == 2
    h, mod, scale = normalize(TrigPoly.from_terms([(-1, 1), (1, 1)]))
    assert h.freqs == (0.0, 1.0) and mod == 1 and scale == 2
    with pytest.raises(NotNormalizableError):
        normalize(TrigPoly.from_terms([(3, 1)]))


terms = st.lists(
    st.tuples(st.floats(-4, 4, allow_nan=False),
              st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)),
    min_size=1, max_size=8)


def _poly(ts):
    f = TrigPoly.from_terms(ts)
    if f.is_zero or max(abs(a) for a in f.coeffs) < 1e-3:
        return None
    return f


@settings(max_examples=200, deadline=None)
@given(terms, st.floats(-20, 20))
def test_derivative_matches_central_difference(ts, x):
    f = _poly(ts)
    if f is None:
        return
    d = derivative(f, 1)
    h = 1e-5
    fd = (evaluate(f, x + h) - evaluate(f, x - h)) / (2 * h)
    exact = 0j if d.is_zero else evaluate(d, x)
    # O(h^2 |f'''|) truncation plus O(eps/h) cancellation
    scale = max(abs(exact), f.l1_norm() * 1e-3)
    assert abs(fd - exact) <= 1e-6 * scale + 1e-9 * f.l1_norm()


@settings(max_examples=200, deadline=None)
@given(terms)
def test_normalize_invariants(ts):
    f = _poly(ts)
    if f is None or len(f) < 2:
        return
    assume(min(np.diff(f.freqs)) > 1e-9)
    h, mod, scale = normalize(f)
    assert height(h) == height(f)
    assert bandwidth(h) == pytest.approx(1.0, rel=1e-12)
    assert min(h.freqs) == 0.0
    x = np.linspace(-7, 7, 41)
    np.testing.assert_allclose(np.abs(evaluate(h, x * scale)), np.abs(evaluate(f, x)),
                               rtol=1e-9, atol=1e-9 * f.l1_norm())


def test_evaluate_bounded_by_l1_norm():
    rng = np.random.default_rng(0)
    f = TrigPoly.from_terms(zip(rng.uniform(-3, 3, 6), rng.normal(size=6) + 1j * rng.normal(size=6)))
    assert np.all(np.abs(evaluate(f, rng.uniform(-100, 100, 1000))) <= f.l1_norm() + 1e-12)


def test_json_round_trip():
    f = TrigPoly.from_terms([(-0.5, 1 + 2j), (3.25, -1)])
    g = TrigPoly.from_json(f.to_json())
    assert g == f
    d = f.to_dict()
    assert [t["omega"] for t in d["terms"]] == [-0.5, 3.25]
    with pytest.raises(InvalidInputError):
        TrigPoly.from_dict({"terms": [{"re": 1}]})


def test_algebraic_poly():
    p = AlgebraicPoly((1, 2, 0, 0))
    assert p.degree == 1 and p.leading == 2
    assert p(1.5) == pytest.approx(4.0)
    assert (p * AlgebraicPoly((0, 1))).coeffs == (0j, 1 + 0j, 2 + 0j)
    assert p.on_circle() == TrigPoly.from_coeffs([1, 2])
    with pytest.raises(InvalidInputError):
        AlgebraicPoly((0, 0))
