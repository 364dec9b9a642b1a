"""Example families P_n, Q_n and randomized probes of the open conjectures.

The probes never assert a conjecture; they report what they measured.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from .errors import AccuracyError, ConvergenceError, InvalidInputError
from .mahler import mahler_jensen, mahler_quadrature_poly, roots
from .meanmeasure import estimate_J, theorem1_bound
from .sampling import default_threads
from .trigpoly import AlgebraicPoly, TrigPoly, height


def _check_n(n, least=1):
    if int(n) != n or n < least:
        raise InvalidInputError(f"n must be an integer >= {least}")
    return int(n)


def pn(n: int) -> AlgebraicPoly:
    """1 + z + ... + z^n."""
    n = _check_n(n)
    return AlgebraicPoly((1.0,) * (n + 1))


def qn(n: int) -> AlgebraicPoly:
    """(1 + z)^n / binom(n, floor(n/2)); its height is exactly 1."""
    n = _check_n(n)
    mid = comb(n, n // 2)
    return AlgebraicPoly(tuple(comb(n, k) / mid for k in range(n + 1)))


def jqn_closed(n: int, u: float) -> float:
    """Exact J of q_n = Q_n(e^{ix}).

    |q_n| = |2 cos(x/2)|^n / binom(n, n//2), which gives
    (2/pi) arcsin(min(1, binom^(1/n) u^(1/n) / 2)).
    """
    n = _check_n(n)
    if not u > 0:
        raise InvalidInputError("u must be positive")
    arg = 0.5 * comb(n, n // 2) ** (1.0 / n) * u ** (1.0 / n)
    return 2.0 / math.pi * math.asin(min(1.0, arg))


def jpn_bound(n: int, u: float) -> float:
    """Upper bound (2/pi) arcsin(min(1, u)) for J of p_n."""
    _check_n(n)
    if not u > 0:
        raise InvalidInputError("u must be positive")
    return 2.0 / math.pi * math.asin(min(1.0, u))


def log_mminus_qn_closed(n: int) -> float:
    """log M-(Q_n) from the closed-form J curve.

    -log M- = int_0^1 J(u)/u du = (2n/pi) int_0^c arcsin(s)/s ds with
    c = binom(n, n//2)^(1/n) / 2 < 1.
    """
    from scipy.integrate import quad

    n = _check_n(n)
    c = 0.5 * comb(n, n // 2) ** (1.0 / n)
    val, _ = quad(lambda s: math.asin(s) / s if s > 0 else 1.0, 0.0, min(c, 1.0),
                  epsabs=1e-14, epsrel=1e-13)
    return -2.0 * n / math.pi * val


def root_angles(p: AlgebraicPoly) -> np.ndarray:
    """Arguments of the roots divided by 2 pi, in [0, 1), ascending."""
    z = roots(p).roots
    a = np.mod(np.angle(z) / (2 * math.pi), 1.0)
    a[a >= 1.0] = 0.0
    return np.sort(a)


def star_discrepancy(angles: Sequence[float]) -> float:
    """sup_t |#{x_i < t}/n - t| by the sorted-points formula."""
    x = np.sort(np.asarray(angles, dtype=float).ravel())
    if x.size == 0:
        raise InvalidInputError("need at least one point")
    if np.any(x < 0) or np.any(x >= 1) or not np.all(np.isfinite(x)):
        raise InvalidInputError("points must lie in [0, 1)")
    n = x.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - x), np.max(x - (i - 1) / n)))


# ---------------------------------------------------------------- M- chain probe

@dataclass(frozen=True)
class SamplingLaw:
    """Random (n+1)-term height-1 polynomials.

    ``exponents="sparse"``: 0 = e_0 < ... < e_n <= 2n, chosen uniformly;
    ``"dense"``: exactly 0..n.  Moduli are uniform on (0, 1] and rescaled so
    the largest is 1; phases are uniform (or signs, for ``real=True``).
    """

    exponents: str = "sparse"
    real: bool = False

    def draw(self, n: int, rng: np.random.Generator) -> AlgebraicPoly:
        if self.exponents == "dense":
            ex = np.arange(n + 1)
        elif self.exponents == "sparse":
            ex = np.concatenate([[0], np.sort(rng.choice(np.arange(1, 2 * n + 1), n, replace=False))])
        else:
            raise InvalidInputError(f"unknown exponent law {self.exponents!r}")
        mod = 1.0 - rng.random(n + 1)  # (0, 1]
        mod /= mod.max()
        if self.real:
            ph = np.where(rng.random(n + 1) < 0.5, -1.0, 1.0)
        else:
            ph = np.exp(2j * math.pi * rng.random(n + 1))
        c = np.zeros(ex[-1] + 1, dtype=complex)
        c[ex] = mod * ph
        return AlgebraicPoly(tuple(c))


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-keyed generator for trial ``index`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed) & (2**64 - 1),
                                                        spawn_key=(int(index),)))


@dataclass
class ConjectureReport:
    n: int
    trials: int
    seed: int
    law: dict
    lower: float  # log M-(Q_n)
    upper: float  # log M-(P_n)
    endpoint_checks: dict
    violations: list = field(default_factory=list)
    unconfirmed: int = 0
    failures: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), default=_jsonable)


def _jsonable(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o).__name__)


def _chain_status(x, lo, hi, slack):
    if x < lo - slack:
        return "below"
    if x > hi + slack:
        return "above"
    return "ok"


def conj3_trial(n: int, trials: int, seed: int = 0, tol: float = 1e-10,
                law: SamplingLaw | None = None, threads: int | None = None) -> ConjectureReport:
    """Probe M-(Q_n) <= M-(R) <= M-(P_n) on random height-1 polynomials R.

    log M-(R) comes from the Jensen route.  A candidate outside the chain by
    more than its error estimate is re-verified with both routes at
    ``tol / 100``; only candidates still outside under both appear in
    ``violations``.  Root-finding failures are recorded, not raised.
    """
    n = _check_n(n, 2)
    if int(trials) != trials or trials < 0:
        raise InvalidInputError("trials must be a nonnegative integer")
    law = law or SamplingLaw()
    tp = mahler_jensen(pn(n), tol=1e-12, quad_tol=tol)
    tq = mahler_jensen(qn(n), tol=1e-12, quad_tol=tol)
    upper, lower = tp.log_m_minus, tq.log_m_minus
    slack_ends = tp.err + tq.err
    ends = {
        "P_n": {"log_m_minus": upper, "status": _chain_status(upper, lower, upper, slack_ends),
                "equality_end": "upper"},
        "Q_n": {"log_m_minus": lower, "status": _chain_status(lower, lower, upper, slack_ends),
                "equality_end": "lower"},
    }
    rep = ConjectureReport(n, int(trials), int(seed), asdict(law), lower, upper, ends)

    def one(i):
        R = law.draw(n, trial_rng(seed, i))
        try:
            t = mahler_jensen(R, tol=1e-12, quad_tol=tol)
        except (ConvergenceError, AccuracyError) as exc:
            return i, R, None, str(exc)
        return i, R, t, None

    nthreads = default_threads() if threads is None else max(1, int(threads))
    if nthreads > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            results = list(pool.map(one, range(trials)))
    else:
        results = [one(i) for i in range(trials)]

    vals = []
    for i, R, t, msg in results:
        if t is None:
            rep.failures.append({"trial": i, "coeffs": list(R.coeffs), "error": msg})
            continue
        x = t.log_m_minus
        vals.append(x)
        status = _chain_status(x, lower, upper, t.err + slack_ends)
        if status == "ok":
            continue
        rec = _reverify(R, n, tol / 100, lower, upper)
        rec.update({"trial": i, "coeffs": list(R.coeffs), "log_m_minus": x, "side": status})
        if rec["confirmed"]:
            rep.violations.append(rec)
        else:
            rep.unconfirmed += 1
    if vals:
        v = np.array(vals)
        rep.summary = {"min": float(v.min()), "median": float(np.median(v)), "max": float(v.max()),
                       "count": int(v.size)}
    return rep


def _reverify(R, n, tol, lower, upper):
    out = {"reverify_tol": tol}
    try:
        j = mahler_jensen(R, tol=1e-13, quad_tol=tol)
        q = mahler_quadrature_poly(R, tol=tol)
    except (ConvergenceError, AccuracyError) as exc:
        out.update({"confirmed": False, "reverify_error": str(exc)})
        return out
    sj = _chain_status(j.log_m_minus, lower, upper, j.err)
    sq = _chain_status(q.log_m_minus, lower, upper, q.err)
    out.update({"jensen": j.log_m_minus, "quadrature": q.log_m_minus,
                "confirmed": sj != "ok" and sj == sq})
    return out


# ---------------------------------------------------------------- best-constant probe

@dataclass(frozen=True)
class BestConstantProbe:
    n: int
    value: float  # sup of J H^(1/n) u^(-1/n) over sampled polynomials and u
    std_error: float  # of the maximising estimate, scaled like the value
    argmax_u: float
    c_n: float
    qn_family: float  # same ratio for q_n from the closed form
    trials: int
    seed: int


def best_constant_probe(n: int, trials: int, u_grid: Sequence[float], seed: int = 0,
                        samples: int = 1 << 16, law: SamplingLaw | None = None) -> BestConstantProbe:
    """Empirical lower bound for the best constant in J_f(u) <= C H^(-1/n) u^(1/n).

    Polynomials are (n+1)-term with exponents 0..n by default; each J is
    sampled over one exact period.
    """
    n = _check_n(n)
    if int(trials) != trials or trials < 1:
        raise InvalidInputError("trials must be a positive integer")
    u = np.sort(np.asarray(u_grid, dtype=float).ravel())
    if u.size == 0 or np.any(u <= 0):
        raise InvalidInputError("u_grid must be nonempty and positive")
    u = np.unique(u)
    law = law or SamplingLaw(exponents="dense")
    best = (-1.0, 0.0, float(u[0]))
    for i in range(int(trials)):
        R = law.draw(n, trial_rng(seed, i))
        f = R.on_circle()
        H = height(f)
        curve = estimate_J(f, u, samples=samples, seed=int(seed) + i)
        scale = H ** (1.0 / n) * u ** (-1.0 / n)
        r = curve.estimates * scale
        k = int(np.argmax(r))
        if r[k] > best[0]:
            best = (float(r[k]), float(curve.std_errors[k] * scale[k]), float(u[k]))
    qfam = max(jqn_closed(n, x) * x ** (-1.0 / n) for x in u)
    return BestConstantProbe(n, best[0], best[1], best[2], theorem1_bound(n, 1.0, 1.0), qfam,
                             int(trials), int(seed))
