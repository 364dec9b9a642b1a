"""Sampling estimators for sublevel mean measures.

J_f(u) is the mean measure of {x : |f(x)| < u}.  Xi restricts that set
further by bounds on the derivatives of chi_omega * f, and K_f is the
grid-restricted infimum of ``A b(f) k u^(1/k) / v + Xi(v)`` with
A = 3 sqrt(2) / pi, which bounds J_f from above.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import cnseq
from .errors import InvalidInputError
from .sampling import Domain, map_blocks, sampling_domain
from .trigpoly import TrigPoly, bandwidth, derivative, height

K_CONSTANT = 3.0 * math.sqrt(2.0) / math.pi
DEFAULT_V_GRID = tuple(np.logspace(-3, 3, 61))
MIN_SAMPLES = 1000


def _check_poly(f):
    if not isinstance(f, TrigPoly) or f.is_zero:
        raise InvalidInputError("a nonzero TrigPoly is required")


def _check_samples(samples):
    if int(samples) != samples or samples < MIN_SAMPLES:
        raise InvalidInputError(f"samples must be an integer >= {MIN_SAMPLES}")
    return int(samples)


def _phase_matrix(f: TrigPoly, x: np.ndarray) -> np.ndarray:
    return np.exp(1j * np.multiply.outer(x, f.frequencies))


def _binomial_se(p, n):
    p = np.asarray(p, dtype=float)
    return np.sqrt(p * (1 - p) / n)


@dataclass(frozen=True)
class SublevelCurve:
    thresholds: np.ndarray
    estimates: np.ndarray
    std_errors: np.ndarray
    window: float
    samples: int
    seed: int
    exact_period: bool = False

    def __post_init__(self):
        if not (len(self.thresholds) == len(self.estimates) == len(self.std_errors)):
            raise InvalidInputError("curve arrays must share one length")

    def __call__(self, u: float) -> float:
        """Estimate at a threshold that is on the grid."""
        idx = np.flatnonzero(self.thresholds == u)
        if idx.size == 0:
            raise KeyError(u)
        return float(self.estimates[idx[0]])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["u", "j_estimate", "std_error"])
        for u, j, s in zip(self.thresholds, self.estimates, self.std_errors):
            w.writerow([repr(float(u)), repr(float(j)), repr(float(s))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "samples": self.samples,
            "seed": self.seed,
            "exact_period": self.exact_period,
            "u": [float(u) for u in self.thresholds],
            "j_estimate": [float(j) for j in self.estimates],
            "std_error": [float(s) for s in self.std_errors],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class XiEstimate:
    value: float
    std_error: float
    omega: float
    k: int
    u: float
    v: float


def estimate_J(f: TrigPoly, thresholds: Sequence[float], window: float | None = None,
               samples: int = 10**6, seed: int = 0, threads: int | None = None) -> SublevelCurve:
    """Stratified estimate of J_f on a grid of thresholds.

    All thresholds are evaluated on one common point set, so the estimates
    are exactly nondecreasing.  ``window=None`` samples one exact period of
    |f| when the frequencies are commensurable and [-L, L] with
    L = 1000 * 2 pi / b(f) otherwise.
    """
    _check_poly(f)
    samples = _check_samples(samples)
    u = np.asarray(thresholds, dtype=float).ravel()
    if u.size == 0 or np.any(u <= 0) or np.any(np.diff(u) <= 0):
        raise InvalidInputError("thresholds must be positive and strictly ascending")
    dom = sampling_domain(f, window)
    sure = u >= f.l1_norm()
    est = np.ones(u.size)
    if not sure.all():
        live = u[~sure]
        coeffs = f.coefficients

        def count(x):
            mod = np.sort(np.abs(_phase_matrix(f, x) @ coeffs))
            return np.searchsorted(mod, live, side="left")

        counts = sum(map_blocks(count, dom, samples, seed, threads))
        est[~sure] = counts / samples
    return SublevelCurve(u, est, _binomial_se(est, samples), dom.window, samples, int(seed),
                         dom.exact_period)


def window_check(f: TrigPoly, thresholds: Sequence[float], window: float | None = None,
                 samples: int = 10**6, seed: int = 0, threads: int | None = None):
    """Estimate J_f at window L and 2L.

    Returns ``(curve_L, curve_2L, max_abs_diff)``.  For commensurable
    frequencies the first curve is the exact-period estimate and the second
    uses two periods.
    """
    _check_poly(f)
    dom = sampling_domain(f, window)
    c1 = estimate_J(f, thresholds, window, samples, seed, threads)
    c2 = estimate_J(f, thresholds, dom.width, samples, seed, threads)
    return c1, c2, float(np.max(np.abs(c1.estimates - c2.estimates)))


def _derivative_moduli_coeffs(f: TrigPoly, omega: float, k: int) -> list[np.ndarray]:
    # coefficients of (chi_omega f)^(j) on f's own exponentials; |chi_omega| = 1
    shifted = f.frequencies + omega
    a = f.coefficients
    return [a * (1j * shifted) ** j for j in range(1, k + 1)]


def estimate_Xi(f: TrigPoly, omega: float, k: int, u: float, v: float,
                window: float | None = None, samples: int = 10**6, seed: int = 0,
                threads: int | None = None) -> XiEstimate:
    """Mean measure of {|f| < u and |(chi_omega f)^(j)| < v^j, j = 1..k}."""
    _check_poly(f)
    samples = _check_samples(samples)
    if int(k) != k or k < 1:
        raise InvalidInputError("k must be a positive integer")
    if not (u > 0 and v > 0):
        raise InvalidInputError("u and v must be positive")
    k = int(k)
    dom = sampling_domain(f, window)
    # the derivative coefficients equal those of trigpoly.derivative on the modulated poly
    dcoeffs = _derivative_moduli_coeffs(f, omega, k)
    a = f.coefficients
    vpow = [v ** j for j in range(1, k + 1)]

    def count(x):
        E = _phase_matrix(f, x)
        mask = np.abs(E @ a) < u
        for c, bound in zip(dcoeffs, vpow):
            sub = E[mask]
            keep = np.abs(sub @ c) < bound
            mask[np.flatnonzero(mask)[~keep]] = False
        return int(mask.sum())

    hits = sum(map_blocks(count, dom, samples, seed, threads))
    p = hits / samples
    return XiEstimate(p, float(_binomial_se(p, samples)), float(omega), k, float(u), float(v))


@dataclass(frozen=True)
class KEstimate:
    value: float
    omega: float
    k: int
    v: float
    xi: float
    xi_std_error: float
    analytic: float


def estimate_K(f: TrigPoly, u: float, omega_grid: Sequence[float] = (0.0,), k_max: int = 4,
               v_grid: Sequence[float] = DEFAULT_V_GRID, window: float | None = None,
               samples: int = 1 << 18, seed: int = 0, threads: int | None = None,
               return_details: bool = False):
    """Grid upper estimate of K_f(u).

    Minimises ``A b(f) k u^(1/k) / v + Xi_{f,omega,k,u}(v)`` over the finite
    grid; every Xi on the grid is read off one shared sample set.
    """
    _check_poly(f)
    samples = _check_samples(samples)
    omegas = np.asarray(omega_grid, dtype=float).ravel()
    vs = np.asarray(v_grid, dtype=float).ravel()
    if omegas.size == 0 or vs.size == 0 or np.any(vs <= 0) or not np.all(np.isfinite(omegas)):
        raise InvalidInputError("omega_grid and v_grid must be nonempty; v > 0")
    if int(k_max) != k_max or k_max < 1:
        raise InvalidInputError("k_max must be a positive integer")
    if not u > 0:
        raise InvalidInputError("u must be positive")
    k_max = int(k_max)
    b = bandwidth(f)
    dom = sampling_domain(f, window)
    a = f.coefficients
    vs_sorted = np.sort(vs)
    ks = np.arange(1, k_max + 1)
    analytic = K_CONSTANT * b * ks[:, None] * u ** (1.0 / ks[:, None]) / vs_sorted[None, :]

    best = None
    for omega in omegas:
        dcoeffs = _derivative_moduli_coeffs(f, omega, k_max)

        def count(x):
            E = _phase_matrix(f, x)
            sub = E[np.abs(E @ a) < u]
            out = np.zeros((k_max, vs_sorted.size), dtype=np.int64)
            r = np.zeros(sub.shape[0])
            for j, c in enumerate(dcoeffs, start=1):
                r = np.maximum(r, np.abs(sub @ c) ** (1.0 / j))
                out[j - 1] = np.searchsorted(np.sort(r), vs_sorted, side="left")
            return out

        xi = sum(map_blocks(count, dom, samples, seed, threads)) / samples
        total = analytic + xi
        i, j = np.unravel_index(np.argmin(total), total.shape)
        cand = KEstimate(max(0.0, float(total[i, j])), float(omega), int(ks[i]), float(vs_sorted[j]),
                         float(xi[i, j]), float(_binomial_se(xi[i, j], samples)), float(analytic[i, j]))
        if best is None or cand.value < best.value:
            best = cand
    return best if return_details else best.value


@lru_cache(maxsize=None)
def _cn_value(n: int) -> float:
    return math.exp(cnseq.cn(n))


def theorem1_bound(n: int, height: float, u):
    """C_n H^(-1/n) u^(1/n); values above 1 are returned unclamped.

    ``u`` may be an array, in which case an array comes back.
    """
    if int(n) != n or n < 1:
        raise InvalidInputError("n must be a positive integer")
    if not (height > 0 and np.all(np.asarray(u) > 0)):
        raise InvalidInputError("height and u must be positive")
    n = int(n)
    val = _cn_value(n) * height ** (-1.0 / n) * np.asarray(u, dtype=float) ** (1.0 / n)
    return float(val) if val.ndim == 0 else val


def corollary1_bound(n: int, height: float, p: float) -> float:
    """C_f n^p Gamma(p) with C_f = C_n H^(-1/n)."""
    return theorem1_bound(n, height, 1.0) * n ** p * math.gamma(p)


def mean_log_minus_p(f: TrigPoly, p: float = 1.0, window: float | None = None,
                     samples: int = 10**6, seed: int = 0, threads: int | None = None,
                     return_error: bool = False):
    """Sample mean of |min(0, log|f(x)|)|^p.

    With ``return_error`` a pair ``(mean, std_error)`` is returned, the
    error being the plain sample standard deviation over sqrt(samples).
    """
    _check_poly(f)
    samples = _check_samples(samples)
    if not p >= 1:
        raise InvalidInputError("p must be >= 1")
    dom = sampling_domain(f, window)
    a = f.coefficients

    def moments(x):
        with np.errstate(divide="ignore"):
            lg = np.log(np.abs(_phase_matrix(f, x) @ a))
        y = np.abs(np.minimum(lg, 0.0)) ** p
        return float(np.sum(y)), float(np.sum(y * y))

    parts = map_blocks(moments, dom, samples, seed, threads)
    s1 = math.fsum(s for s, _ in parts)
    s2 = math.fsum(s for _, s in parts)
    mean = s1 / samples
    if not return_error:
        return mean
    var = max(0.0, s2 / samples - mean * mean)
    return mean, math.sqrt(var / samples)


@dataclass
class Lemma2Report:
    trials: int
    seed: int
    violations: int = 0
    degenerate: int = 0
    rejected: int = 0
    worst_ratio: float = 0.0
    records: list = field(default_factory=list)


def _random_trigpoly(rng: np.random.Generator, max_terms=5, max_freq=4.0) -> TrigPoly:
    m = int(rng.integers(1, max_terms + 1))
    w = rng.uniform(-max_freq, max_freq, m)
    c = rng.normal(size=m) + 1j * rng.normal(size=m)
    return TrigPoly.from_terms(zip(w, c))


def _one_quadrant(z: np.ndarray) -> bool:
    re, im = z.real, z.imag
    return (np.all(re >= 0) or np.all(re <= 0)) and (np.all(im >= 0) or np.all(im <= 0))


def lemma2_trial(seed: int, trials: int, grid: int = 513, degenerate_tol: float = 1e-9,
                 max_attempts: int | None = None) -> Lemma2Report:
    """Check b - a <= 2 sqrt(2) max|phi| / min|phi'| on random instances.

    Draws random trigonometric polynomials phi and intervals [a, b] and keeps
    the instances whose derivative image, sampled on ``grid`` points, lies
    in one closed quadrant.  ``trials`` counts kept instances.  Instances
    with min|phi'| below ``degenerate_tol`` are counted as degenerate and
    skipped.
    """
    if int(trials) != trials or trials < 1:
        raise InvalidInputError("trials must be a positive integer")
    rng = np.random.default_rng(seed)
    rep = Lemma2Report(int(trials), int(seed))
    max_attempts = 200 * trials if max_attempts is None else max_attempts
    attempts = 0
    kept = 0
    t = np.linspace(0.0, 1.0, grid)
    while kept < trials and attempts < max_attempts:
        attempts += 1
        phi = _random_trigpoly(rng)
        dphi = derivative(phi, 1)
        if dphi.is_zero:
            rep.degenerate += 1
            continue
        a = rng.uniform(-10, 10)
        length = 10 ** rng.uniform(-3, 0.5)
        xs = a + length * t
        d = dphi(xs)
        if not _one_quadrant(d):
            rep.rejected += 1
            continue
        dmin = np.abs(d).min()
        if dmin < degenerate_tol:
            rep.degenerate += 1
            continue
        kept += 1
        rhs = 2 * math.sqrt(2) * np.abs(phi(xs)).max() / dmin
        ratio = length / rhs
        rep.worst_ratio = max(rep.worst_ratio, ratio)
        if ratio > 1:
            rep.violations += 1
            rep.records.append({"poly": phi.to_dict(), "a": a, "b": a + length, "ratio": ratio})
    if kept < trials:
        raise InvalidInputError(f"only {kept} of {trials} trials passed the quadrant filter")
    return rep
