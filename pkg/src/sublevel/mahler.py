"""Mahler measures M, M+, M- of polynomials on the unit circle.

Two independent routes are provided.

* Jensen route: roots by Aberth-Ehrlich simultaneous iteration, then
  ``log M = log|lead| + sum log+|root|``.  M+ is obtained by integrating
  log+ of the root-product form of |h| with panel breaks at the circle
  roots and at the exact crossings |h| = 1 (circle roots of
  z^d h(z) conj(h)(1/z) - z^d); M- = M / M+.
* Quadrature route: adaptive panel quadrature of log|h| straight from the
  coefficients, told only where h vanishes on the circle.

The cyclotomic product Phi_N (product of the first N cyclotomic
polynomials) is evaluated on the circle from Moebius weights, without ever
forming its coefficients.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import AccuracyError, ConvergenceError, InvalidInputError
from .quadrature import TWO_PI, integrate_log
from .sampling import Domain, map_blocks
from .trigpoly import AlgebraicPoly

MAX_ITER = 500
DEFAULT_TOL = 1e-12
# roots closer than this to the circle are treated as circle zeros for panel breaks
CIRCLE_BAND = 1e-3
PHI_N_CAP = 200


# ---------------------------------------------------------------- roots

@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray
    max_residual: float  # max |p(r)| / sum |a_k| |r|^k
    radii: np.ndarray  # inclusion radius around each root
    iterations: int

    def __len__(self):
        return self.roots.size


def _scaled_residual(c_desc, z):
    num = np.abs(np.polyval(c_desc, z))
    den = np.polyval(np.abs(c_desc), np.abs(z))
    return num / den


def _initial_guesses(c):
    n = c.size - 1
    # geometric mean of root moduli, perturbed off the symmetric circle
    r = (abs(c[0]) / abs(c[-1])) ** (1.0 / n) if c[0] != 0 else 1.0
    k = np.arange(n)
    ang = TWO_PI * k / n + 0.4 / n + 0.25
    rad = r * (1.0 + 0.01 * np.cos(3.0 * k + 1.0))
    return rad * np.exp(1j * ang)


def _aberth(c, tol):
    # c ascending, c[0] != 0, degree >= 1
    n = c.size - 1
    desc = c[::-1]
    ddesc = np.polyder(desc)
    z = _initial_guesses(c)
    if n == 1:
        return np.array([-c[0] / c[1]]), 0
    it = 0
    for it in range(1, MAX_ITER + 1):
        p = np.polyval(desc, z)
        dp = np.polyval(ddesc, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            w = ratio / (1.0 - ratio * inv.sum(axis=1))
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        small = np.abs(w) <= 4 * np.finfo(float).eps * np.maximum(np.abs(z), 1e-300)
        if small.all() or (np.max(_scaled_residual(desc, z)) <= tol * 1e-2 and np.max(np.abs(w)) <= 1e-8 * np.max(np.abs(z))):
            break
    return z, it


def _inclusion_radii(c, z):
    # Weierstrass corrections: disks of radius n|W_i| cover the zeros, and a
    # connected union of k disks holds exactly k zeros
    n = z.size
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    W = np.polyval(c[::-1], z) / (c[-1] * np.prod(diff, axis=1))
    return n * np.abs(W)


def _components(z, radii):
    n = z.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    d = np.abs(z[:, None] - z[None, :])
    touch = d <= (radii[:, None] + radii[None, :])
    for i in range(n):
        for j in range(i + 1, n):
            if touch[i, j]:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _refine_cluster(c, z, members, radii):
    """Replace a k-fold cluster by its multiple root.

    The centroid is polished by Newton on p^(k-1), which has a simple zero
    at a k-fold zero of p.  Falls back to the raw iterates if the polished
    point leaves the cluster's inclusion region.
    """
    k = len(members)
    desc = c[::-1]
    d1 = np.polyder(desc, k - 1)
    d2 = np.polyder(desc, k)
    pts = z[members]
    x = pts.mean()
    reach = np.max(np.abs(pts - x) + radii[members])
    for _ in range(50):
        den = np.polyval(d2, x)
        if den == 0:
            break
        step = np.polyval(d1, x) / den
        x = x - step
        if abs(step) <= 4 * np.finfo(float).eps * max(abs(x), 1.0):
            break
    if abs(x - pts.mean()) > reach:
        return pts, radii[members]
    # zeros of p cannot be closer to x than the last Newton step allows
    r = max(abs(step) * k, 4 * np.finfo(float).eps * max(abs(x), 1.0))
    return np.full(k, x), np.full(k, r)


def roots(p: AlgebraicPoly, tol: float = DEFAULT_TOL) -> RootSet:
    """All deg(p) roots with a residual certificate.

    Raises :class:`ConvergenceError` (``best`` = the last iterate) when the
    scaled residual ``max |p(r)| / sum |a_k||r|^k`` exceeds ``tol`` after
    the iteration cap.
    """
    if not isinstance(p, AlgebraicPoly):
        p = AlgebraicPoly(tuple(p))
    if p.degree < 1:
        raise InvalidInputError("root finding needs degree >= 1")
    c = p.coefficients
    nz = int(np.argmax(c != 0))  # exact zero roots
    core = c[nz:]
    if core.size > 1:
        z, it = _aberth(core, tol)
    else:
        z, it = np.empty(0, complex), 0
    radii = _inclusion_radii(core, z) if z.size else np.empty(0)
    if z.size:
        res = float(np.max(_scaled_residual(core[::-1], z)))
        if not res <= tol:
            raise ConvergenceError(f"Aberth iteration left residual {res:.3g} > {tol:.3g}",
                                   np.concatenate([np.zeros(nz, complex), z]))
        # collapse clusters to multiple roots
        zz, rr = [], []
        for comp in _components(z, radii):
            if len(comp) == 1:
                zz.append(z[comp]); rr.append(radii[comp])
            else:
                a, b = _refine_cluster(core, z, comp, radii)
                zz.append(a); rr.append(b)
        z = np.concatenate(zz)
        radii = np.concatenate(rr)
    else:
        res = 0.0
    allz = np.concatenate([np.zeros(nz, complex), z])
    allr = np.concatenate([np.zeros(nz), radii])
    order = np.lexsort((allz.imag, allz.real))
    return RootSet(allz[order], res, allr[order], it)


# ---------------------------------------------------------------- Mahler measure

@dataclass(frozen=True)
class MahlerTriple:
    m: float
    m_plus: float
    m_minus: float
    method: str
    err: float  # absolute error estimate on the log scale

    @property
    def log_m(self):
        return math.log(self.m) if self.m > 0 else -math.inf

    @property
    def log_m_plus(self):
        return math.log(self.m_plus)

    @property
    def log_m_minus(self):
        return math.log(self.m_minus) if self.m_minus > 0 else -math.inf

    def to_dict(self):
        return {"m": self.m, "m_plus": self.m_plus, "m_minus": self.m_minus,
                "log_m": self.log_m, "log_m_plus": self.log_m_plus,
                "log_m_minus": self.log_m_minus, "method": self.method, "err": self.err}

    def to_json(self):
        return json.dumps(self.to_dict())


def _triple(log_m, log_plus, log_minus, method, err):
    log_plus = max(0.0, log_plus)
    log_minus = min(0.0, log_minus)
    return MahlerTriple(math.exp(log_m), math.exp(log_plus), math.exp(log_minus), method, float(err))


def root_log_evaluator(lead: complex, rts: np.ndarray):
    """theta -> log|lead| + sum log|e^{i theta} - r| for the given roots."""
    llead = math.log(abs(lead))
    rts = np.asarray(rts, dtype=complex)

    def ev(theta):
        z = np.exp(1j * np.asarray(theta, dtype=float))
        out = np.full(z.shape, llead)
        for r in rts:
            with np.errstate(divide="ignore"):
                out += np.log(np.abs(z - r))
        return out

    return ev


def coefficient_log_evaluator(p: AlgebraicPoly):
    """theta -> log|p(e^{i theta})| by Horner evaluation of the coefficients."""
    desc = p.coefficients[::-1]

    def ev(theta):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(np.polyval(desc, np.exp(1j * np.asarray(theta, dtype=float)))))

    return ev


def _circle_angles(z, band=CIRCLE_BAND):
    z = np.asarray(z)
    on = np.abs(np.abs(z) - 1.0) <= band
    return np.mod(np.angle(z[on]), TWO_PI)


def unit_crossings(p: AlgebraicPoly, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Angles where |p(e^{i theta})| = 1.

    On the circle |p|^2 - 1 equals z^-d (z^d p(z) conj(p)(1/z) - z^d), a
    self-inversive polynomial of degree 2d whose circle roots are the
    crossings.
    """
    c = p.coefficients
    d = p.degree
    s = np.convolve(c, np.conj(c[::-1]))
    s[d] -= 1.0
    if not np.any(s != 0):
        return np.empty(0)  # |p| == 1 identically
    sp = AlgebraicPoly(tuple(s))
    if sp.degree < 1:
        return np.empty(0)
    try:
        rs = roots(sp, tol=max(tol, 1e-10))
    except ConvergenceError as exc:
        rs = RootSet(np.asarray(exc.best), math.inf, np.zeros(len(exc.best)), MAX_ITER)
    return _circle_angles(rs.roots, band=1e-4)


def mahler_jensen(p: AlgebraicPoly, tol: float = DEFAULT_TOL, quad_tol: float = 1e-10) -> MahlerTriple:
    """Mahler triple from the roots of p.

    ``log M`` is exact up to root error; the reported ``err`` combines the
    root inclusion radii with the quadrature error of the M+ integral.
    When p(0) != 0 the product form is cross-checked against Jensen's
    h(0)-form ``log|p(0)| - sum log-|root|``.
    """
    if not isinstance(p, AlgebraicPoly):
        p = AlgebraicPoly(tuple(p))
    if p.degree < 1:
        lc = math.log(abs(p.leading))
        return _triple(lc, max(lc, 0.0), min(lc, 0.0), "jensen", 0.0)
    rs = roots(p, tol)
    mod = np.abs(rs.roots)
    log_m = math.log(abs(p.leading)) + math.fsum(np.log(np.maximum(mod, 1.0)))
    # |d log+|r|| <= radius / (|r| - radius) for roots whose disk stays off 0
    with np.errstate(divide="ignore", invalid="ignore"):
        root_err = np.where(mod > rs.radii, rs.radii / np.maximum(mod - rs.radii, 1e-300), 0.0)
    root_err = float(np.sum(np.where(mod + rs.radii > 1.0, root_err, 0.0)))
    if p.coeffs[0] != 0:
        alt = math.log(abs(p.coeffs[0])) - math.fsum(np.log(np.minimum(mod, 1.0)))
        root_err = max(root_err, 0.0)
        if abs(alt - log_m) > max(1e3 * root_err, 1e-9 * max(1.0, abs(log_m))):
            raise AccuracyError(f"Jensen product and h(0) forms disagree: {log_m} vs {alt}", log_m)
    breaks = np.concatenate([_circle_angles(rs.roots), unit_crossings(p, tol)])
    q = integrate_log(root_log_evaluator(p.leading, rs.roots), breaks, tol=quad_tol)
    log_plus = q.mean_log_plus
    err = root_err + q.err
    return _triple(log_m, log_plus, log_m - log_plus, "jensen", err)


def mahler_quadrature(evaluator, singular_angles=(), tol: float = 1e-10,
                      max_panels: int = 2_000_000, kink_angles=()) -> MahlerTriple:
    """Mahler triple by adaptive quadrature of a circle log-evaluator.

    ``evaluator`` maps angles to log|h(e^{i theta})|; ``singular_angles``
    lists the zeros of h on the circle.  Raises :class:`AccuracyError` with
    the best triple when ``max_panels`` is exhausted.  ``kink_angles``, where
    |h| = 1, are optional panel breaks for the log+ and log- integrals.
    """
    try:
        q = integrate_log(evaluator, singular_angles, tol=tol, max_panels=max_panels,
                          kink_angles=kink_angles)
    except AccuracyError as exc:
        b = exc.best
        raise AccuracyError(str(exc), _triple(b.mean_log, b.mean_log_plus, b.mean_log_minus,
                                              "quadrature", b.err)) from exc
    return _triple(q.mean_log, q.mean_log_plus, q.mean_log_minus, "quadrature", q.err)


def mahler_quadrature_poly(p: AlgebraicPoly, tol: float = 1e-10, singular_angles=None,
                           max_panels: int = 2_000_000) -> MahlerTriple:
    """Quadrature route for a polynomial given by coefficients.

    Circle zeros default to those located by the root finder; pass
    ``singular_angles`` to supply them independently.
    """
    if singular_angles is None:
        singular_angles = _circle_angles(roots(p).roots) if p.degree >= 1 else ()
    kinks = unit_crossings(p) if p.degree >= 1 else ()
    return mahler_quadrature(coefficient_log_evaluator(p), singular_angles, tol, max_panels, kinks)


# ---------------------------------------------------------------- outer test

@dataclass(frozen=True)
class OuterResult:
    outer: bool
    residual: float  # |mean log|p| - log|p(0)||
    min_root_modulus: float
    diagnostic: str = ""

    def __bool__(self):
        return self.outer


def is_outer(p: AlgebraicPoly, tol: float = 1e-9) -> OuterResult:
    """Outer test: no roots in the open unit disk.

    The Jensen residual |mean log|p| - log|p(0)||, with the mean by
    quadrature, vanishes exactly for outer polynomials.
    """
    if not isinstance(p, AlgebraicPoly):
        p = AlgebraicPoly(tuple(p))
    if p.coeffs[0] == 0:
        return OuterResult(False, math.inf, 0.0, "constant coefficient is zero, so the mean of h vanishes")
    if p.degree == 0:
        return OuterResult(True, 0.0, math.inf)
    rs = roots(p)
    mmin = float(np.min(np.abs(rs.roots)))
    q = mahler_quadrature(coefficient_log_evaluator(p), _circle_angles(rs.roots), tol=min(tol, 1e-10))
    residual = abs(q.log_m - math.log(abs(p.coeffs[0])))
    outer = mmin >= 1.0 - tol
    return OuterResult(outer, residual, mmin, "" if outer else "root inside the open unit disk")


# ---------------------------------------------------------------- cyclotomic product

def mobius_table(n: int) -> np.ndarray:
    """mu(0..n) by a linear sieve; index 0 is unused (set to 0)."""
    mu = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        mu[1] = 1
    is_comp = np.zeros(n + 1, dtype=bool)
    primes = []
    for i in range(2, n + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            if i * p > n:
                break
            is_comp[i * p] = True
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return mu


def totient_table(n: int) -> np.ndarray:
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


@dataclass(frozen=True)
class CycloEvalPlan:
    """Moebius data for log|Phi_N| on the circle.

    Phi_N = prod_{k<=N} prod_{d|k} (z^d - 1)^mu(k/d) = prod_d (z^d - 1)^w_d
    with w_d = sum_{j <= N/d} mu(j).
    """

    n_max: int
    mobius: np.ndarray  # mu(1..N)
    divisor_weights: dict = field(repr=False)

    @classmethod
    def build(cls, N: int, cap: int = PHI_N_CAP) -> "CycloEvalPlan":
        if int(N) != N or N < 1:
            raise InvalidInputError("N must be a positive integer")
        if N > cap:
            raise InvalidInputError(f"N = {N} exceeds the cap {cap}")
        N = int(N)
        mu = mobius_table(N)
        mertens = np.cumsum(mu)
        weights = {d: int(mertens[N // d]) for d in range(1, N + 1) if mertens[N // d] != 0}
        plan = cls(N, mu[1:].copy(), weights)
        if plan.degree() != int(totient_table(N)[1:].sum()):
            raise AssertionError("divisor weights inconsistent with deg Phi_N")
        return plan

    def degree(self) -> int:
        return sum(w * d for d, w in self.divisor_weights.items())

    def expand(self) -> AlgebraicPoly:
        """Integer coefficients of Phi_N; only sensible for small N."""
        num = np.array([1], dtype=object)
        den = np.array([1], dtype=object)
        for d, w in self.divisor_weights.items():
            f = np.zeros(d + 1, dtype=object)
            f[0], f[d] = -1, 1
            for _ in range(abs(w)):
                if w > 0:
                    num = np.convolve(num, f)
                else:
                    den = np.convolve(den, f)
        q = _exact_divide(list(num), list(den))
        return AlgebraicPoly(tuple(complex(int(x)) for x in q))


def _exact_divide(num, den):
    # ascending integer coefficient lists, den monic up to sign
    num = num[:]
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        coef = num[i + len(den) - 1] // lead
        out[i] = coef
        for j, dj in enumerate(den):
            num[i + j] -= coef * dj
    if any(num):
        raise ArithmeticError("inexact cyclotomic division")
    return out


def phiN_log_evaluator(plan: CycloEvalPlan):
    """theta -> log|Phi_N(e^{i theta})| = sum_d w_d log(2|sin(d theta/2)|)."""
    ds = np.array(sorted(plan.divisor_weights), dtype=float)
    ws = np.array([plan.divisor_weights[int(d)] for d in ds], dtype=float)

    def ev(theta):
        th = np.asarray(theta, dtype=float)
        flat = th.ravel()
        out = np.empty(flat.shape)
        step = max(1, (1 << 20) // max(1, ds.size))
        for lo in range(0, flat.size, step):
            t = flat[lo:lo + step]
            with np.errstate(divide="ignore"):
                out[lo:lo + step] = np.log(2.0 * np.abs(np.sin(0.5 * np.multiply.outer(t, ds)))) @ ws
        if th.ndim == 0:
            return float(out[0])
        return out.reshape(th.shape)

    return ev


def farey_angles(N: int) -> list[Fraction]:
    """Reduced fractions a/q in [0, 1) with q <= N, ascending.

    Consecutive terms follow the Farey neighbour rule; the count is
    1 + sum_{q=2..N} phi(q) = deg Phi_N.
    """
    if int(N) != N or N < 1:
        raise InvalidInputError("N must be a positive integer")
    N = int(N)
    out = [Fraction(0, 1)]
    if N == 1:
        return out
    a, b, c, d = 0, 1, 1, N
    while c < d:
        out.append(Fraction(c, d))
        k = (N + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
    return out


@dataclass(frozen=True)
class PhiNMplus:
    N: int
    log_mplus_quadrature: float
    log_mplus_sampling: float
    err: float
    sampling_std_error: float
    log_m_quadrature: float


def log_mplus_phiN(N: int, tol: float = 1e-8, samples: int = 1 << 22, seed: int = 0,
                   max_panels: int = 4_000_000, threads: int | None = None) -> PhiNMplus:
    """log M+(Phi_N) by Farey-split quadrature, cross-checked by sampling.

    The sampling route is the period mean of -log-|Phi_N|, which equals
    log M+ because M(Phi_N) = 1.
    """
    plan = CycloEvalPlan.build(N)
    ev = phiN_log_evaluator(plan)
    sing = [TWO_PI * float(x) for x in farey_angles(plan.n_max)]
    tri = mahler_quadrature(ev, sing, tol=tol, max_panels=max_panels)

    def moments(x):
        y = -np.minimum(ev(x), 0.0)
        return float(np.sum(y)), float(np.sum(y * y))

    parts = map_blocks(moments, Domain(0.0, TWO_PI, True), samples, seed, threads)
    s1 = math.fsum(a for a, _ in parts)
    s2 = math.fsum(b for _, b in parts)
    mean = s1 / samples
    se = math.sqrt(max(0.0, s2 / samples - mean * mean) / samples)
    return PhiNMplus(plan.n_max, tri.log_m_plus, mean, tri.err, se, tri.log_m)


@dataclass(frozen=True)
class GrowthTable:
    rows: list
    exponent: float  # least-squares slope of log log M+ against log N

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "log_mplus_quadrature", "log_mplus_sampling", "err"])
        for r in self.rows:
            w.writerow([r.N, repr(r.log_mplus_quadrature), repr(r.log_mplus_sampling), repr(r.err)])
        return buf.getvalue()


def phiN_growth(N_list, tol: float = 1e-8, samples: int = 1 << 22, seed: int = 0,
                max_panels: int = 4_000_000, threads: int | None = None) -> GrowthTable:
    rows = [log_mplus_phiN(N, tol, samples, seed, max_panels, threads) for N in N_list]
    ns = np.array([r.N for r in rows], dtype=float)
    ys = np.array([r.log_mplus_quadrature for r in rows])
    if ns.size >= 2 and np.all(ys > 0):
        slope = float(np.polyfit(np.log(ns), np.log(ys), 1)[0])
    else:
        slope = math.nan
    return GrowthTable(rows, slope)
