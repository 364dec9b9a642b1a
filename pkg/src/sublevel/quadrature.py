"""Adaptive Gauss-Kronrod panel quadrature of log|h| over one period.

Integrands have integrable log singularities at known angles (zeros of h on
the circle) and kinks where |h| = 1 (for log+ and log-).  The period is cut
at the singular angles and geometrically graded panels are laid toward each
of them; then the panels carrying the largest error estimates are bisected
until the summed estimate meets the tolerance.  Gauss-Kronrod nodes are
interior, so a panel endpoint sitting on a zero is never evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError

TWO_PI = 2.0 * math.pi

# 15-point Kronrod extension of 7-point Gauss on [-1, 1] (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
K_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
G_WEIGHTS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes (1, 3, 5, 7 from each side)
G_WEIGHTS[[1, 3, 5]] = _WG[:3]
G_WEIGHTS[7] = _WG[3]
G_WEIGHTS[[9, 11, 13]] = _WG[2::-1]

MIN_GRADE_WIDTH = 1e-12
GRADE_RATIO = 0.15
# panels narrower than this are never bisected again
MIN_PANEL_WIDTH = 1e-15
_EVAL_CHUNK = 1 << 15


@dataclass(frozen=True)
class LogIntegrals:
    """Period means (integral / 2 pi) of log|h|, log+|h| and log-|h|."""

    mean_log: float
    mean_log_plus: float
    mean_log_minus: float
    err: float
    panels: int


def _graded_breaks(singular, base_panels, kinks=()):
    sing = np.unique(np.mod(np.asarray(singular, dtype=float), TWO_PI))
    pts = [np.linspace(0.0, TWO_PI, base_panels + 1), np.mod(np.asarray(kinks, dtype=float), TWO_PI)]
    if sing.size:
        pts.append(sing)
        pts.append(sing + TWO_PI)  # image of 0 at the right end
        ext = np.concatenate([sing - TWO_PI, sing, sing + TWO_PI])
        for k, s in enumerate(sing):
            i = sing.size + k
            for gap, sign in ((ext[i] - ext[i - 1], -1.0), (ext[i + 1] - ext[i], 1.0)):
                n = max(1, int(math.ceil(math.log(MIN_GRADE_WIDTH / (0.5 * gap)) / math.log(GRADE_RATIO))))
                d = 0.5 * gap * GRADE_RATIO ** np.arange(n + 1)
                d = d[d >= MIN_GRADE_WIDTH * 0.999]
                pts.append(s + sign * d)
    allp = np.concatenate(pts)
    allp = np.unique(allp[(allp >= 0.0) & (allp <= TWO_PI)])
    return allp


def _gk(evaluator, a, b):
    """Kronrod and Gauss estimates of the three integrals on each panel."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = c[:, None] + h[:, None] * NODES[None, :]
    flat = x.ravel()
    vals = np.empty(flat.shape)
    for lo in range(0, flat.size, _EVAL_CHUNK):
        vals[lo:lo + _EVAL_CHUNK] = evaluator(flat[lo:lo + _EVAL_CHUNK])
    lg = vals.reshape(x.shape)
    plus = np.maximum(lg, 0.0)
    minus = np.minimum(lg, 0.0)
    stack = np.stack([lg, plus, minus])  # (3, panels, 15)
    K = (stack @ K_WEIGHTS) * h
    G = (stack @ G_WEIGHTS) * h
    err = np.abs(K - G).max(axis=0)
    return K, err


def integrate_log(evaluator, singular_angles=(), tol: float = 1e-10, max_panels: int = 2_000_000,
                  base_panels: int = 16, kink_angles=()) -> LogIntegrals:
    """Means of log|h|, log+|h|, log-|h| over [0, 2 pi).

    ``evaluator`` maps an array of angles to log|h(e^{i theta})|.  ``tol``
    bounds the summed Gauss-Kronrod error estimate on the mean (log scale).
    ``kink_angles`` (where |h| = 1) become plain panel breaks: a kink
    inside a panel can fool the Kronrod-Gauss difference.  Raises
    :class:`AccuracyError` (``best`` = the unconverged result) when
    ``max_panels`` is exhausted.
    """
    breaks = _graded_breaks(singular_angles, base_panels, kink_angles)
    a, b = breaks[:-1], breaks[1:]
    K, err = _gk(evaluator, a, b)
    done_K = np.zeros(3)
    done_err = 0.0
    target = tol * TWO_PI
    while True:
        # panels that can no longer be bisected are retired with their estimate
        frozen = (b - a) < MIN_PANEL_WIDTH
        if frozen.any():
            done_K += K[:, frozen].sum(axis=1)
            done_err += err[frozen].sum()
            a, b, K, err = a[~frozen], b[~frozen], K[:, ~frozen], err[~frozen]
        total = done_err + err.sum()
        npan = a.size + int(frozen.sum())
        if total <= target or a.size == 0:
            break
        if a.size >= max_panels:
            best = _result(done_K + K.sum(axis=1), total, a.size)
            raise AccuracyError(f"quadrature budget of {max_panels} panels exhausted "
                                f"(error estimate {total / TWO_PI:.3g} > tol {tol:.3g})", best)
        # bisect the fewest worst panels whose errors exceed the excess
        order = np.argsort(err)[::-1]
        m = int(np.searchsorted(np.cumsum(err[order]), total - 0.5 * target)) + 1
        m = min(m, order.size, max_panels - a.size)
        split = np.zeros(a.size, dtype=bool)
        split[order[:m]] = True
        mid = 0.5 * (a[split] + b[split])
        na = np.concatenate([a[split], mid])
        nb = np.concatenate([mid, b[split]])
        nK, nerr = _gk(evaluator, na, nb)
        keep = ~split
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        K = np.concatenate([K[:, keep], nK], axis=1)
        err = np.concatenate([err[keep], nerr])
    res = _result(done_K + _ordered_sum(a, K), done_err + err.sum(), npan)
    return res


def _ordered_sum(a, K):
    # sum in angle order so the result does not depend on the refinement history
    idx = np.argsort(a, kind="stable")
    return np.array([math.fsum(row[idx]) for row in K])


def _result(Ksum, total_err, panels):
    return LogIntegrals(float(Ksum[0] / TWO_PI), float(Ksum[1] / TWO_PI), float(Ksum[2] / TWO_PI),
                        float(total_err / TWO_PI), int(panels))
