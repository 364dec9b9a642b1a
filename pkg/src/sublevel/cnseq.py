"""The constant sequence C_n of the sublevel bound, computed in log space.

    C_1 = 1/2,
    C_n = C_{n-1}^(1 - 1/n) * (A (n - 1))^(1/n) * n / (n - 1),   A = 3 sqrt(2) / pi.

The recurrence is iterated on log C_n as a running sum of increments with
Neumaier compensation, so 2e8 steps keep the ratio C_n / n accurate to the
9th digit.  Memory use is O(number of checkpoints).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import InvalidInputError

LEAD_CONSTANT = 3.0 * math.sqrt(2.0) / math.pi
LOG_C1 = math.log(0.5)


@numba.njit(cache=True)
def _iterate(n_max, stops, log_lead):
    # stops: ascending checkpoints (int64), all >= 1
    out = np.empty(stops.size)
    resid = np.empty(stops.size)
    s = math.log(0.5)
    c = 0.0
    j = 0
    while j < stops.size and stops[j] == 1:
        out[j] = s
        resid[j] = 0.0
        j += 1
    for k in range(2, n_max + 1):
        km1 = k - 1.0
        x = s + c
        d = (log_lead + math.log(km1) - x) / k + math.log1p(1.0 / km1)
        t = s + d
        if abs(s) >= abs(d):
            c += (s - t) + d
        else:
            c += (d - t) + s
        s = t
        while j < stops.size and stops[j] == k:
            out[j] = s + c
            resid[j] = abs(c)
            j += 1
    return out, resid


def _check_n(n):
    if int(n) != n or n < 1:
        raise InvalidInputError(f"n must be a positive integer, got {n!r}")
    return int(n)


def cn(n: int, lead_constant: float = LEAD_CONSTANT) -> float:
    """Return log C_n."""
    n = _check_n(n)
    out, _ = _iterate(n, np.array([n], dtype=np.int64), math.log(lead_constant))
    return float(out[0])


def cn_closed_form(n: int, lead_constant: float = LEAD_CONSTANT) -> float:
    """log C_n from the telescoped recurrence.

    Multiplying the log recurrence by n telescopes to
    n log C_n = log(1/2) + (n - 1) log A + n log n.
    """
    n = _check_n(n)
    return (LOG_C1 + (n - 1) * math.log(lead_constant)) / n + math.log(n)


@dataclass(frozen=True)
class CnSeries:
    n_checkpoints: np.ndarray
    log_cn: np.ndarray
    ratio: np.ndarray
    # |compensation term| at each checkpoint, a proxy for accumulated rounding
    residue: np.ndarray
    lead_constant: float = LEAD_CONSTANT

    def rows(self):
        for n, lc, r in zip(self.n_checkpoints, self.log_cn, self.ratio):
            yield int(n), float(lc), float(r)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "log_cn", "cn_over_n"])
        for n, lc, r in self.rows():
            w.writerow([n, repr(lc), repr(r)])
        return buf.getvalue()

    @property
    def final_ratio(self) -> float:
        return float(self.ratio[-1])


def checkpoint_grid(n_max: int, checkpoints: int | None = None) -> np.ndarray:
    """Geometric checkpoints 1, 2, 4, ... plus ``n_max``.

    With an integer ``checkpoints`` the grid is instead ``checkpoints``
    log-spaced integers from 1 to n_max (duplicates after rounding removed).
    """
    if checkpoints is None:
        pts = [1]
        while pts[-1] * 2 < n_max:
            pts.append(pts[-1] * 2)
        pts.append(n_max)
    else:
        pts = np.unique(np.rint(np.geomspace(1, n_max, int(checkpoints))).astype(np.int64))
    return np.unique(np.asarray(pts, dtype=np.int64))


def cn_series(n_max: int, checkpoints: int | None = None,
              lead_constant: float = LEAD_CONSTANT) -> CnSeries:
    """One streaming pass of the recurrence up to ``n_max``."""
    if int(n_max) != n_max or n_max < 10:
        raise InvalidInputError("n_max must be an integer >= 10")
    if checkpoints is not None and (int(checkpoints) != checkpoints or checkpoints < 2):
        raise InvalidInputError("checkpoints must be an integer >= 2")
    stops = checkpoint_grid(int(n_max), checkpoints)
    log_cn, resid = _iterate(int(n_max), stops, math.log(lead_constant))
    ratio = np.exp(log_cn - np.log(stops.astype(float)))
    return CnSeries(stops, log_cn, ratio, resid, lead_constant)
