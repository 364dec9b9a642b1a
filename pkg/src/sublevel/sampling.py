"""Stratified sampling of a real window with reproducible block-wise reduction.

The sample index range [0, samples) is cut into fixed blocks of ``BLOCK``
strata.  Block ``i`` draws its uniforms from a generator keyed by
``(seed, i)``, so the point set depends only on ``(seed, samples, domain)``
and never on how many worker threads consume the blocks.  Partial results
are combined in block order (integer counts exactly, floats with
``math.fsum``), which makes every reduction bit-reproducible.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .errors import InvalidInputError
from .trigpoly import TrigPoly, bandwidth

BLOCK = 1 << 18
THREADS_ENV = "SUBLEVEL_THREADS"
# number of periods 2*pi/b(f) per half window when no exact period exists
DEFAULT_WINDOW_PERIODS = 1000
_MAX_DENOMINATOR = 10**6


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Domain:
    start: float
    width: float
    exact_period: bool

    @property
    def window(self) -> float:
        """Half-width L of the sampled interval."""
        return self.width / 2


def _as_fraction(x: float) -> Fraction | None:
    fr = Fraction(x).limit_denominator(_MAX_DENOMINATOR)
    if abs(float(fr) - x) <= 1e-12 * max(1.0, abs(x)):
        return fr
    return None


def modulus_period(freqs) -> float | None:
    """Exact period of |f| if all frequency gaps are rationally related.

    |f| only sees differences w - w_min; when these are rational multiples
    of a common unit g the period is 2*pi/g.  Returns None otherwise, and
    also for a single frequency (|f| constant, any period works).
    """
    freqs = list(freqs)
    if len(freqs) < 2:
        return None
    gaps = [w - freqs[0] for w in freqs[1:]]
    # compare gaps against the smallest one so that e.g. multiples of pi work
    unit = min(gaps)
    fracs = [_as_fraction(d / unit) for d in gaps]
    if any(fr is None for fr in fracs):
        return None
    den = reduce(math.lcm, (fr.denominator for fr in fracs), 1)
    num = reduce(math.gcd, (fr.numerator * (den // fr.denominator) for fr in fracs))
    g = unit * num / den
    return 2 * math.pi / g


def sampling_domain(f: TrigPoly, window: float | None = None) -> Domain:
    """One exact period of |f| when available, else the window [-L, L].

    An explicit ``window`` always wins.
    """
    if window is not None:
        if not window > 0:
            raise InvalidInputError("window must be positive")
        return Domain(-float(window), 2 * float(window), False)
    if len(f) == 1:
        return Domain(0.0, 2 * math.pi, True)
    period = modulus_period(f.freqs)
    if period is not None:
        return Domain(0.0, period, True)
    L = DEFAULT_WINDOW_PERIODS * 2 * math.pi / bandwidth(f)
    return Domain(-L, 2 * L, False)


def block_points(domain: Domain, samples: int, seed: int, block: int) -> np.ndarray:
    lo = block * BLOCK
    hi = min(samples, lo + BLOCK)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed) & (2**64 - 1),
                                                       spawn_key=(block,)))
    strata = np.arange(lo, hi, dtype=float)
    return domain.start + (strata + rng.random(hi - lo)) * (domain.width / samples)


def map_blocks(fn, domain: Domain, samples: int, seed: int, threads: int | None = None) -> list:
    """Apply ``fn(x_block)`` to every sample block; results in block order."""
    nblocks = -(-samples // BLOCK)
    threads = default_threads() if threads is None else max(1, int(threads))

    def run(i):
        return fn(block_points(domain, samples, seed, i))

    if threads == 1 or nblocks == 1:
        return [run(i) for i in range(nblocks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, range(nblocks)))
