"""Trigonometric polynomials f(x) = sum_w a_w exp(i w x) and algebraic polynomials.

A :class:`TrigPoly` stores its spectrum as strictly increasing float
frequencies with nonzero complex coefficients.  Terms with equal frequency are
merged on construction by exact float equality, never by tolerance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError, NotNormalizableError

# evaluation block size (number of x points) for vectorised sums
_EVAL_BLOCK = 1 << 16


@dataclass(frozen=True)
class TrigPoly:
    freqs: tuple[float, ...]
    coeffs: tuple[complex, ...]

    def __post_init__(self):
        if len(self.freqs) != len(self.coeffs):
            raise InvalidInputError("freqs and coeffs differ in length")
        fr = [float(w) for w in self.freqs]
        if any(not np.isfinite(w) for w in fr):
            raise InvalidInputError("frequencies must be finite")
        if any(b <= a for a, b in zip(fr, fr[1:])):
            raise InvalidInputError("frequencies must be strictly increasing")
        co = [complex(a) for a in self.coeffs]
        if any(a == 0 or not np.isfinite(a) for a in co):
            raise InvalidInputError("coefficients must be finite and nonzero")
        object.__setattr__(self, "freqs", tuple(fr))
        object.__setattr__(self, "coeffs", tuple(co))

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, complex]]) -> "TrigPoly":
        """Build from (frequency, coefficient) pairs in any order.

        Coefficients sharing an exactly equal frequency are summed; terms
        whose coefficient ends up zero are dropped.
        """
        acc: dict[float, complex] = {}
        for w, a in terms:
            w = float(w)
            acc[w] = acc.get(w, 0j) + complex(a)
        items = sorted((w, a) for w, a in acc.items() if a != 0)
        return cls(tuple(w for w, _ in items), tuple(a for _, a in items))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[complex], start: float = 0.0) -> "TrigPoly":
        """Integer-frequency polynomial sum_k coeffs[k] exp(i (start + k) x)."""
        return cls.from_terms((start + k, a) for k, a in enumerate(coeffs))

    @classmethod
    def zero(cls) -> "TrigPoly":
        return cls((), ())

    @property
    def is_zero(self) -> bool:
        return not self.freqs

    def __len__(self):
        return len(self.freqs)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array(self.freqs, dtype=float)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def l1_norm(self) -> float:
        """sum |a_w|, an upper bound for sup |f|."""
        return float(sum(abs(a) for a in self.coeffs))

    def __call__(self, x):
        return evaluate(self, x)

    def scale(self, c: complex) -> "TrigPoly":
        return TrigPoly.from_terms((w, c * a) for w, a in zip(self.freqs, self.coeffs))

    def modulate(self, omega: float) -> "TrigPoly":
        """Return chi_omega * f, i.e. every frequency shifted by ``omega``."""
        return TrigPoly.from_terms((w + omega, a) for w, a in zip(self.freqs, self.coeffs))

    def dilate(self, a: float) -> "TrigPoly":
        """Return x -> f(a x)."""
        if a == 0:
            raise InvalidInputError("dilation factor must be nonzero")
        return TrigPoly.from_terms((a * w, c) for w, c in zip(self.freqs, self.coeffs))

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"omega": w, "re": a.real, "im": a.imag} for w, a in zip(self.freqs, self.coeffs)
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrigPoly":
        try:
            terms = [(t["omega"], complex(t["re"], t.get("im", 0.0))) for t in data["terms"]]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed TrigPoly JSON: {exc}") from exc
        return cls.from_terms(terms)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "TrigPoly":
        return cls.from_dict(json.loads(text))


def _require_nonzero(f: TrigPoly):
    if not isinstance(f, TrigPoly):
        raise InvalidInputError(f"expected TrigPoly, got {type(f).__name__}")
    if f.is_zero:
        raise InvalidInputError("the zero polynomial is not a valid argument")


def evaluate(f: TrigPoly, x):
    """Evaluate f at a real scalar or array of reals.

    Scalars give a Python complex, arrays a complex ndarray of the same shape.
    """
    _require_nonzero(f)
    return _evaluate_raw(f.frequencies, f.coefficients, x)


def _evaluate_raw(freqs: np.ndarray, coeffs: np.ndarray, x):
    scalar = np.ndim(x) == 0
    xs = np.asarray(x, dtype=float).ravel()
    out = np.empty(xs.shape, dtype=complex)
    for lo in range(0, xs.size, _EVAL_BLOCK):
        blk = xs[lo:lo + _EVAL_BLOCK]
        out[lo:lo + _EVAL_BLOCK] = np.exp(1j * np.multiply.outer(blk, freqs)) @ coeffs
    if scalar:
        return complex(out[0])
    return out.reshape(np.shape(x))


def derivative(f: TrigPoly, order: int = 1) -> TrigPoly:
    """Exact derivative of the given order; constant terms vanish.

    A constant input yields ``TrigPoly.zero()``, which analysis routines
    reject.
    """
    if int(order) != order or order < 1:
        raise InvalidInputError("derivative order must be a positive integer")
    order = int(order)
    return TrigPoly.from_terms(
        (w, (1j * w) ** order * a) for w, a in zip(f.freqs, f.coeffs) if w != 0
    )


def height(f: TrigPoly) -> float:
    _require_nonzero(f)
    return max(abs(a) for a in f.coeffs)


def bandwidth(f: TrigPoly) -> float:
    _require_nonzero(f)
    return f.freqs[-1] - f.freqs[0]


def normalize(f: TrigPoly) -> tuple[TrigPoly, float, float]:
    """Map f to h with spectrum in [0, 1] and bandwidth 1.

    Returns ``(h, modulation, scale)`` where ``modulation = -min(freqs)`` and
    ``scale = bandwidth(f)``, so that h(x) = exp(i*modulation*x/scale) f(x/scale)
    and |h(scale*x)| = |f(x)|.
    """
    b = bandwidth(f)
    if b == 0:
        raise NotNormalizableError("single-frequency polynomial has zero bandwidth")
    w0 = f.freqs[0]
    h = TrigPoly.from_terms(((w - w0) / b, a) for w, a in zip(f.freqs, f.coeffs))
    if len(h) != len(f):
        raise InvalidInputError("frequencies collide in floating point after normalization")
    return h, -w0, b


@dataclass(frozen=True)
class AlgebraicPoly:
    """Polynomial sum_k coeffs[k] z**k with nonzero leading coefficient."""

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        co = [complex(c) for c in self.coeffs]
        while co and co[-1] == 0:
            co.pop()
        if not co:
            raise InvalidInputError("the zero polynomial has no degree")
        if not all(np.isfinite(c) for c in co):
            raise InvalidInputError("coefficients must be finite")
        object.__setattr__(self, "coeffs", tuple(co))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def coefficients(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    @property
    def leading(self) -> complex:
        return self.coeffs[-1]

    def __call__(self, z):
        # numpy polyval wants highest degree first
        return np.polyval(self.coefficients[::-1], z)

    def __mul__(self, other: "AlgebraicPoly") -> "AlgebraicPoly":
        return AlgebraicPoly(tuple(np.convolve(self.coefficients, other.coefficients)))

    def on_circle(self) -> TrigPoly:
        """The trigonometric polynomial x -> p(exp(i x))."""
        return TrigPoly.from_coeffs(self.coeffs)

    def sup_bound(self) -> float:
        return float(np.abs(self.coefficients).sum())
