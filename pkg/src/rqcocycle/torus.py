"""Arithmetic on the d-torus T^d = (R/Z)^d.

Points and frequencies are kept in the canonical representative [0,1)^d.
Besides translations, the module provides Fourier coefficients of finitely
supported measures and finite-cutoff checks of two quantitative
non-degeneracy conditions:

  * frequency Diophantine condition   dist(<k,a>, Z) >= gamma / |k|^tau
  * measure mixing condition          |mu_hat(k)|    <= 1 - gamma / |k|^tau

both tested over all integer modes 0 < |k|_inf <= cutoff.  A "pass" verdict
always means "verified up to the reported cutoff", nothing stronger.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .measure import AtomicMeasure

RATIONAL_INDEPENDENCE_TOL = 1e-10


def _frac(x):
    """Fractional part mapped to [0,1), safe against the x -> 1.0 rounding edge."""
    out = np.asarray(x, dtype=float)
    out = out - np.floor(out)
    return np.where(out >= 1.0, out - 1.0, out)


@dataclass(frozen=True)
class TorusPoint:
    """A point of T^d stored as canonical coordinates in [0,1)."""

    coords: tuple[float, ...]

    def __init__(self, coords: Sequence[float]):
        arr = _frac(np.atleast_1d(np.asarray(coords, dtype=float)))
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("torus point needs a 1-d coordinate vector, d >= 1")
        object.__setattr__(self, "coords", tuple(float(c) for c in arr))

    @property
    def d(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)


class Frequency(TorusPoint):
    """A translation frequency; same canonical representation as TorusPoint."""

    def __neg__(self) -> "Frequency":
        return Frequency(-self.as_array())


def torus_distance(x: TorusPoint, y: TorusPoint) -> float:
    """Sup metric on T^d: max over coordinates of the circle distance."""
    if x.d != y.d:
        raise ValueError(f"dimension mismatch: {x.d} vs {y.d}")
    diff = np.abs(x.as_array() - y.as_array())
    return float(np.max(np.minimum(diff, 1.0 - diff)))


def circle_distance(a: float, b: float) -> float:
    d = abs(_frac(a) - _frac(b))
    return float(min(d, 1.0 - d))


@dataclass(frozen=True)
class DiophantineParams:
    """Constants (gamma, tau) plus the mode cutoff K used by the finite checks."""

    gamma: float
    tau: float
    cutoff: int

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if int(self.cutoff) < 1:
            raise ValueError("cutoff must be a positive integer")
        object.__setattr__(self, "cutoff", int(self.cutoff))


@dataclass(frozen=True)
class DiophantineReport:
    """Outcome of a finite-cutoff arithmetic check.

    margin is the minimum over checked modes of (required bound - observed
    value); the check passes iff margin >= 0.  worst_k attains the minimum.
    The cutoff is echoed so a "pass" is always bounded verification.
    """

    passed: bool
    worst_k: tuple[int, ...]
    margin: float
    gamma: float
    tau: float
    cutoff: int


def translate(theta: TorusPoint, alpha: Frequency) -> TorusPoint:
    """The ergodic translation theta -> theta + alpha (mod 1)."""
    if theta.d != alpha.d:
        raise ValueError(f"dimension mismatch: {theta.d} vs {alpha.d}")
    return TorusPoint(theta.as_array() + alpha.as_array())


def _nonzero_modes(d: int, cutoff: int) -> np.ndarray:
    """All k in Z^d with 0 < |k|_inf <= cutoff, as an (N, d) int array."""
    ranges = [np.arange(-cutoff, cutoff + 1)] * d
    grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, d)
    return grid[np.any(grid != 0, axis=1)]


def fourier_coefficient(mu: "AtomicMeasure", k: Sequence[int]) -> complex:
    """mu_hat(k) = sum_j w_j exp(+2 pi i <k, theta_j>) for an atomic measure on T^d.

    The sign of the exponent is a fixed convention; only |mu_hat| enters the
    mixing condition.
    """
    kvec = np.atleast_1d(np.asarray(k, dtype=float))
    pts = np.array([a.as_array() for a in mu.atoms])
    if pts.shape[1] != kvec.size:
        raise ValueError("mode dimension does not match the measure's torus dimension")
    phases = 2.0 * np.pi * (pts @ kvec)
    return complex(np.sum(np.asarray(mu.weights) * np.exp(1j * phases)))


def mixing_dc_check(mu: "AtomicMeasure", params: DiophantineParams) -> DiophantineReport:
    """Check |mu_hat(k)| <= 1 - gamma/|k|^tau over all 0 < |k|_inf <= cutoff.

    |k| in the bound is the Euclidean norm.  Returns the worst mode and its
    margin; pass means the inequality held for every checked mode.
    """
    pts = np.array([a.as_array() for a in mu.atoms])
    w = np.asarray(mu.weights, dtype=float)
    modes = _nonzero_modes(pts.shape[1], params.cutoff)
    phases = 2.0 * np.pi * (modes @ pts.T)
    moduli = np.abs(np.exp(1j * phases) @ w)
    bounds = 1.0 - params.gamma / np.linalg.norm(modes, axis=1) ** params.tau
    margins = bounds - moduli
    worst = int(np.argmin(margins))
    return DiophantineReport(
        passed=bool(margins[worst] >= 0.0),
        worst_k=tuple(int(c) for c in modes[worst]),
        margin=float(margins[worst]),
        gamma=params.gamma,
        tau=params.tau,
        cutoff=params.cutoff,
    )


def diophantine_check(alpha: Frequency, params: DiophantineParams) -> DiophantineReport:
    """Check dist(<k,alpha>, Z) >= gamma/|k|^tau over all 0 < |k|_inf <= cutoff."""
    modes = _nonzero_modes(alpha.d, params.cutoff)
    frac = _frac(modes @ alpha.as_array())
    dist = np.minimum(frac, 1.0 - frac)
    margins = dist - params.gamma / np.linalg.norm(modes, axis=1) ** params.tau
    worst = int(np.argmin(margins))
    return DiophantineReport(
        passed=bool(margins[worst] >= 0.0),
        worst_k=tuple(int(c) for c in modes[worst]),
        margin=float(margins[worst]),
        gamma=params.gamma,
        tau=params.tau,
        cutoff=params.cutoff,
    )


def rational_independence_check(
    alpha: Frequency, cutoff: int, tol: float = RATIONAL_INDEPENDENCE_TOL
) -> bool:
    """True iff <k,alpha> stays away from Z for all 0 < |k|_inf <= cutoff.

    tol separates intended-rational inputs from irrational ones at floating
    point precision; it is not a Diophantine bound.
    """
    modes = _nonzero_modes(alpha.d, int(cutoff))
    frac = _frac(modes @ alpha.as_array())
    dist = np.minimum(frac, 1.0 - frac)
    return bool(np.all(dist > tol))
