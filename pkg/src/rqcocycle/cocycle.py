"""The group of quasiperiodic cocycles on T^d with values in SL_m(R).

A quasiperiodic cocycle is a pair (alpha, A): a torus translation frequency
together with a continuous matrix-valued map A: T^d -> SL_m(R).  Group law
and inversion:

    (alpha, A) o (beta, B) = (alpha + beta, theta -> A(theta + beta) B(theta))
    (alpha, A)^{-1}        = (-alpha,       theta -> A(theta - alpha)^{-1})

Matrix maps come in three representations:

  * ConstantMap    -- a single matrix, theta-independent;
  * TrigPolyMap    -- finite trigonometric polynomial with real m x m
                      cosine/sine coefficient matrices per integer mode;
                      evaluation and differentiation are exact;
  * CallableMap    -- black-box vectorized callable (used for compositions
                      and inverses, which need not stay polynomial).

Membership in SL_m is enforced at construction by sampling |det - 1| on a
fixed deterministic point set; continuous maps cannot be checked everywhere,
so this is a construction-bug detector, not a proof.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .linalg import invert_many, opnorms
from .torus import Frequency, TorusPoint, _frac, circle_distance

SL_DET_TOL = 1e-6
_VALIDATION_SEED = 0x5EED0C0C


def _validation_points(d: int) -> np.ndarray:
    """Fixed deterministic sample of T^d: a lattice plus 100 uniform points."""
    if d == 1:
        lattice = (np.arange(32, dtype=float) / 32.0)[:, None]
    elif d == 2:
        g = np.arange(32, dtype=float) / 32.0
        lattice = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
    else:
        gen = np.random.Generator(np.random.Philox(key=_VALIDATION_SEED + 1))
        lattice = gen.random((1024, d))
    gen = np.random.Generator(np.random.Philox(key=_VALIDATION_SEED))
    return np.concatenate([lattice, gen.random((100, d))], axis=0)


def _check_unimodular(mats: np.ndarray, what: str) -> None:
    dets = np.linalg.det(mats)
    worst = float(np.max(np.abs(dets - 1.0)))
    if worst > SL_DET_TOL:
        raise ValueError(f"{what}: |det - 1| = {worst:.3g} exceeds {SL_DET_TOL} on sample points")


class TorusMatrixMap:
    """Base class: a map T^d -> SL_m(R).  Subclasses implement at_many."""

    d: int
    m: int
    differentiable = False

    def at(self, coords: np.ndarray) -> np.ndarray:
        return self.at_many(np.atleast_1d(np.asarray(coords, dtype=float))[None])[0]

    def at_many(self, coords: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def partials_many(self, coords: np.ndarray) -> np.ndarray:
        """Partial derivatives, shape (N, d, m, m); only for differentiable maps."""
        raise ValueError("derivative unavailable for this map representation")

    def left_multiply(self, q: np.ndarray) -> "TorusMatrixMap":
        """The map theta -> Q A(theta) for a fixed unimodular matrix Q."""
        q = np.asarray(q, dtype=float)
        _check_unimodular(q[None], "left factor")
        return CallableMap(lambda ts: q @ self.at_many(ts), self.d, self.m, _trusted=True)

    def to_dict(self) -> dict:
        raise ValueError("this map representation is not serializable")


class ConstantMap(TorusMatrixMap):
    """theta-independent matrix map."""

    differentiable = True

    def __init__(self, matrix: np.ndarray, d: int = 1, _trusted: bool = False):
        mat = np.array(matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("constant map needs a square matrix")
        if not _trusted:
            _check_unimodular(mat[None], "constant map")
        self.matrix = mat
        self.matrix.setflags(write=False)
        self.d = int(d)
        self.m = mat.shape[0]

    def at_many(self, coords: np.ndarray) -> np.ndarray:
        n = np.asarray(coords).shape[0]
        return np.broadcast_to(self.matrix, (n, self.m, self.m))

    def partials_many(self, coords: np.ndarray) -> np.ndarray:
        n = np.asarray(coords).shape[0]
        return np.zeros((n, self.d, self.m, self.m))

    def left_multiply(self, q: np.ndarray) -> "ConstantMap":
        q = np.asarray(q, dtype=float)
        _check_unimodular(q[None], "left factor")
        return ConstantMap(q @ self.matrix, d=self.d, _trusted=True)

    def to_dict(self) -> dict:
        return {"kind": "constant", "d": self.d, "matrix": self.matrix.tolist()}


class TrigPolyMap(TorusMatrixMap):
    """A(theta) = sum_k [ C_k cos(2 pi <k,theta>) + S_k sin(2 pi <k,theta>) ].

    Modes k are integer vectors; C_k, S_k real m x m matrices.  Evaluation and
    differentiation are exact up to rounding, with no grid interpolation.
    """

    differentiable = True

    def __init__(
        self,
        d: int,
        m: int,
        modes: Sequence[tuple[Sequence[int], np.ndarray, np.ndarray]],
        _trusted: bool = False,
    ):
        self.d = int(d)
        self.m = int(m)
        ks, cs, ss = [], [], []
        for k, c, s in modes:
            kv = tuple(int(x) for x in np.atleast_1d(k))
            if len(kv) != self.d:
                raise ValueError("mode dimension mismatch")
            ks.append(kv)
            cs.append(np.array(c, dtype=float).reshape(self.m, self.m))
            ss.append(np.array(s, dtype=float).reshape(self.m, self.m))
        if not ks:
            raise ValueError("trig polynomial needs at least one mode")
        self._ks = np.array(ks, dtype=float)
        self._cos = np.array(cs)
        self._sin = np.array(ss)
        for arr in (self._ks, self._cos, self._sin):
            arr.setflags(write=False)
        if not _trusted:
            _check_unimodular(self.at_many(_validation_points(self.d)), "trig polynomial map")

    @property
    def modes(self) -> list[tuple[tuple[int, ...], np.ndarray, np.ndarray]]:
        return [
            (tuple(int(x) for x in k), c.copy(), s.copy())
            for k, c, s in zip(self._ks, self._cos, self._sin)
        ]

    def degree(self) -> int:
        return int(np.max(np.abs(self._ks)))

    def at_many(self, coords: np.ndarray) -> np.ndarray:
        phases = 2.0 * np.pi * (np.asarray(coords, dtype=float) @ self._ks.T)
        return np.einsum("nk,kij->nij", np.cos(phases), self._cos) + np.einsum(
            "nk,kij->nij", np.sin(phases), self._sin
        )

    def partials_many(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        phases = 2.0 * np.pi * (coords @ self._ks.T)
        cosp, sinp = np.cos(phases), np.sin(phases)
        # d/d theta_a = sum_k 2 pi k_a [ -C_k sin + S_k cos ]
        out = np.einsum("nk,ka,kij->naij", -sinp, self._ks, self._cos)
        out += np.einsum("nk,ka,kij->naij", cosp, self._ks, self._sin)
        return 2.0 * np.pi * out

    def shifted(self, beta: np.ndarray) -> "TrigPolyMap":
        """The exactly shifted polynomial theta -> A(theta + beta)."""
        phi = 2.0 * np.pi * (self._ks @ np.asarray(beta, dtype=float))
        c, s = np.cos(phi), np.sin(phi)
        new_cos = self._cos * c[:, None, None] + self._sin * s[:, None, None]
        new_sin = -self._cos * s[:, None, None] + self._sin * c[:, None, None]
        return TrigPolyMap(
            self.d,
            self.m,
            list(zip(self._ks, new_cos, new_sin)),
            _trusted=True,
        )

    def left_multiply(self, q: np.ndarray) -> "TrigPolyMap":
        q = np.asarray(q, dtype=float)
        _check_unimodular(q[None], "left factor")
        return TrigPolyMap(
            self.d,
            self.m,
            list(zip(self._ks, q @ self._cos, q @ self._sin)),
            _trusted=True,
        )

    def to_dict(self) -> dict:
        return {
            "kind": "trigpoly",
            "d": self.d,
            "m": self.m,
            "modes": [
                {"k": list(k), "cos": c.tolist(), "sin": s.tolist()}
                for k, c, s in self.modes
            ],
        }


class CallableMap(TorusMatrixMap):
    """Black-box map backed by a vectorized callable (N,d) -> (N,m,m).

    The callable must be pure and safe for concurrent evaluation.  Not
    serializable, not differentiable.
    """

    def __init__(self, fn_many: Callable[[np.ndarray], np.ndarray], d: int, m: int,
                 _trusted: bool = False):
        self.fn_many = fn_many
        self.d = int(d)
        self.m = int(m)
        if not _trusted:
            _check_unimodular(self.at_many(_validation_points(self.d)), "callable map")

    def at_many(self, coords: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn_many(np.asarray(coords, dtype=float)), dtype=float)


def map_from_dict(data: dict) -> TorusMatrixMap:
    kind = data.get("kind")
    if kind == "constant":
        return ConstantMap(np.array(data["matrix"]), d=int(data.get("d", 1)))
    if kind == "trigpoly":
        modes = [
            (mode["k"], np.array(mode["cos"]), np.array(mode["sin"]))
            for mode in data["modes"]
        ]
        return TrigPolyMap(int(data["d"]), int(data["m"]), modes)
    raise ValueError(f"unknown map kind: {kind!r}")


@dataclass(frozen=True)
class C1Bound:
    """Bound L with |A|_C1 <= L and |A^{-1}|_C1 <= L."""

    bound: float

    def __post_init__(self):
        if not self.bound >= 1.0:
            raise ValueError("C1 bound must satisfy L >= 1")


@dataclass(frozen=True)
class QpCocycle:
    """Group element (alpha, A): frequency plus matrix-valued torus map."""

    freq: Frequency
    map: TorusMatrixMap

    def __post_init__(self):
        if self.freq.d != self.map.d:
            raise ValueError(
                f"frequency dimension {self.freq.d} != map dimension {self.map.d}"
            )

    @property
    def d(self) -> int:
        return self.freq.d

    @property
    def m(self) -> int:
        return self.map.m


def identity_cocycle(d: int = 1, m: int = 2) -> QpCocycle:
    return QpCocycle(Frequency(np.zeros(d)), ConstantMap(np.eye(m), d=d, _trusted=True))


def evaluate(g: QpCocycle, theta: TorusPoint) -> np.ndarray:
    """A(theta), the fiber matrix of g at the base point theta."""
    if theta.d != g.d:
        raise ValueError(f"dimension mismatch: point {theta.d}, cocycle {g.d}")
    return g.map.at(theta.as_array())


def compose(g: QpCocycle, h: QpCocycle) -> QpCocycle:
    """(alpha,A) o (beta,B) = (alpha+beta, theta -> A(theta+beta) B(theta)).

    The composed map is stored as a closure over the operands; products of
    trigonometric polynomials are not re-expanded.
    """
    if g.d != h.d or g.m != h.m:
        raise ValueError("cannot compose cocycles of different dimensions")
    beta = h.freq.as_array()
    gmap, hmap = g.map, h.map
    if isinstance(gmap, ConstantMap) and isinstance(hmap, ConstantMap):
        new_map: TorusMatrixMap = ConstantMap(
            gmap.matrix @ hmap.matrix, d=g.d, _trusted=True
        )
    else:
        new_map = CallableMap(
            lambda ts: gmap.at_many(_frac(ts + beta)) @ hmap.at_many(ts),
            g.d,
            g.m,
            _trusted=True,
        )
    return QpCocycle(Frequency(g.freq.as_array() + beta), new_map)


def invert(g: QpCocycle) -> QpCocycle:
    """(alpha,A)^{-1} = (-alpha, theta -> A(theta-alpha)^{-1}).

    Matrix inversion is pointwise: adjugate over determinant for m = 2, LU
    otherwise.  A numerically singular evaluation signals the map left SL_m.
    """
    alpha = g.freq.as_array()
    gmap = g.map
    if isinstance(gmap, ConstantMap):
        new_map: TorusMatrixMap = ConstantMap(
            invert_many(gmap.matrix[None])[0], d=g.d, _trusted=True
        )
    else:
        new_map = CallableMap(
            lambda ts: invert_many(gmap.at_many(_frac(ts - alpha))),
            g.d,
            g.m,
            _trusted=True,
        )
    return QpCocycle(Frequency(-alpha), new_map)


def _lattice(d: int, grid: int) -> np.ndarray:
    g = np.arange(int(grid), dtype=float) / float(grid)
    if d == 1:
        return g[:, None]
    axes = [g] * d
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)


def distance(g: QpCocycle, h: QpCocycle, grid: int = 64) -> float:
    """Grid approximation of the uniform product metric on the cocycle group:

    circle distance between frequencies (sup over coordinates) plus the max
    over a grid^d lattice of operator-norm differences of the maps.
    """
    if g.d != h.d or g.m != h.m:
        raise ValueError("cocycles live on different spaces")
    if int(grid) < 1:
        raise ValueError("grid must be >= 1")
    pts = _lattice(g.d, grid)
    freq_dist = max(
        circle_distance(a, b) for a, b in zip(g.freq.coords, h.freq.coords)
    )
    map_dist = float(np.max(opnorms(g.map.at_many(pts) - h.map.at_many(pts))))
    return freq_dist + map_dist


def c1_norm_check(g: QpCocycle, bound: C1Bound, grid: int = 64) -> bool:
    """Check |A|_0 + |DA|_0 <= L for the map and its pointwise inverse.

    |DA(theta)| is the sum over coordinate partials of their operator norms
    (exact for trigonometric polynomials, zero for constants).  The inverse
    side uses D(A^{-1}) = -A^{-1} (DA) A^{-1}, so no symbolic inverse is
    needed.  Raises for black-box callables, whose derivative is unavailable.
    """
    if not g.map.differentiable:
        raise ValueError("C1 check requires a differentiable map representation")
    pts = _lattice(g.d, grid)
    vals = g.map.at_many(pts)
    parts = g.map.partials_many(pts)
    deriv_norm = opnorms(parts).sum(axis=1)
    if float(np.max(opnorms(vals) + deriv_norm)) > bound.bound:
        return False
    inv_vals = invert_many(vals)
    inv_parts = -np.einsum("nij,najk,nkl->nail", inv_vals, parts, inv_vals)
    inv_deriv_norm = opnorms(inv_parts).sum(axis=1)
    return float(np.max(opnorms(inv_vals) + inv_deriv_norm)) <= bound.bound


def cocycle_to_dict(g: QpCocycle) -> dict:
    return {"freq": list(g.freq.coords), "map": g.map.to_dict()}


def cocycle_from_dict(data: dict) -> QpCocycle:
    return QpCocycle(Frequency(data["freq"]), map_from_dict(data["map"]))


def cocycle_to_text(g: QpCocycle) -> str:
    """Serialize constant and trig-polynomial cocycles to structured text.

    Floats round-trip exactly (shortest-repr decimal, at most 17 significant
    digits).  Callable maps are not serializable.
    """
    return json.dumps(cocycle_to_dict(g), indent=2)


def cocycle_from_text(text: str) -> QpCocycle:
    return cocycle_from_dict(json.loads(text))
