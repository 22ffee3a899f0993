"""Coverage geometry: norms, balls, minimum enclosing balls and candidate sites.

All routines work on plain coordinate sequences or ``numpy`` arrays. Radius
comparisons use a relative tolerance (``COVER_TOL``) so that tangent
configurations are not lost to floating-point noise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

COVER_TOL = 1e-9

_WELZL_SEED = 20240601


class DimensionError(ValueError):
    """Points of different dimension were combined."""


class UnsupportedNormError(ValueError):
    """The requested norm / dimension combination is not supported."""


@dataclass(frozen=True)
class Norm:
    """A norm selector: ``euclidean``, ``l1``, ``linf`` or ``ltau`` with exponent ``tau``."""

    kind: str = "euclidean"
    tau: float | None = None

    def __post_init__(self):
        if self.kind not in ("euclidean", "l1", "linf", "ltau"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "ltau":
            if self.tau is None or not self.tau >= 1:
                raise ValueError("ltau norm requires tau >= 1")

    @classmethod
    def ltau(cls, tau: float) -> "Norm":
        if tau == 1:
            return cls("l1")
        if tau == 2:
            return cls("euclidean")
        if math.isinf(tau):
            return cls("linf")
        return cls("ltau", float(tau))

    @classmethod
    def parse(cls, text: str) -> "Norm":
        text = text.strip().lower()
        if text in ("euclidean", "l2", "2"):
            return cls("euclidean")
        if text in ("l1", "1", "manhattan"):
            return cls("l1")
        if text in ("linf", "inf", "chebyshev"):
            return cls("linf")
        if text.startswith("l"):
            return cls.ltau(float(text[1:]))
        raise ValueError(f"cannot parse norm {text!r}")

    @property
    def label(self) -> str:
        return f"l{self.tau:g}" if self.kind == "ltau" else self.kind

    def of(self, v: np.ndarray) -> float:
        """Norm of a single vector."""
        if self.kind == "euclidean":
            return float(math.sqrt(float(np.dot(v, v))))
        if self.kind == "l1":
            return float(np.sum(np.abs(v)))
        if self.kind == "linf":
            return float(np.max(np.abs(v))) if v.size else 0.0
        return float(np.sum(np.abs(v) ** self.tau) ** (1.0 / self.tau))


EUCLIDEAN = Norm("euclidean")
L1 = Norm("l1")
LINF = Norm("linf")


@dataclass(frozen=True)
class Ball:
    center: tuple[float, ...]
    radius: float
    norm: Norm = EUCLIDEAN

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")


@dataclass(frozen=True)
class OneCenterResult:
    center: tuple[float, ...]
    radius: float
    support: tuple[int, ...]


def _as_array(a) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    return arr


def distance(a, b, norm: Norm = EUCLIDEAN) -> float:
    a = _as_array(a)
    b = _as_array(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.size} vs {b.size}")
    return norm.of(a - b)


def pairwise_distances(points: np.ndarray, norm: Norm = EUCLIDEAN) -> np.ndarray:
    """Dense ``(n, n)`` distance matrix."""
    pts = np.asarray(points, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    if norm.kind == "euclidean":
        return np.sqrt(np.sum(diff * diff, axis=-1))
    if norm.kind == "l1":
        return np.sum(np.abs(diff), axis=-1)
    if norm.kind == "linf":
        return np.max(np.abs(diff), axis=-1)
    return np.sum(np.abs(diff) ** norm.tau, axis=-1) ** (1.0 / norm.tau)


def covers(ball: Ball, a, tol: float = COVER_TOL) -> bool:
    return distance(ball.center, a, ball.norm) <= ball.radius * (1.0 + tol)


def coverage_matrix(sites, points, R: float, norm: Norm = EUCLIDEAN, tol: float = COVER_TOL) -> np.ndarray:
    """Boolean matrix ``cov[j, i]``: site ``j`` covers point ``i`` at radius ``R``."""
    sites = np.asarray(sites, dtype=float)
    points = np.asarray(points, dtype=float)
    if sites.size == 0:
        return np.zeros((0, len(points)), dtype=bool)
    if sites.shape[1] != points.shape[1]:
        raise DimensionError("sites and points differ in dimension")
    diff = sites[:, None, :] - points[None, :, :]
    if norm.kind == "euclidean":
        d = np.sqrt(np.sum(diff * diff, axis=-1))
    elif norm.kind == "l1":
        d = np.sum(np.abs(diff), axis=-1)
    elif norm.kind == "linf":
        d = np.max(np.abs(diff), axis=-1)
    else:
        d = np.sum(np.abs(diff) ** norm.tau, axis=-1) ** (1.0 / norm.tau)
    return d <= R * (1.0 + tol)


# -- minimum enclosing ball ---------------------------------------------------

def _circumball(pts: np.ndarray, idx: Sequence[int]) -> tuple[np.ndarray, float]:
    """Smallest ball with all ``pts[idx]`` on its boundary (within their affine hull)."""
    if len(idx) == 0:
        return np.zeros(pts.shape[1]), -1.0
    p0 = pts[idx[0]]
    if len(idx) == 1:
        return p0.copy(), 0.0
    A = pts[list(idx[1:])] - p0
    rhs = 0.5 * np.sum(A * A, axis=1)
    G = A @ A.T
    try:
        lam = np.linalg.solve(G, rhs)
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(G, rhs, rcond=None)[0]
    c = p0 + lam @ A
    return c, float(np.sqrt(np.sum((c - p0) ** 2)))


def _welzl(pts: np.ndarray) -> tuple[np.ndarray, float, tuple[int, ...]]:
    # Move-to-front variant; recursion depth is bounded by d + 1.
    n, d = pts.shape
    order = list(np.random.default_rng(_WELZL_SEED).permutation(n))

    def inside(c, r, i):
        return r >= 0 and math.sqrt(float(np.sum((pts[i] - c) ** 2))) <= r * (1 + 1e-12) + 1e-15

    def mtf(end: int, support: list[int]):
        c, r = _circumball(pts, support)
        best_support = tuple(support)
        if len(support) == d + 1:
            return c, r, best_support
        k = 0
        while k < end:
            i = order[k]
            if not inside(c, r, i):
                c, r, best_support = mtf(k, support + [i])
                order.pop(k)
                order.insert(0, i)
            k += 1
        return c, r, best_support

    c, r, support = mtf(n, [])
    return c, r, tuple(sorted(int(s) for s in support))


def _box_center(pts: np.ndarray) -> tuple[np.ndarray, float, tuple[int, ...]]:
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    half = (hi - lo) / 2
    axis = int(np.argmax(half))
    support = (int(np.argmin(pts[:, axis])), int(np.argmax(pts[:, axis])))
    return (lo + hi) / 2, float(half[axis]), tuple(sorted(set(support)))


def one_center(points, norm: Norm = EUCLIDEAN) -> OneCenterResult:
    """Minimum enclosing ball of ``points`` under ``norm``.

    Euclidean balls are computed with Welzl's algorithm in any dimension, the
    l-infinity case is the bounding box, and the planar l1 case is reduced to
    l-infinity by a 45 degree rotation.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("one_center needs a nonempty (n, d) point array")
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite coordinates")
    if norm.kind == "euclidean":
        c, r, support = _welzl(pts)
    elif norm.kind == "linf":
        c, r, support = _box_center(pts)
    elif norm.kind == "l1" and pts.shape[1] == 2:
        rot = np.column_stack([pts[:, 0] + pts[:, 1], pts[:, 0] - pts[:, 1]])
        cr, r, support = _box_center(rot)
        c = np.array([(cr[0] + cr[1]) / 2, (cr[0] - cr[1]) / 2])
    else:
        raise UnsupportedNormError(f"no exact 1-center for norm {norm.label} in dimension {pts.shape[1]}")
    return OneCenterResult(tuple(float(v) for v in c), float(r), support)


# -- cluster feasibility ------------------------------------------------------

def cluster_feasible(Q, instance, R: float, tol: float = COVER_TOL) -> bool:
    """True iff the demand points indexed by ``Q`` fit in one coverage ball of radius ``R``."""
    Q = sorted(set(Q))
    if not Q:
        raise ValueError("cluster must be nonempty")
    if len(Q) == 1:
        return True
    res = one_center(instance.coords[Q], instance.norm)
    return res.radius <= R * (1.0 + tol)


def _triangle_radius(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    # Euclidean minimum enclosing ball of three points.
    ab = float(np.sum((a - b) ** 2))
    bc = float(np.sum((b - c) ** 2))
    ca = float(np.sum((c - a) ** 2))
    sides = sorted([ab, bc, ca])
    if sides[2] >= sides[0] + sides[1]:
        return math.sqrt(sides[2]) / 2
    _, r = _circumball(np.array([a, b, c]), [0, 1, 2])
    return r


def incompatible_sets(instance, R: float, size: int | None = None, minimal: bool = True,
                      tol: float = COVER_TOL) -> list[tuple[int, ...]]:
    """Index sets of demand points that no single facility of radius ``R`` can cover.

    With ``minimal=True`` every infeasible set of cardinality at most ``size``
    (default ``d + 1``) that has no infeasible proper subset is returned, so a
    triple containing an infeasible pair is represented by the pair. With
    ``minimal=False`` all infeasible sets of exactly ``size`` elements are
    returned. Output is in lexicographic order.
    """
    pts = instance.coords
    n, d = pts.shape
    size = d + 1 if size is None else size
    if size < 2:
        raise ValueError("size must be at least 2")
    limit = R * (1.0 + tol)
    dist = pairwise_distances(pts, instance.norm)
    # the pairwise 1-center radius of any norm is half the distance
    bad_pair = dist / 2 > limit
    out: list[tuple[int, ...]] = []
    if minimal or size == 2:
        out.extend((i, j) for i, j in itertools.combinations(range(n), 2) if bad_pair[i, j])
        if size == 2:
            return sorted(out)
    fast = instance.norm.kind == "euclidean"
    found: set[tuple[int, ...]] = set()
    for k in range(3, size + 1):
        if not minimal and k != size:
            continue
        for Q in itertools.combinations(range(n), k):
            has_bad_pair = any(bad_pair[i, j] for i, j in itertools.combinations(Q, 2))
            if minimal and has_bad_pair:
                continue
            if has_bad_pair:
                out.append(Q)
                continue
            if minimal and k > 3 and any(
                sub in found for j in range(3, k) for sub in itertools.combinations(Q, j)
            ):
                continue
            if fast and k == 3:
                r = _triangle_radius(pts[Q[0]], pts[Q[1]], pts[Q[2]])
            else:
                r = one_center(pts[list(Q)], instance.norm).radius
            if r > limit:
                out.append(Q)
                found.add(Q)
    return sorted(out)


# -- finite dominating set for the planar problem -----------------------------

def circle_intersections(a, b, R: float, tol: float = COVER_TOL) -> list[tuple[float, float]]:
    """Intersection points of the circles of radius ``R`` centred at ``a`` and ``b``.

    Circles whose centres are farther apart than ``2R`` by at most the relative
    tolerance are treated as tangent (the midpoint is returned).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    dvec = b - a
    dd = math.hypot(dvec[0], dvec[1])
    if dd == 0.0 or dd > 2 * R * (1.0 + tol):
        return []
    mid = (a + b) / 2
    h2 = R * R - (dd / 2) ** 2
    if h2 <= 0.0:
        return [(float(mid[0]), float(mid[1]))]
    h = math.sqrt(h2)
    perp = np.array([-dvec[1], dvec[0]]) / dd
    p1 = mid + h * perp
    p2 = mid - h * perp
    if h == 0.0:
        return [(float(p1[0]), float(p1[1]))]
    return [(float(p1[0]), float(p1[1])), (float(p2[0]), float(p2[1]))]


def candidate_locations(instance, R: float) -> list[tuple[float, float]]:
    """Demand points plus all pairwise intersections of radius-``R`` circles around them.

    Some optimal planar solution only uses sites from this list.
    """
    pts = instance.coords
    if pts.shape[1] != 2 or instance.norm.kind != "euclidean":
        raise UnsupportedNormError("candidate_locations requires planar Euclidean instances")
    out: list[tuple[float, float]] = []
    seen: set[tuple[float, float]] = set()

    def push(c):
        if c not in seen:
            seen.add(c)
            out.append(c)

    for p in pts:
        push((float(p[0]), float(p[1])))
    for i, j in itertools.combinations(range(len(pts)), 2):
        for c in circle_intersections(pts[i], pts[j], R):
            push(c)
    return out
