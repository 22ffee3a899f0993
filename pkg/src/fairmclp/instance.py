"""Problem instances: weighted demand points, a norm and an optional candidate set."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from fairmclp.geometry import EUCLIDEAN, Norm


@dataclass(frozen=True)
class Instance:
    """Weighted demand points ``a_i`` with weights ``w_i``.

    ``candidates`` is the finite site set used by the discrete problem; when it
    is ``None`` the demand points themselves are the candidate sites.
    """

    points: tuple[tuple[float, ...], ...]
    weights: tuple[float, ...]
    norm: Norm = EUCLIDEAN
    candidates: tuple[tuple[float, ...], ...] | None = None
    name: str = "instance"
    meta: tuple[tuple[str, str], ...] = field(default=(), compare=False)

    def __post_init__(self):
        pts = tuple(tuple(float(c) for c in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not pts:
            raise ValueError("instance needs at least one demand point")
        d = len(pts[0])
        if d < 1 or any(len(p) != d for p in pts):
            raise ValueError("all demand points must share one dimension >= 1")
        if len(self.weights) != len(pts):
            raise ValueError("one weight per demand point required")
        if any(not np.isfinite(c) for p in pts for c in p):
            raise ValueError("coordinates must be finite")
        if any(not (w >= 0 and np.isfinite(w)) for w in self.weights):
            raise ValueError("weights must be finite and nonnegative")
        if self.candidates is not None:
            cands = tuple(tuple(float(c) for c in p) for p in self.candidates)
            if any(len(c) != d for c in cands):
                raise ValueError("candidate sites must match the demand dimension")
            object.__setattr__(self, "candidates", cands)

    @classmethod
    def from_arrays(cls, points, weights, norm: Norm = EUCLIDEAN, candidates=None, name="instance"):
        pts = np.asarray(points, dtype=float)
        cands = None if candidates is None else [tuple(c) for c in np.asarray(candidates, dtype=float)]
        return cls(tuple(map(tuple, pts)), tuple(np.asarray(weights, dtype=float)), norm, cands, name)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def d(self) -> int:
        return len(self.points[0])

    @cached_property
    def coords(self) -> np.ndarray:
        arr = np.array(self.points, dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def w(self) -> np.ndarray:
        arr = np.array(self.weights, dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def sites(self) -> np.ndarray:
        """Candidate sites of the discrete problem."""
        arr = self.coords if self.candidates is None else np.array(self.candidates, dtype=float)
        return arr

    @property
    def m(self) -> int:
        return len(self.sites)

    def head(self, n: int) -> "Instance":
        """The instance restricted to its first ``n`` demand points."""
        if not 1 <= n <= self.n:
            raise ValueError(f"cannot take {n} of {self.n} points")
        return Instance(self.points[:n], self.weights[:n], self.norm, self.candidates,
                        f"{self.name}[:{n}]", self.meta)

    def digest(self) -> str:
        payload = json.dumps(
            {"points": self.points, "weights": self.weights, "norm": self.norm.label,
             "candidates": self.candidates},
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]
