"""OWA weights, orness, alpha-fairness and the combined (alpha, lambda)-fair operator.

Conventions
-----------
Coverage values are sorted in nondecreasing order, ``W_(1) <= ... <= W_(p)``,
so ``lambda_1`` weighs the *smallest* coverage. With this reading the minimum
operator is ``lambda = (1, 0, ..., 0)`` and has orness 1.

Values of the operator are plain floats; ``-inf`` is returned whenever
``alpha >= 1`` and some coverage is zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

FAMILIES = ("W", "C", "K", "D", "G", "H")
FAMILY_NAMES = {
    "W": "Average",
    "C": "Minimum",
    "K": "k-Average",
    "D": "Min-Average mix",
    "G": "Gini",
    "H": "Harmonic",
}
DEFAULT_BETA_MIX = Fraction(1, 2)

NEG_INF = float("-inf")


class WeightError(ValueError):
    """Invalid OWA weight vector or family parameters."""


def parse_alpha(value) -> Fraction:
    """Parse an inequality-aversion parameter into an exact nonnegative rational."""
    if isinstance(value, Fraction):
        alpha = value
    elif isinstance(value, float):
        alpha = Fraction(str(value))
    else:
        alpha = Fraction(str(value).strip())
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return alpha


def format_alpha(alpha: Fraction) -> str:
    return str(alpha)


@dataclass(frozen=True)
class OwaWeights:
    """A monotone (nonincreasing) OWA weight vector."""

    lam: tuple[float, ...]
    family: str = "Custom"
    params: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lam)
        object.__setattr__(self, "lam", lam)
        if not lam:
            raise WeightError("empty weight vector")
        if any(not (-1e-15 <= x <= 1 + 1e-15) for x in lam):
            raise WeightError(f"weights must lie in [0, 1]: {lam}")
        if abs(math.fsum(lam) - 1.0) > 1e-12:
            raise WeightError(f"weights must sum to 1, got {math.fsum(lam)!r}")
        if any(lam[j] < lam[j + 1] - 1e-12 for j in range(len(lam) - 1)):
            raise WeightError(f"weights must be nonincreasing: {lam}")

    @property
    def p(self) -> int:
        return len(self.lam)

    def __len__(self):
        return len(self.lam)

    def param(self, key, default=None):
        return dict(self.params).get(key, default)


def _harmonic(k: int) -> Fraction:
    return sum((Fraction(1, ell) for ell in range(1, k + 1)), Fraction(0))


def owa_family_exact(tag: str, p: int, k: int | None = None, beta_mix=None) -> list[Fraction]:
    """Exact rational weights of one of the standard fair OWA families."""
    if p < 1:
        raise WeightError("p must be at least 1")
    tag = tag.upper()
    if tag == "W":
        return [Fraction(1, p)] * p
    if tag == "C":
        return [Fraction(1)] + [Fraction(0)] * (p - 1)
    if tag == "K":
        k = math.ceil(p / 2) if k is None else int(k)
        if not 1 <= k <= p:
            raise WeightError(f"k-Average needs 1 <= k <= p, got k={k}, p={p}")
        return [Fraction(1, k) if j < k else Fraction(0) for j in range(p)]
    if tag == "D":
        beta = DEFAULT_BETA_MIX if beta_mix is None else Fraction(str(beta_mix))
        if not 0 <= beta <= 1:
            raise WeightError("beta_mix must lie in [0, 1]")
        den = 1 + (p - 1) * beta
        return [1 / den] + [beta / den] * (p - 1)
    if tag == "G":
        return [Fraction(2 * (p - j) + 1, p * p) for j in range(1, p + 1)]
    if tag == "H":
        hp = _harmonic(p)
        return [(hp - _harmonic(j - 1)) / p for j in range(1, p + 1)]
    raise WeightError(f"unknown OWA family {tag!r}")


def owa_family(tag: str, p: int, k: int | None = None, beta_mix=None) -> OwaWeights:
    """Weights of family ``tag`` (``W``, ``C``, ``K``, ``D``, ``G`` or ``H``) for ``p`` facilities.

    ``k`` defaults to ``ceil(p/2)`` for the k-Average family and ``beta_mix``
    to 1/2 for the min/average mix.
    """
    tag = tag.upper()
    lam = owa_family_exact(tag, p, k=k, beta_mix=beta_mix)
    params: list[tuple[str, str]] = []
    if tag == "K":
        params.append(("k", str(math.ceil(p / 2) if k is None else int(k))))
    if tag == "D":
        params.append(("beta_mix", str(DEFAULT_BETA_MIX if beta_mix is None else Fraction(str(beta_mix)))))
    return OwaWeights(tuple(float(x) for x in lam), tag, tuple(params))


def orness_coefficients(p: int) -> np.ndarray:
    if p < 2:
        raise WeightError("orness is undefined for p = 1")
    return np.array([(p - j) / (p - 1) for j in range(1, p + 1)])


def orness(w) -> float:
    lam = w.lam if isinstance(w, OwaWeights) else tuple(w)
    if len(lam) < 2:
        raise WeightError("orness is undefined for p = 1")
    p = len(lam)
    return math.fsum((p - j) / (p - 1) * lam[j - 1] for j in range(1, p + 1))


def orness_closed_form(tag: str, p: int, k: int | None = None, beta_mix=None) -> Fraction:
    """Tabulated closed-form orness of the standard families (exact)."""
    tag = tag.upper()
    if tag == "W":
        return Fraction(1, 2)
    if tag == "C":
        return Fraction(1)
    if tag == "K":
        k = math.ceil(p / 2) if k is None else int(k)
        return 1 - Fraction(k - 1, 2 * (p - 1))
    if tag == "D":
        b = DEFAULT_BETA_MIX if beta_mix is None else Fraction(str(beta_mix))
        return (-p * b + p + 2 * b) / (2 * p * b - 2 * b + 2)
    if tag == "G":
        return Fraction(4 * p + 1, 6 * p)
    if tag == "H":
        return Fraction(3, 4)
    raise WeightError(f"unknown OWA family {tag!r}")


def orness_exact(lam: Sequence[Fraction]) -> Fraction:
    p = len(lam)
    if p < 2:
        raise WeightError("orness is undefined for p = 1")
    return sum((Fraction(p - j, p - 1) * lam[j - 1] for j in range(1, p + 1)), Fraction(0))


# -- orness-constrained weight fitting -----------------------------------------

def _max_entropy(p: int, beta: float) -> np.ndarray:
    # lambda_j proportional to exp(mu * c_j); orness is increasing in mu.
    c = orness_coefficients(p)

    def weights(mu):
        z = mu * c
        e = np.exp(z - z.max())
        return e / e.sum()

    lo, hi = 0.0, 1.0
    while float(c @ weights(hi)) < beta:
        hi *= 2.0
        if hi > 1e6:
            raise WeightError(f"orness {beta} not reachable")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(c @ weights(mid)) < beta:
            lo = mid
        else:
            hi = mid
    return weights(0.5 * (lo + hi))


def _min_variance(p: int, beta: float) -> np.ndarray:
    # KKT: lambda_j = max(0, a + b c_j). The zero weights form a tail of
    # smallest c_j, so scan the support size from p downwards.
    c = orness_coefficients(p)
    for r in range(p, 1, -1):
        cs = c[:r]
        A = np.array([[r, cs.sum()], [cs.sum(), float(cs @ cs)]])
        a, b = np.linalg.solve(A, np.array([1.0, beta]))
        lam = a + b * cs
        if lam.min() < -1e-14:
            continue
        if r < p and np.max(a + b * c[r:]) > 1e-14:
            continue
        out = np.zeros(p)
        out[:r] = np.clip(lam, 0.0, None)
        return out / out.sum()
    raise WeightError(f"orness {beta} not reachable")


def fit_weights(p: int, beta: float, loss: str = "maxentropy") -> OwaWeights:
    """Weights with orness ``beta`` optimising ``loss``.

    ``loss`` is ``"maxentropy"`` (most dispersed weights) or ``"minvariance"``
    (weights closest to uniform in the squared sense). Only ``beta >= 1/2``
    yields nonincreasing weights, which the fair operator requires.
    """
    if p < 2:
        raise WeightError("weight fitting needs p >= 2")
    if not 0 < beta < 1:
        raise WeightError("beta must lie strictly between 0 and 1")
    if beta < 0.5:
        raise WeightError("orness below 1/2 cannot be attained by nonincreasing weights")
    key = loss.lower().replace("_", "").replace("-", "")
    if key == "maxentropy":
        lam = _max_entropy(p, beta)
    elif key == "minvariance":
        lam = _min_variance(p, beta)
    else:
        raise WeightError(f"unknown loss {loss!r}")
    lam = np.maximum(lam, 0.0)
    lam = lam / lam.sum()
    # enforce exact monotonicity against rounding noise
    lam = np.minimum.accumulate(lam)
    lam = lam / lam.sum()
    return OwaWeights(tuple(lam), "Custom", (("loss", key), ("beta", repr(beta))))


# -- fairness operators ---------------------------------------------------------

def alpha_fair(W: Sequence[float], alpha) -> float:
    """Constant-elasticity welfare of the allocation ``W``."""
    alpha = parse_alpha(alpha)
    W = [float(x) for x in W]
    if any(x < 0 for x in W):
        raise ValueError("allocations must be nonnegative")
    if alpha >= 1 and any(x == 0 for x in W):
        return NEG_INF
    if alpha == 1:
        return math.fsum(math.log(x) for x in W)
    e = float(1 - alpha)
    return math.fsum(x ** e for x in W) / e


@dataclass(frozen=True)
class FairnessSpec:
    weights: OwaWeights
    alpha: Fraction = field(default=Fraction(0))

    def __post_init__(self):
        object.__setattr__(self, "alpha", parse_alpha(self.alpha))

    @classmethod
    def of(cls, family: str, p: int, alpha=0, **params) -> "FairnessSpec":
        return cls(owa_family(family, p, **params), parse_alpha(alpha))

    @property
    def p(self) -> int:
        return self.weights.p

    @property
    def family(self) -> str:
        return self.weights.family

    def to_json(self) -> dict:
        out = {"family": self.weights.family, "p": self.p, "alpha": format_alpha(self.alpha),
               "params": dict(self.weights.params)}
        if self.weights.family == "Custom":
            out["lambda"] = list(self.weights.lam)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "FairnessSpec":
        family = data["family"]
        params = data.get("params", {}) or {}
        if family == "Custom":
            w = OwaWeights(tuple(data["lambda"]), "Custom", tuple(sorted(params.items())))
        else:
            kw = {}
            if "k" in params:
                kw["k"] = int(params["k"])
            if "beta_mix" in params:
                kw["beta_mix"] = Fraction(str(params["beta_mix"]))
            w = owa_family(family, int(data["p"]), **kw)
            if w.p != int(data["p"]):
                raise WeightError("p does not match the weight vector")
        return cls(w, parse_alpha(data["alpha"]))


def fair_owa(W: Sequence[float], spec: FairnessSpec) -> float:
    """The (alpha, lambda)-fair value of the coverage vector ``W``.

    ``W`` is sorted nondecreasingly and ``lambda_j`` is applied to the j-th
    smallest entry of the alpha-power (or logarithm) of ``W``.
    """
    lam = spec.weights.lam
    if len(W) != len(lam):
        raise ValueError(f"coverage vector has length {len(W)}, weights have {len(lam)}")
    Ws = sorted(float(x) for x in W)
    if Ws and Ws[0] < 0:
        raise ValueError("coverages must be nonnegative")
    alpha = spec.alpha
    if alpha >= 1 and Ws[0] == 0:
        return NEG_INF
    if alpha == 0:
        return math.fsum(l * x for l, x in zip(lam, Ws))
    if alpha == 1:
        return math.fsum(l * math.log(x) for l, x in zip(lam, Ws) if l != 0)
    e = float(1 - alpha)
    return math.fsum(l * x ** e for l, x in zip(lam, Ws)) / e


def owa(W: Sequence[float], weights: OwaWeights) -> float:
    """Plain ordered weighted average."""
    Ws = sorted(float(x) for x in W)
    return math.fsum(l * x for l, x in zip(weights.lam, Ws))


# -- axiom battery -------------------------------------------------------------------

@dataclass
class AxiomReport:
    spec: FairnessSpec
    checked: dict[str, int] = field(default_factory=dict)
    counterexamples: dict[str, list] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not any(self.counterexamples.values())

    def _fail(self, name, example):
        self.counterexamples.setdefault(name, []).append(example)


def axioms_check(spec: FairnessSpec, samples: int = 2000, seed: int = 0, scale: float = 10.0) -> AxiomReport:
    """Randomised check of symmetry, Pareto monotonicity, continuity, concavity and
    the transfer principle for the operator defined by ``spec``."""
    rng = np.random.default_rng(seed)
    p = spec.p
    rep = AxiomReport(spec, {k: 0 for k in ("symmetry", "pareto", "continuity", "concavity", "transfer")})
    tol = 1e-9
    for _ in range(samples):
        W = rng.uniform(0.05, scale, size=p)
        f = fair_owa(W, spec)
        fp = fair_owa(rng.permutation(W), spec)
        rep.checked["symmetry"] += 1
        if abs(f - fp) > tol * max(1.0, abs(f)):
            rep._fail("symmetry", (tuple(W), f, fp))

        up = W + rng.uniform(0, 1, size=p) * (rng.uniform(size=p) < 0.5)
        rep.checked["pareto"] += 1
        if fair_owa(up, spec) < f - tol * max(1.0, abs(f)):
            rep._fail("pareto", (tuple(W), tuple(up)))

        h = 1e-7
        step = rng.normal(size=p)
        step *= h / np.linalg.norm(step)
        fh = fair_owa(W + step, spec)
        # local Lipschitz bound: largest partial derivative is at most W_min^-alpha
        lip = max(float(W.min() - h) ** (-float(spec.alpha)), 1.0)
        rep.checked["continuity"] += 1
        if abs(fh - f) > lip * h * (1 + 1e-6) + 1e-12:
            rep._fail("continuity", (tuple(W), tuple(step)))

        V = rng.uniform(0.05, scale, size=p)
        mid = fair_owa((W + V) / 2, spec)
        avg = (f + fair_owa(V, spec)) / 2
        rep.checked["concavity"] += 1
        if mid < avg - tol * max(1.0, abs(avg)):
            rep._fail("concavity", (tuple(W), tuple(V)))

        if p >= 2:
            i, j = rng.choice(p, size=2, replace=False)
            if W[i] > W[j]:
                i, j = j, i
            # move mass from the poorer i to the richer j: a mean-preserving spread
            t = rng.uniform(0, W[i] - 1e-3) if W[i] > 1e-3 else 0.0
            spread = W.copy()
            spread[i] -= t
            spread[j] += t
            rep.checked["transfer"] += 1
            if fair_owa(spread, spec) > f + tol * max(1.0, abs(f)):
                rep._fail("transfer", (tuple(W), tuple(spread)))
    return rep
