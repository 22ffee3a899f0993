"""Solver-neutral description of the mixed-integer conic covering models.

A :class:`ModelIR` holds variables, linear rows, quadratic cone rows, a linear
objective (always maximised) and a pool of cluster cuts. Cut records keep the
point set only; :meth:`ModelIR.cut_rows` instantiates them for every slot.

Cone rows come in two kinds, each role being an affine expression:

* ``soc``:  ``t >= ||u||_2``
* ``rsoc``: ``2 t s >= ||u||_2^2`` with ``t, s >= 0``

Variable naming: ``x_i_k`` (point ``i`` served by slot ``k``), ``y_j_k``
(site ``j`` sits in position ``k``), ``W_k`` coverage of slot ``k``, ``Z_k``
its power, ``X_k_l`` facility coordinates, ``v_i_k_l`` / ``s_i_k`` distance
auxiliaries, ``h_k_*`` power-tower auxiliaries.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from fairmclp import geometry
from fairmclp.fairness import FairnessSpec
from fairmclp.instance import Instance

INF = math.inf
FORMAT = "fmclp-model"
VERSION = 1
DEFAULT_PWL_BREAKPOINTS = 32


class ModelError(ValueError):
    pass


class ExportError(ModelError):
    pass


@dataclass(frozen=True)
class Var:
    name: str
    kind: str = "continuous"  # binary | continuous
    lb: float = 0.0
    ub: float = INF

    def __post_init__(self):
        if self.kind not in ("binary", "continuous"):
            raise ModelError(f"bad variable kind {self.kind!r}")
        if self.lb > self.ub:
            raise ModelError(f"{self.name}: lb > ub")
        if self.kind == "binary" and (self.lb < 0 or self.ub > 1):
            raise ModelError(f"{self.name}: binary bounds must lie in [0, 1]")


def _terms(coefs: Mapping[str, float] | Iterable[tuple[str, float]]) -> tuple[tuple[str, float], ...]:
    items = coefs.items() if isinstance(coefs, Mapping) else coefs
    merged: dict[str, float] = {}
    for name, c in items:
        merged[name] = merged.get(name, 0.0) + float(c)
    return tuple((k, v) for k, v in merged.items() if v != 0.0)


@dataclass(frozen=True)
class Affine:
    terms: tuple[tuple[str, float], ...] = ()
    const: float = 0.0

    @classmethod
    def of(cls, coefs=(), const: float = 0.0) -> "Affine":
        return cls(_terms(coefs), float(const))

    @classmethod
    def var(cls, name: str, coef: float = 1.0) -> "Affine":
        return cls(((name, float(coef)),), 0.0)

    def value(self, x: Mapping[str, float]) -> float:
        return self.const + math.fsum(c * x[n] for n, c in self.terms)

    def names(self):
        return [n for n, _ in self.terms]


@dataclass(frozen=True)
class LinCon:
    terms: tuple[tuple[str, float], ...]
    sense: str  # "<=", "=", ">="
    rhs: float
    tag: str
    name: str

    def __post_init__(self):
        if self.sense not in ("<=", "=", ">="):
            raise ModelError(f"bad sense {self.sense!r}")
        if not self.terms:
            raise ModelError(f"row {self.name} has no coefficients")

    def activity(self, x: Mapping[str, float]) -> float:
        return math.fsum(c * x[n] for n, c in self.terms)

    def satisfied(self, x: Mapping[str, float], tol: float = 1e-9) -> bool:
        a = self.activity(x)
        if self.sense == "<=":
            return a <= self.rhs + tol
        if self.sense == ">=":
            return a >= self.rhs - tol
        return abs(a - self.rhs) <= tol


@dataclass(frozen=True)
class ConeCon:
    kind: str  # soc | rsoc
    t: Affine
    u: tuple[Affine, ...]
    tag: str
    name: str
    s: Affine | None = None

    def __post_init__(self):
        if self.kind not in ("soc", "rsoc"):
            raise ModelError(f"bad cone kind {self.kind!r}")
        if self.kind == "rsoc" and self.s is None:
            raise ModelError("rotated cone needs an s role")
        dim = 1 + len(self.u) + (1 if self.s is not None else 0)
        if dim < 2:
            raise ModelError("cone dimension must be at least 2")

    def names(self):
        out = self.t.names() + [n for a in self.u for n in a.names()]
        if self.s is not None:
            out += self.s.names()
        return out

    def satisfied(self, x: Mapping[str, float], tol: float = 1e-9) -> bool:
        t = self.t.value(x)
        uu = math.fsum(a.value(x) ** 2 for a in self.u)
        if self.kind == "soc":
            return t >= -tol and t + tol >= math.sqrt(uu)
        s = self.s.value(x)
        return t >= -tol and s >= -tol and 2 * t * s + tol * max(1.0, uu) >= uu


@dataclass(frozen=True)
class ModelIR:
    vars: tuple[Var, ...]
    lincons: tuple[LinCon, ...]
    cones: tuple[ConeCon, ...]
    objective: Affine
    cuts: tuple[tuple[int, ...], ...] = ()
    metadata: tuple[tuple[str, object], ...] = ()

    def __post_init__(self):
        names = [v.name for v in self.vars]
        declared = set(names)
        if len(declared) != len(names):
            raise ModelError("duplicate variable names")
        for row in self.lincons:
            missing = {n for n, _ in row.terms} - declared
            if missing:
                raise ModelError(f"row {row.name} uses undeclared {sorted(missing)}")
        for cone in self.cones:
            missing = set(cone.names()) - declared
            if missing:
                raise ModelError(f"cone {cone.name} uses undeclared {sorted(missing)}")
        missing = set(self.objective.names()) - declared
        if missing:
            raise ModelError(f"objective uses undeclared {sorted(missing)}")
        p = self.meta.get("p")
        for Q in self.cuts:
            for i in Q:
                for k in range(p or 0):
                    if f"x_{i}_{k}" not in declared:
                        raise ModelError(f"cut {Q} refers to undeclared x_{i}_{k}")

    @property
    def meta(self) -> dict:
        return dict(self.metadata)

    def var(self, name: str) -> Var:
        return self._index()[name]

    def _index(self) -> dict[str, Var]:
        return {v.name: v for v in self.vars}

    def count(self, prefix: str) -> int:
        return sum(1 for v in self.vars if v.name.split("_")[0] == prefix)

    def cut_rows(self) -> list[LinCon]:
        p = self.meta["p"]
        rows = []
        for c, Q in enumerate(self.cuts):
            for k in range(p):
                rows.append(LinCon(tuple((f"x_{i}_{k}", 1.0) for i in Q), "<=", float(len(Q) - 1),
                                   "cluster-cut", f"cut_{c}_{k}"))
        return rows

    def all_rows(self) -> list[LinCon]:
        return list(self.lincons) + self.cut_rows()

    def with_cuts(self, cuts: Iterable[Iterable[int]]) -> "ModelIR":
        pool = sorted(set(self.cuts) | {tuple(sorted(Q)) for Q in cuts})
        return ModelIR(self.vars, self.lincons, self.cones, self.objective, tuple(pool), self.metadata)

    # -- serialisation ---------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "format": FORMAT,
            "version": VERSION,
            "sense": "max",
            "vars": [{"name": v.name, "kind": v.kind, "lb": _num(v.lb), "ub": _num(v.ub)} for v in self.vars],
            "lincons": [{"name": r.name, "tag": r.tag, "coefs": dict(r.terms), "sense": r.sense, "rhs": r.rhs}
                        for r in self.lincons],
            "cones": [_cone_json(c) for c in self.cones],
            "objective": _affine_json(self.objective),
            "cuts": [list(Q) for Q in self.cuts],
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ModelIR":
        if data.get("format") != FORMAT:
            raise ModelError("not a model file")
        if data.get("version") != VERSION:
            raise ModelError(f"unsupported model version {data.get('version')}")
        vars_ = tuple(Var(v["name"], v["kind"], _unnum(v["lb"], -INF), _unnum(v["ub"], INF)) for v in data["vars"])
        rows = tuple(LinCon(tuple((k, float(c)) for k, c in r["coefs"].items()), r["sense"], float(r["rhs"]),
                            r["tag"], r["name"]) for r in data["lincons"])
        cones = tuple(_cone_from_json(c) for c in data["cones"])
        meta = tuple((k, _freeze(v)) for k, v in data["metadata"].items())
        return cls(vars_, rows, cones, _affine_from_json(data["objective"]),
                   tuple(tuple(Q) for Q in data["cuts"]), meta)


def _num(x: float):
    return None if math.isinf(x) else x


def _unnum(x, default: float) -> float:
    return default if x is None else float(x)


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    if isinstance(v, dict):
        return tuple((k, _freeze(x)) for k, x in v.items())
    return v


def _thaw(v):
    if isinstance(v, tuple):
        if v and all(isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], str) for x in v):
            return {k: _thaw(x) for k, x in v}
        return [_thaw(x) for x in v]
    return v


def _affine_json(a: Affine) -> dict:
    return {"coefs": dict(a.terms), "const": a.const}


def _affine_from_json(d: dict) -> Affine:
    return Affine(tuple((k, float(c)) for k, c in d["coefs"].items()), float(d["const"]))


def _cone_json(c: ConeCon) -> dict:
    out = {"name": c.name, "tag": c.tag, "kind": c.kind, "t": _affine_json(c.t), "u": [_affine_json(a) for a in c.u]}
    if c.s is not None:
        out["s"] = _affine_json(c.s)
    return out


def _cone_from_json(d: dict) -> ConeCon:
    s = _affine_from_json(d["s"]) if "s" in d else None
    return ConeCon(d["kind"], _affine_from_json(d["t"]), tuple(_affine_from_json(a) for a in d["u"]),
                   d["tag"], d["name"], s)


# -- builders ----------------------------------------------------------------------

class _Builder:
    def __init__(self):
        self.vars: list[Var] = []
        self.rows: list[LinCon] = []
        self.cones: list[ConeCon] = []
        self._names: set[str] = set()

    def var(self, name, kind="continuous", lb=0.0, ub=INF) -> str:
        if name in self._names:
            raise ModelError(f"duplicate variable {name}")
        self._names.add(name)
        self.vars.append(Var(name, kind, lb, ub))
        return name

    def row(self, coefs, sense, rhs, tag, name):
        self.rows.append(LinCon(_terms(coefs), sense, float(rhs), tag, name))

    def cone(self, cone: ConeCon):
        self.cones.append(cone)

    def build(self, objective: Affine, cuts=(), metadata=()) -> ModelIR:
        return ModelIR(tuple(self.vars), tuple(self.rows), tuple(self.cones), objective,
                       tuple(tuple(sorted(Q)) for Q in cuts), tuple(metadata))


def power_exponents(alpha: Fraction) -> tuple[int, int]:
    """``(a, b)`` with ``1 - alpha = a / b`` in lowest terms, ``b > 0``."""
    e = 1 - Fraction(alpha)
    return e.numerator, e.denominator


def decompose_power(Z: str, W: str, alpha, prefix: str | None = None):
    """Conic encoding of the power relation between ``Z`` and ``W``.

    With ``1 - alpha = q/p`` (``alpha < 1``) the relation is ``Z^p <= W^q``,
    i.e. ``Z <= W^(1 - alpha)``. With ``1 - alpha = -p/q`` (``alpha > 1``) it is
    ``Z^q W^p >= 1``, i.e. ``Z >= W^(1 - alpha)``, the direction a maximisation
    with a negative objective coefficient needs.

    Both relations are written as a geometric-mean inequality over ``2^L``
    leaves and unfolded into a binary tree of rotated cones. Returns
    ``(aux_vars, cones, rows)``; ``alpha = 0`` gives the single row ``Z = W``.
    """
    alpha = Fraction(alpha)
    if alpha == 1:
        raise ModelError("alpha = 1 is a logarithm, not a power")
    prefix = prefix or f"h_{Z}"
    if alpha == 0:
        return [], [], [LinCon(_terms({Z: 1.0, W: -1.0}), "=", 0.0, "power", f"pow_{Z}")]
    a, b = power_exponents(alpha)
    one = Affine.of((), 1.0)
    if alpha < 1:
        # Z <= (W^a * 1^(b-a) * Z^(L-b))^(1/L)
        n_w, n_one, n_z = a, b - a, None
        total = b
    else:
        # 1 <= (Z^b * W^(-a) * 1^(L-b+a))^(1/L)
        n_w, n_one, n_z = -a, None, b
        total = b - a
    L = 1 << max(1, math.ceil(math.log2(total))) if total > 1 else 2
    if alpha < 1:
        leaves = [Affine.var(W)] * n_w + [one] * n_one + [Affine.var(Z)] * (L - total)
        root = Affine.var(Z)
    else:
        leaves = [Affine.var(Z)] * n_z + [Affine.var(W)] * n_w + [one] * (L - total)
        root = one
    aux: list[Var] = []
    cones: list[ConeCon] = []
    level = 0
    while len(leaves) > 2:
        nxt = []
        for j in range(0, len(leaves), 2):
            name = f"{prefix}_{level}_{j // 2}"
            aux.append(Var(name, "continuous", 0.0, INF))
            h = Affine.var(name)
            # h^2 <= left * right  <=>  2 (left/2) right >= h^2
            cones.append(_geo_cone(leaves[j], leaves[j + 1], h, f"{prefix}_c{level}_{j // 2}"))
            nxt.append(h)
        leaves = nxt
        level += 1
    cones.append(_geo_cone(leaves[0], leaves[1], root, f"{prefix}_root"))
    return aux, cones, []


def _geo_cone(left: Affine, right: Affine, h: Affine, name: str) -> ConeCon:
    half = Affine(tuple((n, c / 2) for n, c in left.terms), left.const / 2)
    return ConeCon("rsoc", half, (h,), "power", name, right)


def _pwl_log_rows(Z: str, W: str, lo: float, hi: float, breakpoints: int, k: int) -> list[LinCon]:
    # tangents of log at geometrically spaced points: a concave outer approximation
    if hi <= lo:
        hi = lo * 2
    pts = np.geomspace(lo, hi, max(2, breakpoints))
    rows = []
    for t, b in enumerate(pts):
        # Z <= log b + (W - b)/b  <=>  Z - W/b <= log b - 1
        rows.append(LinCon(_terms({Z: 1.0, W: -1.0 / b}), "<=", math.log(b) - 1.0, "log-tangent", f"log_{k}_{t}"))
    return rows


def _objective_block(B: _Builder, instance: Instance, spec: FairnessSpec, p: int, breakpoints: int):
    """Coverage definitions, sorting rows, power / log rows and the objective."""
    w = instance.weights
    lam = spec.weights.lam
    alpha = spec.alpha
    for k in range(p):
        B.var(f"W_{k}", lb=0.0, ub=math.fsum(w))
        zlb = -INF if alpha == 1 else 0.0
        B.var(f"Z_{k}", lb=zlb, ub=INF)
    for k in range(p):
        coefs = {f"W_{k}": 1.0}
        for i in range(instance.n):
            coefs[f"x_{i}_{k}"] = -w[i]
        B.row(coefs, "=", 0.0, "coverage-def", f"wdef_{k}")
    for i in range(instance.n):
        B.row({f"x_{i}_{k}": 1.0 for k in range(p)}, "<=", 1.0, "assign-once", f"once_{i}")
    for k in range(p - 1):
        B.row({f"W_{k}": 1.0, f"W_{k + 1}": -1.0}, "<=", 0.0, "sorting", f"sort_{k}")
    meta: list[tuple[str, object]] = []
    if alpha == 1:
        positive = [x for x in w if x > 0]
        lo = min(positive) if positive else 1.0
        hi = math.fsum(w) if positive else 2.0
        for k in range(p):
            for row in _pwl_log_rows(f"Z_{k}", f"W_{k}", lo, hi, breakpoints, k):
                B.rows.append(row)
        objective = Affine.of({f"Z_{k}": lam[k] for k in range(p)})
        meta += [("objective_kind", "log-pwl"), ("pwl_breakpoints", breakpoints), ("pwl_range", (lo, hi))]
    else:
        for k in range(p):
            aux, cones, rows = decompose_power(f"Z_{k}", f"W_{k}", alpha)
            for v in aux:
                B.var(v.name, v.kind, v.lb, v.ub)
            for c in cones:
                B.cone(c)
            B.rows.extend(rows)
        scale = float(1 / (1 - alpha))
        objective = Affine.of({f"Z_{k}": scale * lam[k] for k in range(p)})
        meta.append(("objective_kind", "power"))
    meta += [("lambda", tuple(lam)), ("weights", tuple(w)), ("alpha", str(alpha)),
             ("spec", _freeze(spec.to_json()))]
    return objective, meta


def build_discrete(instance: Instance, spec: FairnessSpec, p: int, R: float,
                   breakpoints: int = DEFAULT_PWL_BREAKPOINTS) -> ModelIR:
    """Discrete model: slot variables ``x``, position variables ``y`` over the candidate sites."""
    if p != spec.p:
        raise ModelError(f"p={p} does not match the {spec.p} OWA weights")
    sites = instance.sites
    m = len(sites)
    if p > m:
        raise ModelError(f"p={p} exceeds the {m} candidate sites")
    cov = geometry.coverage_matrix(sites, instance.coords, R, instance.norm)
    B = _Builder()
    for i in range(instance.n):
        for k in range(p):
            B.var(f"x_{i}_{k}", "binary", 0.0, 1.0)
    for j in range(m):
        for k in range(p):
            B.var(f"y_{j}_{k}", "binary", 0.0, 1.0)
    objective, meta = _objective_block(B, instance, spec, p, breakpoints)
    for i in range(instance.n):
        coverers = np.flatnonzero(cov[:, i])
        for k in range(p):
            coefs = {f"x_{i}_{k}": 1.0}
            for j in coverers:
                coefs[f"y_{j}_{k}"] = -1.0
            B.row(coefs, "<=", 0.0, "coverage-link", f"link_{i}_{k}")
    for k in range(p):
        B.row({f"y_{j}_{k}": 1.0 for j in range(m)}, "=", 1.0, "one-site-per-position", f"pos_{k}")
    for j in range(m):
        B.row({f"y_{j}_{k}": 1.0 for k in range(p)}, "<=", 1.0, "one-position-per-site", f"site_{j}")
    meta += [("space", "disc"), ("p", p), ("R", float(R)), ("n", instance.n), ("m", m),
             ("instance", instance.digest()), ("sites", tuple(map(tuple, sites.tolist())))]
    return B.build(objective, (), meta)


def big_m(instance: Instance) -> list[float]:
    """``U_i = max_i' ||a_i - a_i'||``."""
    D = geometry.pairwise_distances(instance.coords, instance.norm)
    return [float(x) for x in D.max(axis=1)]


def build_continuous(instance: Instance, spec: FairnessSpec, p: int, R: float,
                     breakpoints: int = DEFAULT_PWL_BREAKPOINTS) -> ModelIR:
    """Continuous big-M model with Euclidean distance cones.

    For each point ``i`` and slot ``k``: ``v >= |a_i - X_k|`` coordinatewise,
    ``s_ik >= ||v||_2`` and ``s_ik <= R + U_i (1 - x_ik)``. A slot serving no
    point may sit at any demand point, where every relaxed row holds.
    """
    if p != spec.p:
        raise ModelError(f"p={p} does not match the {spec.p} OWA weights")
    if instance.norm.kind != "euclidean":
        raise ModelError("the continuous conic model supports the Euclidean norm only")
    n, d = instance.n, instance.d
    U = big_m(instance)
    B = _Builder()
    for i in range(n):
        for k in range(p):
            B.var(f"x_{i}_{k}", "binary", 0.0, 1.0)
    objective, meta = _objective_block(B, instance, spec, p, breakpoints)
    for k in range(p):
        for ell in range(d):
            B.var(f"X_{k}_{ell}", lb=-INF, ub=INF)
    a = instance.coords
    for i in range(n):
        for k in range(p):
            for ell in range(d):
                v = B.var(f"v_{i}_{k}_{ell}")
                B.row({v: 1.0, f"X_{k}_{ell}": 1.0}, ">=", float(a[i, ell]), "abs-diff-pos", f"vp_{i}_{k}_{ell}")
                B.row({v: 1.0, f"X_{k}_{ell}": -1.0}, ">=", -float(a[i, ell]), "abs-diff-neg", f"vn_{i}_{k}_{ell}")
            s = B.var(f"s_{i}_{k}")
            B.cone(ConeCon("soc", Affine.var(s), tuple(Affine.var(f"v_{i}_{k}_{ell}") for ell in range(d)),
                           "distance-cone", f"dist_{i}_{k}"))
            B.row({s: 1.0, f"x_{i}_{k}": U[i]}, "<=", R + U[i], "big-m-cover", f"cover_{i}_{k}")
    meta += [("space", "cont"), ("p", p), ("R", float(R)), ("n", n), ("d", d), ("U", tuple(U)),
             ("instance", instance.digest())]
    return B.build(objective, (), meta)


def build_continuous_cut_model(instance: Instance, spec: FairnessSpec, p: int, R: float,
                               initial_cuts=None, breakpoints: int = DEFAULT_PWL_BREAKPOINTS) -> ModelIR:
    """Facility-free planar model: incompatible point sets may not share a slot.

    ``initial_cuts`` defaults to every minimal incompatible set of size at most 3.
    """
    if p != spec.p:
        raise ModelError(f"p={p} does not match the {spec.p} OWA weights")
    if instance.d != 2 or instance.norm.kind != "euclidean":
        raise ModelError("the cut model requires planar Euclidean instances")
    if initial_cuts is None:
        initial_cuts = geometry.incompatible_sets(instance, R)
    B = _Builder()
    for i in range(instance.n):
        for k in range(p):
            B.var(f"x_{i}_{k}", "binary", 0.0, 1.0)
    objective, meta = _objective_block(B, instance, spec, p, breakpoints)
    meta += [("space", "cont-cuts"), ("p", p), ("R", float(R)), ("n", instance.n),
             ("instance", instance.digest())]
    return B.build(objective, initial_cuts, meta)


# -- symbol audit ----------------------------------------------------------------

def symbol_audit(model: ModelIR) -> dict[str, str]:
    """Where each ingredient of the formulation lives in ``model``.

    Keys: ``x, y, X, v, s, W, Z, U, lambda, omega, R``; absent symbols are
    omitted. Used to check that nothing of the formulation was dropped.
    """
    meta = model.meta
    found: dict[str, str] = {}
    prefixes = {v.name.split("_")[0] for v in model.vars}
    for sym in ("x", "y", "X", "v", "s", "W", "Z"):
        if sym in prefixes:
            found[sym] = "variable"
    tags = {r.tag for r in model.lincons}
    if "coverage-def" in tags and "weights" in meta:
        found["omega"] = "coefficient:coverage-def"
    if "lambda" in meta and model.objective.terms:
        found["lambda"] = "coefficient:objective"
    if "big-m-cover" in tags and "U" in meta:
        found["U"] = "coefficient:big-m-cover"
    if "R" in meta:
        found["R"] = "rhs:big-m-cover" if "big-m-cover" in tags else "metadata"
    return found


# -- evaluation and exhaustive check ---------------------------------------------------

def is_feasible(model: ModelIR, x: Mapping[str, float], tol: float = 1e-9) -> bool:
    idx = model._index()
    for name, v in idx.items():
        val = x[name]
        if val < v.lb - tol or val > v.ub + tol:
            return False
        if v.kind == "binary" and min(abs(val), abs(val - 1)) > tol:
            return False
    return (all(r.satisfied(x, tol) for r in model.all_rows())
            and all(c.satisfied(x, tol) for c in model.cones))


def exhaustive_optimum(model: ModelIR, limit: int = 1 << 20):
    """Optimum of a cone-free model by enumerating all binary assignments.

    Continuous variables must be fixed by equality rows once the binaries are
    set (true for the alpha = 0 discrete model). Returns ``(value, solution)``
    or ``(None, None)`` when nothing is feasible.
    """
    if model.cones:
        raise ModelError("exhaustive evaluation supports cone-free models only")
    binaries = [v.name for v in model.vars if v.kind == "binary"]
    conts = [v.name for v in model.vars if v.kind == "continuous"]
    if 2 ** len(binaries) > limit:
        raise ModelError(f"{len(binaries)} binaries exceed the enumeration limit")
    eqs = [r for r in model.all_rows() if r.sense == "="]
    best_val, best_x = None, None
    for bits in itertools.product((0.0, 1.0), repeat=len(binaries)):
        x = dict(zip(binaries, bits))
        pending = set(conts)
        progress = True
        while pending and progress:
            progress = False
            for r in eqs:
                unknown = [(n, c) for n, c in r.terms if n in pending]
                if len(unknown) == 1:
                    n, c = unknown[0]
                    rest = math.fsum(cc * x[nn] for nn, cc in r.terms if nn != n)
                    x[n] = (r.rhs - rest) / c
                    pending.discard(n)
                    progress = True
        if pending:
            raise ModelError(f"continuous variables {sorted(pending)} are not fixed by equalities")
        if not is_feasible(model, x):
            continue
        val = model.objective.value(x)
        if best_val is None or val > best_val + 1e-12:
            best_val, best_x = val, x
    return best_val, best_x


# -- file export -------------------------------------------------------------------------

def export(model: ModelIR, fmt: str = "json") -> bytes:
    """Serialise ``model`` as ``json`` or as LP text (``lp``, cone-free models only)."""
    fmt = fmt.lower()
    if fmt == "json":
        return (json.dumps(model.to_json(), indent=1, sort_keys=False) + "\n").encode()
    if fmt == "lp":
        from fairmclp.lpformat import write_lp

        if model.cones:
            raise ExportError("LP text cannot express cone constraints; export as JSON instead")
        return write_lp(model).encode()
    raise ExportError(f"unknown format {fmt!r}")


def import_json(data: bytes | str) -> ModelIR:
    return ModelIR.from_json(json.loads(data))
