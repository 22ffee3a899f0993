"""Exact solvers for the fair maximal covering location problem.

Four solution routes are provided:

* :func:`solve_discrete` -- branch and bound over candidate subsets, with an
  inner branch and bound that allocates demand points covered by several open
  facilities.
* :func:`solve_continuous_fds` -- the planar problem reduced to a finite
  candidate set (demand points and pairwise circle intersections).
* :func:`solve_row_generation` -- facility-free master problem over point to
  slot assignments, with cluster-infeasibility cuts separated by 1-center
  computations.
* :func:`brute_force` -- exhaustive enumeration, used as the test oracle.

Every route relies on the objective being coordinatewise nondecreasing in the
coverage vector: crediting a facility with more demand than it can actually
receive gives a valid upper bound.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from fairmclp import geometry
from fairmclp.fairness import NEG_INF, FairnessSpec, fair_owa
from fairmclp.instance import Instance

log = logging.getLogger(__name__)

_EPS = 1e-12


class SolverError(RuntimeError):
    pass


class BruteForceCapError(SolverError):
    pass


class Status(str, Enum):
    OPTIMAL = "Optimal"
    FEASIBLE = "Feasible"
    DEGENERATE = "DegenerateMinusInfinity"


MODES = ("brute", "bb", "fds", "rowgen")


@dataclass
class SolveOptions:
    time_limit: float = 7200.0
    tol: float = 0.0
    mode: str = "bb"
    brute_cap: int = 10**7
    warm_start: str = "full"  # row generation initial cuts: full | pairs | none

    def __post_init__(self):
        if not self.time_limit > 0:
            raise ValueError("time_limit must be positive")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.warm_start not in ("full", "pairs", "none"):
            raise ValueError("warm_start must be full, pairs or none")


@dataclass
class CoverageSolution:
    """A located set of ``p`` facilities with its demand allocation.

    Slots are ordered by nondecreasing coverage ``W``; ``assignment[i]`` is the
    slot serving demand point ``i`` or ``None``.
    """

    positions: tuple[tuple[float, ...], ...]
    assignment: tuple[int | None, ...]
    W: tuple[float, ...]
    objective: float
    status: Status
    spec: FairnessSpec
    R: float
    space: str
    method: str
    instance_key: str
    facilities: tuple[int, ...] | None = None
    gap: float = 0.0
    witness: str | None = None
    stats: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return len(self.W)

    @property
    def total(self) -> float:
        return math.fsum(self.W)

    def clusters(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.p)]
        for i, k in enumerate(self.assignment):
            if k is not None:
                out[k].append(i)
        return out

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "objective": None if self.objective == NEG_INF else self.objective,
            "objective_is_minus_infinity": self.objective == NEG_INF,
            "W": list(self.W),
            "positions": [list(p) for p in self.positions],
            "facilities": None if self.facilities is None else list(self.facilities),
            "assignment": list(self.assignment),
            "gap": self.gap,
            "space": self.space,
            "method": self.method,
            "R": self.R,
            "spec": self.spec.to_json(),
            "instance": self.instance_key,
            "witness": self.witness,
        }


# -- comparisons on extended reals -------------------------------------------

def _improves(a: float, b: float) -> bool:
    if b == NEG_INF:
        return a > NEG_INF
    return a > b + _EPS * max(1.0, abs(b))


def _dominated(bound: float, best: float, tol: float = 0.0) -> bool:
    """True when a node with upper bound ``bound`` cannot beat ``best``."""
    if best == NEG_INF:
        return bound == NEG_INF
    return bound <= best + max(_EPS * max(1.0, abs(best)), tol * abs(best))


def _gap(ub: float, lb: float) -> float:
    if ub == lb:
        return 0.0
    if lb == NEG_INF:
        return math.inf
    if ub == NEG_INF:
        return 0.0
    return max(0.0, (ub - lb) / max(abs(ub), 1e-12))


# -- allocation branch and bound ---------------------------------------------

def _allocate_sets(allowed: Sequence[Sequence[int]], w: Sequence[float], p: int, spec: FairnessSpec,
                   cutoff: float | None = None, tol: float = 0.0):
    """Best allocation of points to facility slots.

    ``allowed[i]`` lists the slots able to serve point ``i``; every point with a
    nonempty list is assigned. Returns ``(value, W, assign)`` or ``None`` when
    no allocation improves on ``cutoff``.
    """
    W = [0.0] * p
    assign: list[int | None] = [None] * len(w)
    contested = []
    for i, slots in enumerate(allowed):
        if len(slots) == 1:
            W[slots[0]] += w[i]
            assign[i] = slots[0]
        elif len(slots) > 1:
            contested.append(i)
    contested.sort(key=lambda i: (-w[i], i))
    T = len(contested)
    # suffix[t][k]: weight of contested points t.. that slot k could still receive
    suffix = [[0.0] * p for _ in range(T + 1)]
    for t in range(T - 1, -1, -1):
        row = list(suffix[t + 1])
        i = contested[t]
        for k in allowed[i]:
            row[k] += w[i]
        suffix[t] = row

    best_val = NEG_INF if cutoff is None else cutoff
    best: list = [None, None]
    if cutoff is None:
        # greedy incumbent: each contested point to its currently poorest coverer
        gW = list(W)
        gA = list(assign)
        for i in contested:
            k = min(allowed[i], key=lambda s: (gW[s], s))
            gW[k] += w[i]
            gA[i] = k
        best_val = fair_owa(gW, spec)
        best[0], best[1] = gW, gA
        if T == 0:
            return best_val, gW, gA
    elif T == 0:
        val = fair_owa(W, spec)
        return (val, W, assign) if _improves(val, cutoff) else None

    cur = list(W)
    choice = list(assign)

    def rec(t: int):
        nonlocal best_val
        if t == T:
            val = fair_owa(cur, spec)
            if _improves(val, best_val):
                best_val = val
                best[0], best[1] = list(cur), list(choice)
            return
        ub = fair_owa([cur[k] + suffix[t][k] for k in range(p)], spec)
        if _dominated(ub, best_val, tol):
            return
        i = contested[t]
        for k in allowed[i]:
            old = cur[k]
            cur[k] = old + w[i]
            choice[i] = k
            rec(t + 1)
            cur[k] = old
        choice[i] = None

    if T:
        rec(0)
    if best[0] is None:
        return None
    return best_val, best[0], best[1]


def _order_slots(Wraw: Sequence[float]) -> list[int]:
    return sorted(range(len(Wraw)), key=lambda k: (Wraw[k], k))


def _make_solution(instance: Instance, spec: FairnessSpec, R: float, space: str, method: str,
                   positions, Wraw, assign_raw, facilities=None, status=Status.OPTIMAL, gap=0.0,
                   witness=None, stats=None) -> CoverageSolution:
    # slot totals are recomputed from the assignment so W and assignment always agree
    Wraw = [math.fsum(instance.weights[i] for i, a in enumerate(assign_raw) if a == k)
            for k in range(len(Wraw))]
    order = _order_slots(Wraw)
    rank = {k: r for r, k in enumerate(order)}
    W = tuple(Wraw[k] for k in order)
    assignment = tuple(None if a is None else rank[a] for a in assign_raw)
    obj = fair_owa(W, spec)
    if obj == NEG_INF and status == Status.OPTIMAL:
        status = Status.DEGENERATE
        if witness is None:
            witness = _degenerate_witness(W)
    return CoverageSolution(
        positions=tuple(tuple(float(c) for c in positions[k]) for k in order),
        assignment=assignment,
        W=W,
        objective=obj,
        status=status,
        spec=spec,
        R=float(R),
        space=space,
        method=method,
        instance_key=instance.digest(),
        facilities=None if facilities is None else tuple(int(facilities[k]) for k in order),
        gap=0.0 if status == Status.OPTIMAL else gap,
        witness=witness,
        stats=stats or {},
    )


def _degenerate_witness(W) -> str:
    zeros = sum(1 for x in W if x == 0)
    return (f"every feasible solution leaves at least one facility without covered demand "
            f"({zeros} of {len(W)} slots are empty in the returned solution); with alpha >= 1 the "
            f"objective is -inf")


def allocate(open_facilities, instance: Instance, spec: FairnessSpec, R: float):
    """Optimal allocation of demand among fixed facilities.

    Returns ``(assignment, W, objective)`` where ``W[k]`` is the demand served by
    ``open_facilities[k]`` and ``assignment[i]`` indexes the serving facility.
    """
    sites = np.asarray(open_facilities, dtype=float).reshape(len(open_facilities), -1)
    if len(sites) != spec.p:
        raise ValueError(f"{len(sites)} facilities given for a spec with p={spec.p}")
    cov = geometry.coverage_matrix(sites, instance.coords, R, instance.norm)
    allowed = [list(np.flatnonzero(cov[:, i])) for i in range(instance.n)]
    val, W, assign = _allocate_sets(allowed, instance.weights, spec.p, spec)
    return tuple(assign), tuple(W), val


# -- discrete branch and bound ------------------------------------------------

def _select_bb(cov: np.ndarray, w: Sequence[float], p: int, spec: FairnessSpec, opts: SolveOptions,
               repeat: bool = False):
    """Branch and bound over facility selections (multisets when ``repeat``).

    Returns ``(value, selection, W, assign, ub, complete, stats)``.
    """
    m, n = cov.shape
    cw = [math.fsum(w[i] for i in np.flatnonzero(cov[j])) for j in range(m)]
    covers_of = [list(np.flatnonzero(cov[:, i])) for i in range(n)]
    # suffix_top[s]: coverage weights of candidates s.. sorted decreasingly
    suffix_top = [sorted(cw[s:], reverse=True) for s in range(m + 1)]
    deadline = time.monotonic() + opts.time_limit
    best_val = NEG_INF
    best: dict = {}
    open_ub = NEG_INF
    stats = {"nodes": 0, "leaves": 0}
    timed_out = False

    def leaf(chosen):
        nonlocal best_val
        stats["leaves"] += 1
        pos = {}
        for k, j in enumerate(chosen):
            pos.setdefault(j, []).append(k)
        allowed = [[k for j in covers_of[i] if j in pos for k in pos[j]] for i in range(n)]
        res = _allocate_sets(allowed, w, p, spec, cutoff=best_val if best else None, tol=opts.tol)
        if res is None:
            return
        val, W, assign = res
        if not best or _improves(val, best_val):
            best_val = val
            best.update(sel=tuple(chosen), W=W, assign=assign)

    def rec(start, chosen):
        nonlocal open_ub, timed_out
        stats["nodes"] += 1
        r = p - len(chosen)
        if r == 0:
            leaf(chosen)
            return
        top = suffix_top[start]
        if repeat:
            credit = [top[0]] * r if top else []
        else:
            credit = top[:r]
        if len(credit) < r:
            return
        ub = fair_owa([cw[j] for j in chosen] + credit, spec)
        if best and _dominated(ub, best_val, opts.tol):
            return
        if time.monotonic() > deadline:
            timed_out = True
            open_ub = max(open_ub, ub)
            return
        stop = m if repeat else m - r + 1
        for j in range(start, stop):
            chosen.append(j)
            rec(j if repeat else j + 1, chosen)
            chosen.pop()

    # starting incumbent: the best-covering sites, so a time-out still has a solution
    seed = sorted(range(m), key=lambda j: (-cw[j], j))[:p]
    if len(seed) < p and m:
        seed += [seed[0]] * (p - len(seed))
    if len(seed) == p:
        leaf(sorted(seed))
    rec(0, [])
    if not best:
        raise SolverError("no feasible selection found before the time limit")
    ub = max(best_val, open_ub)
    return best_val, best["sel"], best["W"], best["assign"], ub, not timed_out, stats


def _check_p(p: int, spec: FairnessSpec):
    if p != spec.p:
        raise ValueError(f"p={p} does not match the {spec.p} OWA weights")
    if p < 1:
        raise ValueError("p must be positive")


def solve_discrete(instance: Instance, spec: FairnessSpec, p: int, R: float,
                   opts: SolveOptions | None = None) -> CoverageSolution:
    """Optimal selection of ``p`` distinct candidate sites and their allocation."""
    opts = opts or SolveOptions()
    _check_p(p, spec)
    sites = instance.sites
    if p > len(sites):
        raise ValueError(f"p={p} exceeds the {len(sites)} candidate sites")
    if opts.mode == "brute":
        return brute_force(instance, spec, p, R, "disc", cap=opts.brute_cap)
    cov = geometry.coverage_matrix(sites, instance.coords, R, instance.norm)
    t0 = time.perf_counter()
    val, sel, W, assign, ub, complete, stats = _select_bb(cov, instance.weights, p, spec, opts)
    stats["seconds"] = time.perf_counter() - t0
    status = Status.OPTIMAL if complete else Status.FEASIBLE
    return _make_solution(instance, spec, R, "disc", "bb", [sites[j] for j in sel], W, assign,
                          facilities=sel, status=status, gap=_gap(ub, val), stats=stats)


# -- continuous problem: finite dominating set --------------------------------

def _maximal_masks(cov: np.ndarray) -> list[int]:
    """Indices of candidates whose coverage set is not contained in another's.

    Among candidates with identical coverage the first one is kept.
    """
    masks = [frozenset(np.flatnonzero(row)) for row in cov]
    keep = []
    seen = set()
    for j, mk in enumerate(masks):
        if mk in seen:
            continue
        seen.add(mk)
        keep.append(j)
    out = [j for j in keep if not any(masks[j] < masks[k] for k in keep if k != j)]
    return out or keep[:1]


def _saturate(instance: Instance, positions, assign, R: float):
    """Assign uncovered-by-allocation points that a located facility does cover."""
    cov = geometry.coverage_matrix(np.asarray(positions, dtype=float), instance.coords, R, instance.norm)
    assign = list(assign)
    for i, a in enumerate(assign):
        if a is None:
            ks = np.flatnonzero(cov[:, i])
            if len(ks):
                assign[i] = int(ks[0])
    W = [0.0] * len(positions)
    for i, a in enumerate(assign):
        if a is not None:
            W[a] += instance.weights[i]
    return W, assign


def _recenter(instance: Instance, positions, assign, R: float):
    """Move each facility to the 1-center of its cluster."""
    out = [tuple(p) for p in positions]
    for k in range(len(positions)):
        members = [i for i, a in enumerate(assign) if a == k]
        if members:
            res = geometry.one_center(instance.coords[members], instance.norm)
            out[k] = res.center
    return out


def _require_planar(instance: Instance):
    if instance.d != 2 or instance.norm.kind != "euclidean":
        raise geometry.UnsupportedNormError("continuous solvers require planar Euclidean instances")


def solve_continuous_fds(instance: Instance, spec: FairnessSpec, p: int, R: float,
                         opts: SolveOptions | None = None) -> CoverageSolution:
    """Planar problem solved over the finite dominating candidate set.

    Facilities may share a site (they are points of the plane), and only
    candidates with inclusion-maximal coverage sets are searched.
    """
    opts = opts or SolveOptions(mode="fds")
    _check_p(p, spec)
    _require_planar(instance)
    cands = geometry.candidate_locations(instance, R)
    cov = geometry.coverage_matrix(cands, instance.coords, R, instance.norm)
    keep = _maximal_masks(cov)
    t0 = time.perf_counter()
    val, sel, W, assign, ub, complete, stats = _select_bb(cov[keep], instance.weights, p, spec, opts,
                                                          repeat=True)
    chosen = [keep[j] for j in sel]
    positions = _recenter(instance, [cands[j] for j in chosen], assign, R)
    W, assign = _saturate(instance, positions, assign, R)
    stats.update(seconds=time.perf_counter() - t0, candidates=len(cands), maximal=len(keep))
    status = Status.OPTIMAL if complete else Status.FEASIBLE
    return _make_solution(instance, spec, R, "cont", "fds", positions, W, assign, facilities=chosen,
                          status=status, gap=_gap(ub, val), stats=stats)


# -- continuous problem: row generation --------------------------------------

def _master_bb(w: Sequence[float], p: int, spec: FairnessSpec, cuts: Sequence[tuple[int, ...]],
               deadline: float, tol: float = 0.0):
    """Best assignment of points to ``p`` interchangeable slots avoiding every cut set.

    Returns ``(value, slots, assign, ub, complete)`` where ``slots[k]`` is the
    member list of slot ``k``.
    """
    n = len(w)
    cuts_of: list[list[frozenset]] = [[] for _ in range(n)]
    for Q in cuts:
        fq = frozenset(Q)
        for i in Q:
            cuts_of[i].append(fq)
    order = sorted(range(n), key=lambda i: (-w[i], i))
    members: list[set] = [set() for _ in range(p)]
    Wc = [0.0] * p
    assign: list[int | None] = [None] * n

    def fits(i, k):
        mk = members[k]
        return all(not (Q - {i}) <= mk for Q in cuts_of[i])

    # greedy incumbent
    for i in order:
        ks = [k for k in range(p) if fits(i, k)]
        if ks:
            k = min(ks, key=lambda s: (Wc[s], s))
            members[k].add(i)
            Wc[k] += w[i]
            assign[i] = k
    best_val = fair_owa(Wc, spec)
    best = ([sorted(mk) for mk in members], list(assign))
    members = [set() for _ in range(p)]
    Wc = [0.0] * p
    assign = [None] * n
    open_ub = NEG_INF
    timed_out = False
    counter = [0]

    def bound(t):
        credit = list(Wc)
        for i in order[t:]:
            for k in range(p):
                if fits(i, k):
                    credit[k] += w[i]
        return fair_owa(credit, spec)

    def rec(t):
        nonlocal best_val, best, open_ub, timed_out
        if t == n:
            val = fair_owa(Wc, spec)
            if _improves(val, best_val):
                best_val = val
                best = ([sorted(mk) for mk in members], list(assign))
            return
        ub = bound(t)
        if _dominated(ub, best_val, tol):
            return
        counter[0] += 1
        if counter[0] % 256 == 0 and time.monotonic() > deadline:
            timed_out = True
        if timed_out:
            open_ub = max(open_ub, ub)
            return
        i = order[t]
        first_empty_done = False
        for k in range(p):
            if not members[k]:
                if first_empty_done:
                    continue
                first_empty_done = True
            if not fits(i, k):
                continue
            members[k].add(i)
            old = Wc[k]
            Wc[k] = old + w[i]
            assign[i] = k
            rec(t + 1)
            members[k].discard(i)
            Wc[k] = old
            assign[i] = None
        rec(t + 1)

    rec(0)
    return best_val, best[0], best[1], max(best_val, open_ub), not timed_out


@dataclass
class CutEvent:
    cluster: tuple[int, ...]
    slot: int
    incumbent: tuple[int | None, ...]
    round: int


def solve_row_generation(instance: Instance, spec: FairnessSpec, p: int, R: float,
                         opts: SolveOptions | None = None) -> CoverageSolution:
    """Planar problem solved by cluster-cut row generation.

    The master assigns points to slots subject to the accumulated
    incompatibility cuts; every slot of the master optimum is checked with a
    1-center computation and an infeasible cluster ``Q`` yields the cut
    ``sum_{i in Q} x_ik <= |Q| - 1`` for every slot ``k``.
    """
    opts = opts or SolveOptions(mode="rowgen")
    _check_p(p, spec)
    _require_planar(instance)
    t0 = time.perf_counter()
    deadline = time.monotonic() + opts.time_limit
    if opts.warm_start == "full":
        cuts = geometry.incompatible_sets(instance, R)
    elif opts.warm_start == "pairs":
        cuts = geometry.incompatible_sets(instance, R, size=2)
    else:
        cuts = []
    warm = len(cuts)
    events: list[CutEvent] = []
    w = instance.weights
    rnd = 0
    while True:
        val, slots, assign, ub, complete = _master_bb(w, p, spec, cuts, deadline, opts.tol)
        new = []
        for k, Q in enumerate(slots):
            if len(Q) > 1 and not geometry.cluster_feasible(Q, instance, R):
                new.append((tuple(Q), k))
        if not new or not complete:
            break
        for Q, k in new:
            events.append(CutEvent(Q, k, tuple(assign), rnd))
            cuts.append(Q)
        rnd += 1
    status = Status.OPTIMAL
    if new or not complete:
        # time limit: repair infeasible clusters by dropping their lightest points
        status = Status.FEASIBLE
        for k, Q in enumerate(slots):
            Q = sorted(Q, key=lambda i: (-w[i], i))
            while len(Q) > 1 and not geometry.cluster_feasible(Q, instance, R):
                drop = Q.pop()
                assign[drop] = None
            slots[k] = sorted(Q)
    positions = []
    for Q in slots:
        if Q:
            positions.append(geometry.one_center(instance.coords[Q], instance.norm).center)
        else:
            positions.append(tuple(instance.points[0]))
    W, assign = _saturate(instance, positions, assign, R)
    stats = {"rounds": rnd, "warm_cuts": warm, "cuts_added": len(events), "events": events,
             "seconds": time.perf_counter() - t0}
    lb = fair_owa(W, spec)
    return _make_solution(instance, spec, R, "cont", "rowgen", positions, W, assign, status=status,
                          gap=_gap(ub, lb), stats=stats)


# -- brute force --------------------------------------------------------------

def evaluate_batch(Wrows: np.ndarray, spec: FairnessSpec) -> np.ndarray:
    """Fair-operator values of many coverage vectors (one per row) at once."""
    Ws = np.sort(np.asarray(Wrows, dtype=float), axis=1)
    lam = np.asarray(spec.weights.lam)
    alpha = spec.alpha
    if alpha == 0:
        return Ws @ lam
    zero = Ws[:, 0] <= 0
    out = np.full(len(Ws), NEG_INF)
    pos = ~zero if alpha >= 1 else np.ones(len(Ws), dtype=bool)
    sub = Ws[pos]
    nz = lam > 0
    if alpha == 1:
        out[pos] = np.log(sub[:, nz]) @ lam[nz]
    else:
        e = float(1 - alpha)
        out[pos] = (sub[:, nz] ** e) @ lam[nz] / e
    return out


def _enumerate_space(instance: Instance, p: int, R: float, space: str):
    if space == "disc":
        sites = instance.sites
        cov = geometry.coverage_matrix(sites, instance.coords, R, instance.norm)
        subsets = itertools.combinations(range(len(sites)), p)
        return sites, cov, subsets
    if space == "cont":
        _require_planar(instance)
        cands = geometry.candidate_locations(instance, R)
        cov = geometry.coverage_matrix(cands, instance.coords, R, instance.norm)
        uniq = []
        seen = set()
        for j, row in enumerate(cov):
            key = row.tobytes()
            if key not in seen:
                seen.add(key)
                uniq.append(j)
        sites = [cands[j] for j in uniq]
        cov = cov[uniq]
        return sites, cov, itertools.combinations_with_replacement(range(len(sites)), p)
    raise ValueError(f"unknown space {space!r}")


def coverage_vectors(instance: Instance, p: int, R: float, space: str = "disc", cap: int = 10**7):
    """Yield ``(subset, choices, Wmatrix)`` for every facility subset.

    ``Wmatrix`` holds one row per allocation of the covered points among the
    subset's facilities (rows are in slot order of ``subset``).
    """
    sites, cov, subsets = _enumerate_space(instance, p, R, space)
    subsets = list(subsets)
    w = np.asarray(instance.weights)
    total = 0
    plans = []
    for S in subsets:
        sub = cov[list(S)]
        counts = sub.sum(axis=0)
        states = int(np.prod(np.maximum(counts, 1), dtype=float))
        total += states
        if total > cap:
            raise BruteForceCapError(f"enumeration exceeds the cap of {cap} states")
        plans.append((S, sub))
    for S, sub in plans:
        pts = [i for i in range(instance.n) if sub[:, i].any()]
        options = [np.flatnonzero(sub[:, i]) for i in pts]
        if pts:
            grids = np.meshgrid(*[np.arange(len(o)) for o in options], indexing="ij")
            choice = np.stack([g.reshape(-1) for g in grids], axis=1)
        else:
            choice = np.zeros((1, 0), dtype=int)
        Wm = np.zeros((len(choice), p))
        rows = np.arange(len(choice))
        for t, i in enumerate(pts):
            np.add.at(Wm, (rows, options[t][choice[:, t]]), w[i])
        yield S, (pts, options, choice), Wm, sites


def brute_force(instance: Instance, spec: FairnessSpec, p: int, R: float, space: str = "disc",
                cap: int = 10**7) -> CoverageSolution:
    """Exhaustive optimum over facility subsets and allocations.

    ``space="disc"`` enumerates distinct candidate sites; ``space="cont"``
    enumerates multisets of planar candidate locations.
    """
    _check_p(p, spec)
    if space == "disc" and p > instance.m:
        raise ValueError(f"p={p} exceeds the {instance.m} candidate sites")
    best_val = NEG_INF
    best = None
    for S, (pts, options, choice), Wm, sites in coverage_vectors(instance, p, R, space, cap):
        vals = evaluate_batch(Wm, spec)
        r = int(np.argmax(vals))
        if best is None or _improves(float(vals[r]), best_val):
            best_val = float(vals[r])
            assign = [None] * instance.n
            for t, i in enumerate(pts):
                assign[i] = int(options[t][choice[r, t]])
            best = (S, list(Wm[r]), assign, sites)
    S, W, assign, sites = best
    positions = [sites[j] for j in S]
    if space == "cont":
        positions = _recenter(instance, positions, assign, R)
        W, assign = _saturate(instance, positions, assign, R)
    return _make_solution(instance, spec, R, space, "brute", positions, W, assign,
                          facilities=S if space == "disc" else None)


def solve(instance: Instance, spec: FairnessSpec, p: int, R: float, space: str = "disc",
          opts: SolveOptions | None = None) -> CoverageSolution:
    """Dispatch on ``space`` (``disc``/``cont``) and ``opts.mode``."""
    opts = opts or SolveOptions()
    if space == "disc":
        if opts.mode in ("fds", "rowgen"):
            raise ValueError(f"mode {opts.mode} applies to the continuous space only")
        return solve_discrete(instance, spec, p, R, opts)
    if space == "cont":
        if opts.mode == "brute":
            return brute_force(instance, spec, p, R, "cont", cap=opts.brute_cap)
        if opts.mode == "rowgen":
            return solve_row_generation(instance, spec, p, R, opts)
        return solve_continuous_fds(instance, spec, p, R, opts)
    raise ValueError(f"unknown space {space!r}")
