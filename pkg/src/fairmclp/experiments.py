"""Instance files, random instances, the experiment grid and result summaries."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from fairmclp.fairness import FAMILIES, FairnessSpec, format_alpha, parse_alpha
from fairmclp.geometry import EUCLIDEAN, Norm
from fairmclp.instance import Instance
from fairmclp.metrics import Baselines, BaselineError, report
from fairmclp.solver import SolveOptions, Status, solve

log = logging.getLogger(__name__)

RESULT_FIELDS = ["instance", "n", "p", "R", "space", "family", "alpha", "status", "objective",
                 "coverage_pct", "W", "PoF", "PoE", "Gini", "cpu_seconds", "gap"]


class InstanceFormatError(ValueError):
    pass


class ConfigError(ValueError):
    pass


# -- instance files -----------------------------------------------------------------

def _header_for(d: int) -> list[str]:
    return ["x", "y", "w"] if d == 2 else [f"x{l + 1}" for l in range(d)] + ["w"]


def dumps_instance(instance: Instance) -> str:
    buf = io.StringIO()
    buf.write(",".join(_header_for(instance.d)) + "\n")
    for p, w in zip(instance.points, instance.weights):
        buf.write(",".join(repr(c) for c in p) + "," + repr(w) + "\n")
    return buf.getvalue()


def write_instance(instance: Instance, path) -> None:
    Path(path).write_bytes(dumps_instance(instance).encode("utf-8"))


def normalize_unit_square(points: np.ndarray) -> np.ndarray:
    """Min-max rescale every coordinate to ``[0, 1]``."""
    lo = points.min(axis=0)
    span = points.max(axis=0) - lo
    span[span == 0] = 1.0
    return (points - lo) / span


def loads_instance(text: str, name: str = "instance", n: int | None = None, normalize: bool = False,
                   norm: Norm = EUCLIDEAN) -> Instance:
    lines = text.splitlines()
    if not lines:
        raise InstanceFormatError(f"{name}:1:1: empty file")
    header = [h.strip().lower() for h in lines[0].split(",")]
    if header[-1] != "w" or len(header) < 2:
        raise InstanceFormatError(f"{name}:1:1: header must list coordinates then 'w', got {lines[0]!r}")
    d = len(header) - 1
    pts, ws = [], []
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != d + 1:
            raise InstanceFormatError(f"{name}:{lineno}:1: expected {d + 1} fields, found {len(cells)}")
        row = []
        col = 1
        for cell in cells:
            try:
                v = float(cell)
            except ValueError:
                raise InstanceFormatError(f"{name}:{lineno}:{col}: not a number: {cell.strip()!r}") from None
            if not math.isfinite(v):
                raise InstanceFormatError(f"{name}:{lineno}:{col}: non-finite value")
            row.append(v)
            col += len(cell) + 1
        if row[-1] < 0:
            raise InstanceFormatError(f"{name}:{lineno}:{col - len(cells[-1]) - 1}: negative weight {row[-1]!r}")
        pts.append(row[:-1])
        ws.append(row[-1])
    if not pts:
        raise InstanceFormatError(f"{name}:2:1: no demand points")
    if n is not None:
        if n > len(pts):
            raise InstanceFormatError(f"{name}: asked for {n} points, file has {len(pts)}")
        pts, ws = pts[:n], ws[:n]
    arr = np.array(pts, dtype=float)
    if normalize and (arr.min() < 0 or arr.max() > 1):
        arr = normalize_unit_square(arr)
    return Instance.from_arrays(arr, ws, norm=norm, name=name)


def load_instance(path, n: int | None = None, normalize: bool = False, norm: Norm = EUCLIDEAN) -> Instance:
    """Read a ``x,y,w`` CSV instance, optionally keeping only its first ``n`` points."""
    path = Path(path)
    try:
        text = path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InstanceFormatError(f"{path}: not UTF-8 ({exc})") from None
    return loads_instance(text, name=path.stem, n=n, normalize=normalize, norm=norm)


def gen_instance(n: int, d: int = 2, seed: int = 0, name: str | None = None) -> Instance:
    """Uniform points in the unit cube with weights uniform on the open interval (0, 1)."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 1.0, size=(n, d))
    w = rng.uniform(0.0, 1.0, size=n)
    while np.any(w == 0.0):
        w[w == 0.0] = rng.uniform(0.0, 1.0, size=int(np.sum(w == 0.0)))
    return Instance.from_arrays(pts, w, name=name or f"rand_n{n}_d{d}_s{seed}")


# -- experiment grid ----------------------------------------------------------------

@dataclass
class ExperimentGrid:
    n_values: list[int]
    p_values: list[int]
    R_values: list[float]
    families: list[str] = field(default_factory=lambda: list(FAMILIES))
    alpha_values: list[Fraction] = field(default_factory=lambda: [Fraction(0), Fraction(1, 2), Fraction(1),
                                                                    Fraction(2)])
    spaces: list[str] = field(default_factory=lambda: ["disc", "cont"])
    time_limit: float = 7200.0
    seed: int = 0
    cont_mode: str = "fds"
    disc_mode: str = "bb"
    workers: int = 1
    instance: str | None = None
    k: int | None = None
    beta_mix: Fraction | None = None

    def __post_init__(self):
        for key in ("n_values", "p_values", "R_values", "families", "alpha_values", "spaces"):
            if not getattr(self, key):
                raise ConfigError(f"{key} must be nonempty")
        bad = set(self.families) - set(FAMILIES)
        if bad:
            raise ConfigError(f"unknown families {sorted(bad)}")
        bad = set(self.spaces) - {"disc", "cont"}
        if bad:
            raise ConfigError(f"unknown spaces {sorted(bad)}")

    def combinations(self):
        for n in self.n_values:
            for p in self.p_values:
                for R in self.R_values:
                    for space in self.spaces:
                        yield n, p, R, space

    def spec_cells(self):
        """(family, alpha) pairs; the minimum family is paired with alpha = 0 only."""
        out = []
        for fam in self.families:
            if fam == "C":
                out.append(("C", Fraction(0)))
            else:
                out.extend((fam, a) for a in self.alpha_values)
        return out

    def cells(self):
        for combo in self.combinations():
            for fam, a in self.spec_cells():
                yield (*combo, fam, a)

    def cell_count(self) -> int:
        return len(list(self.combinations())) * len(self.spec_cells())

    def spec_params(self, fam: str) -> dict:
        if fam == "K" and self.k is not None:
            return {"k": self.k}
        if fam == "D" and self.beta_mix is not None:
            return {"beta_mix": self.beta_mix}
        return {}


_LIST_KEYS = {"n": "n_values", "p": "p_values", "R": "R_values", "families": "families",
              "alpha": "alpha_values", "spaces": "spaces"}


def parse_grid_config(text: str) -> ExperimentGrid:
    """Parse ``key = value[, value...]`` lines (``#`` starts a comment)."""
    raw: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        value = value.strip().strip("[]")
        items = [v.strip().strip("'\"") for v in value.split(",") if v.strip()]
        try:
            if key in ("n", "p"):
                raw[_LIST_KEYS[key]] = [int(v) for v in items]
            elif key == "R":
                raw["R_values"] = [float(v) for v in items]
            elif key == "families":
                raw["families"] = [v.upper() for v in items]
            elif key == "alpha":
                raw["alpha_values"] = [parse_alpha(v) for v in items]
            elif key == "spaces":
                raw["spaces"] = [v.lower() for v in items]
            elif key in ("time_limit",):
                raw[key] = float(items[0])
            elif key in ("seed", "workers", "k"):
                raw[key] = int(items[0])
            elif key == "beta_mix":
                raw[key] = Fraction(items[0])
            elif key in ("cont_mode", "disc_mode", "instance"):
                raw[key] = items[0]
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except (ValueError, IndexError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    missing = [k for k in ("n_values", "p_values", "R_values") if k not in raw]
    if missing:
        raise ConfigError(f"missing keys: {', '.join(missing)}")
    return ExperimentGrid(**raw)


def load_grid_config(path) -> ExperimentGrid:
    return parse_grid_config(Path(path).read_text(encoding="utf-8"))


def full_scale_grid() -> ExperimentGrid:
    """Sizes 45 to 179, four facility counts and two radii over every family (cell accounting)."""
    return ExperimentGrid(n_values=[45, 90, 120, 179], p_values=[5, 10, 15, 20], R_values=[0.1, 0.15])


# -- running ------------------------------------------------------------------------

def _fmt_float(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return repr(float(x))


def _solve_cell(args):
    instance, n, p, R, space, fam, alpha, params, opts = args
    sub = instance.head(n)
    t0 = time.perf_counter()
    try:
        spec = FairnessSpec.of(fam, p, alpha, **params)
        sol = solve(sub, spec, p, R, space, opts)
        return sol, time.perf_counter() - t0, None
    except Exception as exc:  # recorded in the row, never aborts the grid
        return None, time.perf_counter() - t0, f"{type(exc).__name__}: {exc}"


def _workers(grid: ExperimentGrid) -> int:
    env = os.environ.get("FMCLP_THREADS")
    if env:
        return max(1, int(env))
    return max(1, grid.workers)


def run_grid(grid: ExperimentGrid, instance: Instance | None, out_path=None) -> list[dict]:
    """Solve every grid cell and write one result row per cell.

    Baselines for PoF / PoE are the exact optima of the average (alpha = 0) and
    minimum families on the same (n, p, R, space); they are solved even when
    those families are not part of the grid.
    """
    if instance is None:
        instance = gen_instance(max(grid.n_values), 2, grid.seed)
    if max(grid.n_values) > instance.n:
        raise ConfigError(f"grid needs {max(grid.n_values)} points, instance has {instance.n}")
    opts = {s: SolveOptions(time_limit=grid.time_limit, mode=grid.disc_mode if s == "disc" else grid.cont_mode)
            for s in ("disc", "cont")}
    tasks = []
    keys = []
    for n, p, R, space in grid.combinations():
        wanted = grid.spec_cells()
        extra = [c for c in (("W", Fraction(0)), ("C", Fraction(0))) if c not in wanted]
        for fam, a in wanted + extra:
            keys.append((n, p, R, space, fam, a, (fam, a) in extra))
            tasks.append((instance, n, p, R, space, fam, a, grid.spec_params(fam), opts[space]))
    nw = _workers(grid)
    if nw > 1:
        with ProcessPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(_solve_cell, tasks))
    else:
        results = [_solve_cell(t) for t in tasks]
    solved = dict(zip([k[:6] for k in keys], results))
    rows = []
    for key, (sol, secs, err) in zip(keys, results):
        n, p, R, space, fam, a, hidden = key
        if hidden:
            continue
        row = {"instance": instance.name, "n": n, "p": p, "R": R, "space": space, "family": fam,
               "alpha": format_alpha(a), "status": "", "objective": None, "coverage_pct": None, "W": "",
               "PoF": None, "PoE": None, "Gini": None, "cpu_seconds": secs, "gap": None}
        if sol is None:
            row["status"] = f"Error: {err}"
            rows.append(row)
            continue
        row.update(status=sol.status.value, objective=sol.objective, gap=sol.gap,
                   W=" ".join(repr(x) for x in sol.W))
        base_s = solved[(n, p, R, space, "W", Fraction(0))][0]
        base_m = solved[(n, p, R, space, "C", Fraction(0))][0]
        try:
            if base_s is None or base_m is None:
                raise BaselineError("a baseline failed to solve")
            rep = report(sol, instance.head(n), Baselines.from_solutions(base_s, base_m))
            row.update(coverage_pct=rep.coverage_pct, PoF=rep.pof, PoE=rep.poe, Gini=rep.gini)
        except BaselineError as exc:
            row["status"] += f" (metrics refused: {exc})"
        rows.append(row)
    if out_path is not None:
        write_results(rows, out_path)
        meta = {"seed": grid.seed, "instance": instance.name, "instance_digest": instance.digest(),
                "k": grid.k if grid.k is not None else "ceil(p/2)",
                "beta_mix": str(grid.beta_mix) if grid.beta_mix is not None else "1/2",
                "time_limit": grid.time_limit, "cont_mode": grid.cont_mode, "disc_mode": grid.disc_mode,
                "cells": len(rows)}
        Path(str(out_path) + ".meta.json").write_text(json.dumps(meta, indent=1) + "\n")
    return rows


def write_results(rows: list[dict], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(RESULT_FIELDS)
        for r in rows:
            wr.writerow([_cell(r[k]) for k in RESULT_FIELDS])


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return _fmt_float(v)
    return str(v)


def read_results(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        rd = csv.DictReader(fh)
        if rd.fieldnames != RESULT_FIELDS:
            raise ConfigError(f"result schema mismatch: {rd.fieldnames}")
        return list(rd)


# -- summaries ---------------------------------------------------------------------

GAP_BUCKETS = ("GAP0", "GAP1", "GAP5", "GAP+")


def gap_bucket(status: str, gap: str | float | None) -> str:
    if status == Status.OPTIMAL.value or status == Status.DEGENERATE.value:
        return "GAP0"
    try:
        g = float(gap)
    except (TypeError, ValueError):
        return "GAP+"
    if g <= 0:
        return "GAP0"
    if g <= 0.01:
        return "GAP1"
    if g <= 0.05:
        return "GAP5"
    return "GAP+"


def _mean(values) -> float | None:
    vals = [float(v) for v in values if v not in ("", None)]
    return math.fsum(vals) / len(vals) if vals else None


def summarize(rows: list[dict]) -> tuple[list[dict], list[dict]]:
    """Gap buckets per (n, p, space) and mean PoF / PoE / Gini per (space, family, alpha).

    Means use exactly rounded summation, so the output does not depend on row order.
    """
    gaps: dict[tuple, list[dict]] = {}
    fair: dict[tuple, list[dict]] = {}
    for r in rows:
        gaps.setdefault((int(r["n"]), int(r["p"]), r["space"]), []).append(r)
        fair.setdefault((r["space"], r["family"], str(parse_alpha(r["alpha"]))), []).append(r)
    gap_rows = []
    for (n, p, space) in sorted(gaps):
        group = gaps[(n, p, space)]
        counts = {b: 0 for b in GAP_BUCKETS}
        for r in group:
            counts[gap_bucket(r["status"], r["gap"])] += 1
        out = {"n": n, "p": p, "space": space, "count": len(group)}
        out.update({b: 100.0 * counts[b] / len(group) for b in GAP_BUCKETS})
        out["cpu_mean"] = _mean(r["cpu_seconds"] for r in group)
        gap_rows.append(out)
    fam_rows = []
    for key in sorted(fair, key=lambda k: (k[0], k[1], Fraction(k[2]))):
        group = fair[key]
        fam_rows.append({"space": key[0], "family": key[1], "alpha": key[2], "count": len(group),
                         "PoF": _mean(r["PoF"] for r in group), "PoE": _mean(r["PoE"] for r in group),
                         "Gini": _mean(r["Gini"] for r in group),
                         "coverage_pct": _mean(r["coverage_pct"] for r in group)})
    return gap_rows, fam_rows


def write_table(rows: list[dict], path) -> None:
    if not rows:
        Path(path).write_text("")
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        wr.writeheader()
        for r in rows:
            wr.writerow({k: _cell(v) for k, v in r.items()})
