"""LP-file text for cone-free models, and a reader for the same subset.

Grammar written (and accepted by :func:`read_lp`)::

    \\ comment lines
    Maximize
     obj: <term> [+|- <term>]* [+|- <constant>]
    Subject To
     <name>: <term> [+|- <term>]* (<=|>=|=) <number>
    Bounds
     <lb> <= <var> <= <ub>  |  <var> free  |  -inf <= <var> <= <ub>
    Binary
     <var> ...
    End

where ``<term>`` is ``[<number>] <var>``. Cut records are expanded into one
row per slot.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field


class LPParseError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def _fmt(c: float) -> str:
    return repr(float(c))


def _expr(terms) -> str:
    parts = []
    for j, (name, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = name if mag == 1.0 else f"{_fmt(mag)} {name}"
        if j == 0:
            parts.append(body if sign == "+" else f"- {body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


def write_lp(model) -> str:
    meta = model.meta
    lines = [f"\\ fair covering model, space={meta.get('space')}, p={meta.get('p')}, R={meta.get('R')}",
             "Maximize"]
    obj = _expr(model.objective.terms) or "0 " + model.vars[0].name
    if model.objective.const:
        c = model.objective.const
        obj += f" {'-' if c < 0 else '+'} {_fmt(abs(c))}"
    lines.append(f" obj: {obj}")
    lines.append("Subject To")
    for r in model.all_rows():
        lines.append(f" {r.name}: {_expr(r.terms)} {r.sense} {_fmt(r.rhs)}")
    lines.append("Bounds")
    for v in model.vars:
        if v.kind == "binary":
            continue
        if math.isinf(v.lb) and math.isinf(v.ub):
            lines.append(f" {v.name} free")
        else:
            lo = "-inf" if math.isinf(v.lb) else _fmt(v.lb)
            hi = "+inf" if math.isinf(v.ub) else _fmt(v.ub)
            lines.append(f" {lo} <= {v.name} <= {hi}")
    binaries = [v.name for v in model.vars if v.kind == "binary"]
    if binaries:
        lines.append("Binary")
        for j in range(0, len(binaries), 8):
            lines.append(" " + " ".join(binaries[j:j + 8]))
    lines.append("End")
    return "\n".join(lines) + "\n"


@dataclass
class LPModel:
    objective: dict[str, float] = field(default_factory=dict)
    objective_const: float = 0.0
    rows: dict[str, tuple[dict[str, float], str, float]] = field(default_factory=dict)
    bounds: dict[str, tuple[float, float]] = field(default_factory=dict)
    binaries: list[str] = field(default_factory=list)


def _num(tok: str) -> float:
    t = tok.lower().lstrip("+")
    if t in ("inf", "infinity"):
        return math.inf
    if t in ("-inf", "-infinity"):
        return -math.inf
    return float(tok)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][\w.]*)|(?P<op>[+-])|(?P<bad>\S))"
)


def _parse_expr(text: str, lineno: int) -> tuple[dict[str, float], float]:
    coefs: dict[str, float] = {}
    const = 0.0
    sign = 1.0
    coef = None
    for m in _TOKEN.finditer(text):
        if m.group("bad"):
            raise LPParseError(lineno, f"unexpected character {m.group('bad')!r}")
        if m.group("op"):
            if coef is not None:
                const += sign * coef
                coef = None
                sign = 1.0
            sign *= -1.0 if m.group("op") == "-" else 1.0
        elif m.group("num"):
            if coef is not None:
                raise LPParseError(lineno, "two numbers in a row")
            coef = float(m.group("num"))
        elif m.group("name"):
            c = sign * (1.0 if coef is None else coef)
            coefs[m.group("name")] = coefs.get(m.group("name"), 0.0) + c
            sign, coef = 1.0, None
    if coef is not None:
        const += sign * coef
    return coefs, const


def read_lp(text: str) -> LPModel:
    out = LPModel()
    section = None
    seen_end = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in ("maximize", "maximise", "max"):
            section = "obj"
            continue
        if key in ("subject to", "st", "s.t."):
            section = "rows"
            continue
        if key == "bounds":
            section = "bounds"
            continue
        if key in ("binary", "binaries", "bin"):
            section = "bin"
            continue
        if key == "end":
            seen_end = True
            section = None
            continue
        if section is None:
            raise LPParseError(lineno, f"text outside any section: {line!r}")
        if section == "obj":
            if ":" in line:
                line = line.split(":", 1)[1]
            coefs, const = _parse_expr(line, lineno)
            for k, v in coefs.items():
                out.objective[k] = out.objective.get(k, 0.0) + v
            out.objective_const += const
        elif section == "rows":
            if ":" not in line:
                raise LPParseError(lineno, "constraint without a name")
            name, body = line.split(":", 1)
            m = re.search(r"(<=|>=|=)", body)
            if not m:
                raise LPParseError(lineno, "constraint without a sense")
            coefs, const = _parse_expr(body[:m.start()], lineno)
            if const:
                raise LPParseError(lineno, "constant on the left-hand side")
            out.rows[name.strip()] = (coefs, m.group(1), _num(body[m.end():].strip()))
        elif section == "bounds":
            parts = line.split()
            if len(parts) == 2 and parts[1].lower() == "free":
                out.bounds[parts[0]] = (-math.inf, math.inf)
            elif len(parts) == 5 and parts[1] == "<=" and parts[3] == "<=":
                out.bounds[parts[2]] = (_num(parts[0]), _num(parts[4]))
            else:
                raise LPParseError(lineno, f"unsupported bound {line!r}")
        elif section == "bin":
            out.binaries.extend(line.split())
    if not seen_end:
        raise LPParseError(len(text.splitlines()), "missing End")
    return out
