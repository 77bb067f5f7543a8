"""Writer for the portable LP text format understood by mainstream solvers."""

from __future__ import annotations

import re
from pathlib import Path

from .problem import BINARY, EQUAL, GREATER_EQUAL, LESS_EQUAL, MilpProblem

_VALID_START = re.compile(r"^[A-Za-z_]")
_E_NUMBER = re.compile(r"^[eE][0-9.]")
_BAD_CHARS = re.compile(r"[^A-Za-z0-9_]")


def _sanitize_names(names: list[str], fallback: str) -> list[str]:
    seen: dict[str, int] = {}
    out = []
    for i, raw in enumerate(names):
        name = _BAD_CHARS.sub("_", raw) or f"{fallback}{i}"
        if not _VALID_START.match(name) or _E_NUMBER.match(name):
            name = "_" + name
        if name in seen:
            seen[name] += 1
            name = f"{name}__{seen[name]}"
        seen.setdefault(name, 0)
        out.append(name)
    return out


def _num(value: float) -> str:
    return f"{value:.17g}"


def _terms(coeffs: list[tuple[str, float]]) -> str:
    parts = []
    for name, value in coeffs:
        sign = "-" if value < 0 else "+"
        parts.append(f"{sign} {_num(abs(value))} {name}")
    if not parts:
        return ""
    first = parts[0]
    if first.startswith("+ "):
        first = first[2:]
    return " ".join([first] + parts[1:])


_SENSE_TEXT = {LESS_EQUAL: "<=", GREATER_EQUAL: ">=", EQUAL: "="}


def export_lp(problem: MilpProblem, path: str | Path) -> Path:
    """Write ``problem`` in LP text format; returns the path written.

    Variable and row names are sanitized to ``[A-Za-z0-9_]`` (uniqueness is
    preserved with numeric suffixes) and numbers carry 17 significant digits so
    a re-parse reproduces every coefficient exactly.
    """
    problem.audit()
    path = Path(path)
    var_names = _sanitize_names([v.name for v in problem.variables], "x")
    row_names = _sanitize_names([c.name for c in problem.constraints], "c")

    lines = [f"\\ {problem.name}", "Minimize"]
    objective = [(var_names[j], v.objective)
                 for j, v in enumerate(problem.variables) if v.objective != 0.0]
    lines.append(f" obj: {_terms(objective)}".rstrip())

    if problem.constraints:
        lines.append("Subject To")
        for row_name, con in zip(row_names, problem.constraints):
            terms = _terms([(var_names[j], v) for j, v in sorted(con.coeffs.items())])
            lines.append(f" {row_name}: {terms} {_SENSE_TEXT[con.sense]} {_num(con.rhs)}")

    bound_lines = []
    for j, var in enumerate(problem.variables):
        name = var_names[j]
        lo, hi = var.lower, var.upper
        if var.kind == BINARY and lo == 0.0 and hi == 1.0:
            continue
        if lo == 0.0 and hi == float("inf"):
            continue
        if lo == hi:
            bound_lines.append(f" {name} = {_num(lo)}")
        elif lo == float("-inf") and hi == float("inf"):
            bound_lines.append(f" {name} free")
        else:
            left = "-infinity" if lo == float("-inf") else _num(lo)
            right = "+infinity" if hi == float("inf") else _num(hi)
            bound_lines.append(f" {left} <= {name} <= {right}")
    if bound_lines:
        lines.append("Bounds")
        lines.extend(bound_lines)

    binaries = [var_names[j] for j in problem.binary_indices]
    if binaries:
        lines.append("Binary")
        for start in range(0, len(binaries), 8):
            lines.append(" " + " ".join(binaries[start:start + 8]))

    lines.append("End")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
