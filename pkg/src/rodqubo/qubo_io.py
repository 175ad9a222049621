"""Serialisation of :class:`QuboProblem` (JSON, ``.qubo`` text) and pattern CSV."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable

from .polynomial import QuboProblem, VariableId, VariableKind

_KIND_PREFIX = {"aux": VariableKind.AUXILIARY, "A": VariableKind.DESIGN}


def qubo_to_dict(q: QuboProblem) -> dict:
    return {
        "dimension": q.dimension,
        "linear": [float(v) for v in q.linear],
        "quadratic": [[i, j, float(v)] for (i, j), v in q.quadratic.items()],
        "offset": q.offset,
        "variable_names": q.variable_names,
    }


def qubo_from_dict(data: dict) -> QuboProblem:
    try:
        n = int(data["dimension"])
        linear = [float(v) for v in data["linear"]]
        quadratic = {(int(i), int(j)): float(v) for i, j, v in data["quadratic"]}
        offset = float(data.get("offset", 0.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed QUBO document: {exc}") from exc
    names = data.get("variable_names")
    variables = None
    if names is not None:
        variables = [VariableId(i, _guess_kind(name), name) for i, name in enumerate(names)]
    return QuboProblem(n, linear, quadratic, offset, variables)


def _guess_kind(name: str) -> VariableKind:
    for prefix, kind in _KIND_PREFIX.items():
        if name.startswith(prefix) and name[len(prefix):len(prefix) + 1].isdigit():
            return kind
    return VariableKind.COEFFICIENT


def dumps_json(q: QuboProblem) -> str:
    return json.dumps(qubo_to_dict(q), indent=2) + "\n"


def dumps_qubo_text(q: QuboProblem) -> str:
    """Render in the qbsolv ``.qubo`` layout.

    The offset is not part of that format and is carried in a ``c`` comment
    line, which readers of the format skip.
    """
    diag = [(i, float(v)) for i, v in enumerate(q.linear) if v]
    lines = [
        "c rodqubo export",
        f"c offset {q.offset!r}",
        f"p qubo 0 {q.dimension} {len(diag)} {len(q.quadratic)}",
    ]
    lines += [f"{i} {i} {v!r}" for i, v in diag]
    lines += [f"{i} {j} {float(v)!r}" for (i, j), v in q.quadratic.items()]
    return "\n".join(lines) + "\n"


def loads_qubo_text(text: str) -> QuboProblem:
    offset = 0.0
    header = None
    linear: dict[int, float] = {}
    quadratic: dict[tuple[int, int], float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "c":
            if len(parts) == 3 and parts[1] == "offset":
                offset = float(parts[2])
            continue
        if parts[0] == "p":
            if len(parts) != 6 or parts[1] != "qubo":
                raise ValueError(f"line {lineno}: bad header {raw!r}")
            header = [int(v) for v in parts[3:]]
            continue
        if header is None:
            raise ValueError(f"line {lineno}: data before 'p qubo' header")
        i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
        if i == j:
            linear[i] = v
        else:
            quadratic[(i, j)] = v
    if header is None:
        raise ValueError("missing 'p qubo' header")
    n, n_diag, n_elem = header
    if len(linear) != n_diag or len(quadratic) != n_elem:
        raise ValueError("entry counts disagree with header")
    lin = [linear.get(i, 0.0) for i in range(n)]
    return QuboProblem(n, lin, quadratic, offset)


def dumps_pattern_csv(pattern: Iterable[tuple[int, int]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["i", "j"])
    writer.writerows(pattern)
    return buf.getvalue()


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
