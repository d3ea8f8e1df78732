"""Plain-text formats: adjacency files, CSV tables, JSON metric lines.

Files use 1-based node ids; the Python API is 0-based.

Matrix file::

    3
    0 0 0
    0.5 0 0
    0 1 0

row ``j`` holds ``adj[j, :]``.  Edge-list file::

    n=3
    1 2 0.5
    2 3 1

each line ``i j w`` is an edge from node ``i`` to node ``j``.
Blank lines and lines starting with ``#`` are ignored in both.
"""
from __future__ import annotations

import json
import os
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_text(path: str | os.PathLike, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _content_lines(text: str) -> list[str]:
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def parse_matrix_text(text: str) -> np.ndarray:
    lines = _content_lines(text)
    if not lines:
        raise ValidationError("matrix file is empty")
    head = lines[0].replace(" ", "")
    try:
        if head.startswith("n="):
            return _parse_edge_list(int(head[2:]), lines[1:])
        n = int(lines[0])
    except ValueError:
        raise ValidationError(f"bad header line {lines[0]!r}") from None
    if n < 1:
        raise ValidationError(f"node count must be positive, got {n}")
    if len(lines) - 1 != n:
        raise ValidationError(f"expected {n} matrix rows, found {len(lines) - 1}")
    rows = []
    for k, line in enumerate(lines[1:], start=1):
        parts = line.split()
        if len(parts) != n:
            raise ValidationError(f"row {k} has {len(parts)} entries, expected {n}")
        try:
            rows.append([float(v) for v in parts])
        except ValueError:
            raise ValidationError(f"row {k} contains a non-numeric entry: {line!r}") from None
    return np.array(rows)


def _parse_edge_list(n: int, lines: list[str]) -> np.ndarray:
    if n < 1:
        raise ValidationError(f"node count must be positive, got {n}")
    adj = np.zeros((n, n))
    seen = set()
    for line in lines:
        parts = line.split()
        if len(parts) != 3:
            raise ValidationError(f"edge line must read 'i j w': {line!r}")
        try:
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ValidationError(f"bad edge line {line!r}") from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValidationError(f"edge {i}->{j} references a node outside 1..{n}")
        if (i, j) in seen:
            raise ValidationError(f"duplicate edge {i}->{j}")
        seen.add((i, j))
        adj[j - 1, i - 1] = w
    return adj


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix_text(fh.read())


def matrix_text(mat: np.ndarray) -> str:
    mat = np.asarray(mat, dtype=float)
    lines = [str(mat.shape[0])]
    lines.extend(" ".join(fmt(v) for v in row) for row in mat)
    return "\n".join(lines) + "\n"


def write_matrix(path: str | os.PathLike, mat: np.ndarray) -> None:
    write_text(path, matrix_text(mat))


def json_line(obj: dict) -> str:
    return json.dumps(obj, sort_keys=False, separators=(", ", ": "))
