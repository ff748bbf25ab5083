"""Text formats: matrix/plant files, per-gamma records, trade-off CSV and
sparsity-pattern pictures.

Matrix files are UTF-8 text made of stanzas::

    # comment
    matrix A 2 2
    0 1
    -2 0

Blank lines and everything after ``#`` are ignored. Numbers are written
with ``repr`` so that every file round-trips to the same ``float64``
values.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import PlantFileError
from .model import Plant

PLANT_MATRICES = ("A", "B1", "B2", "Q", "R")
CSV_COLUMNS = ("gamma", "nnz", "nnz_ratio", "nnz_blocks", "J_identified", "J_polished",
               "dJ_percent", "admm_iters", "status")


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _tokens(text):
    """Yield ``(lineno, [(col, token), ...])`` for non-blank lines."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = []
        col = 0
        for part in line.split():
            col = line.index(part, col)
            toks.append((col + 1, part))
            col += len(part)
        if toks:
            yield lineno, toks


def parse_matrices(text: str) -> dict[str, np.ndarray]:
    """Parse every ``matrix NAME ROWS COLS`` stanza in ``text``."""
    out: dict[str, np.ndarray] = {}
    lines = list(_tokens(text))
    i = 0
    while i < len(lines):
        lineno, toks = lines[i]
        col, head = toks[0]
        if head != "matrix":
            raise PlantFileError(f"expected 'matrix', found {head!r}", lineno, col)
        if len(toks) != 4:
            raise PlantFileError("stanza header must be 'matrix NAME ROWS COLS'", lineno, col)
        name = toks[1][1]
        try:
            rows, cols = int(toks[2][1]), int(toks[3][1])
        except ValueError:
            raise PlantFileError("matrix dimensions must be integers", lineno, toks[2][0]) from None
        if rows < 0 or cols < 0:
            raise PlantFileError("matrix dimensions must be nonnegative", lineno, toks[2][0])
        if name in out:
            raise PlantFileError(f"matrix {name} defined twice", lineno, toks[1][0])
        M = np.zeros((rows, cols))
        for r in range(rows):
            i += 1
            if i >= len(lines):
                raise PlantFileError(
                    f"matrix {name}: expected {rows} rows, file ended after {r}",
                    len(text.splitlines()) + 1)
            ln, row = lines[i]
            if len(row) != cols:
                raise PlantFileError(
                    f"matrix {name}: row {r + 1} has {len(row)} entries, expected {cols}",
                    ln, row[0][0])
            for c, (cc, tok) in enumerate(row):
                try:
                    v = float(tok)
                except ValueError:
                    raise PlantFileError(f"not a number: {tok!r}", ln, cc) from None
                if not math.isfinite(v):
                    raise PlantFileError(f"non-finite entry {tok!r}", ln, cc)
                M[r, c] = v
        out[name] = M
        i += 1
    return out


def format_matrix(name: str, M) -> str:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    lines = [f"matrix {name} {M.shape[0]} {M.shape[1]}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in M]
    return "\n".join(lines) + "\n"


def format_matrices(mats: dict, header: str = "") -> str:
    parts = [f"# {ln}\n" for ln in header.splitlines()] if header else []
    parts += [format_matrix(k, v) for k, v in mats.items()]
    return "".join(parts)


def read_plant(path) -> Plant:
    text = Path(path).read_text(encoding="utf-8")
    return parse_plant(text)


def parse_plant(text: str) -> Plant:
    mats = parse_matrices(text)
    missing = [k for k in PLANT_MATRICES if k not in mats]
    if missing:
        raise PlantFileError(f"missing matrix {', '.join(missing)}")
    try:
        return Plant(*(mats[k] for k in PLANT_MATRICES))
    except ValueError as exc:
        raise PlantFileError(str(exc)) from None


def write_plant(path, plant: Plant, header: str = "") -> None:
    atomic_write(path, format_plant(plant, header))


def format_plant(plant: Plant, header: str = "") -> str:
    return format_matrices({k: getattr(plant, k) for k in PLANT_MATRICES}, header)


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else None


def record_to_dict(rec, nnz_base: int, J_c: float) -> dict:
    cert = None
    if rec.certificate is not None:
        cert = {k: _num(v) for k, v in rec.certificate._asdict().items()}
    return {
        "gamma": float(rec.gamma),
        "nnz": int(rec.nnz),
        "nnz_ratio": rec.nnz / nnz_base if nnz_base else None,
        "nnz_blocks": int(rec.nnz_blocks),
        "J_identified": _num(rec.J_identified),
        "J_polished": _num(rec.J_polished),
        "dJ_percent": _num(100.0 * (rec.J_polished - J_c) / J_c),
        "admm_iters": int(rec.admm_iters),
        "status": rec.status,
        "polish_status": rec.polish_status,
        "zero_tol": float(rec.zero_tol),
        "certificate": cert,
        "F_identified": np.asarray(rec.F_identified, dtype=float).tolist(),
        "F_polished": np.asarray(rec.F_polished, dtype=float).tolist(),
    }


def format_records(path_result) -> str:
    base = path_result.records[0]
    lines = [json.dumps(record_to_dict(r, base.nnz, path_result.J_c), sort_keys=True)
             for r in path_result.records]
    return "\n".join(lines) + "\n"


def read_records(path) -> list[dict]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            d = json.loads(line)
            d["F_identified"] = np.array(d["F_identified"], dtype=float)
            d["F_polished"] = np.array(d["F_polished"], dtype=float)
            out.append(d)
    return out


def format_tradeoff_csv(path_result) -> str:
    base = path_result.records[0]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in path_result.records:
        d = record_to_dict(r, base.nnz, path_result.J_c)
        w.writerow(["" if d[c] is None else (repr(d[c]) if isinstance(d[c], float) else d[c])
                    for c in CSV_COLUMNS])
    return buf.getvalue()


def format_pattern(mask, partition=None) -> str:
    """``X`` for nonzero entries and ``.`` for zeros; block boundaries are
    drawn with ``|`` between column blocks and a ``-`` rule between row
    blocks."""
    mask = np.asarray(mask).astype(bool)
    m, n = mask.shape
    col_breaks = set()
    row_breaks = set()
    if partition is not None:
        partition.check(mask.shape)
        col_breaks = set(np.cumsum(partition.col_sizes)[:-1].tolist())
        row_breaks = set(np.cumsum(partition.row_sizes)[:-1].tolist())
    lines = []
    for i in range(m):
        if i in row_breaks:
            lines.append("-" * (n + len(col_breaks)))
        chars = []
        for j in range(n):
            if j in col_breaks:
                chars.append("|")
            chars.append("X" if mask[i, j] else ".")
        lines.append("".join(chars))
    return "\n".join(lines) + "\n"
