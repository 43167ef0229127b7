"""Text formats: base-matrix exponent grids, alist files, construction descriptors."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .fmat import BaseMatrix, BinaryMatrix
from .galois import make_field


class FormatError(ValueError):
    pass


# -- base matrices ---------------------------------------------------------

def format_base(matrix: BaseMatrix, block_size: int | None = None) -> str:
    """Header ``r m n`` (plus the block size when it is not q-1), then exponent rows."""
    head = [matrix.ctx.r, matrix.m, matrix.n]
    if block_size is not None and block_size != matrix.ctx.e:
        head.append(block_size)
    lines = [" ".join(map(str, head))]
    for row in matrix.exponents():
        lines.append(" ".join(str(int(k)) for k in row))
    return "\n".join(lines) + "\n"


def parse_base(text: str) -> tuple[BaseMatrix, int | None]:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise FormatError("empty base-matrix file")
    try:
        head = [int(x) for x in rows[0]]
        grid = [[int(x) for x in row] for row in rows[1:]]
    except ValueError as exc:
        raise FormatError(f"non-integer token: {exc}") from None
    if len(head) not in (3, 4):
        raise FormatError("header must be 'r m n' or 'r m n e'")
    r, m, n = head[:3]
    block = head[3] if len(head) == 4 else None
    if len(grid) != m or any(len(row) != n for row in grid):
        raise FormatError(f"expected {m} rows of {n} exponents")
    ctx = make_field(r)
    expo = np.array(grid, dtype=np.int64).reshape(m, n)
    if np.any((expo < -1) | (expo >= ctx.e)):
        raise FormatError(f"exponents must lie in [-1, {ctx.e - 1}]")
    return BaseMatrix.from_exponents(ctx, expo), block


def write_base(path, matrix: BaseMatrix, block_size: int | None = None):
    Path(path).write_text(format_base(matrix, block_size))


def read_base(path) -> tuple[BaseMatrix, int | None]:
    return parse_base(Path(path).read_text())


# -- alist -----------------------------------------------------------------

def format_alist(H: BinaryMatrix) -> str:
    """MacKay alist: ``N M``, max degrees, degree lists, then 1-indexed column and row lists."""
    dense = H.to_dense()
    m, n = dense.shape
    col_lists = [np.flatnonzero(dense[:, j]) + 1 for j in range(n)]
    row_lists = [np.flatnonzero(dense[i]) + 1 for i in range(m)]
    cw = [len(c) for c in col_lists]
    rw = [len(r) for r in row_lists]
    cmax = max(cw, default=0)
    rmax = max(rw, default=0)

    def padded(idx, width):
        # an all-zero list still gets one 0 so the line is not blank
        vals = list(map(int, idx)) + [0] * (max(width, 1) - len(idx))
        return " ".join(map(str, vals))

    lines = [f"{n} {m}", f"{cmax} {rmax}", " ".join(map(str, cw)), " ".join(map(str, rw))]
    lines += [padded(c, cmax) for c in col_lists]
    lines += [padded(r, rmax) for r in row_lists]
    return "\n".join(lines) + "\n"


def parse_alist(text: str) -> BinaryMatrix:
    try:
        rows = [[int(x) for x in ln.split()] for ln in text.splitlines() if ln.strip()]
    except ValueError as exc:
        raise FormatError(f"non-integer token: {exc}") from None
    if len(rows) < 4 or len(rows[0]) < 2:
        raise FormatError("alist needs at least four header lines")
    n, m = rows[0][:2]
    cw = rows[2]
    rw = rows[3]
    if len(cw) != n or len(rw) != m:
        raise FormatError("degree lists do not match the declared dimensions")
    if sum(cw) != sum(rw):
        raise FormatError("column and row degree totals differ")
    if len(rows) < 4 + n:
        raise FormatError("missing column lists")
    dense = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        idx = [i for i in rows[4 + j] if i > 0]
        if len(idx) != cw[j]:
            raise FormatError(f"column {j + 1} lists {len(idx)} checks, degree says {cw[j]}")
        dense[np.array(idx, dtype=np.int64) - 1, j] = 1
    if len(rows) >= 4 + n + m:
        for i in range(m):
            idx = [j for j in rows[4 + n + i] if j > 0]
            if len(idx) != rw[i] or np.any(dense[i, np.array(idx, dtype=np.int64) - 1] != 1):
                raise FormatError(f"row {i + 1} disagrees with the column lists")
    return BinaryMatrix.from_dense(dense)


def write_alist(path, H: BinaryMatrix):
    Path(path).write_text(format_alist(H))


def read_alist(path) -> BinaryMatrix:
    return parse_alist(Path(path).read_text())


# -- construction descriptors ------------------------------------------------

def _value(raw: str):
    raw = raw.strip()
    low = raw.lower()
    if low in ("true", "yes"):
        return True
    if low in ("false", "no"):
        return False
    if "," in raw:
        return [_value(x) for x in raw.split(",") if x.strip()]
    for conv in (int, float):
        try:
            return conv(raw)
        except ValueError:
            pass
    if raw.startswith("0b") or raw.startswith("0x"):
        return int(raw, 0)
    return raw


def parse_descriptor(text: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; comma-separated values become lists."""
    out: dict = {}
    for num, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"line {num}: expected 'key = value'")
        key, raw = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if not key:
            raise FormatError(f"line {num}: empty key")
        out[key] = _value(raw)
    if "family" not in out:
        raise FormatError("descriptor must name a family")
    return out


def format_descriptor(desc: dict) -> str:
    lines = []
    for key, val in desc.items():
        if isinstance(val, (list, tuple)):
            val = ",".join(str(v) for v in val)
        lines.append(f"{key} = {val}")
    return "\n".join(lines) + "\n"


def read_descriptor(path) -> dict:
    return parse_descriptor(Path(path).read_text())
