"""Array dispersion of a base matrix into CPM/ZM blocks.

A nonzero entry alpha^k becomes the e x e circulant permutation matrix
whose top row has its single 1 at position k; a zero entry becomes the
e x e zero matrix.  The nonbinary variant uses alpha-multiplied CPMs,
where each row is the cyclic shift of the previous one times alpha.
Arrays are kept as a grid of shifts and only materialised on demand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fmat import BaseMatrix, BinaryMatrix
from .galois import FieldContext, FieldError

BINARY = "binary"
NONBINARY = "nonbinary"

DEFAULT_BUDGET_BYTES = 256 * 2**20


class BudgetExceeded(MemoryError):
    """Raised when materialising an array would exceed the memory budget."""


@dataclass(frozen=True, eq=False)
class DispersedArray:
    """m x n grid of block descriptors: shift k in [0, e) for a CPM, -1 for a ZM."""

    ctx: FieldContext
    shifts: np.ndarray
    e: int
    kind: str = BINARY

    def __post_init__(self):
        s = np.array(self.shifts, dtype=np.int64, copy=True)
        if s.ndim != 2:
            raise ValueError("shift grid must be two-dimensional")
        if np.any((s < -1) | (s >= self.e)):
            raise ValueError("CPM shifts must lie in [0, e) (or -1 for a zero block)")
        s.setflags(write=False)
        object.__setattr__(self, "shifts", s)

    @property
    def m(self) -> int:
        return self.shifts.shape[0]

    @property
    def n(self) -> int:
        return self.shifts.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m * self.e, self.n * self.e)

    def __eq__(self, other):
        return (
            isinstance(other, DispersedArray)
            and self.kind == other.kind
            and self.e == other.e
            and self.ctx == other.ctx
            and self.shifts.shape == other.shifts.shape
            and bool(np.all(self.shifts == other.shifts))
        )

    def column_weights(self) -> np.ndarray:
        """Weight of every expanded column (equal within a block column)."""
        return np.repeat((self.shifts >= 0).sum(axis=0), self.e)

    def row_weights(self) -> np.ndarray:
        return np.repeat((self.shifts >= 0).sum(axis=1), self.e)


@dataclass(frozen=True)
class MaskMatrix:
    bits: np.ndarray

    def __post_init__(self):
        z = np.array(self.bits, copy=True)
        if z.ndim != 2 or np.any((z != 0) & (z != 1)):
            raise ValueError("masking matrix must be a 2-D 0/1 array")
        z = z.astype(np.uint8)
        z.setflags(write=False)
        object.__setattr__(self, "bits", z)

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape


def _shifts(matrix: BaseMatrix, block_size: int | None) -> tuple[np.ndarray, int]:
    ctx = matrix.ctx
    e = ctx.e if block_size is None else int(block_size)
    if e < 1 or ctx.e % e:
        raise FieldError(f"block size {e} does not divide q-1 = {ctx.e}")
    expo = matrix.exponents()
    step = ctx.e // e
    nz = expo >= 0
    if np.any(expo[nz] % step):
        raise FieldError(f"entries are not in the order-{e} subgroup of GF(2^{ctx.r})*")
    return np.where(nz, expo // step, -1), e


def disperse(matrix: BaseMatrix, block_size: int | None = None) -> DispersedArray:
    """Binary e-fold array dispersion (block size defaults to q-1)."""
    shifts, e = _shifts(matrix, block_size)
    return DispersedArray(matrix.ctx, shifts, e, BINARY)


def disperse_alpha(matrix: BaseMatrix) -> DispersedArray:
    """Dispersion into alpha-multiplied CPMs of size q-1 (nonbinary array)."""
    shifts, e = _shifts(matrix, None)
    return DispersedArray(matrix.ctx, shifts, e, NONBINARY)


def apply_mask(matrix: BaseMatrix, mask: MaskMatrix) -> BaseMatrix:
    if mask.shape != matrix.shape:
        raise ValueError(f"mask shape {mask.shape} does not match base shape {matrix.shape}")
    return BaseMatrix(matrix.ctx, np.where(mask.bits == 1, matrix.values, 0))


def _check_budget(nbytes: int, budget: int | None):
    limit = DEFAULT_BUDGET_BYTES if budget is None else budget
    if nbytes > limit:
        raise BudgetExceeded(f"expansion needs {nbytes} bytes, budget is {limit}")


def expand(array: DispersedArray, budget: int | None = None):
    """Materialise the array: a BinaryMatrix, or an int matrix over GF(q) if nonbinary."""
    e = array.e
    rows, cols = array.shape
    if array.kind == BINARY:
        _check_budget(rows * (-(-cols // 64)) * 8 + rows * cols, budget)
        dense = np.zeros((rows, cols), dtype=np.uint8)
        _fill(dense, array, lambda idx: 1)
        return BinaryMatrix.from_dense(dense)
    _check_budget(rows * cols * 8, budget)
    dense = np.zeros((rows, cols), dtype=np.int64)
    # column c inside any block carries the value alpha^c
    col_values = array.ctx.antilog_table[np.arange(e)]
    _fill(dense, array, lambda idx: col_values[idx])
    return dense


def _fill(dense: np.ndarray, array: DispersedArray, value):
    e = array.e
    local = np.arange(e)
    for i, j in zip(*np.nonzero(array.shifts >= 0)):
        k = array.shifts[i, j]
        cols = (k + local) % e
        dense[i * e + local, j * e + cols] = value(cols)


def normalise_columns(ctx: FieldContext, dense: np.ndarray, e: int) -> np.ndarray:
    """Divide every column of an alpha-multiplied array by its column value."""
    inv = ctx.antilog_table[(-np.arange(e)) % ctx.e]
    scale = np.tile(inv, dense.shape[1] // e)
    return ctx.mul(dense, scale[None, :])


# -- Fourier-domain view (verification utility) ---------------------------

def gf_matmul(ctx: FieldContext, x, y) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    out = np.zeros((x.shape[0], y.shape[1]), dtype=np.int64)
    for k in range(x.shape[1]):
        out ^= ctx.mul(x[:, k][:, None], y[k][None, :])
    return out


def fourier_diagonal_blocks(ctx: FieldContext, h_dense, m: int, n: int) -> list[np.ndarray]:
    """Transform an m x n array of (q-1)-circulants and permute it block-diagonal.

    Computes Omega(m) H Omega^-1(n), regroups rows i, e+i, ... and columns
    j, e+j, ..., and returns the e diagonal m x n blocks.  Raises if any
    off-diagonal entry is nonzero.
    """
    e = ctx.e
    h = np.asarray(h_dense, dtype=np.int64)
    idx = np.arange(e)
    v = ctx.antilog_table[(-np.outer(idx, idx)) % e]
    v_inv = ctx.antilog_table[np.outer(idx, idx) % e]
    hf = np.zeros_like(h)
    for i in range(m):
        for j in range(n):
            blk = h[i * e:(i + 1) * e, j * e:(j + 1) * e]
            if blk.any():
                hf[i * e:(i + 1) * e, j * e:(j + 1) * e] = gf_matmul(ctx, gf_matmul(ctx, v, blk), v_inv)
    row_perm = np.concatenate([np.arange(m) * e + t for t in range(e)])
    col_perm = np.concatenate([np.arange(n) * e + t for t in range(e)])
    hp = hf[np.ix_(row_perm, col_perm)]
    blocks = []
    for t in range(e):
        blocks.append(hp[t * m:(t + 1) * m, t * n:(t + 1) * n].copy())
        hp[t * m:(t + 1) * m, t * n:(t + 1) * n] = 0
    if hp.any():
        raise AssertionError("transformed array is not block-diagonal")
    return blocks
