"""Dense matrices over GF(2^r) and packed binary matrices over GF(2)."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .galois import FieldContext, FieldError


@dataclass(frozen=True, eq=False)
class BaseMatrix:
    """An m x n matrix over GF(2^r); entries are polynomial-basis integers."""

    ctx: FieldContext
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.int64, copy=True)
        if v.ndim != 2:
            raise ValueError("base matrix must be two-dimensional")
        if np.any((v < 0) | (v >= self.ctx.q)):
            raise FieldError("entries outside the field")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_exponents(cls, ctx: FieldContext, exponents) -> BaseMatrix:
        return cls(ctx, ctx.from_exponents(exponents))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def exponents(self) -> np.ndarray:
        return self.ctx.to_exponents(self.values)

    def nonzero_mask(self) -> np.ndarray:
        return self.values != 0

    def submatrix(self, rows, cols) -> BaseMatrix:
        return BaseMatrix(self.ctx, self.values[np.ix_(np.asarray(rows), np.asarray(cols))])

    def transpose(self) -> BaseMatrix:
        return BaseMatrix(self.ctx, self.values.T)

    def __eq__(self, other):
        return (
            isinstance(other, BaseMatrix)
            and self.ctx == other.ctx
            and self.values.shape == other.values.shape
            and bool(np.all(self.values == other.values))
        )

    def __repr__(self):
        return f"BaseMatrix(GF(2^{self.ctx.r}), {self.m}x{self.n})"


@dataclass(frozen=True, eq=False)
class BinaryMatrix:
    """R x C matrix over GF(2), one row per entry of ``words`` (64 columns per word).

    Column c of a row lives in bit ``c % 64`` of word ``c // 64``.
    """

    words: np.ndarray
    ncols: int

    @property
    def nrows(self) -> int:
        return self.words.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @classmethod
    def from_dense(cls, dense) -> BinaryMatrix:
        a = np.asarray(dense)
        if a.ndim != 2:
            raise ValueError("need a two-dimensional array")
        a = (a % 2).astype(np.uint8)
        rows, cols = a.shape
        nwords = max(1, -(-cols // 64))
        padded = np.zeros((rows, nwords * 64), dtype=np.uint8)
        padded[:, :cols] = a
        packed = np.packbits(padded, axis=1, bitorder="little")
        words = packed.view("<u8").astype(np.uint64).reshape(rows, nwords)
        return cls(words, cols)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BinaryMatrix:
        return cls(np.zeros((rows, max(1, -(-cols // 64))), dtype=np.uint64), cols)

    def to_dense(self) -> np.ndarray:
        raw = self.words.astype("<u8").view(np.uint8).reshape(self.nrows, -1)
        bits = np.unpackbits(raw, axis=1, bitorder="little")
        return bits[:, : self.ncols].astype(np.uint8)

    def row_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=1)

    def col_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0)

    def __eq__(self, other):
        return (
            isinstance(other, BinaryMatrix)
            and self.shape == other.shape
            and bool(np.all(self.words == other.words))
        )

    def __repr__(self):
        return f"BinaryMatrix({self.nrows}x{self.ncols})"


# -- rank ----------------------------------------------------------------

def gfq_rank(ctx: FieldContext, values) -> int:
    """Row rank of an integer-coded matrix over ``ctx`` by Gaussian elimination."""
    a = np.array(values, dtype=np.int64, copy=True)
    if a.ndim != 2 or 0 in a.shape:
        return 0
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = ctx.mul(a[r], ctx.inv(a[r, c]))
        below = r + 1 + np.flatnonzero(a[r + 1 :, c])
        if below.size:
            a[below] ^= ctx.mul(a[below, c][:, None], a[r][None, :])
        r += 1
        if r == rows:
            break
    return r


def rank_gfq(matrix: BaseMatrix) -> int:
    return gfq_rank(matrix.ctx, matrix.values)


def rank_gf2(matrix: BinaryMatrix) -> int:
    """Rank over GF(2) by word-parallel elimination on packed rows."""
    a = matrix.words.copy()
    rows = a.shape[0]
    if rows == 0 or matrix.ncols == 0:
        return 0
    one = np.uint64(1)
    r = 0
    for c in range(matrix.ncols):
        w = c >> 6
        bit = one << np.uint64(c & 63)
        hits = np.flatnonzero(a[r:, w] & bit)
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
            hits = np.flatnonzero(a[r:, w] & bit)
        rest = r + hits[1:]
        if rest.size:
            a[rest, w:] ^= a[r, w:]
        r += 1
        if r == rows:
            break
    return r


# -- Hadamard products ---------------------------------------------------

def hadamard(ma: BaseMatrix, mb: BaseMatrix) -> BaseMatrix:
    if ma.ctx != mb.ctx:
        raise FieldError("operands live in different fields")
    if ma.shape != mb.shape:
        raise ValueError(f"shape mismatch: {ma.shape} vs {mb.shape}")
    return BaseMatrix(ma.ctx, ma.ctx.mul(ma.values, mb.values))


def hadamard_power(matrix: BaseMatrix, t: int) -> BaseMatrix:
    """Entry-wise t-th power; for t = 0 nonzero entries become 1, zeros stay 0."""
    if t < 0:
        raise ValueError("Hadamard power must be nonnegative")
    return BaseMatrix(matrix.ctx, matrix.ctx.power(matrix.values, t))


# -- structural checks ---------------------------------------------------

def sm_constraint_check(matrix: BaseMatrix):
    """Return None if every 2x2 submatrix has a zero entry or is nonsingular.

    Otherwise return ``((i0, i1), (j0, j1))`` for the first violating minor
    in row-major order of the row pair, then the column pair.
    """
    ctx = matrix.ctx
    v = matrix.values
    m, n = v.shape
    if m < 2 or n < 2:
        return None
    for i0, i1 in combinations(range(m), 2):
        a, b = v[i0], v[i1]
        both = np.flatnonzero((a != 0) & (b != 0))
        if both.size < 2:
            continue
        # a_j0 b_j1 = a_j1 b_j0  <=>  a_j / b_j equal for j0, j1
        ratio = (ctx.log(a[both]) - ctx.log(b[both])) % ctx.e
        _, group, counts = np.unique(ratio, return_inverse=True, return_counts=True)
        if np.any(counts > 1):
            pairs = []
            for g in np.flatnonzero(counts > 1):
                js = both[group == g]
                pairs.append((int(js[0]), int(js[1])))
            return (i0, i1), min(pairs)
    return None


def _overlaps(h: BinaryMatrix) -> np.ndarray:
    dense = h.to_dense().astype(np.float32)
    return dense @ dense.T


def rc_constraint_check(h: BinaryMatrix):
    """Return None if no two rows share more than one 1-position, else the first such row pair."""
    if h.nrows < 2:
        return None
    ov = _overlaps(h)
    np.fill_diagonal(ov, 0)
    bad = np.argwhere(np.triu(ov) > 1)
    if bad.size == 0:
        return None
    i, j = bad[0]
    return int(i), int(j)


def girth_lower_bound(h: BinaryMatrix) -> int:
    """4 if the Tanner graph has a 4-cycle, else 6 (meaning girth >= 6)."""
    return 4 if rc_constraint_check(h) is not None else 6
