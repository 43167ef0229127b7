"""Base-matrix families and their closed-form dispersed-array ranks."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .dispersion import DispersedArray, MaskMatrix, apply_mask, disperse, expand
from .fmat import BaseMatrix, BinaryMatrix, rank_gf2, rank_gfq, sm_constraint_check
from .galois import FieldContext


class ConstructionError(ValueError):
    """A construction precondition does not hold."""


def _largest_pow2_exponent(x: int) -> int:
    """Largest w with 2^w <= x (x >= 1)."""
    return x.bit_length() - 1


# -- Latin squares -------------------------------------------------------

def latin_order(ctx: FieldContext) -> np.ndarray:
    """Field elements in the row/column order 1, alpha, ..., alpha^(q-2), 0."""
    return np.append(ctx.antilog_table[: ctx.e], 0)


def latin_base(ctx: FieldContext, m: int, n: int, row_offset: int = 0,
               col_offset: int = 0) -> BaseMatrix:
    """m x n block of the q x q Latin square [x_i + x_j].

    With zero offsets this is the upper-left submatrix, which has its zeros
    on the leading diagonal.
    """
    q = ctx.q
    if not (1 <= m and 1 <= n and row_offset >= 0 and col_offset >= 0
            and row_offset + m <= q and col_offset + n <= q):
        raise ConstructionError(f"Latin submatrix out of range for q={q}: "
                                f"rows {row_offset}+{m}, cols {col_offset}+{n}")
    order = latin_order(ctx)
    rows = order[row_offset:row_offset + m]
    cols = order[col_offset:col_offset + n]
    return BaseMatrix(ctx, rows[:, None] ^ cols[None, :])


def latin_mu0(m: int, n: int, zeros: int | None = None) -> int:
    """Rank of the 0/1 pattern of an upper-left Latin submatrix from its zero count."""
    k0 = min(m, n) if zeros is None else zeros
    if k0 < min(m, n):
        return k0 + 1
    if k0 == m == n and k0 % 2 == 1:
        return k0 - 1
    return k0


def latin_rank_formula(ctx: FieldContext, m: int, n: int) -> int:
    """Closed-form rank of the dispersed upper-left m x n Latin subarray.

    Valid when m >= q/2 or n >= q/2.
    """
    q, r = ctx.q, ctx.r
    if not (1 <= m <= q and 1 <= n <= q):
        raise ConstructionError("dimensions out of range")
    if not (2 * m >= q or 2 * n >= q):
        raise ConstructionError("closed form needs m >= q/2 or n >= q/2")
    # the short side caps every Hadamard-power rank
    side = m if 2 * n >= q else n
    w = _largest_pow2_exponent(side)
    total = latin_mu0(m, n)
    total += sum(comb(r, i) * 2**i for i in range(1, min(w, r - 1) + 1))
    total += sum(comb(r, i) * side for i in range(w + 1, r))
    return total


def odd_binomial_count(t: int) -> int:
    """Number of odd entries in row t of Pascal's triangle (brute force)."""
    row = [1]
    for _ in range(t):
        row = [1] + [(a + b) & 1 for a, b in zip(row, row[1:])] + [1]
    return sum(x & 1 for x in row)


@dataclass(frozen=True)
class SubarrayCheck:
    ok: bool
    n: int
    relation: str
    lhs: int
    rhs: int


def latin_redundant_subarray_equalities(ctx: FieldContext, n: int) -> SubarrayCheck:
    """Check the rank relations between H(q, n) and a smaller Latin subarray.

    For n <= q/2 the rows past q/2 are redundant: rank H(q, n) = rank H(q/2, n).
    For n > q/2: rank H(q, n) = rank H(n, n) + (n mod 2).
    Ranks come from full GF(2) elimination of the expanded arrays.
    """
    if ctx.r > 5:
        raise ConstructionError("oracle comparison limited to r <= 5")
    q = ctx.q

    def oracle(rows: int) -> int:
        return rank_gf2(expand(disperse(latin_base(ctx, rows, n))))

    full = oracle(q)
    if 2 * n <= q:
        other = oracle(q // 2)
        return SubarrayCheck(full == other, n, "rank H(q,n) = rank H(q/2,n)", full, other)
    other = oracle(n) + (n % 2)
    return SubarrayCheck(full == other, n, "rank H(q,n) = rank H(n,n) + (n mod 2)", full, other)


# -- Vandermonde ---------------------------------------------------------

@dataclass(frozen=True)
class VandermondeParams:
    p: int
    k: int
    beta: int


def _largest_prime_factor(x: int) -> int:
    best, d = 1, 2
    while d * d <= x:
        while x % d == 0:
            best, x = d, x // d
        d += 1
    return max(best, x) if x > 1 else best


def vandermonde_params(ctx: FieldContext) -> VandermondeParams:
    p = _largest_prime_factor(ctx.e)
    k = ctx.e // p
    return VandermondeParams(p, k, ctx.alpha(k))


def vandermonde_base(ctx: FieldContext, m: int, n: int) -> BaseMatrix:
    """[beta^(i j)] for 0 <= i < m, 0 <= j < n, beta of prime order p."""
    par = vandermonde_params(ctx)
    if not (1 <= m <= n <= par.p):
        raise ConstructionError(f"need 1 <= m <= n <= p = {par.p}")
    i = np.arange(m)[:, None]
    j = np.arange(n)[None, :]
    return BaseMatrix(ctx, ctx.alpha(par.k * ((i * j) % par.p)))


def vandermonde_rank_formula(ctx: FieldContext, m: int, n: int,
                             block_size: int | None = None) -> int:
    """Rank of the dispersed Vandermonde subarray.

    With the default block size p this is m p - m + 1.  For a block size e'
    that is a multiple of p, e'/p Hadamard powers are all-ones (rank 1) and
    the rest have rank m.
    """
    par = vandermonde_params(ctx)
    e = par.p if block_size is None else block_size
    if e % par.p or ctx.e % e:
        raise ConstructionError("block size must be a multiple of p dividing q-1")
    if not (1 <= m <= n <= par.p):
        raise ConstructionError(f"need 1 <= m <= n <= p = {par.p}")
    ones = e // par.p
    return ones + (e - ones) * m


# -- random field partitions ---------------------------------------------

@dataclass(frozen=True)
class PartitionParams:
    g1: tuple[int, ...]
    g2: tuple[int, ...]
    consecutive: bool

    @property
    def m(self) -> int:
        return len(self.g1)

    @property
    def n(self) -> int:
        return len(self.g2)


def consecutive_partition(ctx: FieldContext, m: int) -> PartitionParams:
    """G1 = {0, 1, alpha, ..., alpha^(m-2)}, G2 = {alpha^(m-1), ..., alpha^(q-2)}."""
    if not 1 <= m < ctx.q:
        raise ConstructionError("need 1 <= m < q")
    g1 = (0,) + tuple(int(x) for x in ctx.antilog_table[: m - 1])
    g2 = tuple(int(x) for x in ctx.antilog_table[m - 1: ctx.e])
    return PartitionParams(g1, g2, True)


def random_partition(ctx: FieldContext, m: int, seed: int = 0) -> PartitionParams:
    rng = np.random.default_rng(seed)
    perm = rng.permutation(ctx.q)
    return PartitionParams(tuple(int(x) for x in perm[:m]),
                           tuple(int(x) for x in perm[m:]), False)


def partition_base(ctx: FieldContext, g1, g2) -> BaseMatrix:
    """[lambda_i + delta_j] for disjoint G1, G2 covering the field."""
    a = [int(x) for x in g1]
    b = [int(x) for x in g2]
    if not a or not b:
        raise ConstructionError("both partition subsets must be nonempty")
    if len(set(a)) != len(a) or len(set(b)) != len(b) or set(a) & set(b):
        raise ConstructionError("partition subsets must be disjoint and duplicate-free")
    if set(a) | set(b) != set(range(ctx.q)) or len(a) + len(b) != ctx.q:
        raise ConstructionError("partition subsets must cover the whole field")
    return BaseMatrix(ctx, np.array(a)[:, None] ^ np.array(b)[None, :])


def partition_rank_formula(ctx: FieldContext, m: int) -> int:
    """3^r - 2^r - sum_{w > w0} C(r, w)(2^w - m) for consecutive partitions, m <= 2^(r-1)."""
    r = ctx.r
    if not 1 <= m <= 2 ** (r - 1):
        raise ConstructionError("closed form needs 1 <= m <= 2^(r-1)")
    w0 = _largest_pow2_exponent(m)
    return 3**r - 2**r - sum(comb(r, w) * (2**w - m) for w in range(w0 + 1, r))


# -- diamond-shape --------------------------------------------------------

def diamond_split(w: BaseMatrix, c_w: int | None = None) -> tuple[BaseMatrix, BaseMatrix]:
    """Upper part keeps w[i, j] where i <= floor(j / c_w); lower part keeps the rest."""
    mw, nw = w.shape
    if nw % mw:
        raise ConstructionError(f"row count {mw} must divide column count {nw}")
    cw = nw // mw if c_w is None else c_w
    if cw * mw != nw:
        raise ConstructionError(f"c_w must equal n_w / m_w = {nw // mw}")
    i = np.arange(mw)[:, None]
    j = np.arange(nw)[None, :]
    upper = i <= j // cw
    return (BaseMatrix(w.ctx, np.where(upper, w.values, 0)),
            BaseMatrix(w.ctx, np.where(upper, 0, w.values)))


def diamond_base(w: BaseMatrix, c_w: int | None = None) -> BaseMatrix:
    """[[W_u, W_l], [W_l, W_u]]."""
    wu, wl = diamond_split(w, c_w)
    top = np.hstack([wu.values, wl.values])
    bottom = np.hstack([wl.values, wu.values])
    return BaseMatrix(w.ctx, np.vstack([top, bottom]))


def diamond_power_bound(m_w: int, mu_w: int, weight: int) -> int:
    """Upper bound on the rank of a Hadamard power of weight tau."""
    return min(2 * m_w, mu_w ** weight + m_w)


def diamond_rank_bound(m_w: int, mu_w: int, mu0: int, r: int) -> int:
    """mu_0 + sum_i C(r, i) min(2 m_w, mu_w^i + m_w) for a (2 m_w) x (2 n_w) diamond base."""
    return mu0 + sum(comb(r, i) * diamond_power_bound(m_w, mu_w, i) for i in range(1, r))


def diamond_redundancy_bound(m_w: int, mu_w: int, mu0: int, r: int) -> int:
    """(2 m_w - mu_0) + sum_i C(r, i) max(0, m_w - mu_w^i)."""
    return (2 * m_w - mu0) + sum(comb(r, i) * max(0, m_w - mu_w**i) for i in range(1, r))


# -- product-like ---------------------------------------------------------

def product_like_base(blocks, coupling) -> BaseMatrix:
    """Block-diagonal of the W_i with the coupling matrix C_g stacked below.

    Raises if the assembled matrix violates the 2x2 SM-constraint.
    """
    blocks = list(blocks)
    if not blocks:
        raise ConstructionError("need at least one block")
    ctx = blocks[0].ctx
    mw, nw = blocks[0].shape
    if any(b.shape != (mw, nw) or b.ctx != ctx for b in blocks):
        raise ConstructionError("all blocks must share shape and field")
    l = len(blocks)
    top = np.zeros((mw * l, nw * l), dtype=np.int64)
    for i, b in enumerate(blocks):
        top[i * mw:(i + 1) * mw, i * nw:(i + 1) * nw] = b.values
    if coupling is None:
        values = top
    else:
        cg = coupling.values if isinstance(coupling, BaseMatrix) else np.asarray(coupling)
        if cg.size == 0:
            values = top
        else:
            if cg.ndim != 2 or cg.shape[1] != nw * l:
                raise ConstructionError(f"coupling matrix must have {nw * l} columns")
            values = np.vstack([top, cg])
    out = BaseMatrix(ctx, values)
    bad = sm_constraint_check(out)
    if bad is not None:
        raise ConstructionError(f"assembled base matrix violates the 2x2 SM-constraint at {bad}")
    return out


def coupling_matrix(blocks, rows: int, seed: int = 0) -> BaseMatrix:
    """Weight-1 coupling columns, row j mod ``rows`` for column j, SM-safe random values.

    Each value is drawn uniformly (fixed seed) from the nonzero elements that
    do not create a singular 2x2 minor with any row already placed, so the
    assembled product-like matrix satisfies the SM-constraint by construction.
    """
    blocks = list(blocks)
    ctx = blocks[0].ctx
    l = len(blocks)
    mw, nw = blocks[0].shape
    ncols = nw * l
    if rows < 1:
        raise ConstructionError("coupling matrix needs at least one row")
    top = np.zeros((mw * l, ncols), dtype=np.int64)
    for i, b in enumerate(blocks):
        top[i * mw:(i + 1) * mw, i * nw:(i + 1) * nw] = b.values
    rng = np.random.default_rng(seed)
    cg = np.zeros((rows, ncols), dtype=np.int64)
    for j in range(ncols):
        rho = j % rows
        placed = np.flatnonzero(cg[rho])
        forbidden = set()
        for other in np.vstack([top, np.delete(cg, rho, axis=0)]):
            if other[j] == 0:
                continue
            both = placed[other[placed] != 0]
            if both.size:
                # ratio c / other must differ from every ratio already on this row pair
                ratios = (ctx.log(cg[rho, both]) - ctx.log(other[both])) % ctx.e
                forbidden.update(int((k + ctx.log(other[j])) % ctx.e) for k in ratios)
        allowed = [k for k in range(ctx.e) if k not in forbidden]
        if not allowed:
            raise ConstructionError(f"no SM-safe value for coupling column {j}")
        cg[rho, j] = ctx.alpha(int(rng.choice(allowed)))
    product_like_base(blocks, cg)
    return BaseMatrix(ctx, cg)


# -- masks from cyclic codes ---------------------------------------------

def gf2_poly_divmod(num: int, den: int) -> tuple[int, int]:
    """Quotient and remainder of binary polynomials given as bitmasks."""
    if den == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    quo = 0
    dlen = den.bit_length()
    while num and num.bit_length() >= dlen:
        shift = num.bit_length() - dlen
        quo ^= 1 << shift
        num ^= den << shift
    return quo, num


def cyclic_parity_vector(generator: int, n: int) -> np.ndarray:
    """Coefficients of h(x) = (x^n + 1) / g(x) as a length-n 0/1 vector."""
    h, rem = gf2_poly_divmod((1 << n) | 1, generator)
    if rem:
        raise ConstructionError("generator polynomial does not divide x^n + 1")
    return np.array([(h >> i) & 1 for i in range(n)], dtype=np.uint8)


def circulant(vec) -> np.ndarray:
    """n x n binary circulant whose row i is ``vec`` cyclically shifted right by i."""
    v = np.asarray(vec, dtype=np.uint8)
    n = v.shape[0]
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return v[idx]


@dataclass(frozen=True)
class IrregularMaskParams:
    h: np.ndarray
    shaping: np.ndarray
    columns: np.ndarray | None = None


def cyclic_mask(h, n: int, shaping, m: int, columns=None) -> MaskMatrix:
    """M = (C . Phi(h)) mod 2, optionally restricted to a column subset.

    ``shaping`` is the m x n binary matrix C.  The rank of M is at most
    min(n - k_h, m) with k_h = n - rank(Phi(h)).
    """
    h = np.asarray(h, dtype=np.uint8)
    c = np.asarray(shaping, dtype=np.int64)
    if h.shape != (n,):
        raise ConstructionError(f"parity vector must have length {n}")
    if c.shape != (m, n):
        raise ConstructionError(f"shaping matrix must be {m}x{n}")
    prod = (c @ circulant(h).astype(np.int64)) % 2
    if columns is not None:
        prod = prod[:, np.asarray(columns)]
    return MaskMatrix(prod.astype(np.uint8))


def shift_selector(shifts, n: int) -> np.ndarray:
    """Shaping matrix whose row i picks row ``shifts[i]`` of the circulant."""
    shifts = np.asarray(shifts)
    c = np.zeros((len(shifts), n), dtype=np.uint8)
    c[np.arange(len(shifts)), shifts % n] = 1
    return c


def masked_base(w: BaseMatrix, mask: MaskMatrix) -> BaseMatrix:
    """B_ir = W o M."""
    return apply_mask(w, mask)


# -- burst erasures -------------------------------------------------------

@dataclass(frozen=True)
class BurstReport:
    requested: int
    correctable: int
    failing_start: int | None   # first window start that failed at the requested length

    @property
    def ok(self) -> bool:
        return self.correctable >= self.requested


def _column_ints(h: BinaryMatrix) -> list[int]:
    dense = h.to_dense()
    packed = np.packbits(dense.T, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def burst_erasure_check(array: DispersedArray | BinaryMatrix, length: int,
                        budget: int | None = None) -> BurstReport:
    """Largest L <= ``length`` for which every run of L consecutive columns is independent.

    An erased burst is recoverable exactly when the erased columns are
    linearly independent over GF(2).
    """
    h = array if isinstance(array, BinaryMatrix) else expand(array, budget)
    cols = _column_ints(h)
    ncol = len(cols)
    length = min(length, ncol)
    if length <= 0:
        return BurstReport(length, 0, None)
    # run[s]: number of independent consecutive columns starting at s, capped at length
    run = np.zeros(ncol, dtype=np.int64)
    for s in range(ncol):
        basis: dict[int, int] = {}
        count = 0
        for c in range(s, min(ncol, s + length)):
            v = cols[c]
            while v:
                top = v.bit_length()
                if top in basis:
                    v ^= basis[top]
                else:
                    basis[top] = v
                    break
            if not v:
                break
            count += 1
        run[s] = count
    failing = None
    starts = np.arange(ncol - length + 1)
    bad = starts[run[starts] < length]
    if bad.size:
        failing = int(bad[0])
    best = 0
    for L in range(length, 0, -1):
        if np.all(run[: ncol - L + 1] >= L):
            best = L
            break
    return BurstReport(length, best, failing)


def select_columns_by_weight(bits, weights, counts) -> np.ndarray:
    """Indices of the first ``counts[k]`` columns of weight ``weights[k]``, ascending."""
    w = np.asarray(bits).sum(axis=0)
    picked = []
    for weight, count in zip(weights, counts):
        cand = np.flatnonzero(w == weight)
        if cand.size < count:
            raise ConstructionError(f"only {cand.size} columns of weight {weight}, need {count}")
        picked.extend(cand[:count].tolist())
    return np.array(sorted(picked), dtype=np.int64)


# -- descriptor recipes ---------------------------------------------------

FAMILIES = ("latin", "vandermonde", "partition", "diamond", "product", "masked")


def _need(desc: dict, *keys):
    missing = [k for k in keys if k not in desc]
    if missing:
        raise ConstructionError(f"{desc.get('family')}: missing parameter(s) {', '.join(missing)}")


def build_from_descriptor(desc: dict) -> tuple[BaseMatrix, int | None]:
    """Base matrix and dispersion block size (None for q-1) for a descriptor dict."""
    from .galois import make_field

    family = desc.get("family")
    if family not in FAMILIES:
        raise ConstructionError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    _need(desc, "r")
    ctx = make_field(int(desc["r"]))
    block = desc.get("block_size")

    if family == "latin":
        _need(desc, "m", "n")
        return latin_base(ctx, desc["m"], desc["n"], desc.get("row_offset", 0),
                          desc.get("col_offset", 0)), block

    if family == "vandermonde":
        _need(desc, "m", "n")
        if block is None:
            block = vandermonde_params(ctx).p
        return vandermonde_base(ctx, desc["m"], desc["n"]), block

    if family == "partition":
        _need(desc, "m")
        if desc.get("consecutive", True):
            part = consecutive_partition(ctx, desc["m"])
        else:
            part = random_partition(ctx, desc["m"], desc.get("seed", 0))
        return partition_base(ctx, part.g1, part.g2), block

    if family == "diamond":
        _need(desc, "m_w", "n_w")
        mw = desc["m_w"]
        w = latin_base(ctx, mw, desc["n_w"], desc.get("row_offset", 0), desc.get("col_offset", mw))
        return diamond_base(w, desc.get("c_w")), block

    if family == "product":
        _need(desc, "blocks", "m_w", "n_w", "m_g")
        l, mw, nw = desc["blocks"], desc["m_w"], desc["n_w"]
        # block i uses rows [i m_w, (i+1) m_w) and a column range past every row: zero-free
        blocks = [latin_base(ctx, mw, nw, i * mw, l * mw) for i in range(l)]
        cg = coupling_matrix(blocks, desc["m_g"], desc.get("seed", 0)) if desc["m_g"] else None
        return product_like_base(blocks, cg), block

    _need(desc, "m", "generator", "shifts", "col_weights", "col_counts")
    n = int(desc.get("length", ctx.e))
    shifts = np.atleast_1d(desc["shifts"])
    m = desc["m"]
    if len(shifts) != m:
        raise ConstructionError(f"masked: need {m} shifts, got {len(shifts)}")
    h = cyclic_parity_vector(int(desc["generator"]), n)
    shaping = shift_selector(shifts, n)
    full = cyclic_mask(h, n, shaping, m)
    cols = select_columns_by_weight(full.bits, np.atleast_1d(desc["col_weights"]),
                                    np.atleast_1d(desc["col_counts"]))
    mask = cyclic_mask(h, n, shaping, m, columns=cols)
    w = latin_base(ctx, m, len(cols), desc.get("row_offset", 0), desc.get("col_offset", m))
    return masked_base(w, mask), block
