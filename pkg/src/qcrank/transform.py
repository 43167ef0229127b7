"""Rank of CPM/ZM arrays from the Hadamard powers of their base matrix.

The e-fold dispersion H of a base matrix B has, in the Fourier domain, the
block-diagonal form diag(B^o0, B^o1, ..., B^o(e-1)), so rank(H) is the sum
of the ranks of all Hadamard powers.  Powers whose exponents share a
cyclotomic coset of 2 mod e have equal rank, so one elimination per coset
suffices.  This module computes that exact rank, the two upper bounds that
can be derived from it, and the redundancy figures for the array.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .fmat import BaseMatrix, hadamard_power, rank_gfq
from .galois import FieldContext, FieldError, cyclotomic_cosets


@dataclass(frozen=True)
class ClassRow:
    index: int
    parent: int          # class containing t_i - 1 (0 for class 0)
    representative: int
    members: tuple[int, ...]
    bound: int           # min(m, n, mu_1 * mu_parent); mu_0 for class 0, mu_1 for class 1
    rank: int

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ConjugacyTable:
    m: int
    n: int
    e: int
    rows: tuple[ClassRow, ...]

    @property
    def count(self) -> int:
        return len(self.rows)

    @property
    def mu0(self) -> int:
        return self.rows[0].rank

    @property
    def mu1(self) -> int:
        return self.rows[1].rank if len(self.rows) > 1 else self.rows[0].rank

    def exact_rank(self) -> int:
        return sum(row.size * row.rank for row in self.rows)


def _block_size(matrix: BaseMatrix, block_size: int | None) -> int:
    ctx = matrix.ctx
    e = ctx.e if block_size is None else int(block_size)
    if e < 1 or ctx.e % e:
        raise FieldError(f"block size {e} does not divide q-1 = {ctx.e}")
    if e != ctx.e:
        step = ctx.e // e
        expo = matrix.exponents()
        if any(k % step for k in expo[expo >= 0].ravel()):
            raise FieldError(f"entries are not in the order-{e} subgroup of GF(2^{ctx.r})*")
    return e


def build_conjugacy_table(matrix: BaseMatrix, ctx: FieldContext | None = None,
                          block_size: int | None = None) -> ConjugacyTable:
    """Per-coset ranks of the Hadamard powers of ``matrix``, filled in coset order.

    ``block_size`` selects a dispersion size dividing q-1 (default q-1); all
    nonzero entries must then lie in the subgroup of that order.
    """
    if ctx is not None and ctx != matrix.ctx:
        raise FieldError("base matrix belongs to a different field")
    e = _block_size(matrix, block_size)
    m, n = matrix.shape
    cap = min(m, n)
    cosets = cyclotomic_cosets(e)
    rows: list[ClassRow] = []
    for i, coset in enumerate(cosets):
        t = coset.representative
        mu = rank_gfq(hadamard_power(matrix, t))
        if i == 0:
            parent, bound = 0, mu
        elif i == 1:
            parent, bound = cosets.index_of(t - 1), mu
        else:
            parent = cosets.index_of(t - 1)
            if parent < i:
                bound = min(cap, rows[1].rank * rows[parent].rank)
            else:
                bound = cap
        rows.append(ClassRow(i, parent, t, coset.members, bound, mu))
    return ConjugacyTable(m, n, e, tuple(rows))


def recursive_rank_bound(table: ConjugacyTable) -> int:
    """mu_0 + sum over classes i >= 1 of c_i * min(m, n, mu_1 * mu_parent(i))."""
    return sum(row.size * row.bound for row in table.rows)


def weight_rank_bound(m: int, n: int, mu0: int, mu1: int, r: int) -> int:
    """mu_0 + sum_{i=1}^{r-1} C(r, i) * min(m, n, mu_1^i)."""
    return mu0 + sum(comb(r, i) * min(m, n, mu1 ** i) for i in range(1, r))


def _weight_bound_any_e(m: int, n: int, mu0: int, mu1: int, e: int) -> int:
    # same argument, counting exponents t < e by binary weight directly
    return mu0 + sum(min(m, n, mu1 ** bin(t).count("1")) for t in range(1, e))


def redundancy_lower_bound(m: int, e: int, mu0: int, mu1: int, r: int, n: int) -> int:
    """m*e minus the weight bound: guaranteed number of dependent rows."""
    return m * e - weight_rank_bound(m, n, mu0, mu1, r)


def low_rank_redundancy(m: int, mu1: int, coset_size: int) -> int:
    """c_1 * (m - mu_1): redundancy forced by the coset of 1 alone (m <= n)."""
    return coset_size * (m - mu1)


def zero_free_redundancy(m: int, mu1: int, coset_size: int) -> int:
    """Redundancy floor for a base matrix without zero entries (mu_0 = 1)."""
    return coset_size * (m - mu1) + m - 1


@dataclass(frozen=True)
class RankReport:
    m: int
    n: int
    e: int
    r: int
    exact_rank: int
    recursive_bound: int
    weight_bound: int
    table: ConjugacyTable = field(repr=False)

    @property
    def rows(self) -> int:
        return self.m * self.e

    @property
    def redundant_rows(self) -> int:
        return self.rows - self.exact_rank

    @property
    def redundancy(self) -> float:
        return self.redundant_rows / self.rows if self.rows else 0.0

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "m": self.m,
            "n": self.n,
            "e": self.e,
            "rows": self.rows,
            "cols": self.n * self.e,
            "exact_rank": self.exact_rank,
            "recursive_bound": self.recursive_bound,
            "weight_bound": self.weight_bound,
            "redundant_rows": self.redundant_rows,
            "redundancy": round(self.redundancy, 4),
            "mu0": self.table.mu0,
            "mu1": self.table.mu1,
            "classes": [
                {
                    "i": row.index,
                    "parent": row.parent,
                    "coset": list(row.members),
                    "bound": row.bound,
                    "rank": row.rank,
                }
                for row in self.table.rows
            ],
        }

    def to_text(self) -> str:
        lines = [
            f"array: {self.m}x{self.n} blocks of size {self.e} over GF(2^{self.r})"
            f" -> {self.rows}x{self.n * self.e} binary",
            f"exact rank:       {self.exact_rank}",
            f"recursive bound:  {self.recursive_bound}",
            f"weight bound:     {self.weight_bound}",
            f"redundant rows:   {self.redundant_rows}",
            f"redundancy:       {self.redundancy:.4f}",
            "",
            f"{'i':>3} {'i*':>3}  {'bound':>6} {'rank':>5}  coset",
        ]
        for row in self.table.rows:
            lines.append(
                f"{row.index:>3} {row.parent:>3}  {row.bound:>6} {row.rank:>5}  "
                + " ".join(str(t) for t in row.members)
            )
        return "\n".join(lines)


def transform_rank(matrix: BaseMatrix, ctx: FieldContext | None = None,
                   block_size: int | None = None) -> RankReport:
    """Exact rank of the dispersed array plus both upper bounds."""
    table = build_conjugacy_table(matrix, ctx, block_size)
    m, n = matrix.shape
    r = matrix.ctx.r
    if table.e == matrix.ctx.e:
        wbound = weight_rank_bound(m, n, table.mu0, table.mu1, r)
    else:
        wbound = _weight_bound_any_e(m, n, table.mu0, table.mu1, table.e)
    return RankReport(
        m=m,
        n=n,
        e=table.e,
        r=r,
        exact_rank=table.exact_rank(),
        recursive_bound=recursive_rank_bound(table),
        weight_bound=wbound,
        table=table,
    )
