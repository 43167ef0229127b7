from __future__ import annotations

from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dispersed_dense, rank_gf2_ints
from qcrank.constructions import latin_base
from qcrank.fmat import BaseMatrix, hadamard_power, rank_gfq
from qcrank.galois import FieldError, make_field
from qcrank.transform import (
    build_conjugacy_table,
    low_rank_redundancy,
    recursive_rank_bound,
    redundancy_lower_bound,
    transform_rank,
    weight_rank_bound,
    zero_free_redundancy,
)


@st.composite
def base_matrices(draw, rs=(2, 3, 4, 5), max_m=8, max_n=12):
    r = draw(st.sampled_from(rs))
    ctx = make_field(r)
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    style = draw(st.sampled_from(["dense", "sparse", "lowrank"]))
    if style == "lowrank":
        # x_i + y_j has low-rank Hadamard powers
        x = rng.integers(0, ctx.q, size=(m, 1))
        y = rng.integers(0, ctx.q, size=(1, n))
        v = x ^ y
    else:
        v = rng.integers(1, ctx.q, size=(m, n))
        v[rng.random((m, n)) < (0.5 if style == "sparse" else 0.1)] = 0
    return BaseMatrix(ctx, v)


def test_example_latin_64_table():
    ctx = make_field(6)
    rep = transform_rank(latin_base(ctx, 64, 64))
    assert rep.exact_rank == 728
    assert [row.rank for row in rep.table.rows] == [64, 2, 4, 4, 8, 4, 8, 8, 16, 8, 16, 16, 32]
    assert [row.size for row in rep.table.rows] == [1, 6, 6, 6, 6, 3, 6, 6, 6, 2, 6, 3, 6]
    assert rep.recursive_bound == rep.weight_bound == 728
    assert rep.redundant_rows == 3304
    assert rep.to_dict()["redundancy"] == 0.8194


def test_parent_is_class_of_t_minus_one():
    table = build_conjugacy_table(latin_base(make_field(6), 64, 64))
    # 63 -> coset of t_i - 1
    cos = {t: row.index for row in table.rows for t in row.members}
    for row in table.rows[1:]:
        assert row.parent == cos[row.representative - 1]
        assert row.parent < row.index


def test_one_by_one_base():
    ctx = make_field(3)
    rep = transform_rank(BaseMatrix(ctx, [[ctx.alpha(2)]]))
    assert rep.exact_rank == 7
    assert rep.redundant_rows == 0
    assert "exact rank" in rep.to_text()


@settings(max_examples=120, deadline=None)
@given(base_matrices())
def test_exact_rank_equals_expanded_rank(B):
    dense = dispersed_dense(B.values, B.ctx.r, B.ctx.primitive_poly)
    assert transform_rank(B).exact_rank == rank_gf2_ints(dense)


@settings(max_examples=150, deadline=None)
@given(base_matrices())
def test_conjugate_powers_share_rank(B):
    table = build_conjugacy_table(B)
    for row in table.rows:
        for t in row.members:
            assert rank_gfq(hadamard_power(B, t)) == row.rank


@settings(max_examples=150, deadline=None)
@given(base_matrices(), st.integers(0, 40), st.integers(0, 40))
def test_hadamard_rank_product_bound(B, s, t):
    from qcrank.fmat import hadamard
    prod = hadamard(hadamard_power(B, s), hadamard_power(B, t))
    assert rank_gfq(prod) <= rank_gfq(hadamard_power(B, s)) * rank_gfq(hadamard_power(B, t))


@settings(max_examples=150, deadline=None)
@given(base_matrices())
def test_bounds_dominate_exact_rank(B):
    rep = transform_rank(B)
    assert rep.exact_rank <= rep.recursive_bound
    assert rep.exact_rank <= rep.weight_bound
    m, n, e = rep.m, rep.n, rep.e
    assert redundancy_lower_bound(m, e, rep.table.mu0, rep.table.mu1, rep.r, n) <= rep.redundant_rows


@settings(max_examples=100, deadline=None)
@given(base_matrices())
def test_redundancy_floors(B):
    rep = transform_rank(B)
    t = rep.table
    if rep.m <= rep.n and t.count > 1:
        c1 = t.rows[1].size
        assert low_rank_redundancy(rep.m, t.mu1, c1) <= rep.redundant_rows
        if not (B.values == 0).any():
            assert zero_free_redundancy(rep.m, t.mu1, c1) <= rep.redundant_rows


def test_weight_bound_formula():
    assert weight_rank_bound(6, 64, 6, 2, 6) == 6 + sum(comb(6, i) * min(6, 2**i) for i in range(1, 6))
    assert weight_rank_bound(6, 64, 6, 2, 6) == 324


def test_recursive_bound_tracks_table():
    table = build_conjugacy_table(latin_base(make_field(5), 16, 32))
    assert recursive_rank_bound(table) == sum(r.size * r.bound for r in table.rows)


def test_block_size_subgroup():
    ctx = make_field(4)
    # alpha^3 has order 5
    B = BaseMatrix(ctx, [[1, ctx.alpha(3)], [ctx.alpha(6), ctx.alpha(9)]])
    rep = transform_rank(B, block_size=5)
    dense = dispersed_dense(B.values, 4, ctx.primitive_poly)
    assert rep.e == 5
    assert rep.rows == 10
    assert transform_rank(B).exact_rank == rank_gf2_ints(dense)
    with pytest.raises(FieldError):
        transform_rank(BaseMatrix(ctx, [[ctx.alpha(1)]]), block_size=5)
    with pytest.raises(FieldError):
        transform_rank(B, block_size=4)
