"""End-to-end acceptance checks, one criterion label per group of tests.

Run ``pytest tests/test_acceptance.py -v`` and read the "acceptance criteria"
section of the terminal summary for one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

from oracles import dispersed_dense, rank_gf2_ints, sm_violations
from qcrank import constructions as C
from qcrank.decoder import CodeInstance, decode_spa, monte_carlo, random_regular_code
from qcrank.dispersion import disperse, disperse_alpha, expand
from qcrank.fmat import (
    BaseMatrix,
    gfq_rank,
    hadamard,
    hadamard_power,
    rank_gf2,
    rank_gfq,
    rc_constraint_check,
    sm_constraint_check,
)
from qcrank.galois import make_field
from qcrank.transform import build_conjugacy_table, transform_rank

criterion = pytest.mark.criterion

# per-class (size, rank) for the 64x64 Latin base over GF(64), in coset order
LATIN64_CLASSES = [(1, 64), (6, 2), (6, 4), (6, 4), (6, 8), (3, 4), (6, 8), (6, 8),
                   (6, 16), (2, 8), (6, 16), (3, 16), (6, 32)]


def random_base(rng, r, max_m=8, max_n=12, zero_prob=None):
    ctx = make_field(r)
    m = int(rng.integers(1, max_m + 1))
    n = int(rng.integers(1, max_n + 1))
    v = rng.integers(1, ctx.q, size=(m, n))
    p = rng.choice([0.0, 0.2, 0.5]) if zero_prob is None else zero_prob
    v[rng.random((m, n)) < p] = 0
    return BaseMatrix(ctx, v)


# -- fixed constructions -----------------------------------------------------

@criterion("1. latin 64x64 over GF(64): rank 728, 3304 redundant rows, class table, < 5 s")
def test_latin_64_square(verdict):
    start = time.perf_counter()
    rep = transform_rank(C.latin_base(make_field(6), 64, 64))
    elapsed = time.perf_counter() - start
    verdict.note(f"rank {rep.exact_rank}, {elapsed:.2f} s")
    assert rep.exact_rank == 728
    assert rep.redundant_rows == 3304
    assert round(rep.redundancy, 4) == 0.8194
    assert rep.table.count == 13
    assert [(row.size, row.rank) for row in rep.table.rows] == LATIN64_CLASSES
    assert elapsed < 5.0
    verdict(f"rank 728, redundancy {rep.redundancy:.4f}, {elapsed:.2f} s")


@criterion("2. latin 6x64 over GF(64): rank 324 equals the weight bound")
def test_latin_six_rows(verdict):
    rep = transform_rank(C.latin_base(make_field(6), 6, 64))
    verdict.note(f"rank {rep.exact_rank}, weight bound {rep.weight_bound}")
    assert rep.exact_rank == 324
    assert rep.weight_bound == 324
    verdict(f"rank {rep.exact_rank} = weight bound {rep.weight_bound}")


@criterion("3. consecutive partition GF(64), m=6: formula 319 = transform rank")
def test_partition_gf64(verdict):
    ctx = make_field(6)
    part = C.consecutive_partition(ctx, 6)
    B = C.partition_base(ctx, part.g1, part.g2)
    formula = C.partition_rank_formula(ctx, 6)
    exact = transform_rank(B).exact_rank
    verdict.note(f"formula {formula}, transform {exact}")
    assert formula == exact == 319
    verdict(f"formula {formula} = transform {exact}")


@criterion("4. consecutive partition GF(32), m=4: 111 by formula, transform and alpha-array rank, < 10 s")
def test_partition_gf32_alpha_array(verdict):
    start = time.perf_counter()
    ctx = make_field(5)
    part = C.consecutive_partition(ctx, 4)
    B = C.partition_base(ctx, part.g1, part.g2)
    assert B.shape == (4, 28)
    formula = C.partition_rank_formula(ctx, 4)
    exact = transform_rank(B).exact_rank
    alpha = expand(disperse_alpha(B))
    assert alpha.shape == (124, 868)
    alpha_rank = gfq_rank(ctx, alpha)
    elapsed = time.perf_counter() - start
    verdict.note(f"formula {formula}, transform {exact}, GF(32) elimination {alpha_rank}")
    assert formula == exact == alpha_rank == 111
    assert elapsed < 10.0
    verdict(f"111 three ways, {elapsed:.2f} s")


@pytest.fixture(scope="module")
def diamond():
    ctx = make_field(5)
    B = C.diamond_base(C.latin_base(ctx, 6, 24, 0, 6))
    return B, expand(disperse(B))


@criterion("5. diamond GF(32): 372x1488, rank 327, 45 redundant rows, bursts <= 155, < 60 s")
def test_diamond_rank(diamond, verdict):
    start = time.perf_counter()
    B, H = diamond
    rep = transform_rank(B)
    slow = rank_gf2(H)
    elapsed = time.perf_counter() - start
    verdict.note(f"transform {rep.exact_rank}, elimination {slow}")
    assert H.shape == (372, 1488)
    assert rep.exact_rank == slow == 327
    assert rep.redundant_rows == 45
    assert elapsed < 60.0
    verdict(f"rank 327 both ways, 45 redundant rows, {elapsed:.2f} s")


@criterion("5. diamond GF(32): 372x1488, rank 327, 45 redundant rows, bursts <= 155, < 60 s")
def test_diamond_burst_erasures(diamond, verdict):
    start = time.perf_counter()
    _, H = diamond
    rep = C.burst_erasure_check(H, 155)
    elapsed = time.perf_counter() - start
    verdict.note(f"max correctable burst {rep.correctable}, first failing start {rep.failing_start}")
    assert rep.ok, f"bursts up to {rep.correctable} correctable, 155 requested"
    assert elapsed < 60.0
    verdict(f"bursts <= 155 correctable, {elapsed:.2f} s")


@criterion("6. masked GF(64) array: mask circulant rank 3, 567x3276 with 24 redundant rows")
def test_masked_array(verdict):
    h = C.cyclic_parity_vector(0b1101, 63)
    phi_rank = rank_gf2_ints(C.circulant(h))
    desc = {"family": "masked", "r": 6, "m": 9, "generator": 0b1101,
            "shifts": [0, 0, 0, 3, 3, 4, 4, 5, 5], "col_weights": [5, 4], "col_counts": [26, 26]}
    B, _ = C.build_from_descriptor(desc)
    rep = transform_rank(B)
    H = expand(disperse(B))
    slow = H.shape[0] - rank_gf2(H)
    verdict.note(f"circulant rank {phi_rank}, redundant rows {rep.redundant_rows} / {slow}")
    assert phi_rank == 3
    assert H.shape == (567, 3276)
    assert rep.redundant_rows == slow >= 24
    assert rep.redundant_rows == 24
    verdict(f"circulant rank 3, {rep.redundant_rows} redundant rows both ways")


# -- randomized sweeps ---------------------------------------------------------

@criterion("7. 200 random bases, r in 2..5, up to 8x12: transform rank = GF(2) elimination")
def test_oracle_equivalence_sweep(verdict):
    rng = np.random.default_rng(20240607)
    failures = []
    for k in range(200):
        r = (2, 3, 4, 5)[k % 4]
        B = random_base(rng, r)
        fast = transform_rank(B).exact_rank
        slow = rank_gf2(expand(disperse(B)))
        scratch = rank_gf2_ints(dispersed_dense(B.values, r, B.ctx.primitive_poly))
        if not fast == slow == scratch:
            failures.append((k, r, B.shape, fast, slow, scratch))
    verdict.note(f"{len(failures)} failures")
    assert failures == []
    verdict("200/200 agree")


@criterion("8. rank identities: conjugate invariance, product bound, SM <=> RC, bounds >= rank (500 each)")
def test_conjugate_invariance(verdict):
    rng = np.random.default_rng(1)
    bad = 0
    for k in range(500):
        B = random_base(rng, (2, 3, 4, 5)[k % 4], 6, 8)
        for row in build_conjugacy_table(B).rows:
            bad += any(rank_gfq(hadamard_power(B, t)) != row.rank for t in row.members)
    assert bad == 0
    verdict("conjugate invariance 500/500")


@criterion("8. rank identities: conjugate invariance, product bound, SM <=> RC, bounds >= rank (500 each)")
def test_hadamard_product_bound(verdict):
    rng = np.random.default_rng(2)
    bad = 0
    for k in range(500):
        B = random_base(rng, (2, 3, 4, 5)[k % 4], 6, 8)
        s, t = (int(x) for x in rng.integers(0, B.ctx.e, size=2))
        lhs = rank_gfq(hadamard(hadamard_power(B, s), hadamard_power(B, t)))
        bad += lhs > rank_gfq(hadamard_power(B, s)) * rank_gfq(hadamard_power(B, t))
    assert bad == 0
    verdict("product bound 500/500")


@criterion("8. rank identities: conjugate invariance, product bound, SM <=> RC, bounds >= rank (500 each)")
def test_sm_rc_equivalence(verdict):
    rng = np.random.default_rng(3)
    bad = 0
    seen = {True: 0, False: 0}
    for k in range(500):
        r = (2, 3, 4)[k % 3]
        B = random_base(rng, r, 4, 5)
        sm_ok = sm_constraint_check(B) is None
        assert sm_ok == (not sm_violations(B.values, r, B.ctx.primitive_poly))
        rc_ok = rc_constraint_check(expand(disperse(B))) is None
        seen[sm_ok] += 1
        bad += sm_ok != rc_ok
    assert bad == 0
    # both outcomes must be exercised for the equivalence to mean anything
    assert min(seen.values()) >= 50
    verdict(f"SM <=> RC 500/500 ({seen[True]} satisfied, {seen[False]} violated)")


@criterion("8. rank identities: conjugate invariance, product bound, SM <=> RC, bounds >= rank (500 each)")
def test_bounds_dominate(verdict):
    rng = np.random.default_rng(4)
    bad = 0
    for k in range(500):
        rep = transform_rank(random_base(rng, (2, 3, 4, 5)[k % 4]))
        bad += rep.recursive_bound < rep.exact_rank or rep.weight_bound < rep.exact_rank
    assert bad == 0
    verdict("bounds 500/500")


@pytest.mark.slow
@criterion("9. latin sweep r = 3..5: closed form = elimination, subarray relations hold")
def test_latin_sweep(verdict):
    failures, count = [], 0
    for r in (3, 4, 5):
        ctx = make_field(r)
        q = ctx.q
        for m in range(1, q + 1):
            for n in range(1, q + 1):
                if 2 * m < q and 2 * n < q:
                    continue
                count += 1
                slow = rank_gf2(expand(disperse(C.latin_base(ctx, m, n))))
                if C.latin_rank_formula(ctx, m, n) != slow:
                    failures.append((r, m, n))
        for n in range(1, q + 1):
            count += 1
            if not C.latin_redundant_subarray_equalities(ctx, n).ok:
                failures.append((r, "subarray", n))
    verdict.note(f"{len(failures)} failures of {count}")
    assert failures == []
    verdict(f"{count} instances, zero failures")


@criterion("10. vandermonde sweep r = 3..5: dispersed rank m p - m + 1 for m <= n <= p")
def test_vandermonde_sweep(verdict):
    failures, count = [], 0
    for r in (3, 4, 5):
        ctx = make_field(r)
        p = C.vandermonde_params(ctx).p
        for m in range(1, p + 1):
            for n in range(m, p + 1):
                count += 1
                slow = rank_gf2(expand(disperse(C.vandermonde_base(ctx, m, n), p)))
                if slow != m * p - m + 1 or C.vandermonde_rank_formula(ctx, m, n) != slow:
                    failures.append((r, m, n, slow))
        full = rank_gf2(expand(disperse(C.vandermonde_base(ctx, p, p), p)))
        if full != 1 + (p - 1) * p:
            failures.append((r, "square", full))
    verdict.note(f"{len(failures)} failures of {count}")
    assert failures == []
    verdict(f"{count} instances, zero failures")


# -- decoding ------------------------------------------------------------------

MID_WATERFALL_DB = 3.25


@criterion("11. decoder: converged => zero syndrome over 10^4 frames, noiseless in 0 iterations")
def test_decoder_noiseless(diamond, verdict):
    code = CodeInstance.from_matrix(diamond[1])
    res = decode_spa(code, np.full(code.N, 6.0))
    assert res.converged and res.iterations == 0
    verdict("noiseless 0 iterations")


@pytest.mark.slow
@criterion("11. decoder: converged => zero syndrome over 10^4 frames, noiseless in 0 iterations")
def test_decoder_soundness_and_iterations(diamond, verdict):
    # monte_carlo raises AssertionError when a converged frame has a nonzero syndrome
    code = CodeInstance.from_matrix(diamond[1])
    baseline = CodeInstance.from_matrix(random_regular_code(372, 1488, 6, seed=0, girth6=True))
    res = monte_carlo(code, "awgn", MID_WATERFALL_DB, 10_000, 50, seed=6)
    ref = monte_carlo(baseline, "awgn", MID_WATERFALL_DB, 10_000, 50, seed=6)
    assert res.frames == ref.frames == 10_000
    print(f"\n{MID_WATERFALL_DB} dB, SPA, 50 iterations, 10^4 frames each")
    print(f"  diamond (rank 327):  BLER {res.bler:.4f}  BER {res.ber:.2e}  mean iters {res.mean_iters:.2f}")
    print(f"  baseline (rank {baseline.rank()}): BLER {ref.bler:.4f}  BER {ref.ber:.2e}  "
          f"mean iters {ref.mean_iters:.2f}")
    verdict(f"2x10^4 frames sound; mean iters diamond {res.mean_iters:.2f} vs baseline "
            f"{ref.mean_iters:.2f} at {MID_WATERFALL_DB} dB")
