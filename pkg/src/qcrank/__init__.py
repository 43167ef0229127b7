"""Rank analysis and construction of quasi-cyclic LDPC codes from base matrices over GF(2^r)."""

from .constructions import (
    burst_erasure_check,
    consecutive_partition,
    cyclic_mask,
    diamond_base,
    latin_base,
    latin_rank_formula,
    partition_base,
    partition_rank_formula,
    product_like_base,
    vandermonde_base,
)
from .decoder import CodeInstance, DecodeResult, decode_msa, decode_spa, monte_carlo
from .dispersion import DispersedArray, MaskMatrix, apply_mask, disperse, disperse_alpha, expand
from .fmat import (
    BaseMatrix,
    BinaryMatrix,
    hadamard,
    hadamard_power,
    rank_gf2,
    rank_gfq,
    rc_constraint_check,
    sm_constraint_check,
)
from .galois import FieldContext, cyclotomic_cosets, fourier, inverse_fourier, make_field
from .transform import (
    RankReport,
    build_conjugacy_table,
    recursive_rank_bound,
    redundancy_lower_bound,
    transform_rank,
    weight_rank_bound,
)

__version__ = "0.1.0"
