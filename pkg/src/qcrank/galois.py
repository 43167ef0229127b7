"""Arithmetic in GF(2^r) via log/antilog tables, cyclotomic cosets of 2
modulo e, and the length-e Fourier transform pair over GF(2^r).

Field elements are plain integers in the polynomial basis (bit i is the
coefficient of x^i), so addition is XOR and 0 is the zero element.  The
exponent view maps a nonzero element x to the unique k in [0, e) with
alpha^k = x; the zero element has no exponent and ``log(0)`` raises.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

# Minimal-weight primitive polynomials (bit i = coefficient of x^i).
PRIMITIVE_POLYS = {
    2: 0b111,                  # x^2 + x + 1
    3: 0b1011,                 # x^3 + x + 1
    4: 0b10011,                # x^4 + x + 1
    5: 0b100101,               # x^5 + x^2 + 1
    6: 0b1000011,              # x^6 + x + 1
    7: 0b10001001,             # x^7 + x^3 + 1
    8: 0b100011101,            # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,           # x^9 + x^4 + 1
    10: 0b10000001001,         # x^10 + x^3 + 1
    11: 0b100000000101,        # x^11 + x^2 + 1
    12: 0b1000001010011,       # x^12 + x^6 + x^4 + x + 1
    13: 0b10000000011011,      # x^13 + x^4 + x^3 + x + 1
    14: 0b100010001000011,     # x^14 + x^10 + x^6 + x + 1
    15: 0b1000000000000011,    # x^15 + x + 1
    16: 0b10001000000001011,   # x^16 + x^12 + x^3 + x + 1
}


class FieldError(ValueError):
    """Raised for unsupported fields or operations outside the field contract."""


@dataclass(frozen=True, eq=False)
class FieldContext:
    """A concrete GF(2^r) with primitive element alpha = x.

    Attributes
    ----------
    r : int
        Extension degree.
    primitive_poly : int
        Bitmask of the defining primitive polynomial.
    antilog_table : np.ndarray
        ``antilog_table[k] = alpha^k`` for ``0 <= k < 2e`` (doubled so that
        sums of two exponents need no reduction).
    log_table : np.ndarray
        ``log_table[x]`` for nonzero x; entry 0 is a placeholder never read
        for the zero element.
    """

    r: int
    primitive_poly: int
    antilog_table: np.ndarray = field(repr=False)
    log_table: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return 1 << self.r

    @property
    def e(self) -> int:
        return (1 << self.r) - 1

    def __eq__(self, other):
        return (
            isinstance(other, FieldContext)
            and self.r == other.r
            and self.primitive_poly == other.primitive_poly
        )

    def __hash__(self):
        return hash((self.r, self.primitive_poly))

    # -- scalar / exponent views ------------------------------------------
    def alpha(self, k) -> np.ndarray | int:
        """alpha^k for integer (or integer-array) exponents, reduced mod e."""
        k = np.mod(k, self.e)
        out = self.antilog_table[k]
        return int(out) if np.ndim(out) == 0 else out

    def log(self, x) -> np.ndarray | int:
        x = np.asarray(x)
        if np.any(x == 0):
            raise FieldError("log of the zero element is undefined")
        if np.any((x < 0) | (x >= self.q)):
            raise FieldError("value outside the field")
        out = self.log_table[x]
        return int(out) if out.ndim == 0 else out

    def to_exponents(self, x) -> np.ndarray:
        """Exponent grid with -1 marking the zero element."""
        x = np.asarray(x, dtype=np.int64)
        return np.where(x == 0, -1, self.log_table[x])

    def from_exponents(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=np.int64)
        if np.any(k < -1):
            raise FieldError("exponent grid may use -1 only for zero")
        return np.where(k < 0, 0, self.antilog_table[np.mod(k, self.e)])

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    # -- vectorised arithmetic --------------------------------------------
    def add(self, a, b):
        return np.bitwise_xor(a, b)

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        prod = self.antilog_table[self.log_table[a] + self.log_table[b]]
        out = np.where((a == 0) | (b == 0), 0, prod)
        return int(out) if out.ndim == 0 else out

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise FieldError("zero has no multiplicative inverse")
        out = self.antilog_table[(self.e - self.log_table[a]) % self.e]
        return int(out) if out.ndim == 0 else out

    def power(self, a, t: int):
        """Element-wise a^t with the convention 0^0 = 0 (and x^0 = 1 otherwise)."""
        if t < 0:
            raise FieldError("negative powers are not supported")
        a = np.asarray(a, dtype=np.int64)
        out = np.where(a == 0, 0, self.antilog_table[(self.log_table[a] * t) % self.e])
        return int(out) if out.ndim == 0 else out


def _build_tables(r: int, poly: int) -> tuple[np.ndarray, np.ndarray]:
    q, e = 1 << r, (1 << r) - 1
    antilog = np.zeros(2 * e, dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    x = 1
    for k in range(e):
        if k > 0 and x == 1:
            raise FieldError(f"polynomial {poly:#x} is not primitive for r={r}")
        antilog[k] = x
        log[x] = k
        x <<= 1
        if x & q:
            x ^= poly
    if x != 1:
        raise FieldError(f"polynomial {poly:#x} is not primitive for r={r}")
    antilog[e:] = antilog[:e]
    return antilog, log


@lru_cache(maxsize=None)
def make_field(r: int) -> FieldContext:
    """Build GF(2^r) from the fixed primitive polynomial table (2 <= r <= 16)."""
    if r not in PRIMITIVE_POLYS:
        raise FieldError(f"unsupported extension degree r={r} (need 2 <= r <= 16)")
    poly = PRIMITIVE_POLYS[r]
    antilog, log = _build_tables(r, poly)
    antilog.setflags(write=False)
    log.setflags(write=False)
    return FieldContext(r=r, primitive_poly=poly, antilog_table=antilog, log_table=log)


@dataclass(frozen=True)
class Coset:
    representative: int
    members: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class CyclotomicCosets:
    """Cosets of 2 modulo e, ordered by increasing representative."""

    e: int
    cosets: tuple[Coset, ...]

    @property
    def count(self) -> int:
        return len(self.cosets)

    def __len__(self):
        return len(self.cosets)

    def __iter__(self):
        return iter(self.cosets)

    def __getitem__(self, i) -> Coset:
        return self.cosets[i]

    def index_of(self, t: int) -> int:
        """Index of the coset containing t (mod e)."""
        return self._lookup[t % self.e]

    @property
    def _lookup(self) -> dict[int, int]:
        table = self.__dict__.get("_lookup_cache")
        if table is None:
            table = {t: i for i, c in enumerate(self.cosets) for t in c.members}
            object.__setattr__(self, "_lookup_cache", table)
        return table


@lru_cache(maxsize=None)
def cyclotomic_cosets(e: int) -> CyclotomicCosets:
    """Partition {0, ..., e-1} into orbits under doubling mod e.

    Each new coset starts from the smallest integer not yet covered, which
    is then its representative.
    """
    if e < 1:
        raise ValueError("modulus must be positive")
    seen = bytearray(e)
    cosets = []
    for t in range(e):
        if seen[t]:
            continue
        members = [t]
        seen[t] = 1
        s = (2 * t) % e
        while s != t:
            members.append(s)
            seen[s] = 1
            s = (2 * s) % e
        cosets.append(Coset(t, tuple(members)))
    return CyclotomicCosets(e, tuple(cosets))


def _transform(vec, ctx: FieldContext, sign: int) -> np.ndarray:
    v = np.asarray(vec, dtype=np.int64)
    e = ctx.e
    if v.ndim != 1 or v.shape[0] != e:
        raise ValueError(f"expected a vector of length {e}, got shape {v.shape}")
    if np.any((v < 0) | (v >= ctx.q)):
        raise FieldError("vector entries must be field elements")
    idx = np.arange(e, dtype=np.int64)
    expo = (sign * np.outer(idx, idx)) % e  # [t, l] -> exponent of alpha
    terms = ctx.mul(v[None, :], ctx.antilog_table[expo])
    return np.bitwise_xor.reduce(terms, axis=1)


def fourier(a, ctx: FieldContext) -> np.ndarray:
    """b_t = sum_l a_l alpha^(l t) for a length-e vector over GF(2) or GF(q)."""
    return _transform(a, ctx, +1)


def inverse_fourier(b, ctx: FieldContext) -> np.ndarray:
    """a_l = sum_t b_t alpha^(-l t).  Binary output iff b meets the conjugacy constraint."""
    return _transform(b, ctx, -1)


def satisfies_conjugacy(b, ctx: FieldContext) -> bool:
    """True when b_{(2t) mod e} = b_t^2 for every t."""
    b = np.asarray(b, dtype=np.int64)
    t = np.arange(ctx.e)
    return bool(np.all(b[(2 * t) % ctx.e] == ctx.mul(b, b)))
