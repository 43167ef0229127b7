"""Flooding sum-product and min-sum decoding of binary LDPC codes.

Messages live on the edges of the Tanner graph, stored once sorted by check
node so that every check update is a segmented reduction.  All decoders
work on a batch of frames at once; frames that reach a zero syndrome are
frozen and drop out of the active set.  Redundant parity checks are kept
in the graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fmat import BinaryMatrix, rank_gf2

LLR_CLIP = 30.0
_PHI_MIN = 1e-12


@dataclass(frozen=True, eq=False)
class CodeInstance:
    """Tanner graph of a parity-check matrix.

    Edges are ordered by (check, variable).  ``check_start`` holds the first
    edge of every nonempty check; empty checks are dropped since they are
    always satisfied.
    """

    H: BinaryMatrix
    edge_check: np.ndarray
    edge_var: np.ndarray
    check_start: np.ndarray
    var_order: np.ndarray
    var_start: np.ndarray
    var_ids: np.ndarray
    edge_check_segment: np.ndarray   # index of each edge's check among nonempty checks

    @classmethod
    def from_matrix(cls, H: BinaryMatrix) -> CodeInstance:
        dense = H.to_dense()
        checks, variables = np.nonzero(dense)
        if checks.size == 0:
            raise ValueError("parity-check matrix has no nonzero entries")
        _, check_start, segment = np.unique(checks, return_index=True, return_inverse=True)
        var_order = np.argsort(variables, kind="stable")
        var_ids, var_start = np.unique(variables[var_order], return_index=True)
        return cls(H, checks, variables, check_start, var_order, var_start, var_ids, segment)

    @property
    def N(self) -> int:
        return self.H.ncols

    @property
    def M(self) -> int:
        return self.H.nrows

    @property
    def num_edges(self) -> int:
        return self.edge_var.size

    def syndrome(self, words) -> np.ndarray:
        """Syndrome bits of one word (N,) or a batch (F, N); empty checks omitted."""
        x = np.atleast_2d(np.asarray(words, dtype=np.uint8))
        s = np.add.reduceat(x[:, self.edge_var], self.check_start, axis=1) & 1
        return s if np.ndim(words) == 2 else s[0]

    def variable_sums(self, msgs: np.ndarray) -> np.ndarray:
        """Sum the edge messages (F, E) into variable nodes (F, N)."""
        out = np.zeros((msgs.shape[0], self.N))
        out[:, self.var_ids] = np.add.reduceat(msgs[:, self.var_order], self.var_start, axis=1)
        return out

    def rank(self) -> int:
        return rank_gf2(self.H)


@dataclass
class DecodeResult:
    word: np.ndarray
    converged: bool
    iterations: int
    syndrome_trace: list[int] = field(default_factory=list)


def _phi(x: np.ndarray) -> np.ndarray:
    # phi(x) = -log tanh(x/2) is its own inverse on x > 0
    x = np.clip(x, _PHI_MIN, LLR_CLIP)
    return -np.log(np.tanh(x / 2.0))


def _check_update_spa(code: CodeInstance, v2c: np.ndarray) -> np.ndarray:
    mag = _phi(np.abs(v2c))
    total = np.add.reduceat(mag, code.check_start, axis=1)
    neg = (v2c < 0).astype(np.int64)
    parity = np.add.reduceat(neg, code.check_start, axis=1) & 1
    seg = code.edge_check_segment
    out_mag = _phi(np.maximum(total[:, seg] - mag, _PHI_MIN))
    sign = 1 - 2 * (parity[:, seg] ^ neg)
    return np.clip(sign * out_mag, -LLR_CLIP, LLR_CLIP)


def _check_update_msa(code: CodeInstance, v2c: np.ndarray, scale: float) -> np.ndarray:
    mag = np.abs(v2c)
    seg = code.edge_check_segment
    F, E = mag.shape
    starts = code.check_start
    min1 = np.minimum.reduceat(mag, starts, axis=1)
    # first edge attaining min1 in every check
    is_min = mag == min1[:, seg]
    edge_idx = np.broadcast_to(np.arange(E), (F, E))
    first = np.minimum.reduceat(np.where(is_min, edge_idx, E), starts, axis=1)
    masked = mag.copy()
    masked[np.arange(F)[:, None], first] = np.inf
    min2 = np.minimum.reduceat(masked, starts, axis=1)
    own_min = edge_idx == first[:, seg]
    out_mag = np.where(own_min, min2[:, seg], min1[:, seg])
    # degree-1 checks carry no extrinsic information
    out_mag = np.where(np.isinf(out_mag), 0.0, out_mag)
    neg = (v2c < 0).astype(np.int64)
    parity = np.add.reduceat(neg, starts, axis=1) & 1
    sign = 1 - 2 * (parity[:, seg] ^ neg)
    return np.clip(scale * sign * out_mag, -LLR_CLIP, LLR_CLIP)


def decode_batch(code: CodeInstance, llr, max_iters: int = 50, algorithm: str = "spa",
                 scale: float = 1.0):
    """Decode a batch of LLR frames (F, N).

    Returns ``(words, converged, iterations)``; ``iterations`` is 0 for frames
    whose channel hard decision already has a zero syndrome.
    """
    if algorithm not in ("spa", "msa"):
        raise ValueError(f"unknown algorithm {algorithm!r}")
    llr = np.atleast_2d(np.asarray(llr, dtype=np.float64))
    if llr.shape[1] != code.N:
        raise ValueError(f"expected {code.N} LLRs per frame, got {llr.shape[1]}")
    llr = np.clip(llr, -LLR_CLIP, LLR_CLIP)
    F = llr.shape[0]
    words = (llr < 0).astype(np.uint8)
    converged = ~code.syndrome(words).any(axis=1)
    iterations = np.zeros(F, dtype=np.int64)
    active = np.flatnonzero(~converged)
    v2c = llr[active][:, code.edge_var]
    for it in range(1, max_iters + 1):
        if active.size == 0:
            break
        if algorithm == "spa":
            c2v = _check_update_spa(code, v2c)
        else:
            c2v = _check_update_msa(code, v2c, scale)
        post = llr[active] + code.variable_sums(c2v)
        hard = (post < 0).astype(np.uint8)
        ok = ~code.syndrome(hard).any(axis=1)
        words[active] = hard
        iterations[active] = it
        converged[active[ok]] = True
        keep = ~ok
        active = active[keep]
        v2c = np.clip(post[keep][:, code.edge_var] - c2v[keep], -LLR_CLIP, LLR_CLIP)
    return words, converged, iterations


def _decode_one(code: CodeInstance, llr, max_iters: int, algorithm: str,
                scale: float) -> DecodeResult:
    llr = np.clip(np.asarray(llr, dtype=np.float64), -LLR_CLIP, LLR_CLIP)
    if llr.shape != (code.N,):
        raise ValueError(f"expected {code.N} LLRs, got shape {llr.shape}")
    trace = []
    word = (llr < 0).astype(np.uint8)
    trace.append(int(code.syndrome(word).sum()))
    if trace[0] == 0:
        return DecodeResult(word, True, 0, trace)
    v2c = llr[None, code.edge_var]
    for it in range(1, max_iters + 1):
        if algorithm == "spa":
            c2v = _check_update_spa(code, v2c)
        else:
            c2v = _check_update_msa(code, v2c, scale)
        post = llr[None, :] + code.variable_sums(c2v)
        word = (post[0] < 0).astype(np.uint8)
        trace.append(int(code.syndrome(word).sum()))
        if trace[-1] == 0:
            return DecodeResult(word, True, it, trace)
        v2c = np.clip(post[:, code.edge_var] - c2v, -LLR_CLIP, LLR_CLIP)
    return DecodeResult(word, False, max_iters, trace)


def decode_spa(code: CodeInstance, llr, max_iters: int = 50) -> DecodeResult:
    """Sum-product decoding with a flooding schedule.

    Parameters
    ----------
    code : CodeInstance
        Tanner graph of the parity-check matrix.
    llr : array_like
        Channel LLRs, positive favouring bit 0.
    max_iters : int
        Message-passing iteration cap.

    Returns
    -------
    DecodeResult
        ``syndrome_trace[0]`` is the syndrome weight of the channel hard
        decision, followed by one entry per iteration.
    """
    return _decode_one(code, llr, max_iters, "spa", 1.0)


def decode_msa(code: CodeInstance, llr, max_iters: int = 50, scale: float = 1.0) -> DecodeResult:
    """Min-sum decoding; check messages are multiplied by ``scale``."""
    return _decode_one(code, llr, max_iters, "msa", scale)


# -- Monte Carlo ----------------------------------------------------------

@dataclass(frozen=True)
class MonteCarloResult:
    channel: str
    param: float
    frames: int
    bit_errors: int
    block_errors: int
    ber: float
    bler: float
    mean_iters: float
    converged: int

    def csv_row(self) -> str:
        return (f"{self.param:g},{self.ber:.6e},{self.bler:.6e},{self.mean_iters:.4f}")


CSV_HEADER = "snr,ber,bler,mean_iters"


def awgn_sigma(ebn0_db: float, rate: float) -> float:
    """Noise standard deviation for unit-energy BPSK at the given Eb/N0."""
    ebn0 = 10.0 ** (ebn0_db / 10.0)
    return float(np.sqrt(1.0 / (2.0 * rate * ebn0)))


def _frame_llrs(channel: str, param: float, n: int, rng: np.random.Generator,
                sigma: float) -> np.ndarray:
    # all-zero codeword, BPSK 0 -> +1
    if channel == "awgn":
        y = 1.0 + sigma * rng.standard_normal(n)
        return 2.0 * y / sigma**2
    flips = rng.random(n) < param
    if param <= 0.0:
        mag = LLR_CLIP
    else:
        mag = min(LLR_CLIP, float(np.log((1.0 - param) / param)))
    return np.where(flips, -mag, mag)


def monte_carlo(code: CodeInstance, channel: str, param: float, frames: int,
                max_iters: int = 50, seed: int = 0, algorithm: str = "spa",
                scale: float = 1.0, rate: float | None = None,
                batch: int = 512) -> MonteCarloResult:
    """Simulate the all-zero codeword over an AWGN (Eb/N0 in dB) or BSC channel.

    Frame k draws its noise from the k-th child of ``SeedSequence(seed)``, so
    results do not depend on ``batch``.  The code rate used for the AWGN noise
    level defaults to (N - rank H) / N.
    """
    if frames < 1:
        raise ValueError("need at least one frame")
    if channel not in ("awgn", "bsc"):
        raise ValueError(f"unknown channel {channel!r}")
    if channel == "bsc" and not 0.0 <= param <= 0.5:
        raise ValueError("BSC crossover probability must lie in [0, 0.5]")
    n = code.N
    if rate is None:
        rate = (n - code.rank()) / n
    sigma = awgn_sigma(param, rate) if channel == "awgn" else 0.0
    children = np.random.SeedSequence(seed).spawn(frames)
    bit_errors = block_errors = converged_total = 0
    iter_total = 0
    for lo in range(0, frames, batch):
        chunk = children[lo:lo + batch]
        llr = np.stack([_frame_llrs(channel, param, n, np.random.default_rng(s), sigma)
                        for s in chunk])
        words, conv, iters = decode_batch(code, llr, max_iters, algorithm, scale)
        if conv.any() and code.syndrome(words[conv]).any():
            raise AssertionError("decoder reported convergence with a nonzero syndrome")
        errs = words.sum(axis=1)
        bit_errors += int(errs.sum())
        block_errors += int((errs > 0).sum())
        converged_total += int(conv.sum())
        iter_total += int(iters.sum())
    return MonteCarloResult(
        channel=channel,
        param=float(param),
        frames=frames,
        bit_errors=bit_errors,
        block_errors=block_errors,
        ber=bit_errors / (frames * n),
        bler=block_errors / frames,
        mean_iters=iter_total / frames,
        converged=converged_total,
    )


def random_regular_code(rows: int, cols: int, col_weight: int, seed: int = 0,
                        girth6: bool = True, max_restarts: int = 50) -> BinaryMatrix:
    """Column-regular random parity-check matrix with near-uniform row weights.

    Column j gets ``col_weight`` distinct checks taken greedily from the least
    loaded rows with random tie-breaking.  With ``girth6`` no two columns may
    share two checks, so the Tanner graph has no 4-cycles.
    """
    if not 1 <= col_weight <= rows:
        raise ValueError("column weight must lie in [1, rows]")
    rng = np.random.default_rng(seed)
    for _ in range(max_restarts):
        dense = np.zeros((rows, cols), dtype=np.uint8)
        load = np.zeros(rows, dtype=np.int64)
        paired = np.zeros((rows, rows), dtype=bool)
        for j in range(cols):
            picked: list[int] = []
            for i in np.lexsort((rng.random(rows), load)):
                if girth6 and picked and paired[i, picked].any():
                    continue
                picked.append(int(i))
                if len(picked) == col_weight:
                    break
            if len(picked) < col_weight:
                break
            dense[picked, j] = 1
            load[picked] += 1
            paired[np.ix_(picked, picked)] = True
        else:
            return BinaryMatrix.from_dense(dense)
    raise ValueError("could not place all columns without 4-cycles")
