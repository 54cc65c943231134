"""Successive-cancellation and list engines for channel decoding and lossy source encoding.

All kernels work in natural index order on a binary tree of depth n = log2(N). Depth d holds
N >> d LLRs per node; the nodes of one depth along the active path share a single slot of
length N >> d, so a path needs 2N - 1 LLRs and two such partial-sum slots (left/right child).
Slot d starts at offset 2N - 2 (N >> d).

The path metric is the accumulated penalty softplus(-(1 - 2u) a) of every decision u taken
on a leaf LLR a, which is the negative log posterior of the path up to a constant.
"""
import logging
import math
from typing import NamedTuple

import numpy as np
from numba import njit, prange

from .crc import crc_passes
from .model import DecodeInput, EncoderMode, PolarCode, SourceEncodeInput
from .polar_core import BitLike, hamming_weight

logger = logging.getLogger(__name__)

LLR_CLAMP = 40.0


class SclDecodeResult(NamedTuple):
    u_hat: np.ndarray
    metric: float
    crc_ok: bool


class SourceEncodeResult(NamedTuple):
    s_prime: np.ndarray
    u: np.ndarray
    distortion: float


class ListOutput(NamedTuple):
    u_paths: np.ndarray
    x_paths: np.ndarray
    metrics: np.ndarray


@njit(cache=True)
def _boxplus(a, b):
    # exact 2 atanh(tanh(a/2) tanh(b/2))
    sign = 1.0 if (a >= 0.0) == (b >= 0.0) else -1.0
    return (sign * min(abs(a), abs(b)) + math.log1p(math.exp(-abs(a + b)))
            - math.log1p(math.exp(-abs(a - b))))


@njit(cache=True)
def _softplus(z):
    return max(z, 0.0) + math.log1p(math.exp(-abs(z)))


@njit(cache=True)
def _offset(N, depth):
    return 2 * N - 2 * (N >> depth)


@njit(cache=True)
def _descend(alpha, beta, leaf, n, N):
    """Fill the LLR slots from the deepest still-valid depth down to the leaf."""
    start = 0
    if leaf > 0:
        k = 0
        while (leaf >> k) & 1 == 0:
            k += 1
        depth = n - k
        half = N >> depth
        parent = _offset(N, depth - 1)
        child = _offset(N, depth)
        for j in range(half):
            if beta[0, child + j]:
                alpha[child + j] = alpha[parent + j + half] - alpha[parent + j]
            else:
                alpha[child + j] = alpha[parent + j + half] + alpha[parent + j]
        start = depth
    for depth in range(start, n):
        half = N >> (depth + 1)
        parent = _offset(N, depth)
        child = _offset(N, depth + 1)
        for j in range(half):
            alpha[child + j] = _boxplus(alpha[parent + j], alpha[parent + j + half])


@njit(cache=True)
def _ascend(beta, leaf, bit, n, N):
    """Store a leaf decision and combine partial sums upward while the node is a right child."""
    beta[leaf & 1, _offset(N, n)] = bit
    node = leaf
    depth = n
    while depth > 0 and node & 1 == 1:
        half = N >> depth
        child = _offset(N, depth)
        parent = _offset(N, depth - 1)
        node >>= 1
        side = node & 1 if depth > 1 else 0
        for j in range(half):
            left = beta[0, child + j]
            right = beta[1, child + j]
            beta[side, parent + j] = left ^ right
            beta[side, parent + j + half] = right
        depth -= 1


@njit(cache=True)
def _sc_kernel(llr, frozen_mask, frozen_values, uniforms, sample, u, x, leaf_llr):
    N = llr.size
    n = 0
    while (1 << n) < N:
        n += 1
    alpha = np.empty(2 * N - 1)
    beta = np.zeros((2, 2 * N - 1), dtype=np.uint8)
    alpha[:N] = llr
    leaf_slot = 2 * N - 2
    metric = 0.0
    for i in range(N):
        _descend(alpha, beta, i, n, N)
        a = alpha[leaf_slot]
        leaf_llr[i] = a
        if frozen_mask[i]:
            bit = np.int64(frozen_values[i])
        elif sample:
            bit = 0 if uniforms[i] < 1.0 / (1.0 + math.exp(-a)) else 1
        else:
            bit = 0 if metric + _softplus(-a) <= metric + _softplus(a) else 1
        if bit == 0:
            metric += _softplus(-a)
        else:
            metric += _softplus(a)
        u[i] = bit
        _ascend(beta, i, bit, n, N)
    for j in range(N):
        x[j] = beta[0, j]
    return metric


# pylint: disable=too-many-locals,too-many-branches,too-many-statements
@njit(cache=True)
def _scl_kernel(llr, frozen_mask, frozen_values, list_size, u_out, x_out, metric_out):
    N = llr.size
    n = 0
    while (1 << n) < N:
        n += 1
    L = list_size
    alpha = np.empty((L, 2 * N - 1))
    beta = np.zeros((L, 2, 2 * N - 1), dtype=np.uint8)
    u = np.zeros((L, N), dtype=np.uint8)
    pm = np.zeros(L)
    active = np.zeros(L, dtype=np.bool_)
    alpha[0, :N] = llr
    active[0] = True
    leaf_slot = 2 * N - 2
    cand_metric = np.empty(2 * L)
    cand_path = np.empty(2 * L, dtype=np.int64)
    cand_bit = np.empty(2 * L, dtype=np.uint8)
    keep0 = np.zeros(L, dtype=np.bool_)
    keep1 = np.zeros(L, dtype=np.bool_)
    leaf = np.zeros(L)

    for i in range(N):
        for path in range(L):
            if active[path]:
                _descend(alpha[path], beta[path], i, n, N)
                leaf[path] = alpha[path, leaf_slot]

        if frozen_mask[i]:
            bit = np.int64(frozen_values[i])
            for path in range(L):
                if active[path]:
                    if bit == 0:
                        pm[path] += _softplus(-leaf[path])
                    else:
                        pm[path] += _softplus(leaf[path])
                    u[path, i] = bit
                    _ascend(beta[path], i, bit, n, N)
            continue

        # candidates in path order, bit 0 before bit 1; a stable sort keeps that order on ties
        count = 0
        for path in range(L):
            if active[path]:
                cand_metric[count] = pm[path] + _softplus(-leaf[path])
                cand_path[count] = path
                cand_bit[count] = 0
                count += 1
                cand_metric[count] = pm[path] + _softplus(leaf[path])
                cand_path[count] = path
                cand_bit[count] = 1
                count += 1
        order = np.argsort(cand_metric[:count], kind="mergesort")
        keep = min(L, count)
        keep0[:] = False
        keep1[:] = False
        for t in range(keep):
            c = order[t]
            if cand_bit[c] == 0:
                keep0[cand_path[c]] = True
            else:
                keep1[cand_path[c]] = True

        was_active = active.copy()
        for path in range(L):
            if was_active[path] and not keep0[path] and not keep1[path]:
                active[path] = False

        for path in range(L):
            if not was_active[path] or not (keep0[path] or keep1[path]):
                continue
            a = leaf[path]
            if keep0[path] and keep1[path]:
                f = 0
                while active[f]:
                    f += 1
                alpha[f] = alpha[path]
                beta[f] = beta[path]
                u[f] = u[path]
                pm[f] = pm[path] + _softplus(a)
                u[f, i] = 1
                _ascend(beta[f], i, 1, n, N)
                active[f] = True
                pm[path] = pm[path] + _softplus(-a)
                u[path, i] = 0
                _ascend(beta[path], i, 0, n, N)
            elif keep0[path]:
                pm[path] = pm[path] + _softplus(-a)
                u[path, i] = 0
                _ascend(beta[path], i, 0, n, N)
            else:
                pm[path] = pm[path] + _softplus(a)
                u[path, i] = 1
                _ascend(beta[path], i, 1, n, N)

    survivors = np.empty(L, dtype=np.int64)
    count = 0
    for path in range(L):
        if active[path]:
            survivors[count] = path
            count += 1
    ranked = survivors[:count][np.argsort(pm[survivors[:count]], kind="mergesort")]
    for r in range(count):
        path = ranked[r]
        u_out[r] = u[path]
        for j in range(N):
            x_out[r, j] = beta[path, 0, j]
        metric_out[r] = pm[path]
    return count


@njit(cache=True, parallel=True)
def _genie_leaf_llrs(llr_batch, frozen_mask, frozen_values, leaf_out):
    trials, N = llr_batch.shape
    for t in prange(trials):  # pylint: disable=not-an-iterable
        u = np.empty(N, dtype=np.uint8)
        x = np.empty(N, dtype=np.uint8)
        _sc_kernel(llr_batch[t], frozen_mask, frozen_values, np.empty(0), False, u, x, leaf_out[t])


def clamp_llr(llr: np.ndarray) -> np.ndarray:
    return np.clip(np.asarray(llr, dtype=np.float64), -LLR_CLAMP, LLR_CLAMP)


def bsc_llr(y: BitLike, p: float) -> np.ndarray:
    bits = np.asarray(y, dtype=np.float64)
    return clamp_llr((1.0 - 2.0 * bits) * math.log((1.0 - p) / p))


def sc_decode(decode_input: DecodeInput) -> np.ndarray:
    code = decode_input.code
    u = np.empty(code.N, dtype=np.uint8)
    x = np.empty(code.N, dtype=np.uint8)
    leaf = np.empty(code.N)
    _sc_kernel(clamp_llr(decode_input.llr), code.frozen_mask(), code.frozen_vector(), np.empty(0), False, u, x, leaf)
    return u


def sc_leaf_llrs(llr: np.ndarray, code: PolarCode) -> np.ndarray:
    """Decision LLRs a genie-aided SC decoder sees, one row per row of `llr`, given the true u = frozen vector."""
    batch = np.atleast_2d(clamp_llr(llr))
    mask = np.ones(code.N, dtype=np.bool_)
    leaf = np.empty(batch.shape, dtype=np.float64)
    _genie_leaf_llrs(batch, mask, code.frozen_vector(), leaf)
    return leaf


def run_list(llr: np.ndarray, code: PolarCode, list_size: int) -> ListOutput:
    u_out = np.zeros((list_size, code.N), dtype=np.uint8)
    x_out = np.zeros((list_size, code.N), dtype=np.uint8)
    metric_out = np.zeros(list_size)
    count = _scl_kernel(clamp_llr(llr), code.frozen_mask(), code.frozen_vector(), list_size, u_out, x_out,
                        metric_out)
    return ListOutput(u_out[:count], x_out[:count], metric_out[:count])


def scl_decode(decode_input: DecodeInput) -> SclDecodeResult:
    """CRC-aided list decoding: best CRC-passing path, else the best path flagged crc_ok = False."""
    paths = run_list(decode_input.llr, decode_input.code, decode_input.list_size)
    if decode_input.crc is None:
        return SclDecodeResult(paths.u_paths[0], float(paths.metrics[0]), True)
    passing = np.flatnonzero(crc_passes(paths.u_paths, decode_input.crc_slots, decode_input.crc))
    if passing.size == 0:
        logger.debug(f"no CRC-passing path among {paths.metrics.size}")
        return SclDecodeResult(paths.u_paths[0], float(paths.metrics[0]), False)
    best = passing[0]
    return SclDecodeResult(paths.u_paths[best], float(paths.metrics[best]), True)


def source_llr(source: np.ndarray, design_parameter: float) -> np.ndarray:
    return bsc_llr(source, design_parameter)


def scl_source_encode(encode_input: SourceEncodeInput) -> SourceEncodeResult:
    """Quantize a source word to a codeword of the source code with its frozen values fixed."""
    code = encode_input.code
    source = encode_input.source
    llr = source_llr(source, encode_input.design_parameter)
    if encode_input.dither:
        rng = np.random.Generator(np.random.Philox(encode_input.seed))
        llr = clamp_llr(llr + rng.uniform(-encode_input.dither, encode_input.dither, size=llr.size))

    if encode_input.mode is EncoderMode.RANDOMIZED_SC:
        rng = np.random.Generator(np.random.Philox(encode_input.seed))
        u = np.empty(code.N, dtype=np.uint8)
        s_prime = np.empty(code.N, dtype=np.uint8)
        leaf = np.empty(code.N)
        _sc_kernel(llr, code.frozen_mask(), code.frozen_vector(), rng.random(code.N), True, u, s_prime, leaf)
        return SourceEncodeResult(s_prime, u, hamming_weight(source ^ s_prime) / code.N)

    paths = run_list(llr, code, encode_input.list_size)
    distances = np.count_nonzero(paths.x_paths ^ source, axis=1)
    # paths come sorted by metric, so argmin keeps the better metric on distance ties
    best = int(np.argmin(distances))
    return SourceEncodeResult(paths.x_paths[best], paths.u_paths[best], distances[best] / code.N)

