"""Reliability profiles for BSC sub-channels and the frozen sets built from them.

Sub-channel i of a length-2^n code goes through n polarization steps; bit (n - k) of i
(MSB first) selects the k-th step, 0 for the minus (check) transform and 1 for the plus
(variable) transform.
"""
import json
import logging
import math
import time
from typing import NamedTuple, Optional

import numpy as np
from tqdm import tqdm

from .crc import payload_bits
from .error import InvalidArgument, MalformedDocument, UnsupportedOperation
from .model import (CodeRole, CrcConfig, DecodeInput, FrozenSetMode, FrozenSetSpec, PolarCode, ReliabilityProfile,
                    SourceEncodeInput)
from .polar_core import bernoulli_bits, bit_generator, is_power_of_two, polar_transform
from .scl_codec import bsc_llr, sc_leaf_llrs, scl_decode, scl_source_encode

logger = logging.getLogger(__name__)
timing_logger = logging.getLogger(f"{__name__}.timing")

MAX_BOUND_DEPTH = 25
MAX_EXACT_DEPTH = 8
MERGE_TOLERANCE = 1e-12
MC_CHUNK = 2048

# spawn-key streams; the first key element is the chunk or trial index
STREAM_GENIE = 1
STREAM_SOURCE_CALIBRATION = 2
STREAM_CHANNEL_CALIBRATION = 3


class ThresholdSchedule(NamedTuple):
    delta_N: float
    delta_p: float
    delta_D: float


def bsc_bhattacharyya(p: float) -> float:
    return 2.0 * math.sqrt(p * (1.0 - p))


def _check_crossover(p: float, name: str = "p"):
    if not 0.0 < p < 0.5:
        raise InvalidArgument(msg=f"{name} must lie in (0, 1/2), got {p}")


def bhattacharyya_bounds(z0: float, n: int, provenance: Optional[dict] = None) -> ReliabilityProfile:
    """Interval bounds on every sub-channel Bhattacharyya parameter.

    The plus step is exact squaring; the minus step is bracketed by Z sqrt(2 - Z^2) from below and
    2Z - Z^2 from above. Both endpoints are monotone maps, so each endpoint is evolved on its own.
    """
    if not 0.0 < z0 < 1.0:
        raise InvalidArgument(msg=f"initial Bhattacharyya parameter must lie in (0, 1), got {z0}")
    if not 1 <= n <= MAX_BOUND_DEPTH:
        raise InvalidArgument(msg=f"number of polarization steps must lie in [1, {MAX_BOUND_DEPTH}], got {n}")
    lower = np.array([z0])
    upper = np.array([z0])
    for _ in range(n):
        next_lower = np.empty(2 * lower.size)
        next_upper = np.empty(2 * upper.size)
        next_lower[0::2] = lower * np.sqrt(2.0 - lower * lower)
        next_lower[1::2] = lower * lower
        next_upper[0::2] = 2.0 * upper - upper * upper
        next_upper[1::2] = upper * upper
        lower = np.clip(next_lower, 0.0, 1.0)
        upper = np.clip(next_upper, 0.0, 1.0)
    # endpoints of one interval may cross by an ulp after clipping
    lower = np.minimum(lower, upper)
    return ReliabilityProfile(1 << n, lower, upper,
                              provenance=dict(provenance or {}, method="bhattacharyya_bounds", z0=z0))


def _boxplus(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
            + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b))))


def _merge(llr: np.ndarray, prob: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(llr, kind="stable")
    llr = llr[order]
    prob = prob[order]
    scale = np.maximum(np.abs(llr[1:]), np.abs(llr[:-1]))
    distinct = np.diff(llr) > MERGE_TOLERANCE * scale
    starts = np.concatenate(([0], np.flatnonzero(distinct) + 1))
    return llr[starts], np.add.reduceat(prob, starts)


def _bhattacharyya_of(llr: np.ndarray, prob: np.ndarray) -> float:
    return float(np.sum(prob * np.exp(-0.5 * llr)))


def _minus_bhattacharyya(llr: np.ndarray, prob: np.ndarray, chunk: int = 1 << 20) -> float:
    # pairwise sum without materialising the minus-channel alphabet
    rows = max(1, chunk // max(llr.size, 1))
    total = 0.0
    for start in range(0, llr.size, rows):
        block = _boxplus(llr[start:start + rows, None], llr[None, :])
        total += float(np.sum(prob[start:start + rows, None] * prob[None, :] * np.exp(-0.5 * block)))
    return total


def exact_bsc_evolution(p: float, n: int, max_alphabet: int = 1 << 21) -> np.ndarray:
    """Exact sub-channel Bhattacharyya values of BSC(p) by tracking LLR distributions under input 0.

    Output symbols with equal LLR (relative tolerance 1e-12) are merged. The alphabet of a depth
    d+1 channel is built from all pairs of its depth-d parent; if that pair count exceeds
    `max_alphabet` the call is unsupported.
    """
    _check_crossover(p)
    if not 0 <= n <= MAX_EXACT_DEPTH:
        raise UnsupportedOperation(msg=f"exact evolution supports at most {MAX_EXACT_DEPTH} steps, got {n}")
    base = math.log((1.0 - p) / p)
    channels = [(np.array([-base, base]), np.array([p, 1.0 - p]))]
    if n == 0:
        return np.array([_bhattacharyya_of(*channels[0])])
    start = time.time()
    for depth in range(n - 1):
        evolved = []
        for llr, prob in channels:
            if llr.size * llr.size > max_alphabet:
                raise UnsupportedOperation(
                    msg=f"alphabet of {llr.size} symbols at depth {depth} exceeds the budget of {max_alphabet} pairs")
            joint = np.outer(prob, prob).ravel()
            evolved.append(_merge(_boxplus(llr[:, None], llr[None, :]).ravel(), joint))
            evolved.append(_merge((llr[:, None] + llr[None, :]).ravel(), joint))
        channels = evolved
        logger.debug(f"exact evolution depth {depth + 1}: largest alphabet {max(c[0].size for c in channels)}")
    values = np.empty(1 << n)
    for index, (llr, prob) in enumerate(channels):
        values[2 * index] = _minus_bhattacharyya(llr, prob)
        values[2 * index + 1] = _bhattacharyya_of(llr, prob) ** 2
    timing_logger.debug(f"exact evolution of BSC({p}) over {n} steps took {time.time() - start:.2f} seconds")
    return np.clip(values, 0.0, 1.0)


def monte_carlo_construction(p: float, N: int, num_trials: int, master_seed: int,
                             progress: bool = False) -> ReliabilityProfile:
    """Genie-aided SC error rate of every sub-channel of BSC(p).

    Every trial sends the all-zero codeword; an exact LLR tie at a decision counts as half an error.
    The same decision LLRs give the Bhattacharyya estimate E[sech(L / 2)] of every sub-channel.
    Trials run in fixed chunks with their own Philox key, so the result only depends on the seed.
    The Bhattacharyya bounds are attached as z_lower/z_upper.
    """
    _check_crossover(p)
    if not is_power_of_two(N) or N < 2:
        raise InvalidArgument(msg=f"blocklength must be a power of two >= 2, got {N}")
    if num_trials < 1000:
        raise InvalidArgument(msg=f"Monte-Carlo construction needs at least 1000 trials, got {num_trials}")
    genie = PolarCode(N, np.arange(N))
    half_errors = np.zeros(N, dtype=np.int64)
    sech_sum = np.zeros(N)
    start = time.time()
    chunks = range(0, num_trials, MC_CHUNK)
    for chunk_index, first in enumerate(tqdm(chunks, desc=f"genie BSC({p})", disable=not progress)):
        rows = min(MC_CHUNK, num_trials - first)
        noise = bernoulli_bits(bit_generator(master_seed, chunk_index, STREAM_GENIE), p, (rows, N))
        leaf = sc_leaf_llrs(bsc_llr(noise, p), genie)
        half_errors += 2 * np.count_nonzero(leaf < 0.0, axis=0) + np.count_nonzero(leaf == 0.0, axis=0)
        sech_sum += np.sum(1.0 / np.cosh(0.5 * leaf), axis=0)
    timing_logger.debug(f"genie-aided estimation over {num_trials} trials took {time.time() - start:.2f} seconds")
    bounds = bhattacharyya_bounds(bsc_bhattacharyya(p), N.bit_length() - 1)
    provenance = {"channel": "bsc", "parameter": p, "method": "monte_carlo", "seed": master_seed,
                  "trials": num_trials}
    return ReliabilityProfile(N, bounds.z_lower, bounds.z_upper, half_errors / (2.0 * num_trials), provenance,
                              np.clip(sech_sum / num_trials, 0.0, 1.0))


def construct_profile(p: float, N: int, use_monte_carlo: bool = False, num_trials: int = 10000,
                      master_seed: int = 0) -> ReliabilityProfile:
    _check_crossover(p)
    if use_monte_carlo:
        return monte_carlo_construction(p, N, num_trials, master_seed)
    if not is_power_of_two(N) or N < 2:
        raise InvalidArgument(msg=f"blocklength must be a power of two >= 2, got {N}")
    return bhattacharyya_bounds(bsc_bhattacharyya(p), N.bit_length() - 1, {"channel": "bsc", "parameter": p})


def information_order(profile: ReliabilityProfile) -> np.ndarray:
    """Indices from most to least reliable.

    Equal error rates fall back to the Bhattacharyya estimate, then the higher index comes first.
    """
    score = profile.mc_error_rate if profile.mc_error_rate is not None else profile.z_upper
    return np.lexsort((-np.arange(profile.N), profile.z_estimate, score))


def code_with_information_size(profile: ReliabilityProfile, size: int) -> PolarCode:
    order = information_order(profile)
    return PolarCode(profile.N, np.sort(order[size:]))


def build_frozen_set(profile: ReliabilityProfile, spec: FrozenSetSpec) -> PolarCode:
    if spec.mode is FrozenSetMode.THRESHOLD:
        code = PolarCode(profile.N, np.flatnonzero(profile.z_upper >= spec.threshold))
    elif spec.mode is FrozenSetMode.SIZE:
        if spec.size > profile.N:
            raise InvalidArgument(msg=f"cannot freeze {spec.size} of {profile.N} indices")
        code = code_with_information_size(profile, profile.N - spec.size)
    elif spec.role is CodeRole.CHANNEL:
        order = information_order(profile)
        score = profile.mc_error_rate if profile.mc_error_rate is not None else profile.z_upper
        union_bound = np.cumsum(score[order])
        code = code_with_information_size(profile, int(np.count_nonzero(union_bound <= spec.target)))
    else:
        parameter = profile.provenance.get("parameter")
        if parameter is None:
            raise InvalidArgument(msg="source calibration needs the design parameter in the profile provenance")
        code = calibrate_source_code(profile, spec.target, parameter, spec.list_size, spec.trials, spec.seed)
    logger.info(f"built {spec.mode.value} frozen set: |F|={code.frozen_set.size} of {code.N}, rate {code.rate:.4f}")
    return code


def korada_thresholds(N: int, delta: float) -> ThresholdSchedule:
    """delta_N = delta / N; channel threshold delta_N, source threshold 1 - delta_N^2."""
    if not 0.0 < delta < 1.0:
        raise InvalidArgument(msg=f"delta must lie in (0, 1), got {delta}")
    delta_N = delta / N
    return ThresholdSchedule(delta_N, delta_N, 1.0 - delta_N * delta_N)


# pylint: disable=too-many-arguments
def design_source_code(D: float, N: int, delta: float, spec: FrozenSetSpec, num_trials: int = 10000,
                       master_seed: int = 0, use_monte_carlo: Optional[bool] = None) -> PolarCode:
    """Source code for distortion D designed on BSC(D') with D' = D - sqrt(2) delta."""
    if delta < 0:
        raise InvalidArgument(msg=f"delta margin must be non-negative, got {delta}")
    design = D - math.sqrt(2.0) * delta
    if design <= 0.0 or design >= 0.5:
        raise InvalidArgument(msg=f"design parameter D' = {design:.6f} must lie in (0, 1/2)")
    logger.debug(f"designing source code for D={D} on BSC({design:.6f})")
    if use_monte_carlo is None:
        use_monte_carlo = spec.mode is not FrozenSetMode.THRESHOLD
    profile = construct_profile(design, N, use_monte_carlo, num_trials, master_seed)
    if spec.mode is FrozenSetMode.TARGET_PERFORMANCE and spec.role is CodeRole.SOURCE:
        return calibrate_source_code(profile, spec.target, D, spec.list_size, spec.trials, spec.seed)
    return build_frozen_set(profile, spec)


def calibrate_source_code(profile: ReliabilityProfile, target_distortion: float, design_parameter: float,
                          list_size: int = 8, trials: int = 200, seed: int = 0) -> PolarCode:
    """Smallest information set whose mean list-encoding distortion stays within the target.

    Bisects the information-set size; every step encodes the same uniform source words.
    """
    N = profile.N
    sources = bernoulli_bits(bit_generator(seed, 0, STREAM_SOURCE_CALIBRATION), 0.5, (trials, N))
    start = time.time()

    def mean_distortion(size: int) -> float:
        code = code_with_information_size(profile, size)
        total = sum(scl_source_encode(SourceEncodeInput(source, code, list_size, design_parameter)).distortion
                    for source in sources)
        return total / trials

    low, high = 0, N
    while low < high:
        middle = (low + high) // 2
        distortion = mean_distortion(middle)
        logger.debug(f"source calibration: {middle} information bits give distortion {distortion:.5f}")
        if distortion <= target_distortion:
            high = middle
        else:
            low = middle + 1
    timing_logger.debug(f"source calibration took {time.time() - start:.2f} seconds")
    return code_with_information_size(profile, low)


def calibrate_channel_code(profile: ReliabilityProfile, p: float, target_bler: float, list_size: int = 8,
                           crc: Optional[CrcConfig] = None, trials: int = 10000, seed: int = 0) -> PolarCode:
    """Largest information set whose CRC-aided list-decoding block error rate stays within the target.

    The CRC covers the leading information bits and occupies the trailing ones. Messages and noise are
    drawn once and reused at every bisection step.
    """
    _check_crossover(p)
    N = profile.N
    r = crc.r if crc is not None else 0
    rng = bit_generator(seed, 0, STREAM_CHANNEL_CALIBRATION)
    noise = bernoulli_bits(rng, p, (trials, N))
    messages = bernoulli_bits(rng, 0.5, (trials, N))
    start = time.time()

    def block_error_rate(size: int) -> float:
        code = code_with_information_size(profile, size)
        info = code.info_set
        errors = 0
        for message, z in zip(messages, noise):
            u = np.zeros(N, dtype=np.uint8)
            u[info] = payload_bits(message[:size - r], crc)
            y = polar_transform(u) ^ z
            decoded = scl_decode(DecodeInput(bsc_llr(y, p), code, list_size, crc, info if crc is not None else None))
            errors += int(not np.array_equal(decoded.u_hat, u))
        return errors / trials

    low, high = r, N
    while low < high:
        middle = (low + high + 1) // 2
        bler = block_error_rate(middle)
        logger.debug(f"channel calibration: {middle} information bits give BLER {bler:.5f}")
        if bler <= target_bler:
            low = middle
        else:
            high = middle - 1
    timing_logger.debug(f"channel calibration took {time.time() - start:.2f} seconds")
    return code_with_information_size(profile, low)


def construction_document(profile: ReliabilityProfile, code: Optional[PolarCode] = None) -> dict:
    document = profile.serialize()
    if code is not None:
        document.update(frozen_set=code.frozen_set.tolist(), frozen_values=code.frozen_values.tolist())
    return document


def write_construction(path: str, profile: ReliabilityProfile, code: Optional[PolarCode] = None):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(construction_document(profile, code), handle)
    logger.info(f"wrote construction for N={profile.N} to {path}")


def read_construction(path: str) -> tuple[ReliabilityProfile, Optional[PolarCode]]:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            document = json.load(handle)
        except json.JSONDecodeError as err:
            raise MalformedDocument(msg=f"{path} is not valid JSON: {err}") from err
    profile = ReliabilityProfile.parse_from_json(document)
    code = PolarCode.parse_from_json(document) if "frozen_set" in document else None
    return profile, code
