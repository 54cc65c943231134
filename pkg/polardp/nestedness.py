"""How far the channel frozen set F_c sticks out of the source frozen set F_s.

Two bound processes are evolved over the polarization branches:

* the enumeration process (eps1, eps2), an upper bound on (Z_n(p), 1 - Z_n(D)), whose
  leaves are counted to bound |F_c minus F_s|;
* the product process (heps1, heps2), an upper bound on (Z_n(p), 1 - Z_n(D)^2), whose
  product stays below gamma(Z(p), Z(D)) and whose log-odds sum R_n never increases.

Logarithms are base 2.
"""
import logging
import math
import time
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np
from numba import njit, prange

from .construction import bhattacharyya_bounds, bsc_bhattacharyya, korada_thresholds
from .error import InvalidArgument, UnsupportedOperation
from .model import NestedProcessState, PolarCode, ProductProcessState, ReliabilityProfile

logger = logging.getLogger(__name__)
timing_logger = logging.getLogger(f"{__name__}.timing")

MAX_ENUMERATION_DEPTH = 22
SPLIT_DEPTH = 4
LOG_SENTINEL = 1e9

IndexSet = Union[PolarCode, Sequence[int], np.ndarray]


class ScanRow(NamedTuple):
    N: int
    p: float
    D: float
    delta_p: float
    delta_D: float
    actual_count: int
    lemma1_bound: int
    fhat_count: int
    gamma: float
    ftilde_count: int


class ScalingResult(NamedTuple):
    rows: list
    slope: float


def _check_unit(x: float, name: str):
    if not 0.0 <= x <= 1.0:
        raise InvalidArgument(msg=f"{name} must lie in [0, 1], got {x}")


def _check_branch(branch: int):
    if branch not in (0, 1):
        raise InvalidArgument(msg=f"branch must be 0 or 1, got {branch}")


@njit(cache=True)
def _psi(x):
    return 1.0 - (1.0 - x) * math.sqrt(1.0 + 2.0 * x - x * x)


def psi(x: float) -> float:
    """1 - (1 - x) sqrt(1 + 2x - x^2): the minus-branch image of 1 - Z under the lower bound on Z."""
    _check_unit(x, "x")
    return float(_psi(float(x)))


@njit(cache=True)
def _lemma1_map(eps1, eps2, branch):
    if branch == 1:
        return eps1 * eps1, 2.0 * eps2 - eps2 * eps2
    return 2.0 * eps1 - eps1 * eps1, _psi(eps2)


def lemma1_step(state: NestedProcessState, branch: int) -> NestedProcessState:
    _check_branch(branch)
    eps1, eps2 = _lemma1_map(state.eps1, state.eps2, branch)
    return NestedProcessState(min(max(eps1, 0.0), 1.0), min(max(eps2, 0.0), 1.0), state.depth + 1)


@njit(cache=True)
def _subtree_count(eps1, eps2, steps, delta_p, floor_D):
    first = np.empty(steps + 1)
    second = np.empty(steps + 1)
    next_branch = np.zeros(steps + 1, dtype=np.int64)
    first[0] = eps1
    second[0] = eps2
    level = 0
    count = 0
    while level >= 0:
        if level == steps:
            if first[level] >= delta_p and second[level] > floor_D:
                count += 1
            level -= 1
            continue
        branch = next_branch[level]
        if branch == 2:
            next_branch[level] = 0
            level -= 1
            continue
        next_branch[level] = branch + 1
        stepped1, stepped2 = _lemma1_map(first[level], second[level], branch)
        first[level + 1] = stepped1
        second[level + 1] = stepped2
        level += 1
    return count


@njit(cache=True, parallel=True)
def _enumerate(eps1, eps2, n, delta_p, floor_D, split):
    counts = np.zeros(1 << split, dtype=np.int64)
    for prefix in prange(1 << split):  # pylint: disable=not-an-iterable
        first = eps1
        second = eps2
        for k in range(split):
            first, second = _lemma1_map(first, second, (prefix >> (split - 1 - k)) & 1)
        counts[prefix] = _subtree_count(first, second, n - split, delta_p, floor_D)
    return counts.sum()


def _check_pair(Zp: float, ZD: float):
    if not 0.0 < Zp < ZD < 1.0:
        raise InvalidArgument(msg=f"need 0 < Z(p) < Z(D) < 1, got Z(p)={Zp}, Z(D)={ZD}")


def lemma1_bound(Zp: float, ZD: float, n: int, delta_p: float, delta_D: float) -> int:
    """Number of branch sequences whose enumeration process ends with eps1 >= delta_p and eps2 > 1 - delta_D.

    Exact depth-first enumeration of all 2^n leaves, fanned out over the 2^4 subtrees below depth 4.
    """
    _check_pair(Zp, ZD)
    if n > MAX_ENUMERATION_DEPTH:
        raise UnsupportedOperation(msg=f"enumeration is limited to {MAX_ENUMERATION_DEPTH} steps, got {n}")
    if n < 1:
        raise InvalidArgument(msg=f"number of polarization steps must be >= 1, got {n}")
    start = time.time()
    split = min(SPLIT_DEPTH, n)
    count = int(_enumerate(float(Zp), 1.0 - float(ZD), n, float(delta_p), 1.0 - float(delta_D), split))
    timing_logger.debug(f"enumeration over 2^{n} branches took {time.time() - start:.2f} seconds")
    return count


def lemma1_trajectories(Zp: float, ZD: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    _check_pair(Zp, ZD)
    if not 0 <= n <= MAX_ENUMERATION_DEPTH:
        raise InvalidArgument(msg=f"number of polarization steps must lie in [0, {MAX_ENUMERATION_DEPTH}], got {n}")
    eps1 = np.array([float(Zp)])
    eps2 = np.array([1.0 - float(ZD)])
    for _ in range(n):
        next1 = np.empty(2 * eps1.size)
        next2 = np.empty(2 * eps2.size)
        next1[0::2] = 2.0 * eps1 - eps1 * eps1
        next1[1::2] = eps1 * eps1
        next2[0::2] = 1.0 - (1.0 - eps2) * np.sqrt(1.0 + 2.0 * eps2 - eps2 * eps2)
        next2[1::2] = 2.0 * eps2 - eps2 * eps2
        eps1, eps2 = next1, next2
    return eps1, eps2


def _index_set(values: IndexSet) -> np.ndarray:
    if isinstance(values, PolarCode):
        return values.frozen_set
    return np.asarray(values, dtype=np.int64).reshape(-1)


def actual_nonnested_count(frozen_c: IndexSet, frozen_s: IndexSet) -> int:
    return int(np.setdiff1d(_index_set(frozen_c), _index_set(frozen_s)).size)


def _z_values(profile_or_z: Union[ReliabilityProfile, np.ndarray]) -> np.ndarray:
    if isinstance(profile_or_z, ReliabilityProfile):
        return profile_or_z.z_estimate
    return np.asarray(profile_or_z, dtype=np.float64)


def fhat_count(profile_p: Union[ReliabilityProfile, np.ndarray], delta_p: float, delta_D: float) -> int:
    """|{i : delta_p <= Z_i(p) < delta_D}|, read from the Bhattacharyya estimate of a profile."""
    if delta_p > delta_D:
        raise InvalidArgument(msg=f"thresholds must satisfy delta_p <= delta_D, got {delta_p} > {delta_D}")
    z = _z_values(profile_p)
    return int(np.count_nonzero((z >= delta_p) & (z < delta_D)))


def ftilde_count(profile_p: Union[ReliabilityProfile, np.ndarray], delta_N: float) -> int:
    """|{i : Z_i(p) >= 1 - delta_N^2}|, the channel indices that are frozen for the source code too."""
    z = _z_values(profile_p)
    return int(np.count_nonzero(z >= 1.0 - delta_N * delta_N))


def classical_bound(profile_p: Union[ReliabilityProfile, np.ndarray], delta_p: float, delta_N: float) -> int:
    """|F_c minus F~_c| with F_c = {Z(p) >= delta_p}."""
    z = _z_values(profile_p)
    return int(np.count_nonzero((z >= delta_p) & (z < 1.0 - delta_N * delta_N)))


def induced_threshold(z: Union[ReliabilityProfile, np.ndarray], frozen_size: int) -> float:
    """Threshold whose set {z >= threshold} has the given size (ties may enlarge it)."""
    values = np.sort(_z_values(z))[::-1]
    if not 0 <= frozen_size <= values.size:
        raise InvalidArgument(msg=f"frozen size must lie in [0, {values.size}], got {frozen_size}")
    if frozen_size == 0:
        return math.inf
    return float(values[frozen_size - 1])


def gamma(Zp: float, ZD: float) -> float:
    """[Zp / (1 - Zp)] [(1 - ZD^2) / ZD^2]."""
    if not 0.0 < Zp < 1.0:
        raise InvalidArgument(msg=f"Z(p) must lie in (0, 1), got {Zp}")
    if not 0.0 < ZD < 1.0:
        raise InvalidArgument(msg=f"Z(D) must lie in (0, 1), got {ZD}")
    return (Zp / (1.0 - Zp)) * ((1.0 - ZD * ZD) / (ZD * ZD))


def r_value(heps1: float, heps2: float) -> float:
    """log2 odds(heps1) + log2 odds(heps2); a zero coordinate wins over a saturated one."""
    if heps1 <= 0.0 or heps2 <= 0.0:
        return -LOG_SENTINEL
    if heps1 >= 1.0 or heps2 >= 1.0:
        return LOG_SENTINEL
    return math.log2(heps1 / (1.0 - heps1)) + math.log2(heps2 / (1.0 - heps2))


def initial_product_state(Zp: float, ZD: float) -> ProductProcessState:
    heps1 = float(Zp)
    heps2 = 1.0 - float(ZD) ** 2
    return ProductProcessState(heps1, heps2, r_value(heps1, heps2))


def product_process_step(state: ProductProcessState, branch: int) -> ProductProcessState:
    """Branch 1 is exact, branch 0 applies the upper-bound map (2 e1 - e1^2, e2^2)."""
    _check_branch(branch)
    e1, e2 = state.heps1, state.heps2
    if branch == 1:
        e1, e2 = e1 * e1, 2.0 * e2 - e2 * e2
    else:
        e1, e2 = 2.0 * e1 - e1 * e1, e2 * e2
    e1 = min(max(e1, 0.0), 1.0)
    e2 = min(max(e2, 0.0), 1.0)
    return ProductProcessState(e1, e2, r_value(e1, e2), state.depth + 1)


def product_trajectories(Zp: float, ZD: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(heps1, heps2) after n steps of the product process for every index, in sub-channel order."""
    if not (0.0 < Zp < 1.0 and 0.0 < ZD < 1.0):
        raise InvalidArgument(msg=f"need Z(p) and Z(D) in (0, 1), got Z(p)={Zp}, Z(D)={ZD}")
    if not 0 <= n <= MAX_ENUMERATION_DEPTH:
        raise InvalidArgument(msg=f"number of polarization steps must lie in [0, {MAX_ENUMERATION_DEPTH}], got {n}")
    heps1 = np.array([float(Zp)])
    heps2 = np.array([1.0 - float(ZD) ** 2])
    for _ in range(n):
        next1 = np.empty(2 * heps1.size)
        next2 = np.empty(2 * heps2.size)
        next1[0::2] = 2.0 * heps1 - heps1 * heps1
        next1[1::2] = heps1 * heps1
        next2[0::2] = heps2 * heps2
        next2[1::2] = 2.0 * heps2 - heps2 * heps2
        heps1, heps2 = np.clip(next1, 0.0, 1.0), np.clip(next2, 0.0, 1.0)
    return heps1, heps2


def product_ratio(state: ProductProcessState, branch: int) -> tuple[float, float]:
    """Ratio of the process product after and before one step, and its bound for that branch."""
    _check_branch(branch)
    stepped = product_process_step(state, branch)
    before = state.heps1 * state.heps2
    ratio = stepped.heps1 * stepped.heps2 / before if before > 0.0 else 0.0
    if branch == 1:
        bound = state.heps1 * (2.0 - state.heps2)
    else:
        bound = state.heps2 * (2.0 - state.heps1)
    return ratio, bound


# pylint: disable=too-many-arguments,too-many-locals
def scan_point(N: int, p: float, D: float, delta_p: Optional[float] = None, delta_D: Optional[float] = None,
               code_c: Optional[PolarCode] = None, code_s: Optional[PolarCode] = None,
               delta: float = 0.5, profile_c: Optional[ReliabilityProfile] = None,
               profile_s: Optional[ReliabilityProfile] = None) -> ScanRow:
    """All nestedness columns for one (N, p, D).

    With calibrated codes the thresholds are induced from their frozen-set sizes and the actual
    count is taken from the codes; otherwise the actual sets are threshold sets on the upper bounds.
    Thresholds and F-hat are read from `profile_c` / `profile_s`, the profiles the codes were built
    from, and from the Bhattacharyya bounds of BSC(p) / BSC(D) when those are not given.
    Missing thresholds fall back to the delta / N schedule.
    """
    Zp, ZD = bsc_bhattacharyya(p), bsc_bhattacharyya(D)
    n = N.bit_length() - 1
    for profile in (profile_c, profile_s):
        if profile is not None and profile.N != N:
            raise InvalidArgument(msg=f"profile blocklength {profile.N} does not match N={N}")
    profile_p = profile_c if profile_c is not None else bhattacharyya_bounds(Zp, n)
    profile_D = profile_s if profile_s is not None else bhattacharyya_bounds(ZD, n)
    schedule = korada_thresholds(N, delta)
    if delta_p is None:
        delta_p = induced_threshold(profile_p, code_c.frozen_set.size) if code_c is not None else schedule.delta_p
    if delta_D is None:
        delta_D = induced_threshold(profile_D, code_s.frozen_set.size) if code_s is not None else schedule.delta_D
    if code_c is not None and code_s is not None:
        actual = actual_nonnested_count(code_c, code_s)
    else:
        actual = actual_nonnested_count(np.flatnonzero(profile_p.z_upper >= delta_p),
                                        np.flatnonzero(profile_D.z_upper >= delta_D))
    bound = lemma1_bound(Zp, ZD, n, delta_p, delta_D)
    fhat = fhat_count(profile_p, delta_p, delta_D) if delta_p <= delta_D else 0
    row = ScanRow(N, p, D, delta_p, delta_D, actual, bound, fhat, gamma(Zp, ZD),
                  ftilde_count(profile_p, schedule.delta_N))
    logger.info(f"nestedness N={N} p={p} D={D}: actual {actual}, bound {bound}, fhat {fhat}")
    return row


def scaling_experiment(Zp: float, ZD: float, n_range: Sequence[int],
                       schedule: Optional[Callable[[int], tuple[float, float]]] = None,
                       delta: float = 0.5) -> ScalingResult:
    """Enumeration counts over a range of depths and the least-squares slope of log(count + 1) on log N.

    `schedule(N)` returns (delta_p, delta_D); the default is delta / N for the channel code and
    1 - (delta / N)^2 for the source code.
    """
    depths = sorted(set(int(n) for n in n_range))
    if not depths or depths[0] < 8 or depths[-1] > MAX_ENUMERATION_DEPTH:
        raise InvalidArgument(msg=f"depths must lie in [8, {MAX_ENUMERATION_DEPTH}], got {list(n_range)}")
    if schedule is None:
        def schedule(N: int) -> tuple[float, float]:
            thresholds = korada_thresholds(N, delta)
            return thresholds.delta_p, thresholds.delta_D
    rows = []
    for n in depths:
        N = 1 << n
        delta_p, delta_D = schedule(N)
        rows.append((N, lemma1_bound(Zp, ZD, n, delta_p, delta_D)))
    counts = np.array([count for _, count in rows], dtype=np.float64)
    if not np.any(counts) or len(rows) < 2:
        slope = 0.0
    else:
        slope = float(np.polyfit(np.log([N for N, _ in rows]), np.log(counts + 1.0), 1)[0])
    logger.info(f"scaling over n={depths[0]}..{depths[-1]}: slope {slope:.4f}")
    return ScalingResult(rows, slope)
