"""Normal-approximation rate benchmarks for the binary dirty-paper channel (logarithms base 2).

These are second-order approximations used as reference curves, not converse bounds.
"""
import math
from typing import Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import xlogy
from scipy.stats import norm

from .error import InvalidArgument
from .model import FbParams

ArrayLike = Union[float, np.ndarray]


def h2(q: ArrayLike) -> ArrayLike:
    q = np.asarray(q, dtype=np.float64)
    if np.any((q < 0.0) | (q > 1.0)):
        raise InvalidArgument(msg="binary entropy is defined on [0, 1]")
    value = -(xlogy(q, q) + xlogy(1.0 - q, 1.0 - q)) / math.log(2.0)
    return float(value) if value.ndim == 0 else value


def h2_inv(y: float) -> float:
    """The q in [0, 1/2] with h2(q) = y; the minimum distortion of a rate 1 - y source code."""
    if not 0.0 <= y <= 1.0:
        raise InvalidArgument(msg=f"binary entropy takes values in [0, 1], got {y}")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 0.5
    return float(brentq(lambda q: h2(q) - y, 0.0, 0.5, xtol=1e-14))


def q_function(x: float) -> float:
    return float(norm.sf(x))


def q_inv(u: float) -> float:
    if not 0.0 < u < 1.0:
        raise InvalidArgument(msg=f"Q^-1 is defined on (0, 1), got {u}")
    return float(norm.isf(u))


def dispersion(D: float) -> float:
    """V(D) = D log^2 D + (1 - D) log^2 (1 - D) - h2(D)^2."""
    if not 0.0 < D < 1.0:
        raise InvalidArgument(msg=f"dispersion needs D in (0, 1), got {D}")
    return D * math.log2(D) ** 2 + (1.0 - D) * math.log2(1.0 - D) ** 2 - h2(D) ** 2


def rd_rate(N: int, D: float, eps_D: float) -> float:
    """1 - h2(D) + sqrt(V(D) / N) Q^-1(eps_D)."""
    return 1.0 - h2(D) + math.sqrt(dispersion(D) / N) * q_inv(eps_D)


def channel_rate(N: int, p: float, eps_p: float) -> float:
    """1 - h2(p) + log N / (2N) - sqrt(p (1 - p) / N) log((1 - p) / p) Q^-1(eps_p)."""
    if not 0.0 < p < 0.5:
        raise InvalidArgument(msg=f"crossover probability must lie in (0, 1/2), got {p}")
    return (1.0 - h2(p) + math.log2(N) / (2.0 * N)
            - math.sqrt(p * (1.0 - p) / N) * math.log2((1.0 - p) / p) * q_inv(eps_p))


def gp_rate(params: FbParams) -> float:
    """Channel coding rate minus lossy compression rate; tends to h2(D) - h2(p) as N grows."""
    return channel_rate(params.N, params.p, params.eps_p) - rd_rate(params.N, params.D, params.eps_D)


def dp_capacity(p: float, D: float) -> float:
    return h2(D) - h2(p)
