"""Polar transform and bit-vector helpers.

Bit vectors are numpy ``uint8`` arrays holding 0/1. The transform uses the natural index
order, x = u F^{(x)n} with F = [[1, 0], [1, 1]] and no bit-reversal permutation.
"""
from typing import Sequence, Union

import numpy as np

from .error import InvalidArgument

BitLike = Union[Sequence[int], np.ndarray]


def is_power_of_two(value: int) -> bool:
    return int(value) > 0 and (int(value) & (int(value) - 1)) == 0


def as_bits(bits: BitLike, allow_empty: bool = False) -> np.ndarray:
    arr = np.asarray(bits)
    if arr.ndim == 0:
        raise InvalidArgument(msg="bit vector must be one-dimensional")
    if arr.size == 0:
        if allow_empty:
            return np.zeros(0, dtype=np.uint8)
        raise InvalidArgument(msg="bit vector must not be empty")
    if arr.dtype != np.uint8:
        if not np.all((arr == 0) | (arr == 1)):
            raise InvalidArgument(msg="bit vector entries must be 0 or 1")
        arr = arr.astype(np.uint8)
    elif np.any(arr > 1):
        raise InvalidArgument(msg="bit vector entries must be 0 or 1")
    return arr


def polar_transform(u: BitLike) -> np.ndarray:
    """Return u G_N over GF(2). Accepts a vector or a batch of vectors along the last axis."""
    x = np.array(u, dtype=np.uint8, copy=True)
    if x.ndim == 0 or x.size == 0:
        raise InvalidArgument(msg="polar transform needs a non-empty vector")
    length = x.shape[-1]
    if not is_power_of_two(length):
        raise InvalidArgument(msg=f"polar transform length must be a power of two, got {length}")
    if np.any(x > 1):
        raise InvalidArgument(msg="bit vector entries must be 0 or 1")
    lead = x.shape[:-1]
    half = 1
    while half < length:
        view = x.reshape(*lead, length // (2 * half), 2, half)
        view[..., 0, :] ^= view[..., 1, :]
        half *= 2
    return x


def hamming_weight(v: BitLike) -> int:
    return int(np.count_nonzero(np.asarray(v)))


def xor(a: BitLike, b: BitLike) -> np.ndarray:
    left = as_bits(a, allow_empty=True)
    right = as_bits(b, allow_empty=True)
    if left.shape != right.shape:
        raise InvalidArgument(msg=f"xor of vectors with lengths {left.size} and {right.size}")
    return np.bitwise_xor(left, right)


def bit_generator(master_seed: int, *spawn_key: int) -> np.random.Generator:
    """Counter-based Philox generator keyed by (master_seed, spawn_key); independent of worker layout."""
    sequence = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in spawn_key))
    return np.random.Generator(np.random.Philox(sequence))


def bernoulli_bits(rng: np.random.Generator, probability: float, size) -> np.ndarray:
    return (rng.random(size) < probability).astype(np.uint8)
