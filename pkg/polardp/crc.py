"""CRC over message bits only, and placement of message||CRC into the slots F_s minus F_c."""
import logging
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .error import InvalidArgument
from .model import CrcConfig
from .polar_core import BitLike, as_bits

logger = logging.getLogger(__name__)


def _register_crc(message: np.ndarray, cfg: CrcConfig) -> int:
    mask = (1 << cfg.r) - 1
    top = 1 << (cfg.r - 1)
    register = cfg.init
    for bit in message:
        feedback = bool(register & top) ^ bool(bit)
        register = (register << 1) & mask
        if feedback:
            register ^= cfg.polynomial
    return register


def _register_bits(register: int, r: int) -> np.ndarray:
    return np.array([(register >> (r - 1 - k)) & 1 for k in range(r)], dtype=np.uint8)


@lru_cache(maxsize=64)
def _crc_matrix(length: int, cfg: CrcConfig) -> tuple[np.ndarray, np.ndarray]:
    # the zero-init CRC is GF(2)-linear in the message, so one row per message position suffices
    mask = (1 << cfg.r) - 1
    top = 1 << (cfg.r - 1)
    matrix = np.zeros((length, cfg.r), dtype=np.uint8)
    register = cfg.polynomial
    for position in range(length - 1, -1, -1):
        matrix[position] = _register_bits(register, cfg.r)
        register = ((register << 1) & mask) ^ (cfg.polynomial if register & top else 0)
    offset = _register_bits(_register_crc(np.zeros(length, dtype=np.uint8), cfg), cfg.r)
    matrix.setflags(write=False)
    offset.setflags(write=False)
    return matrix, offset


def crc_compute(message: BitLike, cfg: CrcConfig) -> np.ndarray:
    """Remainder of message(x) * x^r modulo the generator, MSB first, starting from cfg.init."""
    bits = as_bits(message, allow_empty=True)
    return _register_bits(_register_crc(bits, cfg), cfg.r)


def crc_compute_batch(messages: np.ndarray, cfg: CrcConfig) -> np.ndarray:
    messages = np.asarray(messages, dtype=np.uint8)
    matrix, offset = _crc_matrix(messages.shape[-1], cfg)
    return ((messages.astype(np.int64) @ matrix) % 2).astype(np.uint8) ^ offset


def crc_verify(message: BitLike, checksum: BitLike, cfg: CrcConfig) -> bool:
    return bool(np.array_equal(crc_compute(message, cfg), as_bits(checksum, allow_empty=True)))


def assemble_payload(message: BitLike, cfg: Optional[CrcConfig], slots: Sequence[int]) -> dict[int, int]:
    """Map each slot of F_s minus F_c to its bit of message||crc(message); CRC bits go last."""
    slots = np.asarray(slots, dtype=np.int64)
    r = cfg.r if cfg is not None else 0
    bits = as_bits(message, allow_empty=True)
    if bits.size != slots.size - r:
        raise InvalidArgument(msg=f"{slots.size} slots hold {slots.size - r} message bits, got {bits.size}")
    if slots.size and np.any(np.diff(slots) <= 0):
        raise InvalidArgument(msg="payload slots must be sorted ascending")
    payload = payload_bits(bits, cfg)
    return {int(slot): int(bit) for slot, bit in zip(slots, payload)}


def payload_bits(message: BitLike, cfg: Optional[CrcConfig]) -> np.ndarray:
    bits = as_bits(message, allow_empty=True)
    if cfg is None:
        return bits
    return np.concatenate((bits, crc_compute(bits, cfg)))


def extract_payload(u: np.ndarray, slots: Sequence[int], cfg: Optional[CrcConfig]) -> tuple[np.ndarray, bool]:
    values = np.asarray(u, dtype=np.uint8)[np.asarray(slots, dtype=np.int64)]
    if cfg is None:
        return values, True
    message, checksum = values[:values.size - cfg.r], values[values.size - cfg.r:]
    return message, crc_verify(message, checksum, cfg)


def crc_passes(u_paths: np.ndarray, slots: Sequence[int], cfg: Optional[CrcConfig]) -> np.ndarray:
    slots = np.asarray(slots, dtype=np.int64)
    if cfg is None:
        return np.ones(u_paths.shape[0], dtype=np.bool_)
    values = np.asarray(u_paths, dtype=np.uint8)[:, slots]
    message_length = slots.size - cfg.r
    expected = crc_compute_batch(values[:, :message_length], cfg)
    return np.all(expected == values[:, message_length:], axis=1)
