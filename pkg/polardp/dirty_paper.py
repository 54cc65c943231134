"""Nested polar coding for the binary dirty-paper channel y = x + s + z over GF(2).

The encoder fixes u on F_c to zero and the message (with CRC) on F_s minus F_c, quantizes the
known state s to a source codeword s' and sends x = s + s'. The receiver sees s' + z and list
decodes the channel code. Positions of F_c outside F_s are chosen freely by the source encoder;
when there are any, their values travel in a second phase as an ordinary channel codeword.
"""
import logging
import math
from typing import NamedTuple, Optional

import numpy as np

from .construction import build_frozen_set, calibrate_channel_code, construct_profile, design_source_code
from .crc import extract_payload, payload_bits
from .error import ConfigurationError, InvalidArgument
from .model import (CodeRole, CrcConfig, DecodeInput, DirtyPaperSystem, DpEncodeResult, EncoderMode, FrozenSetMode,
                    FrozenSetSpec, PowerMode, SourceEncodeInput)
from .polar_core import BitLike, as_bits, polar_transform
from .scl_codec import bsc_llr, scl_decode, scl_source_encode

logger = logging.getLogger(__name__)

RETRY_DITHER = 1e-6


class DpDecodeResult(NamedTuple):
    m_hat: np.ndarray
    crc_ok: bool


# pylint: disable=too-many-arguments,too-many-locals
def build_system(p: float, D: float, N: int, list_size_c: int = 8, list_size_s: int = 8,
                 crc: Optional[CrcConfig] = None, channel_spec: Optional[FrozenSetSpec] = None,
                 source_spec: Optional[FrozenSetSpec] = None, delta: float = 0.0, num_trials: int = 10000,
                 master_seed: int = 0, power_mode: PowerMode = PowerMode.AVERAGE, retry_limit: int = 8,
                 simulate_channel: bool = False) -> DirtyPaperSystem:
    """Construct C_c for BSC(p) and C_s for BSC(D') and wrap them with the CRC and list sizes.

    Defaults: channel code for a block error rate of 1e-3, source code calibrated to an average
    distortion of D, CRC-8.
    """
    if not 0.0 < p < D < 0.5:
        raise InvalidArgument(msg=f"need 0 < p < D < 1/2, got p={p}, D={D}")
    design = D - math.sqrt(2.0) * delta
    if design <= p:
        raise ConfigurationError(msg=f"design distortion D'={design:.6f} does not exceed p={p}", field="delta")
    crc = crc if crc is not None else CrcConfig.default()
    channel_spec = channel_spec or FrozenSetSpec(FrozenSetMode.TARGET_PERFORMANCE, target=1e-3,
                                                 role=CodeRole.CHANNEL, list_size=list_size_c)
    source_spec = source_spec or FrozenSetSpec(FrozenSetMode.TARGET_PERFORMANCE, target=D, role=CodeRole.SOURCE,
                                               list_size=list_size_s, seed=master_seed)

    profile_c = construct_profile(p, N, channel_spec.mode is not FrozenSetMode.THRESHOLD, num_trials, master_seed)
    if simulate_channel and channel_spec.mode is FrozenSetMode.TARGET_PERFORMANCE:
        code_c = calibrate_channel_code(profile_c, p, channel_spec.target, list_size_c, crc, channel_spec.trials,
                                        channel_spec.seed)
    else:
        code_c = build_frozen_set(profile_c, channel_spec)
    code_s = design_source_code(D, N, delta, source_spec, num_trials, master_seed)

    system = DirtyPaperSystem(code_c, code_s, crc, p, D, list_size_c, list_size_s, power_mode, retry_limit)
    if system.message_capacity < 0:
        raise ConfigurationError(
            msg=f"{system.message_slots.size} message slots cannot carry a {system.crc_bits}-bit CRC", field="D")
    logger.info(f"built dirty-paper system N={N} p={p} D={D}: rate {system.rate:.4f}, "
                f"{system.message_capacity} message bits, {system.retransmit_set.size} retransmitted")
    if system.retransmit_set.size:
        logger.warning(f"codes are not nested: {system.retransmit_set.size} channel-frozen indices need phase two")
    return system


def _attempt_seed(rng_seed: int, attempt: int) -> int:
    return int(np.random.SeedSequence(int(rng_seed), spawn_key=(attempt,)).generate_state(1, np.uint64)[0])


def source_frozen_values(system: DirtyPaperSystem, message: BitLike) -> np.ndarray:
    """u on F_s: zeros on F_c and message || CRC on F_s minus F_c."""
    m = as_bits(message, allow_empty=True)
    if m.size != system.message_capacity:
        raise InvalidArgument(msg=f"message must have {system.message_capacity} bits, got {m.size}")
    u = np.zeros(system.N, dtype=np.uint8)
    u[system.message_slots] = payload_bits(m, system.crc)
    return u[system.code_s.frozen_set]


def dp_encode(system: DirtyPaperSystem, message: BitLike, state: BitLike, rng_seed: int,
              mode: EncoderMode = EncoderMode.DETERMINISTIC_LIST) -> DpEncodeResult:
    """Quantize the state to a codeword of the message coset of C_s and send the difference.

    In per-codeword power mode an attempt whose weight exceeds D is repeated with a dithered list
    encoder, up to the retry limit; the result is flagged when every attempt fails.
    """
    s = as_bits(state)
    if s.size != system.N:
        raise InvalidArgument(msg=f"state must have {system.N} bits, got {s.size}")
    code = system.code_s.with_frozen_values(source_frozen_values(system, message))
    attempts = 1 if system.power_mode is PowerMode.AVERAGE else 1 + system.retry_limit
    for attempt in range(attempts):
        if attempt == 0:
            encode_input = SourceEncodeInput(s, code, system.list_size_s, system.D, mode, rng_seed)
        else:
            encode_input = SourceEncodeInput(s, code, system.list_size_s, system.D, EncoderMode.DETERMINISTIC_LIST,
                                             _attempt_seed(rng_seed, attempt), RETRY_DITHER)
        encoded = scl_source_encode(encode_input)
        if system.power_mode is PowerMode.AVERAGE or encoded.distortion <= system.D:
            break
        logger.debug(f"attempt {attempt} used power {encoded.distortion:.4f} > {system.D}")
    power_ok = system.power_mode is PowerMode.AVERAGE or encoded.distortion <= system.D
    if not power_ok:
        logger.warning(f"power constraint {system.D} missed after {attempts} attempts ({encoded.distortion:.4f})")
    return DpEncodeResult(s ^ encoded.s_prime, encoded.s_prime, encoded.u[system.retransmit_set],
                          encoded.distortion, power_ok, attempt + 1)


def dp_decode(system: DirtyPaperSystem, y: BitLike, phase2_payload: Optional[BitLike] = None) -> DpDecodeResult:
    received = as_bits(y)
    if received.size != system.N:
        raise InvalidArgument(msg=f"received word must have {system.N} bits, got {received.size}")
    retransmit = system.retransmit_set
    u = np.zeros(system.N, dtype=np.uint8)
    if retransmit.size:
        if phase2_payload is None:
            raise InvalidArgument(msg=f"{retransmit.size} retransmitted bits are needed to decode")
        payload = as_bits(phase2_payload)
        if payload.size != retransmit.size:
            raise InvalidArgument(msg=f"phase-two payload must have {retransmit.size} bits, got {payload.size}")
        u[retransmit] = payload
    code = system.code_c.with_frozen_values(u[system.code_c.frozen_set])
    slots = system.message_slots
    decoded = scl_decode(DecodeInput(bsc_llr(received, system.p), code, system.list_size_c, system.crc,
                                     slots if system.crc is not None else None))
    message, crc_ok = extract_payload(decoded.u_hat, slots, system.crc)
    return DpDecodeResult(message, bool(crc_ok and decoded.crc_ok))


def phase2_blocks(system: DirtyPaperSystem, payload_length: int) -> int:
    info = system.N - system.code_c.frozen_set.size
    if payload_length and not info:
        raise ConfigurationError(msg="the channel code has no information positions for phase two", field="code_c")
    return math.ceil(payload_length / info) if payload_length else 0


def _phase2_positions(system: DirtyPaperSystem) -> np.ndarray:
    return np.sort(system.code_c.info_set)


def phase2_channel_encode(system: DirtyPaperSystem, payload: BitLike, state: BitLike) -> np.ndarray:
    """c + s for fresh C_c codewords c carrying the payload in their leading information positions.

    One state row per codeword; a 1-D state is accepted when a single codeword suffices. The power
    constraint does not apply to this phase.
    """
    bits = as_bits(payload, allow_empty=True)
    blocks = phase2_blocks(system, bits.size)
    states = np.atleast_2d(as_bits(state) if np.ndim(state) == 1 else np.asarray(state, dtype=np.uint8))
    if states.shape != (blocks, system.N):
        raise InvalidArgument(msg=f"{blocks} phase-two codewords need a ({blocks}, {system.N}) state, "
                                  f"got {states.shape}")
    positions = _phase2_positions(system)
    u = np.zeros((blocks, system.N), dtype=np.uint8)
    for block in range(blocks):
        chunk = bits[block * positions.size:(block + 1) * positions.size]
        u[block, positions[:chunk.size]] = chunk
    x = polar_transform(u) ^ states
    return x[0] if np.ndim(state) == 1 else x


def phase2_channel_decode(system: DirtyPaperSystem, y: BitLike, payload_length: int) -> np.ndarray:
    received = np.atleast_2d(np.asarray(y, dtype=np.uint8))
    blocks = phase2_blocks(system, payload_length)
    if received.shape != (blocks, system.N):
        raise InvalidArgument(msg=f"expected {blocks} phase-two words of {system.N} bits, got {received.shape}")
    positions = _phase2_positions(system)
    pieces = []
    for row in received:
        decoded = scl_decode(DecodeInput(bsc_llr(row, system.p), system.code_c, system.list_size_c))
        pieces.append(decoded.u_hat[positions])
    return np.concatenate(pieces)[:payload_length] if pieces else np.zeros(0, dtype=np.uint8)


def amortized_rate(system: DirtyPaperSystem) -> float:
    """Message bits per channel use once the phase-two codewords are charged to the frame."""
    retransmit = system.retransmit_set.size
    info = system.N - system.code_c.frozen_set.size
    if not retransmit:
        return system.rate
    if not info:
        return 0.0
    return system.message_capacity / (system.N * (1.0 + retransmit / info))

