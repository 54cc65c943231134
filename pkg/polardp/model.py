from __future__ import annotations

import logging
from enum import Enum
from typing import TypeVar, Generic, Optional, Sequence, Union

import numpy as np

from .error import InvalidArgument, MalformedDocument
from .polar_core import as_bits, is_power_of_two

# pylint: disable=invalid-name
T = TypeVar("T")


class PolarDpObject(Generic[T]):
    logger = logging.getLogger(__name__)

    @classmethod
    def deserialize(cls, body) -> T:
        raise NotImplementedError

    def serialize(self) -> dict:
        raise NotImplementedError

    @classmethod
    def parse_from_json(cls, body: dict) -> T:
        if not isinstance(body, dict):
            raise MalformedDocument(msg=f"{cls.__name__} expects a JSON object, got {type(body).__name__}")
        try:
            return cls.deserialize(body)
        except KeyError as key_err:
            cls.logger.warning(f"Unable to deserialize {cls.__name__}, missing key: {key_err}")
            raise MalformedDocument(msg=f"{cls.__name__}: missing key {key_err}") from key_err
        except (TypeError, ValueError) as err:
            cls.logger.warning(f"Unable to deserialize {cls.__name__}: {err}")
            raise MalformedDocument(msg=f"{cls.__name__}: {err}") from err


class PowerMode(Enum):
    AVERAGE = "average"
    PER_CODEWORD = "per_codeword"


class EncoderMode(Enum):
    DETERMINISTIC_LIST = "deterministic_list"
    RANDOMIZED_SC = "randomized_sc"


class FrozenSetMode(Enum):
    THRESHOLD = "threshold"
    SIZE = "size"
    TARGET_PERFORMANCE = "target_performance"


class CodeRole(Enum):
    CHANNEL = "channel"
    SOURCE = "source"


def _index_array(values: Sequence[int], name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int64).reshape(-1)
    if arr.size and np.any(np.diff(arr) <= 0):
        raise InvalidArgument(msg=f"{name} must be strictly increasing")
    return arr


class PolarCode(PolarDpObject):
    """Blocklength, frozen index set and frozen values; shared by channel and source codes.

    Index convention is natural order: the generator is F^{(x)n} without bit reversal,
    sub-channel i takes polarization step k from bit (n - k) of i (MSB first).
    """
    N: int = None
    frozen_set: np.ndarray = None
    frozen_values: np.ndarray = None

    def __init__(self, N: int, frozen_set: Sequence[int], frozen_values: Optional[Sequence[int]] = None):
        if not is_power_of_two(N) or N < 2:
            raise InvalidArgument(msg=f"blocklength must be a power of two >= 2, got {N}")
        self.N = int(N)
        self.frozen_set = _index_array(frozen_set, "frozen_set")
        if self.frozen_set.size and (self.frozen_set[0] < 0 or self.frozen_set[-1] >= self.N):
            raise InvalidArgument(msg=f"frozen indices must lie in [0, {self.N})")
        if frozen_values is None:
            self.frozen_values = np.zeros(self.frozen_set.size, dtype=np.uint8)
        else:
            self.frozen_values = as_bits(frozen_values, allow_empty=True)
        if self.frozen_values.size != self.frozen_set.size:
            raise InvalidArgument(msg=f"{self.frozen_values.size} frozen values for {self.frozen_set.size} frozen indices")

    @property
    def n(self) -> int:
        return self.N.bit_length() - 1

    @property
    def info_set(self) -> np.ndarray:
        return np.setdiff1d(np.arange(self.N, dtype=np.int64), self.frozen_set)

    @property
    def rate(self) -> float:
        return (self.N - self.frozen_set.size) / self.N

    def frozen_mask(self) -> np.ndarray:
        mask = np.zeros(self.N, dtype=np.bool_)
        mask[self.frozen_set] = True
        return mask

    def frozen_vector(self) -> np.ndarray:
        vec = np.zeros(self.N, dtype=np.uint8)
        vec[self.frozen_set] = self.frozen_values
        return vec

    def with_frozen_values(self, frozen_values: Sequence[int]) -> PolarCode:
        return PolarCode(self.N, self.frozen_set, frozen_values)

    @classmethod
    def deserialize(cls, body) -> T:
        return cls(body["N"], body["frozen_set"], body.get("frozen_values"))

    def serialize(self) -> dict:
        return {
            "N": self.N,
            "n": self.n,
            "frozen_set": self.frozen_set.tolist(),
            "frozen_values": self.frozen_values.tolist(),
        }

    def __str__(self):  # pragma: no cover
        return f"PolarCode N={self.N}, |F|={self.frozen_set.size}, rate {self.rate:.4f}"

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return (self.N == other.N and np.array_equal(self.frozen_set, other.frozen_set)
                    and np.array_equal(self.frozen_values, other.frozen_values))
        elif isinstance(other, dict):
            return self == PolarCode.deserialize(other)
        else:
            return False


class ReliabilityProfile(PolarDpObject):
    N: int = None
    z_lower: np.ndarray = None
    z_upper: np.ndarray = None
    mc_error_rate: Optional[np.ndarray] = None
    mc_bhattacharyya: Optional[np.ndarray] = None
    provenance: dict = {}

    # pylint: disable=too-many-arguments
    def __init__(self, N: int, z_lower: Sequence[float], z_upper: Sequence[float],
                 mc_error_rate: Optional[Sequence[float]] = None, provenance: Optional[dict] = None,
                 mc_bhattacharyya: Optional[Sequence[float]] = None):
        if not is_power_of_two(N):
            raise InvalidArgument(msg=f"blocklength must be a power of two, got {N}")
        self.N = int(N)
        self.z_lower = np.asarray(z_lower, dtype=np.float64).reshape(-1)
        self.z_upper = np.asarray(z_upper, dtype=np.float64).reshape(-1)
        if self.z_lower.size != self.N or self.z_upper.size != self.N:
            raise InvalidArgument(msg=f"bound arrays must have length {self.N}")
        if np.any(self.z_lower < 0) or np.any(self.z_upper > 1) or np.any(self.z_lower > self.z_upper):
            raise InvalidArgument(msg="bounds must satisfy 0 <= z_lower <= z_upper <= 1")
        self.mc_error_rate = self._estimate(mc_error_rate, "mc_error_rate")
        self.mc_bhattacharyya = self._estimate(mc_bhattacharyya, "mc_bhattacharyya")
        self.provenance = dict(provenance or {})

    def _estimate(self, values: Optional[Sequence[float]], name: str) -> Optional[np.ndarray]:
        if values is None:
            return None
        values = np.asarray(values, dtype=np.float64).reshape(-1)
        if values.size != self.N:
            raise InvalidArgument(msg=f"{name} must have length {self.N}", field=name)
        if np.any(values < 0) or np.any(values > 1):
            raise InvalidArgument(msg=f"{name} entries must lie in [0, 1]", field=name)
        return values

    @property
    def n(self) -> int:
        return self.N.bit_length() - 1

    @property
    def z_estimate(self) -> np.ndarray:
        """Per-index Bhattacharyya values: the Monte-Carlo estimate when there is one, the upper bound otherwise."""
        return self.mc_bhattacharyya if self.mc_bhattacharyya is not None else self.z_upper

    @classmethod
    def deserialize(cls, body) -> T:
        return cls(body["N"], body["z_lower"], body["z_upper"], body.get("mc_error_rate"), body.get("provenance"),
                   body.get("mc_bhattacharyya"))

    def serialize(self) -> dict:
        body = {
            "N": self.N,
            "n": self.n,
            "z_lower": self.z_lower.tolist(),
            "z_upper": self.z_upper.tolist(),
            "provenance": self.provenance,
        }
        if self.mc_error_rate is not None:
            body["mc_error_rate"] = self.mc_error_rate.tolist()
        if self.mc_bhattacharyya is not None:
            body["mc_bhattacharyya"] = self.mc_bhattacharyya.tolist()
        return body

    def __str__(self):  # pragma: no cover
        source = "monte-carlo" if self.mc_error_rate is not None else "bounds"
        return f"ReliabilityProfile N={self.N} ({source}, {self.provenance})"

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return (self.N == other.N and np.array_equal(self.z_lower, other.z_lower)
                    and np.array_equal(self.z_upper, other.z_upper)
                    and _same_optional(self.mc_error_rate, other.mc_error_rate)
                    and _same_optional(self.mc_bhattacharyya, other.mc_bhattacharyya))
        else:
            return False


def _same_optional(first: Optional[np.ndarray], second: Optional[np.ndarray]) -> bool:
    if first is None or second is None:
        return first is None and second is None
    return np.array_equal(first, second)


class FrozenSetSpec(PolarDpObject):
    """How to turn a profile into a frozen set.

    threshold mode freezes {i : z_upper[i] >= threshold}; size mode freezes the `size`
    least reliable indices; target mode reads `target` as a block error rate (channel role)
    or as an average distortion (source role, calibrated by SCL encoding).
    """
    mode: FrozenSetMode = None
    threshold: Optional[float] = None
    size: Optional[int] = None
    target: Optional[float] = None
    role: CodeRole = CodeRole.CHANNEL
    list_size: int = 8
    trials: int = 200
    seed: int = 0

    # pylint: disable=too-many-arguments
    def __init__(self, mode: Union[FrozenSetMode, str], threshold: Optional[float] = None, size: Optional[int] = None,
                 target: Optional[float] = None, role: Union[CodeRole, str] = CodeRole.CHANNEL,
                 list_size: int = 8, trials: int = 200, seed: int = 0):
        self.mode = FrozenSetMode(mode)
        self.role = CodeRole(role)
        self.threshold = threshold
        self.size = size
        self.target = target
        self.list_size = int(list_size)
        self.trials = int(trials)
        self.seed = int(seed)
        populated = {FrozenSetMode.THRESHOLD: threshold is not None,
                     FrozenSetMode.SIZE: size is not None,
                     FrozenSetMode.TARGET_PERFORMANCE: target is not None}
        if not populated[self.mode] or sum(populated.values()) != 1:
            raise InvalidArgument(msg=f"frozen set spec in {self.mode.value} mode needs exactly its own parameter")
        if self.size is not None and self.size < 0:
            raise InvalidArgument(msg=f"frozen set size must be non-negative, got {self.size}")
        if self.target is not None and self.target < 0:
            raise InvalidArgument(msg=f"target must be non-negative, got {self.target}")
        if self.list_size < 1 or self.trials < 1:
            raise InvalidArgument(msg="list_size and trials must be >= 1")

    @classmethod
    def deserialize(cls, body) -> T:
        return cls(body["mode"], body.get("threshold"), body.get("size"), body.get("target"),
                   body.get("role", CodeRole.CHANNEL.value), body.get("list_size", 8), body.get("trials", 200),
                   body.get("seed", 0))

    def serialize(self) -> dict:
        body = {"mode": self.mode.value, "role": self.role.value}
        if self.threshold is not None:
            body["threshold"] = self.threshold
        if self.size is not None:
            body["size"] = self.size
        if self.target is not None:
            body["target"] = self.target
            body["list_size"] = self.list_size
            body["trials"] = self.trials
            body["seed"] = self.seed
        return body

    def __str__(self):  # pragma: no cover
        return f"FrozenSetSpec {self.serialize()}"

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return self.serialize() == other.serialize()
        elif isinstance(other, dict):
            return self.serialize() == FrozenSetSpec.deserialize(other).serialize()
        else:
            return False


class CrcConfig(PolarDpObject):
    r: int = None
    polynomial: int = None
    init: int = 0

    def __init__(self, r: int, polynomial: Union[int, str], init: Union[int, str] = 0):
        if not 1 <= int(r) <= 32:
            raise InvalidArgument(msg=f"CRC length must lie in [1, 32], got {r}")
        self.r = int(r)
        self.polynomial = self._parse_register(polynomial, "polynomial")
        self.init = self._parse_register(init, "init")

    def _parse_register(self, value: Union[int, str], name: str) -> int:
        if isinstance(value, str):
            text = value.strip().lower()
            if text.startswith("0x"):
                parsed = int(text, 16)
            elif set(text) <= {"0", "1"} and len(text) == self.r:
                # MSB-first bit string, leading x^r term implicit
                parsed = int(text, 2)
            else:
                raise InvalidArgument(msg=f"cannot parse CRC {name} {value!r}")
        else:
            parsed = int(value)
        if not 0 <= parsed < (1 << self.r):
            raise InvalidArgument(msg=f"CRC {name} {parsed:#x} does not fit in {self.r} bits")
        return parsed

    @classmethod
    def default(cls) -> CrcConfig:
        # x^8 + x^2 + x + 1, zero init, no reflection, no final xor
        return cls(8, 0x07, 0)

    @classmethod
    def deserialize(cls, body) -> T:
        return cls(body["r"], body["poly_hex"], body.get("init_hex", 0))

    def serialize(self) -> dict:
        width = (self.r + 3) // 4
        return {"r": self.r, "poly_hex": f"0x{self.polynomial:0{width}x}", "init_hex": f"0x{self.init:0{width}x}"}

    def __hash__(self):
        return hash((self.r, self.polynomial, self.init))

    def __str__(self):  # pragma: no cover
        return f"CRC-{self.r} poly {self.polynomial:#x} init {self.init:#x}"

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return self.r == other.r and self.polynomial == other.polynomial and self.init == other.init
        elif isinstance(other, dict):
            return self == CrcConfig.deserialize(other)
        else:
            return False


class DirtyPaperSystem(PolarDpObject):
    """The nested pair (C_c, C_s) plus everything the encoder and decoder need to agree on."""
    N: int = None
    code_c: PolarCode = None
    code_s: PolarCode = None
    crc: Optional[CrcConfig] = None
    list_size_c: int = 8
    list_size_s: int = 8
    power_mode: PowerMode = PowerMode.AVERAGE
    D: float = None
    p: float = None
    retry_limit: int = 8

    # pylint: disable=too-many-arguments
    def __init__(self, code_c: PolarCode, code_s: PolarCode, crc: Optional[CrcConfig], p: float, D: float,
                 list_size_c: int = 8, list_size_s: int = 8,
                 power_mode: Union[PowerMode, str] = PowerMode.AVERAGE, retry_limit: int = 8):
        if code_c.N != code_s.N:
            raise InvalidArgument(msg=f"channel and source codes differ in blocklength ({code_c.N} vs {code_s.N})")
        if list_size_c < 1 or list_size_s < 1:
            raise InvalidArgument(msg="list sizes must be >= 1")
        self.N = code_c.N
        self.code_c = code_c
        self.code_s = code_s
        self.crc = crc
        self.p = float(p)
        self.D = float(D)
        self.list_size_c = int(list_size_c)
        self.list_size_s = int(list_size_s)
        self.power_mode = PowerMode(power_mode)
        self.retry_limit = int(retry_limit)

    @property
    def crc_bits(self) -> int:
        return self.crc.r if self.crc is not None else 0

    @property
    def message_slots(self) -> np.ndarray:
        """F_s minus F_c, ascending: the positions carrying message followed by CRC."""
        return np.setdiff1d(self.code_s.frozen_set, self.code_c.frozen_set)

    @property
    def retransmit_set(self) -> np.ndarray:
        """F_c minus F_s: channel-frozen positions the source encoder leaves free."""
        return np.setdiff1d(self.code_c.frozen_set, self.code_s.frozen_set)

    @property
    def message_capacity(self) -> int:
        return int(self.message_slots.size) - self.crc_bits

    @property
    def rate(self) -> float:
        return self.message_capacity / self.N

    @property
    def design_rate(self) -> float:
        return (self.code_s.frozen_set.size - self.code_c.frozen_set.size) / self.N

    @classmethod
    def deserialize(cls, body) -> T:
        crc = CrcConfig.deserialize(body["crc"]) if body.get("crc") else None
        return cls(PolarCode.deserialize(body["code_c"]), PolarCode.deserialize(body["code_s"]), crc,
                   body["p"], body["D"], body["L_c"], body["L_s"], body["power_mode"], body.get("retry_limit", 8))

    def serialize(self) -> dict:
        return {
            "N": self.N,
            "p": self.p,
            "D": self.D,
            "code_c": self.code_c.serialize(),
            "code_s": self.code_s.serialize(),
            "crc": self.crc.serialize() if self.crc is not None else None,
            "L_c": self.list_size_c,
            "L_s": self.list_size_s,
            "power_mode": self.power_mode.value,
            "retry_limit": self.retry_limit,
        }

    def __str__(self):  # pragma: no cover
        return (f"DirtyPaperSystem N={self.N} p={self.p} D={self.D}: |F_c|={self.code_c.frozen_set.size}, "
                f"|F_s|={self.code_s.frozen_set.size}, rate {self.rate:.4f}, retransmit {self.retransmit_set.size}")

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return self.serialize() == other.serialize()
        else:
            return False


class DpEncodeResult(PolarDpObject):
    x: np.ndarray = None
    s_prime: np.ndarray = None
    phase2_payload: np.ndarray = None
    power_used: float = None
    power_ok: bool = True
    attempts: int = 1

    # pylint: disable=too-many-arguments
    def __init__(self, x, s_prime, phase2_payload, power_used: float, power_ok: bool, attempts: int = 1):
        self.x = as_bits(x)
        self.s_prime = as_bits(s_prime)
        self.phase2_payload = as_bits(phase2_payload, allow_empty=True)
        self.power_used = float(power_used)
        self.power_ok = bool(power_ok)
        self.attempts = int(attempts)

    @classmethod
    def deserialize(cls, body) -> T:
        return cls(body["x"], body["s_prime"], body["phase2_payload"], body["power_used"], body["power_ok"],
                   body.get("attempts", 1))

    def serialize(self) -> dict:
        return {"x": self.x.tolist(), "s_prime": self.s_prime.tolist(), "phase2_payload": self.phase2_payload.tolist(),
                "power_used": self.power_used, "power_ok": self.power_ok, "attempts": self.attempts}


class NestedProcessState(PolarDpObject):
    """(eps1, eps2) tracking Z_n(p) and 1 - Z_n(D) along one branch sequence."""
    eps1: float = None
    eps2: float = None
    depth: int = 0

    def __init__(self, eps1: float, eps2: float, depth: int = 0):
        if not (0.0 <= eps1 <= 1.0 and 0.0 <= eps2 <= 1.0):
            raise InvalidArgument(msg=f"process coordinates must lie in [0, 1], got ({eps1}, {eps2})")
        if not 0 <= depth <= 25:
            raise InvalidArgument(msg=f"depth must lie in [0, 25], got {depth}")
        self.eps1 = float(eps1)
        self.eps2 = float(eps2)
        self.depth = int(depth)

    @classmethod
    def deserialize(cls, body) -> T:
        return cls(body["eps1"], body["eps2"], body.get("depth", 0))

    def serialize(self) -> dict:
        return {"eps1": self.eps1, "eps2": self.eps2, "depth": self.depth}

    def __str__(self):  # pragma: no cover
        return f"({self.eps1:.6g}, {self.eps2:.6g}) @ depth {self.depth}"

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return self.eps1 == other.eps1 and self.eps2 == other.eps2 and self.depth == other.depth
        else:
            return False


class ProductProcessState(PolarDpObject):
    heps1: float = None
    heps2: float = None
    r_value: float = None
    depth: int = 0

    def __init__(self, heps1: float, heps2: float, r_value: float, depth: int = 0):
        if not (0.0 <= heps1 <= 1.0 and 0.0 <= heps2 <= 1.0):
            raise InvalidArgument(msg=f"process coordinates must lie in [0, 1], got ({heps1}, {heps2})")
        self.heps1 = float(heps1)
        self.heps2 = float(heps2)
        self.r_value = float(r_value)
        self.depth = int(depth)

    @classmethod
    def deserialize(cls, body) -> T:
        return cls(body["heps1"], body["heps2"], body["r_value"], body.get("depth", 0))

    def serialize(self) -> dict:
        return {"heps1": self.heps1, "heps2": self.heps2, "r_value": self.r_value, "depth": self.depth}

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return self.serialize() == other.serialize()
        else:
            return False


class FbParams(PolarDpObject):
    N: int = None
    p: float = None
    D: float = None
    eps_p: float = 0.001
    eps_D: float = 0.5

    # pylint: disable=too-many-arguments
    def __init__(self, N: int, p: float, D: float, eps_p: float = 0.001, eps_D: float = 0.5):
        for name, value in (("p", p), ("D", D), ("eps_p", eps_p), ("eps_D", eps_D)):
            if not 0.0 < value < 1.0:
                raise InvalidArgument(msg=f"{name} must lie in (0, 1), got {value}")
        if not (p < 0.5 and D < 0.5):
            raise InvalidArgument(msg=f"p and D must lie in (0, 1/2), got p={p}, D={D}")
        if N < 1:
            raise InvalidArgument(msg=f"blocklength must be positive, got {N}")
        self.N = int(N)
        self.p = float(p)
        self.D = float(D)
        self.eps_p = float(eps_p)
        self.eps_D = float(eps_D)

    @classmethod
    def deserialize(cls, body) -> T:
        return cls(body["N"], body["p"], body["D"], body.get("eps_p", 0.001), body.get("eps_D", 0.5))

    def serialize(self) -> dict:
        return {"N": self.N, "p": self.p, "D": self.D, "eps_p": self.eps_p, "eps_D": self.eps_D}


class ExperimentRecord(PolarDpObject):
    trial_index: int = None
    seed: int = None
    distortion: float = 0.0
    power_used: float = 0.0
    decode_success: bool = True
    crc_ok: bool = True
    retransmit_bits: int = 0
    bit_errors: int = 0
    power_ok: bool = True

    # pylint: disable=too-many-arguments
    def __init__(self, trial_index: int, seed: int, distortion: float = 0.0, power_used: float = 0.0,
                 decode_success: bool = True, crc_ok: bool = True, retransmit_bits: int = 0, bit_errors: int = 0,
                 power_ok: bool = True):
        if not (0.0 <= distortion <= 1.0 and 0.0 <= power_used <= 1.0):
            raise InvalidArgument(msg="distortion and power must lie in [0, 1]")
        self.trial_index = int(trial_index)
        self.seed = int(seed)
        self.distortion = float(distortion)
        self.power_used = float(power_used)
        self.decode_success = bool(decode_success)
        self.crc_ok = bool(crc_ok)
        self.retransmit_bits = int(retransmit_bits)
        self.bit_errors = int(bit_errors)
        self.power_ok = bool(power_ok)

    @classmethod
    def deserialize(cls, body) -> T:
        return cls(body["trial_index"], body["seed"], body["distortion"], body["power_used"], body["decode_success"],
                   body["crc_ok"], body.get("retransmit_bits", 0), body.get("bit_errors", 0),
                   body.get("power_ok", True))

    def serialize(self) -> dict:
        return {
            "trial_index": self.trial_index,
            "seed": self.seed,
            "distortion": self.distortion,
            "power_used": self.power_used,
            "decode_success": self.decode_success,
            "crc_ok": self.crc_ok,
            "retransmit_bits": self.retransmit_bits,
            "bit_errors": self.bit_errors,
            "power_ok": self.power_ok,
        }

    def __str__(self):  # pragma: no cover
        return f"Trial {self.trial_index} (seed {self.seed}): {self.serialize()}"

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return self.serialize() == other.serialize()
        elif isinstance(other, dict):
            return self.serialize() == other
        else:
            return False


class DecodeInput(PolarDpObject):
    llr: np.ndarray = None
    code: PolarCode = None
    list_size: int = 1
    crc: Optional[CrcConfig] = None
    crc_slots: Optional[np.ndarray] = None

    # pylint: disable=too-many-arguments
    def __init__(self, llr: Sequence[float], code: PolarCode, list_size: int = 1, crc: Optional[CrcConfig] = None,
                 crc_slots: Optional[Sequence[int]] = None):
        self.llr = np.asarray(llr, dtype=np.float64).reshape(-1)
        if self.llr.size != code.N:
            raise InvalidArgument(msg=f"{self.llr.size} LLRs for a code of length {code.N}")
        if not np.all(np.isfinite(self.llr)):
            raise InvalidArgument(msg="LLRs must be finite")
        if list_size < 1:
            raise InvalidArgument(msg=f"list size must be >= 1, got {list_size}")
        if (crc is None) != (crc_slots is None):
            raise InvalidArgument(msg="a CRC needs its payload slot layout and vice versa")
        self.code = code
        self.list_size = int(list_size)
        self.crc = crc
        self.crc_slots = None if crc_slots is None else _index_array(crc_slots, "crc_slots")
        if self.crc_slots is not None and self.crc_slots.size < crc.r:
            raise InvalidArgument(msg=f"{self.crc_slots.size} payload slots cannot hold a {crc.r}-bit CRC")

    @classmethod
    def deserialize(cls, body) -> T:
        crc = CrcConfig.deserialize(body["crc"]) if body.get("crc") else None
        return cls(body["llr"], PolarCode.deserialize(body["code"]), body.get("list_size", 1), crc,
                   body.get("crc_slots"))

    def serialize(self) -> dict:
        return {"llr": self.llr.tolist(), "code": self.code.serialize(), "list_size": self.list_size,
                "crc": self.crc.serialize() if self.crc is not None else None,
                "crc_slots": self.crc_slots.tolist() if self.crc_slots is not None else None}


class SourceEncodeInput(PolarDpObject):
    source: np.ndarray = None
    code: PolarCode = None
    list_size: int = 1
    design_parameter: float = None
    mode: EncoderMode = EncoderMode.DETERMINISTIC_LIST
    seed: Optional[int] = None
    dither: float = 0.0

    # pylint: disable=too-many-arguments
    def __init__(self, source: Sequence[int], code: PolarCode, list_size: int, design_parameter: float,
                 mode: Union[EncoderMode, str] = EncoderMode.DETERMINISTIC_LIST, seed: Optional[int] = None,
                 dither: float = 0.0):
        self.source = as_bits(source)
        if self.source.size != code.N:
            raise InvalidArgument(msg=f"source of length {self.source.size} for a code of length {code.N}")
        if not 0.0 < design_parameter < 0.5:
            raise InvalidArgument(msg=f"design parameter must lie in (0, 1/2), got {design_parameter}")
        if list_size < 1:
            raise InvalidArgument(msg=f"list size must be >= 1, got {list_size}")
        self.mode = EncoderMode(mode)
        if self.mode is EncoderMode.RANDOMIZED_SC and seed is None:
            raise InvalidArgument(msg="randomized encoding needs a seed")
        if dither and seed is None:
            raise InvalidArgument(msg="dithered encoding needs a seed")
        self.code = code
        self.list_size = int(list_size)
        self.design_parameter = float(design_parameter)
        self.seed = seed
        self.dither = float(dither)

    @classmethod
    def deserialize(cls, body) -> T:
        return cls(body["source"], PolarCode.deserialize(body["code"]), body["list_size"], body["design_parameter"],
                   body.get("mode", EncoderMode.DETERMINISTIC_LIST.value), body.get("seed"), body.get("dither", 0.0))

    def serialize(self) -> dict:
        return {"source": self.source.tolist(), "code": self.code.serialize(), "list_size": self.list_size,
                "design_parameter": self.design_parameter, "mode": self.mode.value, "seed": self.seed,
                "dither": self.dither}
