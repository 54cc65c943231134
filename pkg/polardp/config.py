import copy
import hashlib
import json
from typing import Any, Optional

from .error import ConfigurationError, MalformedDocument
from .polar_core import is_power_of_two

KINDS = ("quantize", "dp_end_to_end", "nestedness_scan", "fb_curve", "construct")

# kind-specific parameters and their defaults; keys outside these maps are rejected
DEFAULT_PARAMETERS = {
    "quantize": {
        "N": 1024,
        "D": 0.21,
        "rate": 0.258,
        "list_sizes": [1, 50],
        "encoder_mode": "deterministic_list",
        "construction_trials": 10000,
    },
    "dp_end_to_end": {
        "N": 1024,
        "p": 0.11,
        "D": 0.31,
        "L_c": 8,
        "L_s": 8,
        "r": 8,
        "crc_poly": "0x07",
        "power_mode": "average",
        "retry_limit": 8,
        "delta": 0.0,
        "bler_target": 1e-3,
        "distortion_target": None,
        "channel_calibration": "union",
        "calibration_trials": 200,
        "construction_trials": 10000,
        "encoder_mode": "deterministic_list",
        "p_sim": None,
    },
    "nestedness_scan": {
        "N_values": [1024],
        "p_values": [0.11],
        "D_values": [0.21, 0.25, 0.31, 0.41],
        "thresholds": "schedule",
        "delta": 0.5,
        "bler_target": 1e-3,
        "list_size": 8,
        "calibration_trials": 200,
        "construction_trials": 10000,
    },
    "fb_curve": {
        "N_values": [1024],
        "p": 0.11,
        "D_values": [0.25, 0.3, 0.35, 0.4, 0.45],
        "eps_p": 1e-3,
        "eps_D_values": [0.5, 0.01],
    },
    "construct": {
        "N": 1024,
        "p": 0.11,
        "method": "monte_carlo",
        "frozen_set": {"mode": "target_performance", "target": 1e-3, "role": "channel"},
        "construction_trials": 10000,
    },
}


class ExperimentConfig:  # pylint: disable=too-few-public-methods,too-many-instance-attributes
    kind = None
    master_seed = None
    trials = 1000
    threads = 1
    out = None
    records = None
    acceptance = None
    parameters = None

    @classmethod
    def get_default(cls, kind: str, master_seed: int = 0):
        return cls(kind, master_seed)

    # pylint: disable=too-many-arguments
    def __init__(self,
                 kind: str,
                 master_seed: Optional[int],
                 trials: int = 1000,
                 parameters: Optional[dict] = None,
                 threads: int = 1,
                 out: Optional[str] = None,
                 records: Optional[str] = None,
                 acceptance: Optional[dict] = None):
        super().__init__()
        if kind not in KINDS:
            raise ConfigurationError(msg=f"must be one of {', '.join(KINDS)}, got {kind!r}", field="kind")
        self.kind = kind
        self.master_seed = master_seed
        self.trials = trials
        self.threads = threads
        self.out = out
        self.records = records
        self.acceptance = dict(acceptance or {})
        defaults = copy.deepcopy(DEFAULT_PARAMETERS[kind])
        unknown = set(parameters or {}) - set(defaults)
        if unknown:
            raise ConfigurationError(msg=f"unknown parameters {sorted(unknown)}", field="parameters")
        defaults.update(parameters or {})
        self.parameters = defaults
        if self.kind == "dp_end_to_end" and self.parameters["distortion_target"] is None:
            self.parameters["distortion_target"] = self.parameters["D"]

    def __getitem__(self, name: str) -> Any:
        return self.parameters[name]

    @classmethod
    def from_dict(cls, body: dict):
        if not isinstance(body, dict):
            raise MalformedDocument(msg=f"configuration must be a JSON object, got {type(body).__name__}")
        known = {"kind", "master_seed", "trials", "parameters", "threads", "out", "records", "acceptance"}
        unknown = set(body) - known
        if unknown:
            raise ConfigurationError(msg=f"unknown keys {sorted(unknown)}", field="config")
        if "kind" not in body:
            raise ConfigurationError(msg="missing", field="kind")
        return cls(body["kind"], body.get("master_seed"), body.get("trials", cls.trials), body.get("parameters"),
                   body.get("threads", cls.threads), body.get("out"), body.get("records"), body.get("acceptance"))

    @classmethod
    def from_file(cls, path: str):
        with open(path, "r", encoding="utf-8") as handle:
            try:
                body = json.load(handle)
            except json.JSONDecodeError as err:
                raise MalformedDocument(msg=f"{path} is not valid JSON: {err}") from err
        return cls.from_dict(body)

    def serialize(self) -> dict:
        return {
            "kind": self.kind,
            "master_seed": self.master_seed,
            "trials": self.trials,
            "parameters": self.parameters,
            "threads": self.threads,
            "out": self.out,
            "records": self.records,
            "acceptance": self.acceptance,
        }

    def config_hash(self) -> str:
        """First 16 hex digits of SHA-256 over the result-relevant fields in canonical JSON."""
        relevant = {"kind": self.kind, "master_seed": self.master_seed, "trials": self.trials,
                    "parameters": self.parameters}
        canonical = json.dumps(relevant, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    # pylint: disable=too-many-branches
    def validate(self) -> "ExperimentConfig":
        if self.master_seed is None:
            raise ConfigurationError(msg="must be given explicitly", field="master_seed")
        if not isinstance(self.master_seed, int) or self.master_seed < 0:
            raise ConfigurationError(msg=f"must be a non-negative integer, got {self.master_seed!r}",
                                     field="master_seed")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigurationError(msg="must be >= 1", field="trials")
        if not isinstance(self.threads, int) or self.threads < 1:
            raise ConfigurationError(msg="must be >= 1", field="threads")
        params = self.parameters
        if "N" in params:
            self._check_blocklength(params["N"], "N")
        for value in params.get("N_values", []):
            self._check_blocklength(value, "N_values")
        for name in ("p", "D"):
            if name in params and not 0.0 < params[name] < 0.5:
                raise ConfigurationError(msg=f"must lie in (0, 1/2), got {params[name]}", field=name)
        if "p" in params and "D" in params and not params["p"] < params["D"]:
            raise ConfigurationError(msg=f"need p < D, got p={params['p']}, D={params['D']}", field="D")
        for name in ("L_c", "L_s", "list_size", "retry_limit", "construction_trials", "calibration_trials"):
            minimum = 0 if name == "retry_limit" else 1
            if name in params and (not isinstance(params[name], int) or params[name] < minimum):
                raise ConfigurationError(msg=f"must be a positive integer, got {params[name]!r}", field=name)
        if "list_sizes" in params and (not params["list_sizes"] or min(params["list_sizes"]) < 1):
            raise ConfigurationError(msg="must be a non-empty list of sizes >= 1", field="list_sizes")
        if "power_mode" in params and params["power_mode"] not in ("average", "per_codeword"):
            raise ConfigurationError(msg=f"must be average or per_codeword, got {params['power_mode']!r}",
                                     field="power_mode")
        if "r" in params and not 0 <= params["r"] <= 32:
            raise ConfigurationError(msg=f"must lie in [0, 32], got {params['r']}", field="r")
        if params.get("p_sim") is not None and not 0.0 <= params["p_sim"] < 0.5:
            raise ConfigurationError(msg=f"must lie in [0, 1/2), got {params['p_sim']}", field="p_sim")
        if "rate" in params and not 0.0 < params["rate"] < 1.0:
            raise ConfigurationError(msg=f"must lie in (0, 1), got {params['rate']}", field="rate")
        if "channel_calibration" in params and params["channel_calibration"] not in ("union", "simulate"):
            raise ConfigurationError(msg="must be union or simulate", field="channel_calibration")
        if "thresholds" in params and params["thresholds"] not in ("schedule", "calibrated"):
            raise ConfigurationError(msg="must be schedule or calibrated", field="thresholds")
        if "method" in params and params["method"] not in ("bounds", "monte_carlo"):
            raise ConfigurationError(msg="must be bounds or monte_carlo", field="method")
        return self

    @staticmethod
    def _check_blocklength(value, field: str):
        if not isinstance(value, int) or value < 2 or not is_power_of_two(value):
            raise ConfigurationError(msg=f"must be a power of two >= 2, got {value!r}", field=field)
