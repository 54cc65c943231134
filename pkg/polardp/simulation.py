"""Monte-Carlo experiments: seeded sources and channels, trial fan-out, summaries and output files."""
import csv
import json
import logging
import math
import time
from multiprocessing import Pool
from typing import Iterable, Optional, TextIO, Union

import numpy as np
from tqdm import tqdm

from .config import ExperimentConfig
from .construction import (build_frozen_set, calibrate_source_code, code_with_information_size, construct_profile,
                           write_construction)
from .dirty_paper import (amortized_rate, build_system, dp_decode, dp_encode, phase2_blocks, phase2_channel_decode,
                          phase2_channel_encode)
from .error import AcceptanceCheckFailed, InvalidArgument
from .finite_blocklength import channel_rate, dp_capacity, gp_rate, h2_inv, rd_rate
from .model import (CodeRole, CrcConfig, DirtyPaperSystem, EncoderMode, ExperimentRecord, FbParams, FrozenSetMode,
                    FrozenSetSpec, PolarCode, PowerMode, SourceEncodeInput)
from .nestedness import scan_point
from .polar_core import bernoulli_bits, bit_generator
from .scl_codec import scl_source_encode

RNG_NAME = "philox4x64"
TRIAL_CHUNK = 64
SAMPLE_BLOCK = 4096

STREAM_TRIAL = 0
STREAM_ENCODER = 1
STREAM_PHASE2 = 2


def derive_seed(master_seed: int, trial_index: int, stream: int = STREAM_TRIAL) -> int:
    sequence = np.random.SeedSequence(int(master_seed), spawn_key=(int(trial_index), int(stream)))
    return int(sequence.generate_state(1, np.uint64)[0])


def _check_probability(p: float):
    if not 0.0 <= p <= 1.0:
        raise InvalidArgument(msg=f"probability must lie in [0, 1], got {p}")


def bsc_sample(p: float, length: int, seed: int, start: int = 0) -> np.ndarray:
    """BSC(p) noise bits start .. start + length - 1 of the Philox stream keyed by `seed`.

    Bit i comes from block i // SAMPLE_BLOCK, whose generator starts at its own counter, so any
    window is reproduced without drawing the bits before it.
    """
    _check_probability(p)
    if length < 0 or start < 0:
        raise InvalidArgument(msg=f"start and length must be non-negative, got start={start}, length={length}")
    first, last = start // SAMPLE_BLOCK, (start + length + SAMPLE_BLOCK - 1) // SAMPLE_BLOCK
    blocks = [bernoulli_bits(np.random.Generator(np.random.Philox(key=int(seed) % 2 ** 128, counter=block << 192)),
                             p, SAMPLE_BLOCK) for block in range(first, last)]
    bits = np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.uint8)
    offset = start - first * SAMPLE_BLOCK
    return bits[offset:offset + length]


def bernoulli_source(length: int, seed: int) -> np.ndarray:
    return bsc_sample(0.5, length, seed)


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if trials <= 0:
        return 0.0, 1.0
    phat = successes / trials
    denominator = 1.0 + z * z / trials
    centre = (phat + z * z / (2.0 * trials)) / denominator
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials)) / denominator
    return max(0.0, centre - half), min(1.0, centre + half)


def _quantize_trials(task: tuple) -> list:
    code_body, list_size, design, mode, master_seed, indices = task
    code = PolarCode.deserialize(code_body)
    records = []
    for trial in indices:
        rng = bit_generator(master_seed, trial, STREAM_TRIAL)
        source = bernoulli_bits(rng, 0.5, code.N)
        encoded = scl_source_encode(SourceEncodeInput(source, code, list_size, design, mode,
                                                      derive_seed(master_seed, trial, STREAM_ENCODER)))
        records.append(ExperimentRecord(trial, derive_seed(master_seed, trial), encoded.distortion,
                                        encoded.distortion).serialize())
    return records


def _dp_trials(task: tuple) -> list:
    system_body, p_sim, mode, master_seed, indices = task
    system = DirtyPaperSystem.deserialize(system_body)
    records = []
    for trial in indices:
        rng = bit_generator(master_seed, trial, STREAM_TRIAL)
        message = bernoulli_bits(rng, 0.5, system.message_capacity)
        state = bernoulli_bits(rng, 0.5, system.N)
        noise = bernoulli_bits(rng, p_sim, system.N)
        encoded = dp_encode(system, message, state, derive_seed(master_seed, trial, STREAM_ENCODER), mode)
        y = encoded.x ^ state ^ noise
        if not np.array_equal(y, encoded.s_prime ^ noise):
            raise AssertionError(f"trial {trial}: channel output differs from s' + z")
        payload = None
        if encoded.phase2_payload.size:
            payload = _transport_phase2(system, encoded.phase2_payload, p_sim,
                                        bit_generator(master_seed, trial, STREAM_PHASE2))
        decoded = dp_decode(system, y, payload)
        bit_errors = int(np.count_nonzero(decoded.m_hat != message))
        records.append(ExperimentRecord(trial, derive_seed(master_seed, trial), encoded.power_used,
                                        encoded.power_used, bit_errors == 0 and decoded.crc_ok, decoded.crc_ok,
                                        int(encoded.phase2_payload.size), bit_errors, encoded.power_ok).serialize())
    return records


def _transport_phase2(system: DirtyPaperSystem, payload: np.ndarray, p_sim: float,
                      rng: np.random.Generator) -> np.ndarray:
    blocks = phase2_blocks(system, payload.size)
    state = bernoulli_bits(rng, 0.5, (blocks, system.N))
    noise = bernoulli_bits(rng, p_sim, (blocks, system.N))
    x = phase2_channel_encode(system, payload, state)
    return phase2_channel_decode(system, x ^ state ^ noise, payload.size)


class ExperimentRunner:
    logger = logging.getLogger(__name__)
    timing_logger = logging.getLogger(f"{__name__}.timing")

    def __init__(self, config: ExperimentConfig, progress: bool = False):
        self.config = config.validate()
        self.progress = progress
        self.config_hash = config.config_hash()
        self.records: list[ExperimentRecord] = []

    def run(self) -> list[dict]:
        self.logger.info(f"starting {self.config.kind} experiment {self.config_hash} "
                         f"({self.config.trials} trials, {self.config.threads} workers)")
        start = time.time()
        runner = {
            "quantize": self._run_quantize,
            "dp_end_to_end": self._run_dp,
            "nestedness_scan": self._run_nestedness,
            "fb_curve": self._run_fb,
            "construct": self._run_construct,
        }[self.config.kind]
        rows = [dict({"kind": self.config.kind, "config_hash": self.config_hash, "rng": RNG_NAME}, **row)
                for row in runner()]
        self.timing_logger.debug(f"{self.config.kind} experiment took {time.time() - start:.2f} seconds")
        self.logger.info(f"finished {self.config.kind} experiment {self.config_hash}: {len(rows)} rows")
        return rows

    def _fan_out(self, worker, make_task, label: str) -> list[ExperimentRecord]:
        chunks = [range(first, min(first + TRIAL_CHUNK, self.config.trials))
                  for first in range(0, self.config.trials, TRIAL_CHUNK)]
        tasks = [make_task(list(chunk)) for chunk in chunks]
        progress = tqdm(total=self.config.trials, desc=label, disable=not self.progress)
        collected = []
        if self.config.threads == 1:
            results = map(worker, tasks)
            for batch in results:
                collected.extend(batch)
                progress.update(len(batch))
        else:
            with Pool(self.config.threads) as pool:
                for batch in pool.imap(worker, tasks):
                    collected.extend(batch)
                    progress.update(len(batch))
        progress.close()
        records = [ExperimentRecord.deserialize(body) for body in collected]
        self.records.extend(records)
        return records

    def _run_quantize(self) -> Iterable[dict]:
        cfg = self.config
        N, rate, design = cfg["N"], cfg["rate"], cfg["D"]
        profile = construct_profile(design, N, True, cfg["construction_trials"], cfg.master_seed)
        code = code_with_information_size(profile, int(round(rate * N)))
        mode = EncoderMode(cfg["encoder_mode"])
        bound = h2_inv(1.0 - code.rate)
        for list_size in cfg["list_sizes"]:
            records = self._fan_out(_quantize_trials,
                                    lambda chunk, L=list_size: (code.serialize(), L, design, mode, cfg.master_seed,
                                                                chunk),
                                    f"quantize L={list_size}")
            distortion = np.array([record.distortion for record in records])
            if np.any(distortion < bound - 0.05):
                self.logger.warning(f"distortion {distortion.min():.4f} far below the bound {bound:.4f}")
            yield {"N": N, "rate": code.rate, "list_size": list_size, "trials": len(records),
                   "mean_distortion": float(distortion.mean()), "std_distortion": float(distortion.std()),
                   "min_distortion": float(distortion.min()), "max_distortion": float(distortion.max()),
                   "rd_bound": bound}

    def build_dp_system(self) -> DirtyPaperSystem:
        cfg = self.config
        crc = CrcConfig(cfg["r"], cfg["crc_poly"]) if cfg["r"] else None
        channel_spec = FrozenSetSpec(FrozenSetMode.TARGET_PERFORMANCE, target=cfg["bler_target"],
                                     role=CodeRole.CHANNEL, list_size=cfg["L_c"], trials=cfg["calibration_trials"],
                                     seed=cfg.master_seed)
        source_spec = FrozenSetSpec(FrozenSetMode.TARGET_PERFORMANCE, target=cfg["distortion_target"],
                                    role=CodeRole.SOURCE, list_size=cfg["L_s"], trials=cfg["calibration_trials"],
                                    seed=cfg.master_seed)
        return build_system(cfg["p"], cfg["D"], cfg["N"], cfg["L_c"], cfg["L_s"], crc, channel_spec, source_spec,
                            cfg["delta"], cfg["construction_trials"], cfg.master_seed, PowerMode(cfg["power_mode"]),
                            cfg["retry_limit"], cfg["channel_calibration"] == "simulate")

    def _run_dp(self) -> Iterable[dict]:
        cfg = self.config
        system = self.build_dp_system()
        p_sim = cfg["p_sim"] if cfg["p_sim"] is not None else cfg["p"]
        mode = EncoderMode(cfg["encoder_mode"])
        records = self._fan_out(_dp_trials, lambda chunk: (system.serialize(), p_sim, mode, cfg.master_seed, chunk),
                                "dirty paper")
        errors = sum(not record.decode_success for record in records)
        low, high = wilson_interval(errors, len(records))
        power = np.array([record.power_used for record in records])
        bit_errors = sum(record.bit_errors for record in records)
        message_bits = len(records) * system.message_capacity
        retransmitted = np.array([record.retransmit_bits for record in records])
        if retransmitted.any():
            self.logger.warning(f"phase two needed: {system.retransmit_set.size} bits per frame")
        if errors:
            self.logger.warning(f"{errors} of {len(records)} frames failed to decode")
        yield {"N": system.N, "p": system.p, "D": system.D, "L_c": system.list_size_c, "L_s": system.list_size_s,
               "r": system.crc_bits, "rate": system.rate, "amortized_rate": amortized_rate(system),
               "capacity": dp_capacity(system.p, system.D),
               "gp_rate": gp_rate(FbParams(system.N, system.p, system.D)), "trials": len(records),
               "block_errors": errors, "bler": errors / len(records), "bler_ci_low": low, "bler_ci_high": high,
               "ber": bit_errors / message_bits if message_bits else 0.0, "mean_power": float(power.mean()),
               "max_power": float(power.max()),
               "power_failures": sum(not record.power_ok for record in records),
               "retransmit_bits": int(system.retransmit_set.size), "mean_retransmit_bits": float(retransmitted.mean())}

    def _run_nestedness(self) -> Iterable[dict]:
        cfg = self.config
        calibrated = cfg["thresholds"] == "calibrated"
        for N in cfg["N_values"]:
            for p in cfg["p_values"]:
                code_c, profile_c = None, None
                if calibrated:
                    profile_c = construct_profile(p, N, True, cfg["construction_trials"], cfg.master_seed)
                    code_c = build_frozen_set(profile_c, FrozenSetSpec(FrozenSetMode.TARGET_PERFORMANCE,
                                                                       target=cfg["bler_target"]))
                for D in cfg["D_values"]:
                    if not p < D < 0.5:
                        self.logger.warning(f"skipping D={D}: need p={p} < D < 1/2")
                        continue
                    code_s, profile_s = None, None
                    if calibrated:
                        profile_s = construct_profile(D, N, True, cfg["construction_trials"], cfg.master_seed)
                        code_s = calibrate_source_code(profile_s, D, D, cfg["list_size"], cfg["calibration_trials"],
                                                       cfg.master_seed)
                    yield scan_point(N, p, D, code_c=code_c, code_s=code_s, delta=cfg["delta"], profile_c=profile_c,
                                     profile_s=profile_s)._asdict()

    def _run_fb(self) -> Iterable[dict]:
        cfg = self.config
        p, eps_p = cfg["p"], cfg["eps_p"]
        for N in cfg["N_values"]:
            for D in cfg["D_values"]:
                for eps_D in cfg["eps_D_values"]:
                    params = FbParams(N, p, D, eps_p, eps_D)
                    yield {"N": N, "p": p, "D": D, "eps_p": eps_p, "eps_D": eps_D, "rd_rate": rd_rate(N, D, eps_D),
                           "channel_rate": channel_rate(N, p, eps_p), "gp_rate": gp_rate(params),
                           "capacity": dp_capacity(p, D)}

    def _run_construct(self) -> Iterable[dict]:
        cfg = self.config
        N, p = cfg["N"], cfg["p"]
        spec = FrozenSetSpec.parse_from_json(cfg["frozen_set"])
        profile = construct_profile(p, N, cfg["method"] == "monte_carlo", cfg["construction_trials"], cfg.master_seed)
        code = build_frozen_set(profile, spec)
        # the construction document replaces the summary table for this kind
        if cfg.out:
            write_construction(cfg.out, profile, code)
        yield {"N": N, "p": p, "method": cfg["method"], "mode": spec.mode.value,
               "frozen_size": int(code.frozen_set.size), "rate": code.rate}


def check_acceptance(rows: list[dict], acceptance: dict):
    """Compare summary rows with `{"column": [low, high]}` windows; a None bound is open."""
    misses = []
    for row in rows:
        for column, window in acceptance.items():
            if column not in row:
                continue
            low, high = window
            value = row[column]
            if (low is not None and value < low) or (high is not None and value > high):
                misses.append(f"{column}={value} outside [{low}, {high}]")
    if misses:
        raise AcceptanceCheckFailed(msg="; ".join(misses))


def write_summary(target: Union[str, TextIO], rows: list[dict]):
    """CSV summary, one row per configuration point; `target` is a path or an open text stream."""
    columns = []
    for row in rows:
        columns.extend(column for column in row if column not in columns)
    if isinstance(target, str):
        with open(target, "w", encoding="utf-8", newline="") as handle:
            write_summary(handle, rows)
        return
    writer = csv.DictWriter(target, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def write_records(path: str, records: list[ExperimentRecord], config_hash: Optional[str] = None):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for record in sorted(records, key=lambda item: item.trial_index):
            body = record.serialize()
            if config_hash is not None:
                body["config_hash"] = config_hash
            handle.write(json.dumps(body, sort_keys=True) + "\n")


def run_experiment(config: ExperimentConfig, progress: bool = False) -> tuple[list[dict], list[ExperimentRecord]]:
    runner = ExperimentRunner(config, progress)
    rows = runner.run()
    return rows, sorted(runner.records, key=lambda record: record.trial_index)
