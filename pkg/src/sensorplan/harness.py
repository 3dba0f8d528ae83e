"""Random instance generation and seeded scenario sweeps."""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .io import save_instance, save_plan
from .model import Instance, Target, ValidationError
from .planners import PLANNERS, evaluate_plan

SCENARIOS = ("dense", "rmwt", "mwt")
PARAMS = ("targets", "sensors", "field", "rt")
DEFAULT_SENSORS = {"dense": 300, "rmwt": 20, "mwt": 100}
ALGORITHMS = {"dense": ("gba", "stba"), "rmwt": ("gba", "stba", "wmcba"), "mwt": ("gba", "stba")}
CSV_HEADER = (
    "scenario", "param", "value", "algo", "trial", "seed",
    "covered_weight", "total_movement", "sensors_used", "connected", "ms",
)
MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class InstanceParams:
    sensors: int
    targets: int
    width: float = 600.0
    height: float = 600.0
    rs: float = 20.0
    rt: float = 20.0
    unit_weights: bool = False

    def __post_init__(self):
        for name in ("sensors", "targets"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ValidationError(name, f"must be a positive integer, got {v!r}")
        for name in ("width", "height"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(name, f"must be finite and > 0, got {v!r}")


def gen_instance(params: InstanceParams, seed: int) -> Instance:
    """Sensors and targets uniform over the field, sink at its center,
    weights uniform on [1, 10] unless ``unit_weights``."""
    rng = np.random.default_rng(seed)
    size = np.array([params.width, params.height])
    sensors = rng.uniform(0.0, 1.0, size=(params.sensors, 2)) * size
    targets = rng.uniform(0.0, 1.0, size=(params.targets, 2)) * size
    weights = rng.uniform(1.0, 10.0, size=params.targets)
    if params.unit_weights:
        weights = np.ones(params.targets)
    return Instance(
        rs=params.rs,
        rt=params.rt,
        sink=(params.width / 2, params.height / 2),
        sensors=tuple(map(tuple, sensors.tolist())),
        targets=tuple(Target(tuple(p), float(w)) for p, w in zip(targets.tolist(), weights)),
    )


def mix_seed(master: int, value_index: int, trial: int) -> int:
    """64-bit trial seed; SeedSequence hashing keeps the streams independent."""
    ss = np.random.SeedSequence([master, value_index, trial])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: str
    param: str
    lo: float
    hi: float
    step: float
    trials: int = 50
    seed: int = 0
    sensors: Optional[int] = None
    targets: int = 30
    field: float = 600.0
    rs: float = 20.0
    rt: float = 20.0

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValidationError("scenario", f"expected one of {SCENARIOS}, got {self.scenario!r}")
        if self.param not in PARAMS:
            raise ValidationError("param", f"expected one of {PARAMS}, got {self.param!r}")
        if self.scenario == "rmwt" and self.param == "rt":
            raise ValidationError("param", "rmwt fixes an unbounded transmission range")
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise ValidationError("trials", f"must be >= 1, got {self.trials!r}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo <= self.hi):
            raise ValidationError("range", f"need finite lo <= hi, got {self.lo}:{self.hi}")
        if not (math.isfinite(self.step) and self.step > 0):
            raise ValidationError("range", f"step must be > 0, got {self.step}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise ValidationError("seed", f"must be an integer in [0, 2^64), got {self.seed!r}")
        if self.param in ("targets", "sensors"):
            for v in self.values():
                if v != int(v) or v < 1:
                    raise ValidationError("range", f"{self.param} must be positive integers, got {v}")

    def values(self) -> list[float]:
        count = int(math.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        return [self.lo + i * self.step for i in range(count)]

    @property
    def algorithms(self) -> tuple[str, ...]:
        return ALGORITHMS[self.scenario]

    def instance_params(self, value: float) -> InstanceParams:
        base = InstanceParams(
            sensors=self.sensors if self.sensors is not None else DEFAULT_SENSORS[self.scenario],
            targets=self.targets,
            width=self.field,
            height=self.field,
            rs=self.rs,
            rt=math.inf if self.scenario == "rmwt" else self.rt,
            unit_weights=self.scenario == "dense",
        )
        if self.param == "targets":
            return replace(base, targets=int(value))
        if self.param == "sensors":
            return replace(base, sensors=int(value))
        if self.param == "field":
            return replace(base, width=float(value), height=float(value))
        return replace(base, rt=float(value))


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    param: str
    value: float
    algo: str
    trial: int
    seed: int
    covered_weight: float
    total_movement: float
    sensors_used: int
    connected: bool
    ms: Optional[float] = None


class SweepError(RuntimeError):
    def __init__(self, seed: int, algo: str, cause: Exception):
        super().__init__(f"{algo} failed on seed {seed}: {cause!r}")
        self.seed = seed
        self.algo = algo


def _run_trial(spec: ScenarioSpec, value_index: int, trial: int, plan_dir: Optional[str]) -> list[SweepRow]:
    value = spec.values()[value_index]
    seed = mix_seed(spec.seed, value_index, trial)
    inst = gen_instance(spec.instance_params(value), seed)
    stem = f"{spec.scenario}_{spec.param}_v{value_index}_t{trial}"
    if plan_dir is not None:
        save_instance(Path(plan_dir) / f"{stem}_instance.json", inst)
    rows = []
    for algo in spec.algorithms:
        t0 = time.perf_counter()
        try:
            plan = PLANNERS[algo](inst)
        except Exception as exc:
            raise SweepError(seed, algo, exc) from exc
        ms = (time.perf_counter() - t0) * 1000.0
        metrics = evaluate_plan(inst, plan)
        if plan_dir is not None:
            save_plan(Path(plan_dir) / f"{stem}_{algo}.json", plan)
        rows.append(
            SweepRow(
                spec.scenario, spec.param, value, algo, trial, seed,
                metrics.covered_weight, metrics.total_movement, metrics.sensors_used, metrics.connected, ms,
            )
        )
    return rows


def run_sweep(spec: ScenarioSpec, workers: int = 1, plan_dir=None) -> list[SweepRow]:
    """One row per (value, trial, algorithm), sorted in that order.

    With ``plan_dir`` every instance and plan is written there as JSON.
    ``workers`` > 1 fans trials out to processes; the result is identical.
    """
    if plan_dir is not None:
        Path(plan_dir).mkdir(parents=True, exist_ok=True)
        plan_dir = str(plan_dir)
    jobs = [(vi, t) for vi in range(len(spec.values())) for t in range(spec.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_trial, spec, vi, t, plan_dir) for vi, t in jobs]
            batches = [f.result() for f in futures]
    else:
        batches = [_run_trial(spec, vi, t, plan_dir) for vi, t in jobs]
    rows = [r for batch in batches for r in batch]
    rows.sort(key=lambda r: (r.value, r.trial, r.algo))
    return rows


def _fmt_value(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def rows_to_csv(rows: list[SweepRow], timing: bool = False) -> str:
    """CSV text. Wall time is left blank unless ``timing`` so that output
    is reproducible byte for byte."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([
            r.scenario, r.param, _fmt_value(r.value), r.algo, r.trial, r.seed,
            repr(r.covered_weight), repr(r.total_movement), r.sensors_used,
            "true" if r.connected else "false",
            f"{r.ms:.3f}" if timing and r.ms is not None else "",
        ])
    return buf.getvalue()
