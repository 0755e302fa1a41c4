"""Seeded Monte Carlo cafe simulation across five complexity tiers.

Each iteration is a pure function of (master_seed, star_level, index):

  1. seed   = iteration_seed(master_seed, star_level, index)   (see rng)
  2. stage k duration = max(floor_k, round(mean_k + std_k * z_k)), integer
     minutes, z_k the k-th Box-Muller normal of the stream;
     total = clamp(sum of stages, time_clamp)
  3. factor f score = clamp(round(mean_f + kappa_f * zt + std_f * z_{S+f}), 0, 10)
     with S the stage count and zt = (total - t_bar) / sigma_t, where t_bar
     and sigma_t are the analytic mean and std of the raw (unrounded,
     unfloored, unclamped) stage sum; zt = 0 when sigma_t = 0
  4. satisfaction = sum(w_f * score_f) / sum(w_f), accumulated left to right

Rounding is IEEE round-half-to-even throughout.  Because records depend
only on their index, any chunking or worker count reproduces the same
output stream bit for bit.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Iterator, Optional

import numpy as np

from .errors import InvariantViolation, SchemaError, UnknownTier
from .rng import MASK64, iteration_seeds, normals

_CHUNK = 65536


@dataclass(frozen=True)
class StageTime:
    name: str
    mean: float
    std: float
    floor: int = 0


@dataclass(frozen=True)
class FactorSpec:
    name: str
    mean: float
    std: float
    kappa: float = 0.0


@dataclass(frozen=True)
class Role:
    name: str
    params: dict[str, int]  # trait -> intensity on the 1..10 scale


@dataclass(frozen=True)
class TierSpec:
    star_level: int
    stages: tuple[StageTime, ...]
    time_clamp: tuple[int, int]
    factors: tuple[FactorSpec, ...]
    weights: tuple[float, ...]
    roles: tuple[Role, ...] = ()

    @property
    def t_bar(self) -> float:
        """Analytic mean of the raw stage sum."""
        t = 0.0
        for st in self.stages:
            t += st.mean
        return t

    @property
    def sigma_t(self) -> float:
        """Analytic std of the raw stage sum."""
        v = 0.0
        for st in self.stages:
            v += st.std * st.std
        return v ** 0.5


@dataclass(frozen=True)
class Scenario:
    master_seed: int
    iterations_per_tier: int
    tiers: tuple[TierSpec, ...]
    notes: str = ""

    def __post_init__(self):
        levels = sorted(t.star_level for t in self.tiers)
        if levels != [1, 2, 3, 4, 5]:
            raise InvariantViolation(
                f"scenario must define star levels 1..5 exactly once, got {levels}",
                path="tiers",
            )

    def tier(self, star_level: int) -> TierSpec:
        for t in self.tiers:
            if t.star_level == star_level:
                return t
        raise UnknownTier(f"star level {star_level} not in scenario")

    @property
    def star_levels(self) -> tuple[int, ...]:
        return tuple(sorted(t.star_level for t in self.tiers))


@dataclass(frozen=True)
class SimRecord:
    star_level: int
    iteration: int
    total_time_per_meal: int
    satisfaction_score: float
    factor_scores: tuple[int, ...]


@dataclass(frozen=True)
class TierSummary:
    star_level: int
    count: int
    mean_time: float
    mean_satisfaction: float
    std_time: float
    std_satisfaction: float


@dataclass(frozen=True)
class RunSummary:
    record_count: int
    tiers: tuple[TierSummary, ...]


@dataclass
class TierArrays:
    """Columnar results for one tier, ordered by iteration index."""

    star_level: int
    total_time: np.ndarray  # int64
    satisfaction: np.ndarray  # float64
    factor_scores: np.ndarray  # int16, shape (n, n_factors)


# --- scenario loading ---------------------------------------------------

def _need(doc: dict, key: str, path: str):
    if key not in doc:
        raise SchemaError(f"{path}: missing key {key!r}")
    return doc[key]


def _check_number(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{path}: expected a number, got {v!r}")
    return float(v)


def _check_int(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"{path}: expected an integer, got {v!r}")
    return v


def load_scenario(doc) -> Scenario:
    """Validate a parsed scenario document into a Scenario."""
    if not isinstance(doc, dict):
        raise SchemaError("scenario document must be a JSON object")
    master_seed = _check_int(_need(doc, "master_seed", "scenario"), "master_seed")
    if not 0 <= master_seed <= MASK64:
        raise InvariantViolation("master_seed must fit in 64 bits", path="master_seed")
    iterations = _check_int(
        _need(doc, "iterations_per_tier", "scenario"), "iterations_per_tier"
    )
    if iterations < 0:
        raise InvariantViolation(
            "iterations_per_tier must be non-negative", path="iterations_per_tier"
        )
    tiers_doc = _need(doc, "tiers", "scenario")
    if not isinstance(tiers_doc, list):
        raise SchemaError("tiers: expected an array")
    if len(tiers_doc) != 5:
        raise InvariantViolation(
            f"scenario must define exactly 5 tiers, got {len(tiers_doc)}", path="tiers"
        )

    tiers = []
    for i, td in enumerate(tiers_doc):
        path = f"tiers[{i}]"
        if not isinstance(td, dict):
            raise SchemaError(f"{path}: expected an object")
        star = _check_int(_need(td, "star_level", path), f"{path}.star_level")
        if not 1 <= star <= 5:
            raise InvariantViolation("star_level must be in 1..5", path=f"{path}.star_level")

        roles = []
        for j, rd in enumerate(td.get("roles", [])):
            rpath = f"{path}.roles[{j}]"
            name = _need(rd, "name", rpath)
            params = {}
            for trait, v in _need(rd, "params", rpath).items():
                v = _check_int(v, f"{rpath}.params.{trait}")
                if not 1 <= v <= 10:
                    raise InvariantViolation(
                        f"role {name!r} trait {trait!r} must be on the 1..10 scale, got {v}",
                        path=f"{rpath}.params.{trait}",
                    )
                params[trait] = v
            roles.append(Role(name=name, params=params))

        stages = []
        for j, sd in enumerate(_need(td, "stages", path)):
            spath = f"{path}.stages[{j}]"
            std = _check_number(_need(sd, "std", spath), f"{spath}.std")
            if std < 0:
                raise InvariantViolation("stage std must be >= 0", path=f"{spath}.std")
            floor = _check_int(sd.get("floor", 0), f"{spath}.floor")
            if floor < 0:
                raise InvariantViolation("stage floor must be >= 0", path=f"{spath}.floor")
            stages.append(
                StageTime(
                    name=_need(sd, "name", spath),
                    mean=_check_number(_need(sd, "mean", spath), f"{spath}.mean"),
                    std=std,
                    floor=floor,
                )
            )
        if not stages:
            raise InvariantViolation("tier needs at least one stage", path=f"{path}.stages")

        clamp = _need(td, "time_clamp", path)
        if not isinstance(clamp, list) or len(clamp) != 2:
            raise SchemaError(f"{path}.time_clamp: expected [min, max]")
        lo = _check_int(clamp[0], f"{path}.time_clamp[0]")
        hi = _check_int(clamp[1], f"{path}.time_clamp[1]")
        if not lo < hi:
            raise InvariantViolation(
                f"time_clamp min must be < max, got [{lo}, {hi}]", path=f"{path}.time_clamp"
            )

        factors = []
        for j, fd in enumerate(_need(td, "factors", path)):
            fpath = f"{path}.factors[{j}]"
            std = _check_number(_need(fd, "std", fpath), f"{fpath}.std")
            if std < 0:
                raise InvariantViolation("factor std must be >= 0", path=f"{fpath}.std")
            factors.append(
                FactorSpec(
                    name=_need(fd, "name", fpath),
                    mean=_check_number(_need(fd, "mean", fpath), f"{fpath}.mean"),
                    std=std,
                    kappa=_check_number(fd.get("kappa", 0.0), f"{fpath}.kappa"),
                )
            )
        if not factors:
            raise InvariantViolation("tier needs at least one factor", path=f"{path}.factors")
        if "n_factors" in td and _check_int(td["n_factors"], f"{path}.n_factors") != len(factors):
            raise InvariantViolation(
                f"n_factors={td['n_factors']} but {len(factors)} factors listed",
                path=f"{path}.n_factors",
            )

        weights = [
            _check_number(w, f"{path}.weights[{j}]")
            for j, w in enumerate(_need(td, "weights", path))
        ]
        if len(weights) != len(factors):
            raise InvariantViolation(
                f"weights length {len(weights)} != factor count {len(factors)}",
                path=f"{path}.weights",
            )
        if any(w < 0 for w in weights):
            raise InvariantViolation("weights must be non-negative", path=f"{path}.weights")
        if not any(w > 0 for w in weights):
            raise InvariantViolation("weights must not all be zero", path=f"{path}.weights")

        tiers.append(
            TierSpec(
                star_level=star,
                stages=tuple(stages),
                time_clamp=(lo, hi),
                factors=tuple(factors),
                weights=tuple(weights),
                roles=tuple(roles),
            )
        )

    return Scenario(
        master_seed=master_seed,
        iterations_per_tier=iterations,
        tiers=tuple(tiers),
        notes=doc.get("notes", ""),
    )


def load_scenario_file(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(json.load(fh))


def default_scenario_path():
    return resources.files("pcf").joinpath("data/default_scenario.json")


def default_scenario(master_seed: Optional[int] = None) -> Scenario:
    """The shipped five-tier scenario (optionally reseeded)."""
    with resources.as_file(default_scenario_path()) as p:
        scenario = load_scenario_file(p)
    if master_seed is not None:
        scenario = replace_seed(scenario, master_seed)
    return scenario


def replace_seed(scenario: Scenario, master_seed: int) -> Scenario:
    return Scenario(
        master_seed=master_seed,
        iterations_per_tier=scenario.iterations_per_tier,
        tiers=scenario.tiers,
        notes=scenario.notes,
    )


# --- the engine ---------------------------------------------------------

def simulate_block(scenario: Scenario, star_level: int, start: int, stop: int) -> TierArrays:
    """Simulate iterations [start, stop) of one tier, vectorised."""
    tier = scenario.tier(star_level)
    n = stop - start
    idx = np.arange(start, stop, dtype=np.uint64)
    seeds = iteration_seeds(scenario.master_seed, star_level, idx)

    total = np.zeros(n, dtype=np.int64)
    for k, st in enumerate(tier.stages):
        z = normals(seeds, k)
        dur = np.rint(st.mean + st.std * z)
        dur = np.maximum(dur, float(st.floor))
        total += dur.astype(np.int64)
    total = np.clip(total, tier.time_clamp[0], tier.time_clamp[1])

    sigma_t = tier.sigma_t
    if sigma_t > 0.0:
        zt = (total.astype(np.float64) - tier.t_bar) / sigma_t
    else:
        zt = np.zeros(n, dtype=np.float64)

    n_stages = len(tier.stages)
    n_factors = len(tier.factors)
    scores = np.empty((n, n_factors), dtype=np.int64)
    for f, fs in enumerate(tier.factors):
        z = normals(seeds, n_stages + f)
        raw = np.rint(fs.mean + fs.kappa * zt + fs.std * z)
        scores[:, f] = np.clip(raw, 0.0, 10.0).astype(np.int64)

    acc = np.zeros(n, dtype=np.float64)
    wsum = 0.0
    for f, w in enumerate(tier.weights):
        acc = acc + w * scores[:, f].astype(np.float64)
        wsum = wsum + w
    satisfaction = acc / wsum

    return TierArrays(
        star_level=star_level,
        total_time=total,
        satisfaction=satisfaction,
        factor_scores=scores.astype(np.int16),
    )


def simulate_tier(
    scenario: Scenario,
    star_level: int,
    workers: int = 1,
    chunk: int = _CHUNK,
) -> TierArrays:
    """All iterations of one tier; output independent of workers and chunking."""
    n = scenario.iterations_per_tier
    spans = [(s, min(s + chunk, n)) for s in range(0, n, chunk)]
    if not spans:
        tier = scenario.tier(star_level)
        return TierArrays(
            star_level=star_level,
            total_time=np.empty(0, dtype=np.int64),
            satisfaction=np.empty(0, dtype=np.float64),
            factor_scores=np.empty((0, len(tier.factors)), dtype=np.int16),
        )
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(
                pool.map(lambda sp: simulate_block(scenario, star_level, *sp), spans)
            )
    else:
        blocks = [simulate_block(scenario, star_level, *sp) for sp in spans]
    return TierArrays(
        star_level=star_level,
        total_time=np.concatenate([b.total_time for b in blocks]),
        satisfaction=np.concatenate([b.satisfaction for b in blocks]),
        factor_scores=np.concatenate([b.factor_scores for b in blocks]),
    )


def simulate_iteration(scenario: Scenario, star_level: int, index: int) -> SimRecord:
    """One record, bit-identical to the same index inside a full run."""
    block = simulate_block(scenario, star_level, index, index + 1)
    return SimRecord(
        star_level=star_level,
        iteration=index,
        total_time_per_meal=int(block.total_time[0]),
        satisfaction_score=float(block.satisfaction[0]),
        factor_scores=tuple(int(s) for s in block.factor_scores[0]),
    )


@dataclass
class RunResult:
    scenario: Scenario
    tiers: dict[int, TierArrays]

    @property
    def record_count(self) -> int:
        return sum(len(t.total_time) for t in self.tiers.values())

    def records(self) -> Iterator[SimRecord]:
        """All records ordered by (star_level, iteration)."""
        for star in sorted(self.tiers):
            t = self.tiers[star]
            for i in range(len(t.total_time)):
                yield SimRecord(
                    star_level=star,
                    iteration=i,
                    total_time_per_meal=int(t.total_time[i]),
                    satisfaction_score=float(t.satisfaction[i]),
                    factor_scores=tuple(int(s) for s in t.factor_scores[i]),
                )

    def summary(self) -> RunSummary:
        tiers = []
        for star in sorted(self.tiers):
            t = self.tiers[star]
            n = len(t.total_time)
            tiers.append(
                TierSummary(
                    star_level=star,
                    count=n,
                    mean_time=float(np.mean(t.total_time)) if n else 0.0,
                    mean_satisfaction=float(np.mean(t.satisfaction)) if n else 0.0,
                    std_time=float(np.std(t.total_time, ddof=1)) if n > 1 else 0.0,
                    std_satisfaction=float(np.std(t.satisfaction, ddof=1)) if n > 1 else 0.0,
                )
            )
        return RunSummary(record_count=self.record_count, tiers=tuple(tiers))


def run(scenario: Scenario, workers: int = 1) -> RunResult:
    """Simulate every tier; ordered, deterministic output."""
    tiers = {
        star: simulate_tier(scenario, star, workers=workers)
        for star in scenario.star_levels
    }
    return RunResult(scenario=scenario, tiers=tiers)
