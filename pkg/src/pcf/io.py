"""CSV record contract, run manifests, and plot-data emission.

The record CSV carries the exact header
``star_level,iteration,total_time_per_meal,satisfaction_score`` (plus one
``factor_<i>`` column each when factor scores are requested), ordered by
(star_level, iteration).  Satisfaction is serialized via shortest
round-trip repr, so parsing reproduces the float bit for bit.  Manifests
record the master seed, scenario digest, record count, and output digest
(SHA-256, hex) so a run can be re-verified or replicated byte for byte.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

import numpy as np
import pandas as pd

from .errors import DigestMismatch, EmptyInput, SchemaError
from .sim import RunResult, SimRecord
from .stats import spline_fit

CSV_HEADER = ("star_level", "iteration", "total_time_per_meal", "satisfaction_score")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_records_csv(
    records: Union[RunResult, Iterable[SimRecord]],
    path,
    include_factors: bool = False,
) -> int:
    """Write records in (star_level, iteration) order; returns the row count."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if isinstance(records, RunResult) and not include_factors:
            fh.write(",".join(CSV_HEADER) + "\n")
            for star in sorted(records.tiers):
                t = records.tiers[star]
                total = t.total_time.tolist()
                sat = t.satisfaction.tolist()
                lines = [
                    f"{star},{i},{total[i]},{sat[i]!r}"
                    for i in range(len(total))
                ]
                if lines:
                    fh.write("\n".join(lines) + "\n")
                count += len(lines)
            return count

        if isinstance(records, RunResult):
            records = records.records()
        records = iter(records)
        first = next(records, None)
        header = list(CSV_HEADER)
        if first is not None and include_factors:
            header += [f"factor_{i}" for i in range(len(first.factor_scores))]
        fh.write(",".join(header) + "\n")

        def rows():
            if first is not None:
                yield first
            yield from records

        if first is None:
            return 0
        for r in rows():
            line = (
                f"{r.star_level},{r.iteration},"
                f"{r.total_time_per_meal},{float(r.satisfaction_score)!r}"
            )
            if include_factors:
                line += "," + ",".join(str(s) for s in r.factor_scores)
            fh.write(line + "\n")
            count += 1
    return count


def read_records_csv(path) -> dict[str, np.ndarray]:
    """Load a record CSV into named columns; validates the fixed header."""
    frame = pd.read_csv(path)
    cols = tuple(frame.columns[: len(CSV_HEADER)])
    if cols != CSV_HEADER:
        raise SchemaError(
            f"unexpected CSV header {list(frame.columns)}, expected {list(CSV_HEADER)} first"
        )
    out = {
        "star_level": frame["star_level"].to_numpy(dtype=np.int64),
        "iteration": frame["iteration"].to_numpy(dtype=np.int64),
        "total_time_per_meal": frame["total_time_per_meal"].to_numpy(dtype=np.int64),
        "satisfaction_score": frame["satisfaction_score"].to_numpy(dtype=np.float64),
    }
    for col in frame.columns[len(CSV_HEADER):]:
        out[col] = frame[col].to_numpy()
    return out


def read_records(path) -> list[SimRecord]:
    """Parse a record CSV back into SimRecord objects (factor columns if present)."""
    cols = read_records_csv(path)
    factor_names = sorted(
        (c for c in cols if c.startswith("factor_")), key=lambda c: int(c.split("_")[1])
    )
    n = len(cols["star_level"])
    return [
        SimRecord(
            star_level=int(cols["star_level"][i]),
            iteration=int(cols["iteration"][i]),
            total_time_per_meal=int(cols["total_time_per_meal"][i]),
            satisfaction_score=float(cols["satisfaction_score"][i]),
            factor_scores=tuple(int(cols[c][i]) for c in factor_names),
        )
        for i in range(n)
    ]


# --- manifests ----------------------------------------------------------

@dataclass(frozen=True)
class RunManifest:
    tool_version: str
    master_seed: int
    scenario_hash: str
    record_count: int
    started: str
    finished: str
    output_digest: str

    def to_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "master_seed": self.master_seed,
            "scenario_hash": self.scenario_hash,
            "record_count": self.record_count,
            "started": self.started,
            "finished": self.finished,
            "output_digest": self.output_digest,
        }


def write_manifest(manifest: RunManifest, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path) -> RunManifest:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        return RunManifest(
            tool_version=doc["tool_version"],
            master_seed=doc["master_seed"],
            scenario_hash=doc["scenario_hash"],
            record_count=doc["record_count"],
            started=doc["started"],
            finished=doc["finished"],
            output_digest=doc["output_digest"],
        )
    except KeyError as exc:
        raise SchemaError(f"manifest missing key {exc}") from None


@dataclass(frozen=True)
class ManifestCheck:
    ok: bool
    problems: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    def raise_if_failed(self) -> None:
        if not self.ok:
            raise DigestMismatch("; ".join(self.problems))


def verify_manifest(manifest_path, records_path) -> ManifestCheck:
    """Recompute the record digest and row count; true iff both match."""
    manifest = load_manifest(manifest_path)
    problems = []
    digest = sha256_file(records_path)
    if digest != manifest.output_digest:
        problems.append(
            f"output_digest mismatch: manifest {manifest.output_digest}, file {digest}"
        )
    with open(records_path, "r", encoding="utf-8") as fh:
        rows = sum(1 for _ in fh) - 1  # header
    if rows != manifest.record_count:
        problems.append(f"record_count mismatch: manifest {manifest.record_count}, file {rows}")
    return ManifestCheck(ok=not problems, problems=tuple(problems))


# --- plot data ----------------------------------------------------------

@dataclass(frozen=True)
class PlotTable:
    kind: str  # "scatter" | "distribution" | "spline_curve"
    columns: Mapping[str, np.ndarray]

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        assert len(lengths) <= 1, "plot table columns must have equal length"


QUANTILE_PROBS = (0.05, 0.25, 0.50, 0.75, 0.95)


def emit_plot_data(
    columns: Mapping[str, np.ndarray],
    kind: str,
    bins: int = 20,
    spline_df: int = 5,
) -> PlotTable:
    """Build the figure data table for one plot kind.

    scatter: pass-through (satisfaction, time, star) columns.
    distribution: per (star, satisfaction bin) time quantiles p5..p95,
      bins of fixed width over [0, 10].
    spline_curve: the fitted spline model evaluated on a 200-point time
      grid per star level.
    """
    star = np.asarray(columns["star_level"])
    time = np.asarray(columns["total_time_per_meal"])
    sat = np.asarray(columns["satisfaction_score"])

    if kind == "scatter":
        return PlotTable(
            kind=kind,
            columns={
                "satisfaction_score": sat,
                "total_time_per_meal": time,
                "star_level": star,
            },
        )

    if len(star) == 0:
        raise EmptyInput(f"plot kind {kind!r} needs at least one record")

    if kind == "distribution":
        edges = np.linspace(0.0, 10.0, bins + 1)
        out: dict[str, list] = {
            "star_level": [],
            "satisfaction_bin_left": [],
            "satisfaction_bin_right": [],
            "n": [],
        }
        for p in QUANTILE_PROBS:
            out[f"p{int(p * 100)}"] = []
        for s in sorted(set(star.tolist())):
            mask_s = star == s
            bin_idx = np.clip(np.digitize(sat[mask_s], edges) - 1, 0, bins - 1)
            for b in range(bins):
                t = time[mask_s][bin_idx == b]
                if len(t) == 0:
                    continue
                out["star_level"].append(s)
                out["satisfaction_bin_left"].append(edges[b])
                out["satisfaction_bin_right"].append(edges[b + 1])
                out["n"].append(len(t))
                for p in QUANTILE_PROBS:
                    out[f"p{int(p * 100)}"].append(float(np.quantile(t, p)))
        return PlotTable(
            kind=kind, columns={k: np.asarray(v) for k, v in out.items()}
        )

    if kind == "spline_curve":
        model = spline_fit(time, star, sat, df=spline_df)
        grid = np.linspace(float(np.min(time)), float(np.max(time)), 200)
        stars_out, times_out, preds_out = [], [], []
        for s in sorted(set(star.tolist())):
            pred = model.predict(grid, float(s))
            stars_out.append(np.full(len(grid), s))
            times_out.append(grid)
            preds_out.append(pred)
        return PlotTable(
            kind=kind,
            columns={
                "star_level": np.concatenate(stars_out),
                "total_time_per_meal": np.concatenate(times_out),
                "satisfaction_score": np.concatenate(preds_out),
            },
        )

    raise SchemaError(f"unknown plot kind {kind!r}")


def write_plot_table(table: PlotTable, path) -> None:
    names = list(table.columns)
    arrays = [np.asarray(table.columns[n]) for n in names]
    n = len(arrays[0]) if arrays else 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(n):
            fh.write(",".join(_cell(a[i]) for a in arrays) + "\n")


def _cell(v) -> str:
    if isinstance(v, (np.integer, int)):
        return str(int(v))
    if isinstance(v, (np.floating, float)):
        return repr(float(v))
    return str(v)
