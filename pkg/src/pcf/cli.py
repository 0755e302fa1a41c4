"""Command-line pipeline: space counting, filtering, gluing, simulation, analysis.

Exit codes: 0 success, 1 usage error, 2 domain failure (invalid config,
gluing conflict, ...), 3 I/O error.  The PCF_SEED environment variable
overrides the scenario master seed for `simulate`.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .constraints import count_valid, parse_constraints_file, validate_config
from .coherence import (
    GluingConflict,
    glue,
    load_sections_file,
    load_site_file,
    section_to_doc,
)
from .errors import PcfError
from .io import (
    RunManifest,
    emit_plot_data,
    read_records_csv,
    sha256_file,
    verify_manifest,
    write_manifest,
    write_plot_table,
    write_records_csv,
)
from .rng import subsample_indices
from .sim import load_scenario_file, replace_seed, run
from .space import (
    AgentConfig,
    PartialAssignment,
    enumerate_configs,
    load_space_file,
    slice_count,
)
from .stats import descriptive, diagnostics, ols, spline_fit

_COLUMN_ALIASES = {
    "time": "total_time_per_meal",
    "satisfaction": "satisfaction_score",
    "star": "star_level",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_fix(pairs) -> PartialAssignment:
    assignment = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise UsageError(f"--fix expects dim=trait, got {pair!r}")
        dim, trait = pair.split("=", 1)
        assignment[dim] = trait
    return PartialAssignment(assignment)


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def build_parser() -> _Parser:
    parser = _Parser(prog="pcf", description=__doc__)
    parser.add_argument("--version", action="version", version=f"pcf {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p_space = sub.add_parser("space", help="count or enumerate a configuration space")
    space_sub = p_space.add_subparsers(dest="space_command", metavar="action")
    for action in ("count", "enumerate"):
        sp = space_sub.add_parser(action)
        sp.add_argument("--space", required=True, help="space definition JSON")
        sp.add_argument("--fix", action="append", metavar="dim=trait")
        if action == "enumerate":
            sp.add_argument("--limit", type=int, default=None)

    p_val = sub.add_parser("validate", help="validate a config or count the valid space")
    p_val.add_argument("--space", required=True)
    p_val.add_argument("--constraints", required=True)
    p_val.add_argument("--context", default=None)
    p_val.add_argument("--config", default=None, help="single config JSON to validate")

    p_glue = sub.add_parser("glue", help="glue local sections over a cover")
    p_glue.add_argument("--site", required=True)
    p_glue.add_argument("--sections", required=True)

    p_sim = sub.add_parser("simulate", help="run the Monte Carlo cafe simulation")
    p_sim.add_argument("--scenario", required=True)
    p_sim.add_argument("--out", required=True, help="records CSV path")
    p_sim.add_argument("--manifest", default=None, help="run manifest JSON path")
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.add_argument("--factors", action="store_true", help="include factor score columns")

    p_ver = sub.add_parser("verify", help="verify a records CSV against its manifest")
    p_ver.add_argument("--manifest", required=True)
    p_ver.add_argument("--records", required=True)

    p_an = sub.add_parser("analyze", help="descriptive stats, OLS, and spline fits")
    p_an.add_argument("--in", dest="in_path", required=True, help="records CSV")
    p_an.add_argument("--ols", default=None, metavar="y~x", help="e.g. time~satisfaction")
    p_an.add_argument("--spline", default=None, metavar="df=N", help="e.g. df=5")
    p_an.add_argument("--subsample", type=int, default=None)
    p_an.add_argument("--subsample-seed", type=int, default=0)
    p_an.add_argument("--out", required=True, help="report JSON path")

    p_plot = sub.add_parser("plotdata", help="emit figure data tables")
    p_plot.add_argument("--in", dest="in_path", required=True)
    p_plot.add_argument(
        "--fig", required=True, choices=("scatter", "distribution", "spline")
    )
    p_plot.add_argument("--bins", type=int, default=20)
    p_plot.add_argument("--df", type=int, default=5)
    p_plot.add_argument("--out", required=True)
    return parser


def _cmd_space(args) -> int:
    space = load_space_file(args.space)
    fixed = _parse_fix(args.fix)
    if args.space_command == "count":
        print(slice_count(space, fixed))
        return 0
    if args.space_command == "enumerate":
        limit = args.limit
        for i, config in enumerate(enumerate_configs(space, fixed)):
            if limit is not None and i >= limit:
                break
            print(json.dumps(dict(config.assignment)))
        return 0
    raise UsageError("space requires an action: count or enumerate")


def _load_config_doc(path) -> AgentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    intensities = doc.pop("intensities", None) if isinstance(doc, dict) else None
    assignment = doc.get("assignment", doc)
    return AgentConfig(assignment=assignment, intensities=intensities)


def _cmd_validate(args) -> int:
    space = load_space_file(args.space)
    constraints = parse_constraints_file(args.constraints, space)
    if args.config is None:
        print(count_valid(space, constraints, context=args.context))
        return 0
    config = _load_config_doc(args.config)
    report = validate_config(config, constraints, context=args.context)
    doc = {
        "valid": report.valid,
        "violations": [
            {"kind": v.kind, "atoms": [list(a) for a in v.atoms], "reason": v.reason}
            for v in report.violations
        ],
    }
    print(json.dumps(doc, indent=2))
    return 0 if report.valid else 2


def _cmd_glue(args) -> int:
    cover = load_site_file(args.site)
    sections = load_sections_file(args.sections, cover)
    try:
        glued = glue(cover, sections)
    except GluingConflict as exc:
        conflicts = [
            {
                "i": c.i,
                "j": c.j,
                "dim": c.dim,
                "value_i": c.value_i,
                "value_j": c.value_j,
            }
            for c in exc.conflicts
        ]
        print(json.dumps({"conflicts": conflicts}, indent=2), file=sys.stderr)
        return 2
    print(json.dumps(section_to_doc(glued), indent=2))
    return 0


def _cmd_simulate(args) -> int:
    scenario = load_scenario_file(args.scenario)
    env_seed = os.environ.get("PCF_SEED")
    if env_seed is not None:
        scenario = replace_seed(scenario, int(env_seed))
    started = _utcnow()
    result = run(scenario, workers=args.workers)
    count = write_records_csv(result, args.out, include_factors=args.factors)
    finished = _utcnow()
    summary = result.summary()
    for t in summary.tiers:
        print(
            f"star {t.star_level}: n={t.count} mean_time={t.mean_time:.4f} "
            f"mean_satisfaction={t.mean_satisfaction:.4f}"
        )
    print(f"wrote {count} records to {args.out}")
    if args.manifest:
        manifest = RunManifest(
            tool_version=__version__,
            master_seed=scenario.master_seed,
            scenario_hash=sha256_file(args.scenario),
            record_count=count,
            started=started,
            finished=finished,
            output_digest=sha256_file(args.out),
        )
        write_manifest(manifest, args.manifest)
        print(f"wrote manifest to {args.manifest}")
    return 0


def _cmd_verify(args) -> int:
    check = verify_manifest(args.manifest, args.records)
    if check.ok:
        print("manifest verified")
        return 0
    for problem in check.problems:
        print(problem, file=sys.stderr)
    return 2


def _resolve_column(name: str) -> str:
    if name in _COLUMN_ALIASES:
        return _COLUMN_ALIASES[name]
    if name in _COLUMN_ALIASES.values():
        return name
    raise UsageError(f"unknown column {name!r}")


def _cmd_analyze(args) -> int:
    cols = read_records_csv(args.in_path)
    n = len(cols["star_level"])
    report: dict = {"n_records": n}

    if args.subsample is not None:
        idx = subsample_indices(n, args.subsample, args.subsample_seed)
        cols = {k: v[idx] for k, v in cols.items()}
        report["subsample"] = {"n": int(len(idx)), "seed": args.subsample_seed}
        n = len(idx)

    stars = cols["star_level"]
    desc: dict = {}
    for column in ("total_time_per_meal", "satisfaction_score"):
        per_star = {
            str(s): descriptive(cols[column][stars == s]).to_dict()
            for s in sorted(set(stars.tolist()))
        }
        desc[column] = {
            "overall": descriptive(cols[column]).to_dict(),
            "by_star_level": per_star,
        }
    report["descriptive"] = desc

    if args.ols:
        if "~" not in args.ols:
            raise UsageError(f"--ols expects y~x, got {args.ols!r}")
        lhs, rhs = (s.strip() for s in args.ols.split("~", 1))
        y_col, x_col = _resolve_column(lhs), _resolve_column(rhs)
        y = cols[y_col].astype(np.float64)
        x = cols[x_col].astype(np.float64)
        design = np.column_stack([np.ones(len(x)), x])
        fit = ols(design, y, names=("intercept", x_col))
        doc = fit.to_dict()
        doc["dependent"] = y_col
        doc["diagnostics"] = diagnostics(fit.residuals).to_dict()
        report["ols"] = doc

    if args.spline:
        text = args.spline.strip()
        if not text.startswith("df="):
            raise UsageError(f"--spline expects df=N, got {args.spline!r}")
        df = int(text[3:])
        model = spline_fit(
            cols["total_time_per_meal"].astype(np.float64),
            cols["star_level"].astype(np.float64),
            cols["satisfaction_score"],
            df=df,
        )
        doc = model.fit.to_dict()
        doc["df"] = df
        doc["knots"] = [float(k) for k in model.basis.knots]
        doc["boundary"] = [model.basis.boundary[0], model.basis.boundary[1]]
        report["spline"] = doc

    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    print(f"wrote report to {args.out}")
    return 0


def _cmd_plotdata(args) -> int:
    cols = read_records_csv(args.in_path)
    kind = {"spline": "spline_curve"}.get(args.fig, args.fig)
    table = emit_plot_data(cols, kind, bins=args.bins, spline_df=args.df)
    write_plot_table(table, args.out)
    print(f"wrote {kind} table to {args.out}")
    return 0


_COMMANDS = {
    "space": _cmd_space,
    "validate": _cmd_validate,
    "glue": _cmd_glue,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "analyze": _cmd_analyze,
    "plotdata": _cmd_plotdata,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except PcfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
