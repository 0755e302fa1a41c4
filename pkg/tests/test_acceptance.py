"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  The full default simulation (1.25M iterations) runs once as a
module fixture and is shared by the calibration, trend, spline,
determinism, and granularity criteria.
"""

import random
import time
from itertools import product
from types import SimpleNamespace

import numpy as np
import pytest

import oracles
from pcf.coherence import Cover, GluingConflict, LocalSection, SiteObject, glue
from pcf.constraints import count_valid, filter_space, parse_constraints
from pcf.io import sha256_file, write_records_csv
from pcf.rng import subsample_indices
from pcf.sim import default_scenario, run
from pcf.space import (
    DIMENSIONS,
    build_space,
    enumerate_configs,
    multi_agent_count,
    possibility_count,
)
from pcf.stats import Z_99, bspline_basis, descriptive, ols, spline_fit

# Reference per-tier calibration targets: star -> (mean time, mean satisfaction)
MEAN_TARGETS = {
    5: (22.0249, 6.5675),
    4: (16.4997, 5.3738),
    3: (16.4948, 5.3759),
    2: (10.9785, 4.6852),
    1: (10.9938, 4.6868),
}
# star -> ((time ci99 lo, hi), (satisfaction ci99 lo, hi))
CI_TARGETS = {
    5: ((21.9953, 22.0545), (6.5639, 6.5710)),
    4: ((16.4741, 16.5253), (5.3691, 5.3786)),
    3: ((16.4691, 16.5204), (5.3702, 5.3815)),
    2: ((10.9575, 10.9995), (4.6790, 4.6913)),
    1: ((10.9729, 11.0148), (4.6802, 4.6935)),
}


@pytest.fixture(scope="module")
def full_run(tmp_path_factory):
    scenario = default_scenario()
    t0 = time.perf_counter()
    result = run(scenario, workers=1)
    elapsed = time.perf_counter() - t0
    out = tmp_path_factory.mktemp("acceptance")
    csv_w1 = out / "run_w1.csv"
    write_records_csv(result, csv_w1)
    result_w8 = run(scenario, workers=8)
    csv_w8 = out / "run_w8.csv"
    write_records_csv(result_w8, csv_w8)
    star = np.concatenate(
        [np.full(len(result.tiers[s].total_time), s) for s in sorted(result.tiers)]
    )
    time_all = np.concatenate(
        [result.tiers[s].total_time for s in sorted(result.tiers)]
    ).astype(np.float64)
    sat_all = np.concatenate([result.tiers[s].satisfaction for s in sorted(result.tiers)])
    return SimpleNamespace(
        scenario=scenario,
        result=result,
        elapsed=elapsed,
        csv_w1=csv_w1,
        csv_w8=csv_w8,
        star=star,
        time=time_all,
        sat=sat_all,
    )


def test_criterion_1_counting_exact_and_fast(cafe_space):
    assert possibility_count(cafe_space) == 216
    assert multi_agent_count(cafe_space, 2) == 46656
    possibility_count(cafe_space)  # warm path
    best = min(
        _timed(lambda: (possibility_count(cafe_space), multi_agent_count(cafe_space, 2)))
        for _ in range(100)
    )
    assert best < 1e-3, f"counting took {best * 1e3:.3f} ms"
    print(f"PASS criterion 1: counts 216 / 46656 exact, {best * 1e6:.1f} us")


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def _naive_valid(config, doc, context=None):
    atoms = {(d, config.assignment[d]) for d in DIMENSIONS}
    for pair in doc.get("exclusions", []):
        if (tuple(pair[0]) in atoms) and (tuple(pair[1]) in atoms):
            return False
    for rule in doc.get("requirements", []):
        if tuple(rule["if"]) in atoms and tuple(rule["then"]) not in atoms:
            return False
    if context is not None:
        for dim, allowed in doc.get("contexts", {}).get(context, {}).items():
            if config.assignment[dim] not in allowed:
                return False
    return True


def test_criterion_2_filter_count_oracle_equivalence():
    rng = random.Random(20_2026)
    t0 = time.perf_counter()
    checked = 0
    for trial in range(200):
        max_size = 10 if trial % 40 == 0 else 6
        while True:
            sizes = [rng.randint(1, max_size) for _ in range(5)]
            if np.prod(sizes) <= 10 ** 5:
                break
        space = build_space(
            {
                name: [f"{name[0]}{i}" for i in range(sizes[k])]
                for k, name in enumerate(DIMENSIONS)
            }
        )

        def atom():
            dim = rng.choice(DIMENSIONS)
            return [dim, rng.choice(space.dimension(dim).traits)]

        doc = {
            "exclusions": [],
            "requirements": [{"if": atom(), "then": atom()} for _ in range(rng.randint(0, 3))],
        }
        for _ in range(rng.randint(0, 3)):
            a, b = atom(), atom()
            if a != b:
                doc["exclusions"].append([a, b])
        context = None
        if trial % 4 == 0:
            dim = rng.choice(DIMENSIONS)
            traits = space.dimension(dim).traits
            doc["contexts"] = {"ctx": {dim: rng.sample(traits, rng.randint(1, len(traits)))}}
            context = "ctx"

        constraints = parse_constraints(doc, space)
        filtered = sum(1 for _ in filter_space(space, constraints, context=context))
        counted = count_valid(space, constraints, context=context)
        brute = sum(
            1 for c in enumerate_configs(space) if _naive_valid(c, doc, context)
        )
        assert filtered == counted == brute
        checked += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0, f"criterion 2 took {elapsed:.1f} s"
    print(f"PASS criterion 2: {checked} randomized spaces agree exactly, {elapsed:.1f} s")


def _random_cover_case(rng):
    full = {d: rng.choice(["t0", "t1"]) for d in DIMENSIONS}
    dims = rng.sample(DIMENSIONS, rng.randint(1, 5))
    target = SiteObject(context="ctx", assignment={d: full[d] for d in dims})
    family, sections = [], []
    remaining = set(dims)
    for _ in range(rng.randint(1, 4)):
        member_dims = set(rng.sample(dims, rng.randint(1, len(dims))))
        if remaining:
            member_dims.add(remaining.pop())
            remaining -= member_dims
        member = SiteObject(
            context="ctx", assignment={d: full[d] for d in sorted(member_dims)}
        )
        family.append(member)
        sections.append(
            LocalSection(
                over=member,
                values={d: rng.choice(["a", "b"]) for d in sorted(member_dims)},
            )
        )
    while remaining:
        d = remaining.pop()
        member = SiteObject(context="ctx", assignment={d: full[d]})
        family.append(member)
        sections.append(LocalSection(over=member, values={d: rng.choice(["a", "b"])}))
    return Cover(target=target, family=tuple(family)), sections


def _brute_conflicts(sections):
    out = set()
    for i in range(len(sections)):
        for j in range(i + 1, len(sections)):
            a, b = sections[i], sections[j]
            shared = set(a.over.assignment) & set(b.over.assignment)
            for d in shared:
                if a.over.assignment[d] == b.over.assignment[d] and a.values[d] != b.values[d]:
                    out.add((i, j, d, a.values[d], b.values[d]))
    return out


def test_criterion_3_gluing_suite():
    rng = random.Random(30_2026)
    t0 = time.perf_counter()
    n_glued = n_conflict = 0
    for _ in range(500):
        cover, sections = _random_cover_case(rng)
        expected_conflicts = _brute_conflicts(sections)
        if expected_conflicts:
            with pytest.raises(GluingConflict) as exc:
                glue(cover, sections)
            got = {
                (c.i, c.j, c.dim, c.value_i, c.value_j) for c in exc.value.conflicts
            }
            assert got == expected_conflicts
            n_conflict += 1
            continue
        out = glue(cover, sections)
        merged = {}
        for s in sections:
            merged.update(s.values)
        assert dict(out.values) == {d: merged[d] for d in out.over.assignment}
        # uniqueness, exhaustively over the observed value alphabet
        target_dims = sorted(cover.target.assignment)
        matches = 0
        for combo in product(["a", "b"], repeat=len(target_dims)):
            cand = LocalSection(
                over=cover.target, values=dict(zip(target_dims, combo))
            )
            if all(
                cand.restrict(m.covered_dims) == dict(s.values)
                for m, s in zip(cover.family, sections)
            ):
                matches += 1
                assert cand == out
        assert matches == 1
        n_glued += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"criterion 3 took {elapsed:.1f} s"
    print(
        f"PASS criterion 3: 500 covers ({n_glued} glued, {n_conflict} conflicts), {elapsed:.1f} s"
    )


def test_criterion_4_naturality():
    from pcf.coherence import TraitMap, translate, translate_cover

    rng = random.Random(40_2026)
    tmap = TraitMap(
        dimension="approaches",
        mapping={"t0": "u0", "t1": "u1"},
        value_transform=lambda v: f"T:{v}",
    )
    checked = 0
    while checked < 100:
        cover, sections = _random_cover_case(rng)
        if _brute_conflicts(sections):
            continue
        left = translate(glue(cover, sections), tmap)
        right = glue(
            translate_cover(cover, tmap), [translate(s, tmap) for s in sections]
        )
        assert left == right
        checked += 1
    print("PASS criterion 4: translate/glue naturality on 100 cases, exact")


def test_criterion_5_simulation_calibration(full_run):
    summary = full_run.result.summary()
    assert summary.record_count == 1_250_000
    details = []
    for tier in summary.tiers:
        target_time, target_sat = MEAN_TARGETS[tier.star_level]
        assert abs(tier.mean_time - target_time) <= 0.05, (
            f"star {tier.star_level} mean time {tier.mean_time:.4f} vs {target_time}"
        )
        assert abs(tier.mean_satisfaction - target_sat) <= 0.02, (
            f"star {tier.star_level} mean sat {tier.mean_satisfaction:.4f} vs {target_sat}"
        )
        (ci_t_lo, ci_t_hi), (ci_s_lo, ci_s_hi) = CI_TARGETS[tier.star_level]
        arrays = full_run.result.tiers[tier.star_level]
        for values, lo, hi in (
            (arrays.total_time, ci_t_lo, ci_t_hi),
            (arrays.satisfaction, ci_s_lo, ci_s_hi),
        ):
            d = descriptive(values)
            ours = (d.ci99[1] - d.ci99[0]) / 2
            theirs = (hi - lo) / 2
            assert abs(ours - theirs) <= 0.20 * theirs, (
                f"star {tier.star_level} ci99 half-width {ours:.5f} vs {theirs:.5f}"
            )
        details.append(
            f"star {tier.star_level}: {tier.mean_time:.4f}/{tier.mean_satisfaction:.4f}"
        )
    assert full_run.elapsed <= 60.0, f"simulation took {full_run.elapsed:.1f} s"
    print(
        f"PASS criterion 5: per-tier means on target ({'; '.join(details)}), "
        f"1.25M iterations in {full_run.elapsed:.1f} s"
    )


def test_criterion_6_ols_trend_band(full_run):
    design = np.column_stack([np.ones(len(full_run.sat)), full_run.sat])
    fit = ols(design, full_run.time, names=("intercept", "satisfaction_score"))
    slope = float(fit.coefficients[1])
    t_stat = float(fit.t_stats[1])
    p = float(fit.p_values[1])
    assert 1.8 <= slope <= 2.9, f"slope {slope:.4f}"
    assert 0.15 <= fit.r_squared <= 0.30, f"r2 {fit.r_squared:.4f}"
    assert t_stat > 100.0
    assert p < 1e-10
    print(
        f"PASS criterion 6: slope {slope:.4f} in [1.8, 2.9], "
        f"r2 {fit.r_squared:.4f} in [0.15, 0.30], t {t_stat:.0f}, p {p:.1e}"
    )


def test_criterion_7_spline_structure(full_run):
    idx = subsample_indices(len(full_run.sat), 200_000, seed=7)
    model = spline_fit(
        full_run.time[idx], full_run.star[idx].astype(np.float64), full_run.sat[idx], df=5
    )
    coef = model.fit.coefficients
    star_coef = float(coef[1])
    basis_coef = coef[2:]
    assert 0.2 <= star_coef <= 0.45, f"star coefficient {star_coef:.4f}"
    diffs = np.diff(basis_coef)
    assert np.all(diffs >= 0), f"basis coefficients not weakly increasing: {basis_coef}"
    print(
        f"PASS criterion 7: star coefficient {star_coef:.4f} in [0.2, 0.45], "
        f"basis {np.round(basis_coef, 4).tolist()} weakly increasing"
    )


def test_criterion_8_stats_oracles():
    rng = random.Random(80_2026)
    for _ in range(1000):
        n = rng.randint(4, 30)
        x = [rng.uniform(-20, 20) for _ in range(n)]
        y = [rng.uniform(-5, 5) + 0.3 * xi for xi in x]
        if max(x) == min(x) or len(set(y)) == 1:
            continue
        fit = ols(np.column_stack([np.ones(n), x]), np.array(y))
        a, b = oracles.simple_regression(x, y)
        assert fit.coefficients[0] == pytest.approx(a, rel=1e-10, abs=1e-10)
        assert fit.coefficients[1] == pytest.approx(b, rel=1e-10, abs=1e-10)

    values = [rng.uniform(0, 1000) for _ in range(10000)]
    d = descriptive(values)
    ref = oracles.fsum_descriptive(values)
    assert d.mean == pytest.approx(ref["mean"], rel=1e-12)
    assert d.sample_std == pytest.approx(ref["sample_std"], rel=1e-12)
    assert d.median == pytest.approx(ref["median"], rel=1e-12)
    half = Z_99 * ref["sample_std"] / np.sqrt(ref["n"])
    assert d.ci99[0] == pytest.approx(ref["mean"] - half, rel=1e-12)
    assert d.ci99[1] == pytest.approx(ref["mean"] + half, rel=1e-12)

    np_rng = np.random.default_rng(8)
    for df in (4, 5, 8):
        x = np_rng.uniform(0, 50, size=2000)
        basis = bspline_basis(x, degree=3, df=df)
        assert np.all(np.abs(basis.full.sum(axis=1) - 1.0) <= 1e-12)
    print(
        "PASS criterion 8: 1000 OLS datasets within 1e-10, descriptive within "
        "1e-12, partition of unity within 1e-12"
    )


def test_criterion_9_worker_determinism(full_run):
    d1 = sha256_file(full_run.csv_w1)
    d8 = sha256_file(full_run.csv_w8)
    assert d1 == d8
    print(f"PASS criterion 9: workers 1 and 8 digests equal ({d1[:16]}...)")


def test_criterion_10_satisfaction_granularity(full_run):
    for star in (1, 2, 3, 4):
        sat = full_run.result.tiers[star].satisfaction
        scaled = sat * 8.0
        assert np.array_equal(scaled, np.round(scaled)), f"star {star} not eighths"
    sat5 = full_run.result.tiers[5].satisfaction
    assert np.array_equal(sat5, np.round(sat5 * 15.0) / 15.0), "star 5 not fifteenths"
    print("PASS criterion 10: tiers 1-4 on 1/8 grid, tier 5 on 1/15 grid (all 1.25M records)")
