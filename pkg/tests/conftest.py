import pytest

from pcf.sim import load_scenario
from pcf.space import build_space


@pytest.fixture
def cafe_space():
    """The [4,3,3,3,2] example space (216 configurations)."""
    return build_space(
        {
            "skills": ["cooking", "serving", "mixology", "hosting"],
            "personalities": ["helpful", "generous", "stingy"],
            "approaches": ["obstructive", "collaborative", "methodical"],
            "resources": ["full_bar", "recipe_book", "pos_system"],
            "knowledge": ["menu", "wine"],
        }
    )


def make_tier(star, stages=None, factors=None, weights=None, clamp=(2, 60), roles=None):
    return {
        "star_level": star,
        "roles": roles or [],
        "stages": stages
        or [
            {"name": "prep", "mean": 4.0 + star, "std": 1.5, "floor": 0},
            {"name": "serve", "mean": 3.0, "std": 1.0, "floor": 0},
        ],
        "time_clamp": list(clamp),
        "factors": factors
        or [
            {"name": "quality", "mean": 5.0, "std": 1.5, "kappa": 0.2},
            {"name": "comfort", "mean": 6.0, "std": 1.0, "kappa": 0.2},
        ],
        "weights": weights or [1.0, 1.0],
    }


def make_scenario_doc(iterations=200, master_seed=7, tier_kwargs=None):
    tier_kwargs = tier_kwargs or {}
    return {
        "master_seed": master_seed,
        "iterations_per_tier": iterations,
        "tiers": [make_tier(star, **tier_kwargs.get(star, {})) for star in range(1, 6)],
    }


@pytest.fixture
def small_scenario():
    return load_scenario(make_scenario_doc())
