"""SPARK dimensions: counting and lazy enumeration of the possibility space.

A space is the Cartesian product of five finite trait domains (skills,
personalities, approaches, resources, knowledge).  Configurations are
enumerated lazily in lexicographic order over the canonical dimension
order with trait-declaration index, so two enumerations of the same
space always yield identical sequences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Mapping, Optional, Sequence

from .errors import (
    DuplicateTrait,
    EmptyDimension,
    MissingDimension,
    SchemaError,
    UnknownTrait,
    ZeroAgents,
)

#: Canonical dimension names, in canonical order.  These are also the exact
#: keys of the JSON space document.
DIMENSIONS = ("skills", "personalities", "approaches", "resources", "knowledge")


@dataclass(frozen=True)
class Dimension:
    """One named trait domain.  Trait order is the declaration order."""

    name: str
    traits: tuple[str, ...]

    def __post_init__(self):
        if self.name not in DIMENSIONS:
            raise MissingDimension(f"unknown dimension name {self.name!r}")
        if not self.traits:
            raise EmptyDimension(f"dimension {self.name!r} has no traits")
        seen = set()
        for t in self.traits:
            if t in seen:
                raise DuplicateTrait(f"trait {t!r} repeated in dimension {self.name!r}")
            seen.add(t)

    def index(self, trait: str) -> int:
        try:
            return self.traits.index(trait)
        except ValueError:
            raise UnknownTrait(f"trait {trait!r} not in dimension {self.name!r}") from None


@dataclass(frozen=True)
class SparkSpace:
    """The five dimensions, one per canonical name, in canonical order."""

    dimensions: tuple[Dimension, ...]

    def __post_init__(self):
        names = tuple(d.name for d in self.dimensions)
        if names != DIMENSIONS:
            raise MissingDimension(
                f"expected dimensions {DIMENSIONS}, got {names}"
            )

    def dimension(self, name: str) -> Dimension:
        try:
            return self.dimensions[DIMENSIONS.index(name)]
        except ValueError:
            raise MissingDimension(f"unknown dimension name {name!r}") from None

    def has_atom(self, dim: str, trait: str) -> bool:
        return dim in DIMENSIONS and trait in self.dimension(dim).traits

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(d.traits) for d in self.dimensions)


@dataclass(frozen=True)
class AgentConfig:
    """One point of the space: a trait per dimension, optional 1-10 intensities."""

    assignment: Mapping[str, str]
    intensities: Optional[Mapping[str, int]] = None

    def __post_init__(self):
        missing = [d for d in DIMENSIONS if d not in self.assignment]
        if missing:
            raise MissingDimension(f"config missing dimensions {missing}")
        if self.intensities:
            for dim, v in self.intensities.items():
                if dim not in DIMENSIONS:
                    raise MissingDimension(f"intensity for unknown dimension {dim!r}")
                if not isinstance(v, int) or not 1 <= v <= 10:
                    raise SchemaError(f"intensity for {dim!r} must be an integer in [1,10], got {v!r}")

    def atom(self, dim: str) -> tuple[str, str]:
        return (dim, self.assignment[dim])

    def as_tuple(self) -> tuple[str, ...]:
        return tuple(self.assignment[d] for d in DIMENSIONS)


@dataclass(frozen=True)
class PartialAssignment:
    """Traits pinned on a subset of dimensions; defines a slice of the space."""

    assignment: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for dim in self.assignment:
            if dim not in DIMENSIONS:
                raise MissingDimension(f"unknown dimension name {dim!r}")

    def validate_against(self, space: SparkSpace) -> None:
        for dim, trait in self.assignment.items():
            if not space.has_atom(dim, trait):
                raise UnknownTrait(f"trait {trait!r} not in dimension {dim!r}")


def build_space(dims: Mapping[str, Sequence[str]]) -> SparkSpace:
    """Validate five named trait lists into a SparkSpace."""
    missing = [d for d in DIMENSIONS if d not in dims]
    if missing:
        raise MissingDimension(f"space definition missing dimensions {missing}")
    extra = [d for d in dims if d not in DIMENSIONS]
    if extra:
        raise MissingDimension(f"space definition has unknown dimensions {extra}")
    return SparkSpace(tuple(Dimension(name, tuple(dims[name])) for name in DIMENSIONS))


def load_space(doc) -> SparkSpace:
    """Build a space from a parsed JSON document ``{"dimensions": {...}}``."""
    if not isinstance(doc, dict) or "dimensions" not in doc:
        raise SchemaError("space document must be an object with a 'dimensions' key")
    dims = doc["dimensions"]
    if not isinstance(dims, dict):
        raise SchemaError("'dimensions' must map dimension names to trait arrays")
    for name, traits in dims.items():
        if not isinstance(traits, list) or not all(isinstance(t, str) for t in traits):
            raise SchemaError(f"dimension {name!r} must be an array of strings")
    return build_space(dims)


def load_space_file(path) -> SparkSpace:
    with open(path, "r", encoding="utf-8") as fh:
        return load_space(json.load(fh))


def possibility_count(space: SparkSpace) -> int:
    """Product of the five trait counts."""
    n = 1
    for size in space.sizes():
        n *= size
    return n


def multi_agent_count(space: SparkSpace, n: int) -> int:
    """Configurations of n independent agents: possibility_count ** n, exact."""
    if n == 0:
        raise ZeroAgents("agent count must be at least 1")
    if n < 0:
        raise ZeroAgents(f"agent count must be positive, got {n}")
    return possibility_count(space) ** n


def subset_count(pool_size: int) -> int:
    """Number of non-empty subsets of a flat trait pool: 2**n - 1 (0 for n=0)."""
    if pool_size < 0:
        raise SchemaError(f"pool size must be non-negative, got {pool_size}")
    if pool_size == 0:
        return 0
    return 2 ** pool_size - 1


def slice_count(space: SparkSpace, fixed: PartialAssignment) -> int:
    """Number of configs matching ``fixed``: product of the free dimension sizes."""
    fixed.validate_against(space)
    n = 1
    for dim in space.dimensions:
        if dim.name not in fixed.assignment:
            n *= len(dim.traits)
    return n


def enumerate_configs(
    space: SparkSpace, fixed: Optional[PartialAssignment] = None
) -> Iterator[AgentConfig]:
    """Yield every config matching ``fixed``, lexicographically, each once.

    Order is the canonical dimension order with the rightmost dimension
    (knowledge) varying fastest; trait order is declaration order.
    """
    fixed = fixed or PartialAssignment()
    fixed.validate_against(space)
    pools = [
        (dim.traits[dim.index(fixed.assignment[dim.name])],)
        if dim.name in fixed.assignment
        else dim.traits
        for dim in space.dimensions
    ]

    def walk(level: int, chosen: list[str]) -> Iterator[AgentConfig]:
        if level == len(DIMENSIONS):
            yield AgentConfig(dict(zip(DIMENSIONS, chosen)))
            return
        for trait in pools[level]:
            chosen.append(trait)
            yield from walk(level + 1, chosen)
            chosen.pop()

    return walk(0, [])


def enumerate_subsets(pool: Sequence[str]) -> Iterator[tuple[str, ...]]:
    """All non-empty subsets of a flat trait pool (the 2**n - 1 reading)."""
    for k in range(1, len(pool) + 1):
        yield from combinations(pool, k)
