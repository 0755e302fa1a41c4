"""Domain constraints over SPARK configurations.

Three constraint forms: pairwise exclusions between atoms, atom-implies-atom
requirements, and per-context allowed trait sets.  Validation reports every
violation (no short-circuit); counting uses dimension-ordered backtracking
with early pruning so it never materialises the full product.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional

from .errors import SchemaError, SelfExclusion, UnknownAtom, UnknownContext, UnknownTrait
from .space import DIMENSIONS, AgentConfig, PartialAssignment, SparkSpace, enumerate_configs

Atom = tuple[str, str]  # (dimension name, trait label)


@dataclass(frozen=True)
class Violation:
    kind: str  # "exclusion" | "requirement" | "context"
    atoms: tuple[Atom, ...]
    reason: str


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[Violation, ...]

    def __post_init__(self):
        assert self.valid == (len(self.violations) == 0)


@dataclass(frozen=True)
class ConstraintSet:
    """Constraints bound to one space.

    exclusions: unordered atom pairs that may not co-occur.
    requirements: (antecedent, consequent) pairs; material implication over
      present atoms.
    contexts: context label -> dimension -> allowed trait subset.  Dimensions
      absent from a context are unrestricted.
    """

    space: SparkSpace
    exclusions: frozenset[frozenset[Atom]] = frozenset()
    requirements: frozenset[tuple[Atom, Atom]] = frozenset()
    contexts: Mapping[str, Mapping[str, frozenset[str]]] = field(default_factory=dict)

    def __post_init__(self):
        for pair in self.exclusions:
            if len(pair) != 2:
                raise SelfExclusion(f"atom excluded with itself: {set(pair)}")
            for atom in pair:
                self._check_atom(atom)
        for ante, cons in self.requirements:
            self._check_atom(ante)
            self._check_atom(cons)
        for ctx, dims in self.contexts.items():
            for dim, allowed in dims.items():
                for trait in allowed:
                    self._check_atom((dim, trait))

    def _check_atom(self, atom: Atom) -> None:
        dim, trait = atom
        if not self.space.has_atom(dim, trait):
            raise UnknownAtom(f"atom ({dim!r}, {trait!r}) not in the bound space")

    def allowed_in_context(self, context: Optional[str], dim: str) -> Optional[frozenset[str]]:
        """Allowed trait set for dim under context, or None when unrestricted."""
        if context is None:
            return None
        if context not in self.contexts:
            raise UnknownContext(f"context {context!r} not defined")
        return self.contexts[context].get(dim)


def parse_constraints(doc, space: SparkSpace) -> ConstraintSet:
    """Parse a constraint document and bind it to ``space``.

    Schema: ``exclusions``: array of [[dim,trait],[dim,trait]] pairs;
    ``requirements``: array of {"if": [dim,trait], "then": [dim,trait]};
    ``contexts``: map context -> {dim: [allowed traits]}.  All keys optional.
    """
    if not isinstance(doc, dict):
        raise SchemaError("constraint document must be a JSON object")
    unknown = set(doc) - {"exclusions", "requirements", "contexts"}
    if unknown:
        raise SchemaError(f"unknown constraint document keys: {sorted(unknown)}")

    def parse_atom(v) -> Atom:
        if (
            not isinstance(v, (list, tuple))
            or len(v) != 2
            or not all(isinstance(x, str) for x in v)
        ):
            raise SchemaError(f"atom must be a [dimension, trait] pair, got {v!r}")
        return (v[0], v[1])

    exclusions = set()
    for pair in doc.get("exclusions", []):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise SchemaError(f"exclusion must be a pair of atoms, got {pair!r}")
        a, b = parse_atom(pair[0]), parse_atom(pair[1])
        if a == b:
            raise SelfExclusion(f"atom excluded with itself: {a}")
        exclusions.add(frozenset((a, b)))

    requirements = set()
    for rule in doc.get("requirements", []):
        if not isinstance(rule, dict) or set(rule) != {"if", "then"}:
            raise SchemaError(f"requirement must be {{'if': atom, 'then': atom}}, got {rule!r}")
        requirements.add((parse_atom(rule["if"]), parse_atom(rule["then"])))

    contexts = {}
    for ctx, dims in doc.get("contexts", {}).items():
        if not isinstance(dims, dict):
            raise SchemaError(f"context {ctx!r} must map dimensions to trait arrays")
        ctx_map = {}
        for dim, allowed in dims.items():
            if not isinstance(allowed, list) or not all(isinstance(t, str) for t in allowed):
                raise SchemaError(f"context {ctx!r} dimension {dim!r} must list traits")
            ctx_map[dim] = frozenset(allowed)
        contexts[ctx] = ctx_map

    return ConstraintSet(
        space=space,
        exclusions=frozenset(exclusions),
        requirements=frozenset(requirements),
        contexts=contexts,
    )


def parse_constraints_file(path, space: SparkSpace) -> ConstraintSet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_constraints(json.load(fh), space)


def validate_config(
    config: AgentConfig,
    constraints: ConstraintSet,
    context: Optional[str] = None,
) -> ValidationReport:
    """List every violated exclusion, unmet requirement, and context breach."""
    for dim in DIMENSIONS:
        if not constraints.space.has_atom(dim, config.assignment[dim]):
            raise UnknownTrait(
                f"config trait {config.assignment[dim]!r} not in dimension {dim!r}"
            )
    present = {config.atom(dim) for dim in DIMENSIONS}

    violations = []
    for pair in sorted(constraints.exclusions, key=sorted):
        a, b = sorted(pair)
        if a in present and b in present:
            violations.append(
                Violation(
                    kind="exclusion",
                    atoms=(a, b),
                    reason=f"{a[1]!r} ({a[0]}) excludes {b[1]!r} ({b[0]})",
                )
            )
    for ante, cons in sorted(constraints.requirements):
        if ante in present and cons not in present:
            violations.append(
                Violation(
                    kind="requirement",
                    atoms=(ante, cons),
                    reason=f"{ante[1]!r} ({ante[0]}) requires {cons[1]!r} ({cons[0]})",
                )
            )
    if context is not None:
        if context not in constraints.contexts:
            raise UnknownContext(f"context {context!r} not defined")
        for dim in DIMENSIONS:
            allowed = constraints.contexts[context].get(dim)
            trait = config.assignment[dim]
            if allowed is not None and trait not in allowed:
                violations.append(
                    Violation(
                        kind="context",
                        atoms=((dim, trait),),
                        reason=f"{trait!r} not allowed for {dim} in context {context!r}",
                    )
                )
    return ValidationReport(valid=not violations, violations=tuple(violations))


def filter_space(
    space: SparkSpace,
    constraints: ConstraintSet,
    context: Optional[str] = None,
    fixed: Optional[PartialAssignment] = None,
) -> Iterator[AgentConfig]:
    """Yield exactly the valid configs, preserving enumeration order."""
    if context is not None and context not in constraints.contexts:
        raise UnknownContext(f"context {context!r} not defined")
    for config in enumerate_configs(space, fixed):
        if validate_config(config, constraints, context).valid:
            yield config


def count_valid(
    space: SparkSpace,
    constraints: ConstraintSet,
    context: Optional[str] = None,
) -> int:
    """Size of the valid subset, via backtracking with early pruning.

    Equals ``len(list(filter_space(...)))`` but prunes whole subtrees as soon
    as a partial assignment violates an exclusion, makes a requirement
    unsatisfiable, or leaves a context's allowed set.
    """
    if context is not None and context not in constraints.contexts:
        raise UnknownContext(f"context {context!r} not defined")

    dim_index = {name: i for i, name in enumerate(DIMENSIONS)}
    # Exclusion partners per atom, requirements indexed by the dimension
    # whose assignment can decide them.
    excl_partners: dict[Atom, list[Atom]] = {}
    for pair in constraints.exclusions:
        a, b = tuple(pair)
        excl_partners.setdefault(a, []).append(b)
        excl_partners.setdefault(b, []).append(a)
    reqs_by_ante_dim: dict[str, list[tuple[Atom, Atom]]] = {}
    reqs_by_cons_dim: dict[str, list[tuple[Atom, Atom]]] = {}
    for rule in constraints.requirements:
        ante, cons = rule
        reqs_by_ante_dim.setdefault(ante[0], []).append(rule)
        reqs_by_cons_dim.setdefault(cons[0], []).append(rule)

    pools = []
    for dim in space.dimensions:
        allowed = constraints.allowed_in_context(context, dim.name)
        pools.append(
            tuple(t for t in dim.traits if allowed is None or t in allowed)
        )

    # The candidate trait is written into `assigned` before checking, so
    # rules whose antecedent and consequent share a dimension prune too.
    assigned: list[Optional[str]] = [None] * len(DIMENSIONS)

    def consistent(level: int, trait: str) -> bool:
        atom = (DIMENSIONS[level], trait)
        for other_dim, other_trait in excl_partners.get(atom, ()):
            if assigned[dim_index[other_dim]] == other_trait:
                return False
        for ante, cons in reqs_by_ante_dim.get(DIMENSIONS[level], ()):
            if ante[1] == trait:
                cons_assigned = assigned[dim_index[cons[0]]]
                if cons_assigned is not None and cons_assigned != cons[1]:
                    return False
        for ante, cons in reqs_by_cons_dim.get(DIMENSIONS[level], ()):
            if cons[1] != trait and assigned[dim_index[ante[0]]] == ante[1]:
                return False
        return True

    def count_from(level: int) -> int:
        if level == len(DIMENSIONS):
            return 1
        total = 0
        for trait in pools[level]:
            assigned[level] = trait
            if consistent(level, trait):
                total += count_from(level + 1)
        assigned[level] = None
        return total

    return count_from(0)
