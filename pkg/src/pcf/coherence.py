"""Finite coherence checks: covers, local sections, gluing, translation.

Objects are partial configurations (a context label plus traits on a subset
of the five dimensions).  A cover of a target object is a family of
sub-objects, in the same context, agreeing with the target where defined
and jointly covering every target dimension.  Local sections assign one
behavior value per covered dimension; restriction is key-subset projection,
and the overlap of two objects is the set of shared dimensions carrying
equal traits.  Gluing merges pairwise-compatible sections into the unique
section over the target; trait maps relabel one dimension and must commute
with gluing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .errors import (
    ContextMismatch,
    CoverInvalid,
    GluingConflict,
    SchemaError,
    UnknownTrait,
    UnmappedTrait,
)
from .space import DIMENSIONS, SparkSpace

Value = object  # behavior values are scalar tokens (string or number)


@dataclass(frozen=True)
class SiteObject:
    """A partial configuration anchored to one instruction context."""

    context: str
    assignment: Mapping[str, str]  # covered dimension -> trait label

    def __post_init__(self):
        if not self.context:
            raise SchemaError("context label must be non-empty")
        if not self.assignment:
            raise SchemaError("a site object must cover at least one dimension")
        for dim in self.assignment:
            if dim not in DIMENSIONS:
                raise SchemaError(f"unknown dimension name {dim!r}")

    @property
    def covered_dims(self) -> frozenset[str]:
        return frozenset(self.assignment)

    def validate_against(self, space: SparkSpace) -> None:
        for dim, trait in self.assignment.items():
            if not space.has_atom(dim, trait):
                raise UnknownTrait(f"trait {trait!r} not in dimension {dim!r}")

    def agrees_with(self, other: "SiteObject") -> bool:
        shared = self.covered_dims & other.covered_dims
        return all(self.assignment[d] == other.assignment[d] for d in shared)


@dataclass(frozen=True)
class Cover:
    target: SiteObject
    family: tuple[SiteObject, ...]


@dataclass(frozen=True)
class LocalSection:
    """Behavior values over the covered dimensions of one object."""

    over: SiteObject
    values: Mapping[str, Value]

    def __post_init__(self):
        if set(self.values) != set(self.over.covered_dims):
            raise SchemaError(
                f"section values must cover exactly {sorted(self.over.covered_dims)}, "
                f"got {sorted(self.values)}"
            )

    def restrict(self, dims: frozenset[str]) -> dict[str, Value]:
        """Key-subset projection of the values map."""
        return {d: self.values[d] for d in dims if d in self.values}


@dataclass(frozen=True)
class Conflict:
    """Two sections cover ``dim`` with equal traits but unequal values."""

    i: int
    j: int
    dim: str
    value_i: Value
    value_j: Value


@dataclass(frozen=True)
class TraitMap:
    """Injective relabeling of one dimension's traits, with a value transform."""

    dimension: str
    mapping: Mapping[str, str]
    value_transform: Callable[[Value], Value] = lambda v: v

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise SchemaError(f"unknown dimension name {self.dimension!r}")
        values = list(self.mapping.values())
        if len(set(values)) != len(values):
            raise SchemaError(f"trait map on {self.dimension!r} is not injective")


def overlap(a: SiteObject, b: SiteObject) -> frozenset[str]:
    """Shared dimensions on which both objects carry the same trait."""
    return frozenset(
        d
        for d in a.covered_dims & b.covered_dims
        if a.assignment[d] == b.assignment[d]
    )


def check_cover(cover: Cover) -> tuple[bool, list[str]]:
    """Decide whether the family covers the target; diagnostics on failure.

    Requirements: same context throughout (mismatch raises), every family
    member a sub-object of the target (dims a subset, traits agreeing), and
    every target dimension covered by at least one member.
    """
    target = cover.target
    diagnostics: list[str] = []
    for i, member in enumerate(cover.family):
        if member.context != target.context:
            raise ContextMismatch(
                f"family member {i} has context {member.context!r}, "
                f"target has {target.context!r}"
            )
    if not cover.family:
        diagnostics.append("cover family is empty")
    for i, member in enumerate(cover.family):
        extra = member.covered_dims - target.covered_dims
        if extra:
            diagnostics.append(
                f"family member {i} covers dimensions outside the target: {sorted(extra)}"
            )
        for d in member.covered_dims & target.covered_dims:
            if member.assignment[d] != target.assignment[d]:
                diagnostics.append(
                    f"family member {i} assigns {member.assignment[d]!r} to {d}, "
                    f"target assigns {target.assignment[d]!r}"
                )
    covered = frozenset().union(*(m.covered_dims for m in cover.family)) if cover.family else frozenset()
    missing = target.covered_dims - covered
    for d in sorted(missing):
        diagnostics.append(f"dimension {d} of the target is not covered by any family member")
    return (not diagnostics, diagnostics)


def check_compatibility(sections: Sequence[LocalSection]) -> list[Conflict]:
    """Every (i, j, dim) where two sections overlap but disagree in value."""
    if len({s.over.context for s in sections}) > 1:
        raise ContextMismatch("sections span more than one context")
    conflicts = []
    for i in range(len(sections)):
        for j in range(i + 1, len(sections)):
            for dim in sorted(overlap(sections[i].over, sections[j].over)):
                vi, vj = sections[i].values[dim], sections[j].values[dim]
                if vi != vj:
                    conflicts.append(Conflict(i, j, dim, vi, vj))
    return conflicts


def glue(cover: Cover, sections: Sequence[LocalSection]) -> LocalSection:
    """Merge compatible local sections into the unique section over the target.

    The output restricted to each family member reproduces the given local
    section exactly; uniqueness holds by construction because every target
    dimension receives its value from the members covering it, which the
    compatibility check forces to agree.

    Raises CoverInvalid when the family is not a cover, GluingConflict
    (carrying the conflict list) when sections disagree on an overlap.
    """
    ok, diagnostics = check_cover(cover)
    if not ok:
        raise CoverInvalid("family does not cover the target", diagnostics)
    if len(sections) != len(cover.family):
        raise SchemaError(
            f"expected one section per family member "
            f"({len(cover.family)}), got {len(sections)}"
        )
    for i, (section, member) in enumerate(zip(sections, cover.family)):
        if section.over != member:
            raise SchemaError(f"section {i} is not over family member {i}")
    conflicts = check_compatibility(sections)
    if conflicts:
        raise GluingConflict("sections disagree on overlaps", conflicts)
    merged: dict[str, Value] = {}
    for section in sections:
        merged.update(section.values)
    values = {d: merged[d] for d in sorted(cover.target.covered_dims)}
    return LocalSection(over=cover.target, values=values)


def translate_object(obj: SiteObject, tmap: TraitMap) -> SiteObject:
    """Relabel the object's trait on the map's dimension (identity elsewhere)."""
    if tmap.dimension not in obj.covered_dims:
        return obj
    trait = obj.assignment[tmap.dimension]
    if trait not in tmap.mapping:
        raise UnmappedTrait(
            f"trait {trait!r} on {tmap.dimension!r} not in the trait map domain"
        )
    assignment = dict(obj.assignment)
    assignment[tmap.dimension] = tmap.mapping[trait]
    return SiteObject(context=obj.context, assignment=assignment)


def translate(section: LocalSection, tmap: TraitMap) -> LocalSection:
    """Relabel the trait and transform the value on the map's dimension."""
    if tmap.dimension not in section.over.covered_dims:
        return section
    values = dict(section.values)
    values[tmap.dimension] = tmap.value_transform(values[tmap.dimension])
    return LocalSection(over=translate_object(section.over, tmap), values=values)


def translate_cover(cover: Cover, tmap: TraitMap) -> Cover:
    return Cover(
        target=translate_object(cover.target, tmap),
        family=tuple(translate_object(m, tmap) for m in cover.family),
    )


# --- JSON documents ----------------------------------------------------

def load_site(doc) -> Cover:
    """Parse a site document: {"context": c, "target": {dim: trait}, "family": [...]}."""
    if not isinstance(doc, dict):
        raise SchemaError("site document must be a JSON object")
    for key in ("context", "target", "family"):
        if key not in doc:
            raise SchemaError(f"site document missing key {key!r}")
    context = doc["context"]

    def parse_obj(m) -> SiteObject:
        if not isinstance(m, dict):
            raise SchemaError(f"site object must map dimensions to traits, got {m!r}")
        return SiteObject(context=context, assignment=dict(m))

    target = parse_obj(doc["target"])
    if not isinstance(doc["family"], list):
        raise SchemaError("'family' must be an array of site objects")
    family = tuple(parse_obj(m) for m in doc["family"])
    return Cover(target=target, family=family)


def load_sections(doc, cover: Cover) -> list[LocalSection]:
    """Parse a sections document, pairing entries with the cover family in order."""
    if not isinstance(doc, dict) or "sections" not in doc:
        raise SchemaError("sections document must be an object with a 'sections' key")
    entries = doc["sections"]
    if not isinstance(entries, list):
        raise SchemaError("'sections' must be an array")
    if len(entries) != len(cover.family):
        raise SchemaError(
            f"expected {len(cover.family)} sections (one per family member), "
            f"got {len(entries)}"
        )
    sections = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or "values" not in entry:
            raise SchemaError(f"section {i} must be an object with a 'values' key")
        member = cover.family[i]
        if "over" in entry and dict(entry["over"]) != dict(member.assignment):
            raise SchemaError(f"section {i} 'over' does not match family member {i}")
        sections.append(LocalSection(over=member, values=dict(entry["values"])))
    return sections


def load_site_file(path) -> Cover:
    with open(path, "r", encoding="utf-8") as fh:
        return load_site(json.load(fh))


def load_sections_file(path, cover: Cover) -> list[LocalSection]:
    with open(path, "r", encoding="utf-8") as fh:
        return load_sections(json.load(fh), cover)


def section_to_doc(section: LocalSection) -> dict:
    return {
        "context": section.over.context,
        "over": dict(sorted(section.over.assignment.items())),
        "values": {d: section.values[d] for d in sorted(section.values)},
    }
