"""Typed spatial constraints: parsing, normalization, and exact predicates.

Ten relations in four kinds:

    relative:  left_of, right_of, in_front_of, behind, side_of
               (planar ordering against the target's box, 0.1 m buffer)
    distance:  near (horizontal gap <= 2 m), far (horizontal gap > 8 m)
    vertical:  on (resting on the target top, clearance under 2 mm, footprint
               contained), above (bottom at least 2 m over the target top,
               footprints overlapping)
    rotation:  face_to (forward direction within 10 degrees of the target
               center)

The declared ``type`` field of a constraint entry is advisory; the relation
alone determines the canonical kind.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Mapping

from .geometry import (
    UndefinedDirectionError,
    aabb_from_pose,
    boxes_collide,
    facing_angle,
    horizontal_gap,
)
from .scene import ObjectSpec, Scene

if TYPE_CHECKING:  # placements come from the solver; import only for typing
    from .solver import Placement


class ConstraintParseError(ValueError):
    pass


class MissingObjectError(KeyError):
    pass


class Relation(str, Enum):
    LEFT_OF = "left of"
    RIGHT_OF = "right of"
    IN_FRONT_OF = "in front of"
    BEHIND = "behind"
    SIDE_OF = "side of"
    NEAR = "near"
    FAR = "far"
    ON = "on"
    ABOVE = "above"
    FACE_TO = "face to"


class ConstraintKind(str, Enum):
    RELATIVE = "relative"
    DISTANCE = "distance"
    VERTICAL = "vertical"
    ROTATION = "rotation"


RELATION_KIND: Mapping[Relation, ConstraintKind] = {
    Relation.LEFT_OF: ConstraintKind.RELATIVE,
    Relation.RIGHT_OF: ConstraintKind.RELATIVE,
    Relation.IN_FRONT_OF: ConstraintKind.RELATIVE,
    Relation.BEHIND: ConstraintKind.RELATIVE,
    Relation.SIDE_OF: ConstraintKind.RELATIVE,
    Relation.NEAR: ConstraintKind.DISTANCE,
    Relation.FAR: ConstraintKind.DISTANCE,
    Relation.ON: ConstraintKind.VERTICAL,
    Relation.ABOVE: ConstraintKind.VERTICAL,
    Relation.FACE_TO: ConstraintKind.ROTATION,
}

_RELATION_BY_TEXT = {r.value: r for r in Relation}
_RELATION_BY_TEXT.update({r.value.replace(" ", "_"): r for r in Relation})


@dataclass(frozen=True)
class Constraint:
    kind: ConstraintKind
    relation: Relation
    source: str
    target: str

    def to_dict(self) -> dict:
        return {
            "type": self.kind.value,
            "relation": self.relation.value,
            "source": self.source,
            "target": self.target,
        }

    def describe(self) -> str:
        return f"{self.source} {self.relation.value} {self.target}"


@dataclass(frozen=True)
class Thresholds:
    lateral_buffer: float = 0.1
    near_max: float = 2.0
    far_min: float = 8.0
    on_clearance: float = 0.002
    above_min: float = 2.0
    face_tolerance: float = 10.0


def make_constraint(relation: Relation | str, source: str, target: str) -> Constraint:
    if isinstance(relation, str):
        try:
            relation = _RELATION_BY_TEXT[relation.strip().lower()]
        except KeyError as exc:
            raise ConstraintParseError(f"unknown relation '{relation}'") from exc
    if source == target:
        raise ConstraintParseError(f"self-referential constraint on '{source}'")
    return Constraint(RELATION_KIND[relation], relation, source, target)


def parse_constraints(document: str) -> list[Constraint]:
    """Parse a constraint JSON list.  The declared ``type`` is reconciled
    with the relation's canonical kind (the relation wins)."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ConstraintParseError(f"malformed constraint JSON: {exc}") from exc
    return constraints_from_list(data)


def constraints_from_list(data) -> list[Constraint]:
    if not isinstance(data, list):
        raise ConstraintParseError("constraint document must be a JSON list")
    out: list[Constraint] = []
    for index, raw in enumerate(data):
        if not isinstance(raw, dict):
            raise ConstraintParseError(f"entry {index}: not an object")
        try:
            relation_text = raw["relation"]
            source = raw["source"]
            target = raw["target"]
        except KeyError as exc:
            raise ConstraintParseError(f"entry {index}: missing field {exc}") from exc
        if not isinstance(source, str) or not isinstance(target, str):
            raise ConstraintParseError(f"entry {index}: source and target must be strings")
        try:
            out.append(make_constraint(relation_text, source, target))
        except ConstraintParseError as exc:
            raise ConstraintParseError(f"entry {index}: {exc}") from exc
    return out


def serialize_constraints(constraints: Iterable[Constraint]) -> str:
    return json.dumps([c.to_dict() for c in constraints], indent=2) + "\n"


def normalize(constraints: list[Constraint]) -> list[Constraint]:
    """Drop duplicates (keeping first occurrence) and self-references, then
    regroup constraints so entries sharing a source are consecutive, in
    first-appearance order of sources."""
    seen: set[tuple] = set()
    deduped: list[Constraint] = []
    for c in constraints:
        if c.source == c.target:
            continue
        key = (c.kind, c.relation, c.source, c.target)
        if key in seen:
            continue
        seen.add(key)
        deduped.append(c)
    source_order: list[str] = []
    for c in deduped:
        if c.source not in source_order:
            source_order.append(c.source)
    grouped: list[Constraint] = []
    for source in source_order:
        grouped.extend(c for c in deduped if c.source == source)
    return grouped


def check_acyclic(constraints: list[Constraint]) -> list[str] | None:
    """Verify the source->target dependency digraph is acyclic.

    Returns None when acyclic, otherwise one cycle's object ids in order.
    """
    adjacency: dict[str, list[str]] = {}
    for c in constraints:
        adjacency.setdefault(c.source, []).append(c.target)
        adjacency.setdefault(c.target, [])
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {node: WHITE for node in adjacency}
    stack: list[str] = []

    def visit(node: str) -> list[str] | None:
        color[node] = GRAY
        stack.append(node)
        for nxt in adjacency[node]:
            if color[nxt] == GRAY:
                return stack[stack.index(nxt):]
            if color[nxt] == WHITE:
                cycle = visit(nxt)
                if cycle is not None:
                    return cycle
        stack.pop()
        color[node] = BLACK
        return None

    for node in adjacency:
        if color[node] == WHITE:
            cycle = visit(node)
            if cycle is not None:
                return cycle
    return None


def eval_relation(
    constraint: Constraint,
    source: "tuple[ObjectSpec, Placement]",
    target: "tuple[ObjectSpec, Placement]",
    th: Thresholds = Thresholds(),
) -> bool:
    """Exact predicate for one placed pair.  See the module docstring for the
    geometric meaning of each relation."""
    source_spec, source_placement = source
    target_spec, target_placement = target
    sbox = aabb_from_pose(source_spec.size, source_placement.position, source_placement.yaw)
    tbox = aabb_from_pose(target_spec.size, target_placement.position, target_placement.yaw)
    relation = constraint.relation

    if relation is Relation.LEFT_OF:
        return sbox.max.x <= tbox.min.x - th.lateral_buffer
    if relation is Relation.RIGHT_OF:
        return sbox.min.x >= tbox.max.x + th.lateral_buffer
    if relation is Relation.IN_FRONT_OF:
        return sbox.max.y <= tbox.min.y - th.lateral_buffer
    if relation is Relation.BEHIND:
        return sbox.min.y >= tbox.max.y + th.lateral_buffer
    if relation is Relation.SIDE_OF:
        return (
            sbox.max.x <= tbox.min.x - th.lateral_buffer
            or sbox.min.x >= tbox.max.x + th.lateral_buffer
        )
    if relation is Relation.NEAR:
        return horizontal_gap(sbox, tbox) <= th.near_max
    if relation is Relation.FAR:
        return horizontal_gap(sbox, tbox) > th.far_min
    if relation is Relation.ON:
        return (
            abs(sbox.bottom - tbox.top) < th.on_clearance
            and tbox.footprint().contains(sbox.footprint())
        )
    if relation is Relation.ABOVE:
        return (
            sbox.bottom >= tbox.top + th.above_min
            and sbox.footprint().overlap_area(tbox.footprint()) > 0.0
        )
    if relation is Relation.FACE_TO:
        return (
            facing_angle(source_placement.position, source_placement.yaw, target_placement.position)
            <= th.face_tolerance
        )
    raise ValueError(f"unhandled relation {relation}")


VERDICT_SATISFIED = "satisfied"
VERDICT_VIOLATED = "violated"
VERDICT_UNEVALUABLE = "unevaluable"


@dataclass(frozen=True)
class Verdict:
    index: int
    status: str

    @property
    def satisfied(self) -> bool:
        return self.status == VERDICT_SATISFIED


def eval_all(
    constraints: list[Constraint],
    layout: "Mapping[str, Placement]",
    scene: Scene,
    th: Thresholds = Thresholds(),
) -> list[Verdict]:
    """Batch verdicts; constraints touching unplaced objects are reported as
    unevaluable rather than violated."""
    specs = {item.id: item for item in scene.items}
    verdicts: list[Verdict] = []
    for index, c in enumerate(constraints):
        if c.source not in specs or c.target not in specs:
            raise MissingObjectError(c.source if c.source not in specs else c.target)
        if c.source not in layout or c.target not in layout:
            verdicts.append(Verdict(index, VERDICT_UNEVALUABLE))
            continue
        try:
            ok = eval_relation(
                c, (specs[c.source], layout[c.source]), (specs[c.target], layout[c.target]), th
            )
        except UndefinedDirectionError:
            # An object stacked dead-center on its target cannot face it.
            ok = False
        verdicts.append(Verdict(index, VERDICT_SATISFIED if ok else VERDICT_VIOLATED))
    return verdicts


def all_satisfied(verdicts: Iterable[Verdict]) -> bool:
    return all(v.satisfied for v in verdicts)


def count_unsatisfied(verdicts: Iterable[Verdict]) -> int:
    """Violated plus unevaluable; the layout-quality metric."""
    return sum(1 for v in verdicts if not v.satisfied)


def collision_pairs(
    scene: Scene,
    layout: "Mapping[str, Placement]",
    penetration_tol: float = 0.001,
) -> list[tuple[str, str]]:
    """All interpenetrating placed pairs, for post-hoc checking."""
    specs = {item.id: item for item in scene.items}
    placed = [(oid, aabb_from_pose(specs[oid].size, pl.position, pl.yaw))
              for oid, pl in layout.items() if oid in specs]
    pairs = []
    for i in range(len(placed)):
        for j in range(i + 1, len(placed)):
            if boxes_collide(placed[i][1], placed[j][1], penetration_tol):
                pairs.append((placed[i][0], placed[j][0]))
    return pairs
