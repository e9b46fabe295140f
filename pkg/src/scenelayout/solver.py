"""Depth-first layout search.

Objects are visited in dependency order (every constraint's target before its
source).  Per object, candidate poses come from the relation-specific
generator of its highest-priority constraint (vertical > relative > rotation
> distance), from a grid around the initial position when unconstrained, and
are filtered against collisions and all remaining constraints before
recursion.  A global node counter and wall-clock budget bound the search; the
best-scoring layout seen (score = number of placed objects) is returned along
with per-object failure diagnostics for the refinement loop.

Determinism: all sampling uses RNG streams derived from the configured seed
and the (object, relation, target pose) tuple, so identical inputs produce
identical reports.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, replace
from typing import Callable, Mapping

from .constraints import (
    RELATION_KIND,
    Constraint,
    ConstraintKind,
    Relation,
    Thresholds,
    check_acyclic,
    eval_relation,
)
from .geometry import (
    Aabb,
    UndefinedDirectionError,
    Vec3,
    aabb_from_pose,
    boxes_collide,
    yaw_facing,
)
from .scene import ObjectSpec, Scene

TERMINATED_COMPLETE = "complete"
TERMINATED_TIMEOUT = "timeout"
TERMINATED_NODE_LIMIT = "node_limit"
TERMINATED_EXHAUSTED = "exhausted"

# How sharply each kind restricts the candidate space, best first.
_KIND_PRIORITY = {
    ConstraintKind.VERTICAL: 0,
    ConstraintKind.RELATIVE: 1,
    ConstraintKind.ROTATION: 2,
    ConstraintKind.DISTANCE: 3,
}


class SolverInputError(ValueError):
    pass


class ConstraintCycleError(SolverInputError):
    def __init__(self, cycle: list[str]):
        super().__init__(f"constraint dependency cycle: {' -> '.join(cycle)}")
        self.cycle = cycle


@dataclass(frozen=True)
class Placement:
    object_id: str
    position: Vec3
    yaw: float

    def to_dict(self) -> dict:
        return {"position": self.position.to_dict(), "yaw": self.yaw}

    @classmethod
    def from_dict(cls, object_id: str, d: dict) -> "Placement":
        return cls(object_id, Vec3.from_dict(d["position"]), float(d["yaw"]))


Layout = dict[str, Placement]


@dataclass(frozen=True)
class SolverConfig:
    timeout: float = 60.0
    node_limit: int = 100_000
    candidates_per_constraint: int = 32
    neighborhood_radius: float = 1.0
    neighborhood_step: float = 0.25
    penetration_tol: float = 0.001
    rng_seed: int = 0


@dataclass(frozen=True)
class ObjectFailure:
    object_id: str
    violated_constraints: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "object_id": self.object_id,
            "violated_constraints": list(self.violated_constraints),
        }


@dataclass
class SolverReport:
    best_layout: Layout
    score: int
    node_count: int
    elapsed: float
    failures: list[ObjectFailure]
    terminated_by: str

    def to_json_dict(self) -> dict:
        """Wire form: layout map, score, failures, terminated_by.  Node count
        and elapsed time stay off the wire so serialized reports are
        reproducible byte for byte."""
        return {
            "layout": {oid: pl.to_dict() for oid, pl in self.best_layout.items()},
            "score": self.score,
            "failures": [f.to_dict() for f in self.failures],
            "terminated_by": self.terminated_by,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json_dict(cls, data: dict) -> "SolverReport":
        layout = {
            oid: Placement.from_dict(oid, raw) for oid, raw in data.get("layout", {}).items()
        }
        failures = [
            ObjectFailure(f["object_id"], tuple(f["violated_constraints"]))
            for f in data.get("failures", [])
        ]
        return cls(
            best_layout=layout,
            score=int(data.get("score", len(layout))),
            node_count=int(data.get("node_count", 0)),
            elapsed=float(data.get("elapsed", 0.0)),
            failures=failures,
            terminated_by=str(data.get("terminated_by", TERMINATED_EXHAUSTED)),
        )


def score(layout: Mapping[str, Placement]) -> int:
    return len(layout)


def topo_order(scene: Scene, constraints: list[Constraint]) -> list[str]:
    """Order ids so every constraint's target precedes its source; scene
    document order breaks ties (stable)."""
    cycle = check_acyclic(constraints)
    if cycle is not None:
        raise ConstraintCycleError(cycle)
    ids = scene.ids()
    known = set(ids)
    depends_on: dict[str, set[str]] = {oid: set() for oid in ids}
    for c in constraints:
        if c.source in known and c.target in known:
            depends_on[c.source].add(c.target)
    ordered: list[str] = []
    placed: set[str] = set()
    remaining = list(ids)
    while remaining:
        for oid in remaining:
            if depends_on[oid] <= placed:
                ordered.append(oid)
                placed.add(oid)
                remaining.remove(oid)
                break
        else:
            raise ConstraintCycleError(sorted(remaining))
    return ordered


def _ground_z(spec: ObjectSpec) -> float:
    return spec.size.z / 2.0


def _half_extents(spec: ObjectSpec, yaw: float) -> tuple[float, float]:
    box = aabb_from_pose(spec.size, Vec3(0.0, 0.0, spec.size.z / 2.0), yaw)
    return (box.max.x - box.min.x) / 2.0, (box.max.y - box.min.y) / 2.0


def _sorted_by_initial(spec: ObjectSpec, candidates: list[Placement]) -> list[Placement]:
    ix, iy = spec.position.x, spec.position.y
    ranked = sorted(
        enumerate(candidates),
        key=lambda pair: (
            math.hypot(pair[1].position.x - ix, pair[1].position.y - iy),
            pair[0],
        ),
    )
    return [pl for _, pl in ranked]


def gen_candidates_unconstrained(spec: ObjectSpec, config: SolverConfig) -> list[Placement]:
    """Grid of neighborhood_step within neighborhood_radius of the initial
    xy, ground-snapped, initial yaw, nearest-to-initial first (the exact
    initial position leads)."""
    steps = 0
    if config.neighborhood_step > 0:
        steps = int(config.neighborhood_radius / config.neighborhood_step + 1e-9)
    z = _ground_z(spec)
    yaw = spec.rotation.z
    candidates = []
    for dy_idx in range(-steps, steps + 1):
        for dx_idx in range(-steps, steps + 1):
            candidates.append(
                Placement(
                    spec.id,
                    Vec3(
                        spec.position.x + dx_idx * config.neighborhood_step,
                        spec.position.y + dy_idx * config.neighborhood_step,
                        z,
                    ),
                    yaw,
                )
            )
    return _sorted_by_initial(spec, candidates)


def _relation_rng(
    config: SolverConfig, source_id: str, relation: Relation, target_placement: Placement
) -> random.Random:
    # Keyed on the concrete target pose so each backtracking branch draws a
    # fresh (but reproducible) sample set.  String seeds hash via sha512
    # inside random.Random, stable across processes.
    tp = target_placement
    key = (
        f"{config.rng_seed}|{source_id}|{relation.value}|{tp.object_id}"
        f"|{tp.position.x!r}|{tp.position.y!r}|{tp.position.z!r}|{tp.yaw!r}"
    )
    return random.Random(key)


def _lateral_band_candidates(
    relation: Relation,
    spec: ObjectSpec,
    tbox: Aabb,
    config: SolverConfig,
    th: Thresholds,
    rng: random.Random,
    count: int,
) -> list[Placement]:
    """Band sampling beside the target.  Alternates tight placements hugging
    the target with wide ones (larger offset, free lateral coordinate) so
    joint regions shared with other constraints stay reachable."""
    hx, hy = _half_extents(spec, spec.rotation.z)
    z = _ground_z(spec)
    spread = config.neighborhood_radius
    wide = 4.0 * spread
    out: list[Placement] = []
    for i in range(count):
        # Spread class cycles every two samples so it stays independent of
        # the side alternation below (i % 2).
        loose = i % 4 >= 2
        if i == 0:
            u = 0.0
        elif loose:
            u = rng.uniform(0.0, wide)
        else:
            u = rng.uniform(0.0, spread)
        if relation in (Relation.LEFT_OF, Relation.RIGHT_OF, Relation.SIDE_OF):
            side = relation
            if relation is Relation.SIDE_OF:
                side = Relation.LEFT_OF if i % 2 == 0 else Relation.RIGHT_OF
            lo, hi = tbox.min.y - hy, tbox.max.y + hy
            cy = rng.uniform(lo - wide, hi + wide) if loose else rng.uniform(lo, hi)
            if side is Relation.LEFT_OF:
                cx = tbox.min.x - th.lateral_buffer - hx - u
            else:
                cx = tbox.max.x + th.lateral_buffer + hx + u
        else:
            lo, hi = tbox.min.x - hx, tbox.max.x + hx
            cx = rng.uniform(lo - wide, hi + wide) if loose else rng.uniform(lo, hi)
            if relation is Relation.IN_FRONT_OF:
                cy = tbox.min.y - th.lateral_buffer - hy - u
            else:  # BEHIND
                cy = tbox.max.y + th.lateral_buffer + hy + u
        out.append(Placement(spec.id, Vec3(cx, cy, z), spec.rotation.z))
    return out


def _gap_candidates(
    relation: Relation,
    spec: ObjectSpec,
    tbox: Aabb,
    config: SolverConfig,
    th: Thresholds,
    rng: random.Random,
    count: int,
) -> list[Placement]:
    hx, hy = _half_extents(spec, spec.rotation.z)
    z = _ground_z(spec)
    out: list[Placement] = []
    for i in range(count):
        if relation is Relation.NEAR:
            gap = 0.0 if i == 0 else rng.uniform(0.0, th.near_max)
        else:
            gap = th.far_min + 1e-6 + (0.0 if i == 0 else rng.uniform(0.0, 4.0))
        side = rng.randrange(4)
        if side == 0:
            cx = tbox.max.x + gap + hx
            cy = rng.uniform(tbox.min.y - hy, tbox.max.y + hy)
        elif side == 1:
            cx = tbox.min.x - gap - hx
            cy = rng.uniform(tbox.min.y - hy, tbox.max.y + hy)
        elif side == 2:
            cy = tbox.max.y + gap + hy
            cx = rng.uniform(tbox.min.x - hx, tbox.max.x + hx)
        else:
            cy = tbox.min.y - gap - hy
            cx = rng.uniform(tbox.min.x - hx, tbox.max.x + hx)
        out.append(Placement(spec.id, Vec3(cx, cy, z), spec.rotation.z))
    return out


def _on_candidates(
    spec: ObjectSpec,
    tbox: Aabb,
    rng: random.Random,
    count: int,
) -> list[Placement]:
    hx, hy = _half_extents(spec, spec.rotation.z)
    lo_x, hi_x = tbox.min.x + hx, tbox.max.x - hx
    lo_y, hi_y = tbox.min.y + hy, tbox.max.y - hy
    if lo_x > hi_x + 1e-12 or lo_y > hi_y + 1e-12:
        return []
    cz = tbox.top + spec.size.z / 2.0
    margin = 1e-6

    def sample(lo: float, hi: float) -> float:
        if hi - lo <= 2 * margin:
            return (lo + hi) / 2.0
        return rng.uniform(lo + margin, hi - margin)

    out = [Placement(spec.id, Vec3((lo_x + hi_x) / 2.0, (lo_y + hi_y) / 2.0, cz), spec.rotation.z)]
    for _ in range(count - 1):
        out.append(Placement(spec.id, Vec3(sample(lo_x, hi_x), sample(lo_y, hi_y), cz), spec.rotation.z))
    return out


def _above_candidates(
    spec: ObjectSpec,
    tbox: Aabb,
    config: SolverConfig,
    th: Thresholds,
    rng: random.Random,
    count: int,
) -> list[Placement]:
    hx, hy = _half_extents(spec, spec.rotation.z)
    lo_x, hi_x = tbox.min.x - hx, tbox.max.x + hx
    lo_y, hi_y = tbox.min.y - hy, tbox.max.y + hy
    wx, wy = hi_x - lo_x, hi_y - lo_y
    out: list[Placement] = []
    for i in range(count):
        lift = 1e-9 if i == 0 else rng.uniform(1e-9, config.neighborhood_radius)
        cz = tbox.top + th.above_min + lift + spec.size.z / 2.0
        cx = (lo_x + hi_x) / 2.0 if i == 0 else rng.uniform(lo_x + 0.01 * wx, hi_x - 0.01 * wx)
        cy = (lo_y + hi_y) / 2.0 if i == 0 else rng.uniform(lo_y + 0.01 * wy, hi_y - 0.01 * wy)
        out.append(Placement(spec.id, Vec3(cx, cy, cz), spec.rotation.z))
    return out


def _face_to_candidates(
    spec: ObjectSpec,
    target_placement: Placement,
    config: SolverConfig,
    count: int,
) -> list[Placement]:
    positions = gen_candidates_unconstrained(spec, config)[:count]
    tx, ty = target_placement.position.x, target_placement.position.y
    out = []
    for pl in positions:
        if math.hypot(tx - pl.position.x, ty - pl.position.y) <= 1e-9:
            continue
        out.append(replace(pl, yaw=yaw_facing((pl.position.x, pl.position.y), (tx, ty))))
    return out


def gen_candidates_for(
    relation: Relation,
    spec: ObjectSpec,
    target_spec: ObjectSpec,
    target_placement: Placement,
    config: SolverConfig,
    th: Thresholds = Thresholds(),
) -> list[Placement]:
    """Candidates satisfying ``relation`` against an already-placed target.

    Every returned placement passes eval_relation for this relation; an empty
    admissible region (e.g. a source footprint larger than the target for
    ``on``) yields an empty list rather than an error.  Deterministic for a
    given config.rng_seed, ordered nearest-to-initial first.
    """
    rng = _relation_rng(config, spec.id, relation, target_placement)
    tbox = aabb_from_pose(target_spec.size, target_placement.position, target_placement.yaw)
    count = config.candidates_per_constraint
    if relation in (
        Relation.LEFT_OF,
        Relation.RIGHT_OF,
        Relation.IN_FRONT_OF,
        Relation.BEHIND,
        Relation.SIDE_OF,
    ):
        candidates = _lateral_band_candidates(relation, spec, tbox, config, th, rng, count)
    elif relation in (Relation.NEAR, Relation.FAR):
        candidates = _gap_candidates(relation, spec, tbox, config, th, rng, count)
    elif relation is Relation.ON:
        candidates = _on_candidates(spec, tbox, rng, count)
    elif relation is Relation.ABOVE:
        candidates = _above_candidates(spec, tbox, config, th, rng, count)
    elif relation is Relation.FACE_TO:
        candidates = _face_to_candidates(spec, target_placement, config, count)
    else:
        raise ValueError(f"unhandled relation {relation}")

    constraint = Constraint(
        kind=RELATION_KIND[relation], relation=relation, source=spec.id, target=target_spec.id
    )
    verified = [
        pl
        for pl in candidates
        if eval_relation(constraint, (spec, pl), (target_spec, target_placement), th)
    ]
    return _sorted_by_initial(spec, verified)


class _Search:
    def __init__(
        self,
        scene: Scene,
        constraints: list[Constraint],
        config: SolverConfig,
        th: Thresholds,
        preplaced: Layout,
        on_improve: Callable[[int], None] | None,
    ):
        self.specs = {item.id: item for item in scene.items}
        self.constraints = constraints
        self.config = config
        self.th = th
        self.on_improve = on_improve
        order = topo_order(scene, constraints)
        self.order = [oid for oid in order if oid not in preplaced]
        self.placed: Layout = dict(preplaced)
        self.boxes: dict[str, Aabb] = {
            oid: aabb_from_pose(self.specs[oid].size, pl.position, pl.yaw)
            for oid, pl in preplaced.items()
        }
        self.by_source: dict[str, list[tuple[int, Constraint]]] = {}
        for idx, c in enumerate(constraints):
            self.by_source.setdefault(c.source, []).append((idx, c))
        self.start = time.monotonic()
        self.nodes = 0
        self.best_score = -1
        self.best_layout: Layout = {}
        self.best_failures: list[ObjectFailure] = []
        self.stop = False
        self.termination: str | None = None

    def elapsed(self) -> float:
        return time.monotonic() - self.start

    def _update_best(self, failures: list[ObjectFailure]) -> None:
        self.best_score = len(self.placed)
        self.best_layout = dict(self.placed)
        self.best_failures = failures
        if self.on_improve is not None:
            self.on_improve(self.best_score)

    def _candidates(self, oid: str, active: list[tuple[int, Constraint]]) -> tuple[list[Placement], int | None]:
        spec = self.specs[oid]
        if not active:
            return gen_candidates_unconstrained(spec, self.config), None
        primary_idx, primary = min(
            active, key=lambda pair: (_KIND_PRIORITY[pair[1].kind], pair[0])
        )
        candidates = gen_candidates_for(
            primary.relation,
            spec,
            self.specs[primary.target],
            self.placed[primary.target],
            self.config,
            self.th,
        )
        # A face_to constraint owns the yaw: re-aim candidates generated by a
        # different primary, then let the filter below re-check everything.
        if primary.relation is not Relation.FACE_TO:
            for _, c in active:
                if c.relation is Relation.FACE_TO and c.target in self.placed:
                    tpos = self.placed[c.target].position
                    aimed = []
                    for pl in candidates:
                        dx = tpos.x - pl.position.x
                        dy = tpos.y - pl.position.y
                        if math.hypot(dx, dy) <= 1e-9:
                            continue
                        aimed.append(
                            replace(
                                pl,
                                yaw=yaw_facing(
                                    (pl.position.x, pl.position.y), (tpos.x, tpos.y)
                                ),
                            )
                        )
                    candidates = aimed
                    break
        return candidates, primary_idx

    def run(self) -> SolverReport:
        self._dfs(0)
        if self.termination is None:
            self.termination = TERMINATED_EXHAUSTED
        return SolverReport(
            best_layout=self.best_layout,
            score=len(self.best_layout),
            node_count=self.nodes,
            elapsed=self.elapsed(),
            failures=self.best_failures,
            terminated_by=self.termination,
        )

    def _dfs(self, i: int) -> None:
        if i == len(self.order):
            self._update_best([])
            self.termination = TERMINATED_COMPLETE
            self.stop = True
            return
        if len(self.placed) > self.best_score:
            self._update_best([])
        oid = self.order[i]
        spec = self.specs[oid]
        active = [
            (idx, c) for idx, c in self.by_source.get(oid, []) if c.target in self.placed
        ]
        candidates, primary_idx = self._candidates(oid, active)
        violated: set[int] = set()
        if not candidates and primary_idx is not None:
            violated.add(primary_idx)
        for candidate in candidates:
            if self.elapsed() > self.config.timeout:
                self.termination = TERMINATED_TIMEOUT
                self.stop = True
                break
            self.nodes += 1
            if self.nodes > self.config.node_limit:
                self.termination = TERMINATED_NODE_LIMIT
                self.stop = True
                break
            box = aabb_from_pose(spec.size, candidate.position, candidate.yaw)
            ok = True
            for other in self.boxes.values():
                if boxes_collide(box, other, self.config.penetration_tol):
                    ok = False
                    break
            for idx, c in active:
                try:
                    holds = eval_relation(
                        c,
                        (spec, candidate),
                        (self.specs[c.target], self.placed[c.target]),
                        self.th,
                    )
                except UndefinedDirectionError:
                    holds = False
                if not holds:
                    violated.add(idx)
                    ok = False
            if not ok:
                continue
            self.placed[oid] = candidate
            self.boxes[oid] = box
            self._dfs(i + 1)
            del self.placed[oid]
            del self.boxes[oid]
            if self.stop:
                break
        if self.best_score == len(self.placed):
            diagnosis = set(violated)
            if diagnosis and primary_idx is not None:
                # Candidates are anchored on the primary constraint, so it
                # never shows up as violated itself; when the joint set is
                # unsatisfiable it is still part of the conflict.
                diagnosis.add(primary_idx)
            self.best_failures = [ObjectFailure(oid, tuple(sorted(diagnosis)))] + [
                ObjectFailure(later, ()) for later in self.order[i + 1 :]
            ]


def solve(
    scene: Scene,
    constraints: list[Constraint],
    config: SolverConfig = SolverConfig(),
    th: Thresholds = Thresholds(),
    preplaced: Layout | None = None,
    on_improve: Callable[[int], None] | None = None,
) -> SolverReport:
    """Run the depth-first layout search and return the best layout found.

    ``preplaced`` pins objects at fixed poses (used by scene edits); they are
    excluded from the search but participate in collision and constraint
    checks.  Unknown ids in constraints raise before any search happens.
    """
    if not scene.items:
        raise SolverInputError("scene has no items to place")
    known = set(scene.ids())
    for c in constraints:
        if c.source not in known:
            raise SolverInputError(f"constraint source '{c.source}' is not in the scene")
        if c.target not in known:
            raise SolverInputError(f"constraint target '{c.target}' is not in the scene")
    preplaced = dict(preplaced or {})
    for oid in preplaced:
        if oid not in known:
            raise SolverInputError(f"preplaced object '{oid}' is not in the scene")
    search = _Search(scene, constraints, config, th, preplaced, on_improve)
    return search.run()
