"""Brute-force grid oracle, independent of the production search.

Enumerates placements on a fixed 0.25 m grid with 8 yaw bins, object by
object in dependency order, backtracking until a complete layout is found.
The enumeration is exhaustive (no candidate generators, no pruning beyond
constraint/collision rejection); cells are visited nearest-to-initial first,
which changes only the visit order, not completeness.  Used to certify
instance feasibility and cross-check solver output.
"""

from __future__ import annotations

import math

from scenelayout.constraints import Relation, Thresholds, eval_relation
from scenelayout.geometry import UndefinedDirectionError, Vec3, aabb_from_pose, boxes_collide
from scenelayout.scene import Scene
from scenelayout.solver import Placement, topo_order

GRID_CELL = 0.25
YAW_BINS = tuple(45.0 * k for k in range(8))


class OracleBudgetExceeded(RuntimeError):
    pass


def grid_solve(
    scene: Scene,
    constraints,
    th: Thresholds = Thresholds(),
    bounds: tuple[float, float] = (-3.0, 3.0),
    cell: float = GRID_CELL,
    yaw_bins=YAW_BINS,
    node_cap: int = 2_000_000,
) -> dict[str, Placement] | None:
    """First complete layout found by exhaustive grid search, or None."""
    specs = {item.id: item for item in scene.items}
    order = topo_order(scene, constraints)
    by_source: dict[str, list] = {}
    for c in constraints:
        by_source.setdefault(c.source, []).append(c)

    lo, hi = bounds
    ticks = [lo + k * cell for k in range(int(round((hi - lo) / cell)) + 1)]
    cells_by_object: dict[str, list[tuple[float, float]]] = {}
    for oid in order:
        init = specs[oid].position
        cells = [(x, y) for y in ticks for x in ticks]
        cells.sort(key=lambda c: (math.hypot(c[0] - init.x, c[1] - init.y), c[1], c[0]))
        cells_by_object[oid] = cells

    nodes = 0
    placed: dict[str, Placement] = {}
    boxes: dict[str, object] = {}

    def z_for(spec, cs):
        """Ground by default; stacked when a vertical constraint applies."""
        for c in cs:
            if c.relation is Relation.ON and c.target in placed:
                tspec = specs[c.target]
                tpl = placed[c.target]
                top = aabb_from_pose(tspec.size, tpl.position, tpl.yaw).top
                return top + spec.size.z / 2.0
            if c.relation is Relation.ABOVE and c.target in placed:
                tspec = specs[c.target]
                tpl = placed[c.target]
                top = aabb_from_pose(tspec.size, tpl.position, tpl.yaw).top
                return top + th.above_min + 1e-9 + spec.size.z / 2.0
        return spec.size.z / 2.0

    def attempt(i: int) -> bool:
        nonlocal nodes
        if i == len(order):
            return True
        oid = order[i]
        spec = specs[oid]
        cs = [c for c in by_source.get(oid, []) if c.target in placed]
        for yaw in yaw_bins:
            for cx, cy in cells_by_object[oid]:
                nodes += 1
                if nodes > node_cap:
                    raise OracleBudgetExceeded(f"grid oracle exceeded {node_cap} nodes")
                z = z_for(spec, cs)
                candidate = Placement(oid, Vec3(cx, cy, z), yaw)
                ok = True
                for c in cs:
                    try:
                        holds = eval_relation(
                            c, (spec, candidate), (specs[c.target], placed[c.target]), th
                        )
                    except UndefinedDirectionError:
                        holds = False
                    if not holds:
                        ok = False
                        break
                if not ok:
                    continue
                box = aabb_from_pose(spec.size, candidate.position, yaw)
                if any(boxes_collide(box, other, 0.001) for other in boxes.values()):
                    continue
                placed[oid] = candidate
                boxes[oid] = box
                if attempt(i + 1):
                    return True
                del placed[oid]
                del boxes[oid]
        return False

    if attempt(0):
        return dict(placed)
    return None


def violation_count(scene: Scene, constraints, layout, th: Thresholds = Thresholds()) -> int:
    """Constraints not positively satisfied by the layout (violated or
    touching an unplaced object)."""
    from scenelayout.constraints import count_unsatisfied, eval_all

    return count_unsatisfied(eval_all(constraints, layout, scene, th))
