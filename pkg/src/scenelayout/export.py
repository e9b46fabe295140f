"""Scene export: layout merged into the scene document, JSON or GLB."""

from __future__ import annotations

import logging
from dataclasses import replace
from pathlib import Path
from typing import Mapping

from .geometry import Vec3
from .glb import AssemblyItem, assemble_scene_glb
from .scene import Scene, parse_scene, serialize_scene
from .solver import Placement

logger = logging.getLogger(__name__)


class ExportError(ValueError):
    pass


def merge_layout(scene: Scene, layout: Mapping[str, Placement]) -> Scene:
    """Scene with every placed item's position and yaw finalized from the
    layout; unplaced items keep their declared pose."""
    items = []
    for item in scene.items:
        placement = layout.get(item.id)
        if placement is None:
            items.append(item)
            continue
        items.append(
            replace(
                item,
                position=placement.position,
                rotation=Vec3(item.rotation.x, item.rotation.y, placement.yaw),
            )
        )
    return scene.with_items(items)


def export_scene_json(scene: Scene, layout: Mapping[str, Placement], out_path) -> Path:
    """Lossless canonical JSON export; the output re-parses to an equal
    scene."""
    merged = merge_layout(scene, layout)
    out_path = Path(out_path)
    out_path.write_text(serialize_scene(merged))
    return out_path


def import_scene_json(path) -> Scene:
    return parse_scene(Path(path).read_text())


def export_scene_glb(
    scene: Scene,
    layout: Mapping[str, Placement],
    out_path,
    base_dir=None,
) -> list[str]:
    """Assemble item meshes at their finalized poses plus a ground plane.

    Items without a usable GLB become placeholder boxes (with a warning).
    Returns the warning list.
    """
    if not layout:
        raise ExportError("cannot export an empty layout to GLB")
    base = Path(base_dir) if base_dir else Path(".")
    items = []
    for item in scene.items:
        placement = layout.get(item.id)
        if placement is None:
            logger.warning("'%s' has no placement; skipped in GLB export", item.id)
            continue
        glb_path = None
        if item.asset_ref:
            candidate = base / item.asset_ref
            glb_path = str(candidate) if candidate.exists() else None
        items.append(
            AssemblyItem(
                object_id=item.id,
                size=(item.size.x, item.size.y, item.size.z),
                position=(placement.position.x, placement.position.y, placement.position.z),
                yaw=placement.yaw,
                glb_path=glb_path,
            )
        )
    background_png = None
    if scene.background_ref:
        texture = base / scene.background_ref
        if texture.exists():
            background_png = texture.read_bytes()
    warnings = assemble_scene_glb(items, out_path, background_png=background_png)
    for warning in warnings:
        logger.warning("glb export: %s", warning)
    return warnings
