"""Scene document model: object specs, parsing, validation, asset rescaling.

The on-disk format is a JSON object with an ``items`` list; each item carries
``id``, ``name``, ``position``, ``rotation``, ``size`` (all xyz objects, in
meters/degrees) and ``visual_description``.  Optional additive fields:
top-level ``description``, ``style``, ``background_ref``, ``reference_image``
and per-item ``asset_ref``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .geometry import Vec3

SIZE_MIN = 0.1
SIZE_MAX = 5.0


class SceneParseError(ValueError):
    pass


class InvalidAssetError(ValueError):
    pass


@dataclass(frozen=True)
class ObjectSpec:
    id: str
    name: str
    position: Vec3
    rotation: Vec3  # degrees; only rotation.z (yaw) participates in layout
    size: Vec3
    visual_description: str
    asset_ref: str | None = None

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "name": self.name,
            "position": self.position.to_dict(),
            "rotation": self.rotation.to_dict(),
            "size": self.size.to_dict(),
            "visual_description": self.visual_description,
        }
        if self.asset_ref is not None:
            d["asset_ref"] = self.asset_ref
        return d


@dataclass(frozen=True)
class Scene:
    items: tuple[ObjectSpec, ...]
    description: str = ""
    style: str = ""
    background_ref: str | None = None
    reference_image: str | None = None

    def ids(self) -> list[str]:
        return [item.id for item in self.items]

    def get(self, object_id: str) -> ObjectSpec:
        for item in self.items:
            if item.id == object_id:
                return item
        raise KeyError(object_id)

    def has(self, object_id: str) -> bool:
        return any(item.id == object_id for item in self.items)

    def with_items(self, items) -> "Scene":
        return replace(self, items=tuple(items))

    def to_dict(self) -> dict:
        d: dict = {}
        if self.description:
            d["description"] = self.description
        if self.style:
            d["style"] = self.style
        if self.background_ref is not None:
            d["background_ref"] = self.background_ref
        if self.reference_image is not None:
            d["reference_image"] = self.reference_image
        d["items"] = [item.to_dict() for item in self.items]
        return d


@dataclass(frozen=True)
class AssetDims:
    """Measured extents of a generated mesh, in meters."""

    x: float
    y: float
    z: float


def _parse_vec3(raw, item_id: str, field_name: str) -> Vec3:
    if not isinstance(raw, dict):
        raise SceneParseError(f"item '{item_id}': {field_name} must be an object with x, y, z")
    try:
        v = Vec3(float(raw["x"]), float(raw["y"]), float(raw["z"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneParseError(f"item '{item_id}': invalid {field_name}: {exc}") from exc
    return v


def _parse_item(raw: dict, index: int) -> ObjectSpec:
    item_id = raw.get("id")
    if not isinstance(item_id, str) or not item_id:
        raise SceneParseError(f"item at index {index}: missing or empty 'id'")
    for key in ("name", "position", "rotation", "size", "visual_description"):
        if key not in raw:
            raise SceneParseError(f"item '{item_id}': missing required field '{key}'")
    description = raw["visual_description"]
    if not isinstance(description, str) or not description:
        raise SceneParseError(f"item '{item_id}': 'visual_description' must be a non-empty string")
    asset_ref = raw.get("asset_ref")
    if asset_ref is not None and not isinstance(asset_ref, str):
        raise SceneParseError(f"item '{item_id}': 'asset_ref' must be a string")
    return ObjectSpec(
        id=item_id,
        name=str(raw["name"]),
        position=_parse_vec3(raw["position"], item_id, "position"),
        rotation=_parse_vec3(raw["rotation"], item_id, "rotation"),
        size=_parse_vec3(raw["size"], item_id, "size"),
        visual_description=description,
        asset_ref=asset_ref,
    )


def scene_from_dict(data: dict) -> Scene:
    if not isinstance(data, dict):
        raise SceneParseError("scene document must be a JSON object")
    raw_items = data.get("items")
    if not isinstance(raw_items, list):
        raise SceneParseError("scene document must contain an 'items' list")
    items = []
    seen: set[str] = set()
    for index, raw in enumerate(raw_items):
        if not isinstance(raw, dict):
            raise SceneParseError(f"item at index {index} is not an object")
        item = _parse_item(raw, index)
        if item.id in seen:
            raise SceneParseError(f"duplicate object id '{item.id}'")
        seen.add(item.id)
        items.append(item)
    return Scene(
        items=tuple(items),
        description=str(data.get("description", "")),
        style=str(data.get("style", "")),
        background_ref=data.get("background_ref"),
        reference_image=data.get("reference_image"),
    )


def parse_scene(document: str) -> Scene:
    """Parse a scene JSON document.  Unknown fields are ignored; missing
    required fields, malformed JSON, and duplicate ids are rejected."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SceneParseError(f"malformed scene JSON: {exc}") from exc
    return scene_from_dict(data)


def serialize_scene(scene: Scene) -> str:
    """Canonical JSON serialization; stable byte-for-byte for a given scene."""
    return json.dumps(scene.to_dict(), indent=2, sort_keys=True) + "\n"


def validate_scene(scene: Scene, require_assets: bool = False) -> list[str]:
    """Collect diagnostics without failing.  An empty list means clean.

    Size limits [0.1, 5] come from the authoring guideline and are reported
    as warnings only, so user-authored oversized scenes still solve.
    """
    diagnostics: list[str] = []
    for item in scene.items:
        for axis in ("x", "y", "z"):
            value = getattr(item.size, axis)
            if not (value > 0):
                diagnostics.append(f"item '{item.id}': size.{axis} must be positive, got {value}")
            elif value < SIZE_MIN:
                diagnostics.append(
                    f"item '{item.id}': size.{axis} {value} below the {SIZE_MIN} m guideline floor"
                )
            elif value > SIZE_MAX:
                diagnostics.append(
                    f"item '{item.id}': size.{axis} {value} above the {SIZE_MAX} m guideline cap"
                )
        if not (item.position.is_finite() and item.rotation.is_finite() and item.size.is_finite()):
            diagnostics.append(f"item '{item.id}': non-finite pose or size component")
        if require_assets and not item.asset_ref:
            diagnostics.append(f"item '{item.id}': missing asset reference")
    return diagnostics


def rescale_spec_dims(spec: ObjectSpec, measured: AssetDims) -> ObjectSpec:
    """Rescale a spec to a measured mesh using the original z size as the
    reference: the mesh is scaled uniformly so its height matches ``size.z``,
    and the resulting x/y extents replace the spec's."""
    if not (measured.x > 0 and measured.y > 0 and measured.z > 0):
        raise InvalidAssetError(f"measured asset extents must be positive, got {measured}")
    if not spec.size.z > 0:
        raise InvalidAssetError(f"spec '{spec.id}' has non-positive reference height")
    scale = spec.size.z / measured.z
    return replace(spec, size=Vec3(measured.x * scale, measured.y * scale, spec.size.z))
