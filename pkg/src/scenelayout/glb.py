"""Minimal GLB (binary glTF 2.0) reading and writing.

Covers exactly what the pipeline needs: writing box meshes, measuring the
axis-aligned vertex bounds of an arbitrary GLB (node transforms applied), and
assembling a set of placed assets plus a ground plane into one scene file.
Coordinates follow the scene convention (+Z up, meters); imported assets are
taken in their default orientation.

Sparse accessors and non-float positions are not supported; callers are
expected to fall back to placeholder geometry on GlbError.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass

_MAGIC = 0x46546C67  # "glTF"
_CHUNK_JSON = 0x4E4F534A
_CHUNK_BIN = 0x004E4942

_COMPONENT_SIZE = {5120: 1, 5121: 1, 5122: 2, 5123: 2, 5125: 4, 5126: 4}
_TYPE_COUNT = {"SCALAR": 1, "VEC2": 2, "VEC3": 3, "VEC4": 4, "MAT4": 16}


class GlbError(ValueError):
    pass


@dataclass
class GlbDocument:
    gltf: dict
    binary: bytes


def read_glb(data: bytes) -> GlbDocument:
    if len(data) < 12:
        raise GlbError("truncated GLB header")
    magic, version, _length = struct.unpack_from("<III", data, 0)
    if magic != _MAGIC:
        raise GlbError("not a GLB file (bad magic)")
    if version != 2:
        raise GlbError(f"unsupported GLB version {version}")
    offset = 12
    gltf = None
    binary = b""
    while offset + 8 <= len(data):
        chunk_len, chunk_type = struct.unpack_from("<II", data, offset)
        offset += 8
        chunk = data[offset : offset + chunk_len]
        # chunk_len includes the 4-byte alignment padding per the spec
        offset += chunk_len
        if chunk_type == _CHUNK_JSON:
            gltf = json.loads(chunk.decode("utf-8"))
        elif chunk_type == _CHUNK_BIN:
            binary = bytes(chunk)
    if gltf is None:
        raise GlbError("GLB has no JSON chunk")
    return GlbDocument(gltf, binary)


def read_glb_file(path) -> GlbDocument:
    with open(path, "rb") as fh:
        return read_glb(fh.read())


def write_glb(gltf: dict, binary: bytes) -> bytes:
    payload = json.dumps(gltf, separators=(",", ":")).encode("utf-8")
    payload += b" " * (-len(payload) % 4)
    binary = bytes(binary) + b"\x00" * (-len(binary) % 4)
    total = 12 + 8 + len(payload) + (8 + len(binary) if binary else 0)
    out = struct.pack("<III", _MAGIC, 2, total)
    out += struct.pack("<II", len(payload), _CHUNK_JSON) + payload
    if binary:
        out += struct.pack("<II", len(binary), _CHUNK_BIN) + binary
    return out


# ---------------------------------------------------------------------------
# Geometry builders


def _box_mesh_data(sx: float, sy: float, sz: float) -> tuple[list[float], list[int]]:
    hx, hy, hz = sx / 2.0, sy / 2.0, sz / 2.0
    corners = [
        (-hx, -hy, -hz), (hx, -hy, -hz), (hx, hy, -hz), (-hx, hy, -hz),
        (-hx, -hy, hz), (hx, -hy, hz), (hx, hy, hz), (-hx, hy, hz),
    ]
    positions = [v for corner in corners for v in corner]
    indices = [
        0, 2, 1, 0, 3, 2,  # bottom
        4, 5, 6, 4, 6, 7,  # top
        0, 1, 5, 0, 5, 4,  # -y
        2, 3, 7, 2, 7, 6,  # +y
        1, 2, 6, 1, 6, 5,  # +x
        3, 0, 4, 3, 4, 7,  # -x
    ]
    return positions, indices


class _BinBuilder:
    def __init__(self):
        self.blob = bytearray()
        self.views: list[dict] = []
        self.accessors: list[dict] = []

    def _add_view(self, data: bytes, target: int | None) -> int:
        self.blob.extend(b"\x00" * (-len(self.blob) % 4))
        view = {"buffer": 0, "byteOffset": len(self.blob), "byteLength": len(data)}
        if target is not None:
            view["target"] = target
        self.blob.extend(data)
        self.views.append(view)
        return len(self.views) - 1

    def add_positions(self, positions: list[float]) -> int:
        data = struct.pack(f"<{len(positions)}f", *positions)
        view = self._add_view(data, target=34962)
        xs, ys, zs = positions[0::3], positions[1::3], positions[2::3]
        self.accessors.append(
            {
                "bufferView": view,
                "componentType": 5126,
                "count": len(positions) // 3,
                "type": "VEC3",
                "min": [min(xs), min(ys), min(zs)],
                "max": [max(xs), max(ys), max(zs)],
            }
        )
        return len(self.accessors) - 1

    def add_texcoords(self, uvs: list[float]) -> int:
        data = struct.pack(f"<{len(uvs)}f", *uvs)
        view = self._add_view(data, target=34962)
        self.accessors.append(
            {
                "bufferView": view,
                "componentType": 5126,
                "count": len(uvs) // 2,
                "type": "VEC2",
            }
        )
        return len(self.accessors) - 1

    def add_indices(self, indices: list[int]) -> int:
        data = struct.pack(f"<{len(indices)}H", *indices)
        view = self._add_view(data, target=34963)
        self.accessors.append(
            {
                "bufferView": view,
                "componentType": 5123,
                "count": len(indices),
                "type": "SCALAR",
            }
        )
        return len(self.accessors) - 1

    def add_image(self, png: bytes) -> int:
        return self._add_view(png, target=None)


def write_box_glb(size_x: float, size_y: float, size_z: float, color=(0.8, 0.8, 0.8, 1.0), name: str = "box") -> bytes:
    """A single box mesh centered at the origin, +Z up."""
    if min(size_x, size_y, size_z) <= 0:
        raise GlbError("box extents must be positive")
    builder = _BinBuilder()
    positions, indices = _box_mesh_data(size_x, size_y, size_z)
    pos_acc = builder.add_positions(positions)
    idx_acc = builder.add_indices(indices)
    gltf = {
        "asset": {"version": "2.0", "generator": "scenelayout"},
        "scene": 0,
        "scenes": [{"nodes": [0]}],
        "nodes": [{"mesh": 0, "name": name}],
        "meshes": [
            {
                "name": name,
                "primitives": [
                    {"attributes": {"POSITION": pos_acc}, "indices": idx_acc, "material": 0}
                ],
            }
        ],
        "materials": [
            {"name": name, "pbrMetallicRoughness": {"baseColorFactor": list(color), "metallicFactor": 0.0}}
        ],
        "bufferViews": builder.views,
        "accessors": builder.accessors,
        "buffers": [{"byteLength": len(builder.blob)}],
    }
    return write_glb(gltf, bytes(builder.blob))


# ---------------------------------------------------------------------------
# Extent measurement


def _node_matrix(node: dict) -> list[float]:
    if "matrix" in node:
        return list(node["matrix"])  # column-major 4x4
    t = node.get("translation", [0.0, 0.0, 0.0])
    q = node.get("rotation", [0.0, 0.0, 0.0, 1.0])
    s = node.get("scale", [1.0, 1.0, 1.0])
    x, y, z, w = q
    rot = [
        1 - 2 * (y * y + z * z), 2 * (x * y + z * w), 2 * (x * z - y * w),
        2 * (x * y - z * w), 1 - 2 * (x * x + z * z), 2 * (y * z + x * w),
        2 * (x * z + y * w), 2 * (y * z - x * w), 1 - 2 * (x * x + y * y),
    ]
    return [
        rot[0] * s[0], rot[1] * s[0], rot[2] * s[0], 0.0,
        rot[3] * s[1], rot[4] * s[1], rot[5] * s[1], 0.0,
        rot[6] * s[2], rot[7] * s[2], rot[8] * s[2], 0.0,
        t[0], t[1], t[2], 1.0,
    ]


def _mat_mul(a: list[float], b: list[float]) -> list[float]:
    out = [0.0] * 16
    for col in range(4):
        for row in range(4):
            out[col * 4 + row] = sum(a[k * 4 + row] * b[col * 4 + k] for k in range(4))
    return out


_IDENTITY = [1.0, 0, 0, 0, 0, 1.0, 0, 0, 0, 0, 1.0, 0, 0, 0, 0, 1.0]


def _transform_point(m: list[float], p: tuple[float, float, float]) -> tuple[float, float, float]:
    x, y, z = p
    return (
        m[0] * x + m[4] * y + m[8] * z + m[12],
        m[1] * x + m[5] * y + m[9] * z + m[13],
        m[2] * x + m[6] * y + m[10] * z + m[14],
    )


def _accessor_positions(doc: GlbDocument, accessor_index: int):
    accessor = doc.gltf["accessors"][accessor_index]
    if accessor.get("sparse"):
        raise GlbError("sparse accessors are not supported")
    if accessor["componentType"] != 5126 or accessor["type"] != "VEC3":
        raise GlbError("POSITION accessor must be float32 VEC3")
    view = doc.gltf["bufferViews"][accessor["bufferView"]]
    base = view.get("byteOffset", 0) + accessor.get("byteOffset", 0)
    stride = view.get("byteStride") or 12
    count = accessor["count"]
    for i in range(count):
        yield struct.unpack_from("<3f", doc.binary, base + i * stride)


def measure_bounds(doc: GlbDocument) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
    """World-space bounds over all mesh vertices reachable from all scenes."""
    gltf = doc.gltf
    nodes = gltf.get("nodes", [])
    lo = [math.inf] * 3
    hi = [-math.inf] * 3

    def walk(node_index: int, parent: list[float]):
        node = nodes[node_index]
        world = _mat_mul(parent, _node_matrix(node))
        mesh_index = node.get("mesh")
        if mesh_index is not None:
            for primitive in gltf["meshes"][mesh_index].get("primitives", []):
                pos = primitive.get("attributes", {}).get("POSITION")
                if pos is None:
                    continue
                for point in _accessor_positions(doc, pos):
                    wx, wy, wz = _transform_point(world, point)
                    lo[0], lo[1], lo[2] = min(lo[0], wx), min(lo[1], wy), min(lo[2], wz)
                    hi[0], hi[1], hi[2] = max(hi[0], wx), max(hi[1], wy), max(hi[2], wz)
        for child in node.get("children", []):
            walk(child, world)

    roots: list[int] = []
    for scene in gltf.get("scenes", []):
        roots.extend(scene.get("nodes", []))
    if not roots:
        referenced = {c for n in nodes for c in n.get("children", [])}
        roots = [i for i in range(len(nodes)) if i not in referenced]
    for index in roots:
        walk(index, _IDENTITY)
    if not math.isfinite(lo[0]):
        raise GlbError("GLB contains no positioned mesh data")
    return tuple(lo), tuple(hi)


def measure_extents(path) -> tuple[float, float, float]:
    """Axis-aligned size of all mesh vertices in the file's default
    orientation."""
    lo, hi = measure_bounds(read_glb_file(path))
    return (hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2])


# ---------------------------------------------------------------------------
# Scene assembly


def _yaw_quaternion(yaw_degrees: float) -> list[float]:
    # The layout yaw turns -Y toward -X, i.e. a rotation of -yaw about +Z in
    # the standard sense.
    half = math.radians(-yaw_degrees) / 2.0
    return [0.0, 0.0, math.sin(half), math.cos(half)]


@dataclass
class AssemblyItem:
    object_id: str
    size: tuple[float, float, float]
    position: tuple[float, float, float]
    yaw: float
    glb_path: str | None = None


def _graft(gltf: dict, builder_bin: bytearray, item_doc: GlbDocument) -> list[int]:
    """Copy one parsed GLB into the assembly, remapping indices.  Returns the
    grafted root node indices."""
    src = item_doc.gltf
    base = {
        "views": len(gltf["bufferViews"]),
        "accessors": len(gltf["accessors"]),
        "materials": len(gltf.setdefault("materials", [])),
        "meshes": len(gltf.setdefault("meshes", [])),
        "nodes": len(gltf["nodes"]),
        "images": len(gltf.setdefault("images", [])),
        "samplers": len(gltf.setdefault("samplers", [])),
        "textures": len(gltf.setdefault("textures", [])),
    }
    builder_bin.extend(b"\x00" * (-len(builder_bin) % 4))
    bin_base = len(builder_bin)
    builder_bin.extend(item_doc.binary)

    for view in src.get("bufferViews", []):
        if view.get("buffer", 0) != 0:
            raise GlbError("multi-buffer GLB not supported")
        copied = dict(view)
        copied["buffer"] = 0
        copied["byteOffset"] = view.get("byteOffset", 0) + bin_base
        gltf["bufferViews"].append(copied)
    for accessor in src.get("accessors", []):
        if accessor.get("sparse"):
            raise GlbError("sparse accessors are not supported")
        copied = dict(accessor)
        if "bufferView" in copied:
            copied["bufferView"] += base["views"]
        gltf["accessors"].append(copied)
    for image in src.get("images", []):
        copied = dict(image)
        if "bufferView" in copied:
            copied["bufferView"] += base["views"]
        elif "uri" in copied:
            raise GlbError("external image references not supported")
        gltf["images"].append(copied)
    for sampler in src.get("samplers", []):
        gltf["samplers"].append(dict(sampler))
    for texture in src.get("textures", []):
        copied = dict(texture)
        if "source" in copied:
            copied["source"] += base["images"]
        if "sampler" in copied:
            copied["sampler"] += base["samplers"]
        gltf["textures"].append(copied)

    def remap_texture_refs(obj):
        if isinstance(obj, dict):
            for key, value in obj.items():
                if key == "index" and isinstance(value, int):
                    obj[key] = value + base["textures"]
                else:
                    remap_texture_refs(value)

    for material in src.get("materials", []):
        copied = json.loads(json.dumps(material))
        remap_texture_refs(copied)
        gltf["materials"].append(copied)
    for mesh in src.get("meshes", []):
        copied = json.loads(json.dumps(mesh))
        for primitive in copied.get("primitives", []):
            for attr, acc in list(primitive.get("attributes", {}).items()):
                primitive["attributes"][attr] = acc + base["accessors"]
            if "indices" in primitive:
                primitive["indices"] += base["accessors"]
            if "material" in primitive:
                primitive["material"] += base["materials"]
            if "targets" in primitive or "extensions" in primitive:
                raise GlbError("morph targets / primitive extensions not supported")
        gltf["meshes"].append(copied)
    for node in src.get("nodes", []):
        copied = {
            key: node[key]
            for key in ("name", "translation", "rotation", "scale", "matrix")
            if key in node
        }
        if "mesh" in node:
            copied["mesh"] = node["mesh"] + base["meshes"]
        if "children" in node:
            copied["children"] = [c + base["nodes"] for c in node["children"]]
        gltf["nodes"].append(copied)

    roots = []
    for scene in src.get("scenes", []):
        roots.extend(n + base["nodes"] for n in scene.get("nodes", []))
    if not roots and src.get("nodes"):
        roots = [base["nodes"]]
    return roots


def assemble_scene_glb(
    items: list[AssemblyItem],
    out_path,
    background_png: bytes | None = None,
    ground_margin: float = 1.0,
) -> list[str]:
    """Write one GLB containing every item at its finalized pose plus a
    ground plane.  Items without a loadable GLB become placeholder boxes.
    Returns warnings for each fallback taken."""
    warnings: list[str] = []
    builder = _BinBuilder()
    gltf: dict = {
        "asset": {"version": "2.0", "generator": "scenelayout"},
        "scene": 0,
        "scenes": [{"nodes": []}],
        "nodes": [],
        "meshes": [],
        "materials": [],
        "bufferViews": builder.views,
        "accessors": builder.accessors,
    }
    blob = builder.blob

    def add_box_node(item: AssemblyItem) -> int:
        positions, indices = _box_mesh_data(*item.size)
        pos_acc = builder.add_positions(positions)
        idx_acc = builder.add_indices(indices)
        gltf["materials"].append(
            {
                "name": f"{item.object_id}-placeholder",
                "pbrMetallicRoughness": {
                    "baseColorFactor": [0.7, 0.7, 0.75, 1.0],
                    "metallicFactor": 0.0,
                },
            }
        )
        gltf["meshes"].append(
            {
                "name": item.object_id,
                "primitives": [
                    {
                        "attributes": {"POSITION": pos_acc},
                        "indices": idx_acc,
                        "material": len(gltf["materials"]) - 1,
                    }
                ],
            }
        )
        gltf["nodes"].append(
            {
                "name": item.object_id,
                "mesh": len(gltf["meshes"]) - 1,
                "translation": list(item.position),
                "rotation": _yaw_quaternion(item.yaw),
            }
        )
        return len(gltf["nodes"]) - 1

    for item in items:
        node_index: int | None = None
        if item.glb_path:
            try:
                doc = read_glb_file(item.glb_path)
                lo, hi = measure_bounds(doc)
                measured_z = hi[2] - lo[2]
                scale = item.size[2] / measured_z if measured_z > 0 else 1.0
                center = [(lo[k] + hi[k]) / 2.0 for k in range(3)]
                roots = _graft(gltf, blob, doc)
                centering = {
                    "name": f"{item.object_id}-centering",
                    "translation": [-c for c in center],
                    "children": roots,
                }
                gltf["nodes"].append(centering)
                gltf["nodes"].append(
                    {
                        "name": item.object_id,
                        "translation": list(item.position),
                        "rotation": _yaw_quaternion(item.yaw),
                        "scale": [scale, scale, scale],
                        "children": [len(gltf["nodes"]) - 1],
                    }
                )
                node_index = len(gltf["nodes"]) - 1
            except (OSError, GlbError, KeyError, IndexError, struct.error) as exc:
                warnings.append(f"{item.object_id}: using placeholder box ({exc})")
                node_index = None
        if node_index is None:
            if not item.glb_path:
                warnings.append(f"{item.object_id}: no asset, using placeholder box")
            node_index = add_box_node(item)
        gltf["scenes"][0]["nodes"].append(node_index)

    # Ground plane sized to the layout footprint.
    if items:
        min_x = min(i.position[0] - max(i.size[:2]) for i in items) - ground_margin
        max_x = max(i.position[0] + max(i.size[:2]) for i in items) + ground_margin
        min_y = min(i.position[1] - max(i.size[:2]) for i in items) - ground_margin
        max_y = max(i.position[1] + max(i.size[:2]) for i in items) + ground_margin
    else:
        min_x, max_x, min_y, max_y = -5.0, 5.0, -5.0, 5.0
    plane_positions = [
        min_x, min_y, 0.0, max_x, min_y, 0.0, max_x, max_y, 0.0, min_x, max_y, 0.0
    ]
    plane_uvs = [0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]
    pos_acc = builder.add_positions(plane_positions)
    uv_acc = builder.add_texcoords(plane_uvs)
    idx_acc = builder.add_indices([0, 1, 2, 0, 2, 3])
    material: dict = {
        "name": "ground",
        "pbrMetallicRoughness": {"baseColorFactor": [0.85, 0.85, 0.85, 1.0], "metallicFactor": 0.0},
    }
    if background_png:
        image_view = builder.add_image(background_png)
        gltf.setdefault("images", []).append({"bufferView": image_view, "mimeType": "image/png"})
        gltf.setdefault("samplers", []).append({"wrapS": 10497, "wrapT": 10497})
        gltf.setdefault("textures", []).append(
            {"source": len(gltf["images"]) - 1, "sampler": len(gltf["samplers"]) - 1}
        )
        material["pbrMetallicRoughness"] = {
            "baseColorTexture": {"index": len(gltf["textures"]) - 1},
            "metallicFactor": 0.0,
        }
    gltf["materials"].append(material)
    gltf["meshes"].append(
        {
            "name": "ground",
            "primitives": [
                {
                    "attributes": {"POSITION": pos_acc, "TEXCOORD_0": uv_acc},
                    "indices": idx_acc,
                    "material": len(gltf["materials"]) - 1,
                }
            ],
        }
    )
    gltf["nodes"].append({"name": "ground", "mesh": len(gltf["meshes"]) - 1})
    gltf["scenes"][0]["nodes"].append(len(gltf["nodes"]) - 1)

    gltf["buffers"] = [{"byteLength": len(blob)}]
    for key in ("images", "samplers", "textures", "materials", "meshes"):
        if key in gltf and not gltf[key]:
            del gltf[key]
    data = write_glb(gltf, bytes(blob))
    with open(out_path, "wb") as fh:
        fh.write(data)
    return warnings
