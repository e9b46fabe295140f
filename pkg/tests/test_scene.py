import json

import pytest
from hypothesis import given, strategies as st

from scenelayout.fixtures import BEDROOM_SCENE_JSON
from scenelayout.geometry import Vec3
from scenelayout.scene import (
    AssetDims,
    InvalidAssetError,
    ObjectSpec,
    Scene,
    SceneParseError,
    parse_scene,
    rescale_spec_dims,
    serialize_scene,
    validate_scene,
)


def make_spec(item_id="obj", size=(1.0, 1.0, 1.0), pos=(0.0, 0.0, 0.5)):
    return ObjectSpec(
        id=item_id,
        name=item_id,
        position=Vec3(*pos),
        rotation=Vec3(0, 0, 0),
        size=Vec3(*size),
        visual_description=f"a {item_id}",
    )


class TestParseScene:
    def test_bedroom_fixture(self):
        scene = parse_scene(BEDROOM_SCENE_JSON)
        ids = scene.ids()
        assert ids[:3] == ["bed1", "nightstand_left", "nightstand_right"]
        assert len(ids) == 8
        bed = scene.get("bed1")
        assert (bed.size.x, bed.size.y, bed.size.z) == (1.92, 1.94, 1.2)
        assert scene.get("nightstand_right").position == Vec3(1.2, 1.0, 0.35)
        assert scene.get("lamp_left").size == Vec3(0.34, 0.34, 0.6)

    def test_empty_items_is_valid(self):
        scene = parse_scene('{"items": []}')
        assert scene.items == ()

    def test_duplicate_ids_rejected(self):
        doc = json.loads(BEDROOM_SCENE_JSON)
        doc["items"] = [doc["items"][0], doc["items"][0]]
        with pytest.raises(SceneParseError, match="bed1"):
            parse_scene(json.dumps(doc))

    def test_missing_field_names_item(self):
        doc = json.loads(BEDROOM_SCENE_JSON)
        del doc["items"][1]["size"]
        with pytest.raises(SceneParseError, match="nightstand_left"):
            parse_scene(json.dumps(doc))

    def test_malformed_json(self):
        with pytest.raises(SceneParseError):
            parse_scene("{not json")

    def test_unknown_fields_ignored(self):
        doc = json.loads(BEDROOM_SCENE_JSON)
        doc["mystery"] = 42
        doc["items"][0]["extra"] = "ignored"
        scene = parse_scene(json.dumps(doc))
        assert scene.get("bed1").name == "King Bed"

    def test_round_trip(self):
        scene = parse_scene(BEDROOM_SCENE_JSON)
        assert parse_scene(serialize_scene(scene)) == scene

    def test_serialization_is_byte_stable(self):
        scene = parse_scene(BEDROOM_SCENE_JSON)
        text = serialize_scene(scene)
        assert serialize_scene(parse_scene(text)) == text

    @given(
        n=st.integers(min_value=0, max_value=5),
        coords=st.lists(
            st.floats(min_value=-9, max_value=9, allow_nan=False), min_size=30, max_size=30
        ),
        with_assets=st.booleans(),
    )
    def test_round_trip_for_generated_scenes(self, n, coords, with_assets):
        items = []
        for k in range(n):
            base = coords[k * 6 : k * 6 + 6]
            items.append(
                ObjectSpec(
                    id=f"item{k}",
                    name=f"Item {k}",
                    position=Vec3(base[0], base[1], abs(base[2]) + 0.1),
                    rotation=Vec3(0, 0, base[3]),
                    size=Vec3(abs(base[4]) + 0.1, abs(base[5]) + 0.1, 0.5),
                    visual_description=f"generated item {k}",
                    asset_ref=f"assets/item{k}.glb" if with_assets else None,
                )
            )
        scene = Scene(items=tuple(items), description="gen", style="test")
        assert parse_scene(serialize_scene(scene)) == scene


class TestValidateScene:
    def test_bedroom_is_clean(self):
        assert validate_scene(parse_scene(BEDROOM_SCENE_JSON)) == []

    def test_below_floor_warns(self):
        scene = Scene(items=(make_spec(size=(0.05, 1, 1)),))
        diags = validate_scene(scene)
        assert len(diags) == 1 and "size.x" in diags[0]

    def test_above_cap_warns(self):
        scene = Scene(items=(make_spec(size=(1, 1, 7.0)),))
        diags = validate_scene(scene)
        assert len(diags) == 1 and "size.z" in diags[0]

    def test_missing_asset_only_when_required(self):
        scene = Scene(items=(make_spec(),))
        assert validate_scene(scene) == []
        assert any("asset" in d for d in validate_scene(scene, require_assets=True))

    @given(
        sx=st.floats(min_value=0.01, max_value=10, allow_nan=False),
        sy=st.floats(min_value=0.01, max_value=10, allow_nan=False),
        sz=st.floats(min_value=0.01, max_value=10, allow_nan=False),
    )
    def test_no_size_diagnostics_iff_in_range(self, sx, sy, sz):
        scene = Scene(items=(make_spec(size=(sx, sy, sz)),))
        clean = not any("size" in d for d in validate_scene(scene))
        assert clean == all(0.1 <= v <= 5 for v in (sx, sy, sz))


class TestRescaleSpecDims:
    def test_z_reference_scale(self):
        spec = make_spec(size=(1.0, 1.0, 1.2))
        out = rescale_spec_dims(spec, AssetDims(0.8, 0.9, 0.6))
        assert (out.size.x, out.size.y, out.size.z) == (pytest.approx(1.6), pytest.approx(1.8), 1.2)

    def test_identity_when_measured_matches(self):
        spec = make_spec(size=(0.8, 0.9, 0.6))
        out = rescale_spec_dims(spec, AssetDims(0.8, 0.9, 0.6))
        assert out.size == spec.size

    def test_downscale(self):
        spec = make_spec(size=(1.0, 1.0, 0.6))
        out = rescale_spec_dims(spec, AssetDims(1.0, 2.0, 3.0))
        assert (out.size.x, out.size.y, out.size.z) == (
            pytest.approx(0.2),
            pytest.approx(0.4),
            pytest.approx(0.6),
        )

    def test_rejects_bad_measurements(self):
        with pytest.raises(InvalidAssetError):
            rescale_spec_dims(make_spec(), AssetDims(1.0, 1.0, 0.0))

    @given(
        mx=st.floats(min_value=0.01, max_value=10, allow_nan=False),
        my=st.floats(min_value=0.01, max_value=10, allow_nan=False),
        mz=st.floats(min_value=0.01, max_value=10, allow_nan=False),
        ref_z=st.floats(min_value=0.01, max_value=10, allow_nan=False),
    )
    def test_preserves_aspect_and_reference_height(self, mx, my, mz, ref_z):
        spec = make_spec(size=(1.0, 1.0, ref_z))
        out = rescale_spec_dims(spec, AssetDims(mx, my, mz))
        assert out.size.z == ref_z
        assert out.size.x / out.size.z == pytest.approx(mx / mz)
        assert out.size.y / out.size.z == pytest.approx(my / mz)
        assert out.position == spec.position and out.id == spec.id
