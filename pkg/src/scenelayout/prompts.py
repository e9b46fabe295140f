"""Prompt templates for the vision-language service calls.

These strings are part of the external interface: downstream services are
prompted with exactly this text (including spacing), with only the documented
slots substituted.  Do not reflow or "fix" them.
"""

from __future__ import annotations

import json
from typing import List

from pydantic import BaseModel


class Vec3Model(BaseModel):
    x: float
    y: float
    z: float


class SceneItemModel(BaseModel):
    id: str
    name: str
    position: Vec3Model
    rotation: Vec3Model
    size: Vec3Model
    visual_description: str


class SceneDataModel(BaseModel):
    items: List[SceneItemModel]


class ImageListModel(BaseModel):
    filenames: list[str]


def reference_image_prompt(description: str, style: str) -> str:
    return (
        f"{description}. Render in {style} style. 3-D view: x->right, y->backward, z->up. "
        "Well-lit, no extra objects."
    )


def scene_parse_instruction() -> str:
    schema_json = SceneDataModel.model_json_schema()
    return (
        "You will receive a scene description and a style. Your task is to divide the scene into several objects and provide their positions, rotations, sizes, and visual descriptions in JSON format.\n\n"
        "Your output must be only valid JSON matching this schema:\n\n"
        f"{json.dumps(schema_json, indent=2)}\n\n"
        "Please follow these coordinate system specifications:\n"
        "- Use a right-handed coordinate system\n"
        "- The origin (0,0,0) is at the centre of the floor/ground\n"
        "- +X = right, +Y = backward, +Z = up (metres)\n\n"
        "The size values should be in range [0.1, 5] metres.\n\n"
        "Focus on the main objects in the scene, do not include too many small details.\n\n"
        "Do not include background elements (e.g., walls, windows, ceilings, floors, sky, rivers, grass, roads, terrain, curtains) in the items list.\n\n"
        "Each entry in the items list must correspond to a complete object (e.g. a building, a sculpture)--"
        "do not split out parts or components (e.g., handles, pillars, windows, knobs, etc.) as separate objects.\n\n"
        "_No extra commentary or Markdown--just the JSON text._\n\n"
    )


def object_image_prompt(obj_name: str, style: str) -> str:
    return (
        f"Please generate ONE PNG image of an isolated front-view {obj_name} "
        f"with a transparent background, in {style} style, with shapes and style similar to the reference scene. "
    )


PRUNE_SYSTEM_MESSAGE = (
    "You are a helpful assistant that identifies redundant sub-components in a set of images."
)


def prune_instruction(png_files: list[str]) -> str:
    schema_json = ImageListModel.model_json_schema()
    return (
        f"""
    I have the following list of image filenames:
    {json.dumps(png_files, indent=2)}
    """
        "Here are all images in the current scene. Some represent smaller parts already "
        'contained within larger assemblies. Return a JSON list of filenames (with ".png") '
        "that should be deleted as redundant sub-components, matching this schema: \n"
        f"{json.dumps(schema_json, indent=2)}\n\n"
    )


BACKGROUND_PROMPT = (
    "Replace the entire image with ONE seamless, tileable PNG of the main floor for indoor scenes, and the main ground for outdoor scenes. "
    "Using the material and pattern seen in the input photo. Ignore walls, ceiling and decorations."
    "The texture must be homogeneous, repeating smoothly, and produced at a scale large enough to cover an expansive floor area. Do not add transparency."
)


CONSTRAINTS_SYSTEM_PROMPT = (
    "You are a spatial relationship analyzer. Generate valid JSON constraints based on scene descriptions, object information and the reference image."
    "Output the constraints in a strict sequence: once an object has appeared as a target, it must not later appear as a source."
    "For each object, output all of its source-type constraints in true consecutive order in the list - they must be physically adjacent without any other constraints interleaved."
)


def constraints_prompt(description: str, objects_text: str) -> str:
    return f"""
You are a spatial relationship analyzer. Given a scene description and a list of objects with their IDs, generate spatial constraints between the objects.

Scene Description:
{description}

Available Objects:
{objects_text}

Generate spatial constraints in the following JSON format:
[
  {{
    "type": "relative",
    "relation": "right of|left of|in front of|behind|side of|on|above",
    "source": "object_id",
    "target": "object_id"
  }},
  {{
    "type": "distance",
    "relation": "near|far",
    "source": "object_id",
    "target": "object_id"
  }},
  {{
    "type": "rotation",
    "relation": "face to",
    "source": "object_id",
    "target": "object_id"
  }}
]

Guidelines:
1. Only include meaningful spatial relationships that match the description
2. Use the exact object IDs from the available objects list
3. Focus on the most important spatial relationships
4. Avoid redundant relationships
5. Return only valid JSON, no additional text
6. For example, if the scene description mentions "a chair to the right of a table", the relation should be right of, with the chair as the source and the table as the target.
7. An object should either choose to be on the ground(default, no need to specify as a constraint) or on/above another object.
8. Use "on" when one object is physically resting on the surface of another object. Use "above" only when the object is floating or suspended in the air above another object, not touching it. If an object is on the ground, do not specify any "on" or "above" relation when it is the source.

Generate the constraints:
"""


def regenerate_constraints_prompt(
    description: str,
    objects_text: str,
    last_constraint_content: str,
    edit_instructions: str,
) -> str:
    return f"""
You are a spatial relationship analyzer. Given a scene description and a list of objects with their IDs, generate spatial constraints between the objects.

Scene Description:
{description}

Available Objects:
{objects_text}

Last time, the following constraints were generated:
{last_constraint_content}

Edit Instructions:
{edit_instructions}

Generate spatial constraints in the following JSON format:
[
  {{
    "type": "relative",
    "relation": "right of|left of|in front of|behind|side of|on|above",
    "source": "object_id",
    "target": "object_id"
  }},
  {{
    "type": "distance",
    "relation": "near|far",
    "source": "object_id",
    "target": "object_id"
  }},
  {{
    "type": "rotation",
    "relation": "face to",
    "source": "object_id",
    "target": "object_id"
  }}
]

Guidelines:
1. Only include meaningful spatial relationships that match the description
2. Use the exact object IDs from the available objects list
3. Focus on the most important spatial relationships
4. Avoid redundant relationships
5. Return only valid JSON, no additional text
6. For example, if the scene description mentions "a chair to the right of a table", the relation should be right of, with the chair as the source and the table as the target.
7. An object should either choose to be on the ground(default, no need to specify as a constraint) or on/above another object.
8. Use "on" when one object is physically resting on the surface of another object. Use "above" only when the object is floating or suspended in the air above another object, not touching it. If an object is on the ground, do not specify any "on" or "above" relation when it is the source.

Generate the constraints:
"""


def edit_constraints_prompt(objects_text: str, feedback: str) -> str:
    return f"""
You are a spatial relationship analyzer. Given a list of objects with their IDs and a human feedback text, extract spatial constraints.

Your first task is to identify exactly one focus object from the feedback (the only object to be modified). Map this focus object to its exact ID from the Available Objects list.


Available Objects:
{objects_text}

Human Feedback:
{feedback}

Generate spatial constraints in the following JSON format:
[
  {{
    "type": "relative",
    "relation": "right of|left of|in front of|behind|side of|on|above",
    "source": "object_id",
    "target": "object_id"
  }},
  {{
    "type": "distance",
    "relation": "near|far",
    "source": "object_id",
    "target": "object_id"
  }},
  {{
    "type": "rotation",
    "relation": "face to",
    "source": "object_id",
    "target": "object_id"
  }}
]

Guidelines:
1. Identify exactly one focus object from the feedback; it must be the only "source" in all constraints. Never use the focus object as a "target".
2. Generate constraints only if they are explicitly supported by the feedback.
3. Use the exact object IDs from the Available Objects list. Ignore unknown objects.
4. Avoid redundant or contradictory relationships. If conflicts arise, choose the most specific interpretation.
5. Example: if the feedback says "Put the chair to the right of the table", use relation "right of", with the chair as the source and the table as the target.
6. Use "on" only when an object is physically resting on the surface of another object. Use "above" only when the object is suspended or floating above another object without contact. If an object is simply on the ground, do not produce "on" or "above" with it as the source.
7. Return only valid JSON, no additional text

Generate the constraints:
"""


def objects_text(roster) -> str:
    """One line per object: id, name, and visual description."""
    return "\n".join(
        f"- {entry.id} ({entry.name}): {entry.visual_description}" for entry in roster
    )
