"""Built-in demo scene: an eight-item bedroom with a matching constraint set.

Used by the offline mock transport, the mock proposer defaults, and the test
suite.  Three of the items (bed1, nightstand_right, lamp_left) carry the
canonical reference poses and sizes; the rest complete the room.
"""

BEDROOM_SCENE_JSON = """{
  "description": "A cozy modern bedroom with a king bed flanked by nightstands, a dresser, and a bench at the foot of the bed.",
  "style": "realistic",
  "items": [
    {
      "id": "bed1",
      "name": "King Bed",
      "position": {"x": 0.0, "y": 1.0, "z": 0.4},
      "rotation": {"x": 0.0, "y": 0.0, "z": 0.0},
      "size": {"x": 1.92, "y": 1.94, "z": 1.2},
      "visual_description": "King bed with an upholstered light-beige headboard and a white duvet."
    },
    {
      "id": "nightstand_left",
      "name": "Left Nightstand",
      "position": {"x": -1.2, "y": 1.0, "z": 0.35},
      "rotation": {"x": 0.0, "y": 0.0, "z": 0.0},
      "size": {"x": 0.52, "y": 0.95, "z": 0.6},
      "visual_description": "Light-wood minimalist nightstand with one drawer and an open shelf."
    },
    {
      "id": "nightstand_right",
      "name": "Right Nightstand",
      "position": {"x": 1.2, "y": 1.0, "z": 0.35},
      "rotation": {"x": 0.0, "y": 0.0, "z": 0.0},
      "size": {"x": 0.52, "y": 0.95, "z": 0.6},
      "visual_description": "Light-wood minimalist nightstand matching the left one."
    },
    {
      "id": "dresser1",
      "name": "Dresser",
      "position": {"x": 2.6, "y": 1.0, "z": 0.45},
      "rotation": {"x": 0.0, "y": 0.0, "z": 0.0},
      "size": {"x": 1.5, "y": 0.5, "z": 0.9},
      "visual_description": "Wide six-drawer dresser in light wood with brass handles."
    },
    {
      "id": "lamp_left",
      "name": "Left Table Lamp",
      "position": {"x": -1.2, "y": 1.0, "z": 0.9},
      "rotation": {"x": 0.0, "y": 0.0, "z": 0.0},
      "size": {"x": 0.34, "y": 0.34, "z": 0.6},
      "visual_description": "Glass-base table lamp with a white drum shade."
    },
    {
      "id": "lamp_right",
      "name": "Right Table Lamp",
      "position": {"x": 1.2, "y": 1.0, "z": 0.9},
      "rotation": {"x": 0.0, "y": 0.0, "z": 0.0},
      "size": {"x": 0.34, "y": 0.34, "z": 0.6},
      "visual_description": "Glass-base table lamp matching the left one."
    },
    {
      "id": "photo_frames1",
      "name": "Photo Frames",
      "position": {"x": 2.6, "y": 1.0, "z": 1.05},
      "rotation": {"x": 0.0, "y": 0.0, "z": 0.0},
      "size": {"x": 0.3, "y": 0.12, "z": 0.25},
      "visual_description": "Pair of framed family photos in thin black frames."
    },
    {
      "id": "bench1",
      "name": "Bedroom Bench",
      "position": {"x": 0.0, "y": -0.5, "z": 0.225},
      "rotation": {"x": 0.0, "y": 0.0, "z": 0.0},
      "size": {"x": 1.2, "y": 0.45, "z": 0.45},
      "visual_description": "Upholstered bench with slim metal legs."
    }
  ]
}
"""

BEDROOM_CONSTRAINTS_JSON = """[
  {
    "type": "relative",
    "relation": "left of",
    "source": "nightstand_left",
    "target": "bed1"
  },
  {
    "type": "relative",
    "relation": "right of",
    "source": "nightstand_right",
    "target": "bed1"
  },
  {
    "type": "relative",
    "relation": "right of",
    "source": "dresser1",
    "target": "bed1"
  },
  {
    "type": "relative",
    "relation": "on",
    "source": "lamp_left",
    "target": "nightstand_left"
  },
  {
    "type": "distance",
    "relation": "near",
    "source": "lamp_left",
    "target": "bed1"
  },
  {
    "type": "relative",
    "relation": "on",
    "source": "lamp_right",
    "target": "nightstand_right"
  },
  {
    "type": "distance",
    "relation": "near",
    "source": "lamp_right",
    "target": "bed1"
  },
  {
    "type": "relative",
    "relation": "on",
    "source": "photo_frames1",
    "target": "dresser1"
  }
]
"""

# A deliberately unsatisfiable proposal over the same roster, used to exercise
# the solver-feedback path of the refinement loop.
BEDROOM_CONTRADICTION_JSON = """[
  {
    "type": "relative",
    "relation": "left of",
    "source": "nightstand_left",
    "target": "bed1"
  },
  {
    "type": "relative",
    "relation": "right of",
    "source": "nightstand_left",
    "target": "bed1"
  }
]
"""
