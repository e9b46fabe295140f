"""Scene editing on a solved layout.

Layout-level edits re-constrain a single focus object (everything else stays
pinned); asset-level edits add, delete, or restyle objects.  All edits are
transactional: the new scene, layout, and constraint set are built completely
and returned together, and a failed edit hands back the originals untouched.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

from . import prompts
from .constraints import Constraint, Thresholds, collision_pairs, normalize
from .refine import (
    ProposalInvalid,
    Proposer,
    ProposerRequest,
    REQUEST_EDIT,
    roster_from_scene,
)
from .scene import ObjectSpec, Scene
from .solver import Layout, SolverConfig, SolverReport, solve

logger = logging.getLogger(__name__)

EDIT_MOVE = "move"
EDIT_ADD = "add"
EDIT_DELETE = "delete"
EDIT_REPLACE = "replace"


class EditError(ValueError):
    pass


class AmbiguousEditError(EditError):
    """The instruction needs disambiguation; carries candidate ids."""

    def __init__(self, message: str, candidates: list[str] | None = None):
        super().__init__(message)
        self.candidates = candidates or []


@dataclass(frozen=True)
class EditCommand:
    kind: str
    instruction: str = ""
    focus_id: str | None = None
    new_spec: ObjectSpec | None = None


@dataclass
class EditResult:
    ok: bool
    scene: Scene
    layout: Layout
    constraints: list[Constraint]
    changed_ids: set[str] = field(default_factory=set)
    report: SolverReport | None = None
    error: str | None = None
    warnings: list[str] = field(default_factory=list)


def constraints_from_feedback(
    scene: Scene,
    layout: Layout,
    instruction: str,
    proposer: Proposer,
) -> tuple[str, list[Constraint]]:
    """Ask the proposer to turn an edit instruction into constraints for one
    focus object.  Validates the single-source rule (and that the focus never
    appears as a target); one corrective retry, then an error."""
    if not instruction.strip():
        raise EditError("edit instruction must be non-empty")
    request = ProposerRequest(
        description=scene.description,
        style=scene.style,
        roster=roster_from_scene(scene),
        edit_instructions=instruction,
        kind=REQUEST_EDIT,
    )
    last_error: str | None = None
    for _ in range(2):
        if last_error is not None:
            request = replace(
                request,
                edit_instructions=f"{instruction}\n\nYour previous constraints were invalid: {last_error}",
            )
        proposal = proposer.propose(request)
        try:
            return _validate_focus_proposal(scene, proposal)
        except ProposalInvalid as exc:
            last_error = str(exc)
            logger.info("edit proposal rejected: %s", exc)
    raise EditError(f"edit proposal invalid after retry: {last_error}")


def _validate_focus_proposal(scene: Scene, proposal: list[Constraint]) -> tuple[str, list[Constraint]]:
    if not proposal:
        raise ProposalInvalid("no constraints were produced for the edit")
    sources = {c.source for c in proposal}
    if len(sources) != 1:
        raise ProposalInvalid(f"expected exactly one focus object, got sources {sorted(sources)}")
    focus = next(iter(sources))
    if not scene.has(focus):
        raise ProposalInvalid(f"focus object '{focus}' is not in the scene")
    for c in proposal:
        if c.target == focus:
            raise ProposalInvalid("the focus object must never be used as a target")
        if not scene.has(c.target):
            raise ProposalInvalid(f"constraint target '{c.target}' is not in the scene")
    return focus, normalize(proposal)


def _merge_focus_constraints(
    existing: list[Constraint], focus: str, new_for_focus: list[Constraint]
) -> list[Constraint]:
    kept = [c for c in existing if c.source != focus]
    return normalize(kept + new_for_focus)


def apply_move(
    scene: Scene,
    layout: Layout,
    focus_id: str,
    constraints: list[Constraint],
    existing_constraints: list[Constraint] | None = None,
    config: SolverConfig = SolverConfig(),
    th: Thresholds = Thresholds(),
) -> EditResult:
    """Re-place one object under new constraints with all others pinned."""
    if not scene.has(focus_id):
        raise EditError(f"unknown focus object '{focus_id}'")
    for c in constraints:
        if c.source != focus_id:
            raise EditError(f"move constraints must have source '{focus_id}', got '{c.source}'")
        if not scene.has(c.target):
            raise EditError(f"constraint target '{c.target}' is not in the scene")
    existing = list(existing_constraints or [])
    preplaced = {oid: pl for oid, pl in layout.items() if oid != focus_id}
    report = solve(scene, constraints, config, th, preplaced=preplaced)
    if report.terminated_by != "complete":
        return EditResult(
            ok=False,
            scene=scene,
            layout=dict(layout),
            constraints=existing,
            report=report,
            error=f"no placement satisfies the new constraints for '{focus_id}'",
        )
    return EditResult(
        ok=True,
        scene=scene,
        layout=report.best_layout,
        constraints=_merge_focus_constraints(existing, focus_id, constraints),
        changed_ids={focus_id},
        report=report,
    )


def apply_delete(
    scene: Scene,
    layout: Layout,
    focus_id: str,
    existing_constraints: list[Constraint] | None = None,
) -> EditResult:
    """Remove one object: its spec, placement, and every constraint touching
    it."""
    if not scene.has(focus_id):
        raise EditError(f"unknown object '{focus_id}'")
    new_scene = scene.with_items(i for i in scene.items if i.id != focus_id)
    new_layout = {oid: pl for oid, pl in layout.items() if oid != focus_id}
    kept = [
        c
        for c in (existing_constraints or [])
        if c.source != focus_id and c.target != focus_id
    ]
    return EditResult(
        ok=True,
        scene=new_scene,
        layout=new_layout,
        constraints=kept,
        changed_ids={focus_id},
    )


def apply_add(
    scene: Scene,
    layout: Layout,
    new_spec: ObjectSpec,
    instruction: str,
    proposer: Proposer | None = None,
    services=None,
    existing_constraints: list[Constraint] | None = None,
    config: SolverConfig = SolverConfig(),
    th: Thresholds = Thresholds(),
) -> EditResult:
    """Add an object: optional asset generation, constraints proposed with
    the new object as sole source, then a pinned solve."""
    if scene.has(new_spec.id):
        raise EditError(f"object id '{new_spec.id}' already exists")
    if not new_spec.visual_description:
        raise EditError("an added object needs a visual description")
    existing = list(existing_constraints or [])
    spec = new_spec
    warnings: list[str] = []
    if services is not None:
        try:
            image = services.transport.image(
                "object_image",
                prompts.object_image_prompt(spec.name, scene.style or "realistic"),
            )
            image_path = services.out_dir / "images" / f"{spec.id}.png"
            image_path.write_bytes(image)
            spec, _path, _dims = services.generate_asset(image_path, spec)
        except Exception as exc:
            warnings.append(f"asset generation failed, using box only: {exc}")
    grown = scene.with_items(list(scene.items) + [spec])

    constraints: list[Constraint] = []
    if proposer is not None and instruction.strip():
        try:
            focus, constraints = constraints_from_feedback(grown, layout, instruction, proposer)
            if focus != spec.id:
                return EditResult(
                    ok=False,
                    scene=scene,
                    layout=dict(layout),
                    constraints=existing,
                    error=f"proposer focused '{focus}' instead of the new object '{spec.id}'",
                )
        except EditError as exc:
            return EditResult(
                ok=False, scene=scene, layout=dict(layout), constraints=existing, error=str(exc)
            )

    report = solve(grown, constraints, config, th, preplaced=dict(layout))
    if report.terminated_by != "complete":
        return EditResult(
            ok=False,
            scene=scene,
            layout=dict(layout),
            constraints=existing,
            report=report,
            error=f"could not place the new object '{spec.id}'",
        )
    return EditResult(
        ok=True,
        scene=grown,
        layout=report.best_layout,
        constraints=normalize(existing + constraints),
        changed_ids={spec.id},
        report=report,
        warnings=warnings,
    )


def apply_replace(
    scene: Scene,
    layout: Layout,
    focus_id: str,
    instruction: str,
    services,
    existing_constraints: list[Constraint] | None = None,
    penetration_tol: float = 0.001,
) -> EditResult:
    """Regenerate the focus object's asset from the instruction text; the
    placement (position, yaw) and reference height stay fixed.  Collisions
    introduced by a changed footprint are reported, not auto-resolved."""
    if not scene.has(focus_id):
        raise EditError(f"unknown object '{focus_id}'")
    if not instruction.strip():
        raise EditError("replace needs a style instruction")
    old_spec = scene.get(focus_id)
    styled = replace(old_spec, visual_description=instruction)
    try:
        image = services.transport.image(
            "object_image",
            prompts.object_image_prompt(f"{styled.name}: {instruction}", scene.style or "realistic"),
        )
        image_path = services.out_dir / "images" / f"{focus_id}.png"
        image_path.write_bytes(image)
        new_spec, _path, _dims = services.generate_asset(image_path, styled)
    except Exception as exc:
        return EditResult(
            ok=False,
            scene=scene,
            layout=dict(layout),
            constraints=list(existing_constraints or []),
            error=f"asset regeneration failed: {exc}",
        )
    new_scene = scene.with_items(
        new_spec if item.id == focus_id else item for item in scene.items
    )
    warnings = []
    for a, b in collision_pairs(new_scene, layout, penetration_tol):
        if focus_id in (a, b):
            warnings.append(f"replacement footprint of '{focus_id}' now collides with '{a if b == focus_id else b}'")
    return EditResult(
        ok=True,
        scene=new_scene,
        layout=dict(layout),
        constraints=list(existing_constraints or []),
        changed_ids={focus_id},
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# Instruction routing


_DELETE_VERBS = ("delete", "remove")
_ADD_VERBS = ("add",)
_REPLACE_VERBS = ("replace", "change", "restyle", "swap")


def resolve_focus(scene: Scene, text: str) -> str:
    """Match an object id or name inside free text; ambiguity is an error."""
    lowered = text.lower()
    tokens = set(lowered.replace(",", " ").replace(".", " ").split())
    by_id = [item.id for item in scene.items if item.id.lower() in tokens]
    if len(by_id) == 1:
        return by_id[0]
    if len(by_id) > 1:
        raise AmbiguousEditError(f"instruction matches several ids: {sorted(by_id)}", by_id)
    by_name = [item.id for item in scene.items if item.name.lower() in lowered]
    if len(by_name) == 1:
        return by_name[0]
    if len(by_name) > 1:
        raise AmbiguousEditError(f"instruction matches several objects: {sorted(by_name)}", by_name)
    raise AmbiguousEditError(f"no scene object matches '{text}'")


def command_from_instruction(scene: Scene, instruction: str) -> EditCommand:
    """Route an instruction by its leading verb: delete/replace/add are
    explicit asset-level commands, everything else is a layout move that the
    proposer will interpret."""
    stripped = instruction.strip()
    if not stripped:
        raise EditError("empty edit instruction")
    verb = stripped.split()[0].lower()
    if verb in _DELETE_VERBS:
        return EditCommand(EDIT_DELETE, stripped, focus_id=resolve_focus(scene, stripped))
    if verb in _REPLACE_VERBS:
        return EditCommand(EDIT_REPLACE, stripped, focus_id=resolve_focus(scene, stripped))
    if verb in _ADD_VERBS:
        return EditCommand(EDIT_ADD, stripped)
    return EditCommand(EDIT_MOVE, stripped)
