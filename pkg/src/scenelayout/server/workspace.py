"""Mutable state for one served scene directory.

All mutations (solve, edit) run under a single writer lock and bump a
monotonic version; reads never mutate.  State is persisted back to the scene
directory after every successful mutation so a restart resumes where the
last edit left off.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from ..constraints import (
    Constraint,
    Thresholds,
    check_acyclic,
    constraints_from_list,
    normalize,
    parse_constraints,
    serialize_constraints,
)
from ..edit import (
    EDIT_ADD,
    EDIT_DELETE,
    EDIT_MOVE,
    EDIT_REPLACE,
    EditError,
    EditResult,
    apply_add,
    apply_delete,
    apply_move,
    apply_replace,
    command_from_instruction,
    constraints_from_feedback,
)
from ..export import merge_layout
from ..refine import MockProposer, Proposer, RemoteProposer
from ..scene import Scene, SceneParseError, parse_scene, scene_from_dict, serialize_scene
from ..services import MockTransport, SceneServices, ServiceConfig, Transport
from ..solver import Layout, SolverConfig, SolverInputError, SolverReport, solve

PROPOSER_SCRIPT_FILE = "proposer_script.json"


class VersionConflict(RuntimeError):
    pass


class SceneWorkspace:
    def __init__(
        self,
        scene_dir,
        transport: Transport | None = None,
        proposer: Proposer | None = None,
        solver_config: SolverConfig = SolverConfig(),
        thresholds: Thresholds = Thresholds(),
    ):
        self.dir = Path(scene_dir)
        scene_path = self.dir / "scene.json"
        if not scene_path.exists():
            raise FileNotFoundError(f"no scene.json in {self.dir}")
        self.scene: Scene = parse_scene(scene_path.read_text())
        self.constraints: list[Constraint] = []
        constraints_path = self.dir / "constraints.json"
        if constraints_path.exists():
            self.constraints = parse_constraints(constraints_path.read_text())
        self.report: SolverReport | None = None
        self.layout: Layout = {}
        layout_path = self.dir / "layout.json"
        if layout_path.exists():
            self.report = SolverReport.from_json_dict(json.loads(layout_path.read_text()))
            self.layout = self.report.best_layout
        self.transport = transport or MockTransport()
        script_path = self.dir / PROPOSER_SCRIPT_FILE
        if proposer is not None:
            self.proposer = proposer
        elif script_path.exists():
            self.proposer = MockProposer(script=json.loads(script_path.read_text()))
        else:
            self.proposer = RemoteProposer(self.transport)
        self.services = SceneServices(self.transport, self.dir, ServiceConfig())
        self.solver_config = solver_config
        self.thresholds = thresholds
        self.version = 0
        self.lock = threading.Lock()

    # -- reads --------------------------------------------------------------

    def snapshot(self) -> dict:
        merged = merge_layout(self.scene, self.layout)
        return {
            "version": self.version,
            "scene": merged.to_dict(),
            "placed": sorted(self.layout.keys()),
            "constraints": [c.to_dict() for c in self.constraints],
            "report": self.report.to_json_dict() if self.report else None,
        }

    def asset_path(self, object_id: str) -> Path | None:
        try:
            item = self.scene.get(object_id)
        except KeyError:
            return None
        if not item.asset_ref:
            return None
        path = self.dir / item.asset_ref
        return path if path.exists() else None

    # -- mutations ------------------------------------------------------------

    def _persist(self) -> None:
        (self.dir / "scene.json").write_text(serialize_scene(self.scene))
        (self.dir / "constraints.json").write_text(serialize_constraints(self.constraints))
        if self.report is not None:
            (self.dir / "layout.json").write_text(self.report.to_json())

    def solve_constraints(self, raw_constraints: list) -> SolverReport:
        with self.lock:
            constraints = normalize(constraints_from_list(raw_constraints))
            cycle = check_acyclic(constraints)
            if cycle is not None:
                raise SolverInputError(f"constraint cycle: {' -> '.join(cycle)}")
            report = solve(self.scene, constraints, self.solver_config, self.thresholds)
            self.constraints = constraints
            self.report = report
            self.layout = report.best_layout
            self.version += 1
            self._persist()
            return report

    def apply_edit(
        self,
        instruction: str | None = None,
        kind: str | None = None,
        focus_id: str | None = None,
        new_spec: dict | None = None,
        expect_version: int | None = None,
    ) -> EditResult:
        with self.lock:
            if expect_version is not None and expect_version != self.version:
                raise VersionConflict(
                    f"workspace is at version {self.version}, edit expected {expect_version}"
                )
            if kind is None:
                if not instruction:
                    raise EditError("an edit needs an instruction or an explicit kind")
                command = command_from_instruction(self.scene, instruction)
                kind = command.kind
                focus_id = focus_id or command.focus_id
            result = self._route_edit(kind, instruction or "", focus_id, new_spec)
            if result.ok:
                self.scene = result.scene
                self.layout = result.layout
                self.constraints = result.constraints
                if result.report is not None:
                    self.report = result.report
                elif self.report is not None:
                    self.report.best_layout = self.layout
                    self.report.score = len(self.layout)
                self.version += 1
                self._persist()
            return result

    def _route_edit(self, kind: str, instruction: str, focus_id, new_spec) -> EditResult:
        if kind == EDIT_DELETE:
            if not focus_id:
                raise EditError("delete needs a focus object")
            return apply_delete(self.scene, self.layout, focus_id, self.constraints)
        if kind == EDIT_REPLACE:
            if not focus_id:
                raise EditError("replace needs a focus object")
            return apply_replace(
                self.scene, self.layout, focus_id, instruction, self.services, self.constraints
            )
        if kind == EDIT_ADD:
            if new_spec is None:
                raise EditError(
                    "add needs a new_spec object (id, name, position, rotation, size, visual_description)"
                )
            try:
                spec_scene = scene_from_dict({"items": [new_spec]})
            except SceneParseError as exc:
                raise EditError(f"invalid new_spec: {exc}") from exc
            return apply_add(
                self.scene,
                self.layout,
                spec_scene.items[0],
                instruction,
                proposer=self.proposer,
                services=self.services,
                existing_constraints=self.constraints,
                config=self.solver_config,
                th=self.thresholds,
            )
        if kind == EDIT_MOVE:
            focus, move_constraints = constraints_from_feedback(
                self.scene, self.layout, instruction, self.proposer
            )
            return apply_move(
                self.scene,
                self.layout,
                focus,
                move_constraints,
                existing_constraints=self.constraints,
                config=self.solver_config,
                th=self.thresholds,
            )
        raise EditError(f"unknown edit kind '{kind}'")
