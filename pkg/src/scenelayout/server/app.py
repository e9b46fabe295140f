"""HTTP service exposing solve, edit, and export over one scene directory."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response

from ..constraints import ConstraintParseError
from ..edit import AmbiguousEditError, EditError
from ..scene import SceneParseError
from ..solver import SolverInputError
from .models import (
    EditRequest,
    EditResponse,
    HealthResponse,
    SceneResponse,
    SolveRequest,
    SolveResponse,
)
from .workspace import SceneWorkspace, VersionConflict


def create_app(workspace: SceneWorkspace) -> FastAPI:
    app = FastAPI(title="scenelayout", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.workspace = workspace

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(
            status="ok", version=workspace.version, items=len(workspace.scene.items)
        )

    @app.get("/scene", response_model=SceneResponse)
    def scene():
        return SceneResponse(**workspace.snapshot())

    @app.post("/solve", response_model=SolveResponse)
    def solve(request: SolveRequest):
        try:
            report = workspace.solve_constraints(request.constraints)
        except (ConstraintParseError, SolverInputError, SceneParseError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return SolveResponse(**report.to_json_dict())

    @app.post("/edit", response_model=EditResponse)
    def edit(request: EditRequest):
        try:
            result = workspace.apply_edit(
                instruction=request.instruction,
                kind=request.kind,
                focus_id=request.focus_id,
                new_spec=request.new_spec,
                expect_version=request.expect_version,
            )
        except VersionConflict as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except (AmbiguousEditError, EditError, ConstraintParseError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return EditResponse(
            ok=result.ok,
            changed_ids=sorted(result.changed_ids),
            version=workspace.version,
            error=result.error,
            warnings=result.warnings,
            report=result.report.to_json_dict() if result.report else None,
        )

    @app.get("/assets/{object_id}")
    def asset(object_id: str):
        path = workspace.asset_path(object_id)
        if path is None:
            raise HTTPException(status_code=404, detail=f"no asset for '{object_id}'")
        return Response(content=path.read_bytes(), media_type="model/gltf-binary")

    return app
