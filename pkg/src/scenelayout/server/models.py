"""Request/response bodies for the HTTP API."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: int
    items: int


class SceneResponse(BaseModel):
    version: int
    scene: dict
    placed: list[str]
    constraints: list[dict] = Field(default_factory=list)
    report: Optional[dict] = None


class SolveRequest(BaseModel):
    constraints: list[dict] = Field(default_factory=list)


class SolveResponse(BaseModel):
    layout: dict[str, Any]
    score: int
    failures: list[dict]
    terminated_by: str


class EditRequest(BaseModel):
    instruction: Optional[str] = None
    kind: Optional[str] = None
    focus_id: Optional[str] = None
    new_spec: Optional[dict] = None
    expect_version: Optional[int] = None


class EditResponse(BaseModel):
    ok: bool
    changed_ids: list[str]
    version: int
    error: Optional[str] = None
    warnings: list[str] = Field(default_factory=list)
    report: Optional[dict] = None
