"""Iterative constraint proposal and solving.

A proposer (remote vision-language service or deterministic mock) emits a
constraint set for the scene; the solver tries it; unplaced objects and their
violated relations are rendered into feedback text and sent back to the
proposer for the next round, until a complete layout is found or the
iteration budget runs out.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from typing import Mapping, Protocol, Sequence

from . import prompts
from .constraints import (
    Constraint,
    Thresholds,
    check_acyclic,
    constraints_from_list,
    normalize,
    parse_constraints,
    serialize_constraints,
)
from .scene import Scene
from .solver import Layout, SolverConfig, SolverReport, solve

logger = logging.getLogger(__name__)

STATUS_SOLVED = "solved"
STATUS_BUDGET_EXHAUSTED = "budget_exhausted"

REQUEST_GENERATE = "generate"
REQUEST_EDIT = "edit"


class ProposerError(RuntimeError):
    """Hard proposer failure (transport dead, script exhausted)."""

    def __init__(self, message: str, trace: "RefinementTrace | None" = None):
        super().__init__(message)
        self.trace = trace


class ProposalInvalid(ValueError):
    """A structurally bad proposal; consumes an iteration, fed back as text."""


@dataclass(frozen=True)
class RosterEntry:
    id: str
    name: str
    visual_description: str


@dataclass(frozen=True)
class ProposerRequest:
    description: str
    style: str
    roster: tuple[RosterEntry, ...]
    previous_constraints: tuple[Constraint, ...] | None = None
    edit_instructions: str | None = None
    kind: str = REQUEST_GENERATE

    def roster_ids(self) -> list[str]:
        return [entry.id for entry in self.roster]

    def objects_text(self) -> str:
        return prompts.objects_text(self.roster)

    def fingerprint(self) -> str:
        payload = {
            "description": self.description,
            "style": self.style,
            "roster": [[e.id, e.name, e.visual_description] for e in self.roster],
            "previous": [c.to_dict() for c in self.previous_constraints or ()],
            "edit_instructions": self.edit_instructions,
            "kind": self.kind,
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def roster_key(ids: Sequence[str]) -> str:
    """Fingerprint of just the object roster, for table-driven mocks."""
    return hashlib.sha256(json.dumps(sorted(ids)).encode()).hexdigest()


def roster_from_scene(scene: Scene) -> tuple[RosterEntry, ...]:
    return tuple(
        RosterEntry(item.id, item.name, item.visual_description) for item in scene.items
    )


def request_from_scene(scene: Scene, kind: str = REQUEST_GENERATE) -> ProposerRequest:
    return ProposerRequest(
        description=scene.description,
        style=scene.style,
        roster=roster_from_scene(scene),
        kind=kind,
    )


class Proposer(Protocol):
    def propose(self, request: ProposerRequest) -> list[Constraint]: ...


def _coerce_proposal(payload) -> list[Constraint]:
    if isinstance(payload, str):
        return parse_constraints(payload)
    if isinstance(payload, list):
        if payload and isinstance(payload[0], Constraint):
            return list(payload)
        return constraints_from_list(payload)
    raise ProposalInvalid(f"unsupported proposal payload type {type(payload).__name__}")


class MockProposer:
    """Deterministic offline proposer.

    ``table`` maps a roster key (see :func:`roster_key`) to a response;
    ``script`` is consumed in order when no table entry matches.  Responses
    may be raw JSON text, plain dicts, or Constraint lists, and all go
    through the same parser the remote path uses.
    """

    def __init__(self, script: Sequence | None = None, table: Mapping[str, object] | None = None):
        self._script = list(script or [])
        self._table = dict(table or {})
        self.requests: list[ProposerRequest] = []

    def propose(self, request: ProposerRequest) -> list[Constraint]:
        if not request.roster:
            raise ValueError("proposer request has an empty roster")
        self.requests.append(request)
        key = roster_key(request.roster_ids())
        if key in self._table:
            return _coerce_proposal(self._table[key])
        if self._script:
            return _coerce_proposal(self._script.pop(0))
        raise ProposerError("mock proposer has no response for this request")


class RemoteProposer:
    """Renders the prompt templates and calls a configured text endpoint.

    ``transport`` needs a ``text(kind, prompt, system=None) -> str`` method;
    see :mod:`scenelayout.services` for the HTTP and mock implementations.
    """

    def __init__(self, transport):
        self.transport = transport

    def propose(self, request: ProposerRequest) -> list[Constraint]:
        if not request.roster:
            raise ValueError("proposer request has an empty roster")
        objects_text = request.objects_text()
        if request.kind == REQUEST_EDIT:
            prompt = prompts.edit_constraints_prompt(objects_text, request.edit_instructions or "")
            raw = self.transport.text("edit_constraints", prompt)
        elif request.previous_constraints is not None:
            prompt = prompts.regenerate_constraints_prompt(
                request.description,
                objects_text,
                serialize_constraints(request.previous_constraints),
                request.edit_instructions or "",
            )
            raw = self.transport.text(
                "regenerate_constraints", prompt, system=prompts.CONSTRAINTS_SYSTEM_PROMPT
            )
        else:
            prompt = prompts.constraints_prompt(request.description, objects_text)
            raw = self.transport.text(
                "generate_constraints", prompt, system=prompts.CONSTRAINTS_SYSTEM_PROMPT
            )
        return parse_constraints(raw)


def validate_proposal(constraints: list[Constraint], roster_ids: Sequence[str]) -> list[Constraint]:
    """Structural checks on a proposal: known ids and an acyclic dependency
    graph.  Returns the normalized constraints; raises ProposalInvalid."""
    known = set(roster_ids)
    for c in constraints:
        if c.source not in known:
            raise ProposalInvalid(f"constraint source '{c.source}' is not in the object roster")
        if c.target not in known:
            raise ProposalInvalid(f"constraint target '{c.target}' is not in the object roster")
    cycle = check_acyclic(constraints)
    if cycle is not None:
        raise ProposalInvalid(f"constraint dependencies form a cycle: {' -> '.join(cycle)}")
    return normalize(constraints)


def render_feedback(failures, constraints: list[Constraint]) -> str:
    """One line per failed object: the relations it could not satisfy."""
    lines = []
    for failure in failures:
        parts = [
            f"{constraints[idx].relation.value} target {constraints[idx].target}"
            for idx in failure.violated_constraints
            if idx < len(constraints)
        ]
        detail = ", ".join(parts) if parts else "placement search exhausted"
        lines.append(f"{failure.object_id}: could not satisfy [{detail}]")
    return "\n".join(lines)


@dataclass
class IterationRecord:
    constraints: list[Constraint]
    report: SolverReport | None
    error: str | None = None


@dataclass
class RefinementTrace:
    iterations: list[IterationRecord] = field(default_factory=list)
    cap: int = 0
    status: str = STATUS_BUDGET_EXHAUSTED

    def best_report(self) -> SolverReport | None:
        best = None
        for record in self.iterations:
            if record.report is None:
                continue
            if best is None or record.report.score > best.score:
                best = record.report
        return best


def refine_until_solved(
    scene: Scene,
    proposer: Proposer,
    config: SolverConfig = SolverConfig(),
    th: Thresholds = Thresholds(),
    max_iterations: int = 5,
) -> tuple[Layout, RefinementTrace]:
    """Loop proposer -> solver, feeding solver failures back as edit
    instructions, until a complete layout or the iteration cap.

    Returns the best-scoring layout across all iterations.  Structurally
    invalid proposals consume an iteration and feed the validation error
    back.  A hard proposer failure raises ProposerError carrying the trace
    gathered so far.
    """
    if max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")
    trace = RefinementTrace(cap=max_iterations)
    request = request_from_scene(scene)
    for iteration in range(1, max_iterations + 1):
        try:
            raw = proposer.propose(request)
        except ProposerError as exc:
            raise ProposerError(str(exc), trace) from exc
        try:
            constraints = validate_proposal(raw, scene.ids())
        except ProposalInvalid as exc:
            logger.info("iteration %d: proposal rejected: %s", iteration, exc)
            trace.iterations.append(IterationRecord(list(raw), None, error=str(exc)))
            request = replace(
                request,
                previous_constraints=tuple(raw),
                edit_instructions=f"The previous constraints were invalid: {exc}",
            )
            continue
        report = solve(scene, constraints, config, th)
        trace.iterations.append(IterationRecord(constraints, report))
        logger.info(
            "iteration %d: %s, score %d/%d",
            iteration,
            report.terminated_by,
            report.score,
            len(scene.items),
        )
        if report.terminated_by == "complete":
            trace.status = STATUS_SOLVED
            return report.best_layout, trace
        request = replace(
            request,
            previous_constraints=tuple(constraints),
            edit_instructions=render_feedback(report.failures, constraints),
        )
    best = trace.best_report()
    trace.status = STATUS_BUDGET_EXHAUSTED
    return (best.best_layout if best is not None else {}), trace
