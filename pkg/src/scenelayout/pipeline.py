"""End-to-end generation: analysis, asset generation, layout, export.

Produces a self-contained scene directory:

    scene.json        canonical scene document (sizes rescaled, asset refs)
    constraints.json  the constraint set the final layout satisfies
    layout.json       solver report (layout map, score, failures, status)
    images/           reference, per-object, and background images
    assets/           per-object GLB meshes
    ledger.json       job records; re-running skips completed jobs

Items whose images are pruned as redundant sub-components are dropped from
the scene: their visual content already lives inside a larger asset.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path

from .constraints import Thresholds, serialize_constraints
from .fixtures import BEDROOM_CONSTRAINTS_JSON
from .refine import MockProposer, Proposer, RefinementTrace, refine_until_solved, roster_key
from .scene import Scene, parse_scene, serialize_scene, validate_scene
from .services import MockTransport, SceneServices, ServiceConfig, Transport
from .solver import Layout, SolverConfig, SolverReport
from .export import export_scene_json

logger = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    scene_dir: Path
    scene: Scene
    layout: Layout
    report: SolverReport | None
    trace: RefinementTrace
    status: str

    @property
    def complete(self) -> bool:
        return self.report is not None and self.report.terminated_by == "complete"


def default_mock_proposer() -> MockProposer:
    """Table-driven proposer keyed to the built-in fixture roster."""
    from .fixtures import BEDROOM_SCENE_JSON

    bedroom_ids = parse_scene(BEDROOM_SCENE_JSON).ids()
    return MockProposer(table={roster_key(bedroom_ids): BEDROOM_CONSTRAINTS_JSON})


def run_pipeline(
    description: str,
    out_dir,
    style: str = "realistic",
    transport: Transport | None = None,
    proposer: Proposer | None = None,
    solver_config: SolverConfig = SolverConfig(),
    th: Thresholds = Thresholds(),
    max_iterations: int = 5,
    service_config: ServiceConfig = ServiceConfig(),
) -> PipelineResult:
    """Run the full generation pipeline into ``out_dir`` (resumable)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if transport is None:
        transport = MockTransport()
    services = SceneServices(transport, out_dir, service_config)

    reference = services.generate_reference_image(description, style)
    logger.info("reference image: %s", reference)

    scene_path = out_dir / "scene.json"
    scene = services.parse_scene_from_inputs(description, reference)
    scene = replace(
        scene,
        description=description,
        style=style,
        reference_image=str(reference.relative_to(out_dir)),
    )
    for diagnostic in validate_scene(scene):
        logger.warning("scene validation: %s", diagnostic)
    scene_path.write_text(serialize_scene(scene))

    images = services.generate_object_images(scene, reference, style)
    if images:
        delete = services.prune_redundant_images(sorted(p.name for p in images.values()))
        if delete:
            logger.info("pruning redundant object images: %s", delete)
            pruned_ids = {name.rsplit(".", 1)[0] for name in delete}
            scene = scene.with_items(i for i in scene.items if i.id not in pruned_ids)
            images = {oid: p for oid, p in images.items() if oid not in pruned_ids}

    background = services.generate_background(reference)
    scene = replace(scene, background_ref=str(background.relative_to(out_dir)))

    updated_items = []
    for item in scene.items:
        image = images.get(item.id)
        if image is None:
            logger.warning("no image for '%s'; keeping box-only representation", item.id)
            updated_items.append(item)
            continue
        try:
            updated, _path, measured = services.generate_asset(image, item)
            logger.info(
                "asset for '%s': measured (%.2f, %.2f, %.2f)",
                item.id,
                measured.x,
                measured.y,
                measured.z,
            )
            updated_items.append(updated)
        except Exception as exc:
            logger.warning("asset generation for '%s' failed (%s); box-only", item.id, exc)
            updated_items.append(item)
    scene = scene.with_items(updated_items)
    scene_path.write_text(serialize_scene(scene))

    if proposer is None and isinstance(transport, MockTransport):
        proposer = default_mock_proposer()
    if proposer is None:
        from .refine import RemoteProposer

        proposer = RemoteProposer(transport)

    layout, trace = refine_until_solved(scene, proposer, solver_config, th, max_iterations)
    best = trace.best_report()
    final_constraints = []
    for record in trace.iterations:
        if record.report is best and record.report is not None:
            final_constraints = record.constraints
            break
    (out_dir / "constraints.json").write_text(serialize_constraints(final_constraints))
    if best is not None:
        (out_dir / "layout.json").write_text(best.to_json())
    export_scene_json(scene, layout, out_dir / "export.json")
    services.ledger.save()
    return PipelineResult(
        scene_dir=out_dir,
        scene=scene,
        layout=layout,
        report=best,
        trace=trace,
        status=trace.status,
    )
