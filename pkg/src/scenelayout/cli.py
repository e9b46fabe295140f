"""Command-line entry points.

Exit codes: 0 success, 1 usage or I/O error, 2 infeasible within budget.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .constraints import (
    ConstraintParseError,
    check_acyclic,
    normalize,
    parse_constraints,
)
from .scene import SceneParseError, parse_scene, validate_scene
from .solver import SolverConfig, SolverInputError, solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2

logger = logging.getLogger("scenelayout")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise SystemExit(f"error: cannot read {path}: {exc}")


def cmd_validate(args) -> int:
    scene_text = _read(args.scene)
    constraints_text = _read(args.constraints)
    try:
        scene = parse_scene(scene_text)
    except SceneParseError as exc:
        print(f"scene: {exc}")
        return EXIT_USAGE
    try:
        constraints = normalize(parse_constraints(constraints_text))
    except ConstraintParseError as exc:
        print(f"constraints: {exc}")
        return EXIT_USAGE
    clean = True
    for diagnostic in validate_scene(scene):
        print(f"warning: {diagnostic}")
    known = set(scene.ids())
    for c in constraints:
        for endpoint in (c.source, c.target):
            if endpoint not in known:
                print(f"constraints: unknown object id '{endpoint}'")
                clean = False
    cycle = check_acyclic(constraints)
    if cycle is not None:
        print(f"constraints: dependency cycle {' -> '.join(cycle)}")
        clean = False
    if clean:
        print(f"ok: {len(scene.items)} objects, {len(constraints)} constraints")
        return EXIT_OK
    return EXIT_USAGE


def cmd_solve(args) -> int:
    try:
        scene = parse_scene(_read(args.scene))
        constraints = normalize(parse_constraints(_read(args.constraints)))
    except (SceneParseError, ConstraintParseError) as exc:
        print(f"error: {exc}")
        return EXIT_USAGE
    config = SolverConfig(
        timeout=args.timeout,
        node_limit=args.node_limit,
        rng_seed=args.seed,
    )
    try:
        report = solve(scene, constraints, config)
    except SolverInputError as exc:
        print(f"error: {exc}")
        return EXIT_USAGE
    out = Path(args.out) if args.out else Path(args.scene).with_name("layout.json")
    out.write_text(report.to_json())
    print(
        f"{report.terminated_by}: placed {report.score}/{len(scene.items)} "
        f"({report.node_count} nodes, {report.elapsed:.2f}s) -> {out}"
    )
    if report.terminated_by == "complete":
        return EXIT_OK
    for failure in report.failures:
        print(f"failed: {failure.object_id} violated {list(failure.violated_constraints)}")
    return EXIT_INFEASIBLE


def cmd_pipeline(args) -> int:
    from .pipeline import run_pipeline
    from .services import HttpTransport, MockTransport, ServiceError

    if args.mock:
        transport = MockTransport()
    else:
        try:
            transport = HttpTransport.from_env()
        except ServiceError as exc:
            print(f"error: {exc}")
            return EXIT_USAGE
    result = run_pipeline(
        args.description,
        args.out,
        style=args.style,
        transport=transport,
        solver_config=SolverConfig(rng_seed=args.seed),
        max_iterations=args.max_iterations,
    )
    print(f"pipeline {result.status}: scene directory {result.scene_dir}")
    if result.report is not None:
        print(f"layout: {result.report.terminated_by}, score {result.report.score}")
    return EXIT_OK if result.complete else EXIT_INFEASIBLE


def cmd_serve(args) -> int:
    import uvicorn

    from .server import SceneWorkspace, create_app
    from .services import HttpTransport, MockTransport, ServiceError

    if args.mock:
        transport = MockTransport()
    else:
        try:
            transport = HttpTransport.from_env()
        except ServiceError as exc:
            print(f"error: {exc}")
            return EXIT_USAGE
    try:
        workspace = SceneWorkspace(args.dir, transport=transport)
    except (FileNotFoundError, SceneParseError) as exc:
        print(f"error: {exc}")
        return EXIT_USAGE
    app = create_app(workspace)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def cmd_export(args) -> int:
    from .export import ExportError, export_scene_glb, export_scene_json, import_scene_json
    from .solver import SolverReport

    scene_dir = Path(args.dir)
    try:
        scene = import_scene_json(scene_dir / "scene.json")
    except (OSError, SceneParseError) as exc:
        print(f"error: {exc}")
        return EXIT_USAGE
    layout_path = scene_dir / "layout.json"
    layout = {}
    if layout_path.exists():
        layout = SolverReport.from_json_dict(json.loads(layout_path.read_text())).best_layout
    if not layout:
        print("error: no layout found; run solve or pipeline first")
        return EXIT_USAGE
    out = Path(args.out) if args.out else scene_dir / f"export.{args.format}"
    if args.format == "json":
        export_scene_json(scene, layout, out)
    else:
        try:
            warnings = export_scene_glb(scene, layout, out, base_dir=scene_dir)
        except ExportError as exc:
            print(f"error: {exc}")
            return EXIT_USAGE
        for warning in warnings:
            print(f"warning: {warning}")
    print(f"exported {out}")
    return EXIT_OK


def cmd_edit(args) -> int:
    from .server.workspace import SceneWorkspace, VersionConflict
    from .edit import AmbiguousEditError, EditError
    from .services import MockTransport

    try:
        workspace = SceneWorkspace(args.dir, transport=MockTransport())
    except (FileNotFoundError, SceneParseError) as exc:
        print(f"error: {exc}")
        return EXIT_USAGE
    new_spec = None
    if args.spec:
        new_spec = json.loads(_read(args.spec))
    try:
        result = workspace.apply_edit(
            instruction=args.instruction, kind=args.kind, focus_id=args.focus, new_spec=new_spec
        )
    except (EditError, AmbiguousEditError, VersionConflict) as exc:
        print(f"error: {exc}")
        return EXIT_USAGE
    if result.ok:
        print(f"edited: {sorted(result.changed_ids)}")
        for warning in result.warnings:
            print(f"warning: {warning}")
        return EXIT_OK
    print(f"edit failed: {result.error}")
    return EXIT_INFEASIBLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scenelayout",
        description="Constraint-based 3D scene layout: validate, solve, generate, serve, export.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scene and constraint file")
    p.add_argument("scene")
    p.add_argument("constraints")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("solve", help="solve a layout for a scene + constraints")
    p.add_argument("scene")
    p.add_argument("constraints")
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--node-limit", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("pipeline", help="run the full generation pipeline")
    p.add_argument("description")
    p.add_argument("--style", default="realistic")
    p.add_argument("--out", required=True)
    p.add_argument("--mock", action="store_true", help="offline fixture transport")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iterations", type=int, default=5)
    p.set_defaults(fn=cmd_pipeline)

    p = sub.add_parser("serve", help="serve a scene directory over HTTP")
    p.add_argument("--dir", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8823)
    p.add_argument("--mock", action="store_true")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("export", help="export a scene directory to JSON or GLB")
    p.add_argument("dir")
    p.add_argument("--format", choices=("json", "glb"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("edit", help="apply one edit to a scene directory")
    p.add_argument("dir")
    p.add_argument("instruction", nargs="?", default=None)
    p.add_argument("--kind", choices=("move", "add", "delete", "replace"), default=None)
    p.add_argument("--focus", default=None)
    p.add_argument("--spec", default=None, help="JSON file with the new object spec (add)")
    p.set_defaults(fn=cmd_edit)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.fn(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return EXIT_USAGE
        raise


if __name__ == "__main__":
    sys.exit(main())
