"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the verdict lines.
The feasible corpus (built once per session) is certified instance-by-
instance with the brute-force grid oracle before the solver ever sees it.
"""

import socket
import time

import pytest

from scenelayout.constraints import (
    all_satisfied,
    collision_pairs,
    count_unsatisfied,
    eval_all,
    make_constraint,
    parse_constraints,
)
from scenelayout.edit import apply_move
from scenelayout.fixtures import (
    BEDROOM_CONSTRAINTS_JSON,
    BEDROOM_CONTRADICTION_JSON,
    BEDROOM_SCENE_JSON,
)
from scenelayout.refine import MockProposer, refine_until_solved
from scenelayout.scene import parse_scene
from scenelayout.solver import SolverConfig, solve

from _corpus import feasible_instance, initial_layout, random_instance
from _oracle import OracleBudgetExceeded, grid_solve


def verdict(name: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="session")
def feasible_corpus():
    """200 instances (<= 5 objects, <= 6 constraints), each certified
    feasible by the brute-force grid oracle (0.25 m grid, 8 yaw bins)."""
    corpus = []
    seed = 0
    while len(corpus) < 200 and seed < 600:
        scene, constraints, witness = feasible_instance(seed)
        seed += 1
        try:
            certificate = grid_solve(scene, constraints, node_cap=500_000)
        except OracleBudgetExceeded:
            continue
        if certificate is None:
            continue
        corpus.append((scene, constraints))
    assert len(corpus) == 200
    return corpus


def test_predicate_exactness():
    """All ten relations: hand-built true, false, and exact-boundary cases."""
    start = time.monotonic()
    from scenelayout.geometry import Vec3
    from scenelayout.scene import ObjectSpec
    from scenelayout.solver import Placement

    def obj(oid, x, y, z=None, yaw=0.0, size=(1.0, 1.0, 1.0)):
        spec = ObjectSpec(
            id=oid,
            name=oid,
            position=Vec3(0, 0, size[2] / 2),
            rotation=Vec3(0, 0, 0),
            size=Vec3(*size),
            visual_description=oid,
        )
        if z is None:
            z = size[2] / 2
        return spec, Placement(oid, Vec3(x, y, z), yaw)

    target = obj("t", 0, 0)
    table = obj("t", 0, 0, size=(1.0, 1.0, 0.6))
    ahead = obj("t", 0, -3)
    cases = {
        "left of": (
            [obj("s", -1.6, 0), obj("s", -1.2, 2), obj("s", -1.1, 0)],  # -1.1: gap exactly 0.1
            [obj("s", -1.05, 0), obj("s", 1.6, 0), obj("s", 0, 0)],
        ),
        "right of": (
            [obj("s", 1.6, 0), obj("s", 1.2, -2), obj("s", 1.1, 0)],
            [obj("s", 1.05, 0), obj("s", -1.6, 0), obj("s", 0.4, 0)],
        ),
        "in front of": (
            [obj("s", 0, -1.6), obj("s", 2, -1.2), obj("s", 0, -1.1)],
            [obj("s", 0, -1.05), obj("s", 0, 1.6), obj("s", 0, 0)],
        ),
        "behind": (
            [obj("s", 0, 1.6), obj("s", -2, 1.2), obj("s", 0, 1.1)],
            [obj("s", 0, 1.05), obj("s", 0, -1.6), obj("s", 0, 0.3)],
        ),
        "side of": (
            [obj("s", -1.6, 0), obj("s", 1.1, 0.5), obj("s", 2.5, 0)],
            [obj("s", 0, -1.6), obj("s", 0, 1.6), obj("s", 1.05, 0)],
        ),
        "near": (
            [obj("s", 2.5, 0), obj("s", 3.0, 0), obj("s", 0.5, 0.5)],  # 3.0: gap exactly 2.0
            [obj("s", 3.1, 0), obj("s", 0, 9.5), obj("s", 8, 8)],
        ),
        "far": (
            [obj("s", 9.5, 0), obj("s", 0, -9.2), obj("s", 8, 8)],
            [obj("s", 9.0, 0), obj("s", 2.5, 0), obj("s", 0, 0.2)],  # 9.0: gap exactly 8.0
        ),
        "on": (
            [
                obj("s", 0, 0, z=0.75, size=(0.3, 0.3, 0.3)),
                obj("s", 0.3, -0.3, z=0.75, size=(0.3, 0.3, 0.3)),
                obj("s", 0, 0, z=0.751, size=(0.3, 0.3, 0.3)),  # 1 mm clearance
            ],
            [
                obj("s", 0, 0, z=0.752, size=(0.3, 0.3, 0.3)),  # exactly 2 mm: too much
                obj("s", 0.45, 0, z=0.75, size=(0.3, 0.3, 0.3)),  # overhang
                obj("s", 0, 0, z=2.0, size=(0.3, 0.3, 0.3)),  # floating
            ],
        ),
        "above": (
            [
                obj("s", 0, 0, z=3.2, size=(0.4, 0.4, 0.4)),  # bottom exactly top + 2
                obj("s", 0.4, 0.4, z=3.5, size=(0.4, 0.4, 0.4)),
                obj("s", 0, 0, z=4.0, size=(0.4, 0.4, 0.4)),
            ],
            [
                obj("s", 0, 0, z=2.9, size=(0.4, 0.4, 0.4)),  # too low
                obj("s", 2.0, 0, z=3.2, size=(0.4, 0.4, 0.4)),  # no overlap
                obj("s", 0.75, 0, z=3.2, size=(0.5, 0.5, 0.4)),  # edges touch only
            ],
        ),
        "face to": (
            [obj("s", 0, 0, yaw=0.0), obj("s", 0, 0, yaw=9.0), obj("s", 0, 0, yaw=10.0)],
            [obj("s", 0, 0, yaw=10.1), obj("s", 0, 0, yaw=90.0), obj("s", 0, 0, yaw=180.0)],
        ),
    }
    target_for = {"on": table, "above": target, "face to": ahead}
    checked = 0
    for relation, (truthy, falsy) in cases.items():
        tgt = target_for.get(relation, target)
        for source in truthy:
            c = make_constraint(relation, "s", "t")
            from scenelayout.constraints import eval_relation

            assert eval_relation(c, source, tgt), f"{relation} should hold for {source[1]}"
            checked += 1
        for source in falsy:
            c = make_constraint(relation, "s", "t")
            from scenelayout.constraints import eval_relation

            assert not eval_relation(c, source, tgt), f"{relation} should fail for {source[1]}"
            checked += 1
    elapsed = time.monotonic() - start
    verdict(
        "predicate exactness",
        checked == 60 and elapsed < 1.0,
        f"{checked} cases incl. exact boundaries in {elapsed:.3f}s",
    )


def test_generator_predicate_consistency_1000_pairs():
    """Supporting check for solver soundness: every generated candidate
    satisfies its relation for 1000 random (source, target) pairs."""
    import random

    from scenelayout.constraints import Relation, eval_relation
    from scenelayout.geometry import Vec3
    from scenelayout.scene import ObjectSpec
    from scenelayout.solver import Placement, gen_candidates_for

    rng = random.Random("consistency")
    relations = list(Relation)
    pairs = checked = 0
    while pairs < 1000:
        relation = relations[pairs % len(relations)]
        tsize = (rng.uniform(0.4, 2.5), rng.uniform(0.4, 2.5), rng.uniform(0.3, 1.5))
        ssize = (rng.uniform(0.2, 1.8), rng.uniform(0.2, 1.8), rng.uniform(0.2, 1.2))
        tyaw = rng.choice([0.0, 45.0, 90.0, 135.0])
        tspec = ObjectSpec("t", "t", Vec3(0, 0, tsize[2] / 2), Vec3(0, 0, tyaw), Vec3(*tsize), "t")
        tpl = Placement("t", Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), tsize[2] / 2), tyaw)
        sspec = ObjectSpec(
            "s",
            "s",
            Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), ssize[2] / 2),
            Vec3(0, 0, rng.choice([0.0, 45.0, 90.0])),
            Vec3(*ssize),
            "s",
        )
        config = SolverConfig(rng_seed=pairs)
        constraint = make_constraint(relation, "s", "t")
        for placement in gen_candidates_for(relation, sspec, tspec, tpl, config):
            assert eval_relation(constraint, (sspec, placement), (tspec, tpl))
            checked += 1
        pairs += 1
    verdict(
        "generator-predicate consistency",
        checked > 0,
        f"{checked} candidates verified over {pairs} random pairs",
    )


def test_solver_soundness_200_instances():
    start = time.monotonic()
    complete = 0
    for seed in range(200):
        scene, constraints = random_instance(seed)
        report = solve(scene, constraints, SolverConfig(node_limit=5000, timeout=1.0))
        if report.terminated_by == "complete":
            complete += 1
            assert all_satisfied(eval_all(constraints, report.best_layout, scene)), seed
            assert collision_pairs(scene, report.best_layout) == [], seed
        assert (report.failures == []) == (report.terminated_by == "complete")
    elapsed = time.monotonic() - start
    verdict(
        "solver soundness",
        elapsed < 120.0,
        f"200 instances, {complete} complete, all sound, {elapsed:.1f}s",
    )


def test_oracle_completeness(feasible_corpus):
    start = time.monotonic()
    solved_count = 0
    for scene, constraints in feasible_corpus:
        report = solve(scene, constraints, SolverConfig())
        if report.terminated_by == "complete":
            solved_count += 1
    elapsed = time.monotonic() - start
    rate = solved_count / len(feasible_corpus)
    verdict(
        "oracle completeness",
        rate >= 0.95 and elapsed < 600.0,
        f"{solved_count}/200 certified-feasible instances solved ({rate:.1%}) in {elapsed:.1f}s",
    )


def test_determinism_byte_identical_reports(feasible_corpus):
    instances = [feasible_corpus[i] for i in range(5)] + [
        random_instance(seed) for seed in (11, 23, 37, 41, 53)
    ]
    config = SolverConfig(node_limit=5000, timeout=600.0, rng_seed=97)
    stable = 0
    for scene, constraints in instances:
        first = solve(scene, constraints, config).to_json()
        if all(solve(scene, constraints, config).to_json() == first for _ in range(4)):
            stable += 1
    verdict(
        "determinism",
        stable == 10,
        f"{stable}/10 instances byte-identical across 5 runs",
    )


def test_budget_compliance():
    worst_nodes = 0
    for seed in range(20):
        scene, constraints = random_instance(seed, min_objects=5, max_objects=8)
        report = solve(scene, constraints, SolverConfig(node_limit=100, timeout=600.0))
        worst_nodes = max(worst_nodes, report.node_count)
        assert report.node_count <= 101, f"seed {seed}: {report.node_count} nodes"
    worst_elapsed = 0.0
    for seed in range(5):
        scene, constraints = random_instance(seed + 300, min_objects=8, max_objects=8)
        report = solve(scene, constraints, SolverConfig(timeout=0.1))
        worst_elapsed = max(worst_elapsed, report.elapsed)
        assert report.elapsed <= 0.1 + 0.1, f"seed {seed}: {report.elapsed:.3f}s"
    verdict(
        "budget compliance",
        True,
        f"node_count <= {worst_nodes} of 101 allowed; elapsed <= {worst_elapsed:.3f}s of 0.2 allowed",
    )


def test_refinement_loop():
    scene = parse_scene(BEDROOM_SCENE_JSON)
    proposer = MockProposer(script=[BEDROOM_CONTRADICTION_JSON, BEDROOM_CONSTRAINTS_JSON])
    layout, trace = refine_until_solved(scene, proposer, SolverConfig(node_limit=3000))
    solved_at_two = trace.status == "solved" and len(trace.iterations) == 2
    failed_ids = {f.object_id for f in trace.iterations[0].report.failures}
    feedback = proposer.requests[1].edit_instructions
    subjects = {line.split(":")[0] for line in feedback.splitlines()}
    verdict(
        "refinement loop",
        solved_at_two and subjects == failed_ids,
        f"solved at iteration 2; feedback names exactly {sorted(subjects)}",
    )


def test_edit_isolation():
    import random

    scene = parse_scene(BEDROOM_SCENE_JSON)
    constraints = parse_constraints(BEDROOM_CONSTRAINTS_JSON)
    base = solve(scene, constraints, SolverConfig())
    assert base.terminated_by == "complete"
    layout = base.best_layout
    rng = random.Random("edit-isolation")
    ids = scene.ids()
    relations = ["near", "left of", "right of", "behind", "in front of", "on", "face to"]
    successes = failures = 0
    clean = True
    for k in range(50):
        focus = ids[k % len(ids)]
        target = rng.choice([oid for oid in ids if oid != focus])
        relation = rng.choice(relations)
        move = [make_constraint(relation, focus, target)]
        result = apply_move(
            scene,
            layout,
            focus,
            move,
            existing_constraints=constraints,
            config=SolverConfig(node_limit=3000, rng_seed=k),
        )
        if result.ok:
            successes += 1
            for oid, placement in layout.items():
                if oid != focus and result.layout[oid] != placement:
                    clean = False
        else:
            failures += 1
            if result.layout != layout:
                clean = False
    verdict(
        "edit isolation",
        clean and successes + failures == 50,
        f"{successes} successful, {failures} failed edits; non-focus placements intact in all",
    )


def test_pipeline_offline_run(tmp_path, monkeypatch):
    from scenelayout.export import import_scene_json
    from scenelayout.pipeline import run_pipeline
    from scenelayout.services import MockTransport

    def no_network(*args, **kwargs):
        raise AssertionError("network access attempted during mock pipeline")

    monkeypatch.setattr(socket, "getaddrinfo", no_network)
    monkeypatch.setattr(socket, "create_connection", no_network)
    start = time.monotonic()
    result = run_pipeline(
        "A cozy modern bedroom", tmp_path / "scene", transport=MockTransport()
    )
    elapsed = time.monotonic() - start
    exported = import_scene_json(tmp_path / "scene" / "export.json")
    round_trip = len(exported.items) == 8 and all(i.asset_ref for i in exported.items)
    verdict(
        "pipeline offline run",
        result.complete and elapsed < 30.0 and round_trip,
        f"mock pipeline complete in {elapsed:.1f}s, export re-imported with 8 items",
    )


def test_desk_scale_performance():
    scene, constraints, _witness = feasible_instance(
        1, max_objects=20, max_constraints=25, span=5.0, exact_objects=20
    )
    assert len(scene.items) == 20 and len(constraints) == 25
    start = time.monotonic()
    report = solve(scene, constraints, SolverConfig())
    elapsed = time.monotonic() - start
    sound = (
        report.terminated_by == "complete"
        and all_satisfied(eval_all(constraints, report.best_layout, scene))
        and collision_pairs(scene, report.best_layout) == []
    )
    verdict(
        "desk-scale performance",
        sound and elapsed < 30.0,
        f"20 objects / 25 constraints solved in {elapsed:.2f}s",
    )


def test_ablation_analogue(feasible_corpus):
    """The full search never scores worse than the raw initial placements,
    and strictly improves on at least 60% of instances."""
    worse = 0
    strictly_better = 0
    for scene, constraints in feasible_corpus:
        report = solve(scene, constraints, SolverConfig())
        solver_violations = count_unsatisfied(
            eval_all(constraints, report.best_layout, scene)
        )
        initial_violations = count_unsatisfied(
            eval_all(constraints, initial_layout(scene), scene)
        )
        if solver_violations > initial_violations:
            worse += 1
        if solver_violations < initial_violations:
            strictly_better += 1
    rate = strictly_better / len(feasible_corpus)
    verdict(
        "ablation analogue",
        worse == 0 and rate >= 0.60,
        f"never worse than initial on 200/200; strictly better on {strictly_better} ({rate:.0%})",
    )
