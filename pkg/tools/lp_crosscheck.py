#!/usr/bin/env python3
"""Cross-validate emitted LP files against an external ILP solver.

Manual developer harness, not part of the test suite.  For each checked
request it emits the LP text, re-parses that text, solves the 0-1 model
with an independent solver, and compares the optimum to the in-process
enumeration solver (tolerance 1e-6).

Backends:
  * scipy's MILP interface (HiGHS), used by default when scipy is
    installed;
  * glpsol, when --glpsol is given and the binary is on PATH (the LP
    files are written to a temp dir and solved via ``glpsol --lp``).

Usage:
  python tools/lp_crosscheck.py                   # 200 random + 50 paper requests
  python tools/lp_crosscheck.py --random 500
  python tools/lp_crosscheck.py --glpsol
"""

from __future__ import annotations

import argparse
import random
import re
import subprocess
import sys
import tempfile
from pathlib import Path

from edge_placer.lp_export import build_ilp, to_lp_text
from edge_placer.model import (
    DeviceClass,
    FleetSpec,
    LinkSpec,
    TierSpec,
    TopologySpec,
    build_topology,
)
from edge_placer.pricing import AppType, AppVariant
from edge_placer.scenario import paper_scenario
from edge_placer.simulator import PatternKind, generate_requests
from edge_placer.solver import (
    Bound,
    PlacementRequest,
    Requirement,
    RequirementKind,
    ResidualState,
    apply_placement,
    solve_request,
    solve_with_escalation,
)

_NAME = r"[A-Za-z][A-Za-z0-9_]*"
_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_TERM_RE = re.compile(rf"^({_NUM}) ({_NAME})$")


def parse_lp_text(text):
    lines = text.splitlines()
    i = 0
    while lines[i].startswith("\\"):
        i += 1
    assert lines[i] == "Minimize"
    body = re.match(r"^ obj: (.+)$", lines[i + 1]).group(1)

    def terms(chunked):
        out = []
        for chunk in re.split(r" (?=[+-] )", chunked):
            sign = 1.0
            if chunk.startswith("+ "):
                chunk = chunk[2:]
            elif chunk.startswith("- "):
                sign, chunk = -1.0, chunk[2:]
            match = _TERM_RE.match(chunk)
            out.append((match.group(2), sign * float(match.group(1))))
        return out

    objective = terms(body)
    i += 2
    assert lines[i] == "Subject To"
    i += 1
    rows = []
    row_re = re.compile(rf"^ ({_NAME}): (.+) (<=|=) ({_NUM})$")
    while lines[i] != "Binary":
        match = row_re.match(lines[i])
        rows.append((match.group(1), terms(match.group(2)), match.group(3), float(match.group(4))))
        i += 1
    i += 1
    binaries = []
    while lines[i] != "End":
        binaries.append(lines[i].strip())
        i += 1
    return objective, rows, binaries


def solve_with_scipy(text):
    import numpy as np
    from scipy.optimize import LinearConstraint, milp

    objective, rows, binaries = parse_lp_text(text)
    if not binaries:
        return None
    index = {var: i for i, var in enumerate(binaries)}
    cost = np.zeros(len(binaries))
    for var, coef in objective:
        cost[index[var]] = coef
    constraints = []
    for _, terms, sense, rhs in rows:
        row = np.zeros(len(binaries))
        for var, coef in terms:
            if var in index:
                row[index[var]] = coef
        constraints.append(LinearConstraint(row, lb=rhs if sense == "=" else -np.inf, ub=rhs))
    result = milp(c=cost, constraints=constraints, integrality=np.ones(len(binaries)), bounds=(0, 1))
    return result.fun if result.success else None


def solve_with_glpsol(text):
    with tempfile.TemporaryDirectory() as tmp:
        lp_path = Path(tmp) / "model.lp"
        out_path = Path(tmp) / "model.sol"
        lp_path.write_text(text, encoding="utf-8")
        proc = subprocess.run(
            ["glpsol", "--lp", str(lp_path), "-o", str(out_path)],
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            raise RuntimeError(f"glpsol failed: {proc.stderr}")
        solution = out_path.read_text(encoding="utf-8")
    if "INTEGER OPTIMAL" not in solution.upper():
        return None
    match = re.search(r"Objective:\s+obj\s*=\s*([-\d.eE+]+)", solution)
    if not match:
        raise RuntimeError("could not find objective value in glpsol output")
    return float(match.group(1))


def expected_objective(topology, state, request, bound):
    placement = solve_request(topology, state, request, bound)
    if placement is None:
        return None
    return placement.response_time if bound.kind is RequirementKind.COST_CAP else placement.price


def random_instance(rng):
    classes = list(DeviceClass)

    def fleet():
        return tuple(
            FleetSpec(cls, 1, rng.uniform(1.0, 20.0), rng.uniform(0.0, 50000.0))
            for cls in classes
            if rng.random() < 0.55
        )

    users = rng.randint(1, 2)
    topology = build_topology(
        TopologySpec(
            cloud=TierSpec(sites=1, fleet=fleet()),
            carrier=TierSpec(sites=1, fleet=fleet()),
            user=TierSpec(sites=users, fleet=fleet()),
            input_nodes=users,
            user_carrier_link=LinkSpec(rng.uniform(1.0, 10.0), rng.uniform(0.0, 10000.0)),
            carrier_cloud_link=LinkSpec(rng.uniform(1.0, 10.0), rng.uniform(0.0, 10000.0)),
        )
    )
    variants = tuple(
        AppVariant(cls, rng.uniform(0.5, 30.0), rng.uniform(0.5, 25.0))
        for cls in classes
        if rng.random() < 0.7
    ) or (AppVariant(DeviceClass.CPU, 5.0, 5.0),)
    app = AppType("probe", rng.uniform(0.0, 2.0), rng.uniform(0.5, 5.0), variants)
    state = ResidualState.fresh(topology)
    for key in state.device_remaining:
        if rng.random() < 0.4:
            state.device_remaining[key] *= rng.random()
    if rng.random() < 0.5:
        bound = Bound(RequirementKind.COST_CAP, rng.uniform(100.0, 40000.0))
    else:
        bound = Bound(RequirementKind.DEADLINE, rng.uniform(0.5, 40.0))
    input_id = sorted(topology.input_nodes)[0]
    request = PlacementRequest(
        id=1, app=app, input_node=topology.input_nodes[input_id],
        requirement=Requirement(bound.kind, (bound.value,)),
    )
    return topology, state, request, bound


def check(solve_external, text, expected, label, failures):
    external = solve_external(text)
    if expected is None and external is None:
        return
    if expected is None or external is None or abs(external - expected) > 1e-6:
        failures.append(f"{label}: external={external} expected={expected}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--random", type=int, default=200, help="random small instances")
    parser.add_argument("--paper-requests", type=int, default=50, help="sampled paper-run requests")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--glpsol", action="store_true", help="use the glpsol binary instead of scipy")
    args = parser.parse_args()

    solve_external = solve_with_glpsol if args.glpsol else solve_with_scipy
    failures: list[str] = []

    rng = random.Random(args.seed)
    for trial in range(args.random):
        topology, state, request, bound = random_instance(rng)
        text = to_lp_text(build_ilp(topology, state, request, bound))
        check(solve_external, text, expected_objective(topology, state, request, bound),
              f"random {trial}", failures)

    scenario = paper_scenario()
    topology = build_topology(scenario.topology_spec())
    state = ResidualState.fresh(topology)
    stream = generate_requests(
        scenario, PatternKind.PATTERN1, args.paper_requests * 10, args.seed, topology=topology
    )
    sampled = 0
    for request in stream:
        if request.id % 10 == 0 and sampled < args.paper_requests:
            bound = request.requirement.ladder()[0]
            text = to_lp_text(build_ilp(topology, state, request, bound))
            check(solve_external, text, expected_objective(topology, state, request, bound),
                  f"paper request {request.id}", failures)
            sampled += 1
        outcome = solve_with_escalation(topology, state, request)
        if outcome.placed:
            apply_placement(state, outcome.placement)

    total = args.random + sampled
    if failures:
        print(f"{len(failures)}/{total} mismatches:")
        for failure in failures[:20]:
            print("  " + failure)
        return 1
    print(f"all {total} instances match the external solver within 1e-6")
    return 0


if __name__ == "__main__":
    sys.exit(main())
