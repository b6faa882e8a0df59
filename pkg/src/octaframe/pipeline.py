"""End-to-end pipeline: carve, merge, tree, classes, system, solve, extend.

Used by the CLI and by merge-consistency checks.  Inputs may be in-memory
objects or file paths; reports are JSON-ready dicts that are byte-stable
for identical inputs apart from the timing block.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import cwcomplex, holonomy, system as system_mod
from .cwcomplex import CWComplex
from .extend import SkeletonField, assign_vertices_and_edges, fill_faces, verify_field
from .group import octa_group
from .holonomy import BasepointTransport, load_frames, load_transport
from .mesh import SingularityGraph, TetMesh, load_singularity_graph, load_tet_mesh
from .trees import SpanningTreeData, build_constrained_tree


class InputError(ValueError):
    pass


@dataclass
class RunReport:
    inputs: dict = field(default_factory=dict)
    counts_before: tuple = ()
    counts_after: tuple = ()
    boundary_components: int = 0
    euler: int = 0
    boundary_euler: list = field(default_factory=list)
    interior_face_count: int = 0
    variables: dict = field(default_factory=dict)
    classes: dict = field(default_factory=dict)  # edge id -> group element id
    verdict: str = ""
    witness: dict | None = None
    conflict: dict | None = None
    search_nodes: int = 0
    field_violations: int | None = None
    timing: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "report": "report_v1",
            "inputs": self.inputs,
            "cells_before_merge": list(self.counts_before),
            "cells_after_merge": list(self.counts_after),
            "boundary_components": self.boundary_components,
            "euler_characteristic": self.euler,
            "boundary_euler": self.boundary_euler,
            "interior_faces": self.interior_face_count,
            "variables": self.variables,
            "constraint_classes": {str(k): v for k, v in sorted(self.classes.items())},
            "verdict": self.verdict,
            "witness": self.witness,
            "conflict": self.conflict,
            "search_nodes": self.search_nodes,
        }
        if self.field_violations is not None:
            out["field_violations"] = self.field_violations
        out["timing"] = self.timing
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


@dataclass
class RunContext:
    mesh: TetMesh
    graph: SingularityGraph
    frames: dict[int, np.ndarray]
    carved: CWComplex
    cw: CWComplex
    tree: SpanningTreeData
    transport: BasepointTransport
    classes: dict
    system: system_mod.MonomialSystem
    result: system_mod.SolveResult
    report: RunReport
    field: SkeletonField | None = None


def _digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _load_inputs(mesh, graph, frames, report: RunReport):
    if isinstance(mesh, (str,)) or hasattr(mesh, "__fspath__"):
        report.inputs["mesh"] = _digest(mesh)
        mesh = load_tet_mesh(mesh)
    if graph is None:
        graph = SingularityGraph.empty()
    elif isinstance(graph, str) or hasattr(graph, "__fspath__"):
        report.inputs["graph"] = _digest(graph)
        graph = load_singularity_graph(graph)
    if isinstance(frames, str) or hasattr(frames, "__fspath__"):
        report.inputs["frames"] = _digest(frames)
        frames = load_frames(frames)
    return mesh, graph, frames


def run_check(
    mesh,
    graph,
    frames,
    merge: bool = True,
    eps: float | None = None,
    max_nodes: int = system_mod.DEFAULT_NODE_CAP,
    transport_path=None,
    dump_system_path=None,
) -> RunContext:
    group = octa_group()
    eps = group.default_epsilon if eps is None else eps
    report = RunReport()
    timer = time.perf_counter
    t0 = timer()
    mesh, graph, frames = _load_inputs(mesh, graph, frames, report)
    report.timing["load"] = timer() - t0

    t0 = timer()
    carved = cwcomplex.carve(mesh, graph)
    report.counts_before = carved.cell_counts()
    report.timing["carve"] = timer() - t0

    missing = [
        v
        for v in sorted(carved.vertices)
        if carved.vertices[v].on_boundary and v not in frames
    ]
    if missing:
        raise InputError(f"no frame given for boundary vertices {missing[:8]}...")

    t0 = timer()
    cw = cwcomplex.merge_cells(carved) if merge else carved
    report.counts_after = cw.cell_counts()
    report.boundary_components = len(cw.boundary_components)
    report.euler = cw.euler_characteristic()
    report.boundary_euler = [
        cw.boundary_euler(i) for i in range(len(cw.boundary_components))
    ]
    report.timing["merge"] = timer() - t0

    t0 = timer()
    tree = build_constrained_tree(cw)
    report.timing["tree"] = timer() - t0

    t0 = timer()
    basepoint_frames = {
        i: frames[b] for i, b in enumerate(tree.basepoints)
    }
    if transport_path is not None:
        transport = load_transport(transport_path, basepoint_frames[0])
        report.inputs["transport"] = _digest(transport_path)
    else:
        transport = BasepointTransport.default(basepoint_frames, eps, group)
    classes = holonomy.constraint_classes(cw, tree, frames, transport, group, eps)
    report.classes = {eid: g.id for eid, g in classes.items()}
    report.timing["classes"] = timer() - t0

    t0 = timer()
    sys = system_mod.build_system(cw, tree, classes, group)
    report.interior_face_count = len(sys.equations)
    report.variables = sys.stats()
    if dump_system_path is not None:
        with open(dump_system_path, "w", encoding="utf-8") as fh:
            fh.write(system_mod.dump_system(sys))
    report.timing["build_system"] = timer() - t0

    t0 = timer()
    result = system_mod.solve(sys, max_nodes=max_nodes)
    report.verdict = result.verdict
    report.search_nodes = result.nodes
    if result.assignment is not None:
        report.witness = {
            "component_vars": {
                str(i): g.id for i, g in sorted(result.assignment.component_vars.items())
            },
            "edge_vars": {
                str(e): g.id for e, g in sorted(result.assignment.edge_vars.items())
            },
        }
    if result.conflict is not None:
        report.conflict = {"face": result.conflict[0], "value": result.conflict[1]}
    report.timing["solve"] = timer() - t0

    return RunContext(
        mesh=mesh,
        graph=graph,
        frames=frames,
        carved=carved,
        cw=cw,
        tree=tree,
        transport=transport,
        classes=classes,
        system=sys,
        result=result,
        report=report,
    )


def run_extend(
    mesh,
    graph,
    frames,
    merge: bool = True,
    eps: float | None = None,
    max_nodes: int = system_mod.DEFAULT_NODE_CAP,
    transport_path=None,
    dump_system_path=None,
) -> RunContext:
    ctx = run_check(
        mesh, graph, frames, merge, eps, max_nodes, transport_path, dump_system_path
    )
    if ctx.result.verdict != "solvable":
        return ctx
    group = octa_group()
    eps = group.default_epsilon if eps is None else eps
    timer = time.perf_counter
    t0 = timer()
    fld = assign_vertices_and_edges(
        ctx.cw, ctx.tree, ctx.result.assignment, ctx.transport, ctx.frames, group, eps
    )
    fill_faces(ctx.cw, fld, group, eps)
    ctx.report.timing["extend"] = timer() - t0

    t0 = timer()
    rep = verify_field(ctx.cw, fld, ctx.frames, group, eps)
    ctx.report.field_violations = rep.violations
    ctx.report.timing["verify"] = timer() - t0
    ctx.field = fld
    return ctx
