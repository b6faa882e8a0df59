"""Witness frame field on the 2-skeleton, built from a solved system.

Vertices get frames (boundary ones keep the input field, interior ones
copy their tree parent), edges get frame paths (boundary edges sample the
input field, tree edges interpolate, component entry edges splice in the
transport and the solved conjugator, remaining edges route through the
anchor with a loop representing their solved value), and interior 2-cells
are filled by contracting the lifted boundary loop along great circles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cwcomplex import CWComplex
from .group import OctaGroup, octa_group
from .holonomy import (
    BasepointTransport,
    DensityError,
    FramePath,
    chain_frames,
    class_loop,
    loop_class,
    quat_conj,
    quat_mul,
    slerp,
    vertex_chain_path,
    _orthogonal_unit,
)
from .system import Assignment
from .trees import SpanningTreeData

FILL_RINGS = 12
ANTIPODE_GUARD = 1e-3
ANTIPODE_PUSH = 1e-2


class ContractError(ValueError):
    """Boundary loop of a 2-cell lifted open; it cannot be filled."""

    def __init__(self, message: str, face: int = -1):
        super().__init__(message)
        self.face = face


@dataclass
class SkeletonField:
    vertex_frames: dict[int, np.ndarray]
    edge_paths: dict[int, FramePath]  # stored in the edge's canonical direction
    face_fills: dict[int, np.ndarray] = field(default_factory=dict)  # (rings, samples, 4)


def _cancel_backtracks(samples: np.ndarray) -> np.ndarray:
    """Remove exact back-and-forth excursions (a, b, a -> a)."""
    stack: list[np.ndarray] = []
    for s in samples:
        if len(stack) >= 2 and np.array_equal(stack[-2], s):
            stack.pop()
        else:
            stack.append(s)
    return np.stack(stack)


def _edge_path_samples(fld: SkeletonField, eid: int, direction: int) -> np.ndarray:
    p = fld.edge_paths[eid].samples
    return p if direction > 0 else p[::-1]


def tree_path_samples(cw, tree, fld: SkeletonField, v: int, w: int) -> np.ndarray:
    """Concatenated edge-path samples along the tree path v -> w."""
    parts = []
    for eid, direction in tree.simple_path(v, w):
        parts.append(_edge_path_samples(fld, eid, direction))
    if not parts:
        return fld.vertex_frames[v].reshape(1, 4)
    return np.concatenate(parts)


def assign_vertices_and_edges(
    cw: CWComplex,
    tree: SpanningTreeData,
    assignment: Assignment,
    transport: BasepointTransport,
    boundary_field: dict[int, np.ndarray],
    group: OctaGroup | None = None,
    eps: float | None = None,
) -> SkeletonField:
    group = group or octa_group()
    eps = group.default_epsilon if eps is None else eps
    anchor = transport.anchor

    frames: dict[int, np.ndarray] = {}
    for v in sorted(cw.vertices, key=lambda x: tree.depth[x]):
        if cw.vertices[v].on_boundary:
            frames[v] = np.array(boundary_field[v], dtype=float)
        else:
            parent = tree.parent[v]
            frames[v] = np.array(frames[parent[0]], dtype=float)

    fld = SkeletonField(vertex_frames=frames, edge_paths={})
    special = {
        eid: j
        for j, eid in enumerate(tree.entry_edges)
        if j != 0 and eid is not None
    }

    # boundary edges reproduce the input field along their support chains
    for eid in sorted(cw.edges):
        e = cw.edges[eid]
        if e.on_boundary:
            fld.edge_paths[eid] = vertex_chain_path(e.support, boundary_field, eps, group)

    # plain interior tree edges: geodesic between endpoint frames (constant
    # wherever a frame was propagated by copy)
    for eid in sorted(tree.tree_edges):
        e = cw.edges[eid]
        if e.on_boundary or eid in special:
            continue
        fld.edge_paths[eid] = chain_frames([frames[e.u], frames[e.v]], eps, group)

    # component entry edges, in component order: transport, solved
    # conjugator loop, then back down the already-built tree path
    for j, eid in sorted(special.items(), key=lambda kv: kv[1]):
        e = cw.edges[eid]
        b_j = tree.basepoints[j]
        u_j = e.other(b_j)
        x_j = assignment.component_vars[j]
        conj_loop = class_loop(anchor, x_j, group, eps)
        down = tree_path_samples(cw, tree, fld, u_j, tree.root)[::-1]
        samples = _cancel_backtracks(
            np.concatenate([transport.paths[j].samples, conj_loop.samples, down])
        )
        if e.u != b_j:
            samples = samples[::-1]
        fld.edge_paths[eid] = FramePath(samples)

    # interior non-tree edges: up to the anchor, value loop, back down
    for eid in sorted(tree.interior_nontree_edges()):
        e = cw.edges[eid]
        y = assignment.edge_vars[eid]
        up = tree_path_samples(cw, tree, fld, e.u, tree.root)
        loop = class_loop(anchor, y, group, eps)
        down = tree_path_samples(cw, tree, fld, e.v, tree.root)[::-1]
        samples = _cancel_backtracks(np.concatenate([up, loop.samples, down]))
        fld.edge_paths[eid] = FramePath(samples)

    return fld


# ----------------------------------------------------------------------
# 2-cell fills


def lift_samples(samples: np.ndarray, start: np.ndarray, group: OctaGroup, eps: float) -> np.ndarray:
    """Full lifted polyline of a frame path (not just its endpoint)."""
    out = np.empty_like(samples)
    prev = np.asarray(start, dtype=float)
    for i in range(samples.shape[0]):
        fiber = quat_mul(group.float_quats, samples[i])
        dists = np.linalg.norm(fiber - prev, axis=1)
        hits = np.nonzero(dists < eps)[0]
        if hits.size != 1:
            raise DensityError(
                f"{'no' if hits.size == 0 else 'ambiguous'} fiber point at sample {i}",
                index=i,
            )
        prev = fiber[hits[0]]
        out[i] = prev
    return out


def face_loop(cw: CWComplex, fld: SkeletonField, fid: int) -> FramePath:
    """Boundary loop of a face: its edge paths concatenated in cycle order."""
    parts = [
        _edge_path_samples(fld, eid, sign) for eid, sign in cw.faces[fid].cycle
    ]
    return FramePath(np.concatenate(parts), closed=True)


def fill_two_cell(
    loop: FramePath,
    group: OctaGroup | None = None,
    eps: float | None = None,
    face: int = -1,
    rings: int = FILL_RINGS,
) -> np.ndarray:
    """Disk of frames filling an identity-class loop.

    The loop lifts to a closed loop upstairs; samples near the antipode of
    the lifted basepoint are nudged aside, then every sample slides toward
    the basepoint along its great circle.  Row 0 is the input loop; the
    last row is the collapsed center.
    """
    group = group or octa_group()
    eps = group.default_epsilon if eps is None else eps
    lifted = lift_samples(loop.samples, loop.samples[0], group, eps)
    if np.linalg.norm(lifted[-1] - lifted[0]) > eps:
        raise ContractError(f"face {face}: boundary loop lifts open", face=face)
    base = lifted[0]
    anti = -base
    push_dir = _orthogonal_unit(base)
    adjusted = lifted.copy()
    for i, s in enumerate(adjusted):
        if np.linalg.norm(s - anti) < ANTIPODE_GUARD:
            moved = s + ANTIPODE_PUSH * push_dir
            adjusted[i] = moved / np.linalg.norm(moved)
    out = np.empty((rings + 1, adjusted.shape[0], 4))
    out[0] = loop.samples
    for k in range(1, rings + 1):
        t = k / rings
        for i in range(adjusted.shape[0]):
            out[k, i] = slerp(adjusted[i], base, t)
    return out


def fill_faces(cw: CWComplex, fld: SkeletonField, group=None, eps=None) -> None:
    for fid in cw.interior_faces():
        loop = face_loop(cw, fld, fid)
        fld.face_fills[fid] = fill_two_cell(loop, group, eps, face=fid)


# ----------------------------------------------------------------------
# round-trip verification


@dataclass
class FieldReport:
    face_violations: list[tuple[int, int]] = field(default_factory=list)  # (face, class id)
    boundary_mismatches: list[int] = field(default_factory=list)
    endpoint_mismatches: list[int] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return (
            len(self.face_violations)
            + len(self.boundary_mismatches)
            + len(self.endpoint_mismatches)
        )


def verify_field(
    cw: CWComplex,
    fld: SkeletonField,
    boundary_field: dict[int, np.ndarray],
    group: OctaGroup | None = None,
    eps: float | None = None,
) -> FieldReport:
    """Necessity round trip: every face boundary must have trivial holonomy,
    the field must agree with the input on boundary vertices, and edge
    paths must start and end on their endpoint frames."""
    group = group or octa_group()
    eps = group.default_epsilon if eps is None else eps
    report = FieldReport()
    for fid in sorted(cw.faces):
        loop = face_loop(cw, fld, fid)
        cls = loop_class(loop, group, eps)
        if cls.id != 0:
            report.face_violations.append((fid, cls.id))
    for v in sorted(cw.vertices):
        if cw.vertices[v].on_boundary and not np.array_equal(
            fld.vertex_frames[v], np.asarray(boundary_field[v], dtype=float)
        ):
            report.boundary_mismatches.append(v)
    for eid in sorted(cw.edges):
        e = cw.edges[eid]
        p = fld.edge_paths[eid].samples
        for sample, vid in ((p[0], e.u), (p[-1], e.v)):
            rel = quat_mul(sample, quat_conj(fld.vertex_frames[vid]))
            _, dist = group.nearest_element(rel)
            if dist > eps:
                report.endpoint_mismatches.append(eid)
                break
    return report


# ----------------------------------------------------------------------
# field v1 format


def write_field(cw: CWComplex, fld: SkeletonField, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("field v1\n")

        def q(row):
            return f"{row[0]} {row[1]} {row[2]} {row[3]}\n"

        for vid in sorted(fld.vertex_frames):
            fh.write(f"v {vid} " + q(fld.vertex_frames[vid]))
        for eid in sorted(fld.edge_paths):
            p = fld.edge_paths[eid].samples
            fh.write(f"e {eid} {p.shape[0]}\n")
            for row in p:
                fh.write(q(row))
        for fid in sorted(fld.face_fills):
            fill = fld.face_fills[fid]
            fh.write(f"f {fid} rings {fill.shape[0]} samples {fill.shape[1]}\n")
            for ring in fill:
                for row in ring:
                    fh.write(q(row))


def load_field(path) -> SkeletonField:
    fld = SkeletonField({}, {})
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "field v1":
        raise ValueError(f"{path}: expected 'field v1' header")
    i = 1

    def quat(ln):
        return np.array([float(x) for x in ln.split()])

    while i < len(lines):
        parts = lines[i].split()
        if parts[0] == "v":
            fld.vertex_frames[int(parts[1])] = np.array([float(x) for x in parts[2:]])
            i += 1
        elif parts[0] == "e":
            n = int(parts[2])
            rows = [quat(lines[i + 1 + k]) for k in range(n)]
            fld.edge_paths[int(parts[1])] = FramePath(np.stack(rows))
            i += 1 + n
        elif parts[0] == "f":
            rings, samples = int(parts[3]), int(parts[5])
            rows = [quat(lines[i + 1 + k]) for k in range(rings * samples)]
            fld.face_fills[int(parts[1])] = np.stack(rows).reshape(rings, samples, 4)
            i += 1 + rings * samples
        else:
            raise ValueError(f"{path}: unknown record {parts[0]!r}")
    return fld
