"""Tetrahedral mesh and singularity graph input, with validation.

File formats:

    tetmesh v1
    vertices N
    x y z            (N lines)
    tets M
    a b c d          (M lines, 0-based vertex ids)

    singgraph v1
    nodes K
    <vertex_id> [b|i]          (K lines; the b/i flag is optional)
    edges L
    ni nj k : v0 v1 ... vn     (L lines; k = index numerator over 4, or ?)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations


class MeshError(ValueError):
    pass


class GraphError(ValueError):
    pass


@dataclass
class TetMesh:
    vertices: list[tuple[float, float, float]]
    tets: list[tuple[int, int, int, int]]
    boundary_triangles: set[frozenset[int]] = field(default_factory=set)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def edges(self) -> set[tuple[int, int]]:
        out = set()
        for tet in self.tets:
            for a, b in combinations(tet, 2):
                out.add((min(a, b), max(a, b)))
        return out

    def triangles(self) -> dict[frozenset[int], list[int]]:
        """Triangle -> incident tet indices."""
        tris: dict[frozenset[int], list[int]] = {}
        for ti, tet in enumerate(self.tets):
            for tri in combinations(tet, 3):
                tris.setdefault(frozenset(tri), []).append(ti)
        return tris

    def boundary_vertices(self) -> set[int]:
        out = set()
        for tri in self.boundary_triangles:
            out.update(tri)
        return out


def validate_mesh(mesh: TetMesh) -> None:
    """Check distinct-vertex tets, manifold triangles, connectivity."""
    nv = mesh.n_vertices
    for ti, tet in enumerate(mesh.tets):
        if len(set(tet)) != 4:
            raise MeshError(f"tet {ti} has repeated vertices: {tet}")
        if any(v < 0 or v >= nv for v in tet):
            raise MeshError(f"tet {ti} references a vertex outside [0,{nv})")
    tris = mesh.triangles()
    for tri, owners in tris.items():
        if len(owners) > 2:
            raise MeshError(
                f"non-manifold: triangle {sorted(tri)} shared by {len(owners)} tets"
            )
    mesh.boundary_triangles = {t for t, owners in tris.items() if len(owners) == 1}

    if not mesh.tets:
        raise MeshError("mesh has no tets")
    seen = {0}
    stack = [0]
    by_tri = {t: owners for t, owners in tris.items() if len(owners) == 2}
    adj: dict[int, list[int]] = {}
    for owners in by_tri.values():
        a, b = owners
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    while stack:
        t = stack.pop()
        for nb in adj.get(t, ()):
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    if len(seen) != len(mesh.tets):
        raise MeshError("mesh is disconnected")


def load_tet_mesh(path) -> TetMesh:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    idx = 0

    def expect(what):
        nonlocal idx
        while idx < len(lines) and (not lines[idx] or lines[idx].startswith("#")):
            idx += 1
        if idx >= len(lines):
            raise MeshError(f"{path}: unexpected end of file, wanted {what}")
        ln = lines[idx]
        idx += 1
        return ln, idx

    header, _ = expect("header")
    if header != "tetmesh v1":
        raise MeshError(f"{path}:1: expected 'tetmesh v1', got {header!r}")
    vh, lineno = expect("vertices count")
    if not vh.startswith("vertices "):
        raise MeshError(f"{path}:{lineno}: expected 'vertices N'")
    nv = int(vh.split()[1])
    verts = []
    for _ in range(nv):
        ln, lineno = expect("vertex line")
        parts = ln.split()
        if len(parts) != 3:
            raise MeshError(f"{path}:{lineno}: expected 'x y z'")
        verts.append(tuple(float(p) for p in parts))
    th, lineno = expect("tets count")
    if not th.startswith("tets "):
        raise MeshError(f"{path}:{lineno}: expected 'tets M'")
    nt = int(th.split()[1])
    tets = []
    for _ in range(nt):
        ln, lineno = expect("tet line")
        parts = ln.split()
        if len(parts) != 4:
            raise MeshError(f"{path}:{lineno}: expected 'a b c d'")
        tets.append(tuple(int(p) for p in parts))
    mesh = TetMesh(verts, tets)
    validate_mesh(mesh)
    return mesh


def save_tet_mesh(mesh: TetMesh, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("tetmesh v1\n")
        fh.write(f"vertices {mesh.n_vertices}\n")
        for v in mesh.vertices:
            fh.write(f"{v[0]} {v[1]} {v[2]}\n")
        fh.write(f"tets {len(mesh.tets)}\n")
        for t in mesh.tets:
            fh.write(f"{t[0]} {t[1]} {t[2]} {t[3]}\n")


@dataclass
class GraphEdge:
    nodes: tuple[int, int]
    path: tuple[int, ...]  # mesh vertex ids, path[0] and path[-1] are the nodes
    index: Fraction | None = None  # multiple of 1/4, or unknown


@dataclass
class SingularityGraph:
    """Embedded graph of singular mesh edges; may be empty."""

    nodes: list[int]
    edges: list[GraphEdge]
    node_flags: dict[int, str] = field(default_factory=dict)  # 'b' or 'i' if given

    def vertex_set(self) -> set[int]:
        out = set(self.nodes)
        for e in self.edges:
            out.update(e.path)
        return out

    def edge_segments(self) -> set[tuple[int, int]]:
        segs = set()
        for e in self.edges:
            for a, b in zip(e.path, e.path[1:]):
                segs.add((min(a, b), max(a, b)))
        return segs

    def incident_edges(self, node: int) -> list[int]:
        return [i for i, e in enumerate(self.edges) if node in e.nodes]

    @staticmethod
    def empty() -> "SingularityGraph":
        return SingularityGraph([], [])


def validate_graph(graph: SingularityGraph, mesh: TetMesh) -> None:
    """Graph must be a subcomplex of the mesh 1-skeleton with the standing
    assumptions: leaf nodes on the boundary, non-leaf nodes interior, edge
    paths vertex-disjoint except at shared nodes, no isolated nodes."""
    mesh_edges = mesh.edges()
    boundary = mesh.boundary_vertices()
    node_set = set(graph.nodes)
    for gi, e in enumerate(graph.edges):
        if len(e.path) < 2:
            raise GraphError(f"graph edge {gi} has a trivial path")
        if e.path[0] != e.nodes[0] or e.path[-1] != e.nodes[1]:
            raise GraphError(f"graph edge {gi}: path endpoints do not match its nodes")
        for a, b in zip(e.path, e.path[1:]):
            if (min(a, b), max(a, b)) not in mesh_edges:
                raise GraphError(f"graph edge {gi}: segment {a}-{b} is not a mesh edge")
        for v in e.path[1:-1]:
            if v in node_set:
                raise GraphError(f"graph edge {gi}: interior path vertex {v} is a node")
            if v in boundary:
                raise GraphError(
                    f"graph edge {gi}: interior path vertex {v} lies on the mesh boundary"
                )
    seen_interior: set[int] = set()
    for gi, e in enumerate(graph.edges):
        interior = set(e.path[1:-1])
        overlap = interior & seen_interior
        if overlap:
            raise GraphError(f"graph edges overlap at vertices {sorted(overlap)}")
        seen_interior |= interior
    for node in graph.nodes:
        degree = len(graph.incident_edges(node))
        if degree == 0:
            raise GraphError(f"node {node} is isolated")
        if degree == 1 and node not in boundary:
            raise GraphError(f"leaf node {node} is not on the mesh boundary")
        if degree > 1 and node in boundary:
            raise GraphError(f"interior branch: node {node} on the boundary has degree {degree}")


def load_singularity_graph(path) -> SingularityGraph:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.strip().startswith("#")]
    if not lines or lines[0] != "singgraph v1":
        raise GraphError(f"{path}: expected 'singgraph v1' header")
    if len(lines) < 2 or not lines[1].startswith("nodes "):
        raise GraphError(f"{path}: expected 'nodes K'")
    k = int(lines[1].split()[1])
    nodes = []
    flags = {}
    for ln in lines[2 : 2 + k]:
        parts = ln.split()
        vid = int(parts[0])
        nodes.append(vid)
        if len(parts) > 1:
            if parts[1] not in ("b", "i"):
                raise GraphError(f"{path}: node flag must be 'b' or 'i', got {parts[1]!r}")
            flags[vid] = parts[1]
    pos = 2 + k
    if pos >= len(lines) or not lines[pos].startswith("edges "):
        raise GraphError(f"{path}: expected 'edges L'")
    ne = int(lines[pos].split()[1])
    edges = []
    for ln in lines[pos + 1 : pos + 1 + ne]:
        head, _, tail = ln.partition(":")
        hp = head.split()
        if len(hp) != 3:
            raise GraphError(f"{path}: expected 'ni nj k : path', got {ln!r}")
        ni, nj = int(hp[0]), int(hp[1])
        index = None if hp[2] == "?" else Fraction(int(hp[2]), 4)
        pathv = tuple(int(p) for p in tail.split())
        edges.append(GraphEdge((ni, nj), pathv, index))
    return SingularityGraph(nodes, edges, flags)


def save_singularity_graph(graph: SingularityGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("singgraph v1\n")
        fh.write(f"nodes {len(graph.nodes)}\n")
        for n in graph.nodes:
            flag = graph.node_flags.get(n)
            fh.write(f"{n} {flag}\n" if flag else f"{n}\n")
        fh.write(f"edges {len(graph.edges)}\n")
        for e in graph.edges:
            k = "?" if e.index is None else str(int(e.index * 4))
            pathv = " ".join(str(v) for v in e.path)
            fh.write(f"{e.nodes[0]} {e.nodes[1]} {k} : {pathv}\n")
