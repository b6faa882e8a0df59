"""Regular CW complexes from tet meshes: carving and cell merging.

Carving removes the closed star of a singularity graph from a tet mesh and
keeps the subcomplex generated by the surviving tets.  Merging simplifies
the complex while keeping it regular: 3-cells merge across disk patches,
interior 2-cells with the same two owners merge across a shared edge path,
and edge paths with identical incidence collapse to single edges.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

from .mesh import GraphError, MeshError, SingularityGraph, TetMesh


class CarveError(ValueError):
    pass


class RegularityError(ValueError):
    pass


@dataclass
class Vertex:
    id: int
    on_boundary: bool = False
    component: int | None = None


@dataclass
class Edge:
    id: int
    u: int
    v: int
    support: tuple[int, ...]
    on_boundary: bool = False
    component: int | None = None

    def direction(self) -> tuple[int, int]:
        return (self.u, self.v)

    def other(self, w: int) -> int:
        return self.v if w == self.u else self.u


@dataclass
class Face:
    id: int
    cycle: tuple[tuple[int, int], ...]  # (edge id, +1/-1) following the walk
    on_boundary: bool = False
    tube_wall: bool = False
    component: int | None = None


@dataclass
class Cell:
    id: int
    faces: frozenset[int]


@dataclass
class BoundaryComponent:
    index: int
    vertices: set[int]
    edges: set[int]
    faces: set[int]


class CWComplex:
    def __init__(self):
        self.vertices: dict[int, Vertex] = {}
        self.edges: dict[int, Edge] = {}
        self.faces: dict[int, Face] = {}
        self.cells: dict[int, Cell] = {}
        self.boundary_components: list[BoundaryComponent] = []
        self._next_id = 0
        # derived incidence
        self.edge_faces: dict[int, set[int]] = {}
        self.face_cells: dict[int, list[int]] = {}
        self.vertex_edges: dict[int, set[int]] = {}
        self.vertex_faces: dict[int, set[int]] = {}

    # -- construction ------------------------------------------------------

    def fresh_id(self) -> int:
        self._next_id += 1
        return self._next_id - 1

    def bump_ids(self, floor: int) -> None:
        self._next_id = max(self._next_id, floor)

    def face_walk(self, fid: int) -> list[int]:
        """Vertex walk of a face cycle (one vertex per edge, in order)."""
        walk = []
        for eid, sign in self.faces[fid].cycle:
            e = self.edges[eid]
            walk.append(e.u if sign > 0 else e.v)
        return walk

    def rebuild(self) -> None:
        """Recompute incidence maps and boundary data from the cell dicts."""
        self.edge_faces = {eid: set() for eid in self.edges}
        self.vertex_edges = {vid: set() for vid in self.vertices}
        self.vertex_faces = {vid: set() for vid in self.vertices}
        self.face_cells = {fid: [] for fid in self.faces}
        for e in self.edges.values():
            self.vertex_edges[e.u].add(e.id)
            self.vertex_edges[e.v].add(e.id)
        for f in self.faces.values():
            for eid, _ in f.cycle:
                self.edge_faces[eid].add(f.id)
            for v in self.face_walk(f.id):
                self.vertex_faces[v].add(f.id)
        for c in self.cells.values():
            for fid in c.faces:
                self.face_cells[fid].append(c.id)
        self._classify_boundary()

    def _classify_boundary(self) -> None:
        for f in self.faces.values():
            owners = self.face_cells[f.id]
            if self.cells:
                f.on_boundary = len(owners) == 1
        boundary_faces = {f.id for f in self.faces.values() if f.on_boundary}
        for e in self.edges.values():
            e.on_boundary = any(fid in boundary_faces for fid in self.edge_faces[e.id])
        for v in self.vertices.values():
            v.on_boundary = any(self.edges[eid].on_boundary for eid in self.vertex_edges[v.id])
        # connected components of the boundary surface, by shared edges
        parent: dict[int, int] = {fid: fid for fid in boundary_faces}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for eid, fids in self.edge_faces.items():
            bf = [f for f in fids if f in boundary_faces]
            for a, b in zip(bf, bf[1:]):
                parent[find(a)] = find(b)
        groups: dict[int, set[int]] = {}
        for fid in boundary_faces:
            groups.setdefault(find(fid), set()).add(fid)
        comps = []
        for fids in groups.values():
            verts: set[int] = set()
            edges: set[int] = set()
            for fid in fids:
                verts.update(self.face_walk(fid))
                edges.update(eid for eid, _ in self.faces[fid].cycle)
            comps.append((min(verts), verts, edges, fids))
        comps.sort(key=lambda c: c[0])
        self.boundary_components = [
            BoundaryComponent(i, v, e, f) for i, (_, v, e, f) in enumerate(comps)
        ]
        for v in self.vertices.values():
            v.component = None
        for e in self.edges.values():
            e.component = None
        for f in self.faces.values():
            f.component = None
        for comp in self.boundary_components:
            for vid in comp.vertices:
                self.vertices[vid].component = comp.index
            for eid in comp.edges:
                self.edges[eid].component = comp.index
            for fid in comp.faces:
                self.faces[fid].component = comp.index

    # -- queries -----------------------------------------------------------

    def interior_faces(self) -> list[int]:
        """The faces not lying entirely inside the boundary, sorted."""
        return sorted(f.id for f in self.faces.values() if not f.on_boundary)

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.faces) - len(self.cells)

    def boundary_euler(self, i: int) -> int:
        comp = self.boundary_components[i]
        return len(comp.vertices) - len(comp.edges) + len(comp.faces)

    def cell_counts(self) -> tuple[int, int, int, int]:
        return (len(self.vertices), len(self.edges), len(self.faces), len(self.cells))

    # -- validation ----------------------------------------------------------

    def validate(self) -> None:
        for e in self.edges.values():
            if e.u == e.v:
                raise RegularityError(f"edge {e.id} is a loop at vertex {e.u}")
            if e.u not in self.vertices or e.v not in self.vertices:
                raise RegularityError(f"edge {e.id} references a missing vertex")
            if e.support[0] != e.u or e.support[-1] != e.v:
                raise RegularityError(f"edge {e.id} support does not match endpoints")
        for f in self.faces.values():
            if len(f.cycle) < 2:
                raise RegularityError(f"face {f.id} cycle has fewer than 2 edges")
            walk = self.face_walk(f.id)
            n = len(walk)
            for k, (eid, sign) in enumerate(f.cycle):
                e = self.edges[eid]
                a = walk[k]
                b = walk[(k + 1) % n]
                if (e.u, e.v) != ((a, b) if sign > 0 else (b, a)):
                    raise RegularityError(f"face {f.id} cycle broken at position {k}")
            if len(set(walk)) != n:
                raise RegularityError(f"face {f.id} boundary is not a simple cycle")
            if len({eid for eid, _ in f.cycle}) != n:
                raise RegularityError(f"face {f.id} repeats an edge")
        for c in self.cells.values():
            self._validate_shell(c.id, c.faces)
        for fid, owners in self.face_cells.items():
            if self.cells and len(owners) not in (1, 2):
                raise RegularityError(f"face {fid} has {len(owners)} incident 3-cells")
            if len(owners) == 2 and owners[0] == owners[1]:
                raise RegularityError(f"face {fid} lies twice on cell {owners[0]}")

    def _validate_shell(self, cid: int, fids: frozenset[int]) -> None:
        edge_count: dict[int, int] = {}
        verts: set[int] = set()
        for fid in fids:
            for eid, _ in self.faces[fid].cycle:
                edge_count[eid] = edge_count.get(eid, 0) + 1
            verts.update(self.face_walk(fid))
        for eid, cnt in edge_count.items():
            if cnt != 2:
                raise RegularityError(
                    f"cell {cid} shell edge {eid} lies on {cnt} shell faces, want 2"
                )
        chi = len(verts) - len(edge_count) + len(fids)
        if chi != 2:
            raise RegularityError(f"cell {cid} shell has Euler characteristic {chi}, want 2")
        # shell connectivity
        if fids:
            seen = {next(iter(fids))}
            stack = list(seen)
            while stack:
                f = stack.pop()
                for eid, _ in self.faces[f].cycle:
                    for g in self.edge_faces[eid]:
                        if g in fids and g not in seen:
                            seen.add(g)
                            stack.append(g)
            if seen != set(fids):
                raise RegularityError(f"cell {cid} shell is disconnected")

    def validate_boundary_manifold(self) -> None:
        """Every boundary edge on exactly 2 boundary faces; boundary vertex
        links single cycles.  Rejects carvings where the tube wall crashes
        into the outer boundary."""
        boundary_faces = {f.id for f in self.faces.values() if f.on_boundary}
        for e in self.edges.values():
            bf = [f for f in self.edge_faces[e.id] if f in boundary_faces]
            if e.on_boundary and len(bf) != 2:
                raise CarveError(
                    f"boundary edge {e.id} lies on {len(bf)} boundary faces; "
                    "carved boundary is not a closed surface"
                )
        for v in self.vertices.values():
            if not v.on_boundary:
                continue
            fids = [f for f in self.vertex_faces[v.id] if f in boundary_faces]
            # umbrella: boundary faces at v chain into one cycle through
            # boundary edges at v
            adj: dict[int, list[int]] = {f: [] for f in fids}
            for eid in self.vertex_edges[v.id]:
                if not self.edges[eid].on_boundary:
                    continue
                ef = [f for f in self.edge_faces[eid] if f in boundary_faces]
                for a, b in itertools.combinations(ef, 2):
                    adj[a].append(b)
                    adj[b].append(a)
            if not fids:
                raise CarveError(f"boundary vertex {v.id} has no boundary faces")
            seen = {fids[0]}
            stack = [fids[0]]
            while stack:
                f = stack.pop()
                for g in adj[f]:
                    if g not in seen:
                        seen.add(g)
                        stack.append(g)
            if len(seen) != len(fids):
                raise CarveError(
                    f"boundary vertex {v.id} link is pinched (tube touches boundary)"
                )


def canonical_cycle(cw: CWComplex, cycle) -> tuple[tuple[int, int], ...]:
    """Rotate/orient a face cycle: lowest vertex first, lower neighbor second."""
    cycle = list(cycle)
    n = len(cycle)
    walk = []
    for eid, sign in cycle:
        e = cw.edges[eid]
        walk.append(e.u if sign > 0 else e.v)
    start = walk.index(min(walk))
    forward = cycle[start:] + cycle[:start]
    # reversed traversal: flip signs, reverse order, rotate to keep start vertex
    rev = [(eid, -sign) for eid, sign in reversed(cycle)]
    rwalk = []
    for eid, sign in rev:
        e = cw.edges[eid]
        rwalk.append(e.u if sign > 0 else e.v)
    rstart = rwalk.index(min(walk))
    backward = rev[rstart:] + rev[:rstart]
    second_f = walk[(start + 1) % n]
    second_b = rwalk[(rstart + 1) % n]
    return tuple(forward if second_f <= second_b else backward)


# ----------------------------------------------------------------------
# building from tet meshes


def from_tet_mesh(mesh: TetMesh, kept_tets=None) -> CWComplex:
    """CW view of (a sub-mesh of) a tet mesh; kept_tets defaults to all."""
    cw = CWComplex()
    kept = list(range(len(mesh.tets))) if kept_tets is None else sorted(kept_tets)
    vset: set[int] = set()
    for ti in kept:
        vset.update(mesh.tets[ti])
    for vid in sorted(vset):
        cw.vertices[vid] = Vertex(vid)
    cw.bump_ids(max(vset, default=-1) + 1)

    edge_ids: dict[tuple[int, int], int] = {}
    tri_ids: dict[frozenset[int], int] = {}
    all_pairs = sorted(
        {
            (min(a, b), max(a, b))
            for ti in kept
            for a, b in itertools.combinations(mesh.tets[ti], 2)
        }
    )
    for u, v in all_pairs:
        eid = cw.fresh_id()
        edge_ids[(u, v)] = eid
        cw.edges[eid] = Edge(eid, u, v, (u, v))
    all_tris = sorted(
        {
            frozenset(tri)
            for ti in kept
            for tri in itertools.combinations(mesh.tets[ti], 3)
        },
        key=sorted,
    )
    for tri in all_tris:
        a, b, c = sorted(tri)
        fid = cw.fresh_id()
        tri_ids[tri] = fid
        cycle = (
            (edge_ids[(a, b)], 1),
            (edge_ids[(b, c)], 1),
            (edge_ids[(a, c)], -1),
        )
        cw.faces[fid] = Face(fid, cycle)
    for ti in kept:
        cid = cw.fresh_id()
        fids = frozenset(
            tri_ids[frozenset(tri)] for tri in itertools.combinations(mesh.tets[ti], 3)
        )
        cw.cells[cid] = Cell(cid, fids)
    cw.rebuild()
    return cw


def carve(mesh: TetMesh, graph: SingularityGraph) -> CWComplex:
    """Complex of the mesh minus the closed star of the singularity graph.

    The carved region is the union of closed stars of all graph vertices;
    what remains is the subcomplex generated by the untouched tets.  Tube
    walls (formerly interior triangles) are flagged on the result.
    """
    from .mesh import validate_graph

    validate_graph(graph, mesh)
    gverts = graph.vertex_set()
    if not gverts:
        cw = from_tet_mesh(mesh)
        cw.validate()
        cw.validate_boundary_manifold()
        return cw

    # feature of each graph vertex: a node, or the interior of one edge
    feature: dict[int, tuple[str, int]] = {}
    for n in graph.nodes:
        feature[n] = ("node", n)
    for gi, ge in enumerate(graph.edges):
        for v in ge.path[1:-1]:
            feature[v] = ("edge", gi)

    def compatible(fa, fb) -> bool:
        if fa == fb:
            return True
        kinds = {fa[0], fb[0]}
        if kinds == {"edge"}:
            na = set(graph.edges[fa[1]].nodes)
            nb = set(graph.edges[fb[1]].nodes)
            return bool(na & nb)
        if kinds == {"node", "edge"}:
            node = fa[1] if fa[0] == "node" else fb[1]
            gi = fa[1] if fa[0] == "edge" else fb[1]
            return node in graph.edges[gi].nodes
        # two nodes: fine only if a single graph edge joins them directly
        return any(set(ge.nodes) == {fa[1], fb[1]} and len(ge.path) == 2 for ge in graph.edges)

    kept = []
    for ti, tet in enumerate(mesh.tets):
        touched = sorted({feature[v] for v in tet if v in feature})
        if not touched:
            kept.append(ti)
            continue
        for fa, fb in itertools.combinations(touched, 2):
            if not compatible(fa, fb):
                raise CarveError(
                    f"tube self-intersection: tet {ti} touches {fa} and {fb}"
                )
    if not kept:
        raise CarveError("carving removed every tet")

    cw = from_tet_mesh(mesh, kept)

    # connectivity of the remainder (cells via shared faces)
    cw.rebuild()
    cells = list(cw.cells)
    seen = {cells[0]}
    stack = [cells[0]]
    while stack:
        c = stack.pop()
        for fid in cw.cells[c].faces:
            for d in cw.face_cells[fid]:
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
    if len(seen) != len(cells):
        raise CarveError("carving disconnected the mesh")

    # tube walls: boundary faces of the carved complex that were interior
    original_boundary = mesh.boundary_triangles
    for f in cw.faces.values():
        if f.on_boundary:
            tri = frozenset(
                v for eid, _ in f.cycle for v in (cw.edges[eid].u, cw.edges[eid].v)
            )
            f.tube_wall = tri not in original_boundary
    cw.validate()
    cw.validate_boundary_manifold()
    return cw


# ----------------------------------------------------------------------
# cell merging


def merge_cells(cw: CWComplex) -> CWComplex:
    """Greedy merge to a fixpoint; the result is regular and has the same
    Euler characteristic and boundary components.  3-cell merges take the
    largest shared disk patch first, ties by lowest cell ids."""
    out = _copy(cw)
    changed = True
    while changed:
        changed = False
        while _merge_one_cell_pair(out):
            changed = True
        while _merge_one_face_pair(out):
            changed = True
        while _merge_one_edge_path(out):
            changed = True
    out.rebuild()
    out.validate()
    return out


def _copy(cw: CWComplex) -> CWComplex:
    out = CWComplex()
    out.vertices = {vid: replace(v) for vid, v in cw.vertices.items()}
    out.edges = {eid: replace(e) for eid, e in cw.edges.items()}
    out.faces = {fid: replace(f) for fid, f in cw.faces.items()}
    out.cells = {cid: Cell(cid, frozenset(c.faces)) for cid, c in cw.cells.items()}
    out.bump_ids(cw._next_id)
    out.rebuild()
    return out


def _patch_is_disk(cw: CWComplex, patch: set[int]):
    """Classify a candidate shared patch.  Returns (interior_edges,
    interior_vertices, boundary_edges) or None if not a cleanly embedded
    disk."""
    edge_count: dict[int, int] = {}
    verts: set[int] = set()
    for fid in patch:
        for eid, _ in cw.faces[fid].cycle:
            edge_count[eid] = edge_count.get(eid, 0) + 1
        verts.update(cw.face_walk(fid))
    if any(cnt > 2 for cnt in edge_count.values()):
        return None
    interior_edges = {eid for eid, cnt in edge_count.items() if cnt == 2}
    boundary_edges = {eid for eid, cnt in edge_count.items() if cnt == 1}
    # interior edges must belong to the patch only
    for eid in interior_edges:
        if cw.edge_faces[eid] - patch:
            return None
    # connectivity of the patch through interior edges
    patch_list = sorted(patch)
    seen = {patch_list[0]}
    stack = [patch_list[0]]
    while stack:
        f = stack.pop()
        for eid, _ in cw.faces[f].cycle:
            if eid in interior_edges:
                for g in cw.edge_faces[eid]:
                    if g in patch and g not in seen:
                        seen.add(g)
                        stack.append(g)
    if len(seen) != len(patch):
        return None
    if len(verts) - len(edge_count) + len(patch) != 1:
        return None
    # boundary of the patch must be one simple cycle
    bverts: dict[int, int] = {}
    for eid in boundary_edges:
        e = cw.edges[eid]
        bverts[e.u] = bverts.get(e.u, 0) + 1
        bverts[e.v] = bverts.get(e.v, 0) + 1
    if not boundary_edges or any(c != 2 for c in bverts.values()):
        return None
    interior_vertices = verts - set(bverts)
    for v in interior_vertices:
        if cw.vertex_faces[v] - patch:
            return None
        if cw.vertex_edges[v] - interior_edges:
            return None
    return interior_edges, interior_vertices, boundary_edges


def _merge_one_cell_pair(cw: CWComplex) -> bool:
    shared: dict[tuple[int, int], set[int]] = {}
    for fid, owners in cw.face_cells.items():
        if len(owners) == 2:
            key = (min(owners), max(owners))
            shared.setdefault(key, set()).add(fid)
    for (c1, c2), patch in sorted(shared.items(), key=lambda kv: (-len(kv[1]), kv[0])):
        got = _patch_is_disk(cw, patch)
        if got is None:
            continue
        interior_edges, interior_vertices, _ = got
        new_shell = (cw.cells[c1].faces | cw.cells[c2].faces) - patch
        # the merged shell must be a sphere; probe before committing
        probe_edges: dict[int, int] = {}
        probe_verts: set[int] = set()
        for fid in new_shell:
            for eid, _ in cw.faces[fid].cycle:
                probe_edges[eid] = probe_edges.get(eid, 0) + 1
            probe_verts.update(cw.face_walk(fid))
        if any(c != 2 for c in probe_edges.values()):
            continue
        if len(probe_verts) - len(probe_edges) + len(new_shell) != 2:
            continue
        for fid in patch:
            del cw.faces[fid]
        for eid in interior_edges:
            del cw.edges[eid]
        for vid in interior_vertices:
            del cw.vertices[vid]
        del cw.cells[c1]
        del cw.cells[c2]
        cid = cw.fresh_id()
        cw.cells[cid] = Cell(cid, frozenset(new_shell))
        cw.rebuild()
        cw.validate()
        return True
    return False


def _cycle_split(cw: CWComplex, fid: int, path_edges: set[int]):
    """Split a face cycle into (arc, path_run); the path edges must occupy
    one contiguous cyclic run.  Returns None if not contiguous."""
    cycle = list(cw.faces[fid].cycle)
    n = len(cycle)
    flags = [eid in path_edges for eid, _ in cycle]
    if all(flags):
        return None
    # rotate so the run of path edges sits at the tail
    k = 0
    while flags[k] or not flags[k - 1]:
        k += 1
        if k > n:
            return None
    cycle = cycle[k:] + cycle[:k]
    flags = flags[k:] + flags[:k]
    run = sum(flags)
    if any(flags[:-run]) if run else False:
        return None
    if run and not all(flags[-run:]):
        return None
    return cycle[: n - run], cycle[n - run :]


def _merge_one_face_pair(cw: CWComplex) -> bool:
    by_pair: dict[tuple[int, int], list[int]] = {}
    for fid, owners in cw.face_cells.items():
        if len(owners) == 2:
            by_pair.setdefault((min(owners), max(owners)), []).append(fid)
    for pair in sorted(by_pair):
        fids = sorted(by_pair[pair])
        for f1, f2 in itertools.combinations(fids, 2):
            shared = {eid for eid, _ in cw.faces[f1].cycle} & {
                eid for eid, _ in cw.faces[f2].cycle
            }
            if not shared:
                continue
            if any(cw.edge_faces[eid] != {f1, f2} for eid in shared):
                continue
            # shared edges must form one simple open path
            deg: dict[int, int] = {}
            for eid in shared:
                e = cw.edges[eid]
                deg[e.u] = deg.get(e.u, 0) + 1
                deg[e.v] = deg.get(e.v, 0) + 1
            ends = [v for v, d in deg.items() if d == 1]
            if len(ends) != 2 or any(d > 2 for d in deg.values()):
                continue
            split1 = _cycle_split(cw, f1, shared)
            split2 = _cycle_split(cw, f2, shared)
            if split1 is None or split2 is None:
                continue
            arc1, run1 = split1
            arc2, run2 = split2
            if len(run1) != len(shared) or len(run2) != len(shared):
                continue
            interior_path_verts = {v for v, d in deg.items() if d == 2}
            bad = False
            for v in interior_path_verts:
                if cw.vertex_edges[v] - shared or cw.vertex_faces[v] - {f1, f2}:
                    bad = True
                    break
            if bad:
                continue
            # orient arc2 so the walk closes: arc1 runs end->...->start of
            # the path run; if both faces traverse the path the same way,
            # arc2 must be reversed.
            first1 = run1[0]
            same_dir = any(
                eid == first1[0] and sign == first1[1] for eid, sign in run2
            )
            if same_dir:
                arc2 = [(eid, -sign) for eid, sign in reversed(arc2)]
            new_cycle = list(arc1) + list(arc2)
            walk_verts = []
            ok = True
            cursor = None
            for eid, sign in new_cycle:
                e = cw.edges[eid]
                a, b = (e.u, e.v) if sign > 0 else (e.v, e.u)
                if cursor is not None and a != cursor:
                    ok = False
                    break
                walk_verts.append(a)
                cursor = b
            if not ok or cursor != walk_verts[0] or len(set(walk_verts)) != len(walk_verts):
                continue
            if len(new_cycle) < 2:
                continue
            c1, c2 = pair
            for fid in (f1, f2):
                del cw.faces[fid]
            for eid in shared:
                del cw.edges[eid]
            for v in interior_path_verts:
                del cw.vertices[v]
            nf = cw.fresh_id()
            cw.faces[nf] = Face(nf, canonical_cycle(cw, new_cycle))
            for cid in (c1, c2):
                cell = cw.cells[cid]
                cw.cells[cid] = Cell(cid, (cell.faces - {f1, f2}) | {nf})
            cw.rebuild()
            cw.validate()
            return True
    return False


def _merge_one_edge_path(cw: CWComplex) -> bool:
    for vid in sorted(cw.vertices):
        eids = sorted(cw.vertex_edges[vid])
        if len(eids) != 2:
            continue
        e1, e2 = (cw.edges[eids[0]], cw.edges[eids[1]])
        if cw.edge_faces[e1.id] != cw.edge_faces[e2.id]:
            continue
        a, b = e1.other(vid), e2.other(vid)
        if a == b or a == vid or b == vid:
            continue
        if any(len(cw.faces[fid].cycle) < 3 for fid in cw.edge_faces[e1.id]):
            continue
        sup1 = e1.support if e1.support[-1] == vid else e1.support[::-1]
        sup2 = e2.support if e2.support[0] == vid else e2.support[::-1]
        support = tuple(sup1) + tuple(sup2[1:])  # a .. vid .. b
        u, v = (a, b) if a < b else (b, a)
        if support[0] != u:
            support = support[::-1]
        ne = cw.fresh_id()
        cw.edges[ne] = Edge(ne, u, v, support)
        for fid in list(cw.edge_faces[e1.id]):
            face = cw.faces[fid]
            cycle = list(face.cycle)
            n = len(cycle)
            pos = next(
                k
                for k in range(n)
                if {cycle[k][0], cycle[(k + 1) % n][0]} == {e1.id, e2.id}
            )
            nxt = (pos + 1) % n
            first_eid, first_sign = cycle[pos]
            first = cw.edges[first_eid]
            start = first.u if first_sign > 0 else first.v
            sign = 1 if start == u else -1
            if nxt > pos:
                new_cycle = cycle[:pos] + [(ne, sign)] + cycle[nxt + 1 :]
            else:  # pair wraps around the end of the list
                new_cycle = [(ne, sign)] + cycle[1:pos]
            cw.faces[fid] = Face(
                fid,
                canonical_cycle_after_replacement(cw, new_cycle),
                on_boundary=face.on_boundary,
                tube_wall=face.tube_wall,
            )
        del cw.edges[e1.id]
        del cw.edges[e2.id]
        del cw.vertices[vid]
        cw.rebuild()
        cw.validate()
        return True
    return False


def canonical_cycle_after_replacement(cw, cycle):
    return canonical_cycle(cw, cycle)
