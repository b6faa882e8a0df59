"""Constrained spanning trees of the 1-skeleton.

The tree restricts to a spanning subtree of each boundary component's
1-skeleton: growth starts at the base component's subtree and, whenever an
edge first reaches an untouched component, splices that component's whole
subtree in through it.  The component ordering and basepoints recorded by
the growth make every root path leave its component immediately and pass
through no later component, which is what the circuit constructions rely
on.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .cwcomplex import CWComplex


class TreeError(ValueError):
    pass


@dataclass
class SpanningTreeData:
    tree_edges: set[int]
    # per boundary component, in complex order: subtree edges, basepoint
    component_subtrees: list[set[int]]
    basepoints: list[int]
    component_order: list[int]  # component indices in splice order
    parent: dict[int, tuple[int, int] | None]  # vertex -> (parent vertex, edge id)
    depth: dict[int, int]
    nontree_edges: set[int] = field(default_factory=set)
    boundary_nontree_edges: list[set[int]] = field(default_factory=list)
    entry_edges: list[int | None] = field(default_factory=list)  # d_j per component

    @property
    def root(self) -> int:
        return self.basepoints[0]

    def interior_nontree_edges(self) -> set[int]:
        out = set(self.nontree_edges)
        for comp in self.boundary_nontree_edges:
            out -= comp
        return out

    # -- path queries ----------------------------------------------------

    def vertex_chain(self, v: int, w: int) -> list[int]:
        """Vertices along the unique simple tree path from v to w."""
        av, aw = [v], [w]
        dv, dw = self.depth[v], self.depth[w]
        x, y = v, w
        while dv > dw:
            x = self.parent[x][0]
            av.append(x)
            dv -= 1
        while dw > dv:
            y = self.parent[y][0]
            aw.append(y)
            dw -= 1
        while x != y:
            x = self.parent[x][0]
            y = self.parent[y][0]
            av.append(x)
            aw.append(y)
        return av + aw[::-1][1:]

    def simple_path(self, v: int, w: int) -> list[tuple[int, int]]:
        """Edge steps (edge id, +1 forward / -1 backward) from v to w."""
        chain = self.vertex_chain(v, w)
        steps = []
        for a, b in zip(chain, chain[1:]):
            eid = self._edge_between(a, b)
            steps.append((eid, 1 if self._cw.edges[eid].u == a else -1))
        return steps

    def _edge_between(self, a: int, b: int) -> int:
        pa, pb = self.parent[a], self.parent[b]
        if pa is not None and pa[0] == b:
            return pa[1]
        if pb is not None and pb[0] == a:
            return pb[1]
        raise TreeError(f"vertices {a},{b} not tree-adjacent")

    _cw: CWComplex = None  # set by build_constrained_tree


def _component_subtree(cw: CWComplex, comp_index: int, root: int):
    """Lowest-edge-id-first spanning tree of one boundary component."""
    comp = cw.boundary_components[comp_index]
    parent: dict[int, tuple[int, int] | None] = {root: None}
    edges: set[int] = set()
    frontier: list[int] = []
    for eid in cw.vertex_edges[root]:
        if eid in comp.edges:
            heapq.heappush(frontier, eid)
    while frontier:
        eid = heapq.heappop(frontier)
        e = cw.edges[eid]
        known_u, known_v = e.u in parent, e.v in parent
        if known_u == known_v:
            continue
        new, old = (e.v, e.u) if known_u else (e.u, e.v)
        parent[new] = (old, eid)
        edges.add(eid)
        for nid in cw.vertex_edges[new]:
            if nid in comp.edges and nid != eid:
                heapq.heappush(frontier, nid)
    if set(parent) != comp.vertices:
        raise TreeError(f"boundary component {comp_index} 1-skeleton is disconnected")
    return edges, parent


def build_constrained_tree(cw: CWComplex) -> SpanningTreeData:
    """Spanning tree whose restriction to every boundary component spans it.

    Deterministic: the frontier always adjoins the lowest-id edge, and a
    component's subtree is spliced in whole the moment an edge first
    reaches it.
    """
    n_comps = len(cw.boundary_components)
    if n_comps == 0:
        return _plain_tree(cw)
    comp_of_vertex = {}
    for comp in cw.boundary_components:
        for v in comp.vertices:
            comp_of_vertex[v] = comp.index

    b0 = min(cw.boundary_components[0].vertices)
    sub_edges, sub_parent = _component_subtree(cw, 0, b0)

    tree_edges = set(sub_edges)
    parent: dict[int, tuple[int, int] | None] = dict(sub_parent)
    subtree_sets: dict[int, set[int]] = {0: sub_edges}
    basepoints: dict[int, int] = {0: b0}
    entry: dict[int, int | None] = {0: None}
    order = [0]
    spliced = {0}

    frontier: list[int] = []

    def push_vertex(v: int) -> None:
        for eid in cw.vertex_edges[v]:
            heapq.heappush(frontier, eid)

    for v in sub_parent:
        push_vertex(v)

    while frontier:
        eid = heapq.heappop(frontier)
        e = cw.edges[eid]
        known_u, known_v = e.u in parent, e.v in parent
        if known_u == known_v:
            continue
        new, old = (e.v, e.u) if known_u else (e.u, e.v)
        comp = comp_of_vertex.get(new)
        if comp is not None and comp not in spliced:
            c_edges, c_parent = _component_subtree(cw, comp, new)
            parent[new] = (old, eid)
            tree_edges.add(eid)
            for v, p in c_parent.items():
                if v != new:
                    parent[v] = p
            tree_edges |= c_edges
            subtree_sets[comp] = c_edges
            basepoints[comp] = new
            entry[comp] = eid
            order.append(comp)
            spliced.add(comp)
            for v in c_parent:
                push_vertex(v)
        else:
            parent[new] = (old, eid)
            tree_edges.add(eid)
            push_vertex(new)

    if set(parent) != set(cw.vertices):
        raise TreeError("1-skeleton is disconnected")

    depth: dict[int, int] = {}

    def depth_of(v: int) -> int:
        trail = []
        while v not in depth:
            trail.append(v)
            p = parent[v]
            if p is None:
                depth[v] = 0
                break
            v = p[0]
        for v in reversed(trail):
            p = parent[v]
            if p is not None:
                depth[v] = depth[p[0]] + 1
        return 0

    for v in parent:
        depth_of(v)

    nontree = set(cw.edges) - tree_edges
    boundary_nontree = []
    for comp in cw.boundary_components:
        boundary_nontree.append(comp.edges - tree_edges)

    data = SpanningTreeData(
        tree_edges=tree_edges,
        component_subtrees=[subtree_sets[c.index] for c in cw.boundary_components],
        basepoints=[basepoints[c.index] for c in cw.boundary_components],
        component_order=order,
        parent=parent,
        depth=depth,
        nontree_edges=nontree,
        boundary_nontree_edges=boundary_nontree,
        entry_edges=[entry[c.index] for c in cw.boundary_components],
    )
    data._cw = cw
    return data


def _plain_tree(cw: CWComplex) -> SpanningTreeData:
    """No boundary: ordinary lowest-edge-id spanning tree from the lowest vertex."""
    root = min(cw.vertices)
    parent: dict[int, tuple[int, int] | None] = {root: None}
    tree_edges: set[int] = set()
    frontier: list[int] = []
    for eid in cw.vertex_edges[root]:
        heapq.heappush(frontier, eid)
    while frontier:
        eid = heapq.heappop(frontier)
        e = cw.edges[eid]
        if (e.u in parent) == (e.v in parent):
            continue
        new, old = (e.v, e.u) if e.u in parent else (e.u, e.v)
        parent[new] = (old, eid)
        tree_edges.add(eid)
        for nid in cw.vertex_edges[new]:
            heapq.heappush(frontier, nid)
    if set(parent) != set(cw.vertices):
        raise TreeError("1-skeleton is disconnected")
    depth = {root: 0}
    pending = [v for v in parent if v not in depth]
    while pending:
        rest = []
        for v in pending:
            p = parent[v][0]
            if p in depth:
                depth[v] = depth[p] + 1
            else:
                rest.append(v)
        pending = rest
    data = SpanningTreeData(
        tree_edges=tree_edges,
        component_subtrees=[],
        basepoints=[root],
        component_order=[],
        parent=parent,
        depth=depth,
        nontree_edges=set(cw.edges) - tree_edges,
        boundary_nontree_edges=[],
        entry_edges=[],
    )
    data._cw = cw
    return data


# ----------------------------------------------------------------------
# circuits


def boundary_circuit(tree: SpanningTreeData, eid: int) -> list[tuple[int, int]]:
    """Closed circuit at the component basepoint through a non-tree
    boundary edge, staying inside the component's subtree."""
    cw = tree._cw
    e = cw.edges[eid]
    if eid in tree.tree_edges:
        raise TreeError(f"edge {eid} is a tree edge")
    comp = e.component
    if comp is None:
        raise TreeError(f"edge {eid} is not a boundary edge")
    b = tree.basepoints[comp]
    steps = tree.simple_path(b, e.u) + [(eid, 1)] + tree.simple_path(e.v, b)
    for seid, _ in steps:
        if seid != eid and seid not in tree.component_subtrees[comp]:
            raise TreeError(f"circuit for edge {eid} left its component subtree")
    return steps


def base_circuit(tree: SpanningTreeData, eid: int) -> list[tuple[int, int]]:
    """Closed circuit at the root through a non-tree edge."""
    cw = tree._cw
    e = cw.edges[eid]
    if eid in tree.tree_edges:
        raise TreeError(f"edge {eid} is a tree edge")
    b0 = tree.root
    return tree.simple_path(b0, e.u) + [(eid, 1)] + tree.simple_path(e.v, b0)


def circuit_vertices(cw: CWComplex, steps: list[tuple[int, int]], start: int) -> list[int]:
    """Expand circuit steps to the full support-vertex chain."""
    chain = [start]
    at = start
    for eid, direction in steps:
        e = cw.edges[eid]
        sup = e.support if direction > 0 else e.support[::-1]
        if sup[0] != at:
            raise TreeError(f"broken circuit at edge {eid}")
        chain.extend(sup[1:])
        at = sup[-1]
    return chain
