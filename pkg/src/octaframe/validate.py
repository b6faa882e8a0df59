"""Quarter-integer winding indices of cross data and singularity-graph checks.

A cross (unordered planar axis pair) is an angle mod pi/2 in a caller-fixed
planar chart.  The index of a closed loop of crosses is the accumulated
principal angle change over 2*pi, always a multiple of 1/4.  Graph
validators check the interior-vertex sum rule and the global identity
tying edge indices to the Euler characteristic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .holonomy import FramePath, rotation_matrix
from .mesh import SingularityGraph

QUARTER = math.pi / 2
SNAP_TOL = 1e-6
ALIGN_TOL = 1e-3


class IndexError_(ValueError):
    pass


@dataclass
class CrossLoop:
    angles: np.ndarray  # radians, each meaningful mod pi/2

    def __post_init__(self):
        self.angles = np.asarray(self.angles, dtype=float).ravel()


def principal_step(d: float) -> float:
    """Representative of d mod pi/2 in (-pi/4, pi/4]."""
    return -((-d + QUARTER / 2) % QUARTER) + QUARTER / 2


def loop_index(loop: CrossLoop) -> Fraction:
    """Winding of the cross over the closed loop, in quarters.

    Steps with ambiguous direction (at the pi/4 boundary) and totals off
    the quarter grid are rejected.
    """
    th = loop.angles
    if th.size < 2:
        raise IndexError_("need at least two samples")
    total = 0.0
    for i in range(th.size):
        d = principal_step(th[(i + 1) % th.size] - th[i])
        if abs(abs(d) - QUARTER / 2) < 1e-9:
            raise IndexError_(f"ambiguous quarter-boundary step at sample {i}")
        total += d
    quarters = total / (2 * math.pi) * 4
    snapped = round(quarters)
    if abs(quarters - snapped) > 4 * SNAP_TOL:
        raise IndexError_(
            f"winding {total / (2 * math.pi)} is not a quarter multiple; loop not closed"
        )
    return Fraction(snapped, 4)


def default_chart(tangent: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal basis (e1, e2) of the plane normal to tangent."""
    u = np.asarray(tangent, dtype=float)
    u = u / np.linalg.norm(u)
    h = np.array([0.0, 0.0, 1.0]) if abs(u[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = h - np.dot(h, u) * u
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    return e1, e2


def edge_index_from_frames(
    loop: FramePath, tangent, chart: tuple[np.ndarray, np.ndarray] | None = None
) -> Fraction:
    """Index of a frame loop around an edge-aligned axis.

    Every frame must have an axis within ALIGN_TOL of the tangent; the
    other two axes project to a cross in the normal plane, whose winding
    is delegated to loop_index.
    """
    u = np.asarray(tangent, dtype=float)
    u = u / np.linalg.norm(u)
    e1, e2 = chart if chart is not None else default_chart(u)
    angles = []
    for i, q in enumerate(loop.samples):
        rows = rotation_matrix(q)
        dists = np.minimum(
            np.linalg.norm(rows - u, axis=1), np.linalg.norm(rows + u, axis=1)
        )
        k = int(np.argmin(dists))
        if dists[k] > ALIGN_TOL:
            raise IndexError_(f"sample {i}: no frame axis within {ALIGN_TOL} of the tangent")
        other = rows[(k + 1) % 3]
        angles.append(math.atan2(float(np.dot(other, e2)), float(np.dot(other, e1))))
    return loop_index(CrossLoop(np.array(angles)))


# ----------------------------------------------------------------------
# singularity-graph index validation


@dataclass
class IndexedGraph:
    graph: SingularityGraph
    interior_nodes: set[int]
    boundary_nodes: set[int]

    @staticmethod
    def from_graph(graph: SingularityGraph) -> "IndexedGraph":
        """Classification from explicit node flags where present, else by
        degree (leaves sit on the boundary)."""
        interior, boundary = set(), set()
        for n in graph.nodes:
            flag = graph.node_flags.get(n)
            if flag == "i":
                interior.add(n)
            elif flag == "b":
                boundary.add(n)
            elif len(graph.incident_edges(n)) == 1:
                boundary.add(n)
            else:
                interior.add(n)
        return IndexedGraph(graph, interior, boundary)

    def require_indices(self) -> None:
        missing = [gi for gi, e in enumerate(self.graph.edges) if e.index is None]
        if missing:
            raise IndexError_(f"edges {missing} have no index")


@dataclass
class GraphIndexReport:
    vertex_sums: dict[int, Fraction] = field(default_factory=dict)
    failing_vertices: list[int] = field(default_factory=list)
    total: Fraction = Fraction(0)
    expected_total: Fraction = Fraction(0)
    global_ok: bool = True

    @property
    def ok(self) -> bool:
        return self.global_ok and not self.failing_vertices

    def to_dict(self) -> dict:
        return {
            "vertex_sums": {str(v): str(s) for v, s in sorted(self.vertex_sums.items())},
            "failing_vertices": self.failing_vertices,
            "total": str(self.total),
            "expected_total": str(self.expected_total),
            "global_ok": self.global_ok,
            "ok": self.ok,
        }


def validate_indexed_graph(ig: IndexedGraph, chi_m: int) -> GraphIndexReport:
    """Interior vertices must carry total index 2; the grand total over all
    vertices must equal 2*chi(M) + 2*#interior."""
    ig.require_indices()
    report = GraphIndexReport()
    for n in ig.graph.nodes:
        s = sum(
            (ig.graph.edges[gi].index for gi in ig.graph.incident_edges(n)),
            Fraction(0),
        )
        report.vertex_sums[n] = s
        if n in ig.interior_nodes and s != 2:
            report.failing_vertices.append(n)
    report.total = sum(report.vertex_sums.values(), Fraction(0))
    report.expected_total = Fraction(2 * chi_m + 2 * len(ig.interior_nodes))
    report.global_ok = report.total == report.expected_total
    return report


def load_cross_loop(path) -> CrossLoop:
    """Read a `crossloop v1` file: a count then angle samples in radians."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "crossloop v1":
        raise ValueError(f"{path}: expected 'crossloop v1' header")
    if not lines[1].startswith("samples "):
        raise ValueError(f"{path}: expected 'samples K'")
    k = int(lines[1].split()[1])
    return CrossLoop(np.array([float(lines[2 + i]) for i in range(k)]))
