"""Reference meshes, graphs and boundary fields used by tests and the CLI.

All meshes are built from axis-aligned unit cubes split into five tets
with alternating corner parity, which keeps the diagonals of shared cube
faces consistent.  Geometry is combinatorial; coordinates only matter for
file output.
"""

from __future__ import annotations

import math

import numpy as np

from .mesh import GraphEdge, SingularityGraph, TetMesh, validate_mesh

# Kuhn split of the unit cube: six tets around the main diagonal, one per
# monotone vertex path (0,0,0) -> (1,1,1).  Translation-invariant, so
# shared cube faces always carry matching diagonals.
_AXES = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def _cube_tets():
    tets = []
    import itertools as _it

    for perm in _it.permutations(_AXES):
        a = (0, 0, 0)
        path = [a]
        for step in perm:
            a = tuple(x + s for x, s in zip(a, step))
            path.append(a)
        tets.append(tuple(path))
    return tets


_KUHN_TETS = _cube_tets()


def grid_mesh(nx: int, ny: int, nz: int) -> TetMesh:
    """nx x ny x nz cube grid, six tets per cube; a topological ball."""
    return _grid(nx, ny, nz, skip=set())


def _grid(nx, ny, nz, skip, wrap_x: int | None = None) -> TetMesh:
    def vid(x, y, z):
        if wrap_x is not None:
            x %= wrap_x
            return (x * (ny + 1) + y) * (nz + 1) + z
        return (x * (ny + 1) + y) * (nz + 1) + z

    n_x_verts = wrap_x if wrap_x is not None else nx + 1
    verts = []
    for x in range(n_x_verts):
        for y in range(ny + 1):
            for z in range(nz + 1):
                if wrap_x is not None:
                    ang = 2 * math.pi * x / wrap_x
                    rad = 2.0 + (y - 0.5)
                    verts.append((rad * math.cos(ang), rad * math.sin(ang), float(z)))
                else:
                    verts.append((float(x), float(y), float(z)))
    tets = []
    for cx in range(nx):
        for cy in range(ny):
            for cz in range(nz):
                if (cx, cy, cz) in skip:
                    continue
                for tet in _KUHN_TETS:
                    tets.append(
                        tuple(vid(cx + i, cy + j, cz + k) for (i, j, k) in tet)
                    )
    mesh = TetMesh(verts, tets)
    validate_mesh(mesh)
    return mesh


def single_tet_mesh() -> TetMesh:
    mesh = TetMesh(
        [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)],
        [(0, 1, 2, 3)],
    )
    validate_mesh(mesh)
    return mesh


def cube5_mesh() -> TetMesh:
    """One cube split into five tets around a central tet."""
    central = ((0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1))
    corners = [
        c
        for c in ((i, j, k) for i in (0, 1) for j in (0, 1) for k in (0, 1))
        if c not in central
    ]
    local = [central]
    for corner in corners:
        near = [c for c in central if sum(abs(a - b) for a, b in zip(c, corner)) == 1]
        local.append((corner,) + tuple(near))
    coords = sorted({c for tet in local for c in tet})
    index = {c: i for i, c in enumerate(coords)}
    mesh = TetMesh(
        [tuple(float(x) for x in c) for c in coords],
        [tuple(index[c] for c in tet) for tet in local],
    )
    validate_mesh(mesh)
    return mesh


def ball_mesh() -> TetMesh:
    """4x4x3 cube grid; coarse ball with interior vertices."""
    return grid_mesh(4, 4, 3)


def shell_mesh() -> TetMesh:
    """3x3x3 grid minus the center cube: two boundary components."""
    return _grid(3, 3, 3, skip={(1, 1, 1)})


def solid_torus_mesh(length: int = 4) -> TetMesh:
    """Ring of cubes with the x direction wrapped around."""
    if length < 3:
        raise ValueError("ring length must be at least 3")
    return _grid(length, 1, 1, skip=set(), wrap_x=length)


def ball_vertex_id(x: int, y: int, z: int) -> int:
    # grid_mesh(4, 4, 3) vertex layout
    return (x * 5 + y) * 4 + z


def tube_graph() -> SingularityGraph:
    """Straight singular edge through the middle of ball_mesh(), boundary
    vertex to boundary vertex."""
    path = tuple(ball_vertex_id(2, 2, z) for z in range(4))
    return SingularityGraph([path[0], path[-1]], [GraphEdge((path[0], path[-1]), path)])


def constant_frames(mesh: TetMesh) -> dict[int, np.ndarray]:
    return {v: np.array([1.0, 0.0, 0.0, 0.0]) for v in range(mesh.n_vertices)}


def torus_vertex_id(x: int, y: int, z: int, length: int = 4) -> int:
    return ((x % length) * 2 + y) * 2 + z


def winding_torus_frames(length: int = 4) -> dict[int, np.ndarray]:
    """Boundary field on solid_torus_mesh that winds a full turn around the
    meridian: frames rotate about a non-symmetry axis by the cross-section
    angle, so the meridian holonomy class is -1 and no extension exists."""
    axis = np.array([1.0, 1.0, 0.0]) / math.sqrt(2.0)
    frames = {}
    for x in range(length):
        for y in (0, 1):
            for z in (0, 1):
                phi = math.atan2(z - 0.5, y - 0.5)
                q = np.zeros(4)
                q[0] = math.cos(phi / 2.0)
                q[1:] = -math.sin(phi / 2.0) * axis
                frames[torus_vertex_id(x, y, z, length)] = q
    return frames


def write_frames(frames: dict[int, np.ndarray], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("frames v1\n")
        for vid in sorted(frames):
            q = frames[vid]
            fh.write(f"{vid} {q[0]} {q[1]} {q[2]} {q[3]}\n")
