"""Holonomy of frame loops through the universal covering of frame space.

A frame is an unordered orthogonal axis triple: the left coset G*q of a
unit quaternion q under the 48-element binary octahedral group G.  The
axes of the frame denoted by q are the rows of the rotation matrix of q;
replacing q by g*q signed-permutes the rows, so the axis set only depends
on the coset.  Loop classes are computed by epsilon-step path lifting:
lifting a closed loop from an anchor quaternion ends at (class)*anchor,
so class = end * start^-1, and classes compose like paths do,
class(a.b) = class(a)*class(b).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .group import GroupElement, OctaGroup, octa_group

MAX_SUBDIVISION = 1024


class DensityError(ValueError):
    """Path samples too sparse (or ambiguous) for a unique lift."""

    def __init__(self, message: str, index: int = -1, context: str = ""):
        super().__init__(message)
        self.index = index
        self.context = context


def quat_normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    n = float(np.linalg.norm(q))
    if abs(n - 1.0) > 1e-6:
        raise ValueError(f"quaternion norm {n} too far from 1")
    return q / n


def quat_conj(q: np.ndarray) -> np.ndarray:
    out = np.array(q, dtype=np.float64)
    out[1:] = -out[1:]
    return out


def quat_mul(a, b) -> np.ndarray:
    return _kernels.quat_mul(np.asarray(a, float), np.asarray(b, float))


def rotation_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def frame_axes(q: np.ndarray) -> np.ndarray:
    """The three (undirected) axes of the frame denoted by q, as rows."""
    return rotation_matrix(q)


def slerp(p: np.ndarray, q: np.ndarray, t: float) -> np.ndarray:
    dot = float(np.clip(np.dot(p, q), -1.0, 1.0))
    theta = np.arccos(dot)
    if theta < 1e-12:
        out = (1 - t) * p + t * q
        return out / np.linalg.norm(out)
    return (np.sin((1 - t) * theta) * p + np.sin(t * theta) * q) / np.sin(theta)


@dataclass(frozen=True)
class Frame:
    """A frame, held as one representative unit quaternion."""

    q: np.ndarray

    @staticmethod
    def of(q) -> "Frame":
        return Frame(quat_normalize(q))


def same_frame(a: Frame, b: Frame, eps: float | None = None, group: OctaGroup | None = None) -> bool:
    group = group or octa_group()
    eps = group.default_epsilon if eps is None else eps
    rel = quat_mul(b.q, quat_conj(a.q))
    _, dist = group.nearest_element(rel)
    return dist < eps


@dataclass
class FramePath:
    """Ordered frame samples along a path; consecutive cosets eps-close."""

    samples: np.ndarray  # (n, 4)
    closed: bool = False

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64).reshape(-1, 4)

    def reverse(self) -> "FramePath":
        return FramePath(self.samples[::-1].copy(), self.closed)

    @staticmethod
    def concat(*paths: "FramePath", closed: bool = False) -> "FramePath":
        return FramePath(np.concatenate([p.samples for p in paths], axis=0), closed)

    def __len__(self) -> int:
        return self.samples.shape[0]


def lift_path(path: FramePath, start, eps: float | None = None, group: OctaGroup | None = None) -> np.ndarray:
    """Endpoint of the unique lift of `path` starting at `start`.

    `start` must lie in the fiber of the first sample; every step must
    have exactly one fiber point within eps of the running lift.
    """
    group = group or octa_group()
    eps = group.default_epsilon if eps is None else eps
    start = quat_normalize(start)
    end, status, bad = _kernels.lift_chain(path.samples, start, group.float_quats, eps)
    if status == _kernels.LIFT_NO_CANDIDATE:
        raise DensityError(f"no fiber point within eps at sample {bad}", index=bad)
    if status == _kernels.LIFT_AMBIGUOUS:
        raise DensityError(f"two fiber points within eps at sample {bad}", index=bad)
    return end


def loop_class(
    loop: FramePath,
    group: OctaGroup | None = None,
    eps: float | None = None,
    anchor=None,
) -> GroupElement:
    """Homotopy class of a closed frame loop as a group element.

    The lift is anchored at `anchor` (default: the stored representative
    of the loop's first frame); the class is end * start^-1 snapped.
    """
    group = group or octa_group()
    eps = group.default_epsilon if eps is None else eps
    start = quat_normalize(anchor) if anchor is not None else loop.samples[0]
    end = lift_path(loop, start, eps, group)
    elem, dist = group.nearest_element(quat_mul(end, quat_conj(start)))
    if dist > eps:
        raise DensityError(f"loop endpoint off-fiber by {dist}; loop not closed")
    return elem


# ----------------------------------------------------------------------
# path construction


def _nearest_fiber_point(target_rep, anchor, group: OctaGroup, eps: float):
    """Point of the coset of target_rep nearest to anchor; ambiguity fails."""
    fiber = quat_mul(group.float_quats, target_rep)
    dists = np.linalg.norm(fiber - anchor, axis=1)
    order = np.argsort(dists, kind="stable")
    if dists[order[1]] - dists[order[0]] < eps * 1e-6:
        raise DensityError("ambiguous nearest fiber point (antipodal step)")
    return fiber[order[0]]


def geodesic_leg(a: np.ndarray, b: np.ndarray, eps: float) -> np.ndarray:
    """Samples along the S3 geodesic from a to b, gaps below eps/2.

    Subdivision is by doubling, capped at MAX_SUBDIVISION.  Includes b,
    excludes a.
    """
    theta = float(np.arccos(np.clip(np.dot(a, b), -1.0, 1.0)))
    n = 1
    while n < MAX_SUBDIVISION and 2 * np.sin(theta / (2 * n)) >= eps / 2:
        n *= 2
    if 2 * np.sin(theta / (2 * n)) >= eps / 2:
        raise DensityError("subdivision cap exceeded")
    return np.stack([slerp(a, b, k / n) for k in range(1, n + 1)])


def chain_frames(reps, eps: float | None = None, group: OctaGroup | None = None) -> FramePath:
    """Dense FramePath visiting the given representatives' frames in order.

    Each hop walks the geodesic from the running lift to the nearest
    fiber point of the next frame, so the returned samples are their own
    lift: lifting the path from reps[0] ends exactly at the last sample.
    """
    group = group or octa_group()
    eps = group.default_epsilon if eps is None else eps
    reps = [quat_normalize(r) for r in reps]
    samples = [reps[0]]
    current = reps[0]
    for nxt in reps[1:]:
        target = _nearest_fiber_point(nxt, current, group, eps)
        samples.extend(geodesic_leg(current, target, eps))
        current = target
    return FramePath(np.stack(samples))


def class_loop(anchor, elem: GroupElement, group: OctaGroup | None = None, eps: float | None = None) -> FramePath:
    """A loop at the anchor's frame whose class is exactly `elem`.

    Lift-straight-line construction: the S3 geodesic from the anchor to
    elem*anchor, projected to frames.  The antipodal case (elem = -1)
    detours through a deterministic orthogonal waypoint.
    """
    group = group or octa_group()
    eps = group.default_epsilon if eps is None else eps
    a = quat_normalize(anchor)
    b = quat_mul(group.float_quats[elem.id], a)
    if np.dot(a, b) < -1.0 + 1e-9:
        mid = _orthogonal_unit(a)
        samples = np.concatenate(
            [a.reshape(1, 4), geodesic_leg(a, mid, eps), geodesic_leg(mid, b, eps)]
        )
    else:
        samples = np.concatenate([a.reshape(1, 4), geodesic_leg(a, b, eps)])
    return FramePath(samples, closed=True)


def _orthogonal_unit(a: np.ndarray) -> np.ndarray:
    for seed in np.eye(4):
        v = seed - np.dot(seed, a) * a
        n = np.linalg.norm(v)
        if n > 0.5:
            return v / n
    raise AssertionError("no orthogonal direction found")


# ----------------------------------------------------------------------
# basepoint transport and boundary constraint classes


@dataclass
class BasepointTransport:
    """Per boundary component i, a path from the field at b_i to the anchor.

    Component 0 carries the constant path at the anchor.  Changing a
    component's path conjugates all of that component's constraint
    classes, which is why the solver keeps one free conjugating variable
    per component.
    """

    anchor: np.ndarray
    paths: dict[int, FramePath] = field(default_factory=dict)

    @staticmethod
    def default(basepoints: dict[int, np.ndarray], eps: float | None = None, group: OctaGroup | None = None):
        """Geodesic transport from each component basepoint frame to b_0's."""
        group = group or octa_group()
        eps = group.default_epsilon if eps is None else eps
        anchor = quat_normalize(basepoints[0])
        paths = {0: FramePath(anchor.reshape(1, 4))}
        for i, rep in basepoints.items():
            if i == 0:
                continue
            paths[i] = chain_frames([rep, anchor], eps, group)
        return BasepointTransport(anchor=anchor, paths=paths)


def vertex_chain_path(chain, vertex_frames, eps: float | None = None, group: OctaGroup | None = None) -> FramePath:
    """FramePath through the frames at a chain of vertex ids."""
    reps = [vertex_frames[v] for v in chain]
    return chain_frames(reps, eps, group)


def constraint_classes(
    cw,
    tree,
    vertex_frames: dict[int, np.ndarray],
    transport: BasepointTransport,
    group: OctaGroup | None = None,
    eps: float | None = None,
) -> dict[int, GroupElement]:
    """Class of the transported boundary circuit of every non-tree boundary edge.

    For an edge e = (v, w) of boundary component i, the circuit runs
    b_i -> v through the component subtree, across e, and back w -> b_i;
    it is conjugated to the anchor through the component's transport
    path.  All classes come out based at the anchor frame.
    """
    group = group or octa_group()
    eps = group.default_epsilon if eps is None else eps
    out: dict[int, GroupElement] = {}
    for i, edges in enumerate(tree.boundary_nontree_edges):
        rho = transport.paths[i]
        for eid in sorted(edges):
            edge = cw.edges[eid]
            b_i = tree.basepoints[i]
            chain = (
                tree.vertex_chain(b_i, edge.u)
                + list(edge.support[1:])
                + tree.vertex_chain(edge.v, b_i)[1:]
            )
            try:
                mid = vertex_chain_path(chain, vertex_frames, eps, group)
                loop = FramePath.concat(rho.reverse(), mid, rho, closed=True)
                out[eid] = loop_class(loop, group, eps, anchor=transport.anchor)
            except DensityError as exc:
                raise DensityError(str(exc), index=exc.index, context=f"edge {eid}") from exc
    return out


# ----------------------------------------------------------------------
# file formats


def load_frames(path) -> dict[int, np.ndarray]:
    """Read a `frames v1` file: lines `vertex_id qw qx qy qz`."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    if not lines or lines[0] != "frames v1":
        raise ValueError(f"{path}: expected 'frames v1' header")
    frames: dict[int, np.ndarray] = {}
    for lineno, ln in enumerate(lines[1:], start=2):
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        if len(parts) != 5:
            raise ValueError(f"{path}:{lineno}: expected 'vertex_id qw qx qy qz'")
        vid = int(parts[0])
        frames[vid] = quat_normalize([float(p) for p in parts[1:]])
    return frames


def load_transport(path, anchor) -> BasepointTransport:
    """Read a `transport v1` file: per component, a sampled quaternion path."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "transport v1":
        raise ValueError(f"{path}: expected 'transport v1' header")
    paths: dict[int, FramePath] = {0: FramePath(quat_normalize(anchor).reshape(1, 4))}
    i = 1
    while i < len(lines):
        parts = lines[i].split()
        if len(parts) != 4 or parts[0] != "component" or parts[2] != "samples":
            raise ValueError(f"{path}: bad component header {lines[i]!r}")
        comp, count = int(parts[1]), int(parts[3])
        rows = [quat_normalize([float(x) for x in lines[i + 1 + k].split()]) for k in range(count)]
        paths[comp] = FramePath(np.stack(rows))
        i += 1 + count
    return BasepointTransport(anchor=quat_normalize(anchor), paths=paths)


# Loop classes in the axis-marked variant of frame space (one axis kept
# distinguished) form a cyclic group of order 8; recorded for reference,
# nothing here computes in it.
MARKED_AXIS_LOOP_CLASSES = 8
