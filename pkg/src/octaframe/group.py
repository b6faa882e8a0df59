"""Exact arithmetic for the binary octahedral group of 48 unit quaternions.

Every coordinate of every group member lies in the ring {(p + q*sqrt(2))/4
with integer p, q}, so the whole group multiplies, inverts and projects to
rotation matrices without any floating point.  The group double-covers the
24 rotational symmetries of an axis-aligned cube; the two preimages of each
rotation are g and -g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

GROUP_ORDER = 48
ROTATION_ORDER = 24


class RingError(ArithmeticError):
    """A product left the (p + q*sqrt(2))/4 coefficient ring."""


class RingScalar:
    """Exact scalar (p + q*sqrt(2))/4 with integer p, q.

    Closed under the sums and products that occur in group arithmetic
    (all group coordinates have even p and q, so products reduce back to
    denominator 4); multiplication raises RingError otherwise.
    """

    __slots__ = ("p", "q")

    def __init__(self, p: int, q: int) -> None:
        self.p = p
        self.q = q

    def __add__(self, other: "RingScalar") -> "RingScalar":
        return RingScalar(self.p + other.p, self.q + other.q)

    def __sub__(self, other: "RingScalar") -> "RingScalar":
        return RingScalar(self.p - other.p, self.q - other.q)

    def __neg__(self) -> "RingScalar":
        return RingScalar(-self.p, -self.q)

    def __mul__(self, other: "RingScalar") -> "RingScalar":
        # (p1+q1*s)(p2+q2*s)/16 with s*s = 2; must reduce to denominator 4.
        num_p = self.p * other.p + 2 * self.q * other.q
        num_q = self.p * other.q + self.q * other.p
        if num_p % 4 or num_q % 4:
            raise RingError(f"product ({num_p}+{num_q}*sqrt2)/16 not in ring")
        return RingScalar(num_p // 4, num_q // 4)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RingScalar) and self.p == other.p and self.q == other.q

    def __hash__(self) -> int:
        return hash((self.p, self.q))

    def __float__(self) -> float:
        return (self.p + self.q * math.sqrt(2.0)) / 4.0

    def __repr__(self) -> str:
        return f"RingScalar({self.p}, {self.q})"

    def is_integer(self) -> bool:
        return self.q == 0 and self.p % 4 == 0

    def as_int(self) -> int:
        if not self.is_integer():
            raise RingError(f"{self!r} is not an integer")
        return self.p // 4


R_ZERO = RingScalar(0, 0)
R_ONE = RingScalar(4, 0)
R_HALF = RingScalar(2, 0)
R_INV_SQRT2 = RingScalar(0, 2)


class ExactQuat:
    """Quaternion with RingScalar coordinates (w, x, y, z)."""

    __slots__ = ("w", "x", "y", "z")

    def __init__(self, w: RingScalar, x: RingScalar, y: RingScalar, z: RingScalar) -> None:
        self.w = w
        self.x = x
        self.y = y
        self.z = z

    def __mul__(self, o: "ExactQuat") -> "ExactQuat":
        a, b, c, d = self.w, self.x, self.y, self.z
        e, f, g, h = o.w, o.x, o.y, o.z
        return ExactQuat(
            a * e - b * f - c * g - d * h,
            a * f + b * e + c * h - d * g,
            a * g - b * h + c * e + d * f,
            a * h + b * g - c * f + d * e,
        )

    def __neg__(self) -> "ExactQuat":
        return ExactQuat(-self.w, -self.x, -self.y, -self.z)

    def conjugate(self) -> "ExactQuat":
        return ExactQuat(self.w, -self.x, -self.y, -self.z)

    def norm_squared(self) -> RingScalar:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def key(self) -> tuple:
        return (self.w.p, self.w.q, self.x.p, self.x.q, self.y.p, self.y.q, self.z.p, self.z.q)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ExactQuat) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"ExactQuat{self.key()}"

    def to_float(self) -> np.ndarray:
        return np.array([float(self.w), float(self.x), float(self.y), float(self.z)])

    def rotation_matrix(self) -> "np.ndarray | None":
        """Exact 3x3 rotation matrix; None if any entry is non-integer."""
        w, x, y, z = self.w, self.x, self.y, self.z
        one, two = R_ONE, RingScalar(8, 0)
        rows = [
            [one - two * (y * y + z * z), two * (x * y - w * z), two * (x * z + w * y)],
            [two * (x * y + w * z), one - two * (x * x + z * z), two * (y * z - w * x)],
            [two * (x * z - w * y), two * (y * z + w * x), one - two * (x * x + y * y)],
        ]
        out = np.zeros((3, 3), dtype=np.int64)
        for i in range(3):
            for j in range(3):
                if not rows[i][j].is_integer():
                    return None
                out[i, j] = rows[i][j].as_int()
        return out


IDENTITY_QUAT = ExactQuat(R_ONE, R_ZERO, R_ZERO, R_ZERO)
MINUS_ONE_QUAT = ExactQuat(-R_ONE, R_ZERO, R_ZERO, R_ZERO)

# Unit quaternion generators: a diagonal axis half-turn, the order-6 vertex
# rotation, and the quarter turn about the first axis.
GEN_R = ExactQuat(R_ZERO, R_INV_SQRT2, R_INV_SQRT2, R_ZERO)
GEN_S = ExactQuat(R_HALF, R_HALF, R_HALF, R_HALF)
GEN_T = ExactQuat(R_INV_SQRT2, R_INV_SQRT2, R_ZERO, R_ZERO)


@dataclass(frozen=True)
class GroupElement:
    id: int
    quat: ExactQuat

    def __repr__(self) -> str:
        return f"GroupElement({self.id})"


@dataclass(frozen=True)
class RotationElement:
    id: int
    matrix: np.ndarray

    def __repr__(self) -> str:
        return f"RotationElement({self.id})"


class OctaGroup:
    """The 48-element group with precomputed multiplication/inverse tables.

    Immutable after construction; all tables are plain numpy arrays and can
    be shared freely across threads.
    """

    def __init__(self) -> None:
        quats = _closure()
        if len(quats) != GROUP_ORDER:
            raise RingError(f"generator closure has {len(quats)} elements, expected 48")
        others = sorted((q for q in quats if q != IDENTITY_QUAT), key=ExactQuat.key)
        ordered = [IDENTITY_QUAT] + others
        self.elements: tuple[GroupElement, ...] = tuple(
            GroupElement(i, q) for i, q in enumerate(ordered)
        )
        self._index = {q: i for i, q in enumerate(ordered)}

        n = GROUP_ORDER
        table = np.zeros((n, n), dtype=np.int64)
        for a in range(n):
            for b in range(n):
                table[a, b] = self._index[ordered[a] * ordered[b]]
        self.table = table
        self.table.setflags(write=False)

        inv = np.zeros(n, dtype=np.int64)
        for a in range(n):
            inv[a] = int(np.nonzero(table[a] == 0)[0][0])
        self.inverse_table = inv
        self.inverse_table.setflags(write=False)

        self.float_quats = np.stack([q.to_float() for q in ordered])
        self.float_quats.setflags(write=False)

        self.identity = self.elements[0]
        self.minus_one = self.elements[self._index[MINUS_ONE_QUAT]]
        self.r = self.elements[self._index[GEN_R]]
        self.s = self.elements[self._index[GEN_S]]
        self.t = self.elements[self._index[GEN_T]]

        self._rotations, self._rotation_of = _project_all(ordered)
        self.min_pairwise_distance = self._compute_min_distance()
        self.default_epsilon = self.min_pairwise_distance / 4.0

    # -- group law -----------------------------------------------------

    def multiply(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return self.elements[self.table[a.id, b.id]]

    def inverse(self, a: GroupElement) -> GroupElement:
        return self.elements[self.inverse_table[a.id]]

    def mul_id(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv_id(self, a: int) -> int:
        return int(self.inverse_table[a])

    def element_of(self, quat: ExactQuat) -> GroupElement:
        return self.elements[self._index[quat]]

    # -- double cover ----------------------------------------------------

    def project_to_rotation(self, a: GroupElement) -> RotationElement:
        return self._rotations[self._rotation_of[a.id]]

    @property
    def rotations(self) -> tuple[RotationElement, ...]:
        return self._rotations

    def rotation_fiber(self, rot: RotationElement) -> tuple[GroupElement, ...]:
        return tuple(g for g in self.elements if self._rotation_of[g.id] == rot.id)

    # -- snapping --------------------------------------------------------

    def nearest_element(self, q: np.ndarray) -> tuple[GroupElement, float]:
        """Group element minimizing chordal distance to q; ties to lowest id.

        q must be a unit quaternion up to 1e-6.
        """
        q = np.asarray(q, dtype=np.float64)
        norm = float(np.linalg.norm(q))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"quaternion norm {norm} too far from 1")
        dists = np.linalg.norm(self.float_quats - q, axis=1)
        best = int(np.argmin(dists))
        return self.elements[best], float(dists[best])

    # -- structure -------------------------------------------------------

    def _compute_min_distance(self) -> float:
        d = np.linalg.norm(
            self.float_quats[:, None, :] - self.float_quats[None, :, :], axis=2
        )
        np.fill_diagonal(d, np.inf)
        return float(d.min())

    def conjugacy_classes(self) -> list[frozenset[int]]:
        seen: set[int] = set()
        classes = []
        for a in range(GROUP_ORDER):
            if a in seen:
                continue
            orbit = frozenset(
                self.mul_id(self.mul_id(self.inv_id(g), a), g) for g in range(GROUP_ORDER)
            )
            classes.append(orbit)
            seen.update(orbit)
        return classes

    def class_index(self) -> np.ndarray:
        idx = np.zeros(GROUP_ORDER, dtype=np.int64)
        for ci, cls in enumerate(self.conjugacy_classes()):
            for a in cls:
                idx[a] = ci
        return idx

    def centralizer(self, a: int) -> list[int]:
        return [g for g in range(GROUP_ORDER) if self.mul_id(g, a) == self.mul_id(a, g)]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mul_id(x, a)
            k += 1
        return k

    def structure_report(self) -> dict:
        """Group statistics computed by exhaustion.

        Includes the optional non-splitness witness for the central
        extension by {1,-1}: any complement would need an order-2 element
        other than -1, and there is none.
        """
        n = GROUP_ORDER
        commutators = {
            self.mul_id(self.mul_id(self.mul_id(a, b), self.inv_id(a)), self.inv_id(b))
            for a in range(n)
            for b in range(n)
        }
        derived = _subgroup_closure(commutators, self.table)
        center = [g for g in range(n) if len(self.centralizer(g)) == n]
        classes = self.conjugacy_classes()
        order2 = [g for g in range(n) if g != 0 and self.mul_id(g, g) == 0]
        return {
            "order": n,
            "commutator_subgroup_order": len(derived),
            "abelianization_order": n // len(derived),
            "center": sorted(center),
            "center_order": len(center),
            "conjugacy_class_count": len(classes),
            "conjugacy_class_sizes": sorted(len(c) for c in classes),
            "order2_elements": sorted(order2),
            "central_extension_splits": len(order2) > 1,
            "min_pairwise_distance": self.min_pairwise_distance,
        }


def _closure() -> set[ExactQuat]:
    found = {IDENTITY_QUAT, GEN_R, GEN_S, GEN_T}
    frontier = list(found)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(found):
                for prod in (a * b, b * a):
                    if prod not in found:
                        found.add(prod)
                        nxt.append(prod)
        frontier = nxt
        if len(found) > 2 * GROUP_ORDER:
            raise RingError("closure runaway; generator arithmetic is broken")
    return found


def _project_all(ordered: list[ExactQuat]):
    rotations: list[RotationElement] = []
    rot_key_to_id: dict[bytes, int] = {}
    rotation_of = np.zeros(GROUP_ORDER, dtype=np.int64)
    for gid, q in enumerate(ordered):
        mat = q.rotation_matrix()
        if mat is None:
            raise RingError(f"element {gid} does not project to an integer matrix")
        key = mat.tobytes()
        if key not in rot_key_to_id:
            rid = len(rotations)
            rot_key_to_id[key] = rid
            mat.setflags(write=False)
            rotations.append(RotationElement(rid, mat))
        rotation_of[gid] = rot_key_to_id[key]
    if len(rotations) != ROTATION_ORDER:
        raise RingError(f"double cover image has {len(rotations)} rotations, expected 24")
    return tuple(rotations), rotation_of


def _subgroup_closure(seed: set[int], table: np.ndarray) -> set[int]:
    sub = set(seed) | {0}
    frontier = list(sub)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(sub):
                for c in (int(table[a, b]), int(table[b, a])):
                    if c not in sub:
                        sub.add(c)
                        nxt.append(c)
        frontier = nxt
    return sub


@lru_cache(maxsize=1)
def octa_group() -> OctaGroup:
    """The canonical group instance (built once per process)."""
    return OctaGroup()
