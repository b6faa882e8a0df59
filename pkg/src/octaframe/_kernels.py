"""Hot numeric kernels: covering-space lift scans and assignment enumeration.

Both kernels exist twice: a numba @njit build and a pure-numpy build.  The
environment flag OCTAFRAME_DISABLE_NUMBA=1 (or a missing numba install)
selects the numpy path; `backend()` reports which one is active.  The two
builds are exact drop-in replacements and are compared in
benchmarks/bench_kernels.py and tests/test_kernels.py.
"""

from __future__ import annotations

import os

import numpy as np

LIFT_OK = 0
LIFT_NO_CANDIDATE = 1
LIFT_AMBIGUOUS = 2

# Literal encoding shared with system.py: kind 0 = constant, 1 = variable,
# 2 = constant conjugated by a variable.
LIT_CONST = 0
LIT_VAR = 1
LIT_CONJ = 2


def _want_numba() -> bool:
    flag = os.environ.get("OCTAFRAME_DISABLE_NUMBA", "")
    return flag.strip().lower() not in ("1", "true", "yes")


# ----------------------------------------------------------------------
# pure-numpy builds


def quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product, broadcasting over leading axes."""
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def lift_chain_numpy(samples, start, group_quats, eps):
    """Lift a frame path through the 48-fold covering.

    samples: (n,4) representative quaternions of the path's frames.
    start: lift seed; must lie in the fiber of samples[0].
    Returns (end, status, bad_index).  For each sample the unique fiber
    point g*q within eps of the previous lift is chosen; status reports a
    missing (LIFT_NO_CANDIDATE) or ambiguous (LIFT_AMBIGUOUS) choice.
    """
    prev = np.asarray(start, dtype=np.float64)
    samples = np.asarray(samples, dtype=np.float64)
    for i in range(samples.shape[0]):
        fiber = quat_mul(group_quats, samples[i])
        dists = np.linalg.norm(fiber - prev, axis=1)
        hits = np.nonzero(dists < eps)[0]
        if hits.size == 0:
            return prev, LIFT_NO_CANDIDATE, i
        if hits.size > 1:
            return prev, LIFT_AMBIGUOUS, i
        prev = fiber[hits[0]]
    return prev, LIFT_OK, -1


def enumerate_assignments_numpy(
    n_vars, eq_kind, eq_a, eq_b, eq_exp, eq_offsets, table, inv
):
    """All satisfying assignments of an encoded monomial system.

    Variables range over the 48 group elements; assignments are flat
    indices into the 48**n_vars grid with variable 0 as the fastest digit.
    Returns a sorted int64 array of satisfying flat indices.
    """
    order = table.shape[0]
    total = order**n_vars
    grid = np.arange(total, dtype=np.int64)
    digits = [(grid // order**v) % order for v in range(n_vars)]
    ok = np.ones(total, dtype=bool)
    for e in range(len(eq_offsets) - 1):
        acc = np.zeros(total, dtype=np.int64)
        for k in range(eq_offsets[e], eq_offsets[e + 1]):
            kind, a, b, ex = eq_kind[k], eq_a[k], eq_b[k], eq_exp[k]
            if kind == LIT_CONST:
                val = np.full(total, a if ex > 0 else inv[a], dtype=np.int64)
            elif kind == LIT_VAR:
                val = digits[a] if ex > 0 else inv[digits[a]]
            else:
                c = b if ex > 0 else inv[b]
                val = table[table[inv[digits[a]], c], digits[a]]
            acc = table[acc, val]
        ok &= acc == 0
    return grid[ok]


# ----------------------------------------------------------------------
# numba builds

_HAVE_NUMBA = False
if _want_numba():
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        _HAVE_NUMBA = False

if _HAVE_NUMBA:

    @njit(cache=True)
    def _lift_chain_jit(samples, start, group_quats, eps):
        n = samples.shape[0]
        m = group_quats.shape[0]
        prev = start.copy()
        best = np.empty(4)
        for i in range(n):
            hits = 0
            qw, qx, qy, qz = samples[i, 0], samples[i, 1], samples[i, 2], samples[i, 3]
            for g in range(m):
                gw, gx, gy, gz = (
                    group_quats[g, 0],
                    group_quats[g, 1],
                    group_quats[g, 2],
                    group_quats[g, 3],
                )
                cw = gw * qw - gx * qx - gy * qy - gz * qz
                cx = gw * qx + gx * qw + gy * qz - gz * qy
                cy = gw * qy - gx * qz + gy * qw + gz * qx
                cz = gw * qz + gx * qy - gy * qx + gz * qw
                dw = cw - prev[0]
                dx = cx - prev[1]
                dy = cy - prev[2]
                dz = cz - prev[3]
                d = np.sqrt(dw * dw + dx * dx + dy * dy + dz * dz)
                if d < eps:
                    hits += 1
                    if hits > 1:
                        return prev, LIFT_AMBIGUOUS, i
                    best[0], best[1], best[2], best[3] = cw, cx, cy, cz
            if hits == 0:
                return prev, LIFT_NO_CANDIDATE, i
            prev[0], prev[1], prev[2], prev[3] = best[0], best[1], best[2], best[3]
        return prev, LIFT_OK, -1

    @njit(cache=True)
    def _enumerate_jit(n_vars, eq_kind, eq_a, eq_b, eq_exp, eq_offsets, table, inv):
        order = table.shape[0]
        total = 1
        for _ in range(n_vars):
            total *= order
        n_eqs = len(eq_offsets) - 1
        digits = np.zeros(n_vars, dtype=np.int64)
        found = np.empty(total, dtype=np.int64)
        n_found = 0
        for flat in range(total):
            sat = True
            for e in range(n_eqs):
                acc = 0
                for k in range(eq_offsets[e], eq_offsets[e + 1]):
                    kind = eq_kind[k]
                    if kind == LIT_CONST:
                        val = eq_a[k] if eq_exp[k] > 0 else inv[eq_a[k]]
                    elif kind == LIT_VAR:
                        x = digits[eq_a[k]]
                        val = x if eq_exp[k] > 0 else inv[x]
                    else:
                        x = digits[eq_a[k]]
                        c = eq_b[k] if eq_exp[k] > 0 else inv[eq_b[k]]
                        val = table[table[inv[x], c], x]
                    acc = table[acc, val]
                if acc != 0:
                    sat = False
                    break
            if sat:
                found[n_found] = flat
                n_found += 1
            # increment mixed-radix counter
            for v in range(n_vars):
                digits[v] += 1
                if digits[v] < order:
                    break
                digits[v] = 0
        return found[:n_found]

    def lift_chain_numba(samples, start, group_quats, eps):
        samples = np.ascontiguousarray(samples, dtype=np.float64)
        start = np.ascontiguousarray(start, dtype=np.float64)
        end, status, bad = _lift_chain_jit(samples, start, group_quats, eps)
        return end, int(status), int(bad)

    def enumerate_assignments_numba(
        n_vars, eq_kind, eq_a, eq_b, eq_exp, eq_offsets, table, inv
    ):
        return _enumerate_jit(
            n_vars, eq_kind, eq_a, eq_b, eq_exp, eq_offsets, table, inv
        )

else:
    lift_chain_numba = None
    enumerate_assignments_numba = None


if _HAVE_NUMBA:
    lift_chain = lift_chain_numba
    enumerate_assignments = enumerate_assignments_numba
else:
    lift_chain = lift_chain_numpy
    enumerate_assignments = enumerate_assignments_numpy


def backend() -> str:
    return "numba" if _HAVE_NUMBA else "numpy"
