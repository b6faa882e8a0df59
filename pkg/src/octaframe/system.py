"""Monomial equation systems over the 48-element group, and their solvers.

One equation per interior 2-cell: following the face cycle, each non-tree
interior edge contributes a variable literal, each non-tree boundary edge
contributes its constraint class conjugated by the free variable of its
boundary component (component 0's variable is pinned to the identity), and
tree edges contribute nothing.  The system is satisfiable exactly when the
constrained field extends.

`solve` runs unit propagation plus deterministic backtracking;
`exhaustive_solve` enumerates the full assignment grid and is the oracle
`solve` is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .group import GroupElement, OctaGroup, octa_group

DEFAULT_NODE_CAP = 10**8


@dataclass(frozen=True)
class Literal:
    """One factor of a monomial equation.

    kind 'const': fixed group element `const`.
    kind 'var':   interior-edge variable `key` (an edge id).
    kind 'conj':  const conjugated by component variable `key`.
    exponent: +1 or -1, the face-cycle sign of the edge.
    """

    kind: str
    key: int | None
    const: int | None
    exponent: int


@dataclass(frozen=True)
class MonomialEquation:
    face: int
    literals: tuple[Literal, ...]


@dataclass
class Assignment:
    edge_vars: dict[int, GroupElement] = field(default_factory=dict)
    component_vars: dict[int, GroupElement] = field(default_factory=dict)

    def value(self, lit: Literal, group: OctaGroup) -> int:
        if lit.kind == "const":
            v = lit.const
        elif lit.kind == "var":
            v = self.edge_vars[lit.key].id
        else:
            x = self.component_vars[lit.key].id if lit.key != 0 else 0
            v = group.mul_id(group.mul_id(group.inv_id(x), lit.const), x)
        return v if lit.exponent > 0 else group.inv_id(v)


@dataclass
class MonomialSystem:
    equations: list[MonomialEquation]
    edge_var_ids: list[int]  # interior non-tree edges, ascending
    component_var_ids: list[int]  # boundary components with free variables (>= 1)
    group: OctaGroup

    def stats(self) -> dict:
        return {
            "equations": len(self.equations),
            "edge_variables": len(self.edge_var_ids),
            "component_variables": len(self.component_var_ids),
        }


@dataclass
class SolveResult:
    verdict: str  # 'solvable' | 'unsolvable' | 'cap-exceeded'
    assignment: Assignment | None = None
    conflict: tuple[int, int] | None = None  # (face id, evaluated constant id)
    nodes: int = 0


class SystemError_(ValueError):
    pass


def build_system(cw, tree, classes: dict[int, GroupElement], group: OctaGroup | None = None) -> MonomialSystem:
    """Assemble one equation per interior face, literals in face-cycle order."""
    group = group or octa_group()
    comp_of_edge = {eid: e.component for eid, e in cw.edges.items()}
    boundary_nontree = set()
    for edges in tree.boundary_nontree_edges:
        boundary_nontree |= edges
    interior_vars = sorted(tree.interior_nontree_edges())
    equations = []
    for fid in cw.interior_faces():
        lits = []
        for eid, sign in cw.faces[fid].cycle:
            if eid in tree.tree_edges:
                continue
            if eid in boundary_nontree:
                if eid not in classes:
                    raise SystemError_(f"missing constraint class for boundary edge {eid}")
                lits.append(
                    Literal("conj", comp_of_edge[eid], classes[eid].id, sign)
                )
            else:
                lits.append(Literal("var", eid, None, sign))
        equations.append(MonomialEquation(fid, tuple(lits)))
    comp_vars = list(range(1, len(cw.boundary_components)))
    return MonomialSystem(equations, interior_vars, comp_vars, group)


# ----------------------------------------------------------------------
# backtracking solver


class _Search:
    def __init__(self, sys: MonomialSystem, max_nodes: int):
        self.sys = sys
        self.group = sys.group
        self.max_nodes = max_nodes
        self.nodes = 0
        self.first_conflict: tuple[int, int] | None = None
        # variable slots: component vars first (ascending), then edge vars
        self.vars: list[tuple[str, int]] = [("x", i) for i in sys.component_var_ids]
        self.vars += [("y", e) for e in sys.edge_var_ids]
        self.slot = {v: k for k, v in enumerate(self.vars)}
        self.values: list[int | None] = [None] * len(self.vars)
        self.eq_unknowns: list[set[int]] = []
        self.satisfied: list[bool] = [False] * len(sys.equations)
        for eq in sys.equations:
            unk = set()
            for lit in eq.literals:
                if lit.kind == "var":
                    unk.add(self.slot[("y", lit.key)])
                elif lit.kind == "conj" and lit.key != 0:
                    unk.add(self.slot[("x", lit.key)])
            self.eq_unknowns.append(unk)

    def lit_value(self, lit: Literal) -> int | None:
        g = self.group
        if lit.kind == "const":
            v = lit.const
        elif lit.kind == "var":
            v = self.values[self.slot[("y", lit.key)]]
        else:
            x = 0 if lit.key == 0 else self.values[self.slot[("x", lit.key)]]
            if x is None:
                return None
            v = g.mul_id(g.mul_id(g.inv_id(x), lit.const), x)
        if v is None:
            return None
        return v if lit.exponent > 0 else g.inv_id(v)

    def eval_forced(self, ei: int):
        """(state, payload): 'sat'/'conflict'/(slot to force, value)/'open'."""
        g = self.group
        eq = self.sys.equations[ei]
        unknown_var = None
        prefix = 0
        pending: list[Literal] = []
        for lit in eq.literals:
            v = self.lit_value(lit)
            if v is None:
                if unknown_var is not None or lit.kind != "var":
                    return "open", None
                unknown_var = lit
                pending = []
                continue
            if unknown_var is None:
                prefix = g.mul_id(prefix, v)
            else:
                pending.append(lit)
        if unknown_var is None:
            if prefix == 0:
                return "sat", None
            return "conflict", (eq.face, prefix)
        suffix = 0
        for lit in pending:
            suffix = g.mul_id(suffix, self.lit_value(lit))
        # prefix * y^e * suffix = 1
        ba = g.mul_id(suffix, prefix)
        y = g.inv_id(ba) if unknown_var.exponent > 0 else ba
        return "force", (self.slot[("y", unknown_var.key)], y)

    def propagate(self, trail: list[int]) -> bool:
        """Runs units to fixpoint; False on conflict.  trail collects slots
        assigned here so the caller can undo them."""
        changed = True
        while changed:
            changed = False
            for ei in range(len(self.sys.equations)):
                if self.satisfied[ei]:
                    continue
                state, payload = self.eval_forced(ei)
                if state == "sat":
                    self.satisfied[ei] = True
                    trail.append(-(ei + 1))  # equation marker
                elif state == "conflict":
                    if self.first_conflict is None:
                        self.first_conflict = payload
                    return False
                elif state == "force":
                    slot, val = payload
                    if self.values[slot] is None:
                        self.values[slot] = val
                        trail.append(slot)
                        changed = True
                    elif self.values[slot] != val:
                        if self.first_conflict is None:
                            self.first_conflict = (self.sys.equations[ei].face, -1)
                        return False
        return True

    def undo(self, trail: list[int]) -> None:
        for entry in reversed(trail):
            if entry < 0:
                self.satisfied[-entry - 1] = False
            else:
                self.values[entry] = None

    def next_slot(self) -> int | None:
        """Lowest-ordered unassigned variable that still constrains an
        unsatisfied equation; free variables are skipped and defaulted."""
        active: set[int] = set()
        for ei, unk in enumerate(self.eq_unknowns):
            if not self.satisfied[ei]:
                active |= {s for s in unk if self.values[s] is None}
        if not active:
            return None
        return min(active)

    def run(self) -> SolveResult:
        trail: list[int] = []
        if not self.propagate(trail):
            return SolveResult("unsolvable", conflict=self.first_conflict, nodes=self.nodes)
        status = self._dfs()
        if status == "cap":
            return SolveResult("cap-exceeded", nodes=self.nodes)
        if status == "sat":
            return SolveResult("solvable", assignment=self._extract(), nodes=self.nodes)
        return SolveResult("unsolvable", conflict=self.first_conflict, nodes=self.nodes)

    def _dfs(self) -> str:
        slot = self.next_slot()
        if slot is None:
            if all(self.satisfied):
                return "sat"
            # equations left with no unknowns must all be satisfied; check
            for ei in range(len(self.satisfied)):
                if not self.satisfied[ei]:
                    state, payload = self.eval_forced(ei)
                    if state == "conflict":
                        if self.first_conflict is None:
                            self.first_conflict = payload
                        return "unsat"
                    if state == "sat":
                        self.satisfied[ei] = True
            return "sat" if all(self.satisfied) else "unsat"
        for val in range(48):
            self.nodes += 1
            if self.nodes > self.max_nodes:
                return "cap"
            trail: list[int] = [slot]
            self.values[slot] = val
            if self.propagate(trail):
                got = self._dfs()
                if got in ("sat", "cap"):
                    return got
            self.undo(trail)
        return "unsat"

    def _extract(self) -> Assignment:
        g = self.group
        out = Assignment()
        for (kind, key), val in zip(self.vars, self.values):
            elem = g.elements[0 if val is None else val]
            if kind == "x":
                out.component_vars[key] = elem
            else:
                out.edge_vars[key] = elem
        for e in self.sys.edge_var_ids:
            out.edge_vars.setdefault(e, g.identity)
        for i in self.sys.component_var_ids:
            out.component_vars.setdefault(i, g.identity)
        return out


def check_assignment(sys: MonomialSystem, asg: Assignment) -> bool:
    g = sys.group
    for eq in sys.equations:
        acc = 0
        for lit in eq.literals:
            acc = g.mul_id(acc, asg.value(lit, g))
        if acc != 0:
            return False
    return True


def solve(sys: MonomialSystem, max_nodes: int = DEFAULT_NODE_CAP) -> SolveResult:
    """First satisfying assignment in canonical order, or unsolvable with a
    conflict certificate, or cap-exceeded."""
    result = _Search(sys, max_nodes).run()
    if result.verdict == "solvable":
        assert check_assignment(sys, result.assignment), "solver returned bad witness"
    return result


# ----------------------------------------------------------------------
# exhaustive oracle


def _encode(sys: MonomialSystem):
    slot = {}
    for i in sys.component_var_ids:
        slot[("x", i)] = len(slot)
    for e in sys.edge_var_ids:
        slot[("y", e)] = len(slot)
    kinds, a_, b_, exps, offsets = [], [], [], [], [0]
    for eq in sys.equations:
        for lit in eq.literals:
            if lit.kind == "const":
                kinds.append(_kernels.LIT_CONST)
                a_.append(lit.const)
                b_.append(0)
            elif lit.kind == "var":
                kinds.append(_kernels.LIT_VAR)
                a_.append(slot[("y", lit.key)])
                b_.append(0)
            elif lit.key == 0:
                kinds.append(_kernels.LIT_CONST)
                a_.append(lit.const)
                b_.append(0)
            else:
                kinds.append(_kernels.LIT_CONJ)
                a_.append(slot[("x", lit.key)])
                b_.append(lit.const)
            exps.append(lit.exponent)
        offsets.append(len(kinds))
    arr = lambda x: np.asarray(x, dtype=np.int64)
    return len(slot), slot, (arr(kinds), arr(a_), arr(b_), arr(exps), arr(offsets))


def exhaustive_solve(sys: MonomialSystem, max_unknowns: int = 4) -> list[Assignment]:
    """Every satisfying assignment, by full enumeration of the grid."""
    n_vars, slot, enc = _encode(sys)
    if n_vars > max_unknowns:
        raise SystemError_(f"{n_vars} unknowns exceed the exhaustive limit {max_unknowns}")
    g = sys.group
    flat = _kernels.enumerate_assignments(n_vars, *enc, g.table, g.inverse_table)
    out = []
    inv_slot = {v: k for k, v in slot.items()}
    for f in np.asarray(flat).tolist():
        asg = Assignment()
        for s in range(n_vars):
            kind, key = inv_slot[s]
            val = (f // 48**s) % 48
            if kind == "x":
                asg.component_vars[key] = g.elements[val]
            else:
                asg.edge_vars[key] = g.elements[val]
        for i in sys.component_var_ids:
            asg.component_vars.setdefault(i, g.identity)
        for e in sys.edge_var_ids:
            asg.edge_vars.setdefault(e, g.identity)
        out.append(asg)
    return out


# ----------------------------------------------------------------------
# dump format


def dump_system(sys: MonomialSystem) -> str:
    """One line per equation: `F: lit lit ...` with y<e> / Y<e> for a
    variable and its inverse, [i]c<id> / [i]C<id> for conjugated constants."""
    lines = []
    for eq in sys.equations:
        parts = []
        for lit in eq.literals:
            if lit.kind == "var":
                parts.append(f"y{lit.key}" if lit.exponent > 0 else f"Y{lit.key}")
            elif lit.kind == "conj":
                c = "c" if lit.exponent > 0 else "C"
                parts.append(f"[{lit.key}]{c}{lit.const}")
            else:
                c = "c" if lit.exponent > 0 else "C"
                parts.append(f"{c}{lit.const}")
        lines.append(f"{eq.face}: " + " ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


def dump_assignment(asg: Assignment) -> str:
    lines = [f"x{i}={g.id}" for i, g in sorted(asg.component_vars.items())]
    lines += [f"y{e}={g.id}" for e, g in sorted(asg.edge_vars.items())]
    return "\n".join(lines) + ("\n" if lines else "")


def merge_consistency(mesh, graph, frames, transport_path=None, group=None) -> dict:
    """Solve the same instance with and without merging; verdicts must agree."""
    from .pipeline import run_check

    merged = run_check(mesh, graph, frames, merge=True, transport_path=transport_path)
    plain = run_check(mesh, graph, frames, merge=False, transport_path=transport_path)
    return {
        "merged_verdict": merged.verdict,
        "unmerged_verdict": plain.verdict,
        "agree": merged.verdict == plain.verdict,
    }
