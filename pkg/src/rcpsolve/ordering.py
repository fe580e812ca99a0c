"""Fragment analysis: the marking algorithm that orders propagation steps,
the splitting-graph chain check, and the straight-line check."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .calculus import BWD, FWD, EquationalConstraint, PropRule
from .functions import Concat, ReplaceAll, Transducer, is_backwardable, is_forwardable


class NotOrderable(Exception):
    def __init__(self, stuck: Sequence[EquationalConstraint]):
        super().__init__(f"not orderable; stuck equations {[e.id for e in stuck]}")
        self.stuck = tuple(stuck)


class UnsupportedFunction(Exception):
    pass


@dataclass(frozen=True)
class FlowSequence:
    steps: tuple[PropRule, ...]

    def __iter__(self):
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def as_pairs(self) -> list[tuple[int, str]]:
        return [(r.eq, r.dir) for r in self.steps]


def occurrences(e: EquationalConstraint) -> list[str]:
    """Variable slots of an equation: the lhs, then every rhs occurrence."""
    if isinstance(e.rhs, Concat):
        return [e.lhs] + e.rhs.occurrences()
    return [e.lhs] + list(e.rhs_vars)


def _run_marking(eqs: Sequence[EquationalConstraint], allow_fwd: bool) -> tuple[list[PropRule], list[EquationalConstraint]]:
    remaining = sorted(eqs, key=lambda e: e.id)
    marked: set[str] = set()
    flow: list[PropRule] = []
    while True:
        before = len(marked)
        counts = Counter(v for e in remaining for v in occurrences(e))
        marked |= {v for v, c in counts.items() if c == 1}
        for e in list(remaining):
            if e.lhs in marked and is_backwardable(e.rhs):
                flow.append(PropRule(e.id, BWD))
                remaining.remove(e)
            elif allow_fwd and all(v in marked for v in e.rhs_vars) and is_forwardable(e.rhs):
                flow.append(PropRule(e.id, FWD))
                remaining.remove(e)
        if len(marked) == before:
            break
    return flow, remaining


def marking(eqs: Sequence[EquationalConstraint]) -> FlowSequence:
    """Order the equations into a flow sequence; raises NotOrderable."""
    flow, remaining = _run_marking(eqs, allow_fwd=True)
    if remaining:
        raise NotOrderable(remaining)
    return FlowSequence(tuple(flow))


def try_marking(eqs: Sequence[EquationalConstraint]) -> Optional[FlowSequence]:
    try:
        return marking(eqs)
    except NotOrderable:
        return None


def is_straight_line(eqs: Sequence[EquationalConstraint]) -> bool:
    _, remaining = _run_marking(eqs, allow_fwd=False)
    return not remaining


def check_flow(eqs: Sequence[EquationalConstraint], flow: FlowSequence) -> bool:
    """Replay ``flow`` against the trigger conditions of the marking loop:
    each step's variables must be unique among the equations left."""
    remaining = {e.id: e for e in eqs}
    if sorted(r.eq for r in flow) != sorted(remaining):
        return False
    marked: set[str] = set()
    for r in flow:
        e = remaining.get(r.eq)
        if e is None:
            return False
        counts = Counter(v for x in remaining.values() for v in occurrences(x))
        marked |= {v for v, c in counts.items() if c == 1}
        if r.dir == BWD:
            ok = e.lhs in marked
        else:
            ok = is_forwardable(e.rhs) and all(v in marked for v in e.rhs_vars)
        if not ok:
            return False
        del remaining[r.eq]
    return True


# ---------------------------------------------------------------------------
# splitting graph


@dataclass
class SplittingGraph:
    """Nodes are (side, position) pairs; side 2j-1 is the lhs of the j-th
    equation and side 2j its rhs."""

    nodes: list[tuple[int, int]] = field(default_factory=list)
    labels: dict[tuple[int, int], str] = field(default_factory=dict)
    edges: set[tuple[tuple[int, int], tuple[int, int]]] = field(default_factory=set)

    def successors(self, p: tuple[int, int]) -> list[tuple[int, int]]:
        return sorted(q for a, q in self.edges if a == p)


def _rhs_positions(e: EquationalConstraint) -> list[str]:
    if isinstance(e.rhs, Concat):
        return e.rhs.occurrences()
    if isinstance(e.rhs, (Transducer, ReplaceAll)):
        return list(e.rhs_vars)
    raise UnsupportedFunction(f"equation {e.id}: {e.rhs} is not a concatenation or transducer")


def build_splitting_graph(eqs: Sequence[EquationalConstraint]) -> SplittingGraph:
    g = SplittingGraph()
    sides: list[list[tuple[int, int]]] = []
    for j, e in enumerate(sorted(eqs, key=lambda e: e.id), start=1):
        for side, names in ((2 * j - 1, [e.lhs]), (2 * j, _rhs_positions(e))):
            nodes = []
            for i, v in enumerate(names, start=1):
                node = (side, i)
                g.nodes.append(node)
                g.labels[node] = v
                nodes.append(node)
            sides.append(nodes)
    by_label: dict[str, list[tuple[int, int]]] = {}
    for n in g.nodes:
        by_label.setdefault(g.labels[n], []).append(n)
    for k in range(0, len(sides), 2):
        lhs, rhs = sides[k], sides[k + 1]
        for here, there in ((lhs, rhs), (rhs, lhs)):
            for p in here:
                for p2 in there:
                    for q in by_label[g.labels[p2]]:
                        if q != p2:
                            g.edges.add((p, q))
    return g


def has_chain(g: SplittingGraph) -> bool:
    """Directed-cycle detection (self-loops count)."""
    succ: dict[tuple[int, int], list[tuple[int, int]]] = {n: [] for n in g.nodes}
    indeg = {n: 0 for n in g.nodes}
    for p, q in g.edges:
        succ[p].append(q)
        indeg[q] += 1
    queue = [n for n in g.nodes if indeg[n] == 0]
    seen = 0
    while queue:
        n = queue.pop()
        seen += 1
        for q in succ[n]:
            indeg[q] -= 1
            if indeg[q] == 0:
                queue.append(q)
    return seen != len(g.nodes)


def is_chain_free(eqs: Sequence[EquationalConstraint]) -> Optional[bool]:
    """``None`` when the equations fall outside concatenations and
    transducers."""
    try:
        return not has_chain(build_splitting_graph(eqs))
    except UnsupportedFunction:
        return None


@dataclass
class OrderReport:
    orderable: bool
    flow: Optional[FlowSequence]
    stuck: tuple[int, ...]
    straight_line: bool
    chain_free: Optional[bool]

    def to_json(self) -> str:
        data = {
            "verdict": "orderable" if self.orderable else "not_orderable",
            "flow": [[r.eq, r.dir] for r in self.flow] if self.flow else None,
            "stuck_equations": list(self.stuck),
            "straight_line": self.straight_line,
            "chain_free": "not-applicable" if self.chain_free is None else self.chain_free,
        }
        return json.dumps(data, indent=2)


def order_report(eqs: Sequence[EquationalConstraint]) -> OrderReport:
    try:
        flow = marking(eqs)
        stuck: tuple[int, ...] = ()
    except NotOrderable as err:
        flow = None
        stuck = tuple(e.id for e in err.stuck)
    return OrderReport(flow is not None, flow, stuck, is_straight_line(eqs), is_chain_free(eqs))
