"""Proof search: ordered execution of a flow sequence, fair and
priority-driven scheduling, and bounded model enumeration."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .automata import (
    Nfa,
    StateCapExceeded,
    accepts,
    intersect,
    is_empty,
    is_universal,
    label_points,
    normalize,
    representatives,
    singleton_word,
    words_of_length,
)
from .calculus import (
    BWD,
    FWD,
    EquationalConstraint,
    PropRule,
    ProofTree,
    Sequent,
    expand,
)
from .functions import (
    COPY,
    Concat,
    NotFunctional,
    NotInDomain,
    ReplaceAll,
    Transducer,
    Var,
    backward_preimage,
    evaluate,
)
from .ordering import FlowSequence, try_marking

Model = dict[str, str]


class FlowMismatch(Exception):
    pass


@dataclass
class Budgets:
    wall_time: float = 60.0
    max_expansions: int = 100_000
    max_model_total_len: int = 12
    nfa_state_cap: int = 10_000

    def __post_init__(self):
        if min(self.wall_time, self.max_expansions, self.max_model_total_len, self.nfa_state_cap) <= 0:
            raise ValueError("budgets must be positive")


@dataclass
class PriorityWeights:
    w_concrete: float = 100.0
    w_info_gain: float = 50.0
    w_exactness: float = 50.0
    w_cost: float = 1.0
    w_fairness: float = 10.0


@dataclass
class Stats:
    expansions: int = 0
    closes: int = 0
    images: int = 0
    peak_states: int = 0
    enumerated: int = 0
    elapsed: float = 0.0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SolveResult:
    verdict: str  # "sat" | "unsat" | "unknown"
    model: Optional[Model] = None
    verified: bool = False
    proof: Optional[ProofTree] = None
    reason: str = ""
    stats: Stats = field(default_factory=Stats)
    strategy: str = ""
    trace: list[dict] = field(default_factory=list)

    def __str__(self) -> str:
        return self.verdict


class _Clock:
    def __init__(self, budgets: Budgets):
        self.start = time.monotonic()
        self.deadline = self.start + budgets.wall_time

    def expired(self) -> bool:
        return time.monotonic() > self.deadline

    def elapsed(self) -> float:
        return time.monotonic() - self.start


# ---------------------------------------------------------------------------
# models


def verify_model(original: Sequent, m: Model) -> bool:
    for v in original.variables:
        if v not in m:
            return False
    for v, a in original.constraints.items():
        if not accepts(a, m[v]):
            return False
    return all(e.holds(m) for e in original.equations)


def _function_points(e: EquationalConstraint) -> set[int]:
    f = e.rhs
    chars = ""
    pts: set[int] = set()
    if isinstance(f, Concat):
        chars = "".join(it for it in f.items if not isinstance(it, Var))
    elif isinstance(f, ReplaceAll):
        chars = f.pattern + f.replacement
    elif isinstance(f, Transducer):
        for t in f.transitions:
            if t.inp is not None:
                pts |= label_points([t.inp])
            pts |= {p for o in t.out if o != COPY for p in (o, o + 1)}
    pts |= {p for c in chars for p in (ord(c), ord(c) + 1)}
    return pts


def class_representatives(*seqs: Sequent) -> list[str]:
    """One character per block of the alphabet partition induced by every
    label and constant in ``seqs``; substituting each character by its
    representative maps models to models."""
    pts: set[int] = set()
    for s in seqs:
        for a in s.constraints.values():
            pts |= label_points(normalize(a).labels())
        for e in s.equations:
            pts |= _function_points(e)
    return representatives(pts, seqs[0].alphabet)


def _plan(seq: Sequent) -> list[tuple[str, object]]:
    determined: set[str] = set()
    pending = sorted(seq.equations, key=lambda e: e.id)
    steps: list[tuple[str, object]] = []
    while True:
        progress = True
        while progress:
            progress = False
            for e in list(pending):
                if all(v in determined for v in e.rhs_vars):
                    if e.lhs in determined:
                        steps.append(("check", e))
                    else:
                        steps.append(("compute", e))
                        determined.add(e.lhs)
                    pending.remove(e)
                    progress = True
        free = [v for v in seq.variables if v not in determined]
        if not free:
            return steps
        uses = {v: sum(e.rhs_vars.count(v) for e in pending) for v in free}
        v = max(free, key=lambda v: (uses[v], -seq.variables.index(v)))
        steps.append(("free", v))
        determined.add(v)


def iter_models(original: Sequent, hints: Sequent, max_total: int) -> Iterator[Optional[Model]]:
    """Search assignments by increasing total length of the freely chosen
    variables; the others are computed through equations. Yields ``None``
    as a heartbeat and a model when one verifies."""
    steps = _plan(hints)
    reps = class_representatives(original, hints)
    free_idx = [i for i, (k, _) in enumerate(steps) if k == "free"]
    last_free = free_idx[-1] if free_idx else -1
    langs = {v: intersect(original.constraint(v), hints.constraint(v)) for v in original.variables}
    if any(a.num_states == 0 for a in langs.values()):
        return
    cache: dict[tuple[str, int], list[str]] = {}
    counter = [0]

    def words(v: str, n: int) -> Iterator[str]:
        key = (v, n)
        got = cache.get(key)
        if got is not None:
            yield from got
            return
        buf = []
        for w in words_of_length(langs[v], n, reps):
            buf.append(w)
            yield w
        if len(buf) <= 50_000:
            cache[key] = buf

    def dfs(i: int, budget: int, m: Model) -> Iterator[Optional[Model]]:
        counter[0] += 1
        if counter[0] % 512 == 0:
            yield None
        if i == len(steps):
            if budget == 0 and verify_model(original, m):
                yield dict(m)
            return
        kind, obj = steps[i]
        if kind == "free":
            v = obj
            lengths = [budget] if i == last_free else range(budget + 1)
            for n in lengths:
                for w in words(v, n):
                    m[v] = w
                    yield from dfs(i + 1, budget - n, m)
                m.pop(v, None)
            return
        e: EquationalConstraint = obj
        try:
            val = evaluate(e.rhs, [m[v] for v in e.rhs_vars])
        except (NotInDomain, NotFunctional):
            return
        if kind == "check":
            if m[e.lhs] == val:
                yield from dfs(i + 1, budget, m)
            return
        if not accepts(langs[e.lhs], val):
            return
        m[e.lhs] = val
        yield from dfs(i + 1, budget, m)
        del m[e.lhs]

    for total in range(max_total + 1):
        if not free_idx and total > 0:
            return
        yield from dfs(0, total, {})
        yield None


def enumerate_models(original: Sequent, hints: Optional[Sequent] = None, max_total: int = 8, deadline: Optional[float] = None) -> Optional[Model]:
    """First verified model in deterministic order, or ``None``."""
    for m in iter_models(original, hints or original, max_total):
        if m is not None:
            return m
        if deadline is not None and time.monotonic() > deadline:
            return None
    return None


def reconstruct_model(original: Sequent, leaf: Sequent, flow: FlowSequence) -> Optional[Model]:
    """Build a model from an open leaf that survived the whole flow by
    replaying the flow backwards."""
    m: Model = {}

    def witness(v: str) -> Optional[str]:
        return is_empty(leaf.constraint(v))

    for step in reversed(flow.steps):
        e = leaf.eq(step.eq)
        if step.dir == BWD:
            for v in e.rhs_vars:
                if v not in m:
                    w = witness(v)
                    if w is None:
                        return None
                    m[v] = w
            try:
                m[e.lhs] = evaluate(e.rhs, [m[v] for v in e.rhs_vars])
            except (NotInDomain, NotFunctional):
                return None
        else:
            if e.lhs not in m:
                w = witness(e.lhs)
                if w is None:
                    return None
                m[e.lhs] = w
            rel = backward_preimage(e.rhs, Nfa.literal(m[e.lhs]), leaf.alphabet)
            for branch in rel.branches:
                picks = []
                for v, lang in zip(e.rhs_vars, branch):
                    w = is_empty(intersect(lang, leaf.constraint(v)))
                    if w is None:
                        break
                    picks.append(w)
                else:
                    m.update(zip(e.rhs_vars, picks))
                    break
            else:
                return None
    for v in leaf.variables:
        if v not in m:
            w = witness(v)
            if w is None:
                return None
            m[v] = w
    return m if verify_model(original, m) else None


# ---------------------------------------------------------------------------
# ordered execution


def _close_new(tree: ProofTree, ids: Sequence[int], stats: Stats) -> list[int]:
    still_open = []
    for c in ids:
        if tree.close(c) is not None:
            stats.closes += 1
        else:
            still_open.append(c)
            stats.peak_states = max(stats.peak_states, tree.nodes[c].sequent.total_states())
    return still_open


def solve_ordered(root: Sequent, flow: FlowSequence, b: Optional[Budgets] = None) -> SolveResult:
    b = b or Budgets()
    clock = _Clock(b)
    stats = Stats()
    ids = sorted(e.id for e in root.equations)
    if sorted(r.eq for r in flow) != ids:
        raise FlowMismatch("flow does not cover the equations exactly once")
    tree = ProofTree(root)
    stack: list[tuple[int, int]] = [(leaf, 0) for leaf in _close_new(tree, [0], stats)]
    result = None
    while stack:
        if clock.expired() or stats.expansions >= b.max_expansions:
            result = SolveResult("unknown", proof=tree, reason="budget exhausted")
            break
        leaf, pos = stack.pop()
        if pos == len(flow.steps):
            seq = tree.nodes[leaf].sequent
            m = reconstruct_model(root, seq, flow)
            if m is None:
                m = enumerate_models(root, seq, b.max_model_total_len, clock.deadline)
            result = SolveResult("sat", model=m, verified=m is not None, proof=tree)
            break
        step = flow.steps[pos]
        try:
            expand(tree, leaf, step, b.nfa_state_cap)
        except StateCapExceeded:
            result = SolveResult("unknown", proof=tree, reason="automaton state cap exceeded")
            break
        stats.expansions += 1
        stats.images += 1
        kids = _close_new(tree, tree.nodes[leaf].children, stats)
        stack.extend((c, pos + 1) for c in reversed(kids))
    if result is None:
        result = SolveResult("unsat", proof=tree)
    result.stats = stats
    result.strategy = "ordered"
    stats.elapsed = clock.elapsed()
    return result


# ---------------------------------------------------------------------------
# fair and priority scheduling


def _is_universal_constraint(s: Sequent, x: str) -> bool:
    a = s.constraints.get(x)
    if a is None:
        return True
    hit = a._cache.get("universal")
    if hit is None:
        hit = a.num_states <= 64 and is_universal(a, s.alphabet, 256)
        a._cache["universal"] = hit
    return hit


def _is_singleton(s: Sequent, x: str) -> bool:
    a = s.constraints.get(x)
    return a is not None and singleton_word(a) is not None


def _sources(e: EquationalConstraint, r: PropRule) -> tuple[str, ...]:
    return tuple(e.rhs_vars) if r.dir == FWD else (e.lhs,)


def _targets(e: EquationalConstraint, r: PropRule) -> tuple[str, ...]:
    return (e.lhs,) if r.dir == FWD else tuple(e.rhs_vars)


def priority_score(leaf: Sequent, r: PropRule, clocks: dict[PropRule, int], w: PriorityWeights) -> float:
    """Weighted preference for applying ``r`` at ``leaf``; higher is better.

    A singleton source counts fully for concreteness and a singleton target
    half, so that propagating out of a constant wins over propagating into
    one.
    """
    e = leaf.eq(r.eq)
    src, dst = _sources(e, r), _targets(e, r)
    if any(_is_singleton(leaf, v) for v in src):
        concrete = 1.0
    elif any(_is_singleton(leaf, v) for v in dst):
        concrete = 0.5
    else:
        concrete = 0.0
    uninformative = 1.0 if r.dir == BWD and _is_universal_constraint(leaf, e.lhs) else 0.0
    inexact = 0.0  # every image computed here is exact
    cost = sum(leaf.constraint(v).num_states for v in e.variables) / 100.0
    return w.w_concrete * concrete - w.w_info_gain * uninformative - w.w_exactness * inexact - w.w_cost * cost + w.w_fairness * clocks.get(r, 0)


TIE_BREAK = PriorityWeights()


class _Scheduler:
    def __init__(self, root: Sequent, b: Budgets, weights: Optional[PriorityWeights], record: bool):
        self.root = root
        self.b = b
        self.weights = weights
        self.record = record
        self.clock = _Clock(b)
        self.stats = Stats()
        self.tree = ProofTree(root)
        self.bound = 2 * len(root.equations)
        # per node: rule -> source-variable versions at its last application
        self.applied: dict[int, dict[PropRule, tuple[int, ...]]] = {0: {}}
        self.exhausted: set[int] = set()
        self.trace: list[dict] = []
        self.enum_time = 0.0
        self.root_models = iter_models(root, root, b.max_model_total_len)
        self.root_models_done = False

    def stale(self, nid: int, r: PropRule) -> bool:
        s = self.tree.nodes[nid].sequent
        e = s.eq(r.eq)
        last = self.applied[nid].get(r)
        return last is not None and last == tuple(s.version(v) for v in _sources(e, r))

    def pick_leaf(self, leaves: list[int]) -> int:
        nodes = self.tree.nodes
        return max(leaves, key=lambda n: (nodes[n].branch_clock, -n))

    def pick_rule(self, nid: int) -> tuple[Optional[PropRule], bool]:
        node = self.tree.nodes[nid]
        clocks = node.prop_clocks
        rules = self.tree.rules
        s = node.sequent
        if self.weights is None:
            # most overdue first; ties go to the better-scoring rule
            return max(rules, key=lambda r: (clocks[r], priority_score(s, r, {}, TIE_BREAK), -rules.index(r))), False
        live = [r for r in rules if not self.stale(nid, r)]
        tier0 = [r for r in live if not (r.dir == BWD and _is_universal_constraint(s, s.eq(r.eq).lhs))]
        pool = tier0 or live
        choice = None
        if pool:
            choice = max(pool, key=lambda r: (priority_score(s, r, clocks, self.weights), -rules.index(r)))
        # earliest-deadline check: keep every clock within the bound
        urgent = max(rules, key=lambda r: (clocks[r], -rules.index(r)))
        if choice is None or not self._feasible(clocks, choice):
            return urgent, choice is not None and urgent != choice
        return choice, False

    def _feasible(self, clocks: dict[PropRule, int], chosen: PropRule) -> bool:
        slack = sorted(self.bound - (c + 1) for r, c in clocks.items() if r != chosen)
        return all(d >= i for i, d in enumerate(slack))

    def log(self, **kw) -> None:
        if self.record:
            kw["open"] = len(self.tree.open_leaves())
            kw["max_branch_clock"] = max((self.tree.nodes[n].branch_clock for n in self.tree.open_leaves()), default=0)
            self.trace.append(kw)

    def run_root_enumeration(self, budget: float) -> Optional[Model]:
        if self.root_models_done:
            return None
        stop = min(self.clock.deadline, time.monotonic() + budget)
        t0 = time.monotonic()
        try:
            while time.monotonic() < stop:
                m = next(self.root_models)
                if m is not None:
                    return m
        except StopIteration:
            self.root_models_done = True
        finally:
            self.enum_time += time.monotonic() - t0
        return None

    def solve(self) -> SolveResult:
        tree, stats, b = self.tree, self.stats, self.b
        _close_new(tree, [0], stats)
        steps = 0
        while True:
            if tree.is_closed:
                return SolveResult("unsat", proof=tree)
            if self.clock.expired() or stats.expansions >= b.max_expansions or steps > 8 * b.max_expansions:
                return SolveResult("unknown", proof=tree, reason="budget exhausted")
            steps += 1
            elapsed = self.clock.elapsed()
            if self.enum_time < 0.3 * elapsed:
                m = self.run_root_enumeration(0.02 + 0.1 * elapsed)
                if m is not None:
                    return SolveResult("sat", model=m, verified=True, proof=tree)
            leaves = tree.open_leaves()
            if all(n in self.exhausted for n in leaves):
                if not self.root_models_done:
                    m = self.run_root_enumeration(self.clock.deadline - time.monotonic())
                    if m is not None:
                        return SolveResult("sat", model=m, verified=True, proof=tree)
                    if not self.root_models_done:
                        continue
                return SolveResult("unknown", proof=tree, reason="propagation saturated without a conflict or a model")
            nid = self.pick_leaf(leaves)
            node = tree.nodes[nid]
            if nid in self.exhausted:
                tree.tick(nid, max(tree.rules, key=lambda r: node.prop_clocks[r]))
                continue
            if not tree.rules:
                r, forced = None, False
            else:
                r, forced = self.pick_rule(nid)
            if r is None or (self.weights is None and all(self.stale(nid, x) for x in tree.rules)) or (self.weights is not None and not forced and self.stale(nid, r)):
                m = enumerate_models(self.root, node.sequent, b.max_model_total_len, self.clock.deadline)
                stats.enumerated += 1
                if m is not None:
                    return SolveResult("sat", model=m, verified=True, proof=tree)
                self.exhausted.add(nid)
                continue
            if self.stale(nid, r):
                self.log(leaf=nid, rule=r, forced=forced, kind="tick", clocks=dict(node.prop_clocks))
                tree.tick(nid, r)
                continue
            self.log(leaf=nid, rule=r, forced=forced, kind="expand", clocks=dict(node.prop_clocks))
            s = node.sequent
            e = s.eq(r.eq)
            versions = tuple(s.version(v) for v in _sources(e, r))
            try:
                expand(tree, nid, r, b.nfa_state_cap)
            except StateCapExceeded:
                return SolveResult("unknown", proof=tree, reason="automaton state cap exceeded")
            stats.expansions += 1
            stats.images += 1
            kids = node.children
            for c in kids:
                hist = dict(self.applied[nid])
                hist[r] = versions
                self.applied[c] = hist
            _close_new(tree, kids, stats)


def _search(root: Sequent, b: Optional[Budgets], weights: Optional[PriorityWeights], record: bool, name: str) -> SolveResult:
    sched = _Scheduler(root, b or Budgets(), weights, record)
    res = sched.solve()
    res.stats = sched.stats
    res.stats.elapsed = sched.clock.elapsed()
    res.strategy = name
    res.trace = sched.trace
    return res


def solve_fair(root: Sequent, b: Optional[Budgets] = None, record: bool = False) -> SolveResult:
    return _search(root, b, None, record, "fair")


def solve_priority(root: Sequent, b: Optional[Budgets] = None, w: Optional[PriorityWeights] = None, record: bool = False) -> SolveResult:
    return _search(root, b, w or PriorityWeights(), record, "priority")


def solve(root: Sequent, b: Optional[Budgets] = None, strategy: str = "auto", weights: Optional[PriorityWeights] = None) -> SolveResult:
    if strategy == "auto":
        flow = try_marking(root.equations)
        if flow is not None:
            return solve_ordered(root, flow, b)
        return solve_priority(root, b, weights)
    if strategy == "ordered":
        flow = try_marking(root.equations)
        if flow is None:
            return SolveResult("unknown", reason="equations are not orderable", strategy="ordered")
        return solve_ordered(root, flow, b)
    if strategy == "fair":
        return solve_fair(root, b)
    if strategy == "priority":
        return solve_priority(root, b, weights)
    raise ValueError(f"unknown strategy {strategy!r}")
