"""Sequents, the propagation rules, and annotated proof trees."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence, Union

from .automata import (
    UNICODE,
    Alphabet,
    Nfa,
    accepts,
    compact,
    includes,
    intersect,
    is_finite,
    is_universal,
    iter_words,
    label_points,
    normalize,
    representatives,
)
from .functions import (
    COPY,
    Concat,
    NotForwardable,
    NotFunctional,
    NotInDomain,
    ReplaceAll,
    Reverse,
    StringFunction,
    Transducer,
    Var,
    backward_preimage,
    evaluate,
    forward_image,
    is_forwardable,
)

FWD = "fwd"
BWD = "bwd"


class CalculusError(Exception):
    pass


class LeafClosed(CalculusError):
    pass


@dataclass(frozen=True)
class EquationalConstraint:
    lhs: str
    rhs: StringFunction
    rhs_vars: tuple[str, ...]
    id: int

    def __post_init__(self):
        if len(self.rhs_vars) != self.rhs.arity:
            raise ValueError(f"equation {self.id}: {len(self.rhs_vars)} arguments for arity {self.rhs.arity}")
        if isinstance(self.rhs, Concat) and tuple(self.rhs.vars) != tuple(self.rhs_vars):
            raise ValueError(f"equation {self.id}: argument order must follow the term")

    @property
    def variables(self) -> tuple[str, ...]:
        return (self.lhs,) + tuple(v for v in self.rhs_vars if v != self.lhs)

    def holds(self, model: dict[str, str]) -> bool:
        try:
            return evaluate(self.rhs, [model[v] for v in self.rhs_vars]) == model[self.lhs]
        except (NotInDomain, NotFunctional):
            return False

    def __str__(self) -> str:
        if isinstance(self.rhs, Concat):
            return f"{self.lhs} = {self.rhs}"
        return f"{self.lhs} = {self.rhs}({', '.join(self.rhs_vars)})"


def equation(eid: int, lhs: str, rhs: StringFunction, args: Sequence[str] = ()) -> EquationalConstraint:
    """Convenience constructor; concat terms take their arguments from the term."""
    if isinstance(rhs, Concat):
        args = rhs.vars
    return EquationalConstraint(lhs, rhs, tuple(args), eid)


def concat_eq(eid: int, lhs: str, *items: str, consts: Iterable[int] = ()) -> EquationalConstraint:
    """``concat_eq(0, "y", "z", "u")`` builds y = z ++ u. Items whose index is
    in ``consts`` are constant words."""
    cs = set(consts)
    term = Concat(tuple(it if i in cs else Var(it) for i, it in enumerate(items)))
    return equation(eid, lhs, term)


class PropRule(NamedTuple):
    eq: int
    dir: str

    def __str__(self) -> str:
        return f"{self.dir}({self.eq})"


class Sequent:
    """Per-variable regular constraints plus the shared equation list.

    Absent variables are unconstrained. Instances are treated as immutable;
    every rule returns a new sequent that shares untouched automata.
    """

    __slots__ = ("variables", "constraints", "equations", "alphabet", "closed", "versions")

    def __init__(
        self,
        variables: Sequence[str],
        constraints: dict[str, Nfa],
        equations: Sequence[EquationalConstraint],
        alphabet: Alphabet = UNICODE,
        closed: bool = False,
        versions: Optional[dict[str, int]] = None,
    ):
        self.variables = tuple(variables)
        self.constraints = dict(constraints)
        self.equations = tuple(equations)
        self.alphabet = alphabet
        self.closed = closed
        self.versions = dict(versions) if versions else {}
        known = set(self.variables)
        for v in self.constraints:
            if v not in known:
                raise CalculusError(f"constraint on undeclared variable {v}")
        for e in self.equations:
            for v in e.variables:
                if v not in known:
                    raise CalculusError(f"equation {e.id} uses undeclared variable {v}")

    @classmethod
    def build(cls, constraints: dict[str, Nfa], equations: Sequence[EquationalConstraint] = (), alphabet: Alphabet = UNICODE, variables: Sequence[str] = ()) -> "Sequent":
        order: dict[str, None] = dict.fromkeys(variables)
        for e in equations:
            for v in e.variables:
                order.setdefault(v, None)
        for v in constraints:
            order.setdefault(v, None)
        return cls(list(order), {v: normalize(a) for v, a in constraints.items()}, list(equations), alphabet)

    def constraint(self, x: str) -> Nfa:
        a = self.constraints.get(x)
        return a if a is not None else Nfa.universal(self.alphabet)

    def version(self, x: str) -> int:
        return self.versions.get(x, 0)

    def eq(self, eid: int) -> EquationalConstraint:
        for e in self.equations:
            if e.id == eid:
                return e
        raise KeyError(eid)

    def _replace(self, constraints: dict[str, Nfa], versions: dict[str, int], closed: bool = False) -> "Sequent":
        s = Sequent.__new__(Sequent)
        s.variables = self.variables
        s.constraints = constraints
        s.equations = self.equations
        s.alphabet = self.alphabet
        s.closed = closed
        s.versions = versions
        return s

    def total_states(self) -> int:
        return sum(a.num_states for a in self.constraints.values())

    def __repr__(self) -> str:
        parts = [f"{v}∈{summarize(a)}" for v, a in self.constraints.items()]
        return f"Sequent({', '.join(parts)}{', closed' if self.closed else ''})"


def add_constraint(s: Sequent, x: str, a: Nfa, state_cap: int = 10_000) -> tuple[Sequent, bool]:
    if s.closed:
        raise LeafClosed("sequent is closed")
    old = s.constraints.get(x)
    if old is None:
        new = intersect(Nfa.universal(s.alphabet), a)
        changed = not is_universal(new, s.alphabet, state_cap)
    else:
        new = intersect(old, a)
        if new.num_states == 0:
            changed = old.num_states != 0
        elif new is old:
            changed = False
        else:
            changed = includes(new, old, state_cap).status != "yes"
    if not changed:
        return s, False
    constraints = dict(s.constraints)
    constraints[x] = compact(new)
    versions = dict(s.versions)
    versions[x] = versions.get(x, 0) + 1
    return s._replace(constraints, versions), True


def try_close(s: Sequent) -> Optional[tuple[str, Sequent]]:
    if s.closed:
        raise LeafClosed("sequent is closed")
    for v in s.variables:
        a = s.constraints.get(v)
        if a is not None and normalize(a).num_states == 0:
            return v, s._replace(s.constraints, s.versions, closed=True)
    return None


def apply_fwd(s: Sequent, eid: int, state_cap: int = 10_000) -> tuple[Sequent, bool]:
    e = s.eq(eid)
    if not is_forwardable(e.rhs):
        raise NotForwardable(f"equation {eid} is not forwardable")
    img = forward_image(e.rhs, [s.constraint(v) for v in e.rhs_vars], s.alphabet)
    return add_constraint(s, e.lhs, img, state_cap)


def apply_bwd(s: Sequent, eid: int, state_cap: int = 10_000) -> list[tuple[Sequent, bool]]:
    """One child per branch of the preimage; an empty list means the preimage
    is empty and the caller should close via an empty lhs constraint."""
    e = s.eq(eid)
    rel = backward_preimage(e.rhs, s.constraint(e.lhs), s.alphabet)
    out = []
    for branch in rel.branches:
        child = s
        changed = False
        for v, lang in zip(e.rhs_vars, branch):
            child, ch = add_constraint(child, v, lang, state_cap)
            changed = changed or ch
        out.append((child, changed))
    return out


def close_by_empty(s: Sequent, x: str) -> Sequent:
    child, _ = add_constraint(s, x, Nfa.empty())
    return child


# ---------------------------------------------------------------------------
# annotated proof trees


@dataclass
class ProofNode:
    id: int
    sequent: Optional[Sequent]
    parent: Optional[int]
    rule: Optional[dict] = None
    children: list[int] = field(default_factory=list)
    prop_clocks: dict[PropRule, int] = field(default_factory=dict)
    branch_clock: int = 0
    bottom: bool = False

    @property
    def is_leaf(self) -> bool:
        return not self.children


class ProofTree:
    """Derivation tree with per-leaf propagation and branch clocks.

    A Close step appends a bottom node under the closed leaf; open leaves are
    childless non-bottom nodes.
    """

    def __init__(self, root: Sequent):
        self.rules = all_rules(root.equations)
        self.nodes: list[ProofNode] = [ProofNode(0, root, None, prop_clocks={r: 0 for r in self.rules})]
        self._open: list[int] = [0]

    @property
    def root(self) -> ProofNode:
        return self.nodes[0]

    def open_leaves(self) -> list[int]:
        return list(self._open)

    @property
    def is_closed(self) -> bool:
        return not self._open

    def leaves(self) -> list[int]:
        return [n.id for n in self.nodes if n.is_leaf]

    def _add(self, parent: int, sequent: Optional[Sequent], rule: dict, prop_clocks, bottom: bool = False) -> int:
        nid = len(self.nodes)
        self.nodes.append(ProofNode(nid, sequent, parent, rule, prop_clocks=prop_clocks, bottom=bottom))
        self.nodes[parent].children.append(nid)
        return nid

    def _check_leaf(self, leaf: int) -> ProofNode:
        node = self.nodes[leaf]
        if leaf not in self._open:
            raise LeafClosed(f"node {leaf} is not an open leaf")
        return node

    def tick(self, leaf: int, rule: PropRule) -> None:
        """Record an application that left the sequent unchanged.

        Equivalent to an expansion with one child identical to the leaf,
        with the child merged into the leaf.
        """
        node = self._check_leaf(leaf)
        node.prop_clocks = {r: (0 if r == rule else c + 1) for r, c in node.prop_clocks.items()}
        for other in self._open:
            if other != leaf:
                self.nodes[other].branch_clock += 1
        node.branch_clock = 0

    def add_children(self, leaf: int, rule: PropRule, children: Sequence[Sequent], labels: Sequence[dict]) -> list[int]:
        node = self._check_leaf(leaf)
        clocks = {r: (0 if r == rule else c + 1) for r, c in node.prop_clocks.items()}
        for other in self._open:
            if other != leaf:
                self.nodes[other].branch_clock += 1
        ids = [self._add(leaf, s, lab, dict(clocks)) for s, lab in zip(children, labels)]
        pos = self._open.index(leaf)
        self._open[pos : pos + 1] = ids
        return ids

    def close(self, leaf: int) -> Optional[int]:
        """Apply Close to ``leaf`` if some constraint is empty."""
        node = self._check_leaf(leaf)
        hit = try_close(node.sequent)
        if hit is None:
            return None
        var, closed = hit
        node.sequent = closed
        self._add(leaf, None, {"kind": "close", "var": var}, {}, bottom=True)
        self._open.remove(leaf)
        return leaf


def all_rules(equations: Sequence[EquationalConstraint]) -> list[PropRule]:
    rules = []
    for e in equations:
        if is_forwardable(e.rhs):
            rules.append(PropRule(e.id, FWD))
        rules.append(PropRule(e.id, BWD))
    return rules


def expand(tree: ProofTree, leaf: int, action: Union[PropRule, str], state_cap: int = 10_000) -> ProofTree:
    """Apply one rule at an open leaf. Children are appended in place; the
    returned tree is ``tree`` itself. ``action`` is a PropRule or "close"."""
    if action == "close":
        if tree.close(leaf) is None:
            raise CalculusError(f"node {leaf} has no empty constraint")
        return tree
    rule = PropRule(*action)
    s = tree._check_leaf(leaf).sequent
    if rule.dir == FWD:
        child, changed = apply_fwd(s, rule.eq, state_cap)
        tree.add_children(leaf, rule, [child], [{"kind": FWD, "eq": rule.eq, "changed": changed}])
        return tree
    results = apply_bwd(s, rule.eq, state_cap)
    if not results:
        e = s.eq(rule.eq)
        tree.add_children(leaf, rule, [close_by_empty(s, e.lhs)], [{"kind": BWD, "eq": rule.eq, "branch": 1, "of": 1, "changed": True, "empty_relation": True}])
        return tree
    n = len(results)
    labels = [{"kind": BWD, "eq": rule.eq, "branch": k + 1, "of": n, "changed": ch} for k, (_, ch) in enumerate(results)]
    tree.add_children(leaf, rule, [c for c, _ in results], labels)
    return tree


# ---------------------------------------------------------------------------
# rendering


def summarize(a: Nfa, max_words: int = 4, max_len: int = 16) -> str:
    a = normalize(a)
    if a.num_states == 0:
        return "∅"
    if a.num_states <= 32 and is_finite(a):
        words = list(itertools.islice(iter_words(a, min(max_len, a.num_states)), max_words + 1))
        if len(words) <= max_words and all(_single_chars(a)):
            return "{" + ", ".join(_show(w) for w in words) + "}"
    if a.num_states <= 8 and is_universal(a, UNICODE, 64):
        return "Σ*"
    return f"NFA({a.num_states} states)"


def _single_chars(a: Nfa) -> Iterable[bool]:
    for label in a.labels():
        yield len(label) == 1 and label[0][0] == label[0][1]


def _show(w: str) -> str:
    return '""' if w == "" else w


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _rule_text(rule: dict, tree: ProofTree) -> str:
    eq = tree.root.sequent.eq(rule["eq"])
    if rule["kind"] == FWD:
        return f"Fwd-Prop on {eq}"
    return f"Bwd-Prop on {eq} ({rule['branch']}/{rule['of']})"


def export_dot(tree: ProofTree) -> str:
    """Deterministic DOT rendering; node ids are preorder indices. Bottom
    nodes are folded into their closed parent."""
    order: list[int] = []
    stack = [0]
    while stack:
        nid = stack.pop()
        node = tree.nodes[nid]
        if node.bottom:
            continue
        order.append(nid)
        stack.extend(reversed(node.children))
    pre = {nid: i for i, nid in enumerate(order)}
    lines = ["digraph proof {", '  node [shape=box, fontname="monospace"];']
    for nid in order:
        node = tree.nodes[nid]
        s = node.sequent
        parts = [f"{v} ∈ {summarize(s.constraints[v])}" for v in s.variables if v in s.constraints]
        label = "\\n".join(_dot_escape(p) for p in parts) or "⊤"
        if s.closed:
            label += "\\n[Close]"
        lines.append(f'  n{pre[nid]} [label="{label}"];')
    for nid in order:
        for c in tree.nodes[nid].children:
            child = tree.nodes[c]
            if child.bottom:
                continue
            lines.append(f'  n{pre[nid]} -> n{pre[c]} [label="{_dot_escape(_rule_text(child.rule, tree))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_shape(tree: ProofTree) -> tuple:
    """Nested (rule kinds, children) summary, used to compare derivations."""

    def go(nid: int):
        node = tree.nodes[nid]
        kids = [tree.nodes[c] for c in node.children]
        if kids and kids[0].bottom:
            return "close"
        return tuple((k.rule["kind"], go(k.id)) for k in kids)

    return go(0)


# ---------------------------------------------------------------------------
# proof replay


@dataclass
class Diagnostic:
    ok: bool
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _alphabet_reps(seqs: Sequence[Sequent], eq: EquationalConstraint) -> list[str]:
    pts: set[int] = set()
    for s in seqs:
        for a in s.constraints.values():
            pts |= label_points(normalize(a).labels())
    f = eq.rhs
    if isinstance(f, Concat):
        for it in f.items:
            if not isinstance(it, Var):
                pts |= {p for c in it for p in (ord(c), ord(c) + 1)}
    elif isinstance(f, ReplaceAll):
        pts |= {p for c in f.pattern + f.replacement for p in (ord(c), ord(c) + 1)}
    elif isinstance(f, Transducer):
        for t in f.transitions:
            if t.inp is not None:
                pts |= label_points([t.inp])
            pts |= {p for o in t.out if o != COPY for p in (o, o + 1)}
    return representatives(pts, seqs[0].alphabet)


def _bounded(a: Nfa, bound: int, reps: Sequence[str]) -> set[str]:
    return set(iter_words(a, bound, reps))


def _pick_bound(seq: Sequent, eq: EquationalConstraint, bound: int, reps, budget: int) -> int:
    b = bound
    while b > 0:
        total = 1
        for v in eq.rhs_vars:
            total *= max(1, sum(1 for _ in itertools.islice(iter_words(seq.constraint(v), b, reps), budget + 1)))
            if total > budget:
                break
        if total <= budget:
            return b
        b -= 1
    return 0


def _check_edge(tree: ProofTree, parent: ProofNode, bound: int, budget: int) -> Diagnostic:
    kids = [tree.nodes[c] for c in parent.children]
    if kids[0].bottom:
        var = kids[0].rule["var"]
        if normalize(parent.sequent.constraint(var)).num_states != 0:
            return Diagnostic(False, f"node {parent.id}: Close on {var} but its constraint is nonempty")
        return Diagnostic(True)
    rule = kids[0].rule
    ps = parent.sequent
    eq = ps.eq(rule["eq"])
    seqs = [ps] + [k.sequent for k in kids]
    reps = _alphabet_reps(seqs, eq)
    b = _pick_bound(ps, eq, bound, reps, budget)
    # children only shrink constraints
    for k in kids:
        for v in ps.variables:
            pa, ca = ps.constraint(v), k.sequent.constraint(v)
            extra = _bounded(ca, b, reps) - _bounded(pa, b, reps)
            if extra:
                return Diagnostic(False, f"node {k.id}: {v} gained {sorted(extra)[0]!r}")
            if v not in eq.variables and _bounded(pa, b, reps) != _bounded(ca, b, reps):
                return Diagnostic(False, f"node {k.id}: {v} changed but is not involved in equation {eq.id}")
    # every local model of the parent survives in some child
    arg_words = [sorted(_bounded(ps.constraint(v), b, reps)) for v in eq.rhs_vars]
    lhs_parent = ps.constraint(eq.lhs)
    produced = set()
    for args in itertools.product(*arg_words):
        env = dict(zip(eq.rhs_vars, args))
        try:
            val = evaluate(eq.rhs, list(args))
        except (NotInDomain, NotFunctional):
            continue
        if eq.lhs in env and env[eq.lhs] != val:
            continue
        produced.add(val)
        if not accepts(lhs_parent, val):
            continue
        env[eq.lhs] = val
        if not any(all(accepts(k.sequent.constraint(v), w) for v, w in env.items()) for k in kids):
            return Diagnostic(False, f"node {parent.id}: local model {env} lost by {rule['kind']} on equation {eq.id}")
    # exactness of the image where preimages of short words are short
    if rule["kind"] == FWD and _length_nondecreasing(eq.rhs):
        for w in _bounded(kids[0].sequent.constraint(eq.lhs), b, reps):
            if w not in produced:
                return Diagnostic(False, f"node {kids[0].id}: {w!r} is not in the image")
    if rule["kind"] == BWD and not rule.get("empty_relation"):
        for k in kids:
            slots = [sorted(_bounded(k.sequent.constraint(v), b, reps)) for v in eq.rhs_vars]
            for args in itertools.islice(itertools.product(*slots), budget):
                try:
                    val = evaluate(eq.rhs, list(args))
                except (NotInDomain, NotFunctional):
                    return Diagnostic(False, f"node {k.id}: {args} outside the domain")
                if not accepts(lhs_parent, val):
                    return Diagnostic(False, f"node {k.id}: {args} maps outside the lhs constraint")
    return Diagnostic(True)


def _length_nondecreasing(f: StringFunction) -> bool:
    if isinstance(f, (Concat, Reverse)):
        return True
    if isinstance(f, ReplaceAll):
        return len(f.replacement) >= len(f.pattern) > 0 or f.pattern == ""
    return False


def validate_proof(tree: ProofTree, bound: int = 6, budget: int = 50_000) -> Diagnostic:
    """Replay every edge of a closed tree with bounded enumeration.

    Characters are drawn from one representative per block of the alphabet
    partition induced by all labels involved, which is exhaustive for the
    languages and functions at hand.
    """
    if not tree.is_closed:
        return Diagnostic(False, "tree has open leaves")
    for node in tree.nodes:
        if node.bottom or not node.children:
            if not node.bottom and not node.sequent.closed:
                return Diagnostic(False, f"leaf {node.id} is not closed")
            continue
        d = _check_edge(tree, node, bound, budget)
        if not d:
            return d
    return Diagnostic(True)
