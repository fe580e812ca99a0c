"""Regular-language engine over codepoint interval labels.

Every transition label is a sorted tuple of disjoint, non-adjacent
``(lo, hi)`` codepoint intervals, so large character classes stay compact.
Automata are immutable once built; derived forms (epsilon-free, trimmed)
are cached on the instance.
"""

from __future__ import annotations

import bisect
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

# SMT-LIB 2.6 strings range over codepoints 0 .. 0x2FFFF.
MAX_CODEPOINT = 0x2FFFF
DEFAULT_STATE_CAP = 10_000

Interval = tuple[int, int]
Label = tuple[Interval, ...]


class AutomataError(Exception):
    pass


class AlphabetMismatch(AutomataError):
    pass


class StateCapExceeded(AutomataError):
    def __init__(self, cap: int):
        super().__init__(f"determinization exceeded {cap} states")
        self.cap = cap


# ---------------------------------------------------------------------------
# interval sets


def iv_norm(ivs: Iterable[Interval]) -> Label:
    out: list[list[int]] = []
    for lo, hi in sorted(ivs):
        if lo > hi:
            continue
        if out and lo <= out[-1][1] + 1:
            if hi > out[-1][1]:
                out[-1][1] = hi
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


def iv_inter(a: Label, b: Label) -> Label:
    i = j = 0
    out = []
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return tuple(out)


def iv_union(a: Label, b: Label) -> Label:
    return iv_norm(a + b)


def iv_diff(a: Label, b: Label) -> Label:
    out = []
    j = 0
    for lo, hi in a:
        cur = lo
        while j < len(b) and b[j][1] < cur:
            j += 1
        k = j
        while k < len(b) and b[k][0] <= hi and cur <= hi:
            if b[k][0] > cur:
                out.append((cur, b[k][0] - 1))
            cur = max(cur, b[k][1] + 1)
            k += 1
        if cur <= hi:
            out.append((cur, hi))
    return tuple(out)


def iv_contains(a: Label, c: int) -> bool:
    i = bisect.bisect_right(a, (c, MAX_CODEPOINT + 1)) - 1
    return i >= 0 and a[i][0] <= c <= a[i][1]


def iv_size(a: Label) -> int:
    return sum(hi - lo + 1 for lo, hi in a)


def iv_chars(a: Label) -> Iterator[int]:
    for lo, hi in a:
        yield from range(lo, hi + 1)


def char_label(c: int) -> Label:
    return ((c, c),)


# ---------------------------------------------------------------------------
# alphabets


@dataclass(frozen=True)
class Alphabet:
    kind: str
    intervals: Label

    @classmethod
    def unicode(cls) -> "Alphabet":
        return cls("unicode", ((0, MAX_CODEPOINT),))

    @classmethod
    def ascii(cls) -> "Alphabet":
        return cls("ascii", ((0, 127),))

    @classmethod
    def custom(cls, chars: Iterable[str | int]) -> "Alphabet":
        cps = [ord(c) if isinstance(c, str) else c for c in chars]
        if not cps:
            raise ValueError("alphabet must be nonempty")
        return cls("custom", iv_norm((c, c) for c in cps))

    def __contains__(self, c: int | str) -> bool:
        if isinstance(c, str):
            c = ord(c)
        return iv_contains(self.intervals, c)

    def chars(self) -> list[str]:
        if iv_size(self.intervals) > 4096:
            raise ValueError(f"{self.kind} alphabet is too large to list")
        return [chr(c) for c in iv_chars(self.intervals)]


UNICODE = Alphabet.unicode()
ASCII = Alphabet.ascii()


# ---------------------------------------------------------------------------
# regular expression syntax trees


class RegexAst:
    __slots__ = ()


@dataclass(frozen=True)
class ReEmpty(RegexAst):
    pass


@dataclass(frozen=True)
class ReEpsilon(RegexAst):
    pass


@dataclass(frozen=True)
class ReLit(RegexAst):
    word: str


@dataclass(frozen=True)
class ReClass(RegexAst):
    intervals: Label


@dataclass(frozen=True)
class ReConcat(RegexAst):
    items: tuple[RegexAst, ...]


@dataclass(frozen=True)
class ReUnion(RegexAst):
    items: tuple[RegexAst, ...]


@dataclass(frozen=True)
class ReInter(RegexAst):
    items: tuple[RegexAst, ...]


@dataclass(frozen=True)
class ReStar(RegexAst):
    child: RegexAst


@dataclass(frozen=True)
class RePlus(RegexAst):
    child: RegexAst


@dataclass(frozen=True)
class ReOpt(RegexAst):
    child: RegexAst


@dataclass(frozen=True)
class ReComp(RegexAst):
    child: RegexAst


@dataclass(frozen=True)
class ReAllChar(RegexAst):
    pass


@dataclass(frozen=True)
class ReAll(RegexAst):
    pass


class RegexSyntaxError(ValueError):
    pass


def parse_regex(text: str) -> RegexAst:
    """Parse a compact textual regex.

    Supported: literals, ``\\`` escapes, ``.``, ``[a-z]`` / ``[^...]`` classes,
    grouping, ``|`` union, ``&`` intersection, prefix ``~`` complement and the
    postfix operators ``* + ?``. ``()`` is the empty word and ``[]`` the empty
    language.
    """
    pos = 0

    def peek() -> Optional[str]:
        return text[pos] if pos < len(text) else None

    def take() -> str:
        nonlocal pos
        if pos >= len(text):
            raise RegexSyntaxError("unexpected end of regex")
        ch = text[pos]
        pos += 1
        return ch

    def union() -> RegexAst:
        items = [inter()]
        while peek() == "|":
            take()
            items.append(inter())
        return items[0] if len(items) == 1 else ReUnion(tuple(items))

    def inter() -> RegexAst:
        items = [concat()]
        while peek() == "&":
            take()
            items.append(concat())
        return items[0] if len(items) == 1 else ReInter(tuple(items))

    def concat() -> RegexAst:
        items = []
        while peek() is not None and peek() not in "|&)":
            items.append(postfix())
        if not items:
            return ReEpsilon()
        return items[0] if len(items) == 1 else ReConcat(tuple(items))

    def postfix() -> RegexAst:
        node = prefix()
        while peek() in ("*", "+", "?"):
            op = take()
            node = {"*": ReStar, "+": RePlus, "?": ReOpt}[op](node)
        return node

    def prefix() -> RegexAst:
        if peek() == "~":
            take()
            return ReComp(prefix())
        return atom()

    def atom() -> RegexAst:
        ch = take()
        if ch == "(":
            node = union()
            if take() != ")":
                raise RegexSyntaxError(f"expected ')' at {pos}")
            return node
        if ch == "[":
            return char_class()
        if ch == ".":
            return ReAllChar()
        if ch == "\\":
            return ReLit(take())
        if ch in ")*+?|&":
            raise RegexSyntaxError(f"unexpected {ch!r} at {pos - 1}")
        return ReLit(ch)

    def char_class() -> RegexAst:
        negate = False
        if peek() == "^":
            take()
            negate = True
        ivs = []
        while peek() != "]":
            lo = take()
            if lo == "\\":
                lo = take()
            hi = lo
            if peek() == "-" and pos + 1 < len(text) and text[pos + 1] != "]":
                take()
                hi = take()
                if hi == "\\":
                    hi = take()
            ivs.append((ord(lo), ord(hi)))
        take()
        label = iv_norm(ivs)
        if negate:
            return ReInter((ReAllChar(), ReComp(ReClass(label)))) if label else ReAllChar()
        return ReClass(label)

    node = union()
    if pos != len(text):
        raise RegexSyntaxError(f"trailing input at {pos}")
    return node


# ---------------------------------------------------------------------------
# automata


class Nfa:
    """Nondeterministic automaton with interval-labelled and epsilon edges.

    ``trans[q]`` is a tuple of ``(label, dst)`` pairs and ``eps[q]`` a tuple of
    epsilon successors.
    """

    __slots__ = ("num_states", "initial", "final", "trans", "eps", "_cache")

    def __init__(self, num_states, initial, final, trans, eps=None):
        self.num_states = num_states
        self.initial = frozenset(initial)
        self.final = frozenset(final)
        self.trans = tuple(tuple(ts) for ts in trans)
        if eps is None:
            self.eps = ((),) * num_states
        else:
            self.eps = tuple(tuple(e) for e in eps)
        self._cache: dict = {}
        if len(self.trans) != num_states or len(self.eps) != num_states:
            raise AutomataError("transition table size mismatch")

    def __repr__(self) -> str:
        return f"Nfa(states={self.num_states}, initial={sorted(self.initial)}, final={sorted(self.final)})"

    @property
    def has_epsilon(self) -> bool:
        return any(self.eps)

    def edges(self) -> Iterator[tuple[int, Label, int]]:
        for q, ts in enumerate(self.trans):
            for label, d in ts:
                yield q, label, d

    def labels(self) -> Iterator[Label]:
        for ts in self.trans:
            for label, _ in ts:
                yield label

    # convenience constructors

    @staticmethod
    def empty() -> "Nfa":
        return _EMPTY

    @staticmethod
    def epsilon() -> "Nfa":
        return Nfa(1, [0], [0], [()])

    @staticmethod
    def literal(word: str) -> "Nfa":
        n = len(word) + 1
        trans = [((char_label(ord(c)), i + 1),) for i, c in enumerate(word)] + [()]
        return Nfa(n, [0], [n - 1], trans)

    @staticmethod
    def char_class(label: Label) -> "Nfa":
        if not label:
            return _EMPTY
        return Nfa(2, [0], [1], [((label, 1),), ()])

    @staticmethod
    def universal(alphabet: Alphabet = UNICODE) -> "Nfa":
        return Nfa(1, [0], [0], [((alphabet.intervals, 0),)])

    @staticmethod
    def from_words(words: Iterable[str]) -> "Nfa":
        b = _Builder()
        root = b.state()
        finals = set()
        trie: dict[tuple[int, int], int] = {}
        for w in words:
            q = root
            for c in w:
                key = (q, ord(c))
                if key not in trie:
                    nxt = b.state()
                    trie[key] = nxt
                    b.edge(q, char_label(ord(c)), nxt)
                q = trie[key]
            finals.add(q)
        return b.build([root], finals)


_EMPTY = Nfa(0, [], [], [])


class _Builder:
    def __init__(self):
        self.trans: list[list] = []
        self.eps: list[list] = []

    def state(self) -> int:
        self.trans.append([])
        self.eps.append([])
        return len(self.trans) - 1

    def edge(self, src: int, label: Label, dst: int) -> None:
        if label:
            self.trans[src].append((label, dst))

    def eps_edge(self, src: int, dst: int) -> None:
        self.eps[src].append(dst)

    def copy_in(self, a: Nfa) -> int:
        """Copy all states of ``a``; returns the offset of its state 0."""
        off = len(self.trans)
        for q in range(a.num_states):
            self.trans.append([(label, d + off) for label, d in a.trans[q]])
            self.eps.append([d + off for d in a.eps[q]])
        return off

    def build(self, initial, final) -> Nfa:
        return Nfa(len(self.trans), initial, final, self.trans, self.eps)


def _merge_parallel(ts: Iterable[tuple[Label, int]]) -> tuple[tuple[Label, int], ...]:
    by_dst: dict[int, list[Interval]] = {}
    for label, d in ts:
        by_dst.setdefault(d, []).extend(label)
    return tuple(sorted(((iv_norm(ivs), d) for d, ivs in by_dst.items()), key=lambda t: (t[0][0][0], t[1])))


def trim(a: Nfa) -> Nfa:
    """Drop states that are unreachable or cannot reach a final state."""
    n = a.num_states
    fwd = set(a.initial)
    stack = list(a.initial)
    while stack:
        q = stack.pop()
        for _, d in a.trans[q]:
            if d not in fwd:
                fwd.add(d)
                stack.append(d)
        for d in a.eps[q]:
            if d not in fwd:
                fwd.add(d)
                stack.append(d)
    rev: list[list[int]] = [[] for _ in range(n)]
    for q in fwd:
        for _, d in a.trans[q]:
            rev[d].append(q)
        for d in a.eps[q]:
            rev[d].append(q)
    live = {q for q in a.final if q in fwd}
    stack = list(live)
    while stack:
        q = stack.pop()
        for p in rev[q]:
            if p not in live:
                live.add(p)
                stack.append(p)
    if not live:
        return _EMPTY
    if len(live) == n:
        return a
    order = sorted(live)
    ren = {q: i for i, q in enumerate(order)}
    trans = [[(label, ren[d]) for label, d in a.trans[q] if d in ren] for q in order]
    eps = [[ren[d] for d in a.eps[q] if d in ren] for q in order]
    return Nfa(len(order), [ren[q] for q in a.initial if q in ren], [ren[q] for q in a.final if q in ren], trans, eps)


def _eps_closures(a: Nfa) -> list[frozenset[int]]:
    out = []
    for q in range(a.num_states):
        seen = {q}
        stack = [q]
        while stack:
            p = stack.pop()
            for d in a.eps[p]:
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
        out.append(frozenset(seen))
    return out


def normalize(a: Nfa) -> Nfa:
    """Epsilon-free, trimmed equivalent of ``a`` (cached)."""
    cached = a._cache.get("norm")
    if cached is not None:
        return cached
    if not a.has_epsilon:
        res = trim(a)
    else:
        cl = _eps_closures(a)
        trans = []
        final = []
        for q in range(a.num_states):
            trans.append(_merge_parallel(t for p in cl[q] for t in a.trans[p]))
            if cl[q] & a.final:
                final.append(q)
        res = trim(Nfa(a.num_states, a.initial, final, trans))
    res._cache["norm"] = res
    a._cache["norm"] = res
    return res


def single_initial(a: Nfa) -> Nfa:
    """Epsilon-free trimmed automaton with exactly one initial state."""
    a = normalize(a)
    if len(a.initial) <= 1:
        return a
    n = a.num_states
    merged = _merge_parallel(t for q in a.initial for t in a.trans[q])
    final = set(a.final)
    if a.initial & a.final:
        final.add(n)
    res = trim(Nfa(n + 1, [n], final, list(a.trans) + [merged]))
    res._cache["norm"] = res
    return res


def is_empty_language(a: Nfa) -> bool:
    return normalize(a).num_states == 0


# ---------------------------------------------------------------------------
# regex compilation


def compile_regex(ast: RegexAst, alpha: Alphabet = UNICODE) -> Nfa:
    """Thompson-style construction; complement and intersection go through
    subset construction and products."""
    b = _Builder()

    def check(label: Label) -> None:
        if iv_diff(label, alpha.intervals):
            raise AlphabetMismatch(f"codepoints {iv_diff(label, alpha.intervals)[:3]} outside {alpha.kind} alphabet")

    def embed(a: Nfa) -> tuple[int, int]:
        off = b.copy_in(a)
        s, f = b.state(), b.state()
        for q in a.initial:
            b.eps_edge(s, q + off)
        for q in a.final:
            b.eps_edge(q + off, f)
        return s, f

    def go(node: RegexAst) -> tuple[int, int]:
        if isinstance(node, ReEmpty):
            return b.state(), b.state()
        if isinstance(node, ReEpsilon):
            s = b.state()
            return s, s
        if isinstance(node, ReLit):
            s = q = b.state()
            for c in node.word:
                label = char_label(ord(c))
                check(label)
                nxt = b.state()
                b.edge(q, label, nxt)
                q = nxt
            return s, q
        if isinstance(node, ReClass):
            check(node.intervals)
            s, f = b.state(), b.state()
            b.edge(s, node.intervals, f)
            return s, f
        if isinstance(node, ReAllChar):
            s, f = b.state(), b.state()
            b.edge(s, alpha.intervals, f)
            return s, f
        if isinstance(node, ReAll):
            s = b.state()
            b.edge(s, alpha.intervals, s)
            return s, s
        if isinstance(node, ReConcat):
            s, f = go(node.items[0])
            for item in node.items[1:]:
                s2, f2 = go(item)
                b.eps_edge(f, s2)
                f = f2
            return s, f
        if isinstance(node, ReUnion):
            s, f = b.state(), b.state()
            for item in node.items:
                s2, f2 = go(item)
                b.eps_edge(s, s2)
                b.eps_edge(f2, f)
            return s, f
        if isinstance(node, (ReStar, RePlus, ReOpt)):
            s2, f2 = go(node.child)
            s, f = b.state(), b.state()
            b.eps_edge(s, s2)
            b.eps_edge(f2, f)
            if not isinstance(node, RePlus):
                b.eps_edge(s, f)
            if not isinstance(node, ReOpt):
                b.eps_edge(f2, s2)
            return s, f
        if isinstance(node, ReInter):
            acc = compile_regex(node.items[0], alpha)
            for item in node.items[1:]:
                acc = intersect(acc, compile_regex(item, alpha))
            return embed(acc)
        if isinstance(node, ReComp):
            return embed(complement(compile_regex(node.child, alpha), alpha))
        raise TypeError(f"not a regex node: {node!r}")

    s, f = go(ast)
    return normalize(b.build([s], [f]))


def regex(text: str, alpha: Alphabet = UNICODE) -> Nfa:
    return compile_regex(parse_regex(text), alpha)


# ---------------------------------------------------------------------------
# boolean and rational operations


def intersect(a: Nfa, b: Nfa) -> Nfa:
    """Product construction on epsilon-free forms."""
    a = normalize(a)
    b = normalize(b)
    if a.num_states == 0 or b.num_states == 0:
        return _EMPTY
    index: dict[tuple[int, int], int] = {}
    queue: deque[tuple[int, int]] = deque()
    trans: list[list] = []
    final = []

    def get(p: tuple[int, int]) -> int:
        i = index.get(p)
        if i is None:
            i = index[p] = len(trans)
            trans.append([])
            queue.append(p)
            if p[0] in a.final and p[1] in b.final:
                final.append(i)
        return i

    initial = [get((p, q)) for p in sorted(a.initial) for q in sorted(b.initial)]
    while queue:
        p, q = queue.popleft()
        src = index[(p, q)]
        for la, da in a.trans[p]:
            for lb, db in b.trans[q]:
                if la[-1][1] < lb[0][0] or lb[-1][1] < la[0][0]:
                    continue
                lab = iv_inter(la, lb)
                if lab:
                    trans[src].append((lab, get((da, db))))
    res = trim(Nfa(len(trans), initial, final, trans))
    return normalize(res)


def concat_lang(a: Nfa, b: Nfa) -> Nfa:
    bld = _Builder()
    oa = bld.copy_in(a)
    ob = bld.copy_in(b)
    for f in a.final:
        for i in b.initial:
            bld.eps_edge(f + oa, i + ob)
    return normalize(bld.build([q + oa for q in a.initial], [q + ob for q in b.final]))


def concat_many(parts: Sequence[Nfa]) -> Nfa:
    if not parts:
        return Nfa.epsilon()
    bld = _Builder()
    offs = [bld.copy_in(p) for p in parts]
    for i in range(len(parts) - 1):
        for f in parts[i].final:
            for s in parts[i + 1].initial:
                bld.eps_edge(f + offs[i], s + offs[i + 1])
    return normalize(bld.build([q + offs[0] for q in parts[0].initial], [q + offs[-1] for q in parts[-1].final]))


def union_lang(a: Nfa, b: Nfa) -> Nfa:
    bld = _Builder()
    oa = bld.copy_in(a)
    ob = bld.copy_in(b)
    return normalize(
        bld.build([q + oa for q in a.initial] + [q + ob for q in b.initial], [q + oa for q in a.final] + [q + ob for q in b.final])
    )


def star_lang(a: Nfa) -> Nfa:
    bld = _Builder()
    off = bld.copy_in(a)
    s = bld.state()
    for q in a.initial:
        bld.eps_edge(s, q + off)
    for f in a.final:
        bld.eps_edge(f + off, s)
    return normalize(bld.build([s], [s]))


def reverse_lang(a: Nfa) -> Nfa:
    trans: list[list] = [[] for _ in range(a.num_states)]
    eps: list[list] = [[] for _ in range(a.num_states)]
    for q in range(a.num_states):
        for label, d in a.trans[q]:
            trans[d].append((label, q))
        for d in a.eps[q]:
            eps[d].append(q)
    return normalize(Nfa(a.num_states, a.final, a.initial, trans, eps))


def _split_targets(ts: Iterable[tuple[Label, int]]) -> list[tuple[Label, frozenset[int]]]:
    """Partition the union of labels into pieces with a uniform target set.

    Pieces sharing a target set are merged into one label; the output is
    sorted by smallest codepoint.
    """
    events: list[tuple[int, int, int]] = []
    for label, d in ts:
        for lo, hi in label:
            events.append((lo, 0, d))
            events.append((hi + 1, 1, d))
    if not events:
        return []
    events.sort()
    active: dict[int, int] = {}
    pieces: dict[frozenset[int], list[Interval]] = {}
    i = 0
    prev = None
    while i < len(events):
        pt = events[i][0]
        if prev is not None and active and pt > prev:
            key = frozenset(active)
            pieces.setdefault(key, []).append((prev, pt - 1))
        while i < len(events) and events[i][0] == pt:
            _, kind, d = events[i]
            if kind == 0:
                active[d] = active.get(d, 0) + 1
            else:
                active[d] -= 1
                if not active[d]:
                    del active[d]
            i += 1
        prev = pt
    out = [(iv_norm(ivs), key) for key, ivs in pieces.items()]
    out.sort(key=lambda t: t[0][0][0])
    return out


def determinize(a: Nfa, cap: int = DEFAULT_STATE_CAP) -> Nfa:
    """Subset construction. The result has one initial state and pairwise
    disjoint outgoing labels; missing transitions lead to rejection."""
    cached = a._cache.get("det")
    if cached is not None:
        return cached
    a = normalize(a)
    if a.num_states == 0:
        return _EMPTY
    start = frozenset(a.initial)
    index = {start: 0}
    order = [start]
    trans: list[list] = [[]]
    i = 0
    while i < len(order):
        S = order[i]
        for label, T in _split_targets(t for q in sorted(S) for t in a.trans[q]):
            j = index.get(T)
            if j is None:
                if len(order) >= cap:
                    raise StateCapExceeded(cap)
                j = index[T] = len(order)
                order.append(T)
                trans.append([])
            trans[i].append((label, j))
        i += 1
    final = [k for k, S in enumerate(order) if S & a.final]
    res = Nfa(len(order), [0], final, trans)
    res._cache["det"] = res
    a._cache["det"] = res
    return res


def complement(a: Nfa, alphabet: Alphabet = UNICODE, cap: int = DEFAULT_STATE_CAP) -> Nfa:
    d = determinize(a, cap)
    n = d.num_states
    if n == 0:
        return Nfa.universal(alphabet)
    sink = n
    trans = []
    for q in range(n):
        ts = [(iv_inter(label, alphabet.intervals), dst) for label, dst in d.trans[q]]
        ts = [(label, dst) for label, dst in ts if label]
        covered = iv_norm(iv for label, _ in ts for iv in label)
        rest = iv_diff(alphabet.intervals, covered)
        if rest:
            ts.append((rest, sink))
        trans.append(ts)
    trans.append([(alphabet.intervals, sink)])
    final = [q for q in range(n + 1) if q == sink or q not in d.final]
    return normalize(Nfa(n + 1, d.initial, final, trans))


def minimize(a: Nfa, cap: int = DEFAULT_STATE_CAP) -> Nfa:
    """Minimal partial DFA via Moore partition refinement."""
    d = determinize(a, cap)
    n = d.num_states
    if n <= 1:
        return d
    block = [1 if q in d.final else 0 for q in range(n)]
    count = len(set(block))
    while True:
        sigs: dict = {}
        new_block = []
        for q in range(n):
            by_block: dict[int, list[Interval]] = {}
            for label, dst in d.trans[q]:
                by_block.setdefault(block[dst], []).extend(label)
            sig = (block[q], tuple(sorted((b, iv_norm(ivs)) for b, ivs in by_block.items())))
            new_block.append(sigs.setdefault(sig, len(sigs)))
        if len(sigs) == count:
            break
        block = new_block
        count = len(sigs)
    # renumber blocks in BFS order from the initial state for a canonical layout
    init = next(iter(d.initial))
    rep: dict[int, int] = {}
    for q in range(n):
        rep.setdefault(block[q], q)
    ren = {block[init]: 0}
    order = [block[init]]
    i = 0
    while i < len(order):
        q = rep[order[i]]
        for _, dst in d.trans[q]:
            if block[dst] not in ren:
                ren[block[dst]] = len(order)
                order.append(block[dst])
        i += 1
    trans = []
    final = []
    for k, b in enumerate(order):
        q = rep[b]
        trans.append(_merge_parallel((label, ren[block[dst]]) for label, dst in d.trans[q]))
        if q in d.final:
            final.append(k)
    res = trim(Nfa(len(order), [0], final, trans))
    res._cache["norm"] = res
    res._cache["det"] = res
    return res


def compact(a: Nfa, threshold: int = 12, cap: int = 2_000) -> Nfa:
    """Cheap size reduction: minimal DFA when it is not larger than the
    epsilon-free form and can be built under ``cap`` states."""
    a = normalize(a)
    if a.num_states <= threshold:
        return a
    done = a._cache.get("compact")
    if done is not None:
        return done
    try:
        m = minimize(a, cap)
    except StateCapExceeded:
        m = a
    res = m if m.num_states <= a.num_states else a
    a._cache["compact"] = res
    res._cache["compact"] = res
    return res


# ---------------------------------------------------------------------------
# queries


def is_empty(a: Nfa) -> Optional[str]:
    """``None`` if the language is empty, else its shortest member (ties
    broken by codepoint order)."""
    a = normalize(a)
    if a.num_states == 0:
        return None
    cached = a._cache.get("witness")
    if cached is not None:
        return cached
    parent: dict[int, tuple[int, int] | None] = {}
    queue = deque()
    for q in sorted(a.initial):
        parent[q] = None
        queue.append(q)
    found = None
    while queue:
        q = queue.popleft()
        if q in a.final:
            found = q
            break
        for label, d in sorted(a.trans[q], key=lambda t: (t[0][0][0], t[1])):
            if d not in parent:
                parent[d] = (q, label[0][0])
                queue.append(d)
    assert found is not None
    chars = []
    q = found
    while parent[q] is not None:
        q, c = parent[q]
        chars.append(chr(c))
    word = "".join(reversed(chars))
    a._cache["witness"] = word
    return word


def accepts(a: Nfa, w: str) -> bool:
    a = normalize(a)
    cur = set(a.initial)
    for ch in w:
        c = ord(ch)
        nxt = set()
        for q in cur:
            for label, d in a.trans[q]:
                if d not in nxt and iv_contains(label, c):
                    nxt.add(d)
        if not nxt:
            return False
        cur = nxt
    return bool(cur & a.final)


def run_word(a: Nfa, starts: Iterable[int], w: str) -> set[int]:
    """States of epsilon-free ``a`` reachable from ``starts`` reading ``w``."""
    cur = set(starts)
    for ch in w:
        c = ord(ch)
        cur = {d for q in cur for label, d in a.trans[q] if iv_contains(label, c)}
        if not cur:
            break
    return cur


def iter_words(a: Nfa, max_len: int, chars: Optional[Sequence[str]] = None) -> Iterator[str]:
    """Members of length at most ``max_len`` in (length, codepoint) order.

    With ``chars`` the enumeration is restricted to words over those
    characters.
    """
    a = normalize(a)
    if a.num_states == 0:
        return
    allowed = None if chars is None else sorted({ord(c) for c in chars})
    level: list[tuple[str, frozenset[int]]] = [("", frozenset(a.initial))]
    for length in range(max_len + 1):
        for w, S in level:
            if S & a.final:
                yield w
        if length == max_len:
            return
        nxt: list[tuple[str, frozenset[int]]] = []
        for w, S in level:
            for label, T in _split_targets(t for q in sorted(S) for t in a.trans[q]):
                if allowed is None:
                    for c in iv_chars(label):
                        nxt.append((w + chr(c), T))
                else:
                    for c in allowed:
                        if iv_contains(label, c):
                            nxt.append((w + chr(c), T))
        nxt.sort(key=lambda t: t[0])
        level = nxt
        if not level:
            return


def enumerate_words(a: Nfa, max_len: int, chars: Optional[Sequence[str]] = None) -> list[str]:
    if max_len < 0:
        raise ValueError("max_len must be nonnegative")
    return list(iter_words(a, max_len, chars))


def words_of_length(a: Nfa, length: int, chars: Optional[Sequence[str]] = None) -> Iterator[str]:
    """Members of exactly ``length`` characters, lexicographic, generated lazily."""
    a = normalize(a)
    if a.num_states == 0:
        return
    allowed = None if chars is None else sorted({ord(c) for c in chars})
    # states that can reach a final state in exactly k steps
    can = [frozenset(a.final)]
    for _ in range(length):
        prev = can[-1]
        can.append(frozenset(q for q in range(a.num_states) if any(d in prev for _, d in a.trans[q])))
    start = frozenset(q for q in a.initial if q in can[length])
    if not start:
        return

    def go(S: frozenset[int], k: int, prefix: list[str]) -> Iterator[str]:
        if k == 0:
            yield "".join(prefix)
            return
        good = can[k - 1]
        for label, T in _split_targets((lab, d) for q in sorted(S) for lab, d in a.trans[q] if d in good):
            if allowed is None:
                cs: Iterable[int] = iv_chars(label)
            else:
                cs = (c for c in allowed if iv_contains(label, c))
            for c in cs:
                prefix.append(chr(c))
                yield from go(T, k - 1, prefix)
                prefix.pop()

    yield from go(start, length, [])


@dataclass(frozen=True)
class Inclusion:
    status: str  # "yes" | "no" | "capped"
    counterexample: Optional[str] = None

    @property
    def holds(self) -> bool:
        return self.status == "yes"


def includes(a: Nfa, b: Nfa, state_cap: int = DEFAULT_STATE_CAP) -> Inclusion:
    """Decide L(b) ⊆ L(a) by exploring b against an on-the-fly subset
    construction of a."""
    a = normalize(a)
    b = normalize(b)
    if b.num_states == 0:
        return Inclusion("yes")
    start_a = frozenset(a.initial)
    seen_subsets = {start_a}
    parent: dict[tuple[int, frozenset[int]], Optional[tuple]] = {}
    queue = deque()
    for q in sorted(b.initial):
        node = (q, start_a)
        if node not in parent:
            parent[node] = None
            queue.append(node)

    def word(node) -> str:
        chars = []
        while parent[node] is not None:
            node, c = parent[node]
            chars.append(chr(c))
        return "".join(reversed(chars))

    while queue:
        node = queue.popleft()
        q, S = node
        if q in b.final and not (S & a.final):
            return Inclusion("no", word(node))
        a_ts = [t for p in sorted(S) for t in a.trans[p]]
        for lb, qb in b.trans[q]:
            pieces = _split_targets([(lb, -1)] + [(iv_inter(la, lb), d) for la, d in a_ts])
            for label, T in pieces:
                T = T - {-1}
                nxt = (qb, frozenset(T))
                if nxt not in parent:
                    if nxt[1] not in seen_subsets:
                        if len(seen_subsets) >= state_cap:
                            return Inclusion("capped")
                        seen_subsets.add(nxt[1])
                    parent[nxt] = (node, label[0][0])
                    queue.append(nxt)
    return Inclusion("yes")


def equivalent(a: Nfa, b: Nfa, state_cap: int = DEFAULT_STATE_CAP) -> Optional[bool]:
    """Language equality; ``None`` when the state cap is hit."""
    r1 = includes(a, b, state_cap)
    if r1.status == "no":
        return False
    r2 = includes(b, a, state_cap)
    if r2.status == "no":
        return False
    if r1.status == "capped" or r2.status == "capped":
        return None
    return True


def is_universal(a: Nfa, alphabet: Alphabet = UNICODE, state_cap: int = DEFAULT_STATE_CAP) -> bool:
    return includes(a, Nfa.universal(alphabet), state_cap).status == "yes"


def is_finite(a: Nfa) -> bool:
    """True iff the (trimmed) automaton has no cycle."""
    a = normalize(a)
    color = [0] * a.num_states
    for s in range(a.num_states):
        if color[s]:
            continue
        stack = [(s, iter(a.trans[s]))]
        color[s] = 1
        while stack:
            q, it = stack[-1]
            for _, d in it:
                if color[d] == 1:
                    return False
                if color[d] == 0:
                    color[d] = 1
                    stack.append((d, iter(a.trans[d])))
                    break
            else:
                color[q] = 2
                stack.pop()
    return True


def singleton_word(a: Nfa) -> Optional[str]:
    """The unique member if the language has exactly one word."""
    a = normalize(a)
    if "single" in a._cache:
        return a._cache["single"]
    res = None
    w = is_empty(a)
    if w is not None and is_finite(a):
        for label in a.labels():
            if label != char_label(label[0][0]):
                break
        else:
            words = list(iter_words(a, len(w) + a.num_states))
            if len(words) == 1:
                res = words[0]
    a._cache["single"] = res
    return res


def label_points(labels: Iterable[Label]) -> set[int]:
    """Boundary points of a family of labels."""
    pts = set()
    for label in labels:
        for lo, hi in label:
            pts.add(lo)
            pts.add(hi + 1)
    return pts


def representatives(points: Iterable[int], alphabet: Alphabet = UNICODE) -> list[str]:
    """One character per block of the alphabet partition induced by the
    boundary ``points``. Every label built from those boundaries treats all
    characters of a block alike."""
    cuts = sorted(set(points) | {lo for lo, _ in alphabet.intervals} | {hi + 1 for _, hi in alphabet.intervals})
    reps = []
    for lo, hi in zip(cuts, cuts[1:]):
        if lo < hi and iv_contains(alphabet.intervals, lo):
            reps.append(chr(lo))
    return reps
