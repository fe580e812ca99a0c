"""String functions: concrete evaluation, forward images and backward
preimages as finite unions of products of regular languages."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .automata import (
    UNICODE,
    Alphabet,
    Label,
    Nfa,
    StateCapExceeded,
    _Builder,
    char_label,
    concat_many,
    equivalent,
    intersect,
    iv_contains,
    iv_diff,
    iv_inter,
    iv_norm,
    minimize,
    normalize,
    reverse_lang,
    run_word,
    single_initial,
    trim,
)

# Output placeholder: copy the character read on this transition.
COPY = -1


class FunctionError(Exception):
    pass


class NotInDomain(FunctionError):
    pass


class NotFunctional(FunctionError):
    pass


class NotForwardable(FunctionError):
    pass


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Concat:
    """Concatenation term; items are variables or constant words."""

    items: tuple[Union[Var, str], ...]

    def __post_init__(self):
        if not self.items:
            raise ValueError("concatenation term needs at least one item")

    @property
    def vars(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for it in self.items:
            if isinstance(it, Var):
                seen.setdefault(it.name, None)
        return tuple(seen)

    @property
    def arity(self) -> int:
        return len(self.vars)

    def occurrences(self) -> list[str]:
        return [it.name for it in self.items if isinstance(it, Var)]

    def __str__(self) -> str:
        return " ++ ".join(it.name if isinstance(it, Var) else repr(it) for it in self.items)


@dataclass(frozen=True)
class ReplaceAll:
    pattern: str
    replacement: str
    arity = 1

    def __str__(self) -> str:
        return f"replaceAll({self.pattern!r}, {self.replacement!r})"


@dataclass(frozen=True)
class Reverse:
    arity = 1

    def __str__(self) -> str:
        return "reverse"


@dataclass(frozen=True)
class TTrans:
    """Transducer edge. ``inp`` is a label or ``None`` for an epsilon input;
    ``out`` is a tuple of codepoints where ``COPY`` echoes the input char."""

    src: int
    inp: Optional[Label]
    out: tuple[int, ...]
    dst: int


@dataclass(frozen=True)
class Transducer:
    num_states: int
    initial: frozenset[int]
    final: frozenset[int]
    transitions: tuple[TTrans, ...]
    name: str = field(default="T", compare=False)
    arity = 1

    def __post_init__(self):
        for t in self.transitions:
            if not (0 <= t.src < self.num_states and 0 <= t.dst < self.num_states):
                raise ValueError(f"transition {t} references an unknown state")
            if t.out.count(COPY) > 1:
                raise ValueError("at most one copied character per output")
            if COPY in t.out and t.inp is None:
                raise ValueError("epsilon-input transition cannot copy its input")
            if t.inp is not None and not t.inp:
                raise ValueError("empty input label")

    def __str__(self) -> str:
        return self.name

    @functools.cached_property
    def by_src(self) -> tuple[tuple[TTrans, ...], ...]:
        out: list[list[TTrans]] = [[] for _ in range(self.num_states)]
        for t in self.transitions:
            out[t.src].append(t)
        return tuple(tuple(ts) for ts in out)


StringFunction = Union[Concat, ReplaceAll, Reverse, Transducer]


def arity(f: StringFunction) -> int:
    return f.arity


def is_forwardable(f: StringFunction) -> bool:
    if isinstance(f, Concat):
        occ = f.occurrences()
        return len(occ) == len(set(occ))
    return True


def is_backwardable(f: StringFunction) -> bool:
    return True


# ---------------------------------------------------------------------------
# evaluation


def replace_all(s: str, pattern: str, replacement: str) -> str:
    if not pattern:
        return s
    return s.replace(pattern, replacement)


def _resolve_out(out: tuple[int, ...], c: Optional[int]) -> str:
    return "".join(chr(c if o == COPY else o) for o in out)


def run_transducer(t: Transducer, w: str, limit: int = 20_000) -> set[str]:
    """All outputs of ``t`` on input ``w``."""
    configs: set[tuple[int, str]] = set()

    def closure(start: Iterable[tuple[int, str]]) -> set[tuple[int, str]]:
        seen = set(start)
        stack = list(seen)
        while stack:
            q, o = stack.pop()
            for tr in t.by_src[q]:
                if tr.inp is None:
                    nxt = (tr.dst, o + _resolve_out(tr.out, None))
                    if nxt not in seen:
                        seen.add(nxt)
                        if len(seen) > limit:
                            raise NotFunctional("unbounded epsilon outputs")
                        stack.append(nxt)
        return seen

    configs = closure((q, "") for q in t.initial)
    for ch in w:
        c = ord(ch)
        step = set()
        for q, o in configs:
            for tr in t.by_src[q]:
                if tr.inp is not None and iv_contains(tr.inp, c):
                    step.add((tr.dst, o + _resolve_out(tr.out, c)))
        configs = closure(step)
        if not configs:
            break
    return {o for q, o in configs if q in t.final}


def evaluate(f: StringFunction, args: Sequence[str]) -> str:
    if len(args) != f.arity:
        raise ValueError(f"{f} expects {f.arity} arguments, got {len(args)}")
    if isinstance(f, Concat):
        env = dict(zip(f.vars, args))
        return "".join(env[it.name] if isinstance(it, Var) else it for it in f.items)
    if isinstance(f, ReplaceAll):
        return replace_all(args[0], f.pattern, f.replacement)
    if isinstance(f, Reverse):
        return args[0][::-1]
    if isinstance(f, Transducer):
        outs = run_transducer(f, args[0])
        if not outs:
            raise NotInDomain(f"{f.name} is undefined on {args[0]!r}")
        if len(outs) > 1:
            raise NotFunctional(f"{f.name} has {len(outs)} outputs on {args[0]!r}")
        return outs.pop()
    raise TypeError(f"unknown function {f!r}")


# ---------------------------------------------------------------------------
# replaceAll as a transducer


@functools.lru_cache(maxsize=256)
def compile_replaceall(r: ReplaceAll, alpha: Alphabet = UNICODE) -> Transducer:
    """Leftmost non-overlapping replacement driven by the pattern's failure
    function. State k means the last k characters read are a pending prefix
    of the pattern; they are emitted once the match fails or input ends."""
    p = r.pattern
    m = len(p)
    every = alpha.intervals
    if m == 0:
        return Transducer(1, frozenset([0]), frozenset([0]), (TTrans(0, every, (COPY,), 0),), name=str(r))
    fail = [0] * (m + 1)
    k = 0
    for i in range(1, m):
        while k and p[i] != p[k]:
            k = fail[k]
        if p[i] == p[k]:
            k += 1
        fail[i + 1] = k
    pchars = sorted(set(p))
    others = iv_diff(every, iv_norm((ord(c), ord(c)) for c in pchars))
    repl = tuple(ord(c) for c in r.replacement)
    flush = m
    trans = []
    for k in range(m):
        for c in pchars:
            if p[k] == c:
                if k + 1 == m:
                    trans.append(TTrans(k, char_label(ord(c)), repl, 0))
                else:
                    trans.append(TTrans(k, char_label(ord(c)), (), k + 1))
                continue
            j = k
            while j and p[j] != c:
                j = fail[j]
            nxt = j + 1 if p[j] == c else 0
            dropped = (p[:k] + c)[: k + 1 - nxt]
            trans.append(TTrans(k, char_label(ord(c)), tuple(ord(x) for x in dropped), nxt))
        if others:
            trans.append(TTrans(k, others, tuple(ord(x) for x in p[:k]) + (COPY,), 0))
        if k:
            trans.append(TTrans(k, None, tuple(ord(x) for x in p[:k]), flush))
    return Transducer(m + 1, frozenset([0]), frozenset([0, flush]), tuple(trans), name=str(r))


def as_transducer(f: StringFunction, alpha: Alphabet = UNICODE) -> Transducer:
    if isinstance(f, Transducer):
        return f
    if isinstance(f, ReplaceAll):
        return compile_replaceall(f, alpha)
    raise TypeError(f"{f} is not a transduction")


# ---------------------------------------------------------------------------
# images


def _transducer_image(t: Transducer, a: Nfa) -> Nfa:
    a = normalize(a)
    if a.num_states == 0:
        return Nfa.empty()
    b = _Builder()
    index: dict[tuple[int, int], int] = {}
    todo: list[tuple[int, int]] = []

    def get(key: tuple[int, int]) -> int:
        s = index.get(key)
        if s is None:
            s = index[key] = b.state()
            todo.append(key)
        return s

    def emit(src: int, word: Sequence[Label], dst: int) -> None:
        if not word:
            b.eps_edge(src, dst)
            return
        cur = src
        for i, label in enumerate(word):
            nxt = dst if i == len(word) - 1 else b.state()
            b.edge(cur, label, nxt)
            cur = nxt

    initial = [get((ti, qi)) for ti in sorted(t.initial) for qi in sorted(a.initial)]
    while todo:
        tq, q = todo.pop()
        src = index[(tq, q)]
        for tr in t.by_src[tq]:
            if tr.inp is None:
                emit(src, [char_label(o) for o in tr.out], get((tr.dst, q)))
                continue
            for lab, q2 in a.trans[q]:
                inter = iv_inter(tr.inp, lab)
                if not inter:
                    continue
                word = [inter if o == COPY else char_label(o) for o in tr.out]
                emit(src, word, get((tr.dst, q2)))
    final = [s for (tq, q), s in index.items() if tq in t.final and q in a.final]
    return normalize(b.build(initial, final))


def forward_image(f: StringFunction, args: Sequence[Nfa], alpha: Alphabet = UNICODE) -> Nfa:
    if not is_forwardable(f):
        raise NotForwardable(f"{f} is not forwardable")
    if len(args) != f.arity:
        raise ValueError(f"{f} expects {f.arity} arguments, got {len(args)}")
    if isinstance(f, Concat):
        env = dict(zip(f.vars, args))
        return concat_many([env[it.name] if isinstance(it, Var) else Nfa.literal(it) for it in f.items])
    if isinstance(f, Reverse):
        return reverse_lang(args[0])
    return _transducer_image(as_transducer(f, alpha), args[0])


@dataclass
class RecognizableRel:
    """Finite union of products of regular languages."""

    arity: int
    branches: list[tuple[Nfa, ...]]

    def __post_init__(self):
        for br in self.branches:
            if len(br) != self.arity:
                raise ValueError("branch arity mismatch")

    @property
    def is_empty(self) -> bool:
        return not self.branches

    def contains(self, words: Sequence[str]) -> bool:
        from .automata import accepts

        return any(all(accepts(a, w) for a, w in zip(br, words)) for br in self.branches)


def _sub_nfa(a: Nfa, start: int, ends: Iterable[int]) -> Nfa:
    key = ("sub", start, tuple(sorted(ends)))
    res = a._cache.get(key)
    if res is None:
        res = trim(Nfa(a.num_states, [start], ends, a.trans))
        res._cache["norm"] = res
        a._cache[key] = res
    return res


def _reach_sets(a: Nfa) -> list[frozenset[int]]:
    out = []
    for s in range(a.num_states):
        seen = {s}
        stack = [s]
        while stack:
            q = stack.pop()
            for _, d in a.trans[q]:
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
        out.append(frozenset(seen))
    return out


def _concat_preimage(f: Concat, out: Nfa, dedup_states: int = 40) -> RecognizableRel:
    a = single_initial(out)
    if 1 < a.num_states <= 200:
        # fewer states means fewer state tuples to branch over
        try:
            m = minimize(a, 1_000)
            if m.num_states < a.num_states:
                a = m
        except StateCapExceeded:
            pass
    names = f.vars
    if a.num_states == 0:
        return RecognizableRel(len(names), [])
    reach = _reach_sets(a)
    init = next(iter(a.initial))
    items = f.items
    n_items = len(items)
    results: list[tuple[Nfa, ...]] = []
    seen_keys: set = set()
    repeated = len(f.occurrences()) != len(names)
    classes: list[Nfa] = []

    def class_id(lang: Nfa) -> int:
        for i, c in enumerate(classes):
            if equivalent(c, lang, 2_000):
                return i
        classes.append(lang)
        return len(classes) - 1

    def finish(segs: list[tuple[str, Nfa]]) -> None:
        per_var: dict[str, list[Nfa]] = {v: [] for v in names}
        for v, lang in segs:
            per_var[v].append(lang)
        if repeated and a.num_states <= dedup_states:
            key = tuple(tuple(sorted(class_id(l) for l in per_var[v])) for v in names)
            if key in seen_keys:
                return
            seen_keys.add(key)
        branch = []
        for v in names:
            langs = per_var[v]
            acc = langs[0]
            for other in langs[1:]:
                acc = intersect(acc, other)
            branch.append(acc)
        results.append(tuple(branch))

    def go(i: int, q: int, segs: list[tuple[str, Nfa]]) -> None:
        if i == n_items:
            if q in a.final:
                finish(segs)
            return
        it = items[i]
        last = i == n_items - 1
        if isinstance(it, str):
            for q2 in sorted(run_word(a, [q], it)):
                go(i + 1, q2, segs)
            return
        if last:
            ends = a.final & reach[q]
            if ends:
                segs.append((it.name, _sub_nfa(a, q, ends)))
                finish(segs)
                segs.pop()
            return
        for q2 in sorted(reach[q]):
            segs.append((it.name, _sub_nfa(a, q, [q2])))
            go(i + 1, q2, segs)
            segs.pop()

    go(0, init, [])
    return RecognizableRel(len(names), results)


def _transducer_preimage(t: Transducer, out: Nfa) -> Nfa:
    a = normalize(out)
    if a.num_states == 0:
        return Nfa.empty()
    b = _Builder()
    index: dict[tuple[int, int], int] = {}
    todo: list[tuple[int, int]] = []

    def get(key: tuple[int, int]) -> int:
        s = index.get(key)
        if s is None:
            s = index[key] = b.state()
            todo.append(key)
        return s

    initial = [get((ti, qi)) for ti in sorted(t.initial) for qi in sorted(a.initial)]
    while todo:
        tq, q = todo.pop()
        src = index[(tq, q)]
        for tr in t.by_src[tq]:
            if COPY in tr.out:
                k = tr.out.index(COPY)
                pre = "".join(chr(o) for o in tr.out[:k])
                post = "".join(chr(o) for o in tr.out[k + 1 :])
                for s1 in sorted(run_word(a, [q], pre)):
                    for lab, s2 in a.trans[s1]:
                        inter = iv_inter(tr.inp, lab)
                        if not inter:
                            continue
                        for q2 in sorted(run_word(a, [s2], post)):
                            b.edge(src, inter, get((tr.dst, q2)))
            else:
                word = "".join(chr(o) for o in tr.out)
                for q2 in sorted(run_word(a, [q], word)):
                    dst = get((tr.dst, q2))
                    if tr.inp is None:
                        b.eps_edge(src, dst)
                    else:
                        b.edge(src, tr.inp, dst)
    final = [s for (tq, q), s in index.items() if tq in t.final and q in a.final]
    return normalize(b.build(initial, final))


def backward_preimage(f: StringFunction, out: Nfa, alpha: Alphabet = UNICODE) -> RecognizableRel:
    if isinstance(f, Concat):
        return _concat_preimage(f, out)
    if isinstance(f, Reverse):
        lang = reverse_lang(out)
    else:
        lang = _transducer_preimage(as_transducer(f, alpha), out)
    return RecognizableRel(1, [] if lang.num_states == 0 else [(lang,)])


def relation_equals_preimage_on(f: StringFunction, rel: RecognizableRel, out: Nfa, tuples: Iterable[Sequence[str]]) -> Optional[Sequence[str]]:
    """First tuple where membership in ``rel`` disagrees with ``f(t) ∈ out``."""
    from .automata import accepts

    for t in tuples:
        try:
            v = evaluate(f, t)
            inside = accepts(out, v)
        except (NotInDomain, NotFunctional):
            inside = False
        if rel.contains(t) != inside:
            return t
    return None


__all__ = [
    "COPY",
    "Concat",
    "NotForwardable",
    "NotFunctional",
    "NotInDomain",
    "RecognizableRel",
    "ReplaceAll",
    "Reverse",
    "StringFunction",
    "TTrans",
    "Transducer",
    "Var",
    "arity",
    "as_transducer",
    "backward_preimage",
    "compile_replaceall",
    "evaluate",
    "forward_image",
    "is_backwardable",
    "is_forwardable",
    "replace_all",
    "run_transducer",
]
