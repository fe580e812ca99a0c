"""SMT-LIB strings subset with a transducer extension, and rewriting into
the solver's normal form (memberships plus x = f(...) equations)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .automata import (
    MAX_CODEPOINT,
    UNICODE,
    Alphabet,
    Nfa,
    ReAll,
    ReAllChar,
    ReClass,
    ReComp,
    ReConcat,
    ReEmpty,
    ReEpsilon,
    ReInter,
    ReLit,
    ReOpt,
    RePlus,
    ReStar,
    ReUnion,
    RegexAst,
    compile_regex,
    intersect,
    iv_diff,
    iv_inter,
    iv_norm,
)
from .calculus import EquationalConstraint, Sequent
from .functions import COPY, Concat, ReplaceAll, Reverse, StringFunction, Transducer, TTrans, Var


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class MalformedTransducer(ParseError):
    pass


class UnsupportedFeature(Exception):
    def __init__(self, name: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: unsupported feature {name}")
        self.name = name
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# s-expressions


@dataclass
class Atom:
    kind: str  # "symbol" | "string" | "numeral" | "keyword"
    value: str
    line: int
    col: int


@dataclass
class SList:
    items: list
    line: int
    col: int


SExpr = Union[Atom, SList]


def _decode_string(raw: str, line: int, col: int) -> str:
    out = []
    i = 0
    while i < len(raw):
        c = raw[i]
        if c == "\\" and raw.startswith("\\u{", i):
            end = raw.find("}", i)
            digits = raw[i + 3 : end] if end != -1 else ""
            if 1 <= len(digits) <= 5 and all(d in "0123456789abcdefABCDEF" for d in digits):
                cp = int(digits, 16)
                if cp > 0x2FFFF:
                    raise ParseError(f"codepoint {digits} out of range", line, col)
                out.append(chr(cp))
                i = end + 1
                continue
        if c == "\\" and raw.startswith("\\u", i) and len(raw) >= i + 6:
            digits = raw[i + 2 : i + 6]
            if all(d in "0123456789abcdefABCDEF" for d in digits):
                out.append(chr(int(digits, 16)))
                i += 6
                continue
        out.append(c)
        i += 1
    return "".join(out)


def encode_string(s: str) -> str:
    """SMT-LIB literal for ``s``."""
    out = ['"']
    for c in s:
        cp = ord(c)
        if cp > MAX_CODEPOINT:
            raise ValueError(f"codepoint {cp:#x} is outside the string alphabet")
        if c == '"':
            out.append('""')
        elif c == "\\" or cp < 32 or cp > 126:
            out.append("\\u{%x}" % cp)
        else:
            out.append(c)
    out.append('"')
    return "".join(out)


def tokenize(text: str) -> list:
    tokens = []
    i = 0
    line, col = 1, 1
    n = len(text)

    def adv(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            adv(1)
        elif c == ";":
            while i < n and text[i] != "\n":
                adv(1)
        elif c in "()":
            tokens.append((c, c, line, col))
            adv(1)
        elif c == '"':
            l0, c0 = line, col
            adv(1)
            buf = []
            while True:
                if i >= n:
                    raise ParseError("unterminated string literal", l0, c0)
                if text[i] == '"':
                    if i + 1 < n and text[i + 1] == '"':
                        buf.append('"')
                        adv(2)
                        continue
                    adv(1)
                    break
                buf.append(text[i])
                adv(1)
            tokens.append(("string", _decode_string("".join(buf), l0, c0), l0, c0))
        elif c == "|":
            l0, c0 = line, col
            end = text.find("|", i + 1)
            if end == -1:
                raise ParseError("unterminated quoted symbol", l0, c0)
            sym = text[i + 1 : end]
            adv(end + 1 - i)
            tokens.append(("symbol", sym, l0, c0))
        else:
            l0, c0 = line, col
            j = i
            while j < n and text[j] not in ' \t\r\n()";|':
                j += 1
            word = text[i:j]
            adv(j - i)
            if word.isdigit():
                kind = "numeral"
            elif word.startswith(":"):
                kind = "keyword"
            else:
                kind = "symbol"
            tokens.append((kind, word, l0, c0))
    return tokens


def read_sexprs(text: str) -> list[SExpr]:
    tokens = tokenize(text)
    out: list[SExpr] = []
    stack: list[SList] = []
    for kind, value, line, col in tokens:
        if kind == "(":
            stack.append(SList([], line, col))
        elif kind == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
            (stack[-1].items if stack else out).append(done)
        else:
            atom = Atom(kind, value, line, col)
            (stack[-1].items if stack else out).append(atom)
    if stack:
        raise ParseError("unbalanced '('", stack[-1].line, stack[-1].col)
    return out


def _is_sym(e: SExpr, name: Optional[str] = None) -> bool:
    return isinstance(e, Atom) and e.kind == "symbol" and (name is None or e.value == name)


def _head(e: SExpr) -> Optional[str]:
    if isinstance(e, SList) and e.items and _is_sym(e.items[0]):
        return e.items[0].value
    return None


# ---------------------------------------------------------------------------
# surface syntax


@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class TConst:
    word: str


@dataclass(frozen=True)
class TConcat:
    parts: tuple


@dataclass(frozen=True)
class TApp:
    fn: StringFunction
    arg: object


Term = Union[TVar, TConst, TConcat, TApp]


@dataclass(frozen=True)
class InRe:
    term: Term
    regex: RegexAst


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Contains:
    term: Term
    needle: Term
    negated: bool = False


SurfaceFormula = Union[InRe, Eq, Contains]


@dataclass
class Problem:
    declared_vars: list[str] = field(default_factory=list)
    assertions: list[SurfaceFormula] = field(default_factory=list)
    logic: str = ""
    transducers: dict[str, Transducer] = field(default_factory=dict)
    check_sat: int = 0
    get_model: bool = False


_LENGTH_OPS = {"str.len", "str.indexof", "str.substr", "str.at", "str.to_int", "str.from_int", "str.to.int", "int.to.str", "str.replace", "str.prefixof", "str.suffixof", "str.<", "str.<=", "str.replace_re", "str.replace_re_all", "<", "<=", ">", ">=", "+", "-", "*"}


class _Parser:
    def __init__(self):
        self.p = Problem()

    def fail(self, msg: str, e: SExpr) -> ParseError:
        return ParseError(msg, e.line, e.col)

    def unsupported(self, name: str, e: SExpr) -> UnsupportedFeature:
        return UnsupportedFeature(name, e.line, e.col)

    def command(self, e: SExpr) -> None:
        head = _head(e)
        if head is None:
            raise self.fail("expected a command", e)
        args = e.items[1:]
        if head == "set-logic":
            self.p.logic = args[0].value if args else ""
        elif head in ("set-info", "set-option", "exit", "push", "pop", "get-info", "echo"):
            if head in ("push", "pop"):
                raise self.unsupported(head, e)
        elif head == "declare-const":
            if len(args) != 2:
                raise self.fail("declare-const expects a name and a sort", e)
            self.declare(args[0], args[1])
        elif head == "declare-fun":
            if len(args) != 3:
                raise self.fail("declare-fun expects a name, arguments and a sort", e)
            if not isinstance(args[1], SList) or args[1].items:
                raise self.unsupported("declare-fun with arguments", e)
            self.declare(args[0], args[2])
        elif head == "define-transducer":
            t = parse_transducer(e)
            self.p.transducers[t.name] = t
        elif head == "assert":
            if len(args) != 1:
                raise self.fail("assert expects one formula", e)
            self.formula(args[0], negated=False)
        elif head == "check-sat":
            self.p.check_sat += 1
        elif head == "get-model":
            self.p.get_model = True
        else:
            raise self.unsupported(head, e)

    def declare(self, name: SExpr, sort: SExpr) -> None:
        if not _is_sym(name):
            raise self.fail("expected a variable name", name)
        if not _is_sym(sort, "String"):
            raise self.unsupported(f"sort {getattr(sort, 'value', sort)}", sort)
        if name.value in self.p.declared_vars:
            raise self.fail(f"{name.value} declared twice", name)
        self.p.declared_vars.append(name.value)

    def formula(self, e: SExpr, negated: bool) -> None:
        head = _head(e)
        if _is_sym(e, "true") and not negated:
            return
        if head == "and" and not negated:
            for sub in e.items[1:]:
                self.formula(sub, False)
            return
        if head == "not":
            if len(e.items) != 2:
                raise self.fail("not expects one argument", e)
            self.formula(e.items[1], not negated)
            return
        if head == "str.in_re" or head == "str.in.re":
            if len(e.items) != 3:
                raise self.fail(f"{head} expects two arguments", e)
            r = self.regex(e.items[2])
            self.p.assertions.append(InRe(self.term(e.items[1]), ReComp(r) if negated else r))
            return
        if head == "str.contains":
            if len(e.items) != 3:
                raise self.fail("str.contains expects two arguments", e)
            self.p.assertions.append(Contains(self.term(e.items[1]), self.term(e.items[2]), negated))
            return
        if head == "=":
            if negated:
                raise self.unsupported("disequality", e)
            terms = [self.term(t) for t in e.items[1:]]
            if len(terms) < 2:
                raise self.fail("= expects at least two arguments", e)
            for a, b in zip(terms, terms[1:]):
                self.p.assertions.append(Eq(a, b))
            return
        if head in _LENGTH_OPS:
            raise self.unsupported(head, e)
        if head in ("or", "=>", "ite", "xor", "distinct", "let", "forall", "exists") or (head == "and" and negated):
            raise self.unsupported(head or "negated conjunction", e)
        raise self.fail("expected a string constraint", e)

    def term(self, e: SExpr) -> Term:
        if isinstance(e, Atom):
            if e.kind == "string":
                return TConst(e.value)
            if e.kind == "symbol":
                if e.value not in self.p.declared_vars:
                    raise self.fail(f"undeclared variable {e.value}", e)
                return TVar(e.value)
            raise self.unsupported(f"{e.kind} term", e)
        head = _head(e)
        args = e.items[1:]
        if head == "str.++":
            if not args:
                return TConst("")
            return TConcat(tuple(self.term(a) for a in args))
        if head in ("str.replace_all", "str.replaceall"):
            if len(args) != 3:
                raise self.fail("str.replace_all expects three arguments", e)
            pat, rep = args[1], args[2]
            if not (isinstance(pat, Atom) and pat.kind == "string" and isinstance(rep, Atom) and rep.kind == "string"):
                raise self.unsupported("str.replace_all with non-constant pattern or replacement", e)
            return TApp(ReplaceAll(pat.value, rep.value), self.term(args[0]))
        if head in ("str.reverse", "str.rev"):
            if len(args) != 1:
                raise self.fail(f"{head} expects one argument", e)
            return TApp(Reverse(), self.term(args[0]))
        if head in self.p.transducers:
            if len(args) != 1:
                raise self.fail(f"transducer {head} expects one argument", e)
            return TApp(self.p.transducers[head], self.term(args[0]))
        if head in _LENGTH_OPS:
            raise self.unsupported(head, e)
        raise self.unsupported(head or "term", e)

    def regex(self, e: SExpr) -> RegexAst:
        if isinstance(e, Atom):
            if e.kind == "symbol":
                if e.value == "re.none" or e.value == "re.nostr":
                    return ReEmpty()
                if e.value == "re.all":
                    return ReAll()
                if e.value == "re.allchar":
                    return ReAllChar()
            raise self.fail(f"expected a regular expression, got {e.value}", e)
        if isinstance(e.items[0], SList):
            idx = e.items[0]
            if len(e.items) != 2:
                raise self.fail("indexed regex operator expects one argument", e)
            name = idx.items[1].value if len(idx.items) > 1 else ""
            nums = [int(a.value) for a in idx.items[2:] if isinstance(a, Atom) and a.kind == "numeral"]
            body = self.regex(e.items[1])
            if _is_sym(idx.items[0], "_") and name == "re.loop" and len(nums) == 2:
                lo, hi = nums
                if lo > hi:
                    return ReEmpty()
                parts = [body] * lo + [ReOpt(body)] * (hi - lo)
                return ReConcat(tuple(parts)) if parts else ReEpsilon()
            if _is_sym(idx.items[0], "_") and name == "re.^" and len(nums) == 1:
                return ReConcat(tuple([body] * nums[0])) if nums[0] else ReEpsilon()
            raise self.unsupported("indexed regex operator", e)
        head = _head(e)
        args = e.items[1:]
        if head in ("str.to_re", "str.to.re"):
            if len(args) != 1 or not (isinstance(args[0], Atom) and args[0].kind == "string"):
                raise self.unsupported("str.to_re of a non-constant", e)
            return ReLit(args[0].value) if args[0].value else ReEpsilon()
        if head == "re.range":
            if len(args) != 2 or not all(isinstance(a, Atom) and a.kind == "string" for a in args):
                raise self.fail("re.range expects two string literals", e)
            a, b = args[0].value, args[1].value
            if len(a) != 1 or len(b) != 1 or ord(a) > ord(b):
                return ReEmpty()
            return ReClass(((ord(a), ord(b)),))
        if head == "re.loop" and len(args) == 3:
            return self.regex(SList([SList([Atom("symbol", "_", e.line, e.col), Atom("symbol", "re.loop", e.line, e.col), args[1], args[2]], e.line, e.col), args[0]], e.line, e.col))
        subs = [self.regex(a) for a in args]
        if head == "re.++":
            return ReConcat(tuple(subs)) if len(subs) > 1 else (subs[0] if subs else ReEpsilon())
        if head == "re.union":
            return ReUnion(tuple(subs)) if len(subs) > 1 else subs[0]
        if head == "re.inter":
            return ReInter(tuple(subs)) if len(subs) > 1 else subs[0]
        if head == "re.diff" and len(subs) == 2:
            return ReInter((subs[0], ReComp(subs[1])))
        if head == "re.comp" and len(subs) == 1:
            return ReComp(subs[0])
        if head == "re.*" and len(subs) == 1:
            return ReStar(subs[0])
        if head == "re.+" and len(subs) == 1:
            return RePlus(subs[0])
        if head == "re.opt" and len(subs) == 1:
            return ReOpt(subs[0])
        raise self.unsupported(head or "regex", e)


def parse(text: str) -> Problem:
    parser = _Parser()
    for e in read_sexprs(text):
        parser.command(e)
    return parser.p


# ---------------------------------------------------------------------------
# transducers


def _char_class(e: SExpr, alpha: Alphabet) -> tuple:
    if isinstance(e, Atom):
        if e.kind == "symbol" and e.value == "re.allchar":
            return alpha.intervals
        raise MalformedTransducer("expected a character class", e.line, e.col)
    head = _head(e)
    args = e.items[1:]
    if head == "re.range" and len(args) == 2 and all(isinstance(a, Atom) and a.kind == "string" and len(a.value) == 1 for a in args):
        return iv_norm([(ord(args[0].value), ord(args[1].value))])
    if head == "str.to_re" and len(args) == 1 and isinstance(args[0], Atom) and len(args[0].value) == 1:
        c = ord(args[0].value)
        return ((c, c),)
    if head == "re.union":
        return iv_norm(iv for a in args for iv in _char_class(a, alpha))
    if head == "re.inter" and args:
        acc = _char_class(args[0], alpha)
        for a in args[1:]:
            acc = iv_inter(acc, _char_class(a, alpha))
        return acc
    if head == "re.comp" and len(args) == 1:
        return iv_diff(alpha.intervals, _char_class(args[0], alpha))
    if head == "re.diff" and len(args) == 2:
        return iv_diff(_char_class(args[0], alpha), _char_class(args[1], alpha))
    raise MalformedTransducer("expected a character class", e.line, e.col)


def _output(e: SExpr) -> tuple[int, ...]:
    if isinstance(e, Atom):
        if e.kind == "string":
            return tuple(ord(c) for c in e.value)
        if e.kind == "symbol" and e.value == "copy":
            return (COPY,)
        raise MalformedTransducer("expected an output word, copy, or (out ...)", e.line, e.col)
    if _head(e) == "out":
        out: list[int] = []
        for part in e.items[1:]:
            out.extend(_output(part))
        return tuple(out)
    raise MalformedTransducer("expected an output word, copy, or (out ...)", e.line, e.col)


def parse_transducer(e: SExpr, alpha: Alphabet = UNICODE) -> Transducer:
    """``(define-transducer name (states q...) (init q...) (final q...)
    (trans (q input output q') ...))``.

    Inputs are ``eps``, a string literal, or a character class; outputs are
    a string literal, ``copy``, or ``(out "pre" copy "post")``. Multi-character
    input literals are split into chains of single-character steps.
    """
    if isinstance(e, str):
        exprs = read_sexprs(e)
        if len(exprs) != 1:
            raise MalformedTransducer("expected one define-transducer form")
        e = exprs[0]
    if _head(e) != "define-transducer" or len(e.items) < 2 or not _is_sym(e.items[1]):
        raise MalformedTransducer("expected (define-transducer name ...)", e.line, e.col)
    name = e.items[1].value
    sections: dict[str, SList] = {}
    for sec in e.items[2:]:
        h = _head(sec)
        if h not in ("states", "init", "final", "trans"):
            raise MalformedTransducer(f"unknown section {h}", sec.line, sec.col)
        if h in sections:
            raise MalformedTransducer(f"duplicate section {h}", sec.line, sec.col)
        sections[h] = sec
    for required in ("states", "init", "final", "trans"):
        if required not in sections:
            raise MalformedTransducer(f"missing ({required} ...) section", e.line, e.col)
    names: dict[str, int] = {}
    for a in sections["states"].items[1:]:
        if not isinstance(a, Atom) or a.kind not in ("symbol", "numeral"):
            raise MalformedTransducer("state names must be symbols", a.line, a.col)
        if a.value in names:
            raise MalformedTransducer(f"state {a.value} declared twice", a.line, a.col)
        names[a.value] = len(names)

    def state(a: SExpr) -> int:
        if not isinstance(a, Atom) or a.value not in names:
            raise MalformedTransducer(f"unknown state {getattr(a, 'value', a)}", a.line, a.col)
        return names[a.value]

    init = [state(a) for a in sections["init"].items[1:]]
    final = [state(a) for a in sections["final"].items[1:]]
    if not init:
        raise MalformedTransducer("no initial state", sections["init"].line, sections["init"].col)
    count = len(names)
    trans: list[TTrans] = []
    for t in sections["trans"].items[1:]:
        if not isinstance(t, SList) or len(t.items) != 4:
            raise MalformedTransducer("transition must be (q input output q')", t.line, t.col)
        src, inp, out, dst = t.items
        q, q2 = state(src), state(dst)
        o = _output(out)
        if _is_sym(inp, "eps"):
            if COPY in o:
                raise MalformedTransducer("epsilon transition cannot copy", t.line, t.col)
            trans.append(TTrans(q, None, o, q2))
        elif isinstance(inp, Atom) and inp.kind == "string":
            word = inp.value
            if not word:
                if COPY in o:
                    raise MalformedTransducer("epsilon transition cannot copy", t.line, t.col)
                trans.append(TTrans(q, None, o, q2))
                continue
            if COPY in o and len(word) != 1:
                raise MalformedTransducer("copy needs a single input character", t.line, t.col)
            cur = q
            for i, c in enumerate(word):
                nxt = q2 if i == len(word) - 1 else count
                if nxt == count:
                    count += 1
                trans.append(TTrans(cur, ((ord(c), ord(c)),), o if i == 0 else (), nxt))
                cur = nxt
        else:
            label = _char_class(inp, alpha)
            if not label:
                continue
            if o.count(COPY) > 1:
                raise MalformedTransducer("at most one copy per output", t.line, t.col)
            trans.append(TTrans(q, label, o, q2))
    return Transducer(count, frozenset(init), frozenset(final), tuple(trans), name=name)


# ---------------------------------------------------------------------------
# normal form


@dataclass
class VarTable:
    declared: list[str]
    fresh: dict[str, str]

    def user_model(self, m: dict[str, str]) -> dict[str, str]:
        return {v: m[v] for v in self.declared if v in m}


class _Normalizer:
    def __init__(self, p: Problem, alpha: Alphabet):
        self.p = p
        self.alpha = alpha
        self.vars: list[str] = list(p.declared_vars)
        self.fresh: dict[str, str] = {}
        self.members: dict[str, list[Nfa]] = {}
        self.eqs: list[EquationalConstraint] = []
        self.counter = 0
        self.const_bound: dict[str, str] = {}

    def new_var(self, origin: str) -> str:
        while True:
            name = f"__n{self.counter}"
            self.counter += 1
            if name not in self.vars:
                break
        self.vars.append(name)
        self.fresh[name] = origin
        return name

    def member(self, v: str, a: Nfa) -> None:
        self.members.setdefault(v, []).append(a)

    def equation(self, lhs: str, f: StringFunction, args: tuple[str, ...]) -> None:
        self.eqs.append(EquationalConstraint(lhs, f, args, len(self.eqs)))

    def as_var(self, t: Term) -> str:
        if isinstance(t, TVar):
            return t.name
        v = self.new_var(_show(t))
        if isinstance(t, TConst):
            self.member(v, Nfa.literal(t.word))
        else:
            self.define(v, t)
        return v

    def define(self, lhs: str, t: Term) -> None:
        """Add lhs = t for a non-constant term t."""
        if isinstance(t, TApp):
            arg = self.as_var(t.arg)
            self.equation(lhs, t.fn, (arg,))
            return
        items = self.items(t) or [""]
        term = Concat(tuple(items))
        self.equation(lhs, term, term.vars)

    def items(self, t: Term) -> list:
        if isinstance(t, TVar):
            return [Var(t.name)]
        if isinstance(t, TConst):
            return [t.word] if t.word else []
        if isinstance(t, TConcat):
            out = []
            for part in t.parts:
                out.extend(self.items(part))
            merged: list = []
            for it in out:
                if isinstance(it, str) and merged and isinstance(merged[-1], str):
                    merged[-1] += it
                else:
                    merged.append(it)
            return merged
        return [Var(self.as_var(t))]

    def run(self) -> None:
        for f in self.p.assertions:
            if isinstance(f, Eq) and isinstance(f.left, TVar) and isinstance(f.right, TConst):
                self.const_bound.setdefault(f.left.name, f.right.word)
            if isinstance(f, Eq) and isinstance(f.right, TVar) and isinstance(f.left, TConst):
                self.const_bound.setdefault(f.right.name, f.left.word)
        for f in self.p.assertions:
            if isinstance(f, InRe):
                v = self.as_var(f.term)
                self.member(v, compile_regex(f.regex, self.alpha))
            elif isinstance(f, Contains):
                if isinstance(f.needle, TConst):
                    needle = f.needle.word
                elif isinstance(f.needle, TVar) and f.needle.name in self.const_bound:
                    needle = self.const_bound[f.needle.name]
                else:
                    raise UnsupportedFeature("str.contains with a non-constant needle")
                r = ReConcat((ReAll(), ReLit(needle), ReAll())) if needle else ReAll()
                self.member(self.as_var(f.term), compile_regex(ReComp(r) if f.negated else r, self.alpha))
            elif isinstance(f, Eq):
                self.eq(f.left, f.right)

    def eq(self, a: Term, b: Term) -> None:
        if isinstance(b, TVar) and not isinstance(a, TVar):
            a, b = b, a
        if isinstance(a, TConst) and isinstance(b, TConst):
            v = self.new_var(_show(a))
            self.member(v, Nfa.literal(a.word))
            self.member(v, Nfa.literal(b.word))
            return
        if isinstance(a, TVar):
            if isinstance(b, TConst):
                self.member(a.name, Nfa.literal(b.word))
            elif isinstance(b, TVar):
                self.equation(a.name, Concat((Var(b.name),)), (b.name,))
            else:
                self.define(a.name, b)
            return
        if isinstance(a, TConst):
            a, b = b, a
        if isinstance(b, TConst):
            v = self.as_var(a)
            self.member(v, Nfa.literal(b.word))
            return
        v = self.new_var(f"{_show(a)} = {_show(b)}")
        self.define(v, a)
        self.define(v, b)

    def sequent(self) -> Sequent:
        constraints = {}
        for v, langs in self.members.items():
            acc = langs[0]
            for other in langs[1:]:
                acc = intersect(acc, other)
            constraints[v] = acc
        return Sequent.build(constraints, self.eqs, self.alpha, self.vars)


def _show(t: Term) -> str:
    if isinstance(t, TVar):
        return t.name
    if isinstance(t, TConst):
        return encode_string(t.word)
    if isinstance(t, TConcat):
        return "(str.++ " + " ".join(_show(p) for p in t.parts) + ")"
    return f"({t.fn} {_show(t.arg)})"


def normalize(p: Problem, alpha: Alphabet = UNICODE) -> tuple[Sequent, VarTable]:
    n = _Normalizer(p, alpha)
    n.run()
    return n.sequent(), VarTable(list(p.declared_vars), n.fresh)


def load(text: str, alpha: Alphabet = UNICODE) -> tuple[Sequent, VarTable]:
    return normalize(parse(text), alpha)


def format_model(m: dict[str, str]) -> str:
    lines = ["(model"]
    for v, w in m.items():
        lines.append(f"  (define-fun {v} () String {encode_string(w)})")
    lines.append(")")
    return "\n".join(lines)
