"""Seeded generators for PCP and reverse-transcription benchmark families.

Each generator returns an :class:`Instance` holding the SMT-LIB text and a
manifest with the recorded verdict and, when known, a planted model.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import asdict, dataclass, field
from typing import Optional

from .frontend import Problem, encode_string, parse
from .functions import replace_all

PCP_SEARCH_DEPTH = 8
RNA = "acgu"
BIO_CHAIN = (("u", "A"), ("a", "T"), ("g", "C"), ("c", "G"))


@dataclass
class PcpSpec:
    num_dominos: int = 3
    word_len: int = 3
    alphabet_size: int = 2
    seed: int = 0
    tops: Optional[list[str]] = None
    bottoms: Optional[list[str]] = None
    encoding: str = "transducer"  # or "replaceall" (single domino only)

    def __post_init__(self):
        if min(self.num_dominos, self.word_len, self.alphabet_size) < 1:
            raise ValueError("PCP parameters must be at least 1")
        if self.alphabet_size > 10:
            raise ValueError("at most 10 word symbols are supported")
        if self.encoding not in ("transducer", "replaceall"):
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.encoding == "replaceall" and self.num_dominos != 1:
            raise ValueError("the replaceAll encoding is only available for one domino")


@dataclass
class BioSpec:
    dna_len: int = 200
    pattern_len: int = 15
    num_replace: int = 4
    want_sat: bool = True
    seed: int = 0

    def __post_init__(self):
        if not (1 <= self.pattern_len <= self.dna_len):
            raise ValueError("pattern length must be between 1 and the DNA length")
        if self.num_replace != len(BIO_CHAIN):
            raise ValueError(f"the base-pairing chain has exactly {len(BIO_CHAIN)} replacements")


@dataclass
class Instance:
    name: str
    text: str
    manifest: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return self.manifest["verdict"]

    def problem(self) -> Problem:
        return parse(self.text)

    def write(self, out_dir: str) -> tuple[str, str]:
        os.makedirs(out_dir, exist_ok=True)
        smt = os.path.join(out_dir, self.name + ".smt2")
        man = os.path.join(out_dir, self.name + ".json")
        with open(smt, "w", encoding="utf-8") as fh:
            fh.write(self.text)
        with open(man, "w", encoding="utf-8") as fh:
            json.dump(self.manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return smt, man


# ---------------------------------------------------------------------------
# PCP


def pcp_solution(tops: list[str], bottoms: list[str], max_len: int = PCP_SEARCH_DEPTH) -> Optional[list[int]]:
    """Shortest, then lexicographically least, nonempty index sequence with
    equal top and bottom concatenations."""
    k = len(tops)
    level: list[tuple[list[int], str, str]] = [([], "", "")]
    for _ in range(max_len):
        nxt = []
        for seq, t, b in level:
            for i in range(k):
                t2, b2 = t + tops[i], b + bottoms[i]
                n = min(len(t2), len(b2))
                if t2[:n] != b2[:n]:
                    continue
                s2 = seq + [i]
                if t2 == b2:
                    return s2
                nxt.append((s2, t2, b2))
        level = nxt
        if not level:
            return None
    return None


def _transducer_text(name: str, selectors: str, words: list[str]) -> str:
    trans = " ".join(f"(q0 {encode_string(s)} {encode_string(w)} q0)" for s, w in zip(selectors, words))
    return f"(define-transducer {name} (states q0) (init q0) (final q0) (trans {trans}))"


def gen_pcp(s: PcpSpec) -> Instance:
    rng = random.Random(s.seed)
    symbols = "0123456789"[: s.alphabet_size]
    if s.tops is not None and s.bottoms is not None:
        tops, bottoms = list(s.tops), list(s.bottoms)
        if len(tops) != s.num_dominos or len(bottoms) != s.num_dominos:
            raise ValueError("domino count does not match the given words")
        symbols = "".join(sorted(set("".join(tops + bottoms)))) or symbols
    else:
        tops = ["".join(rng.choice(symbols) for _ in range(s.word_len)) for _ in range(s.num_dominos)]
        bottoms = ["".join(rng.choice(symbols) for _ in range(s.word_len)) for _ in range(s.num_dominos)]
    # selector symbols follow the word symbols so the two never overlap
    first = max(int(c) for c in symbols) + 1 if symbols.isdigit() else 0
    pool = "0123456789abcdefghijklmnopqrstuvwxyz"
    selectors = "".join(c for c in pool[first:] if c not in symbols)[: s.num_dominos]
    if len(selectors) < s.num_dominos:
        raise ValueError("not enough selector symbols")
    sol = pcp_solution(tops, bottoms)
    sel_re = " ".join(f"(str.to_re {encode_string(c)})" for c in selectors)
    sel_re = f"(re.union {sel_re})" if s.num_dominos > 1 else sel_re
    lines = [
        f"; PCP instance: {s.num_dominos} dominos, word length {s.word_len}, seed {s.seed}",
        "; " + " ".join(f"[{t}/{b}]" for t, b in zip(tops, bottoms)),
        "(set-logic QF_S)",
        "(declare-const x String)",
        "(declare-const y String)",
        "(declare-const z String)",
    ]
    if s.encoding == "replaceall":
        top_term = f"(str.replace_all x {encode_string(selectors[0])} {encode_string(tops[0])})"
        bot_term = f"(str.replace_all x {encode_string(selectors[0])} {encode_string(bottoms[0])})"
    else:
        lines.append(_transducer_text("top", selectors, tops))
        lines.append(_transducer_text("bottom", selectors, bottoms))
        top_term, bot_term = "(top x)", "(bottom x)"
    lines += [
        f"(assert (str.in_re x (re.+ {sel_re})))",
        f"(assert (= y {top_term}))",
        f"(assert (= z {bot_term}))",
        "(assert (= y z))",
        "(check-sat)",
    ]
    manifest = {
        "family": "pcp",
        "spec": asdict(s),
        "tops": tops,
        "bottoms": bottoms,
        "selectors": selectors,
        "search_depth": PCP_SEARCH_DEPTH,
    }
    if sol is not None:
        word = "".join(selectors[i] for i in sol)
        top = "".join(tops[i] for i in sol)
        manifest["verdict"] = "sat"
        manifest["planted_model"] = {"x": word, "y": top, "z": top}
    else:
        manifest["verdict"] = "unknown-truth"
        manifest["planted_model"] = None
    name = f"pcp_d{s.num_dominos}_w{s.word_len}_s{s.seed}"
    return Instance(name, "\n".join(lines) + "\n", manifest)


# ---------------------------------------------------------------------------
# reverse transcription


def transcribe(rna: str) -> str:
    out = rna
    for pat, rep in BIO_CHAIN:
        out = replace_all(out, pat, rep)
    return out


_INVERSE = {"A": "u", "T": "a", "C": "g", "G": "c"}


def lowercase_preimage(dna: str) -> str:
    """The unique preimage over the RNA letters."""
    return "".join(_INVERSE[c] for c in dna)


def gen_bio(s: BioSpec) -> Instance:
    rng = random.Random(s.seed)
    y0 = "".join(rng.choice(RNA) for _ in range(s.dna_len))
    start = rng.randrange(s.dna_len - s.pattern_len + 1)
    pattern = y0[start : start + s.pattern_len]
    dna = transcribe(y0)
    if not s.want_sat:
        # mutate the DNA inside every occurrence until the pattern is gone
        chars = list(dna)
        while pattern in lowercase_preimage("".join(chars)):
            pre = lowercase_preimage("".join(chars))
            at = pre.index(pattern) + rng.randrange(s.pattern_len)
            chars[at] = rng.choice([c for c in "ACGT" if c != chars[at]])
        dna = "".join(chars)
        assert pattern not in lowercase_preimage(dna)
    lines = [
        f"; reverse transcription: DNA length {s.dna_len}, pattern length {s.pattern_len}, seed {s.seed}",
        "(set-logic QF_S)",
    ]
    lines += [f"(declare-const {v} String)" for v in ("x", "y", "y1", "y2", "y3", "z")]
    lines.append(f"(assert (= x {encode_string(dna)}))")
    src = "y"
    for i, (pat, rep) in enumerate(BIO_CHAIN):
        dst = f"y{i + 1}" if i < len(BIO_CHAIN) - 1 else "x"
        lines.append(f"(assert (= {dst} (str.replace_all {src} {encode_string(pat)} {encode_string(rep)})))")
        src = dst
    lines += [
        f"(assert (= z {encode_string(pattern)}))",
        "(assert (str.contains y z))",
        "(check-sat)",
    ]
    manifest = {"family": "bio", "spec": asdict(s), "dna": dna, "pattern": pattern}
    if s.want_sat:
        model = {"y": y0, "z": pattern}
        cur = y0
        for i, (pat, rep) in enumerate(BIO_CHAIN):
            cur = replace_all(cur, pat, rep)
            model[f"y{i + 1}" if i < len(BIO_CHAIN) - 1 else "x"] = cur
        manifest["verdict"] = "sat"
        manifest["planted_model"] = model
    else:
        manifest["verdict"] = "unsat"
        manifest["planted_model"] = None
    name = f"bio_{'sat' if s.want_sat else 'unsat'}_n{s.dna_len}_p{s.pattern_len}_s{s.seed}"
    return Instance(name, "\n".join(lines) + "\n", manifest)
