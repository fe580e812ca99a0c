import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import AB, matches, regex_strategy, words
from rcpsolve.automata import (
    Alphabet,
    Nfa,
    RegexSyntaxError,
    StateCapExceeded,
    accepts,
    compile_regex,
    complement,
    concat_lang,
    determinize,
    enumerate_words,
    equivalent,
    includes,
    intersect,
    is_empty,
    is_finite,
    is_universal,
    iv_diff,
    iv_inter,
    iv_norm,
    iv_union,
    minimize,
    regex,
    reverse_lang,
    singleton_word,
    star_lang,
    union_lang,
)

ALPHA = Alphabet.custom(AB)
SHORT = list(words(AB, 5))


def lang(a, max_len=5):
    return {w for w in words(AB, max_len) if accepts(a, w)}


def test_interval_algebra():
    assert iv_norm([(5, 7), (1, 2), (3, 4)]) == ((1, 7),)
    assert iv_inter(((0, 10),), ((5, 20),)) == ((5, 10),)
    assert iv_union(((0, 1),), ((3, 4),)) == ((0, 1), (3, 4))
    assert iv_diff(((0, 10),), ((3, 4),)) == ((0, 2), (5, 10))


def test_regex_syntax():
    a = regex("(ab)*|c+", Alphabet.custom("abc"))
    assert accepts(a, "abab") and accepts(a, "ccc") and not accepts(a, "abc")
    b = regex("[a-c]&~(b)", Alphabet.custom("abc"))
    assert accepts(b, "a") and not accepts(b, "b")
    assert is_empty(regex("[]")) is None
    assert accepts(regex("()"), "")


def test_regex_syntax_error():
    with pytest.raises(RegexSyntaxError):
        regex("(ab")


def test_unicode_literal():
    a = regex("é+")
    assert accepts(a, "éé") and not accepts(a, "e")


def test_shortest_witness():
    assert is_empty(regex("a*b(a|b)", ALPHA)) == "ba"
    assert is_empty(intersect(regex("a+", ALPHA), regex("b+", ALPHA))) is None


def test_singleton_and_finite():
    assert singleton_word(regex("ab", ALPHA)) == "ab"
    assert singleton_word(regex("a|b", ALPHA)) is None
    assert is_finite(regex("a|bb", ALPHA))
    assert not is_finite(regex("a*", ALPHA))


def test_enumeration_is_length_lex():
    assert enumerate_words(regex("(a|b)*", ALPHA), 2) == ["", "a", "b", "aa", "ab", "ba", "bb"]


def test_inclusion_counterexample():
    inc = includes(regex("a*", ALPHA), regex("a*b?", ALPHA))
    assert not inc.holds and inc.counterexample == "b"
    assert includes(regex("(a|b)*", ALPHA), regex("ab*", ALPHA)).holds


def test_universality_over_alphabet():
    assert is_universal(regex("(a|b)*", ALPHA), ALPHA)
    assert not is_universal(regex("(a|b)*", ALPHA))


def test_state_cap():
    # (a|b)*a(a|b)^k needs 2^k deterministic states
    a = regex("(a|b)*a(a|b)(a|b)(a|b)(a|b)(a|b)(a|b)", ALPHA)
    with pytest.raises(StateCapExceeded):
        determinize(a, cap=16)


def test_minimize_is_canonical():
    a = minimize(regex("(a|b)*abb", ALPHA))
    b = minimize(regex("(a|b)*a(b)(b)", ALPHA))
    assert a.num_states == 4
    assert a.num_states == b.num_states and equivalent(a, b)


@settings(max_examples=150, deadline=None)
@given(regex_strategy())
def test_compile_agrees_with_derivatives(r):
    a = compile_regex(r, ALPHA)
    for w in SHORT:
        assert accepts(a, w) == matches(r, w), w


@settings(max_examples=80, deadline=None)
@given(regex_strategy(max_leaves=4), regex_strategy(max_leaves=4))
def test_boolean_and_regular_operations(r1, r2):
    a, b = compile_regex(r1, ALPHA), compile_regex(r2, ALPHA)
    la, lb = lang(a), lang(b)
    assert lang(intersect(a, b)) == la & lb
    assert lang(union_lang(a, b)) == la | lb
    assert lang(complement(a, ALPHA)) == set(SHORT) - la
    assert lang(reverse_lang(a)) == {w[::-1] for w in la}
    assert {w for w in lang(concat_lang(a, b), 4)} == {u + v for u in lang(a, 4) for v in lang(b, 4) if len(u + v) <= 4}
    star = lang(star_lang(a), 4)
    assert "" in star and la & set(words(AB, 4)) <= star


@settings(max_examples=80, deadline=None)
@given(regex_strategy())
def test_determinize_and_minimize_preserve_language(r):
    a = compile_regex(r, ALPHA)
    la = lang(a)
    d = determinize(a)
    assert lang(d) == la
    m = minimize(a)
    assert lang(m) == la
    assert m.num_states <= max(d.num_states, 1)


@settings(max_examples=80, deadline=None)
@given(regex_strategy(max_leaves=4), regex_strategy(max_leaves=4))
def test_inclusion_matches_enumeration(r1, r2):
    a, b = compile_regex(r1, ALPHA), compile_regex(r2, ALPHA)
    inc = includes(a, b)
    if inc.holds:
        assert lang(b) <= lang(a)
    else:
        w = inc.counterexample
        assert accepts(b, w) and not accepts(a, w)


@settings(max_examples=80, deadline=None)
@given(regex_strategy())
def test_emptiness_witness_is_shortest(r):
    a = compile_regex(r, ALPHA)
    w = is_empty(a)
    la = lang(a, 6)
    if w is None:
        assert not la
    else:
        assert accepts(a, w)
        assert all(len(x) >= len(w) for x in la)


@given(st.lists(st.text(alphabet=AB, max_size=4), max_size=5))
def test_from_words(ws):
    a = Nfa.from_words(ws)
    assert lang(a) == set(ws)
