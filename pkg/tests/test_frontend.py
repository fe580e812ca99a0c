from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rcpsolve.automata import accepts
from rcpsolve.frontend import (
    MalformedTransducer,
    ParseError,
    UnsupportedFeature,
    encode_string,
    format_model,
    load,
    parse,
    parse_transducer,
    read_sexprs,
    tokenize,
)
from rcpsolve.functions import Concat, ReplaceAll, Transducer, evaluate

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


def test_string_escapes():
    (e,) = read_sexprs('"a""b\\u{48}\\u0049"')
    assert e.value == 'a"bHI'


@given(st.text(alphabet=st.characters(max_codepoint=0x2FFFF), max_size=10))
def test_encode_roundtrip(s):
    (e,) = read_sexprs(encode_string(s))
    assert e.value == s


def test_positions_in_errors():
    with pytest.raises(ParseError) as err:
        parse("(assert (= x\n  (str.++ y ))")
    assert err.value.line >= 1


def test_unbalanced():
    with pytest.raises(ParseError):
        tokenize('(assert "abc)')
    with pytest.raises(ParseError):
        read_sexprs("(a (b)")


def test_undeclared_variable():
    with pytest.raises(ParseError):
        parse("(assert (str.in_re x (str.to_re \"a\")))")


def test_length_is_unsupported():
    text = "(declare-const x String)(assert (= (str.len x) 3))"
    with pytest.raises(UnsupportedFeature):
        parse(text)


def test_normal_form_of_square():
    root, table = load((INSTANCES / "square.smt2").read_text())
    assert [e.lhs for e in root.equations] == ["y", "y"]
    assert all(isinstance(e.rhs, Concat) for e in root.equations)
    assert accepts(root.constraint("z"), "b") and not accepts(root.constraint("z"), "a")
    assert table.fresh == {}


def test_nested_terms_get_fresh_variables():
    text = """
    (declare-const x String)
    (declare-const y String)
    (assert (= y (str.++ "<" (str.replace_all (str.replace_all x "a" "b") "b" "c") ">")))
    """
    root, table = load(text)
    assert len(table.fresh) == 2
    kinds = sorted(type(e.rhs).__name__ for e in root.equations)
    assert kinds == ["Concat", "ReplaceAll", "ReplaceAll"]
    m = {"x": "ab"}
    inner = [e for e in root.equations if e.rhs == ReplaceAll("a", "b")][0]
    outer = [e for e in root.equations if e.rhs == ReplaceAll("b", "c")][0]
    m[inner.lhs] = evaluate(inner.rhs, [m["x"]])
    m[outer.lhs] = evaluate(outer.rhs, [m[inner.lhs]])
    assert m[outer.lhs] == "cc"


def test_two_sided_equation_uses_shared_variable():
    root, table = load((INSTANCES / "lowerbound.smt2").read_text())
    assert len(root.equations) == 2
    assert root.equations[0].lhs == root.equations[1].lhs
    assert list(table.fresh) == [root.equations[0].lhs]


def test_contains_becomes_membership():
    text = """
    (declare-const y String)
    (declare-const z String)
    (assert (= z "ca"))
    (assert (str.contains y z))
    (assert (not (str.contains y "aa")))
    """
    root, _ = load(text)
    assert not root.equations
    c = root.constraint("y")
    assert accepts(c, "bcab") and not accepts(c, "caab") and not accepts(c, "bb")


def test_negated_membership():
    text = "(declare-const x String)(assert (not (str.in_re x (re.* (str.to_re \"a\")))))"
    root, _ = load(text)
    assert accepts(root.constraint("x"), "b") and not accepts(root.constraint("x"), "aa")


def test_regex_operators():
    text = """
    (declare-const x String)
    (assert (str.in_re x (re.inter (re.loop (re.range "a" "c") 2 3) (re.comp (str.to_re "abc")))))
    """
    c = load(text)[0].constraint("x")
    assert accepts(c, "ab") and accepts(c, "cab") and not accepts(c, "abc") and not accepts(c, "a")


def test_transducer_definition():
    t = parse_transducer(
        """(define-transducer dash (states q) (init q) (final q)
             (trans (q (re.range "a" "z") (out copy "-") q)))"""
    )
    assert isinstance(t, Transducer)
    assert evaluate(t, ["ab"]) == "a-b-"


def test_malformed_transducer():
    with pytest.raises(MalformedTransducer):
        parse_transducer("(define-transducer t (states q) (init r) (final q) (trans))")
    with pytest.raises(MalformedTransducer):
        parse_transducer("(define-transducer t (states q) (init q) (final q) (trans (q eps copy q)))")


def test_sanitization_transducers():
    p = parse((INSTANCES / "sanitization.smt2").read_text())
    trim, lead, trail = (p.transducers[n] for n in ("f_trim", "g_lead", "g_trail"))
    assert evaluate(trim, ["   000123.45000   "]) == "000123.45000"
    assert evaluate(trim, [" a b  "]) == "a b"
    assert evaluate(lead, ["000123"]) == "123"
    assert evaluate(lead, ["000"]) == ""
    assert evaluate(trail, ["45000"]) == "45"
    assert evaluate(trail, ["4050"]) == "405"


def test_format_model():
    assert format_model({"x": 'a"b'}) == '(model\n  (define-fun x () String "a""b")\n)'
