import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES, load, term
from m2a.diagnostics import M2AError
from m2a.lexer import tokenize
from m2a.parser import parse_source
from m2a.syntax import App, Var, format_module, format_term


def parse_error(src: str) -> list[str]:
    with pytest.raises(M2AError) as exc:
        parse_source(src)
    return exc.value.rules


def test_tokenize_drops_comments_and_splits_final_dot():
    toks = [t.text for t in tokenize("--- note\nop zero : -> Nat . *** more\n")]
    assert toks == ["op", "zero", ":", "->", "Nat", "."]


def test_token_positions_are_one_based():
    tok = tokenize("fmod M is\n  sort S .\nendfm")[4]
    assert (tok.text, tok.span.line, tok.span.col) == ("S", 2, 8)


def test_unterminated_token():
    assert parse_error("fmod M is \x01 endfm") == ["unterminated-token"]


def test_peano_module_shape(peano):
    assert peano.name == "PEANO"
    assert peano.sorts == ["Nat", "Even", "NzNat"]
    assert [op.name for op in peano.ops] == ["zero", "s_", "_+_"]
    assert len(peano.equations) == 2 and len(peano.memberships) == 1


def test_mixfix_terms(peano):
    t = term(peano, "s s X")
    assert t == App("s_", (App("s_", (Var("X", "Nat"),)),))
    assert term(peano, "X + s Y") == App("_+_", (Var("X", "Nat"), App("s_", (Var("Y", "Nat"),))))


def test_same_operator_chains_associate_right(toy):
    t = term(toy, "P ++ P ++ nil")
    assert t.op == "_++_" and t.args[1].op == "_++_"


def test_prefix_and_literal_terms(toy):
    t = term(toy, "exec(nil, 3 :: empty)")
    assert t.op == "exec" and t.args[1].args[0] == App("3")


def test_ambiguous_parse_lists_readings():
    src = """fmod M is sort S . op a : -> S . op _*_ : S S -> S .
    eq a * a * a = a . endfm"""
    # without assoc the parser prefers the right-nested reading, so this is not ambiguous
    m = parse_source(src)[0]
    assert m.equations[0].lhs.args[1].op == "_*_"
    src = """fmod M is sort S . op a : -> S . op _*_ : S S -> S . op _+_ : S S -> S .
    eq a * a + a = a . endfm"""
    with pytest.raises(M2AError) as exc:
        parse_source(src)
    assert exc.value.rules == ["ambiguous-parse"]
    assert "(a * a) + a" in exc.value.diagnostics[0].message


@pytest.mark.parametrize("src, rule", [
    ("fmod M is sort S . op a : -> T . endfm", "unknown-sort"),
    ("fmod M is sorts A B . subsorts A < B . subsort B < A . endfm", "subsort-cycle"),
    ("fmod M is sort S . op a : -> S [frobnicate] . endfm", "unknown-attribute"),
    ("fmod M is sort S . op a : -> S [memo] . endfm", "unsupported-feature"),
    ("fmod M is sort S . op a : -> S . eq b = a . endfm", "unknown-identifier"),
    ("fmod M is protecting QID . endfm", "unknown-import"),
    ("fmod M is sort S . op a : -> S . endfm extra", "syntax-error"),
])
def test_rejections(src, rule):
    assert rule in parse_error(src)


def test_builtins_can_be_disabled():
    src = (FIXTURES / "toy_compiler.maude").read_text()
    with pytest.raises(M2AError) as exc:
        parse_source(src, builtins=False)
    assert exc.value.rules == ["unknown-import"]


def test_several_modules_in_one_file():
    src = "fmod A is sort S . endfm\nfmod B is sort T . endfm"
    assert [m.name for m in parse_source(src)] == ["A", "B"]


@pytest.mark.parametrize("name", ["peano", "peano_simple", "toy_compiler", "chain"])
def test_module_round_trip(name):
    m = load(name)
    assert parse_source(format_module(m))[0] == m


def peano_terms(depth: int = 4):
    leaf = st.sampled_from([App("zero"), Var("X", "Nat"), Var("Y", "Nat")])
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            sub.map(lambda a: App("s_", (a,))),
            st.tuples(sub, sub).map(lambda p: App("_+_", p)),
        ),
        max_leaves=8,
    )


@settings(max_examples=150, deadline=None)
@given(peano_terms())
def test_term_print_parse_round_trip(t):
    m = load("peano")
    assert term(m, format_term(t)) == t


@settings(max_examples=50, deadline=None)
@given(peano_terms())
def test_parse_is_deterministic(t):
    m = load("peano")
    text = format_term(t)
    assert term(m, text) == term(m, text)
