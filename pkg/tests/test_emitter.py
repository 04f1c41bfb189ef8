import pytest
from hypothesis import given, settings, strategies as st

from conftest import CORPUS, GOLDEN, load
from m2a.athena import AApp, AVar, Eq
from m2a.diagnostics import M2AError
from m2a.emitter import (
    EmitterConfig, check_balanced, contains_tokens, emit, layout, mangle_name, normalize_tokens, sentence_sexpr,
)
from m2a.syntax import OpDecl
from m2a.translate import translate


def test_mangle_doctests():
    import doctest
    import m2a.emitter

    assert doctest.testmod(m2a.emitter).failed == 0


def test_unmappable_name():
    with pytest.raises(M2AError) as exc:
        mangle_name(OpDecl("__", ("S", "S"), "S"))
    assert exc.value.rules == ["unmappable-character"]


def test_header_and_trailing_newline(peano):
    out = emit(translate(peano))
    assert out.startswith("# Generated by m2a 0.1.0 from Maude module PEANO\n")
    assert out.endswith("\n") and not out.endswith("\n\n")
    assert all(line == line.rstrip() for line in out.split("\n"))


def test_section_order(peano):
    out = emit(translate(peano))
    order = [out.index(k) for k in ("domains", "declare zero", "declare Cast_", "declare is_Even", "define", "assert*", "primitive-method")]
    assert order == sorted(order)


def test_long_equations_break_before_equals():
    cfg = EmitterConfig(line_width=30)
    x = AVar("x", "S")
    eq = Eq(AApp("f", (AApp("g", (x, x)), x)), AApp("h", (x, AApp("g", (x, x)))))
    text = layout(sentence_sexpr(eq, cfg), 0, cfg.line_width)
    assert text.split("\n")[1].lstrip().startswith("= ")
    assert normalize_tokens(text) == normalize_tokens("((f (g x x) x) = (h x (g x x)))")


def test_config_validation():
    with pytest.raises(ValueError):
        EmitterConfig(indent_width=0)


def test_indent_width_changes_layout_only(toy):
    th = translate(toy)
    a, b = emit(th), emit(th, EmitterConfig(indent_width=2, line_width=60))
    assert a != b and normalize_tokens(a) == normalize_tokens(b)


def test_balance_check():
    with pytest.raises(M2AError):
        check_balanced("(a (b)\n")


def test_contains_tokens_ignores_layout():
    assert contains_tokens("x := (f\n   a)", "x:=(f a)")
    assert not contains_tokens("x := (f a)", "(f b)")


@pytest.mark.parametrize("name", CORPUS)
def test_golden_files(name):
    module = load(name)
    expected = (GOLDEN / f"{module.name}.ath").read_text()
    assert emit(translate(module)) == expected


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(CORPUS))
def test_emit_is_deterministic(name):
    assert emit(translate(load(name))) == emit(translate(load(name)))
