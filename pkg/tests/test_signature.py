import pytest
from hypothesis import given, settings, strategies as st

from conftest import load, term
from m2a.diagnostics import M2AError
from m2a.parser import parse_source
from m2a.signature import Signature, ac_classes, analyze, build_poset, constructor_subsignature
from m2a.syntax import App


def module(src):
    return parse_source(src)[0]


def test_peano_poset(peano):
    p = build_poset(peano)
    assert p.lt("Even", "Nat") and p.lt("NzNat", "Nat")
    assert not p.le("Even", "NzNat") and not p.le("NzNat", "Even")
    assert p.components == (("Nat", "Even", "NzNat"),)
    assert p.kind("Even") == "Nat"
    assert p.strict_pairs() == [("Even", "Nat"), ("NzNat", "Nat")]


def test_components_of_toy_compiler(toy):
    p = build_poset(toy)
    assert p.same_component("Int", "Exp") and p.same_component("Instr", "Program")
    assert not p.same_component("Exp", "Stack")


def test_kind_without_top_is_synthesized():
    m = module("fmod M is sorts A B C . subsorts C < A B . endfm")
    p = build_poset(m)
    assert p.kind("C") == "K_A_B_C" and not p.has_top("C")


def test_cycle_message_names_the_path():
    with pytest.raises(M2AError) as exc:
        parse_source("fmod M is sorts A B C . subsort A < B . subsort B < C . subsort C < A . endfm")
    assert "A < B < C < A" in exc.value.diagnostics[0].message


def test_least_sorts(peano):
    sig = Signature(peano)
    assert sig.least_sort(term(peano, "zero")) == "Even"
    assert sig.least_sort(term(peano, "s zero")) == "NzNat"
    assert sig.least_sort(term(peano, "zero + zero")) == "Nat"


def test_no_applicable_declaration():
    m = module("fmod M is sorts A B . op a : -> A . op f : B -> B . endfm")
    with pytest.raises(M2AError) as exc:
        Signature(m).least_sort(App("f", (App("a"),)))
    assert exc.value.rules == ["no-applicable-declaration"]


def test_non_preregular_term():
    m = module("""fmod M is sorts A B C D . subsorts A < B C . op a : -> A .
      op f : B -> B . op f : C -> C . endfm""")
    sig = Signature(m)
    with pytest.raises(M2AError) as exc:
        sig.least_sort(App("f", (App("a"),)))
    assert exc.value.rules == ["non-preregular"]


def test_ac_classes_and_representatives(toy):
    classes = ac_classes(toy, build_poset(toy))
    mult = [c for c in classes if c.name in ("mult", "_mult_")]
    assert len(mult) == 2  # same stripped name, different arity: two classes
    assert all(c.representative is not None for c in classes)


def test_overloads_in_one_component_share_a_class():
    m = module("""fmod M is sorts A B . subsort A < B . op a : -> A .
      op f : A -> A . op f : B -> B . endfm""")
    [f] = [c for c in ac_classes(m, build_poset(m)) if c.name == "f"]
    assert len(f.members) == 2 and f.representative.arg_sorts == ("B",)
    # targets differ, so the signature is not strongly sensible
    assert not analyze(m)[2].strongly_sensible


@pytest.mark.parametrize("name, strong, bounding", [
    ("bad_strong", False, True),
    ("bad_maxbound", True, False),
    ("peano", True, True),
    ("toy_compiler", True, True),
])
def test_sensibility(name, strong, bounding):
    report = analyze(load(name))[2]
    assert (report.strongly_sensible, report.maximal_bounding) == (strong, bounding)
    assert report.to_dict()["strictly_sensible"] == (strong and bounding)


def test_violation_is_located():
    [v] = analyze(load("bad_strong"))[2].violations
    assert v.rule == "strong-sensibility" and v.span.line == 6


def test_constructor_warning_for_uncovered_kind():
    m = module("fmod M is sorts A B . op a : -> A [ctor] . op b : -> B . endfm")
    info = constructor_subsignature(m)
    assert [w.rule for w in info.warnings] == ["no-constructors"]


@st.composite
def posets(draw):
    n = draw(st.integers(1, 6))
    sorts = [f"S{i}" for i in range(n)]
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=8))
    # only edges i < j, so the order is acyclic by construction
    pairs = sorted({(sorts[i], sorts[j]) for i, j in edges if i < j})
    src = "fmod M is sorts " + " ".join(sorts) + " . "
    src += " ".join(f"subsort {a} < {b} ." for a, b in pairs) + " endfm"
    return build_poset(module(src))


@settings(max_examples=100, deadline=None)
@given(posets())
def test_poset_laws(p):
    for a in p.sorts:
        assert p.le(a, a)
        for b in p.sorts:
            if p.le(a, b) and p.le(b, a):
                assert a == b
            for c in p.sorts:
                if p.le(a, b) and p.le(b, c):
                    assert p.le(a, c)
            if p.le(a, b):
                assert p.same_component(a, b)


ground = st.recursive(
    st.just(App("zero")),
    lambda sub: st.one_of(sub.map(lambda a: App("s_", (a,))), st.tuples(sub, sub).map(lambda p: App("_+_", p))),
    max_leaves=6,
)


def positions(t, pos=()):
    yield pos
    for i, a in enumerate(t.args):
        yield from positions(a, pos + (i,))


def replace(t, pos, new):
    if not pos:
        return new
    args = list(t.args)
    args[pos[0]] = replace(args[pos[0]], pos[1:], new)
    return App(t.op, tuple(args))


def at(t, pos):
    for i in pos:
        t = t.args[i]
    return t


@settings(max_examples=150, deadline=None)
@given(ground, ground, st.data())
def test_least_sort_monotone_under_replacement(t, u, data):
    """Replacing a subterm by one of smaller or equal least sort never raises the least sort."""
    sig = Signature(load("peano"))
    pos = data.draw(st.sampled_from(list(positions(t))))
    if not sig.poset.le(sig.least_sort(u), sig.least_sort(at(t, pos))):
        return
    assert sig.poset.le(sig.least_sort(replace(t, pos, u)), sig.least_sort(t))
