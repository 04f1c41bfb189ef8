import pytest

from conftest import load, term
from m2a.athena import AApp, AVar, Atom, Eq, Forall, If
from m2a.diagnostics import M2AError
from m2a.parser import parse_source
from m2a.translate import Translator, audit, cast_name, translate


def module(src):
    return parse_source(src)[0]


def names(theory, role):
    return [d.name for d in theory.symbol_decls if d.role == role]


def test_cast_names():
    assert cast_name("Even", "Nat") == "Cast_Even_to_Nat"


def test_peano_simple_is_a_datatype():
    th = translate(load("peano_simple"))
    [nat] = th.sort_decls
    assert nat.kind == "datatype" and nat.ctors == (("zero", ()), ("s", ("Nat",)))
    assert names(th, "function") == ["plus"] and names(th, "cast") == []


def test_subsorted_peano_uses_domains(peano):
    th = translate(peano)
    assert [(d.name, d.kind) for d in th.sort_decls] == [("Nat", "domain"), ("Even", "domain"), ("NzNat", "domain")]
    assert names(th, "function") == ["zero", "s", "plus"]
    assert names(th, "predicate") == ["is_Even"]


def test_equation_terms_get_casts(peano):
    th = translate(peano)
    eq1 = th.assertion("eq_1").sentence
    X, Y = AVar("X", "Nat"), AVar("Y", "Nat")
    cast = lambda t: AApp("Cast_NzNat_to_Nat", (t,))
    assert eq1 == Eq(AApp("plus", (X, cast(AApp("s", (Y,))))), cast(AApp("s", (AApp("plus", (X, Y)),))))


def test_membership_becomes_implication(peano):
    mb = translate(peano).assertion("mb_0").sentence
    assert isinstance(mb, If) and mb.cond == Atom("is_Even", (AVar("X", "Nat"),))
    assert mb.body.pred == "is_Even"


def test_core_equality_per_strict_chain(chain):
    th = translate(chain)
    assert names(th, "cast") == ["Cast_A_to_B", "Cast_A_to_C", "Cast_B_to_C"]
    [core] = [a for a in th.assertions if a.role == "core"]
    assert core.name == "core_eq_A_B_C" and core.explicit
    x = AVar("x", "A")
    assert core.sentence == Forall(
        x, Eq(AApp("Cast_B_to_C", (AApp("Cast_A_to_B", (x,)),)), AApp("Cast_A_to_C", (x,))), typed=True
    )


def test_arguments_use_direct_casts(chain):
    tr = Translator(chain)
    t = tr.tr_term(term(chain, "g(a)"), "C")
    assert t == AApp("g", (AApp("Cast_A_to_C", (AApp("a"),)),))


def test_outer_cast_to_expected_sort(chain):
    tr = Translator(chain)
    assert tr.tr_term(term(chain, "h(a)"), "C") == AApp("Cast_B_to_C", (AApp("h", (AApp("Cast_A_to_B", (AApp("a"),)),)),))


def test_collisions_are_mangled(toy):
    th = translate(toy)
    assert "mult_Exp_Exp_Exp" in names(th, "function") and "mult_Instr" in names(th, "function")


def test_builtins_are_not_declared(toy):
    th = translate(toy)
    assert not {"+", "-", "*", "Int"} & (set(names(th, "function")) | {d.name for d in th.sort_decls})
    assert ("+", 2) in th.natives


def test_acu_assertions(toy):
    th = translate(toy)
    assert [a.name for a in th.assertions if a.role == "structural"] == ["assoc_++", "left_id_++", "right_id_++"]


def test_comm_assertion():
    m = module("fmod M is sort S . op a : -> S [ctor] . op _+_ : S S -> S [comm] . endfm")
    th = translate(m)
    [comm] = [a for a in th.assertions if a.role == "structural"]
    assert comm.name == "comm_plus" and comm.sentence.lhs.args == comm.sentence.rhs.args[::-1]


def test_native_glyph_alias():
    th = translate(load("peano_simple"))
    [plus] = [d for d in th.symbol_decls if d.name == "plus"]
    assert plus.alias == "+"


def test_induction_schemes(toy):
    th = translate(toy)
    methods = {m.method: m for m in th.methods}
    assert set(methods) == {"exp-induction", "program-induction"}
    prog = methods["program-induction"]
    assert [o.name for o in prog.obligations] == ["basis_push", "basis_add", "basis_sub", "basis_mult", "basis_nil", "ic"]
    ic = prog.obligations[-1]
    assert ic.step == "ic" and ic.source.recursive == (True, True)


def test_nat_induction_recursive_position_through_subsort(peano):
    [m] = translate(peano).methods
    s = next(c for c in m.constructors if c.name == "s")
    assert s.recursive == (True,)
    assert [o.name for o in m.obligations] == ["basis", "ic"]


def test_induction_can_be_disabled(toy):
    assert translate(toy, induction=False).methods == []


def test_kind_is_synthesized_for_multi_top_memberships():
    m = module("""fmod M is sorts A B C . subsorts C < A B . op c : -> C [ctor] .
      op f : A -> A . var X : A . mb f(X) : C . endfm""")
    th = translate(m)
    assert "kind-synthesized" in [w.rule for w in th.warnings]
    assert "K_A_B_C" in [d.name for d in th.sort_decls]


def test_strict_sensibility_gate():
    with pytest.raises(M2AError) as exc:
        translate(load("bad_strong"))
    assert "strong-sensibility" in exc.value.rules


def test_incomparable_equation_sides():
    m = module("""fmod M is sorts A B C . subsorts A B < C . op a : -> A . op b : -> B .
      eq a = b . endfm""")
    th = translate(m)  # both sides lift to their least upper bound C
    eq = th.assertion("eq_0").sentence
    assert eq.lhs.fn == "Cast_A_to_C" and eq.rhs.fn == "Cast_B_to_C"


def test_kind_mismatch_in_equation():
    m = module("fmod M is sorts A B . op a : -> A . op b : -> B . eq a = b . endfm")
    with pytest.raises(M2AError) as exc:
        translate(m)
    assert exc.value.rules == ["kind-mismatch"]


def test_audit_catches_undeclared_symbols(peano):
    th = translate(peano)
    th.symbol_decls = [d for d in th.symbol_decls if d.name != "plus"]
    with pytest.raises(M2AError) as exc:
        audit(th)
    assert exc.value.rules == ["internal-audit"]
