"""Acceptance criteria; a PASS/FAIL line per criterion is printed in the pytest summary."""

import hashlib
import time

import pytest

from conftest import CORPUS, load
from m2a.emitter import contains_tokens, emit
from m2a.oracle import OracleBudget, joint_exhaustiveness, verify_equivalence
from m2a.signature import analyze
from m2a.translate import translate


class Timer:
    def __init__(self, request, limit: float):
        self.request, self.limit = request, limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        self.request.node.criterion_detail = f"{self.elapsed:.2f}s, limit {self.limit:g}s"
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s, limit {self.limit}s"


def translated(name: str) -> str:
    return emit(translate(load(name)))


NAT_INDUCTION = """
primitive-method (nat-induction property) :=
  let {
    basis := (property (Cast_Even_to_Nat zero));
    ic := (forall x (if (property x) (property (Cast_NzNat_to_Nat (s x)))))
    }
    check { (holds? basis) =>
              check {(holds? ic) => (forall x (property x))
                    | else => (error "Inductive step does not hold.")}
              | else => (error "Basis step does not hold.")}
"""

EQ_4 = """assert* eq_4 := ((compile (Cast_Int_to_Exp N))
                        = (Cast_Instr_to_Program (push N)))"""
EQ_9 = """assert* eq_9 := ((exec (++ (Cast_Instr_to_Program (push N)) P) S)
                        = (exec P (:: N S)))"""
ACU = [
    "define [_v1 _v2 _v3 _v4] := [?_v1:Program ?_v2:Program ?_v3:Program ?_v4:Program]",
    "assert* assoc_++ := ((++ (++ _v1 _v2) _v3) = (++ _v1 (++ _v2 _v3)))",
    "assert* left_id_++ := ((++ nil _v4) = _v4)",
    "assert* right_id_++ := ((++ _v4 nil) = _v4)",
]


@pytest.mark.criterion(1, "Golden Peano (simple)")
def test_golden_peano_simple(request):
    with Timer(request, 1.0):
        out = translated("peano_simple")
    assert contains_tokens(out, "datatype Nat := zero | (s Nat)")
    assert contains_tokens(out, "declare plus:[Nat Nat] -> Nat")


@pytest.mark.criterion(2, "Golden Peano (subsorted)")
def test_golden_peano_subsorted(request):
    with Timer(request, 1.0):
        theory = translate(load("peano"))
        out = emit(theory)
    assert contains_tokens(out, "domains Nat, Even, NzNat")
    casts = [d.name for d in theory.symbol_decls if d.role == "cast"]
    assert casts == ["Cast_Even_to_Nat", "Cast_NzNat_to_Nat"]
    assert not [a for a in theory.assertions if a.role == "core"]
    mbs = [a for a in theory.assertions if a.role == "membership"]
    assert len(mbs) == 1 and contains_tokens(out, "(if (is_Even X) (is_Even")
    assert contains_tokens(out, NAT_INDUCTION)


@pytest.mark.criterion(3, "Golden toy compiler")
def test_golden_toy_compiler(request):
    with Timer(request, 2.0):
        theory = translate(load("toy_compiler"))
        out = emit(theory)
    for fragment in [EQ_4, EQ_9, *ACU, "datatype Stack := empty | (:: Int Stack)"]:
        assert contains_tokens(out, fragment), fragment
    exp = next(m for m in theory.methods if m.method == "exp-induction")
    assert [o.name for o in exp.obligations] == ["basis_n", "ic_plus", "ic_minus", "ic_mult"]


@pytest.mark.criterion(4, "Sensibility gate")
def test_sensibility_gate(request):
    with Timer(request, 1.0):
        strong = analyze(load("bad_strong"))[2]
        bound = analyze(load("bad_maxbound"))[2]
        good = [analyze(load(n))[2] for n in ("peano_simple", "peano", "toy_compiler")]
    assert not strong.strictly_sensible and "strong-sensibility" in [v.rule for v in strong.violations]
    assert not bound.strictly_sensible and "maximal-argument-bounding" in [v.rule for v in bound.violations]
    assert all(r.strictly_sensible and r.preregular for r in good)


@pytest.mark.criterion(5, "Source/target equality agreement on Peano")
def test_equality_agreement(request):
    with Timer(request, 60.0):
        report = verify_equivalence(load("peano"), budget=OracleBudget(max_depth=4), pairs=200, depth=4, seed=2024)
    assert report.pairs == 200
    assert report.disagreements == []
    assert report.inconclusive <= 0.2 * report.pairs
    assert report.source_equal > 0  # the sample exercises both verdicts


@pytest.mark.criterion(6, "Mutation sensitivity")
def test_mutation_sensitivity(request):
    module = load("chain")
    with Timer(request, 30.0):
        intact = verify_equivalence(module, translate(module), pairs=60, depth=3, seed=11)
        broken = verify_equivalence(module, translate(module).without("core_eq_A_B_C"), pairs=60, depth=3, seed=11)
    assert intact.disagreements == []
    assert len(broken.disagreements) >= 1


@pytest.mark.criterion(7, "Joint exhaustiveness of nat-induction")
def test_joint_exhaustiveness(request):
    with Timer(request, 5.0):
        [report] = joint_exhaustiveness(load("peano"), depth=5)
    assert report.checked == 6  # zero, s zero, ..., s^5 zero
    assert report.uncovered == []


@pytest.mark.criterion(8, "Deterministic translation")
def test_determinism(request):
    def digest():
        h = hashlib.sha256()
        for name in CORPUS:
            h.update(translated(name).encode())
        return h.hexdigest()

    with Timer(request, 5.0):
        first, second = digest(), digest()
    assert first == second


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
