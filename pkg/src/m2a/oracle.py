"""Bounded decision of equational provability on ground terms, for the source
order-sorted theory and for the translated many-sorted theory.

Terms are nested tuples `(head, arg1, ..., argn)`; pattern variables are `OVar`.
"""

from __future__ import annotations

import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

from . import builtins
from .athena import And, Atom, AVar, Eq, Forall, If, TranslatedTheory
from .diagnostics import M2AError
from .signature import Signature
from .syntax import App, Equality, MaudeModule, SortTest, Term, Var, format_term, is_literal

LITERAL_POOL = (0, 1, 2)


@dataclass(frozen=True)
class OVar:
    name: str
    sort: str


OTerm = Union[tuple, OVar]


def to_oterm(t) -> OTerm:
    """Convert a source Term or an Athena term into oracle form."""
    if isinstance(t, Var):
        return OVar(t.name, t.sort)
    if isinstance(t, AVar):
        return OVar(("_v" + t.name) if t.fresh else t.name, t.sort)
    if isinstance(t, App):
        return (t.op,) + tuple(to_oterm(a) for a in t.args)
    return (t.fn,) + tuple(to_oterm(a) for a in t.args)


def show(t: OTerm) -> str:
    if isinstance(t, OVar):
        return t.name
    if len(t) == 1:
        return t[0]
    return "(" + " ".join([t[0]] + [show(a) for a in t[1:]]) + ")"


def size(t: OTerm) -> int:
    if isinstance(t, OVar):
        return 1
    return 1 + sum(size(a) for a in t[1:])


def ovars(t: OTerm, out: set | None = None) -> set:
    out = set() if out is None else out
    if isinstance(t, OVar):
        out.add(t)
    else:
        for a in t[1:]:
            ovars(a, out)
    return out


def subterms(t: tuple, pos: tuple = ()):
    yield pos, t
    for i, a in enumerate(t[1:]):
        yield from subterms(a, pos + (i,))


def at(t: tuple, pos: tuple) -> tuple:
    for i in pos:
        t = t[i + 1]
    return t


def replace(t: tuple, pos: tuple, new: tuple) -> tuple:
    if not pos:
        return new
    i = pos[0]
    return t[: i + 1] + (replace(t[i + 1], pos[1:], new),) + t[i + 2 :]


def instantiate(t: OTerm, sigma: dict) -> tuple:
    if isinstance(t, OVar):
        return sigma[t]
    return (t[0],) + tuple(instantiate(a, sigma) for a in t[1:])


# --- theories ---


@dataclass(frozen=True)
class Rule:
    label: str
    lhs: OTerm
    rhs: OTerm
    conditions: tuple[tuple[OTerm, OTerm], ...] = ()
    oriented: bool = True  # usable by `reduce`; every rule is usable by the search

    @property
    def reversible(self) -> bool:
        """Right-to-left application determines every variable."""
        return ovars(self.lhs) <= ovars(self.rhs)


@dataclass
class RewriteTheory:
    name: str
    rules: list[Rule]
    sort_of: Callable[[tuple], str | None]  # None = ill-sorted
    var_accepts: Callable[[OVar, str], bool]
    kind_of: Callable[[str], str]
    evaluate: Callable[[tuple], tuple | None]

    def __post_init__(self):
        self._heads: dict[str, list[Rule]] = defaultdict(list)
        self._wild: list[Rule] = []
        for r in self.rules:
            (self._wild if isinstance(r.lhs, OVar) else self._heads[r.lhs[0]]).append(r)
        self._rheads: dict[str, list[Rule]] = defaultdict(list)
        self._rwild: list[Rule] = []
        for r in self.rules:
            if r.reversible:
                (self._rwild if isinstance(r.rhs, OVar) else self._rheads[r.rhs[0]]).append(r)
        self._neighbors: dict[tuple, list] = {}
        self._normal_forms: dict[tuple, tuple | None] = {}

    def forward_rules(self, head: str) -> list[Rule]:
        return self._heads.get(head, []) + self._wild

    def backward_rules(self, head: str) -> list[Rule]:
        return self._rheads.get(head, []) + self._rwild

    def without(self, label: str) -> RewriteTheory:
        return RewriteTheory(
            self.name, [r for r in self.rules if r.label != label], self.sort_of, self.var_accepts, self.kind_of, self.evaluate
        )


def match(pattern: OTerm, term: tuple, theory: RewriteTheory, sigma: dict | None = None) -> dict | None:
    sigma = {} if sigma is None else sigma
    stack = [(pattern, term)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, OVar):
            bound = sigma.get(p)
            if bound is not None:
                if bound != t:
                    return None
                continue
            s = theory.sort_of(t)
            if s is None or not theory.var_accepts(p, s):
                return None
            sigma[p] = t
        else:
            if p[0] != t[0] or len(p) != len(t):
                return None
            stack.extend(zip(p[1:], t[1:]))
    return sigma


def source_theory(sig: Signature) -> RewriteTheory:
    """E oriented left to right plus the structural axioms of every operator.

    Equations conditioned on sort tests are left out, mirroring the target
    side where membership predicates carry no equational content.
    """
    module = sig.module
    rules = []
    for i, eq in enumerate(module.equations):
        if any(isinstance(c, SortTest) for c in eq.condition):
            continue
        conds = tuple((to_oterm(c.lhs), to_oterm(c.rhs)) for c in eq.condition if isinstance(c, Equality))
        rules.append(Rule(f"eq_{i}", to_oterm(eq.lhs), to_oterm(eq.rhs), conds))
    rules += _structural_rules(module.ops)
    poset = sig.poset
    literal = module.literal_sort
    builtin_names = {op.name for op in module.all_ops if op.builtin}

    @lru_cache(maxsize=200_000)
    def sort_of(t: tuple) -> str | None:
        if len(t) == 1 and is_literal(t[0]) and not sig.decls(t[0], 0):
            return literal
        args = []
        for a in t[1:]:
            s = sort_of(a)
            if s is None:
                return None
            args.append(s)
        cands = sig.applicable(t[0], tuple(args))
        targets = {d.target for d in cands}
        least = [x for x in targets if all(poset.le(x, y) for y in targets)]
        return least[0] if len(least) == 1 else None

    def evaluate(t: tuple) -> tuple | None:
        if t[0] not in builtin_names or len(t) == 1:
            return None
        if not all(len(a) == 1 and is_literal(a[0]) for a in t[1:]):
            return None
        if not any(d.builtin for d in sig.applicable(t[0], tuple(sort_of(a) for a in t[1:]))):
            return None
        value = builtins.evaluate(t[0], [int(a[0]) for a in t[1:]])
        return _literal(value)

    return RewriteTheory(
        module.name, rules, sort_of, lambda v, s: poset.le(s, v.sort), lambda s: poset.kind(s), evaluate
    )


def _literal(value) -> tuple | None:
    if value is None:
        return None
    if isinstance(value, bool):
        return ("true",) if value else ("false",)
    return (str(value),)


def _structural_rules(ops) -> list[Rule]:
    rules = []
    for op in ops:
        if op.builtin:
            continue
        f, s = op.name, op.target
        x, y, z = OVar("#x", s), OVar("#y", s), OVar("#z", s)
        if "assoc" in op.attrs:
            rules.append(Rule(f"assoc_{f}", (f, (f, x, y), z), (f, x, (f, y, z))))
        if "comm" in op.attrs:
            rules.append(Rule(f"comm_{f}", (f, x, y), (f, y, x), oriented=False))
        if op.identity is not None:
            e = to_oterm(op.identity)
            rules.append(Rule(f"left_id_{f}", (f, e, x), x))
            rules.append(Rule(f"right_id_{f}", (f, x, e), x))
    return rules


def target_theory(theory: TranslatedTheory, literal_sort: str | None = None) -> RewriteTheory:
    """Equations, structural axioms and core equalities of a translated theory as rewrite rules.

    Membership assertions are left out: they only constrain predicates.
    """
    rules = []
    for a in theory.assertions:
        if a.role == "membership":
            continue
        s = a.sentence
        while isinstance(s, Forall):
            s = s.body
        conds: list = []
        if isinstance(s, If):
            parts = s.cond.parts if isinstance(s.cond, And) else (s.cond,)
            if any(not isinstance(p, Eq) for p in parts):
                continue  # guarded by a membership predicate
            conds = [(to_oterm(p.lhs), to_oterm(p.rhs)) for p in parts]
            s = s.body
        if not isinstance(s, Eq):
            continue
        rules.append(Rule(a.name, to_oterm(s.lhs), to_oterm(s.rhs), tuple(conds), oriented=not a.name.startswith("comm_")))
    table = theory.symbol_table()
    native_names = {name for name, _ in theory.natives}

    @lru_cache(maxsize=200_000)
    def sort_of(t: tuple) -> str | None:
        if len(t) == 1 and is_literal(t[0]) and (t[0], 0) not in table:
            return literal_sort
        sig = table.get((t[0], len(t) - 1))
        if sig is None:
            return None
        for a, want in zip(t[1:], sig[0]):
            if sort_of(a) != want:
                return None
        return sig[1]

    ops = {"+": "_+_", "*": "_*_", "<": "_<_", "<=": "_<=_", ">": "_>_", ">=": "_>=_"}

    def evaluate(t: tuple) -> tuple | None:
        if t[0] not in native_names or len(t) == 1:
            return None
        if not all(len(a) == 1 and is_literal(a[0]) for a in t[1:]):
            return None
        name = ("-_" if len(t) == 2 else "_-_") if t[0] == "-" else ops.get(t[0])
        if name is None:
            return None
        return _literal(builtins.evaluate(name, [int(a[0]) for a in t[1:]]))

    return RewriteTheory(theory.module, rules, sort_of, lambda v, s: s == v.sort, lambda s: s, evaluate)


# --- verdicts ---


@dataclass(frozen=True)
class OracleBudget:
    max_depth: int = 4
    max_term_size: int = 40
    max_frontier: int = 100_000
    seed: int = 0
    max_steps: int = 10_000

    def __post_init__(self):
        if min(self.max_depth, self.max_term_size, self.max_frontier, self.max_steps) <= 0:
            raise ValueError("oracle budget caps must be positive")


@dataclass(frozen=True)
class Step:
    rule: str
    direction: str  # "lr" | "rl"
    position: tuple[int, ...]
    result: tuple  # whole term after the step


@dataclass(frozen=True)
class Equal:
    path: tuple[Step, ...]
    conclusive = True


@dataclass(frozen=True)
class NotEqualWithinBudget:
    explored: int = 0
    conclusive = True


@dataclass(frozen=True)
class BudgetExhausted:
    reason: str = ""
    conclusive = False


EqualityVerdict = Union[Equal, NotEqualWithinBudget, BudgetExhausted]


class _Exhausted(Exception):
    pass


def _conditions_hold(rule: Rule, sigma: dict, theory: RewriteTheory, budget: OracleBudget, guard: int) -> bool:
    if not rule.conditions:
        return True
    if guard > 3:
        return False
    for lhs, rhs in rule.conditions:
        if not ovars(lhs) | ovars(rhs) <= sigma.keys():
            return False
        a, b = instantiate(lhs, sigma), instantiate(rhs, sigma)
        if a == b:
            continue
        try:
            na = _normalize(a, theory, budget, guard + 1)[0]
            nb = _normalize(b, theory, budget, guard + 1)[0]
        except _Exhausted:
            return False
        if na != nb:
            return False
    return True


def _root_step(t: tuple, theory: RewriteTheory, budget: OracleBudget, guard: int):
    value = theory.evaluate(t)
    if value is not None:
        return "builtin", value
    for rule in theory.forward_rules(t[0]):
        if not rule.oriented:
            continue
        sigma = match(rule.lhs, t, theory)
        if sigma is None or not _conditions_hold(rule, sigma, theory, budget, guard):
            continue
        new = instantiate(rule.rhs, sigma)
        if theory.sort_of(new) is None:
            continue
        return rule.label, new
    return None


def _normalize(t: tuple, theory: RewriteTheory, budget: OracleBudget, guard: int = 0) -> tuple[tuple, list[Step]]:
    """Innermost normalization; returns the normal form and the steps taken."""
    steps: list[Step] = []
    counter = [0]

    def norm(term: tuple, pos: tuple, whole: list) -> tuple:
        while True:
            args = list(term[1:])
            for i, a in enumerate(args):
                na = norm(a, pos + (i,), whole)
                if na != a:
                    args[i] = na
                    term = (term[0],) + tuple(args)
            step = _root_step(term, theory, budget, guard)
            if step is None:
                return term
            counter[0] += 1
            if counter[0] > budget.max_steps:
                raise _Exhausted("reduction step cap reached")
            label, term = step
            whole[0] = replace(whole[0], pos, term)
            if theory.sort_of(whole[0]) is None:
                raise _Exhausted("reduction produced an ill-sorted term")
            steps.append(Step(label, "lr", pos, whole[0]))

    whole = [t]
    nf = norm(t, (), whole)
    return nf, steps


def reduce(term: tuple, theory: RewriteTheory, budget: OracleBudget | None = None) -> tuple:
    """Innermost normal form of a ground term; raises `budget-exhausted` on runaway reduction."""
    try:
        return _normalize(term, theory, budget or OracleBudget())[0]
    except _Exhausted as exc:
        raise M2AError.single("budget-exhausted", str(exc)) from None


def neighbors(t: tuple, theory: RewriteTheory, budget: OracleBudget) -> list[tuple[Step, tuple]]:
    """Every single-equation application, in both directions, at every position."""
    cached = theory._neighbors.get(t)
    if cached is not None:
        return cached
    out = []
    for pos, sub in subterms(t):
        value = theory.evaluate(sub)
        if value is not None:
            out.append(("builtin", "lr", pos, value))
        for rule in theory.forward_rules(sub[0]):
            sigma = match(rule.lhs, sub, theory)
            if sigma is not None and _conditions_hold(rule, sigma, theory, budget, 1):
                if ovars(rule.rhs) <= sigma.keys():
                    out.append((rule.label, "lr", pos, instantiate(rule.rhs, sigma)))
        for rule in theory.backward_rules(sub[0]):
            sigma = match(rule.rhs, sub, theory)
            if sigma is not None and _conditions_hold(rule, sigma, theory, budget, 1):
                out.append((rule.label, "rl", pos, instantiate(rule.lhs, sigma)))
    result = []
    seen = set()
    for label, direction, pos, new in out:
        whole = replace(t, pos, new)
        if whole == t or whole in seen or size(whole) > budget.max_term_size:
            continue
        if theory.sort_of(whole) is None:
            continue
        seen.add(whole)
        result.append((Step(label, direction, pos, whole), whole))
    if len(theory._neighbors) < 200_000:
        theory._neighbors[t] = result
    return result


def decide_equal(t: tuple, u: tuple, theory: RewriteTheory, budget: OracleBudget | None = None) -> EqualityVerdict:
    """Equal / NotEqualWithinBudget / BudgetExhausted for two ground terms of one kind."""
    budget = budget or OracleBudget()
    st, su = theory.sort_of(t), theory.sort_of(u)
    if st is None or su is None:
        raise M2AError.single("ill-sorted", f"ill-sorted term {show(t) if st is None else show(u)}")
    if theory.kind_of(st) != theory.kind_of(su):
        raise M2AError.single("kind-mismatch", f"{show(t)} : {st} and {show(u)} : {su} lie in different kinds")
    if t == u:
        return Equal(())
    try:
        nt, pt = _normalize(t, theory, budget)
        nu, pu = _normalize(u, theory, budget)
    except _Exhausted as exc:
        return BudgetExhausted(str(exc))
    if nt == nu:
        return Equal(tuple(pt) + _reverse_path(pu, u))
    return _search(t, nt, pt, u, nu, pu, theory, budget)


def _reverse_path(steps: list[Step], origin: tuple) -> tuple[Step, ...]:
    """Turn a path origin -> ... -> end into end -> ... -> origin."""
    terms = [origin] + [s.result for s in steps]
    out = []
    for i in range(len(steps) - 1, -1, -1):
        s = steps[i]
        out.append(Step(s.rule, "rl" if s.direction == "lr" else "lr", s.position, terms[i]))
    return tuple(out)


def _search(t, nt, pt, u, nu, pu, theory, budget) -> EqualityVerdict:
    """Meet-in-the-middle breadth-first search between the two normal forms.

    Every discovered term is also normalized and the sides meet as soon as two
    of their terms share a normal form, so evaluation steps (which cannot be
    run backwards) do not hide a join.
    """
    half = math.ceil(budget.max_depth / 2)
    sides = []
    for start in (nt, nu):
        sides.append(({start: None}, [start], {start: start}))
    for _ in range(half):
        for parents, frontier, by_nf in sides:
            nxt = []
            for x in frontier:
                for step, y in neighbors(x, theory, budget):
                    if y not in parents:
                        parents[y] = (x, step)
                        nxt.append(y)
                        nf = _cached_nf(y, theory, budget)
                        if nf is not None:
                            by_nf.setdefault(nf, y)
                if len(sides[0][0]) + len(sides[1][0]) > budget.max_frontier:
                    return BudgetExhausted("visited-set cap reached")
            frontier[:] = nxt
        meet = [n for n in sides[0][2] if n in sides[1][2]]
        if meet:
            n = min(meet, key=lambda x: (size(x), show(x)))
            forward = list(pt) + _chain(sides[0][0], sides[0][2][n]) + _nf_steps(sides[0][2][n], theory, budget)
            back = list(pu) + _chain(sides[1][0], sides[1][2][n]) + _nf_steps(sides[1][2][n], theory, budget)
            return Equal(tuple(forward) + _reverse_path(back, u))
        if not sides[0][1] and not sides[1][1]:
            break
    return NotEqualWithinBudget(len(sides[0][0]) + len(sides[1][0]))


def _cached_nf(t: tuple, theory: RewriteTheory, budget: OracleBudget):
    cache = theory._normal_forms
    if t not in cache:
        try:
            nf = _normalize(t, theory, budget)[0]
        except _Exhausted:
            nf = None
        if len(cache) < 200_000:
            cache[t] = nf
        return nf
    return cache[t]


def _nf_steps(t: tuple, theory: RewriteTheory, budget: OracleBudget) -> list[Step]:
    return _normalize(t, theory, budget)[1]


def _chain(parents, m) -> list[Step]:
    steps = []
    while parents[m] is not None:
        prev, step = parents[m]
        steps.append(step)
        m = prev
    return steps[::-1]


def replay(t: tuple, path, theory: RewriteTheory, budget: OracleBudget | None = None) -> tuple:
    """Check every step of an Equal witness and return the final term."""
    budget = budget or OracleBudget()
    rules = {r.label: r for r in theory.rules}
    cur = t
    for step in path:
        before, after = at(cur, step.position), at(step.result, step.position)
        if replace(cur, step.position, after) != step.result:
            raise M2AError.single("bad-witness", f"step {step.rule} changes more than position {step.position}")
        if step.rule == "builtin":
            src, dst = (before, after) if step.direction == "lr" else (after, before)
            ok = theory.evaluate(src) == dst
        else:
            rule = rules[step.rule]
            l, r = (rule.lhs, rule.rhs) if step.direction == "lr" else (rule.rhs, rule.lhs)
            sigma = match(l, before, theory)
            ok = sigma is not None and match(r, after, theory, dict(sigma)) is not None
            if ok:
                full = match(r, after, theory, dict(sigma))
                ok = _conditions_hold(rule, full, theory, budget, 1) or not rule.conditions
        if not ok:
            raise M2AError.single("bad-witness", f"step {step.rule} ({step.direction}) does not apply at {step.position}")
        cur = step.result
    return cur


# --- sampling ---


class TermSampler:
    """Random well-sorted ground terms over a module signature."""

    def __init__(self, sig: Signature, ops=None):
        self.sig = sig
        self.ops = list(ops if ops is not None else sig.module.all_ops)
        self.literal_sort = sig.literal_sort
        self._inhabited: dict[int, set[str]] = {}

    def inhabited(self, depth: int) -> set[str]:
        if depth in self._inhabited:
            return self._inhabited[depth]
        poset = self.sig.poset
        below = self.inhabited(depth - 1) if depth > 0 else set()
        found = set(below)
        if self.literal_sort:
            found.add(self.literal_sort)
        for op in self.ops:
            if op.arity == 0 or (depth > 0 and all(self._has(below, s) for s in op.arg_sorts)):
                found.add(op.target)
        closed = {s for s in poset.sorts if any(poset.le(x, s) for x in found)}
        self._inhabited[depth] = closed
        return closed

    def _has(self, sorts: set[str], s: str) -> bool:
        return s in sorts

    def choices(self, sort: str, depth: int) -> list:
        poset = self.sig.poset
        out: list = []
        if self.literal_sort and poset.le(self.literal_sort, sort):
            out += [App(str(v)) for v in LITERAL_POOL]
        below = self.inhabited(depth - 1) if depth > 0 else set()
        for op in self.ops:
            if not poset.le(op.target, sort):
                continue
            if op.arity == 0 or (depth > 0 and all(s in below for s in op.arg_sorts)):
                out.append(op)
        return out

    def sample(self, sort: str, depth: int, rng: random.Random) -> Term:
        opts = self.choices(sort, depth)
        if not opts:
            raise M2AError.single("uninhabited-sort", f"no ground term of sort {sort} within depth {depth}")
        pick = opts[rng.randrange(len(opts))]
        if isinstance(pick, App):
            return pick
        return App(pick.name, tuple(self.sample(s, depth - 1, rng) for s in pick.arg_sorts))


def sample_ground_terms(sig: Signature, sort: str, depth: int, seed: int, count: int = 20, *, ops=None) -> list[Term]:
    """Deterministic list of distinct ground terms of `sort` with depth <= `depth`."""
    sampler = TermSampler(sig, ops)
    rng = random.Random(seed)
    out: list[Term] = []
    seen = set()
    for _ in range(count * 20):
        t = sampler.sample(sort, depth, rng)
        if t not in seen:
            seen.add(t)
            out.append(t)
            if len(out) == count:
                break
    return out


def enumerate_ground_terms(sig: Signature, sort: str, depth: int, *, ops=None, limit: int = 200_000) -> list[Term]:
    """Every ground term of `sort` with depth <= `depth` (literals from a small pool)."""
    sampler = TermSampler(sig, ops)
    poset = sig.poset
    memo: dict[tuple[str, int], list[Term]] = {}

    def terms(s: str, d: int) -> list[Term]:
        if (s, d) in memo:
            return memo[s, d]
        out: list[Term] = []
        for pick in sampler.choices(s, d):
            if isinstance(pick, App):
                out.append(pick)
                continue
            pools = [terms(a, d - 1) for a in pick.arg_sorts]
            total = math.prod(len(p) for p in pools)
            if len(out) + total > limit:
                raise M2AError.single("enumeration-limit", f"more than {limit} ground terms of sort {s} at depth {d}")
            out += [App(pick.name, combo) for combo in _product(pools)]
        uniq = list(dict.fromkeys(out))
        memo[s, d] = [t for t in uniq if poset.le(sig.least_sort(t), s)]
        return memo[s, d]

    return terms(sort, depth)


def _product(pools):
    if not pools:
        yield ()
        return
    for head in pools[0]:
        for rest in _product(pools[1:]):
            yield (head,) + rest


# --- equivalence between source and translation ---


@dataclass
class PairResult:
    left: str
    right: str
    source: str
    target: str


@dataclass
class EquivalenceReport:
    module: str
    pairs: int = 0
    agreements: int = 0
    disagreements: list[PairResult] = field(default_factory=list)
    inconclusive: int = 0
    source_equal: int = 0
    seed: int = 0
    depth: int = 0

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def to_dict(self) -> dict:
        return {
            "module": self.module,
            "pairs": self.pairs,
            "agreements": self.agreements,
            "disagreements": [vars(d) for d in self.disagreements],
            "inconclusive": self.inconclusive,
            "source_equal": self.source_equal,
            "seed": self.seed,
            "depth": self.depth,
        }


def _verdict_name(v) -> str:
    return type(v).__name__


def verify_equivalence(
    module: MaudeModule,
    theory: TranslatedTheory | None = None,
    budget: OracleBudget | None = None,
    pairs: int = 50,
    depth: int = 3,
    seed: int | None = None,
) -> EquivalenceReport:
    """Compare source and target provability on sampled ground-term pairs, per kind."""
    from .translate import Translator

    budget = budget or OracleBudget()
    seed = budget.seed if seed is None else seed
    tr = Translator(module, induction=False)
    theory = theory if theory is not None else tr.translate()
    sig = tr.sig
    src = source_theory(sig)
    tgt = target_theory(theory, tr.literal_sort_name())
    report = EquivalenceReport(module.name, seed=seed, depth=depth)
    rng = random.Random(seed)
    builtin = set(module.builtin_sorts)
    for ci, comp in enumerate(sig.poset.components):
        if all(s in builtin for s in comp):
            continue
        pool: list[Term] = []
        for top in sig.poset.maximal(comp):
            try:
                pool += sample_ground_terms(sig, top, depth, seed + ci, count=max(2 * pairs, 20))
            except M2AError:
                continue
        pool = list(dict.fromkeys(pool))
        if len(pool) < 1:
            continue
        buckets: dict[tuple, list[Term]] = defaultdict(list)
        for t in pool:
            try:
                buckets[reduce(to_oterm(t), src, budget)].append(t)
            except M2AError:
                pass
        shared = [b for b in buckets.values() if len(b) > 1]
        for _ in range(pairs):
            if shared and rng.random() < 0.5:
                b = shared[rng.randrange(len(shared))]
                t, u = rng.sample(b, 2)
            else:
                t, u = pool[rng.randrange(len(pool))], pool[rng.randrange(len(pool))]
            k = tr.kind(sig.least_sort(t))
            sv = decide_equal(to_oterm(t), to_oterm(u), src, budget)
            tv = decide_equal(to_oterm(tr.tr_term(t, k)), to_oterm(tr.tr_term(u, k)), tgt, budget)
            report.pairs += 1
            if isinstance(sv, Equal):
                report.source_equal += 1
            if not (sv.conclusive and tv.conclusive):
                report.inconclusive += 1
            elif isinstance(sv, Equal) == isinstance(tv, Equal):
                report.agreements += 1
            else:
                report.disagreements.append(PairResult(format_term(t), format_term(u), _verdict_name(sv), _verdict_name(tv)))
    return report


# --- induction checks ---


@dataclass
class ExhaustivenessReport:
    method: str
    checked: int = 0
    uncovered: list[str] = field(default_factory=list)


def joint_exhaustiveness(module: MaudeModule, depth: int, *, limit: int = 200_000) -> list[ExhaustivenessReport]:
    """Every ground constructor term of each induction kind is headed by an
    effective constructor, or has a sort injected into C by one of its casts."""
    from .translate import Translator

    tr = Translator(module)
    theory = tr.translate()
    sig = tr.sig
    reports = []
    ctor_ops = [op for op in module.all_ops if op.is_ctor]
    for scheme in theory.methods:
        rep = ExhaustivenessReport(scheme.method)
        genuine = {ec.name for ec in scheme.constructors if not ec.is_cast}
        injected = {ec.arg_sorts[0] for ec in scheme.constructors if ec.is_cast}
        comp = [s for s in scheme.component if s in sig.poset.sorts]
        tops = sig.poset.maximal(comp)
        seen = set()
        for top in tops:
            for t in enumerate_ground_terms(sig, top, depth, ops=ctor_ops, limit=limit):
                if t in seen:
                    continue
                seen.add(t)
                rep.checked += 1
                s = sig.least_sort(t)
                head_ok = False
                if t.args or not is_literal(t.op) or sig.decls(t.op, 0):
                    cls = tr.class_of(t.op, tuple(sig.least_sort(a) for a in t.args))
                    head_ok = tr.fn_name(cls) in genuine
                if not head_ok and s not in injected:
                    rep.uncovered.append(format_term(t))
        reports.append(rep)
    return reports


@dataclass
class InductionCheck:
    method: str
    obligations: dict[str, int] = field(default_factory=dict)  # name -> instances checked
    failed_obligations: list[str] = field(default_factory=list)
    instances: int = 0
    failures: list[str] = field(default_factory=list)


def check_induction(module: MaudeModule, depth: int = 3, seed: int = 0, count: int = 60,
                    budget: OracleBudget | None = None) -> list[InductionCheck]:
    """Desk check of the induction methods with P(x) = "x normalizes to a term
    built only from effective constructors" (the target-side reading of
    sufficient completeness).

    Obligations are validated by instantiating their quantified variables with
    target normal forms of sampled ground terms; the conclusion is then checked
    on translations of sampled ground terms whose source normal form is a
    constructor term.
    """
    from .translate import Translator

    budget = budget or OracleBudget()
    tr = Translator(module)
    theory = tr.translate()
    sig = tr.sig
    src = source_theory(sig)
    tgt = target_theory(theory, tr.literal_sort_name())
    ctor_names = {op.name for op in module.all_ops if op.is_ctor}
    out = []
    for scheme in theory.methods:
        check = InductionCheck(scheme.method)
        allowed = {ec.name for ec in scheme.constructors} | {
            d.name for d in theory.symbol_decls if d.role == "cast"
        }

        def prop(x: tuple) -> bool:
            nf = reduce(x, tgt, budget)
            return all(len(sub) == 1 and is_literal(sub[0]) or sub[0] in allowed or (sub[0], len(sub) - 1) in theory.natives
                       for _, sub in subterms(nf))

        # instantiation pools per Athena sort, from translated sampled terms
        pools: dict[str, list[tuple]] = defaultdict(list)
        for s in sig.poset.sorts:
            try:
                terms = sample_ground_terms(sig, s, depth, seed, count=count)
            except M2AError:
                continue
            for t in terms:
                x = to_oterm(tr.tr_term(t, s))
                if x not in pools[tr.sort_name(s)]:
                    pools[tr.sort_name(s)].append(x)
        for ob in scheme.obligations:
            n = 0
            ok = True
            for inst in _instances(ob.sentence, pools, limit=count):
                n += 1
                if not _holds(inst, prop):
                    ok = False
                    break
            check.obligations[ob.name] = n
            if not ok:
                check.failed_obligations.append(ob.name)
        comp = [s for s in scheme.component if s in sig.poset.sorts]
        k = tr.kind(comp[0])
        for top in sig.poset.maximal(comp):
            for t in sample_ground_terms(sig, top, depth, seed, count=count):
                nf = reduce(to_oterm(t), src, budget)
                if not all(sub[0] in ctor_names or (len(sub) == 1 and is_literal(sub[0])) for _, sub in subterms(nf)):
                    continue  # outside the sufficiently complete fragment
                check.instances += 1
                if not prop(to_oterm(tr.tr_term(t, k))):
                    check.failures.append(format_term(t))
        out.append(check)
    return out


def _instances(sentence, pools, limit: int):
    """Ground instances of a sentence's leading universal quantifiers."""
    binders = []
    s = sentence
    while isinstance(s, Forall):
        binders.append(s.var)
        s = s.body
    rng = random.Random(0)
    combos = [()]
    for v in binders:
        pool = pools.get(v.sort, [])
        combos = [c + (x,) for c in combos for x in pool]
        if len(combos) > limit:
            combos = rng.sample(combos, limit)
    for combo in combos:
        yield _subst_sentence(s, {OVar(v.name, v.sort): x for v, x in zip(binders, combo)})


def _subst_sentence(s, sigma):
    if isinstance(s, Atom):
        return ("atom", s.pred, tuple(instantiate(to_oterm(a), sigma) for a in s.args))
    if isinstance(s, If):
        return ("if", _subst_sentence(s.cond, sigma), _subst_sentence(s.body, sigma))
    if isinstance(s, And):
        return ("and",) + tuple(_subst_sentence(p, sigma) for p in s.parts)
    raise M2AError.single("internal", "unexpected obligation shape")


def _holds(inst, prop) -> bool:
    tag = inst[0]
    if tag == "atom":
        return prop(inst[2][0])
    if tag == "and":
        return all(_holds(p, prop) for p in inst[1:])
    return (not _holds(inst[1], prop)) or _holds(inst[2], prop)
