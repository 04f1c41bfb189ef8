"""Order-sorted to many-sorted translation: sorts, functions, terms, equations,
memberships and structural-induction methods."""

from __future__ import annotations

from collections import defaultdict

from .athena import (
    AApp,
    And,
    Assertion,
    Atom,
    AVar,
    EffectiveConstructor,
    Eq,
    Forall,
    If,
    InductionScheme,
    Obligation,
    Sentence,
    SortDecl,
    SymbolDecl,
    TranslatedTheory,
    conj,
    free_vars,
)
from .builtins import NATIVE_OPS, NATIVE_SORTS
from .diagnostics import M2AError, error, warning
from .emitter import NATIVE_GLYPHS, mangle_name, strip_name
from .signature import ACClass, analyze, constructor_subsignature
from .syntax import App, Equality, MaudeModule, OpDecl, SortTest, Term, Var, format_term, is_literal

PROPERTY = "property"


def cast_name(a: str, b: str) -> str:
    return f"Cast_{a}_to_{b}"


def translate(module: MaudeModule, *, induction: bool = True) -> TranslatedTheory:
    return Translator(module, induction=induction).translate()


class Translator:
    """Translates one strictly sensible, preregular module; raises M2AError otherwise."""

    def __init__(self, module: MaudeModule, *, induction: bool = True):
        self.module = module
        self.induction = induction
        self.sig, self.classes, self.report = analyze(module)
        errors = [v for v in self.report.violations if v.severity == "error"]
        if errors:
            raise M2AError(errors)
        self.poset = self.sig.poset
        self.builtin_sorts = set(module.builtin_sorts)
        self.warnings = list(module.warnings)
        self._by_key: dict[tuple[str, int], list[ACClass]] = defaultdict(list)
        for cls in self.classes:
            self._by_key[cls.name, cls.arity].append(cls)
        self._names = self._mangle()
        self._fresh: dict[Var, AVar] = {}
        self._fresh_count = 0
        self._predicates: list[SymbolDecl] = []
        self._synthesize_kinds()

    # --- naming ---

    def _mangle(self) -> dict[int, str]:
        user = [c for c in self.classes if not c.builtin]
        stripped = defaultdict(int)
        for c in user:
            stripped[strip_name(c.representative)] += 1
        collisions = {n for n, k in stripped.items() if k > 1}
        return {id(c): mangle_name(c.representative, collisions) for c in user}

    def fn_name(self, cls: ACClass) -> str:
        if cls.builtin:
            return NATIVE_OPS[cls.representative.name]
        return self._names[id(cls)]

    def sort_name(self, s: str) -> str:
        if s in self.builtin_sorts:
            return NATIVE_SORTS[s]
        return s

    def kind(self, s: str) -> str:
        return self.poset.kind(s)

    # --- kinds for components with several maximal sorts ---

    def _synthesize_kinds(self):
        need: list[tuple[str, ...]] = []

        def want(s, why):
            comp = self.poset.component_of(s)
            if not self.poset.has_top(s) and comp not in need:
                need.append(comp)
                self.warnings.append(warning(
                    "kind-synthesized",
                    f"sorts {{{', '.join(comp)}}} have no unique top sort; a kind domain "
                    f"'{self.poset.kind(s)}' with casts from every sort is introduced ({why})",
                ))

        def pair(a, b):
            la, lb = self.least(a), self.least(b)
            if self.poset.same_component(la, lb) and self.poset.lub(la, lb) is None:
                want(la, "no least upper bound for an equation")

        def cond(c):
            for frag in c:
                if isinstance(frag, SortTest):
                    want(frag.sort, "membership predicate")
                else:
                    pair(frag.lhs, frag.rhs)

        for eq in self.module.equations:
            pair(eq.lhs, eq.rhs)
            cond(eq.condition)
        for mb in self.module.memberships:
            want(mb.sort, "membership predicate")
            cond(mb.condition)
        if self.induction:
            for comp in self._induction_components():
                want(comp[0], "induction method")
        for comp in need:
            self.poset = self.poset.with_top(comp, self.poset.kind(comp[0]))

    # --- sorts ---

    def _ctor_reps(self) -> list[OpDecl]:
        out = []
        for cls in self.classes:
            if cls.builtin or not any(m.is_ctor for m in cls.members):
                continue
            out.append(cls.representative)
        return out

    def _is_datatype(self, s: str) -> bool:
        if s in self.builtin_sorts:
            return False
        if any(s in pair for pair in self.module.all_subsorts):
            return False
        ctors = [c for c in self._ctor_reps() if c.target == s]
        # free generation would contradict structural axioms
        return bool(ctors) and not any(c.attrs & {"assoc", "comm"} or c.identity is not None for c in ctors)

    def tr_sorts(self) -> list[SortDecl]:
        decls = []
        for i, comp in enumerate(self.poset.components):
            for s in comp:
                if s in self.builtin_sorts:
                    continue
                if self._is_datatype(s):
                    ctors = tuple(
                        (self.fn_name(self._class_of_decl(c)), tuple(self.sort_name(a) for a in c.arg_sorts))
                        for c in self._ctor_reps() if c.target == s
                    )
                    decls.append(SortDecl(s, "datatype", ctors, i))
                else:
                    decls.append(SortDecl(s, "domain", (), i))
        return decls

    # --- function symbols ---

    def _class_of_decl(self, op: OpDecl) -> ACClass:
        for cls in self._by_key[op.name, op.arity]:
            if op in cls.members:
                return cls
        raise KeyError(op.name)

    def class_of(self, name: str, arg_sorts: tuple[str, ...]) -> ACClass:
        for cls in self._by_key[name, len(arg_sorts)]:
            if any(all(self.sig.poset.le(a, s) for a, s in zip(arg_sorts, m.arg_sorts)) for m in cls.members):
                return cls
        raise M2AError.single("no-applicable-declaration", f"no declaration of '{name}' for ({', '.join(arg_sorts)})")

    def tr_functions(self, datatype_sorts: set[str]) -> list[SymbolDecl]:
        decls = []
        for cls in self.classes:
            if cls.builtin:
                continue
            rep = cls.representative
            if rep.is_ctor and rep.target in datatype_sorts:
                continue
            glyph = strip_name(rep, alias=False)
            decls.append(SymbolDecl(
                self.fn_name(cls),
                tuple(self.sort_name(s) for s in rep.arg_sorts),
                self.sort_name(rep.target),
                "function",
                alias=glyph if glyph in NATIVE_GLYPHS else None,
            ))
        for a, b in self.poset.strict_pairs():
            decls.append(SymbolDecl(cast_name(a, b), (self.sort_name(a),), self.sort_name(b), "cast"))
        return decls

    def _fresh_var(self, sort: str) -> Var:
        self._fresh_count += 1
        v = Var(f"_v{self._fresh_count}", sort)
        self._fresh[v] = AVar(str(self._fresh_count), self.sort_name(sort), fresh=True)
        return v

    def tr_structural(self) -> list[Assertion]:
        out = []
        for cls in self.classes:
            rep = cls.representative
            if cls.builtin or not (rep.attrs & {"assoc", "comm"} or rep.identity is not None):
                continue
            name = self.fn_name(cls)
            s = rep.target
            op = rep.name
            if "assoc" in rep.attrs:
                x, y, z = (self._fresh_var(s) for _ in range(3))
                lhs = App(op, (App(op, (x, y)), z))
                rhs = App(op, (x, App(op, (y, z))))
                out.append(Assertion(f"assoc_{name}", self._equation(lhs, rhs), "structural"))
            if "comm" in rep.attrs:
                x, y = self._fresh_var(s), self._fresh_var(s)
                out.append(Assertion(f"comm_{name}", self._equation(App(op, (x, y)), App(op, (y, x))), "structural"))
            if rep.identity is not None:
                x = self._fresh_var(s)
                e = rep.identity
                out.append(Assertion(f"left_id_{name}", self._equation(App(op, (e, x)), x), "structural"))
                out.append(Assertion(f"right_id_{name}", self._equation(App(op, (x, e)), x), "structural"))
        return out

    # --- terms ---

    def least(self, t: Term) -> str:
        if isinstance(t, Var):
            return t.sort
        return self.sig.least_sort(t)

    def tr_term(self, t: Term, expected: str | None = None) -> AApp | AVar:
        """Translate `t`, inserting a single direct cast wherever a subterm sits below the expected sort."""
        return self._term(self.sig.annotate(t), expected)

    def _term(self, t: Term, expected: str | None):
        if isinstance(t, Var):
            out = self._fresh.get(t) or AVar(t.name, self.sort_name(t.sort))
            least = t.sort
        elif not t.args and is_literal(t.op) and not self.sig.decls(t.op, 0):
            out, least = AApp(t.op), t.sort
        else:
            cls = self.class_of(t.op, tuple(a.sort if isinstance(a, App) else a.sort for a in t.args))
            rep = cls.representative
            out = AApp(self.fn_name(cls), tuple(self._term(a, s) for a, s in zip(t.args, rep.arg_sorts)))
            least = t.sort
            if least != rep.target:
                raise M2AError.single("internal", f"least sort {least} of '{format_term(t)}' differs from {rep.target}")
        if expected is None or expected == least:
            return out
        if not self.poset.lt(least, expected):
            raise M2AError.single(
                "incomparable-sorts", f"'{format_term(t)}' has sort {least}, which is not below {expected}"
            )
        return AApp(cast_name(least, expected), (out,))

    def _side_sort(self, a: Term, b: Term) -> str:
        sa, sb = self.least(a), self.least(b)
        if not self.poset.same_component(sa, sb):
            raise M2AError.single(
                "kind-mismatch", f"'{format_term(a)}' ({sa}) and '{format_term(b)}' ({sb}) lie in different kinds"
            )
        return self.poset.lub(sa, sb) or self.kind(sa)

    def _equation(self, lhs: Term, rhs: Term) -> Eq:
        s = self._side_sort(lhs, rhs)
        return Eq(self.tr_term(lhs, s), self.tr_term(rhs, s))

    def predicate(self, s: str) -> str:
        name = f"is_{s}"
        if not any(p.name == name for p in self._predicates):
            self._predicates.append(SymbolDecl(name, (self.sort_name(self.kind(s)),), "Boolean", "predicate"))
        return name

    def _membership_atom(self, t: Term, s: str) -> Atom:
        if not self.poset.same_component(self.least(t), s):
            raise M2AError.single("kind-mismatch", f"'{format_term(t)}' cannot have sort {s}: different kind")
        return Atom(self.predicate(s), (self.tr_term(t, self.kind(s)),))

    def _condition(self, cond) -> Sentence:
        parts = []
        for frag in cond:
            if isinstance(frag, Equality):
                parts.append(self._equation(frag.lhs, frag.rhs))
            else:
                parts.append(self._membership_atom(frag.term, frag.sort))
        return conj(parts)

    # --- equations and memberships ---

    def tr_equations(self) -> list[Assertion]:
        out = []
        for i, eq in enumerate(self.module.equations):
            try:
                body: Sentence = self._equation(eq.lhs, eq.rhs)
                if eq.condition:
                    body = If(self._condition(eq.condition), body)
            except M2AError as exc:
                raise M2AError([error(d.rule, d.message, d.span or eq.span) for d in exc.diagnostics]) from None
            out.append(Assertion(f"eq_{i}", body, "equation"))
        return out

    def tr_core(self) -> list[Assertion]:
        out = []
        for a, b in self.poset.strict_pairs():
            for c in self.poset.sorts:
                if not self.poset.lt(b, c):
                    continue
                x = AVar("x", self.sort_name(a))
                chain = AApp(cast_name(b, c), (AApp(cast_name(a, b), (x,)),))
                direct = AApp(cast_name(a, c), (x,))
                out.append(Assertion(f"core_eq_{a}_{b}_{c}", Forall(x, Eq(chain, direct), typed=True), "core"))
        return out

    def tr_memberships(self) -> list[Assertion]:
        out = []
        for i, mb in enumerate(self.module.memberships):
            try:
                body: Sentence = self._membership_atom(mb.subject, mb.sort)
                if mb.condition:
                    body = If(self._condition(mb.condition), body)
            except M2AError as exc:
                raise M2AError([error(d.rule, d.message, d.span or mb.span) for d in exc.diagnostics]) from None
            out.append(Assertion(f"mb_{i}", body, "membership"))
        return out

    # --- induction ---

    def _induction_components(self) -> list[tuple[str, ...]]:
        ctor_targets = {c.target for c in self._ctor_reps()}
        comps = []
        for comp in self.poset.components:
            user = [s for s in comp if s not in self.builtin_sorts]
            if not user or all(self._is_datatype(s) for s in user):
                continue
            if any(s in ctor_targets for s in comp):
                comps.append(comp)
        return comps

    def _var_names(self, sorts, taken: set[str]) -> list[str]:
        names = []
        used = set(taken)
        for s in sorts:
            cands = [v.lower() for v, vs in self.module.vars.items() if vs == s]
            choice = next((c for c in cands if c not in used), None)
            if choice is None:
                base = cands[0] if cands else "x"
                if base not in used:
                    choice = base
                else:
                    k = 1
                    while f"{base}{k}" in used:
                        k += 1
                    choice = f"{base}{k}"
            used.add(choice)
            names.append(choice)
        return names

    def tr_induction(self, symbol_names: set[str]) -> list[InductionScheme]:
        methods = []
        taken = symbol_names | {PROPERTY}
        for comp in self._induction_components():
            k = self.kind(comp[0])
            kk = self.sort_name(k)
            comp_sorts = self.poset.component_of(k)
            ctors = [c for c in self._ctor_reps() if c.target in comp_sorts]
            C = [s for s in comp_sorts if any(c.target == s for c in ctors)]
            effective = []
            for c in ctors:
                rec = tuple(any(self.poset.le(x, s) for x in C) for s in c.arg_sorts)
                effective.append(EffectiveConstructor(
                    self.fn_name(self._class_of_decl(c)), c.arg_sorts, c.target, rec, False, strip_name(c)
                ))
            for a, b in self.poset.strict_pairs():
                if a not in C and b in C:
                    rec = (any(self.poset.le(x, a) for x in C),)
                    effective.append(EffectiveConstructor(cast_name(a, b), (a,), b, rec, True, ""))

            def lift(term, s):
                return term if s == k else AApp(cast_name(s, k), (term,))

            def prop(term):
                return Atom(PROPERTY, (term,))

            bases, steps = [], []
            for ec in effective:
                names = self._var_names(ec.arg_sorts, taken)
                xs = [AVar(n, self.sort_name(s)) for n, s in zip(names, ec.arg_sorts)]
                goal = prop(lift(AApp(ec.name, tuple(xs)), ec.target))
                hyps = [prop(lift(x, s)) for x, s, r in zip(xs, ec.arg_sorts, ec.recursive) if r]
                body: Sentence = If(conj(hyps), goal) if hyps else goal
                for x in reversed(xs):
                    body = Forall(x, body)
                label = ec.label or (names[0] if names else ec.name)
                (steps if hyps else bases).append((ec, label, body))

            obligations = []
            for step, group in (("basis", bases), ("ic", steps)):
                single = len(group) == 1 and not group[0][0].is_cast
                seen: dict[str, int] = {}
                for ec, label, body in group:
                    name = step if single else f"{step}_{label}"
                    if name in seen:
                        seen[name] += 1
                        name = f"{name}_{seen[name]}"
                    else:
                        seen[name] = 0
                    obligations.append(Obligation(name, body, step, ec))
            conclusion = AVar(self._var_names([k], taken)[0], kk)
            methods.append(InductionScheme(
                f"{k.lower()}-induction", kk, comp_sorts, tuple(effective), tuple(obligations), conclusion
            ))
        return methods

    # --- assembly ---

    def translate(self) -> TranslatedTheory:
        sort_decls = self.tr_sorts()
        datatype_sorts = {d.name for d in sort_decls if d.kind == "datatype"}
        symbols = self.tr_functions(datatype_sorts)
        assertions = self.tr_structural() + self.tr_equations() + self.tr_core() + self.tr_memberships()
        symbols += self._predicates
        natives = {}
        for cls in self.classes:
            if cls.builtin:
                rep = cls.representative
                natives[self.fn_name(cls), rep.arity] = (
                    tuple(self.sort_name(s) for s in rep.arg_sorts), self.sort_name(rep.target)
                )
        theory = TranslatedTheory(self.module.name, sort_decls, symbols, assertions, natives=natives)
        if self.induction:
            names = {n for n, _ in theory.symbol_table()} | {d.name for d in sort_decls}
            theory.methods = self.tr_induction(names)
        info = constructor_subsignature(self.module, self.sig.poset)
        theory.warnings = self.warnings + info.warnings
        audit(theory, self.literal_sort_name())
        return theory

    def literal_sort_name(self) -> str | None:
        ls = self.module.literal_sort
        return self.sort_name(ls) if ls else None


# --- audits ---


def audit(theory: TranslatedTheory, literal_sort: str | None = None) -> None:
    """Check declaration closure, sort preservation, cast strictness and name uniqueness."""
    problems = []
    table = theory.symbol_table()
    predicates = {d.name: d for d in theory.symbol_decls if d.role == "predicate"}

    names = [d.name for d in theory.symbol_decls] + [c for sd in theory.sort_decls for c, _ in sd.ctors]
    dupes = {n for n in names if names.count(n) > 1}
    if dupes:
        problems.append(f"symbol names declared twice: {sorted(dupes)}")
    anames = [a.name for a in theory.assertions]
    if len(set(anames)) != len(anames):
        problems.append("assertion names are not unique")

    def sort_of(t):
        if isinstance(t, AVar):
            return t.sort
        if not t.args and is_literal(t.fn) and literal_sort:
            return literal_sort
        sig = table.get((t.fn, len(t.args)))
        if sig is None:
            problems.append(f"undeclared symbol '{t.fn}'/{len(t.args)}")
            return None
        for a, s in zip(t.args, sig[0]):
            got = sort_of(a)
            if got is not None and got != s:
                problems.append(f"argument of '{t.fn}' has sort {got}, expected {s}")
        return sig[1]

    def check(s, allowed_preds):
        if isinstance(s, Eq):
            a, b = sort_of(s.lhs), sort_of(s.rhs)
            if a is not None and b is not None and a != b:
                problems.append(f"equation sides have sorts {a} and {b}")
        elif isinstance(s, Atom):
            if s.pred not in allowed_preds:
                problems.append(f"undeclared predicate '{s.pred}'")
            for t in s.args:
                sort_of(t)
        elif isinstance(s, And):
            for p in s.parts:
                check(p, allowed_preds)
        elif isinstance(s, If):
            check(s.cond, allowed_preds)
            check(s.body, allowed_preds)
        else:
            check(s.body, allowed_preds)

    for a in theory.assertions:
        check(a.sentence, set(predicates))
        if a.explicit and free_vars(a.sentence):
            problems.append(f"assertion {a.name} has free variables")
    for m in theory.methods:
        for ob in m.obligations:
            check(ob.sentence, set(predicates) | {m.property})
            if free_vars(ob.sentence):
                problems.append(f"obligation {ob.name} has free variables")
    for d in theory.symbol_decls:
        if d.role == "cast" and d.arg_sorts[0] == d.target:
            problems.append(f"reflexive cast {d.name}")
    if problems:
        raise M2AError.single("internal-audit", "; ".join(dict.fromkeys(problems)))

