"""Sort poset, kinds, least sorts, argument-compatibility classes and sensibility checks."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .diagnostics import Diagnostic, M2AError, error, warning
from .syntax import App, MaudeModule, OpDecl, Term, Var, format_term, is_literal


class UnionFind:
    def __init__(self, items=()):
        self.parent = {x: x for x in items}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


class SortPoset:
    """Reflexive-transitive subsort order over a fixed, ordered set of sorts."""

    def __init__(self, sorts, declared, components):
        self.sorts: tuple[str, ...] = tuple(sorts)
        self.declared: tuple[tuple[str, str], ...] = tuple(declared)
        self.components: tuple[tuple[str, ...], ...] = tuple(tuple(c) for c in components)
        self._up: dict[str, set[str]] = {s: {s} for s in self.sorts}
        for a, b in self.declared:
            self._up[a].add(b)
        changed = True
        while changed:
            changed = False
            for s in self.sorts:
                closure = set().union(*(self._up[t] for t in self._up[s]))
                if closure != self._up[s]:
                    self._up[s] = closure
                    changed = True
        self._comp = {s: c for c in self.components for s in c}

    @property
    def leq(self) -> frozenset[tuple[str, str]]:
        return frozenset((a, b) for a in self.sorts for b in self._up[a])

    def le(self, a: str, b: str) -> bool:
        return b in self._up.get(a, ())

    def lt(self, a: str, b: str) -> bool:
        return a != b and self.le(a, b)

    def same_component(self, a: str, b: str) -> bool:
        return self._comp.get(a) is not None and self._comp.get(a) == self._comp.get(b)

    def component_of(self, s: str) -> tuple[str, ...]:
        return self._comp[s]

    def maximal(self, comp) -> list[str]:
        return [s for s in comp if not any(self.lt(s, t) for t in comp)]

    def kind(self, s: str) -> str:
        """Unique maximal sort of the component, else a synthesized `K_...` name."""
        comp = self.component_of(s)
        tops = self.maximal(comp)
        if len(tops) == 1:
            return tops[0]
        return "K_" + "_".join(sorted(comp))

    def has_top(self, s: str) -> bool:
        return len(self.maximal(self.component_of(s))) == 1

    def upper(self, s: str) -> set[str]:
        return set(self._up[s])

    def lub(self, a: str, b: str) -> str | None:
        common = self._up[a] & self._up[b]
        least = [c for c in common if all(self.le(c, d) for d in common)]
        return least[0] if len(least) == 1 else None

    def strict_pairs(self) -> list[tuple[str, str]]:
        """Every strict pair of the closure, ordered by sort declaration order."""
        return [(a, b) for a in self.sorts for b in self.sorts if self.lt(a, b)]

    def with_top(self, comp, top: str) -> SortPoset:
        """A copy where `top` is added above every maximal sort of `comp`."""
        idx = self.components.index(tuple(comp))
        declared = list(self.declared) + [(s, top) for s in self.maximal(comp)]
        components = list(self.components)
        components[idx] = tuple(comp) + (top,)
        return SortPoset(self.sorts + (top,), declared, components)


def build_poset(module: MaudeModule) -> SortPoset:
    sorts = module.all_sorts
    declared = []
    for pair in module.all_subsorts:
        if pair[0] != pair[1] and pair not in declared:
            declared.append(pair)
    uf = UnionFind(sorts)
    for a, b in declared:
        uf.union(a, b)
    groups: dict[str, list[str]] = {}
    for s in sorts:
        groups.setdefault(uf.find(s), []).append(s)
    poset = SortPoset(sorts, declared, groups.values())
    for a in sorts:
        for b in sorts:
            if a < b and poset.le(a, b) and poset.le(b, a):
                cycle = _cycle_path(declared, a, b) + _cycle_path(declared, b, a)[1:]
                raise M2AError.single("subsort-cycle", "subsort cycle: " + " < ".join(cycle))
    return poset


def _cycle_path(declared, src, dst) -> list[str]:
    succ = defaultdict(list)
    for a, b in declared:
        succ[a].append(b)
    prev = {src: None}
    queue = [src]
    while queue:
        x = queue.pop(0)
        if x == dst:
            break
        for y in succ[x]:
            if y not in prev:
                prev[y] = x
                queue.append(y)
    path = [dst]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


# --- least sorts ---


class Signature:
    """A module together with its poset; answers sort questions about terms."""

    def __init__(self, module: MaudeModule, poset: SortPoset | None = None):
        self.module = module
        self.poset = poset or build_poset(module)
        self.literal_sort = module.literal_sort
        self.by_key: dict[tuple[str, int], list[OpDecl]] = defaultdict(list)
        for op in module.all_ops:
            self.by_key[op.name, op.arity].append(op)

    def decls(self, name: str, arity: int) -> list[OpDecl]:
        return self.by_key.get((name, arity), [])

    def applicable(self, name: str, arg_sorts: tuple[str, ...]) -> list[OpDecl]:
        return [
            d for d in self.decls(name, len(arg_sorts))
            if all(self.poset.le(a, s) for a, s in zip(arg_sorts, d.arg_sorts))
        ]

    def least_sort(self, term: Term) -> str:
        if isinstance(term, Var):
            return term.sort
        if not term.args and is_literal(term.op) and not self.decls(term.op, 0):
            if self.literal_sort is None:
                raise M2AError.single("no-applicable-declaration", f"integer literal '{term.op}' needs 'protecting INT'")
            return self.literal_sort
        arg_sorts = tuple(self.least_sort(a) for a in term.args)
        cands = self.applicable(term.op, arg_sorts)
        if not cands:
            raise M2AError.single(
                "no-applicable-declaration",
                f"no declaration of '{term.op}' accepts arguments of sorts ({', '.join(arg_sorts)}) in '{format_term(term)}'",
            )
        targets = []
        for d in cands:
            if d.target not in targets:
                targets.append(d.target)
        least = [t for t in targets if all(self.poset.le(t, u) for u in targets)]
        if not least:
            raise M2AError.single(
                "non-preregular",
                f"'{format_term(term)}' has no least sort among {{{', '.join(targets)}}}",
            )
        return least[0]

    def annotate(self, term: Term) -> Term:
        """Copy of `term` with every application carrying its least sort."""
        if isinstance(term, Var):
            return term
        args = tuple(self.annotate(a) for a in term.args)
        return App(term.op, args, self.least_sort(term))


def least_sort(term: Term, module: MaudeModule, poset: SortPoset | None = None) -> str:
    return Signature(module, poset).least_sort(term)


# --- argument compatibility ---


@dataclass
class ACClass:
    name: str
    arity: int
    members: list[OpDecl]
    representative: OpDecl | None

    @property
    def builtin(self) -> bool:
        return all(m.builtin for m in self.members)


def ac(f: OpDecl, g: OpDecl, poset: SortPoset) -> bool:
    return (
        f.name == g.name
        and f.arity == g.arity
        and all(poset.same_component(a, b) for a, b in zip(f.arg_sorts, g.arg_sorts))
    )


def ac_classes(module: MaudeModule, poset: SortPoset) -> list[ACClass]:
    """Partition operators into argument-compatibility classes, in declaration order."""
    ops = module.all_ops
    uf = UnionFind(range(len(ops)))
    for i, f in enumerate(ops):
        for j in range(i):
            if ac(f, ops[j], poset):
                uf.union(j, i)
    groups: dict[int, list[OpDecl]] = {}
    for i, op in enumerate(ops):
        groups.setdefault(uf.find(i), []).append(op)
    classes = []
    for members in groups.values():
        rep = None
        for cand in members:
            if all(all(poset.le(a, b) for a, b in zip(m.arg_sorts, cand.arg_sorts)) for m in members):
                rep = cand
                break
        classes.append(ACClass(members[0].name, members[0].arity, members, rep))
    return classes


@dataclass
class SensibilityReport:
    strongly_sensible: bool
    maximal_bounding: bool
    violations: list[Diagnostic] = field(default_factory=list)
    preregular: bool = True

    @property
    def strictly_sensible(self) -> bool:
        return self.strongly_sensible and self.maximal_bounding and not [
            v for v in self.violations if v.severity == "error"
        ]

    def to_dict(self) -> dict:
        return {
            "strongly_sensible": self.strongly_sensible,
            "maximal_bounding": self.maximal_bounding,
            "preregular": self.preregular,
            "strictly_sensible": self.strictly_sensible,
            "violations": [v.to_dict() for v in self.violations],
        }


def check_strict_sensibility(classes: list[ACClass]) -> SensibilityReport:
    violations = []
    strong = bounding = True
    for cls in classes:
        for i, f in enumerate(cls.members):
            for g in cls.members[i + 1 :]:
                if f.target != g.target:
                    strong = False
                    violations.append(error(
                        "strong-sensibility",
                        f"argument-compatible declarations '{f.signature_str()}' and '{g.signature_str()}' have different targets",
                        g.span or f.span,
                    ))
        if cls.representative is None:
            bounding = False
            listing = "; ".join(m.signature_str() for m in cls.members)
            violations.append(error(
                "maximal-argument-bounding",
                f"no declaration of '{cls.name}' bounds all compatible overloads pointwise: {listing}",
                cls.members[0].span,
            ))
    return SensibilityReport(strong, bounding, violations)


def check_preregular(sig: Signature) -> list[Diagnostic]:
    """Compute least sorts of every equation and membership term; report failures."""
    problems = []
    m = sig.module

    def visit(t, span):
        try:
            sig.least_sort(t)
        except M2AError as exc:
            problems.extend(error(d.rule, d.message, d.span or span) for d in exc.diagnostics)

    for eq in m.equations:
        for t in _statement_terms(eq.lhs, eq.rhs, eq.condition):
            visit(t, eq.span)
    for mb in m.memberships:
        for t in _statement_terms(mb.subject, None, mb.condition):
            visit(t, mb.span)
    for op in m.ops:
        if op.identity is not None:
            visit(op.identity, op.span)
    return problems


def _statement_terms(a, b, condition):
    out = [a] if b is None else [a, b]
    for frag in condition:
        out += [frag.lhs, frag.rhs] if hasattr(frag, "lhs") else [frag.term]
    return out


def analyze(module: MaudeModule) -> tuple[Signature, list[ACClass], SensibilityReport]:
    """Build the poset and classes and run every signature-level check."""
    sig = Signature(module)
    classes = ac_classes(module, sig.poset)
    report = check_strict_sensibility(classes)
    prereg = check_preregular(sig)
    if prereg:
        report.preregular = False
        report.violations.extend(prereg)
    return sig, classes, report


@dataclass
class ConstructorInfo:
    ops: list[OpDecl]
    covered: dict[tuple[str, ...], bool]
    warnings: list[Diagnostic]


def constructor_subsignature(module: MaudeModule, poset: SortPoset | None = None) -> ConstructorInfo:
    poset = poset or build_poset(module)
    ctors = [op for op in module.all_ops if op.is_ctor]
    covered = {comp: any(poset.component_of(c.target) == comp for c in ctors) for comp in poset.components}
    warns = []
    builtin = set(module.builtin_sorts)
    for comp, ok in covered.items():
        if not ok and not set(comp) <= builtin:
            warns.append(warning(
                "no-constructors",
                f"no constructor targets the kind of {{{', '.join(comp)}}}; its induction method is skipped",
            ))
    return ConstructorInfo(ctors, covered, warns)
