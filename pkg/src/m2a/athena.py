"""Target-side data model: many-sorted Athena terms, sentences and theories."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .diagnostics import Diagnostic


@dataclass(frozen=True)
class AVar:
    name: str
    sort: str
    fresh: bool = False  # ACU variables, rendered with the emitter's prefix


@dataclass(frozen=True)
class AApp:
    fn: str
    args: tuple[ATerm, ...] = ()


ATerm = Union[AVar, AApp]


@dataclass(frozen=True)
class Eq:
    lhs: ATerm
    rhs: ATerm


@dataclass(frozen=True)
class Atom:
    """Predicate application, e.g. a membership predicate or a method's property."""

    pred: str
    args: tuple[ATerm, ...]


@dataclass(frozen=True)
class And:
    parts: tuple[Sentence, ...]


@dataclass(frozen=True)
class If:
    cond: Sentence
    body: Sentence


@dataclass(frozen=True)
class Forall:
    var: AVar
    body: Sentence
    typed: bool = False  # `?x:S` binder with `?x` occurrences, else a bare `x`


Sentence = Union[Eq, Atom, And, If, Forall]


def conj(parts: list[Sentence]) -> Sentence:
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def term_symbols(t: ATerm, out: list[tuple[str, int]]) -> None:
    if isinstance(t, AApp):
        out.append((t.fn, len(t.args)))
        for a in t.args:
            term_symbols(a, out)


def sentence_terms(s: Sentence) -> list[ATerm]:
    if isinstance(s, Eq):
        return [s.lhs, s.rhs]
    if isinstance(s, Atom):
        return list(s.args)
    if isinstance(s, And):
        return [t for p in s.parts for t in sentence_terms(p)]
    if isinstance(s, If):
        return sentence_terms(s.cond) + sentence_terms(s.body)
    return sentence_terms(s.body)


def free_vars(s: Sentence, bound: frozenset = frozenset()) -> list[AVar]:
    out: list[AVar] = []

    def term(t):
        if isinstance(t, AVar):
            if t not in bound and t not in out:
                out.append(t)
        else:
            for a in t.args:
                term(a)

    if isinstance(s, Forall):
        return [v for v in free_vars(s.body, bound | {s.var}) if v not in out]
    if isinstance(s, (And, If)):
        for part in (s.parts if isinstance(s, And) else (s.cond, s.body)):
            out += [v for v in free_vars(part, bound) if v not in out]
        return out
    for t in sentence_terms(s):
        term(t)
    return out


# --- declarations ---


@dataclass(frozen=True)
class SortDecl:
    name: str
    kind: str  # "domain" | "datatype"
    ctors: tuple[tuple[str, tuple[str, ...]], ...] = ()  # datatype constructors
    component: int = 0


@dataclass(frozen=True)
class SymbolDecl:
    name: str
    arg_sorts: tuple[str, ...]
    target: str
    role: str  # "function" | "cast" | "predicate"
    alias: str | None = None  # native infix glyph the symbol overloads, e.g. "+"


@dataclass(frozen=True)
class Assertion:
    name: str
    sentence: Sentence
    role: str  # "structural" | "equation" | "core" | "membership"

    @property
    def explicit(self) -> bool:
        """Core equalities carry explicit quantifiers and use `assert`."""
        return self.role == "core"


@dataclass(frozen=True)
class EffectiveConstructor:
    name: str
    arg_sorts: tuple[str, ...]
    target: str
    recursive: tuple[bool, ...]
    is_cast: bool
    label: str  # used in obligation names


@dataclass(frozen=True)
class Obligation:
    name: str
    sentence: Sentence
    step: str  # "basis" | "ic"
    source: EffectiveConstructor | None = None


@dataclass(frozen=True)
class InductionScheme:
    method: str
    kind: str
    component: tuple[str, ...]
    constructors: tuple[EffectiveConstructor, ...]
    obligations: tuple[Obligation, ...]
    conclusion_var: AVar
    property: str = "property"


@dataclass
class TranslatedTheory:
    module: str
    sort_decls: list[SortDecl] = field(default_factory=list)
    symbol_decls: list[SymbolDecl] = field(default_factory=list)
    assertions: list[Assertion] = field(default_factory=list)
    methods: list[InductionScheme] = field(default_factory=list)
    natives: dict[tuple[str, int], tuple[tuple[str, ...], str]] = field(default_factory=dict)
    warnings: list[Diagnostic] = field(default_factory=list)

    def symbol_table(self) -> dict[tuple[str, int], tuple[tuple[str, ...], str]]:
        """(name, arity) -> signature for natives, datatype constructors and declarations."""
        table = dict(self.natives)
        for sd in self.sort_decls:
            for name, args in sd.ctors:
                table[name, len(args)] = (args, sd.name)
        for d in self.symbol_decls:
            table[d.name, len(d.arg_sorts)] = (d.arg_sorts, d.target)
        return table

    def assertion(self, name: str) -> Assertion:
        for a in self.assertions:
            if a.name == name:
                return a
        raise KeyError(name)

    def without(self, name: str) -> TranslatedTheory:
        """Copy with one assertion removed (used to check mutation sensitivity)."""
        return TranslatedTheory(
            self.module, list(self.sort_decls), list(self.symbol_decls),
            [a for a in self.assertions if a.name != name], list(self.methods),
            dict(self.natives), list(self.warnings),
        )
