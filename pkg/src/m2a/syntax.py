"""Source-level data model for the accepted Maude subset, plus a Maude pretty-printer."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .diagnostics import Diagnostic, Span

LITERAL_RE = re.compile(r"-?\d+")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | identifier | punctuation | special-symbol
    text: str
    span: Span


@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    op: str
    args: tuple[Term, ...] = ()
    # least sort, filled in by signature analysis; not part of term identity
    sort: str | None = field(default=None, compare=False)

    def __str__(self):
        return format_term(self)


Term = Union[Var, App]


def is_literal(name: str) -> bool:
    return LITERAL_RE.fullmatch(name) is not None


def term_vars(t: Term) -> list[Var]:
    out: list[Var] = []

    def walk(u):
        if isinstance(u, Var):
            if u not in out:
                out.append(u)
        else:
            for a in u.args:
                walk(a)

    walk(t)
    return out


def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def term_depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(term_depth(a) for a in t.args)


def mixfix_parts(name: str) -> list[str | None]:
    """Split a mixfix name into literal parts and argument holes (None)."""
    parts: list[str | None] = []
    buf = ""
    for ch in name:
        if ch == "_":
            if buf:
                parts.append(buf)
                buf = ""
            parts.append(None)
        else:
            buf += ch
    if buf:
        parts.append(buf)
    return parts


def hole_count(name: str) -> int:
    return name.count("_")


@dataclass(frozen=True)
class OpDecl:
    name: str
    arg_sorts: tuple[str, ...]
    target: str
    attrs: frozenset[str] = frozenset()  # subset of {ctor, assoc, comm}
    identity: Term | None = None
    builtin: bool = False
    span: Span | None = field(default=None, compare=False)

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    @property
    def is_ctor(self) -> bool:
        return "ctor" in self.attrs

    @property
    def is_mixfix(self) -> bool:
        return "_" in self.name and hole_count(self.name) == self.arity

    def signature_str(self) -> str:
        args = "".join(s + " " for s in self.arg_sorts)
        return f"{self.name} : {args}-> {self.target}"


@dataclass(frozen=True)
class Equality:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class SortTest:
    term: Term
    sort: str


ConditionFragment = Union[Equality, SortTest]


@dataclass(frozen=True)
class EquationDecl:
    lhs: Term
    rhs: Term
    condition: tuple[ConditionFragment, ...] = ()
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class MembershipDecl:
    subject: Term
    sort: str
    condition: tuple[ConditionFragment, ...] = ()
    span: Span | None = field(default=None, compare=False)


@dataclass
class MaudeModule:
    name: str
    sorts: list[str] = field(default_factory=list)
    subsorts: list[tuple[str, str]] = field(default_factory=list)
    imports: list[str] = field(default_factory=list)
    ops: list[OpDecl] = field(default_factory=list)
    vars: dict[str, str] = field(default_factory=dict)
    equations: list[EquationDecl] = field(default_factory=list)
    memberships: list[MembershipDecl] = field(default_factory=list)
    span: Span | None = field(default=None, compare=False)
    warnings: list[Diagnostic] = field(default_factory=list, compare=False)

    # --- imported built-in signature, derived from `imports` ---

    @property
    def builtin_sorts(self) -> list[str]:
        from .builtins import imported_signature

        return imported_signature(tuple(self.imports)).sorts

    @property
    def all_sorts(self) -> list[str]:
        out = list(self.builtin_sorts)
        out += [s for s in self.sorts if s not in out]
        return out

    @property
    def all_subsorts(self) -> list[tuple[str, str]]:
        from .builtins import imported_signature

        return list(imported_signature(tuple(self.imports)).subsorts) + list(self.subsorts)

    @property
    def all_ops(self) -> list[OpDecl]:
        from .builtins import imported_signature

        return list(imported_signature(tuple(self.imports)).ops) + list(self.ops)

    @property
    def literal_sort(self) -> str | None:
        from .builtins import imported_signature

        return imported_signature(tuple(self.imports)).literal_sort

    def decls(self, name: str, arity: int) -> list[OpDecl]:
        return [op for op in self.all_ops if op.name == name and op.arity == arity]


# --- pretty-printing back to Maude ---


def _is_atomic(t: Term) -> bool:
    return isinstance(t, Var) or not t.args or not _uses_mixfix(t)


def _uses_mixfix(t: App) -> bool:
    return "_" in t.op and hole_count(t.op) == len(t.args)


def format_term(t: Term) -> str:
    """Render a term in Maude syntax, parenthesizing every nested mixfix argument."""
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.op
    if _uses_mixfix(t):
        args = iter(t.args)
        words = []
        for part in mixfix_parts(t.op):
            if part is None:
                a = next(args)
                words.append(format_term(a) if _is_atomic(a) else f"({format_term(a)})")
            else:
                words.append(part)
        return " ".join(words)
    return f"{t.op}({', '.join(format_term(a) for a in t.args)})"


def _format_condition(cond) -> str:
    frags = []
    for c in cond:
        if isinstance(c, Equality):
            frags.append(f"{format_term(c.lhs)} = {format_term(c.rhs)}")
        else:
            frags.append(f"{format_term(c.term)} : {c.sort}")
    return r" /\ ".join(frags)


def format_module(m: MaudeModule) -> str:
    lines = [f"fmod {m.name} is"]
    for imp in m.imports:
        lines.append(f"  protecting {imp} .")
    if m.sorts:
        kw = "sort" if len(m.sorts) == 1 else "sorts"
        lines.append(f"  {kw} {' '.join(m.sorts)} .")
    for a, b in m.subsorts:
        lines.append(f"  subsort {a} < {b} .")
    for op in m.ops:
        attrs = sorted(op.attrs, key=["ctor", "assoc", "comm"].index)
        if op.identity is not None:
            attrs.append(f"id: {format_term(op.identity)}")
        suffix = f" [{' '.join(attrs)}]" if attrs else ""
        args = " ".join(op.arg_sorts)
        lines.append(f"  op {op.name} : {args + ' ' if args else ''}-> {op.target}{suffix} .")
    for v, s in m.vars.items():
        lines.append(f"  var {v} : {s} .")
    for mb in m.memberships:
        head = f"{format_term(mb.subject)} : {mb.sort}"
        if mb.condition:
            lines.append(f"  cmb {head} if {_format_condition(mb.condition)} .")
        else:
            lines.append(f"  mb {head} .")
    for eq in m.equations:
        body = f"{format_term(eq.lhs)} = {format_term(eq.rhs)}"
        if eq.condition:
            lines.append(f"  ceq {body} if {_format_condition(eq.condition)} .")
        else:
            lines.append(f"  eq {body} .")
    lines.append("endfm")
    return "\n".join(lines) + "\n"
