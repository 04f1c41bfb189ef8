"""Deterministic rendering of a TranslatedTheory as Athena source text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import __version__
from .athena import And, Assertion, Atom, AVar, Eq, If, InductionScheme, Sentence, TranslatedTheory, free_vars
from .diagnostics import M2AError
from .syntax import OpDecl

# Athena's own arithmetic/comparison symbols; a user operator spelled like one
# is declared under a word alias and overloads the glyph (`declare plus ... [+]`).
NATIVE_GLYPHS = {
    "+": "plus",
    "-": "minus",
    "*": "times",
    "/": "div",
    "<": "less",
    "<=": "leq",
    ">": "greater",
    ">=": "geq",
}


def strip_name(op: OpDecl, alias: bool = True) -> str:
    stripped = op.name.replace("_", "")
    if alias and stripped in NATIVE_GLYPHS:
        return NATIVE_GLYPHS[stripped]
    return stripped


def mangle_name(op: OpDecl, collisions: set[str] = frozenset()) -> str:
    """Athena identifier for an operator class representative.

    >>> mangle_name(OpDecl("_plus_", ("Exp", "Exp"), "Exp"))
    'plus'
    >>> mangle_name(OpDecl("f", ("A", "B"), "C"), {"f"})
    'f_A_B_C'
    """
    name = strip_name(op)
    if not name:
        raise M2AError.single("unmappable-character", f"operator name '{op.name}' is empty once placeholders are removed", op.span)
    if name in collisions:
        name = "_".join((name,) + op.arg_sorts + (op.target,))
    return name


@dataclass(frozen=True)
class EmitterConfig:
    indent_width: int = 4
    line_width: int = 100
    var_prefix: str = "_v"

    def __post_init__(self):
        if self.indent_width < 1 or self.line_width < 20:
            raise ValueError("indent_width must be >= 1 and line_width >= 20")


# --- s-expression layout ---


class Infix(list):
    """`(lhs = rhs)`: laid out with the operator leading the continuation line."""


def _var(v: AVar, cfg: EmitterConfig, typed: set) -> str:
    name = cfg.var_prefix + v.name if v.fresh else v.name
    return "?" + name if v in typed else name


def term_sexpr(t, cfg: EmitterConfig, typed: set = frozenset()):
    if isinstance(t, AVar):
        return _var(t, cfg, typed)
    if not t.args:
        return t.fn
    return [t.fn] + [term_sexpr(a, cfg, typed) for a in t.args]


def sentence_sexpr(s: Sentence, cfg: EmitterConfig, typed: set = frozenset()):
    if isinstance(s, Eq):
        return Infix([term_sexpr(s.lhs, cfg, typed), "=", term_sexpr(s.rhs, cfg, typed)])
    if isinstance(s, Atom):
        return [s.pred] + [term_sexpr(a, cfg, typed) for a in s.args]
    if isinstance(s, And):
        return ["and"] + [sentence_sexpr(p, cfg, typed) for p in s.parts]
    if isinstance(s, If):
        return ["if", sentence_sexpr(s.cond, cfg, typed), sentence_sexpr(s.body, cfg, typed)]
    if s.typed:
        binder = f"?{_var(s.var, cfg, set())}:{s.var.sort}"
        return ["forall", binder, sentence_sexpr(s.body, cfg, set(typed) | {s.var})]
    return ["forall", _var(s.var, cfg, set(typed) - {s.var}), sentence_sexpr(s.body, cfg, set(typed) - {s.var})]


def flat(x) -> str:
    if isinstance(x, str):
        return x
    return "(" + " ".join(flat(y) for y in x) + ")"


def layout(x, column: int, width: int) -> str:
    """Render an s-expression starting at `column`; too-long lists break with
    each argument after the first aligned under the first one."""
    text = flat(x)
    if isinstance(x, str) or column + len(text) <= width or len(x) < 2:
        return text
    if isinstance(x, Infix):
        lhs, op, rhs = x
        pad = " " * (column + 1)
        return "(" + layout(lhs, column + 1, width) + "\n" + pad + op + " " + layout(rhs, column + 2 + len(op), width) + ")"
    head = x[0] if isinstance(x[0], str) else layout(x[0], column + 1, width)
    if isinstance(x[0], str):
        arg_col = column + 1 + len(head) + 1
        parts = [layout(y, arg_col, width) for y in x[1:]]
        sep = "\n" + " " * arg_col
        return "(" + head + " " + sep.join(parts) + ")"
    arg_col = column + 1
    parts = [head] + [layout(y, arg_col, width) for y in x[1:]]
    return "(" + ("\n" + " " * arg_col).join(parts) + ")"


# --- emission ---


def _sorted_datatypes(decls):
    """Datatypes in declaration order, moved after the datatypes they mention;
    mutually recursive groups are declared together."""
    pending = list(decls)
    names = {d.name for d in pending}
    deps = {d.name: {s for _, args in d.ctors for s in args if s in names and s != d.name} for d in pending}
    done: set[str] = set()
    groups = []
    while pending:
        ready = next((d for d in pending if deps[d.name] <= done), None)
        if ready is not None:
            group = [ready]
        else:
            first = pending[0]

            def reach(x):
                seen, stack = set(), [x]
                while stack:
                    y = stack.pop()
                    for z in deps[y] - done:
                        if z not in seen:
                            seen.add(z)
                            stack.append(z)
                return seen

            cycle = {first.name} | {y for y in reach(first.name) if first.name in reach(y)}
            group = [d for d in pending if d.name in cycle]
        groups.append(group)
        for d in group:
            done.add(d.name)
            pending.remove(d)
    return groups


def _datatype_body(d) -> str:
    alts = [c if not args else f"({c} {' '.join(args)})" for c, args in d.ctors]
    return f"{d.name} := {' | '.join(alts)}"


def _declare(d) -> str:
    line = f"declare {d.name} : [{' '.join(d.arg_sorts)}] -> {d.target}"
    if d.alias:
        line += f" [{d.alias}]"
    return line


def _defines(theory: TranslatedTheory, cfg: EmitterConfig) -> list[str]:
    plain: list[AVar] = []
    fresh: list[AVar] = []
    for a in theory.assertions:
        if a.explicit:
            continue
        for v in free_vars(a.sentence):
            bucket = fresh if v.fresh else plain
            if v not in bucket:
                bucket.append(v)
    fresh.sort(key=lambda v: int(v.name) if v.name.isdigit() else 0)
    lines = []
    for group in (plain, fresh):
        if group:
            names = " ".join(_var(v, cfg, set()) for v in group)
            binds = " ".join(f"?{_var(v, cfg, set())}:{v.sort}" for v in group)
            lines.append(f"define [{names}] := [{binds}]")
    return lines


def _assertion(a: Assertion, cfg: EmitterConfig) -> str:
    head = f"{'assert' if a.explicit else 'assert*'} {a.name} := "
    return head + layout(sentence_sexpr(a.sentence, cfg), len(head), cfg.line_width)


def _method(m: InductionScheme, cfg: EmitterConfig) -> list[str]:
    ind = " " * cfg.indent_width
    half = " " * max(1, cfg.indent_width // 2)
    lines = [f"primitive-method ({m.method} {m.property}) :=", f"{half}let {{"]
    for i, ob in enumerate(m.obligations):
        head = f"{ind}{ob.name} := "
        body = layout(sentence_sexpr(ob.sentence, cfg), len(head), cfg.line_width)
        lines.append(head + body + (";" if i < len(m.obligations) - 1 else ""))
    lines.append(f"{half}}}")
    conclusion = f"(forall {m.conclusion_var.name} ({m.property} {m.conclusion_var.name}))"
    messages = {"basis": "Basis step does not hold.", "ic": "Inductive step does not hold."}

    def nest(i: int, col: int) -> list[str]:
        ob = m.obligations[i]
        opener = f"check {{ (holds? {ob.name}) => "
        inner_col = col + len("check { ")
        if i + 1 < len(m.obligations):
            rest = nest(i + 1, inner_col + 2)
            out = [" " * col + opener.rstrip()] + rest
        else:
            out = [" " * col + opener + conclusion]
        out.append(" " * (inner_col - 2) + f'| else => (error "{messages[ob.step]}") }}')
        return out

    lines += nest(0, cfg.indent_width)
    return lines


def emit(theory: TranslatedTheory, config: EmitterConfig | None = None) -> str:
    cfg = config or EmitterConfig()
    out = [f"# Generated by m2a {__version__} from Maude module {theory.module}"]
    sections: list[list[str]] = []

    domains: dict[int, list[str]] = {}
    for d in theory.sort_decls:
        if d.kind == "domain":
            domains.setdefault(d.component, []).append(d.name)
    sections.append([
        (f"domain {names[0]}" if len(names) == 1 else f"domains {', '.join(names)}") for names in domains.values()
    ])
    dt_lines = []
    for group in _sorted_datatypes([d for d in theory.sort_decls if d.kind == "datatype"]):
        if len(group) == 1:
            dt_lines.append("datatype " + _datatype_body(group[0]))
        else:
            dt_lines.append("datatypes " + " && ".join(_datatype_body(d) for d in group))
    sections.append(dt_lines)
    for role in ("function", "cast", "predicate"):
        sections.append([_declare(d) for d in theory.symbol_decls if d.role == role])
    sections.append(_defines(theory, cfg))
    sections.append([_assertion(a, cfg) for a in theory.assertions])
    for m in theory.methods:
        sections.append(_method(m, cfg))

    for sec in sections:
        if sec:
            out.append("")
            out += sec
    text = "\n".join(line.rstrip() for line in "\n".join(out).split("\n")) + "\n"
    check_balanced(text)
    return text


def check_balanced(text: str) -> None:
    depth = 0
    for lineno, line in enumerate(text.split("\n"), 1):
        if line.startswith("#"):
            continue
        in_string = False
        for ch in line:
            if ch == '"':
                in_string = not in_string
            elif not in_string and ch in "([{":
                depth += 1
            elif not in_string and ch in ")]}":
                depth -= 1
                if depth < 0:
                    raise M2AError.single("internal-audit", f"unbalanced bracket in emitted line {lineno}")
    if depth:
        raise M2AError.single("internal-audit", "unbalanced brackets in emitted text")


_TOKEN = re.compile(r'::|:=|[()\[\]{},:;|]|"[^"]*"|[^\s()\[\]{},:;|]+')


def normalize_tokens(text: str) -> list[str]:
    """Token stream used for golden comparisons; comment lines (the header) are dropped."""
    body = "\n".join(line for line in text.split("\n") if not line.lstrip().startswith("#"))
    return _TOKEN.findall(body)


def contains_tokens(text: str, fragment: str) -> bool:
    hay, needle = normalize_tokens(text), normalize_tokens(fragment)
    n = len(needle)
    return any(hay[i : i + n] == needle for i in range(len(hay) - n + 1))
