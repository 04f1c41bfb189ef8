"""Parser for the accepted Maude functional-module subset.

Declarations are read first; equation and membership bodies are parsed only
once every operator of the module is known, so they may mention operators
declared further down.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass

from .builtins import STUBS
from .diagnostics import M2AError, Span, error, warning
from .lexer import tokenize
from .syntax import (
    App,
    ConditionFragment,
    Equality,
    EquationDecl,
    MaudeModule,
    MembershipDecl,
    OpDecl,
    SortTest,
    Term,
    Token,
    Var,
    format_term,
    hole_count,
    is_literal,
    mixfix_parts,
)

UNSUPPORTED_ATTRS = frozenset(
    """memo frozen strat prec gather format idem iter ditto config object msg special
    poly owise otherwise metadata label nonexec print left right""".split()
)
_OPEN = {"(": ")", "[": "]", "{": "}"}


def parse_source(source: str, *, builtins: bool = True) -> list[MaudeModule]:
    """Parse every module of a source text; `builtins=False` rejects BOOL/NAT/INT imports."""
    return parse_modules(tokenize(source), builtins=builtins)


def parse_module(tokens: list[Token]) -> MaudeModule:
    """Parse the first module of a token stream."""
    if not tokens or tokens[0].text != "fmod":
        _unexpected(tokens, 0, {"fmod"})
    return _ModuleParser(tokens, 0).parse()[0]


def parse_modules(tokens: list[Token], *, builtins: bool = True) -> list[MaudeModule]:
    modules = []
    pos = 0
    while pos < len(tokens):
        if tokens[pos].text != "fmod":
            _unexpected(tokens, pos, {"fmod"})
        module, pos = _ModuleParser(tokens, pos, builtins).parse()
        modules.append(module)
    return modules


def _unexpected(tokens: list[Token], pos: int, expected: set[str]):
    exp = ", ".join(repr(e) for e in sorted(expected))
    if pos >= len(tokens):
        span = tokens[-1].span if tokens else None
        raise M2AError.single("syntax-error", f"unexpected end of input; expected one of {exp}", span)
    tok = tokens[pos]
    if tok.text in ("mod", "rl", "crl"):
        raise M2AError.single("unsupported-feature", f"'{tok.text}': system modules and rewrite rules are not supported", tok.span)
    raise M2AError.single("syntax-error", f"unexpected '{tok.text}'; expected one of {exp}", tok.span)


def _split_top(tokens: list[Token], text: str) -> list[int]:
    """Indices of tokens equal to `text` outside any bracket pair."""
    depth = 0
    hits = []
    for i, t in enumerate(tokens):
        if t.text in _OPEN:
            depth += 1
        elif t.text in (")", "]", "}"):
            depth -= 1
        elif depth == 0 and t.text == text:
            hits.append(i)
    return hits


def _cover(tokens: list[Token]) -> Span | None:
    if not tokens:
        return None
    a, b = tokens[0].span, tokens[-1].span
    return Span(a.start, b.end, a.line, a.col)


class _ModuleParser:
    def __init__(self, tokens: list[Token], start: int, builtins: bool = True):
        self.tokens = tokens
        self.start = start
        self.builtins = builtins

    def parse(self) -> tuple[MaudeModule, int]:
        toks = self.tokens
        pos = self.start
        head = toks[pos]
        if pos + 2 >= len(toks) or toks[pos + 2].text != "is":
            _unexpected(toks, pos + 2, {"is"})
        name_tok = toks[pos + 1]
        module = MaudeModule(name=name_tok.text, span=head.span)
        pos += 3

        statements: list[list[Token]] = []
        current: list[Token] = []
        depth = 0
        while True:
            if pos >= len(toks):
                _unexpected(toks, pos, {"endfm"})
            t = toks[pos]
            if depth == 0 and t.text == "endfm" and not current:
                pos += 1
                break
            if depth == 0 and t.text == "endfm":
                _unexpected(toks, pos, {"."})
            if t.text in _OPEN:
                depth += 1
            elif t.text in (")", "]", "}"):
                depth -= 1
            if depth == 0 and t.text == ".":
                if not current:
                    _unexpected(toks, pos, {"a declaration"})
                statements.append(current)
                current = []
            else:
                current.append(t)
            pos += 1

        deferred = []
        for stmt in statements:
            kw = stmt[0].text
            if kw in ("protecting", "pr"):
                self._import(module, stmt)
            elif kw in ("including", "inc", "extending", "ex"):
                raise M2AError.single("unsupported-feature", f"'{kw}' imports are not supported; use 'protecting'", stmt[0].span)
            elif kw in ("sort", "sorts"):
                self._sorts(module, stmt)
            elif kw in ("subsort", "subsorts"):
                self._subsorts(module, stmt)
            elif kw in ("op", "ops"):
                self._ops(module, stmt)
            elif kw in ("var", "vars"):
                self._vars(module, stmt)
            elif kw in ("eq", "ceq", "mb", "cmb"):
                deferred.append(stmt)
            else:
                _unexpected(stmt, 0, {"sort", "sorts", "subsort", "subsorts", "op", "ops", "var", "vars",
                                      "eq", "ceq", "mb", "cmb", "protecting"})

        self._check_sorts(module)
        from .signature import build_poset

        poset = build_poset(module)
        self.term_ctx = dict(ops=module.all_ops, literal_sort=module.literal_sort, poset=poset)
        self._finish_ops(module, poset)
        for stmt in deferred:
            kw = stmt[0].text
            if kw in ("eq", "ceq"):
                module.equations.append(self._equation(module, stmt))
            else:
                module.memberships.append(self._membership(module, stmt))
        return module, pos

    # --- declarations ---

    def _import(self, module, stmt):
        if len(stmt) != 2:
            _unexpected(stmt, 2 if len(stmt) > 2 else 1, {"."} if len(stmt) > 2 else {"a module name"})
        name = stmt[1].text
        if name not in STUBS or not self.builtins:
            raise M2AError.single("unknown-import", f"unknown module '{name}'" + (" (only BOOL, NAT, INT are built in)" if self.builtins else " (built-in modules are disabled)"), stmt[1].span)
        if name not in module.imports:
            module.imports.append(name)

    def _sorts(self, module, stmt):
        if len(stmt) < 2:
            _unexpected(stmt, 1, {"a sort name"})
        for t in stmt[1:]:
            if t.kind == "punctuation":
                _unexpected(stmt, stmt.index(t), {"a sort name"})
            if t.text in module.sorts or t.text in module.builtin_sorts:
                module.warnings.append(warning("duplicate-sort", f"sort '{t.text}' declared more than once", t.span))
                continue
            module.sorts.append(t.text)

    def _subsorts(self, module, stmt):
        cuts = _split_top(stmt, "<")
        if not cuts:
            _unexpected(stmt, len(stmt), {"<"})
        groups = []
        prev = 1
        for c in cuts + [len(stmt)]:
            group = stmt[prev:c]
            if not group:
                _unexpected(stmt, c, {"a sort name"})
            groups.append(group)
            prev = c + 1
        for lower, upper in zip(groups, groups[1:]):
            for a in lower:
                for b in upper:
                    pair = (a.text, b.text)
                    if pair not in module.subsorts:
                        module.subsorts.append(pair)
        self._subsort_spans = getattr(self, "_subsort_spans", {})
        for g in groups:
            for t in g:
                self._subsort_spans.setdefault(t.text, t.span)

    def _ops(self, module, stmt):
        colon = next((i for i, t in enumerate(stmt) if t.text == ":"), None)
        if colon is None or colon == 1:
            _unexpected(stmt, colon if colon is not None else len(stmt), {":"} if colon is None else {"an operator name"})
        names = [t for t in stmt[1:colon] if t.text not in ("(", ")")]
        if stmt[0].text == "op" and len(names) != 1:
            _unexpected(stmt, 2, {":"})
        rest = stmt[colon + 1 :]
        arrow = next((i for i, t in enumerate(rest) if t.text in ("->", "~>")), None)
        if arrow is None:
            _unexpected(rest, len(rest), {"->"})
        if rest[arrow].text == "~>":
            raise M2AError.single("unsupported-feature", "kind-level operator declarations ('~>') are not supported", rest[arrow].span)
        arg_toks = rest[:arrow]
        after = rest[arrow + 1 :]
        if not after:
            _unexpected(rest, arrow + 1, {"a sort name"})
        target = after[0]
        attr_toks: list[Token] = []
        if len(after) > 1:
            if after[1].text != "[" or after[-1].text != "]":
                _unexpected(after, 1, {"[", "."})
            attr_toks = after[2:-1]
        for t in arg_toks + [target]:
            if t.kind == "punctuation":
                _unexpected([t], 0, {"a sort name"})
        attrs, id_tokens = self._attributes(attr_toks)
        arg_sorts = tuple(t.text for t in arg_toks)
        for nt in names:
            holes = hole_count(nt.text)
            if holes not in (0, len(arg_sorts)):
                raise M2AError.single(
                    "syntax-error",
                    f"operator '{nt.text}' has {holes} argument placeholders but {len(arg_sorts)} argument sorts",
                    nt.span,
                )
            if not nt.text.strip("_"):
                raise M2AError.single("unsupported-feature", f"operator name '{nt.text}' (juxtaposition) is not supported", nt.span)
            decl = OpDecl(nt.text, arg_sorts, target.text, frozenset(attrs), None, span=nt.span)
            if decl in module.ops:
                module.warnings.append(warning("duplicate-op", f"operator '{decl.signature_str()}' declared twice", nt.span))
                continue
            module.ops.append(decl)
            if id_tokens is not None:
                self._pending_ids = getattr(self, "_pending_ids", [])
                self._pending_ids.append((len(module.ops) - 1, id_tokens))

    def _attributes(self, toks: list[Token]) -> tuple[set[str], list[Token] | None]:
        attrs: set[str] = set()
        id_tokens = None
        i = 0
        while i < len(toks):
            t = toks[i]
            word = t.text
            if word in ("ctor", "assoc", "comm"):
                attrs.add(word)
                i += 1
            elif word in ("id:", "id"):
                i += 1
                if word == "id":
                    if i >= len(toks) or toks[i].text != ":":
                        _unexpected(toks, i, {":"})
                    i += 1
                j = i
                while j < len(toks) and toks[j].text not in ("ctor", "assoc", "comm", "id:") and toks[j].text not in UNSUPPORTED_ATTRS:
                    j += 1
                if j == i:
                    _unexpected(toks, i, {"an identity term"})
                id_tokens = toks[i:j]
                i = j
            elif word in UNSUPPORTED_ATTRS:
                raise M2AError.single("unsupported-feature", f"operator attribute '{word}' is not supported", t.span)
            else:
                raise M2AError.single("unknown-attribute", f"unknown operator attribute '{word}'", t.span)
        return attrs, id_tokens

    def _vars(self, module, stmt):
        colon = next((i for i, t in enumerate(stmt) if t.text == ":"), None)
        if colon is None or colon == 1 or colon != len(stmt) - 2:
            _unexpected(stmt, colon if colon is not None else len(stmt), {":"})
        sort = stmt[-1].text
        for t in stmt[1:colon]:
            module.vars[t.text] = sort
            self._var_spans = getattr(self, "_var_spans", {})
            self._var_spans[t.text] = t.span

    def _check_sorts(self, module):
        known = set(module.all_sorts)
        problems = []
        spans = getattr(self, "_subsort_spans", {})
        for a, b in module.subsorts:
            for s in (a, b):
                if s not in known:
                    problems.append(error("unknown-sort", f"sort '{s}' is not declared", spans.get(s)))
        for op in module.ops:
            for s in op.arg_sorts + (op.target,):
                if s not in known:
                    problems.append(error("unknown-sort", f"sort '{s}' in '{op.signature_str()}' is not declared", op.span))
        var_spans = getattr(self, "_var_spans", {})
        for v, s in module.vars.items():
            if s not in known:
                problems.append(error("unknown-sort", f"sort '{s}' of variable '{v}' is not declared", var_spans.get(v)))
        if problems:
            raise M2AError(problems)

    def _finish_ops(self, module, poset):
        for op in module.ops:
            structural = op.attrs & {"assoc", "comm"}
            pending = [p for p in getattr(self, "_pending_ids", []) if module.ops[p[0]] is op]
            if not structural and not pending:
                continue
            sorts = op.arg_sorts + (op.target,)
            if op.arity != 2 or not all(poset.same_component(s, op.target) for s in sorts):
                raise M2AError.single(
                    "attribute-arity",
                    f"assoc/comm/id attributes need a binary operator whose sorts share a kind: '{op.signature_str()}'",
                    op.span,
                )
        for index, toks in getattr(self, "_pending_ids", []):
            op = module.ops[index]
            ident = parse_term(toks, {}, **self.term_ctx)
            module.ops[index] = OpDecl(op.name, op.arg_sorts, op.target, op.attrs, ident, op.builtin, op.span)

    # --- equations and memberships ---

    def _statement_attrs(self, stmt: list[Token]):
        brackets = _split_top(stmt, "[")
        if brackets:
            inner = stmt[brackets[0] + 1 : brackets[0] + 2]
            word = inner[0].text if inner else "["
            raise M2AError.single("unsupported-feature", f"statement attribute/label '{word}' is not supported", stmt[brackets[0]].span)

    def _term(self, module, toks: list[Token]) -> Term:
        return parse_term(toks, module.vars, **self.term_ctx)

    def _condition(self, module, toks: list[Token]) -> tuple[ConditionFragment, ...]:
        cuts = _split_top(toks, "/\\")
        frags = []
        prev = 0
        for c in cuts + [len(toks)]:
            frag = toks[prev:c]
            prev = c + 1
            if not frag:
                _unexpected(toks, c, {"a condition fragment"})
            for bad in (":=", "=>"):
                if _split_top(frag, bad):
                    raise M2AError.single("unsupported-feature", f"'{bad}' condition fragments are not supported", frag[0].span)
            eqs = _split_top(frag, "=")
            if eqs:
                i = eqs[0]
                frags.append(Equality(self._term(module, frag[:i]), self._term(module, frag[i + 1 :])))
            elif len(frag) >= 3 and frag[-2].text == ":":
                frags.append(SortTest(self._term(module, frag[:-2]), self._sort_ref(module, frag[-1])))
            else:
                if "Bool" not in module.all_sorts:
                    _unexpected(frag, len(frag), {"=", ":"})
                frags.append(Equality(self._term(module, frag), App("true")))
        return tuple(frags)

    def _sort_ref(self, module, tok: Token) -> str:
        if tok.text not in module.all_sorts:
            raise M2AError.single("unknown-sort", f"sort '{tok.text}' is not declared", tok.span)
        return tok.text

    def _equation(self, module, stmt):
        self._statement_attrs(stmt)
        body = stmt[1:]
        cond: tuple = ()
        if stmt[0].text == "ceq":
            ifs = _split_top(body, "if")
            if not ifs:
                _unexpected(body, len(body), {"if"})
            cond = self._condition(module, body[ifs[0] + 1 :])
            body = body[: ifs[0]]
        elif _split_top(body, "if"):
            tok = body[_split_top(body, "if")[0]]
            raise M2AError.single("syntax-error", "conditional equation must use 'ceq'", tok.span)
        eqs = _split_top(body, "=")
        if not eqs:
            _unexpected(body, len(body), {"="})
        i = eqs[0]
        lhs = self._term(module, body[:i])
        rhs = self._term(module, body[i + 1 :])
        return EquationDecl(lhs, rhs, cond, span=stmt[0].span)

    def _membership(self, module, stmt):
        self._statement_attrs(stmt)
        body = stmt[1:]
        cond: tuple = ()
        if stmt[0].text == "cmb":
            ifs = _split_top(body, "if")
            if not ifs:
                _unexpected(body, len(body), {"if"})
            cond = self._condition(module, body[ifs[0] + 1 :])
            body = body[: ifs[0]]
        if len(body) < 3 or body[-2].text != ":":
            _unexpected(body, max(len(body) - 2, 0), {":"})
        return MembershipDecl(self._term(module, body[:-2]), self._sort_ref(module, body[-1]), cond, span=stmt[0].span)


# --- mixfix term parsing ---


@dataclass(frozen=True)
class _Cand:
    term: Term
    bare: str | None  # operator name when the term is an unparenthesized mixfix application
    sort: str | None


def parse_term(tokens: list[Token], vars: dict[str, str], ops: list[OpDecl], *, literal_sort: str | None = None, poset=None) -> Term:
    """Resolve a token slice into a term.

    Mixfix applications are found by bounded backtracking over operator
    templates. Unparenthesized chains of one operator associate to the right;
    any other ambiguity is an error. With a poset, ill-sorted readings are pruned.
    """
    if not tokens:
        raise M2AError.single("syntax-error", "expected a term")
    return _TermParser(tokens, vars, ops, literal_sort, poset).parse()


class _TermParser:
    def __init__(self, tokens, vars, ops, literal_sort, poset):
        self.tokens = tokens
        self.texts = [t.text for t in tokens]
        self.vars = vars
        self.literal_sort = literal_sort
        self.poset = poset
        self.decls: dict[tuple[str, int], list[OpDecl]] = defaultdict(list)
        for op in ops:
            self.decls[op.name, op.arity].append(op)
        self.names = {name for name, _ in self.decls}
        self.patterns = sorted(
            {(name, arity) for name, arity in self.decls if arity > 0 and hole_count(name) == arity}
        )
        self.pattern_parts = {key: mixfix_parts(key[0]) for key in self.patterns}
        self.literal_words = {p for parts in self.pattern_parts.values() for p in parts if p is not None}
        self.match = self._match_parens()
        self.memo: dict[tuple[int, int], list[_Cand]] = {}
        self.match_memo: dict = {}
        self.ill_sorted: list[Term] = []

    def _match_parens(self) -> dict[int, int]:
        stack, out = [], {}
        for i, t in enumerate(self.texts):
            if t == "(":
                stack.append(i)
            elif t == ")":
                if not stack:
                    raise M2AError.single("syntax-error", "unbalanced ')'", self.tokens[i].span)
                out[stack.pop()] = i
        if stack:
            raise M2AError.single("syntax-error", "unbalanced '('", self.tokens[stack[-1]].span)
        return out

    def parse(self) -> Term:
        n = len(self.tokens)
        cands = self.parses(0, n)
        terms: list[Term] = []
        for c in cands:
            if c.term not in terms:
                terms.append(c.term)
        if len(terms) == 1:
            return terms[0]
        span = _cover(self.tokens)
        if terms:
            listing = " | ".join(_paren(t) for t in terms)
            raise M2AError.single("ambiguous-parse", f"ambiguous term; parenthesize one of: {listing}", span)
        for i, t in enumerate(self.texts):
            if t in ("(", ")", ","):
                continue
            if t in self.vars or t in self.names or t in self.literal_words:
                continue
            if is_literal(t) and self.literal_sort:
                continue
            raise M2AError.single("unknown-identifier", f"unknown identifier '{t}'", self.tokens[i].span)
        if self.ill_sorted:
            raise M2AError.single("no-parse", f"ill-sorted term '{_paren(self.ill_sorted[0])}'", span)
        longest = max((j for j in range(1, n + 1) if self.parses(0, j)), default=0)
        at = self.tokens[min(longest, n - 1)]
        raise M2AError.single("no-parse", f"cannot parse term; longest parsable prefix ends before '{at.text}'", at.span)

    def parses(self, i: int, j: int) -> list[_Cand]:
        key = (i, j)
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = []  # guards against left recursion through empty holes
        out: list[_Cand] = []
        texts = self.texts
        if j - i == 1:
            out += self._atoms(texts[i])
        if texts[i] == "(" and self.match.get(i) == j - 1 and j - i > 2:
            out += [_Cand(c.term, None, c.sort) for c in self.parses(i + 1, j - 1)]
        if j - i >= 4 and texts[i] in self.names and texts[i + 1] == "(" and self.match.get(i + 1) == j - 1:
            out += self._prefix(i, j)
        for key_ in self.patterns:
            out += self._mixfix(key_, i, j)
        uniq: list[_Cand] = []
        for c in out:
            if c not in uniq:
                uniq.append(c)
        self.memo[key] = uniq
        return uniq

    def _atoms(self, text: str) -> list[_Cand]:
        out = []
        if text in self.vars:
            out.append(_Cand(Var(text, self.vars[text]), None, self.vars[text]))
        if is_literal(text) and self.literal_sort:
            out.append(_Cand(App(text), None, self.literal_sort))
        elif (text, 0) in self.decls:
            c = self._build(text, ())
            if c is not None:
                out.append(c)
        return out

    def _prefix(self, i: int, j: int) -> list[_Cand]:
        depth, cuts = 0, []
        for k in range(i + 2, j - 1):
            t = self.texts[k]
            if t in _OPEN:
                depth += 1
            elif t in (")", "]", "}"):
                depth -= 1
            elif t == "," and depth == 0:
                cuts.append(k)
        bounds = list(zip([i + 2] + [c + 1 for c in cuts], cuts + [j - 1]))
        if any(a >= b for a, b in bounds) or (self.texts[i], len(bounds)) not in self.decls:
            return []
        out = []
        for combo in itertools.product(*(self.parses(a, b) for a, b in bounds)):
            c = self._build(self.texts[i], combo)
            if c is not None:
                out.append(_Cand(c.term, None, c.sort))
        return out

    def _mixfix(self, key, i: int, j: int) -> list[_Cand]:
        name, _ = key
        parts = self.pattern_parts[key]
        span_words = set(self.texts[i:j])
        if any(p is not None and p not in span_words for p in parts):
            return []
        out = []
        for combo in self._fill(key, 0, i, j):
            if parts[0] is None and parts[-1] is None and combo[0].bare == name:
                continue  # same-operator chains nest to the right
            c = self._build(name, combo)
            if c is not None:
                out.append(c)
        return out

    def _fill(self, key, k: int, pos: int, end: int) -> list[tuple[_Cand, ...]]:
        memo_key = (key, k, pos, end)
        if memo_key in self.match_memo:
            return self.match_memo[memo_key]
        parts = self.pattern_parts[key]
        result: list[tuple[_Cand, ...]] = []
        if k == len(parts):
            result = [()] if pos == end else []
        elif pos >= end:
            result = []
        elif parts[k] is not None:
            if self.texts[pos] == parts[k]:
                result = self._fill(key, k + 1, pos + 1, end)
        elif k == len(parts) - 1:
            result = [(c,) for c in self.parses(pos, end)]
        else:
            nxt = parts[k + 1]
            for q in range(pos + 1, end):
                if nxt is not None and self.texts[q] != nxt:
                    continue
                rests = self._fill(key, k + 1, q, end)
                if not rests:
                    continue
                for c in self.parses(pos, q):
                    result += [(c,) + r for r in rests]
        self.match_memo[memo_key] = result
        return result

    def _build(self, name: str, args: tuple[_Cand, ...]) -> _Cand | None:
        term = App(name, tuple(a.term for a in args))
        decls = self.decls[name, len(args)]
        bare = name if args and hole_count(name) == len(args) else None
        if self.poset is None:
            return _Cand(term, bare, None)
        applicable = [
            d for d in decls if all(a.sort is None or self.poset.le(a.sort, s) for a, s in zip(args, d.arg_sorts))
        ]
        if not applicable:
            self.ill_sorted.append(term)
            return None
        targets = {d.target for d in applicable}
        least = [t for t in targets if all(self.poset.le(t, u) for u in targets)]
        return _Cand(term, bare, least[0] if len(least) == 1 else None)


def _paren(t: Term) -> str:
    """Fully parenthesized rendering used in ambiguity reports."""
    if isinstance(t, Var) or not t.args:
        return format_term(t)
    if hole_count(t.op) == len(t.args):
        args = iter(t.args)
        words = [(_paren(next(args)) if p is None else p) for p in mixfix_parts(t.op)]
        return "(" + " ".join(words) + ")"
    return f"{t.op}({', '.join(_paren(a) for a in t.args)})"
