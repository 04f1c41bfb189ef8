"""Signature stubs for the built-in modules BOOL, NAT and INT.

Stubs carry sorts and operator declarations only, no equations. Each built-in
sort and operator maps to a native Athena name, so none of them is declared in
the emitted module.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from functools import lru_cache

from .diagnostics import M2AError
from .syntax import OpDecl


@dataclass(frozen=True)
class Stub:
    sorts: tuple[str, ...]
    ops: tuple[OpDecl, ...]
    requires: tuple[str, ...] = ()
    literal_sort: str | None = None


def _op(name, args, target):
    return OpDecl(name, tuple(args), target, builtin=True)


STUBS: dict[str, Stub] = {
    "BOOL": Stub(
        sorts=("Bool",),
        ops=(_op("true", [], "Bool"), _op("false", [], "Bool")),
    ),
    "NAT": Stub(
        sorts=("Nat",),
        ops=(
            _op("_+_", ["Nat", "Nat"], "Nat"),
            _op("_*_", ["Nat", "Nat"], "Nat"),
        ),
        requires=("BOOL",),
        literal_sort="Nat",
    ),
    "INT": Stub(
        sorts=("Int",),
        ops=(
            _op("_+_", ["Int", "Int"], "Int"),
            _op("_-_", ["Int", "Int"], "Int"),
            _op("_*_", ["Int", "Int"], "Int"),
            _op("-_", ["Int"], "Int"),
            _op("_<_", ["Int", "Int"], "Bool"),
            _op("_<=_", ["Int", "Int"], "Bool"),
            _op("_>_", ["Int", "Int"], "Bool"),
            _op("_>=_", ["Int", "Int"], "Bool"),
        ),
        requires=("BOOL",),
        literal_sort="Int",
    ),
}

# Maude built-in sort -> Athena native sort
NATIVE_SORTS = {"Bool": "Boolean", "Int": "Int", "Nat": "N"}

# Maude built-in operator name -> Athena native function symbol
NATIVE_OPS = {
    "true": "true",
    "false": "false",
    "_+_": "+",
    "_-_": "-",
    "_*_": "*",
    "-_": "-",
    "_<_": "<",
    "_<=_": "<=",
    "_>_": ">",
    "_>=_": ">=",
}


@dataclass(frozen=True)
class ImportedSignature:
    sorts: list[str]
    subsorts: tuple[tuple[str, str], ...]
    ops: tuple[OpDecl, ...]
    literal_sort: str | None


@lru_cache(maxsize=None)
def imported_signature(imports: tuple[str, ...]) -> ImportedSignature:
    seen: list[str] = []

    def visit(name):
        if name in seen:
            return
        if name not in STUBS:
            raise M2AError.single("unknown-import", f"unknown module '{name}' (only BOOL, NAT, INT are built in)")
        for dep in STUBS[name].requires:
            visit(dep)
        seen.append(name)

    for imp in imports:
        visit(imp)
    sorts: list[str] = []
    ops: list[OpDecl] = []
    literal = None
    for name in seen:
        stub = STUBS[name]
        sorts += [s for s in stub.sorts if s not in sorts]
        ops += [o for o in stub.ops if o not in ops]
        # INT wins over NAT for bare numerals
        if stub.literal_sort and literal != "Int":
            literal = stub.literal_sort
    return ImportedSignature(sorts, (), tuple(ops), literal)


# Evaluation of built-in arithmetic on literals, used by the rewrite oracle.
_ARITH = {
    "_+_": operator.add,
    "_-_": operator.sub,
    "_*_": operator.mul,
    "_<_": operator.lt,
    "_<=_": operator.le,
    "_>_": operator.gt,
    "_>=_": operator.ge,
}


def evaluate(op_name: str, values: list[int]):
    """Return the int/bool result of a built-in operator on literal values, or None."""
    if op_name == "-_" and len(values) == 1:
        return -values[0]
    fn = _ARITH.get(op_name)
    if fn is None or len(values) != 2:
        return None
    return fn(*values)
