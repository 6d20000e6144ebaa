"""Boolean propositions over ``variable = value`` atoms.

Propositions print in the same grammar the CLI parses (``X=0 | !(O=hire)``),
so any witness proposition can be fed back as a query context.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from caudit.errors import UnknownVariable
from caudit._pykernels import OP_AND, OP_EQ, OP_FALSE, OP_NE, OP_NOT, OP_OR, OP_TRUE


class Proposition:
    __slots__ = ()

    def __and__(self, other: Proposition) -> Proposition:
        return conj(self, other)

    def __or__(self, other: Proposition) -> Proposition:
        return disj(self, other)

    def __invert__(self) -> Proposition:
        return Not(self)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Const(Proposition):
    value: bool


@dataclass(frozen=True)
class Atom(Proposition):
    var: str
    value: str
    negated: bool = False


@dataclass(frozen=True)
class Not(Proposition):
    arg: Proposition


@dataclass(frozen=True)
class And(Proposition):
    args: tuple[Proposition, ...]


@dataclass(frozen=True)
class Or(Proposition):
    args: tuple[Proposition, ...]


TRUE = Const(True)
FALSE = Const(False)


def eq(var: str, value: str) -> Atom:
    return Atom(var, value)


def ne(var: str, value: str) -> Atom:
    return Atom(var, value, negated=True)


def _flatten(cls, parts):
    out = []
    for p in parts:
        if isinstance(p, cls):
            out.extend(p.args)
        else:
            out.append(p)
    return tuple(out)


def conj(*parts: Proposition) -> Proposition:
    parts = _flatten(And, parts)
    if not parts:
        return TRUE
    return parts[0] if len(parts) == 1 else And(parts)


def disj(*parts: Proposition) -> Proposition:
    parts = _flatten(Or, parts)
    if not parts:
        return FALSE
    return parts[0] if len(parts) == 1 else Or(parts)


def one_of(var: str, values: Iterable[str]) -> Proposition:
    return disj(*(eq(var, v) for v in values))


def assignment_prop(assignment: Mapping[str, str]) -> Proposition:
    return conj(*(eq(k, v) for k, v in assignment.items()))


def holds(p: Proposition, world: Mapping[str, str]) -> bool:
    """Evaluate ``p`` on an assignment that binds every variable it mentions."""
    if isinstance(p, Atom):
        try:
            val = world[p.var]
        except KeyError:
            raise UnknownVariable(f"unknown variable {p.var!r}") from None
        return (val != p.value) if p.negated else (val == p.value)
    if isinstance(p, Const):
        return p.value
    if isinstance(p, Not):
        return not holds(p.arg, world)
    if isinstance(p, And):
        return all(holds(a, world) for a in p.args)
    if isinstance(p, Or):
        return any(holds(a, world) for a in p.args)
    raise TypeError(f"not a proposition: {p!r}")


def variables(p: Proposition) -> set[str]:
    if isinstance(p, Atom):
        return {p.var}
    if isinstance(p, Const):
        return set()
    if isinstance(p, Not):
        return variables(p.arg)
    return set().union(*(variables(a) for a in p.args))


_PREC = {Or: 1, And: 2}


def to_text(p: Proposition) -> str:
    if isinstance(p, Atom):
        return f"{p.var}{'!=' if p.negated else '='}{p.value}"
    if isinstance(p, Const):
        return "true" if p.value else "false"
    if isinstance(p, Not):
        inner = to_text(p.arg)
        if isinstance(p.arg, (And, Or)):
            inner = f"({inner})"
        return "!" + inner
    sep = " | " if isinstance(p, Or) else " & "
    parts = []
    for a in p.args:
        s = to_text(a)
        if isinstance(a, (And, Or)) and _PREC[type(a)] <= _PREC[type(p)]:
            s = f"({s})"
        parts.append(s)
    return sep.join(parts)


def compile_prop(p: Proposition, model) -> tuple[np.ndarray, int]:
    """Lower ``p`` to postfix kernel code for ``model``'s world columns.

    Returns the int64 code array (op, column, value-index triples) and the
    stack depth it needs.
    """
    code: list[int] = []
    cols = model.columns

    def emit(q) -> int:
        if isinstance(q, Atom):
            if q.var not in cols:
                raise UnknownVariable(f"unknown variable {q.var!r}")
            code.extend((OP_NE if q.negated else OP_EQ, cols[q.var], model.domain(q.var).index(q.value)))
            return 1
        if isinstance(q, Const):
            code.extend((OP_TRUE if q.value else OP_FALSE, 0, 0))
            return 1
        if isinstance(q, Not):
            d = emit(q.arg)
            code.extend((OP_NOT, 0, 0))
            return d
        op = OP_AND if isinstance(q, And) else OP_OR
        depth = emit(q.args[0])
        for i, a in enumerate(q.args[1:], start=1):
            depth = max(depth, 1 + emit(a))
            code.extend((op, 0, 0))
        return depth

    depth = emit(p)
    return np.asarray(code, dtype=np.int64), depth
