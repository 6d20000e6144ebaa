"""Finite discrete structural causal models.

Structural equations are explicit lookup tables over the Cartesian product of
their parents' domains, so totality is checkable and evaluation is exact.
Values are plain strings drawn from declared domains; ``BOT`` is an ordinary
value with a reserved spelling, used by database models for absent rows.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from caudit.errors import (
    CapacityExceeded,
    CycleDetected,
    DomainMismatch,
    IncompleteBackground,
    InterventionOnBackground,
    InvalidDistribution,
    MissingEquation,
    ModelError,
    NonTotalTable,
    UnknownVariable,
)

BOT = "⊥"

BACKGROUND = "background"
ENDOGENOUS = "endogenous"

MAX_DOMAIN = 64
MAX_VARIABLES = 16
DEFAULT_MAX_WORLDS = 1 << 16

POPULATION = "population"
KNOWLEDGE = "knowledge"


def max_worlds() -> int:
    """Enumeration cap on the number of support points; ``CAUDIT_MAX_WORLDS`` overrides."""
    raw = os.environ.get("CAUDIT_MAX_WORLDS")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise CapacityExceeded(f"CAUDIT_MAX_WORLDS must be an integer, got {raw!r}")
    return DEFAULT_MAX_WORLDS


@dataclass(frozen=True)
class Domain:
    name: str
    values: tuple[str, ...]

    def __post_init__(self):
        values = tuple(self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise ModelError(f"domain {self.name!r} is empty")
        if len(set(values)) != len(values):
            raise ModelError(f"domain {self.name!r} has repeated values")

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.values)}

    def index(self, value: str) -> int:
        try:
            return self._positions[value]
        except KeyError:
            raise DomainMismatch(f"{value!r} is not in domain {self.name!r}") from None

    @property
    def has_bot(self) -> bool:
        return BOT in self._positions

    def __contains__(self, value) -> bool:
        return value in self._positions

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[str]:
        return iter(self.values)


@dataclass(frozen=True)
class Variable:
    id: str
    role: str
    domain: Domain

    def __post_init__(self):
        if self.role not in (BACKGROUND, ENDOGENOUS):
            raise ModelError(f"variable {self.id!r}: unknown role {self.role!r}")


@dataclass(frozen=True, eq=False)
class StructuralEquation:
    """``target := table[parent values]``."""

    target: str
    parents: tuple[str, ...]
    table: Mapping[tuple[str, ...], str]

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(self, "table", {tuple(k): v for k, v in self.table.items()})

    def __eq__(self, other):
        if not isinstance(other, StructuralEquation):
            return NotImplemented
        return (self.target, self.parents, self.table) == (other.target, other.parents, other.table)

    def __call__(self, *parent_values: str) -> str:
        return self.table[parent_values]

    @classmethod
    def constant(cls, target: str, value: str) -> StructuralEquation:
        return cls(target, (), {(): value})

    @classmethod
    def identity(cls, target: str, source: str, domain: Domain) -> StructuralEquation:
        return cls(target, (source,), {(v,): v for v in domain})

    @classmethod
    def from_function(cls, target: str, parents: Sequence[str], domains: Sequence[Domain], fn):
        """Tabulate ``fn(*parent_values)`` over the product of ``domains``."""
        table = {combo: fn(*combo) for combo in itertools.product(*(d.values for d in domains))}
        return cls(target, tuple(parents), table)

    def is_constant(self) -> bool:
        return not self.parents

    def is_identity_on(self, source: str) -> bool:
        return self.parents == (source,) and all(k[0] == v for k, v in self.table.items())


@dataclass(frozen=True, eq=False)
class CausalModel:
    """Background and endogenous variables plus one equation per endogenous variable.

    ``order`` is None until :func:`validate_model` has checked the model and
    computed a topological order (background variables first).
    """

    variables: tuple[Variable, ...]
    equations: Mapping[str, StructuralEquation]
    order: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "equations", dict(self.equations))

    def __eq__(self, other):
        if not isinstance(other, CausalModel):
            return NotImplemented
        return self.variables == other.variables and self.equations == other.equations

    @cached_property
    def _by_id(self) -> dict[str, Variable]:
        return {v.id: v for v in self.variables}

    def var(self, vid: str) -> Variable:
        try:
            return self._by_id[vid]
        except KeyError:
            raise UnknownVariable(f"unknown variable {vid!r}") from None

    def domain(self, vid: str) -> Domain:
        return self.var(vid).domain

    def has(self, vid: str) -> bool:
        return vid in self._by_id

    @property
    def background(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.variables if v.role == BACKGROUND)

    @property
    def endogenous(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.variables if v.role == ENDOGENOUS)

    @property
    def validated(self) -> bool:
        return self.order is not None

    def children(self, vid: str) -> tuple[str, ...]:
        return tuple(t for t, eq in self.equations.items() if vid in eq.parents)

    @cached_property
    def columns(self) -> dict[str, int]:
        """Column index of each variable in world matrices (topological order)."""
        _require_valid(self)
        return {vid: i for i, vid in enumerate(self.order)}

    @cached_property
    def program(self):
        """Flattened equation tables for the world-evaluation kernel."""
        _require_valid(self)
        cols = self.columns
        targets, parent_ptr, parent_cols, strides, table_ptr, tables = [], [0], [], [], [], []
        for vid in self.order:
            if self.var(vid).role != ENDOGENOUS:
                continue
            eq = self.equations[vid]
            target_dom = self.domain(vid)
            doms = [self.domain(p) for p in eq.parents]
            stride = 1
            rev = []
            for d in reversed(doms):
                rev.append(stride)
                stride *= len(d)
            targets.append(cols[vid])
            parent_cols.extend(cols[p] for p in eq.parents)
            strides.extend(reversed(rev))
            parent_ptr.append(len(parent_cols))
            table_ptr.append(len(tables))
            for combo in itertools.product(*(d.values for d in doms)):
                tables.append(target_dom.index(eq.table[combo]))
        as_arr = lambda xs: np.asarray(xs, dtype=np.int64)  # noqa: E731
        return tuple(as_arr(x) for x in (targets, parent_ptr, parent_cols, strides, table_ptr, tables))


def _require_valid(m: CausalModel):
    if m.order is None:
        raise ModelError("model has not been validated")


def _find_cycle(deps: Mapping[str, Sequence[str]], nodes: Iterable[str]) -> list[str]:
    nodes = list(nodes)
    state = {n: 0 for n in nodes}
    stack: list[str] = []

    def visit(n):
        state[n] = 1
        stack.append(n)
        for p in deps.get(n, ()):
            if p not in state:
                continue
            if state[p] == 1:
                return stack[stack.index(p):] + [p]
            if state[p] == 0:
                found = visit(p)
                if found:
                    return found
        stack.pop()
        state[n] = 2
        return None

    for n in nodes:
        if state[n] == 0:
            found = visit(n)
            if found:
                return found
    return nodes


def validate_model(m: CausalModel, *, max_domain: int = MAX_DOMAIN,
                   max_variables: int = MAX_VARIABLES) -> CausalModel:
    """Check a model and return a copy carrying its topological order."""
    ids = [v.id for v in m.variables]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise ModelError(f"duplicate variable ids: {', '.join(dup)}")
    if len(ids) > max_variables:
        raise CapacityExceeded(f"model has {len(ids)} variables; cap is {max_variables}")
    for v in m.variables:
        if len(v.domain) > max_domain:
            raise CapacityExceeded(
                f"domain {v.domain.name!r} of {v.id!r} has {len(v.domain)} values; cap is {max_domain}")

    for target in m.equations:
        if not m.has(target):
            raise ModelError(f"equation for undeclared variable {target!r}")
        if m.var(target).role == BACKGROUND:
            raise ModelError(f"background variable {target!r} cannot have an equation")
    for vid in m.endogenous:
        if vid not in m.equations:
            raise MissingEquation(f"endogenous variable {vid!r} has no equation")
        eq = m.equations[vid]
        if eq.target != vid:
            raise ModelError(f"equation filed under {vid!r} targets {eq.target!r}")
        for p in eq.parents:
            if not m.has(p):
                raise ModelError(f"equation for {vid!r} uses undeclared parent {p!r}")
        if len(set(eq.parents)) != len(eq.parents):
            raise ModelError(f"equation for {vid!r} repeats a parent")
        doms = [m.domain(p) for p in eq.parents]
        for key, out in eq.table.items():
            if len(key) != len(doms):
                raise NonTotalTable(f"equation for {vid!r}: row {key} has the wrong arity")
            for val, d in zip(key, doms):
                if val not in d:
                    raise DomainMismatch(f"equation for {vid!r}: {val!r} is not in domain {d.name!r}")
            if out not in m.domain(vid):
                raise DomainMismatch(
                    f"equation for {vid!r}: output {out!r} is not in domain {m.domain(vid).name!r}")
        expected = 1
        for d in doms:
            expected *= len(d)
        if len(eq.table) != expected:
            missing = next(c for c in itertools.product(*(d.values for d in doms)) if c not in eq.table)
            raise NonTotalTable(f"equation for {vid!r} has no row for {' '.join(missing)}")

    order = list(m.background)
    placed = set(order)
    pending = [v for v in m.endogenous]
    while pending:
        progress = False
        for vid in list(pending):
            if all(p in placed for p in m.equations[vid].parents):
                order.append(vid)
                placed.add(vid)
                pending.remove(vid)
                progress = True
        if not progress:
            deps = {v: m.equations[v].parents for v in pending}
            cycle = _find_cycle(deps, pending)
            raise CycleDetected("cyclic equations: " + " -> ".join(cycle))
    return replace(m, order=tuple(order))


def make_model(variables: Sequence[Variable], equations: Iterable[StructuralEquation], **caps) -> CausalModel:
    return validate_model(CausalModel(tuple(variables), {e.target: e for e in equations}), **caps)


def intervene(m: CausalModel, iv: Mapping[str, str]) -> CausalModel:
    """Replace the equation of each intervened variable by a constant."""
    _require_valid(m)
    if not iv:
        raise ModelError("an intervention needs at least one target")
    eqs = dict(m.equations)
    for vid, value in iv.items():
        var = m.var(vid)
        if var.role == BACKGROUND:
            raise InterventionOnBackground(f"cannot intervene on background variable {vid!r}")
        var.domain.index(value)
        eqs[vid] = StructuralEquation.constant(vid, value)
    # constant equations have no parents, so the old order stays topological
    return CausalModel(m.variables, eqs, m.order)


def evaluate_world(m: CausalModel, u: Mapping[str, str]) -> dict[str, str]:
    """Compute every variable's value from a full background assignment."""
    _require_valid(m)
    world = {}
    for vid in m.background:
        if vid not in u:
            raise IncompleteBackground(f"background assignment lacks {vid!r}")
        m.domain(vid).index(u[vid])
        world[vid] = u[vid]
    for vid in m.order[len(world):]:
        eq = m.equations[vid]
        world[vid] = eq.table[tuple(world[p] for p in eq.parents)]
    return world


def _as_fraction(p) -> Fraction:
    if isinstance(p, float):
        raise InvalidDistribution("probabilities must be exact rationals, not floats")
    return Fraction(p)


@dataclass(frozen=True, eq=False)
class BackgroundDist:
    """Exact distribution over full background assignments.

    ``support`` maps value tuples (ordered as ``variables``) to probabilities.
    Zero-mass points are dropped; the rest must be positive and sum to one.
    ``kind`` labels the frequentist (population) or Bayesian (knowledge)
    reading and only affects report text.
    """

    variables: tuple[str, ...]
    support: Mapping[tuple[str, ...], Fraction]
    kind: str = POPULATION

    def __post_init__(self):
        variables = tuple(self.variables)
        object.__setattr__(self, "variables", variables)
        if self.kind not in (POPULATION, KNOWLEDGE):
            raise InvalidDistribution(f"unknown distribution kind {self.kind!r}")
        support = {}
        for key, p in self.support.items():
            key = tuple(key)
            if len(key) != len(variables):
                raise InvalidDistribution(f"support point {key} does not cover {variables}")
            p = _as_fraction(p)
            if p < 0:
                raise InvalidDistribution(f"negative probability {p} at {key}")
            if p:
                support[key] = p
        total = sum(support.values(), Fraction(0))
        if total != 1:
            raise InvalidDistribution(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "support", support)

    def __eq__(self, other):
        if not isinstance(other, BackgroundDist):
            return NotImplemented
        return (self.variables, self.support, self.kind) == (other.variables, other.support, other.kind)

    @classmethod
    def from_points(cls, points: Iterable[tuple[Mapping[str, str], object]],
                    variables: Sequence[str] | None = None, kind: str = POPULATION) -> BackgroundDist:
        points = list(points)
        if variables is None:
            variables = list(points[0][0]) if points else []
        support = {}
        for assignment, p in points:
            if set(assignment) != set(variables):
                raise InvalidDistribution(f"support point {dict(assignment)} does not cover {list(variables)}")
            key = tuple(assignment[v] for v in variables)
            if key in support:
                raise InvalidDistribution(f"support point {dict(assignment)} listed twice")
            support[key] = _as_fraction(p)
        return cls(tuple(variables), support, kind)

    @classmethod
    def product(cls, marginals: Mapping[str, Mapping[str, object]], kind: str = POPULATION) -> BackgroundDist:
        """Independent product of per-variable marginals."""
        names = list(marginals)
        items = [[(v, _as_fraction(p)) for v, p in marginals[n].items() if p] for n in names]
        support = {}
        for combo in itertools.product(*items):
            p = Fraction(1)
            for _, q in combo:
                p *= q
            support[tuple(v for v, _ in combo)] = p
        return cls(tuple(names), support, kind)

    @classmethod
    def point_mass(cls, assignment: Mapping[str, str], kind: str = POPULATION) -> BackgroundDist:
        return cls(tuple(assignment), {tuple(assignment.values()): Fraction(1)}, kind)

    def items(self) -> Iterator[tuple[dict[str, str], Fraction]]:
        for key, p in self.support.items():
            yield dict(zip(self.variables, key)), p

    def marginal(self, vid: str) -> dict[str, Fraction]:
        i = self.variables.index(vid)
        out: dict[str, Fraction] = {}
        for key, p in self.support.items():
            out[key[i]] = out.get(key[i], Fraction(0)) + p
        return out

    def reordered(self, variables: Sequence[str]) -> BackgroundDist:
        perm = [self.variables.index(v) for v in variables]
        support = {tuple(k[i] for i in perm): p for k, p in self.support.items()}
        return BackgroundDist(tuple(variables), support, self.kind)


@dataclass(frozen=True, eq=False)
class ProbCausalModel:
    """A validated causal model together with its background distribution."""

    model: CausalModel
    dist: BackgroundDist
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        model = self.model if self.model.validated else validate_model(self.model)
        object.__setattr__(self, "model", model)
        bg = model.background
        if set(self.dist.variables) != set(bg) or len(self.dist.variables) != len(bg):
            raise InvalidDistribution(
                f"distribution is over {list(self.dist.variables)}, model background is {list(bg)}")
        dist = self.dist if self.dist.variables == bg else self.dist.reordered(bg)
        for key in dist.support:
            for vid, val in zip(bg, key):
                model.domain(vid).index(val)
        cap = max_worlds()
        if len(dist.support) > cap:
            raise CapacityExceeded(
                f"{len(dist.support)} support points exceed the enumeration cap {cap} "
                "(set CAUDIT_MAX_WORLDS to raise it)")
        object.__setattr__(self, "dist", dist)

    def __eq__(self, other):
        if not isinstance(other, ProbCausalModel):
            return NotImplemented
        return self.model == other.model and self.dist == other.dist

    def with_dist(self, dist: BackgroundDist) -> ProbCausalModel:
        return ProbCausalModel(self.model, dist)

    def with_model(self, model: CausalModel) -> ProbCausalModel:
        return ProbCausalModel(model, self.dist)
