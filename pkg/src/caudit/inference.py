"""Exact probability queries by enumerating the background support.

Every support point is one world.  Worlds are evaluated once per
intervention and cached on the model; a probability is then a ratio of
integer weight sums, where the weights are the support probabilities scaled
to a common denominator.  Nothing here touches floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from caudit import kernels
from caudit.errors import InconsistentContext, UnknownVariable
from caudit.prop import TRUE, Proposition, compile_prop
from caudit.scm import BACKGROUND, ProbCausalModel, intervene

ONE = Fraction(1)
ZERO = Fraction(0)


class _Infinite:
    """Ratio p/0 with p > 0.  Orders above every rational."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INFINITE"

    def __str__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("caudit.INFINITE")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __mul__(self, other):
        return self

    __rmul__ = __mul__

    def __pow__(self, n):
        return self

    def __reduce__(self):
        return (_Infinite, ())


class _Vacuous:
    """Ratio 0/0: the comparison says nothing and is skipped."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "VACUOUS"

    def __reduce__(self):
        return (_Vacuous, ())


INFINITE = _Infinite()
VACUOUS = _Vacuous()


def ratio_bound(p: Fraction, q: Fraction):
    """Smallest k with ``p <= k*q``: exact p/q, INFINITE for p/0, VACUOUS for 0/0."""
    if p < 0 or q < 0:
        raise ValueError("ratio_bound needs nonnegative arguments")
    if q == 0:
        return VACUOUS if p == 0 else INFINITE
    return Fraction(p) / Fraction(q)


def max_ratio(ratios: Iterable, start=ONE):
    """Maximum of ratio values, ignoring VACUOUS."""
    best = start
    for r in ratios:
        if r is VACUOUS:
            continue
        if r > best:
            best = r
    return best


def within(ratio, bound) -> bool:
    if ratio is VACUOUS:
        return True
    if ratio is INFINITE:
        return bound is INFINITE
    return ratio <= bound


@dataclass(frozen=True)
class QueryContext:
    """Interventions are applied first, then the conditions are observed."""

    interventions: Mapping[str, str] = field(default_factory=dict)
    conditions: Proposition = TRUE

    @classmethod
    def of(cls, do: Mapping[str, str] | None = None, given: Proposition | None = None) -> QueryContext:
        return cls(dict(do or {}), TRUE if given is None else given)


EMPTY = QueryContext()


@dataclass(frozen=True)
class WorldTable:
    """Evaluated worlds of one (possibly intervened) model."""

    model: object
    worlds: np.ndarray
    weights: np.ndarray
    total: int

    def mask(self, phi: Proposition) -> np.ndarray:
        code, depth = compile_prop(phi, self.model)
        return kernels.eval_prop(self.worlds, code, depth)

    def mass(self, mask: np.ndarray) -> int:
        return kernels.masked_sum(self.weights, mask)

    def joint(self, vids: Sequence[str], mask: np.ndarray | None = None) -> dict[tuple[str, ...], int]:
        """Integer weight of every joint value of ``vids`` inside ``mask``."""
        m = self.model
        cols, radices, sizes = [], [], []
        size = 1
        for v in reversed(vids):
            if not m.has(v):
                raise UnknownVariable(f"unknown variable {v!r}")
            cols.append(m.columns[v])
            radices.append(size)
            sizes.append(len(m.domain(v)))
            size *= len(m.domain(v))
        if mask is None:
            mask = np.ones(len(self.worlds), dtype=np.uint8)
        hist = kernels.joint_histogram(
            self.worlds, np.asarray(cols[::-1], dtype=np.int64), np.asarray(radices[::-1], dtype=np.int64),
            self.weights, mask, size)
        doms = [m.domain(v).values for v in vids]
        return {combo: int(w) for combo, w in zip(itertools.product(*doms), hist)}


def _common_weights(pm: ProbCausalModel):
    probs = list(pm.dist.support.values())
    denom = 1
    for p in probs:
        denom = math.lcm(denom, p.denominator)
    ints = [p.numerator * (denom // p.denominator) for p in probs]
    dtype = np.int64 if denom < (1 << 62) else object
    return np.array(ints, dtype=dtype), denom


def world_table(pm: ProbCausalModel, do: Mapping[str, str] | None = None) -> WorldTable:
    key = tuple(sorted((do or {}).items()))
    cache = pm._cache
    hit = cache.get(("worlds", key))
    if hit is not None:
        return hit
    base = cache.get(("base",))
    if base is None:
        weights, total = _common_weights(pm)
        m = pm.model
        bg = m.background
        doms = [m.domain(v) for v in bg]
        rows = [[d.index(val) for d, val in zip(doms, k)] for k in pm.dist.support]
        base = (weights, total, np.asarray(rows, dtype=np.int64).reshape(len(rows), len(bg)))
        cache[("base",)] = base
    weights, total, bg_rows = base
    model = intervene(pm.model, dict(key)) if key else pm.model
    worlds = np.zeros((len(bg_rows), len(model.order)), dtype=np.int64)
    worlds[:, :bg_rows.shape[1]] = bg_rows
    kernels.evaluate_worlds(worlds, model.program)
    table = WorldTable(model, worlds, weights, total)
    cache[("worlds", key)] = table
    return table


def _conditioned(pm, ctx: QueryContext | None):
    ctx = ctx or EMPTY
    table = world_table(pm, ctx.interventions)
    cond = table.mask(ctx.conditions)
    cond_mass = table.mass(cond)
    if cond_mass == 0:
        raise InconsistentContext(f"conditioning event {ctx.conditions} has probability zero")
    return table, cond, cond_mass


def probability(pm: ProbCausalModel, ctx: QueryContext | None, phi: Proposition) -> Fraction:
    """Pr[phi | do(interventions), conditions] as an exact rational."""
    table, cond, cond_mass = _conditioned(pm, ctx)
    hit = table.mass(table.mask(phi) & cond)
    return Fraction(hit, cond_mass)


def mass(pm: ProbCausalModel, phi: Proposition, do: Mapping[str, str] | None = None) -> Fraction:
    """Unconditional probability of ``phi`` (zero allowed)."""
    table = world_table(pm, do)
    return Fraction(table.mass(table.mask(phi)), table.total)


def distribution(pm: ProbCausalModel, ctx: QueryContext | None, v: str) -> dict[str, Fraction]:
    table, cond, cond_mass = _conditioned(pm, ctx)
    hist = table.joint([v], cond)
    return {k[0]: Fraction(w, cond_mass) for k, w in hist.items()}


def joint_distribution(pm: ProbCausalModel, ctx: QueryContext | None,
                       vids: Sequence[str]) -> dict[tuple[str, ...], Fraction]:
    table, cond, cond_mass = _conditioned(pm, ctx)
    return {k: Fraction(w, cond_mass) for k, w in table.joint(list(vids), cond).items()}


def conditional_table(pm: ProbCausalModel, given: Sequence[str], target: str,
                      do: Mapping[str, str] | None = None):
    """Pr[target | given] for every positive-mass value of ``given``.

    Returns ``{given_value: {target_value: Fraction}}`` plus the marginal
    of ``given`` (zero-mass values included with probability 0).
    """
    table = world_table(pm, do)
    joint = table.joint(list(given) + [target])
    n = len(given)
    marg: dict[tuple, int] = {}
    for k, w in joint.items():
        marg[k[:n]] = marg.get(k[:n], 0) + w
    cond = {}
    for k, w in joint.items():
        g = k[:n]
        if marg[g]:
            cond.setdefault(g, {})[k[n]] = Fraction(w, marg[g])
    return cond, {g: Fraction(w, table.total) for g, w in marg.items()}


def independent(pm: ProbCausalModel, lhs: Iterable[str], rhs: Iterable[str]) -> bool:
    """True iff the joint of ``lhs`` and ``rhs`` factorizes exactly."""
    lhs, rhs = list(lhs), list(rhs)
    if not lhs or not rhs:
        return True
    table = world_table(pm)
    joint = table.joint(lhs + rhs)
    n = len(lhs)
    left: dict[tuple, int] = {}
    right: dict[tuple, int] = {}
    for k, w in joint.items():
        left[k[:n]] = left.get(k[:n], 0) + w
        right[k[n:]] = right.get(k[n:], 0) + w
    total = table.total
    for k, w in joint.items():
        lw, rw = left[k[:n]], right[k[n:]]
        if lw and rw and w * total != lw * rw:
            return False
    return True


def is_fresh(pm: ProbCausalModel, r: str, marginal: Mapping[str, object]) -> bool:
    """R is independent of all other background variables and has the declared marginal."""
    m = pm.model
    if m.var(r).role != BACKGROUND:
        raise UnknownVariable(f"{r!r} is not a background variable")
    declared = {k: Fraction(v) for k, v in marginal.items() if Fraction(v) != 0}
    actual = {k: p for k, p in pm.dist.marginal(r).items() if p}
    if declared != actual:
        return False
    others = [v for v in m.background if v != r]
    return independent(pm, [r], others)
