"""Role annotations on a probabilistic causal model.

An analysis frame has the canonical shape
``Xh = X, Ah_j = A_j, O = s(Xh, Ah, R)``: a sensitive background attribute X
fed through an identity input Xh, other attributes A fed through Ah, optional
fresh randomness R read only by the system, and the system output O.
A database frame is the same thing with the sensitive/other split left open:
rows ``Dh_i = D_i`` and ``O = s(Dh, R)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from caudit.errors import FrameError
from caudit.scm import (
    BACKGROUND,
    BOT,
    ENDOGENOUS,
    CausalModel,
    ProbCausalModel,
    StructuralEquation,
    validate_model,
)

BOT_IS_VALUE = "value"
BOT_MEANS_REMOVED = "removed"


def _identity_input(m: CausalModel, source: str) -> str:
    found = [v for v in m.endogenous if m.equations[v].is_identity_on(source)
             and m.domain(v).values == m.domain(source).values]
    if len(found) != 1:
        raise FrameError(f"expected exactly one endogenous identity copy of {source!r}, found {found}")
    return found[0]


def _check_identity(m: CausalModel, target: str, source: str):
    if m.var(source).role != BACKGROUND:
        raise FrameError(f"{source!r} must be a background variable")
    if m.var(target).role != ENDOGENOUS:
        raise FrameError(f"{target!r} must be an endogenous variable")
    if m.domain(target).values != m.domain(source).values or not m.equations[target].is_identity_on(source):
        raise FrameError(f"{target!r} must be defined as the identity on {source!r}")


def _check_partition(m: CausalModel, background, endogenous):
    if sorted(m.background) != sorted(background):
        raise FrameError(f"frame roles cover background {sorted(background)}, model has {sorted(m.background)}")
    if sorted(m.endogenous) != sorted(endogenous):
        raise FrameError(f"frame roles cover endogenous {sorted(endogenous)}, model has {sorted(m.endogenous)}")


def _check_randomness(m: CausalModel, r: str | None, output: str):
    if r is None:
        return
    if m.var(r).role != BACKGROUND:
        raise FrameError(f"randomness {r!r} must be a background variable")
    if set(m.children(r)) - {output}:
        raise FrameError(f"randomness {r!r} may only be read by the output {output!r}")


@dataclass(frozen=True, eq=False)
class AnalysisFrame:
    pm: ProbCausalModel
    sensitive_bg: str
    other_bg: tuple[str, ...]
    randomness: str | None
    sensitive_in: str
    other_in: tuple[str, ...]
    output: str

    def __post_init__(self):
        object.__setattr__(self, "other_bg", tuple(self.other_bg))
        object.__setattr__(self, "other_in", tuple(self.other_in))
        m = self.model
        if len(self.other_bg) != len(self.other_in):
            raise FrameError("other background attributes and their inputs must pair up")
        bg = [self.sensitive_bg, *self.other_bg] + ([self.randomness] if self.randomness else [])
        en = [self.sensitive_in, *self.other_in, self.output]
        if len(set(bg)) != len(bg) or len(set(en)) != len(en):
            raise FrameError("frame roles must name distinct variables")
        _check_partition(m, bg, en)
        _check_identity(m, self.sensitive_in, self.sensitive_bg)
        for a_in, a in zip(self.other_in, self.other_bg):
            _check_identity(m, a_in, a)
        allowed = {self.sensitive_in, *self.other_in} | ({self.randomness} if self.randomness else set())
        extra = set(m.equations[self.output].parents) - allowed
        if extra:
            raise FrameError(f"output {self.output!r} reads {sorted(extra)}, outside its inputs")
        _check_randomness(m, self.randomness, self.output)

    @classmethod
    def from_model(cls, pm: ProbCausalModel, sensitive: str, others: Sequence[str] = (),
                   randomness: str | None = None, output: str = "O") -> AnalysisFrame:
        """Build a frame naming only background roles; inputs are found by their identity equations."""
        m = pm.model
        for v in [sensitive, *others]:
            if not m.has(v):
                raise FrameError(f"unknown variable {v!r}")
        return cls(pm, sensitive, tuple(others), randomness,
                   _identity_input(m, sensitive), tuple(_identity_input(m, a) for a in others), output)

    @property
    def model(self) -> CausalModel:
        return self.pm.model

    @property
    def randomized(self) -> bool:
        return self.randomness is not None

    @property
    def x_values(self) -> tuple[str, ...]:
        return self.model.domain(self.sensitive_in).values

    @property
    def outputs(self) -> tuple[str, ...]:
        return self.model.domain(self.output).values

    def a_space(self) -> list[tuple[str, ...]]:
        return list(itertools.product(*(self.model.domain(a).values for a in self.other_in)))

    def r_marginal(self) -> dict[str, Fraction]:
        if self.randomness is None:
            return {"": Fraction(1)}
        return self.pm.dist.marginal(self.randomness)

    def system(self, x: str, a: Sequence[str], r: str | None = None) -> str:
        """Evaluate the output table at explicit input values."""
        eq = self.model.equations[self.output]
        binding = {self.sensitive_in: x, **dict(zip(self.other_in, a))}
        if self.randomness is not None:
            binding[self.randomness] = r
        return eq.table[tuple(binding[p] for p in eq.parents)]

    def output_dist(self, x: str, a: Sequence[str], r_dist=None) -> dict[str, Fraction]:
        """Distribution of ``s(x, a, R)`` with R drawn from ``r_dist`` (its marginal by default)."""
        r_dist = self.r_marginal() if r_dist is None else r_dist
        out = {o: Fraction(0) for o in self.outputs}
        for r, p in r_dist.items():
            out[self.system(x, a, r or None)] += p
        return out

    def with_pm(self, pm: ProbCausalModel) -> AnalysisFrame:
        return AnalysisFrame(pm, self.sensitive_bg, self.other_bg, self.randomness,
                             self.sensitive_in, self.other_in, self.output)


def compact(db: Sequence[str]) -> tuple[str, ...]:
    """Present rows first in their original order, absent (BOT) rows after."""
    return tuple(v for v in db if v != BOT) + tuple(v for v in db if v == BOT)


@dataclass(frozen=True, eq=False)
class DatabaseFrame:
    """Rows ``Dh_i = D_i`` feeding ``O = s(Dh, R)``.

    ``bot_mode`` fixes how BOT in a row is read.  ``value``: BOT is one more
    row value and the table is used as written.  ``removed``: BOT means the
    row is absent, and the system is evaluated on the shorter database, i.e.
    on the compacted row tuple with present rows first.
    """

    pm: ProbCausalModel
    rows_bg: tuple[str, ...]
    rows: tuple[str, ...]
    randomness: str | None
    output: str
    bot_mode: str = BOT_IS_VALUE

    def __post_init__(self):
        object.__setattr__(self, "rows_bg", tuple(self.rows_bg))
        object.__setattr__(self, "rows", tuple(self.rows))
        m = self.model
        if self.bot_mode not in (BOT_IS_VALUE, BOT_MEANS_REMOVED):
            raise FrameError(f"unknown bot mode {self.bot_mode!r}")
        if not self.rows or len(self.rows) != len(self.rows_bg):
            raise FrameError("a database frame needs one input per row")
        bg = [*self.rows_bg] + ([self.randomness] if self.randomness else [])
        en = [*self.rows, self.output]
        if len(set(bg)) != len(bg) or len(set(en)) != len(en):
            raise FrameError("frame roles must name distinct variables")
        _check_partition(m, bg, en)
        for d_in, d in zip(self.rows, self.rows_bg):
            _check_identity(m, d_in, d)
            if not m.domain(d).has_bot:
                raise FrameError(f"row domain of {d!r} must contain {BOT}")
        allowed = set(self.rows) | ({self.randomness} if self.randomness else set())
        extra = set(m.equations[self.output].parents) - allowed
        if extra:
            raise FrameError(f"output {self.output!r} reads {sorted(extra)}, outside rows and randomness")
        _check_randomness(m, self.randomness, self.output)
        if self.bot_mode == BOT_MEANS_REMOVED:
            doms = {m.domain(d).values for d in self.rows}
            if len(doms) != 1:
                raise FrameError("bot-means-removed needs every row to share one domain")

    @classmethod
    def from_model(cls, pm: ProbCausalModel, rows: Sequence[str], randomness: str | None = None,
                   output: str = "O", bot_mode: str = BOT_IS_VALUE) -> DatabaseFrame:
        m = pm.model
        return cls(pm, tuple(rows), tuple(_identity_input(m, d) for d in rows), randomness, output, bot_mode)

    @property
    def model(self) -> CausalModel:
        return self.pm.model

    @property
    def outputs(self) -> tuple[str, ...]:
        return self.model.domain(self.output).values

    def databases(self) -> list[tuple[str, ...]]:
        return list(itertools.product(*(self.model.domain(d).values for d in self.rows)))

    def effective(self, db: Sequence[str]) -> tuple[str, ...]:
        """Row tuple the table is actually evaluated on."""
        return compact(db) if self.bot_mode == BOT_MEANS_REMOVED else tuple(db)

    def system(self, db: Sequence[str], r: str | None = None) -> str:
        eq = self.model.equations[self.output]
        binding = dict(zip(self.rows, self.effective(db)))
        if self.randomness is not None:
            binding[self.randomness] = r
        return eq.table[tuple(binding[p] for p in eq.parents)]

    def effective_pm(self) -> ProbCausalModel:
        """The model with BOT semantics folded into the output table."""
        if self.bot_mode == BOT_IS_VALUE:
            return self.pm
        m = self.model
        parents = list(self.rows) + ([self.randomness] if self.randomness else [])
        doms = [m.domain(p) for p in parents]
        k = len(self.rows)

        def fn(*vals):
            return self.system(vals[:k], vals[k] if self.randomness else None)

        eqs = dict(m.equations)
        eqs[self.output] = StructuralEquation.from_function(self.output, parents, doms, fn)
        return ProbCausalModel(validate_model(CausalModel(m.variables, eqs)), self.pm.dist)

    def row_frame(self, i: int) -> AnalysisFrame:
        """Row ``i`` as the sensitive attribute, the remaining rows as other inputs."""
        pm = self.effective_pm()
        others = [j for j in range(len(self.rows)) if j != i]
        return AnalysisFrame(pm, self.rows_bg[i], tuple(self.rows_bg[j] for j in others), self.randomness,
                             self.rows[i], tuple(self.rows[j] for j in others), self.output)
