"""Deciders for the causal and associative privacy / nondiscrimination properties.

Every checker measures the tightest ratio bound ``k`` (the exact stand-in for
``e^eps``) a frame satisfies and reports whether it is within the requested
bound.  Comparisons with 0/0 are skipped.  When a check fails the report
carries the first violating comparison in domain declaration order, as two
probability queries that can be re-run independently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from caudit.errors import DegenerateSensitive, DomainMismatch, InvalidMetric, RandomnessNotFresh
from caudit.frames import AnalysisFrame, DatabaseFrame
from caudit.inference import (
    INFINITE,
    ONE,
    VACUOUS,
    QueryContext,
    conditional_table,
    distribution,
    is_fresh,
    probability,
    ratio_bound,
    within,
)
from caudit.prop import TRUE, Proposition, eq
from caudit.scm import KNOWLEDGE, ProbCausalModel

FOUR_FIFTHS_BOUND = Fraction(5, 4)


@dataclass(frozen=True)
class Side:
    """One probability query: ``Pr[event | do(do), given]``."""

    event: Proposition
    probability: Fraction
    given: Proposition = TRUE
    do: Mapping[str, str] = field(default_factory=dict)

    def recompute(self, pm: ProbCausalModel) -> Fraction:
        return probability(pm, QueryContext.of(self.do, self.given), self.event)

    def to_dict(self) -> dict:
        return {
            "event": str(self.event),
            "given": str(self.given),
            "do": dict(self.do),
            "probability": _frac_text(self.probability),
        }


@dataclass(frozen=True)
class Witness:
    """A comparison ``left <= bound * right`` that fails."""

    left: Side
    right: Side
    bound: Fraction
    labels: Mapping[str, object]

    def violates(self, p: Fraction | None = None, q: Fraction | None = None) -> bool:
        p = self.left.probability if p is None else p
        q = self.right.probability if q is None else q
        return p > self.bound * q

    def reverify(self, pm: ProbCausalModel) -> bool:
        """Recompute both probabilities from the model; True iff they match and still violate."""
        p, q = self.left.recompute(pm), self.right.recompute(pm)
        return p == self.left.probability and q == self.right.probability and self.violates(p, q)

    def to_dict(self) -> dict:
        return {
            "labels": {k: (dict(v) if isinstance(v, Mapping) else v) for k, v in self.labels.items()},
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
            "bound": _frac_text(self.bound),
        }


@dataclass(frozen=True)
class PropertyReport:
    property: str
    holds: bool
    tightest_ratio: object
    bound: object = ONE
    witness: Witness | None = None
    notes: tuple[str, ...] = ()
    reading: str = "frequentist"

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "holds": self.holds,
            "tightest_ratio": ratio_text(self.tightest_ratio),
            "bound": ratio_text(self.bound),
            "witness": self.witness.to_dict() if self.witness else None,
            "notes": list(self.notes),
            "reading": self.reading,
        }


def _frac_text(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def ratio_text(r) -> str:
    if r is INFINITE:
        return "inf"
    if r is VACUOUS:
        return "vacuous"
    return _frac_text(Fraction(r))


def _reading(pm: ProbCausalModel) -> str:
    return "bayesian" if pm.dist.kind == KNOWLEDGE else "frequentist"


# a comparison: labels, p, q, and a thunk building the two query sides
Comparison = tuple[dict, Fraction, Fraction, Callable[[], tuple[Side, Side]]]


def _sweep(comparisons: Iterable[Comparison], bound):
    tightest = ONE
    witness = None
    for labels, p, q, sides in comparisons:
        r = ratio_bound(p, q)
        if r is VACUOUS:
            continue
        if r > tightest:
            tightest = r
        if witness is None and not within(r, bound):
            left, right = sides()
            witness = Witness(left, right, Fraction(bound), labels)
    return tightest, witness


def _report(name, pm, tightest, bound, witness, notes=()) -> PropertyReport:
    return PropertyReport(name, within(tightest, bound), tightest, bound, witness, tuple(notes), _reading(pm))


def _bound(bound) -> Fraction:
    bound = Fraction(bound)
    if bound < 1:
        raise ValueError(f"ratio bound must be at least 1, got {bound}")
    return bound


def require_fresh(pm: ProbCausalModel, r: str | None):
    if r is not None and not is_fresh(pm, r, pm.dist.marginal(r)):
        raise RandomnessNotFresh(f"randomness {r!r} is correlated with other background variables")


def _ni_comparisons(f: AnalysisFrame) -> Iterable[Comparison]:
    r_dist = f.r_marginal()
    a_space = f.a_space()
    dists = {(x, a): f.output_dist(x, a, r_dist) for x in f.x_values for a in a_space}
    for x1, x2 in itertools.permutations(f.x_values, 2):
        for a in a_space:
            for o in f.outputs:
                p, q = dists[(x1, a)][o], dists[(x2, a)][o]

                def sides(x1=x1, x2=x2, a=a, o=o, p=p, q=q):
                    do_a = dict(zip(f.other_in, a))
                    return (Side(eq(f.output, o), p, do={f.sensitive_in: x1, **do_a}),
                            Side(eq(f.output, o), q, do={f.sensitive_in: x2, **do_a}))

                yield {"x1": x1, "x2": x2, "a": dict(zip(f.other_in, a)), "o": o}, p, q, sides


def check_noninterference(f: AnalysisFrame) -> PropertyReport:
    """Output table (or output distribution over R) never depends on the sensitive input."""
    tightest, witness = _sweep(_ni_comparisons(f), ONE)
    return _report("noninterference", f.pm, tightest, ONE, witness)


def measure_noninterference(f: AnalysisFrame, bound=ONE, *, fresh_required: bool = True) -> PropertyReport:
    """Tightest k with Fr[s(x1,a,R)=o] <= k Fr[s(x2,a,R)=o] for all x1, x2, a, o.

    R is drawn from its marginal under the frame's distribution.  With
    ``fresh_required`` (the default) a correlated R is an error.
    """
    bound = _bound(bound)
    if fresh_required:
        require_fresh(f.pm, f.randomness)
    tightest, witness = _sweep(_ni_comparisons(f), bound)
    notes = [] if f.randomized else ["deterministic system: trivial randomness"]
    return _report("eps-noninterference", f.pm, tightest, bound, witness, notes)


def interventional_dists(f: AnalysisFrame) -> dict[str, dict[str, Fraction]]:
    return {x: distribution(f.pm, QueryContext.of({f.sensitive_in: x}), f.output) for x in f.x_values}


def _causal_comparisons(f: AnalysisFrame, dists) -> Iterable[Comparison]:
    for x1, x2 in itertools.permutations(f.x_values, 2):
        for o in f.outputs:
            p, q = dists[x1][o], dists[x2][o]

            def sides(x1=x1, x2=x2, o=o, p=p, q=q):
                return (Side(eq(f.output, o), p, do={f.sensitive_in: x1}),
                        Side(eq(f.output, o), q, do={f.sensitive_in: x2}))

            yield {"x1": x1, "x2": x2, "o": o}, p, q, sides


def check_causal_irrelevance(f: AnalysisFrame, bound=ONE) -> PropertyReport:
    """Compare Pr[O=o | do(Xh=x)] across sensitive input values."""
    bound = _bound(bound)
    tightest, witness = _sweep(_causal_comparisons(f, interventional_dists(f)), bound)
    return _report("causal-irrelevance", f.pm, tightest, bound, witness)


def _assoc_comparisons(f: AnalysisFrame, cond) -> Iterable[Comparison]:
    xs = [x for x in f.x_values if (x,) in cond]
    for x1, x2 in itertools.permutations(xs, 2):
        for o in f.outputs:
            p, q = cond[(x1,)][o], cond[(x2,)][o]

            def sides(x1=x1, x2=x2, o=o, p=p, q=q):
                return (Side(eq(f.output, o), p, given=eq(f.sensitive_bg, x1)),
                        Side(eq(f.output, o), q, given=eq(f.sensitive_bg, x2)))

            yield {"x1": x1, "x2": x2, "o": o}, p, q, sides


def check_assoc_independence(f: AnalysisFrame, bound=ONE) -> PropertyReport:
    """Compare Pr[O=o | X=x] across positive-mass values of the sensitive attribute."""
    bound = _bound(bound)
    cond, _ = conditional_table(f.pm, [f.sensitive_bg], f.output)
    notes = []
    if len(cond) < 2:
        notes.append("sensitive attribute has a single-point support; property holds vacuously")
    tightest, witness = _sweep(_assoc_comparisons(f, cond), bound)
    return _report("assoc-independence", f.pm, tightest, bound, witness, notes)


def _assoc_x_comparisons(f: AnalysisFrame, posterior, prior) -> Iterable[Comparison]:
    for o in f.outputs:
        if (o,) not in posterior:
            continue
        for x in f.x_values:
            post, pri = posterior[(o,)][x], prior[(x,)]
            ev = eq(f.sensitive_bg, x)

            def up(o=o, ev=ev, post=post, pri=pri):
                return Side(ev, post, given=eq(f.output, o)), Side(ev, pri)

            def down(o=o, ev=ev, post=post, pri=pri):
                return Side(ev, pri), Side(ev, post, given=eq(f.output, o))

            yield {"o": o, "x": x, "direction": "posterior/prior"}, post, pri, up
            yield {"o": o, "x": x, "direction": "prior/posterior"}, pri, post, down


def check_assoc_independence_on_X(f: AnalysisFrame, bound=ONE) -> PropertyReport:
    """Compare the posterior Pr[X=x | O=o] with the prior Pr[X=x], both directions."""
    bound = _bound(bound)
    posterior, _ = conditional_table(f.pm, [f.output], f.sensitive_bg)
    prior = f.pm.dist.marginal(f.sensitive_bg)
    prior = {(x,): prior.get(x, Fraction(0)) for x in f.x_values}
    tightest, witness = _sweep(_assoc_x_comparisons(f, posterior, prior), bound)
    return _report("assoc-independence-on-X", f.pm, tightest, bound, witness)


def selection_rates(f: AnalysisFrame, positive: str) -> dict[str, Fraction]:
    """Pr[O=positive | X=x] for every positive-mass group x, in domain order."""
    if positive not in f.model.domain(f.output):
        raise DomainMismatch(f"{positive!r} is not an output value")
    cond, _ = conditional_table(f.pm, [f.sensitive_bg], f.output)
    return {x: cond[(x,)][positive] for x in f.x_values if (x,) in cond}


def check_80_rule(f: AnalysisFrame, positive: str) -> PropertyReport:
    """Four-fifths rule on the positive outcome: min selection rate >= 4/5 of the max."""
    rates = selection_rates(f, positive)
    if len(rates) < 2:
        raise DegenerateSensitive("the four-fifths rule needs at least two groups with positive mass")
    hi = max(rates.values())
    lo = min(rates.values())
    x_hi = next(x for x, r in rates.items() if r == hi)
    x_lo = next(x for x, r in rates.items() if r == lo)
    tightest = ratio_bound(hi, lo)
    if tightest is VACUOUS:
        tightest = ONE
    witness = None
    if not within(tightest, FOUR_FIFTHS_BOUND):
        ev = eq(f.output, positive)
        witness = Witness(Side(ev, hi, given=eq(f.sensitive_bg, x_hi)),
                          Side(ev, lo, given=eq(f.sensitive_bg, x_lo)),
                          FOUR_FIFTHS_BOUND, {"x_max": x_hi, "x_min": x_lo, "o": positive})
    full = check_assoc_independence(f, FOUR_FIFTHS_BOUND)
    rate_text = ", ".join(f"{x}: {_frac_text(r)}" for x, r in rates.items())
    notes = [f"selection rates for {positive}: {rate_text}",
             f"all-outcome associative independence at 5/4: {'holds' if full.holds else 'fails'} "
             f"(ratio {ratio_text(full.tightest_ratio)})"]
    if full.holds != within(tightest, FOUR_FIFTHS_BOUND):
        notes.append("positive-outcome rule and all-outcome associative check disagree")
    return _report("80-percent-rule", f.pm, tightest, FOUR_FIFTHS_BOUND, witness, notes)


def validate_metric(f: AnalysisFrame, metric: Mapping[tuple[str, str], object]) -> dict[tuple[str, str], Fraction]:
    """Exponentiated metric k(x, y) = e^d(x, y): total, symmetric, 1 on the diagonal, >= 1."""
    xs = f.x_values
    out = {}
    for x, y in itertools.product(xs, xs):
        if (x, y) in metric:
            k = metric[(x, y)]
        elif (y, x) in metric:
            k = metric[(y, x)]
        elif x == y:
            k = 1
        else:
            raise InvalidMetric(f"metric has no entry for ({x}, {y})")
        if isinstance(k, float):
            raise InvalidMetric("metric bounds must be exact rationals")
        k = Fraction(k)
        if x == y and k != 1:
            raise InvalidMetric(f"metric must be 1 on the diagonal, got {k} at ({x}, {x})")
        if k < 1:
            raise InvalidMetric(f"metric bound {k} at ({x}, {y}) is below 1")
        out[(x, y)] = k
    for (x, y), k in out.items():
        if out[(y, x)] != k:
            raise InvalidMetric(f"metric is not symmetric at ({x}, {y})")
    extra = set(metric) - set(out)
    if extra:
        raise InvalidMetric(f"metric mentions values outside the input domain: {sorted(extra)}")
    return out


def check_lipschitz(f: AnalysisFrame, metric: Mapping[tuple[str, str], object]) -> PropertyReport:
    """Pr[O=o | do(Xh=x)] <= k(x, y) Pr[O=o | do(Xh=y)] for all x, y, o.

    The reported ratio is the largest p / (k(x, y) q); the property holds iff it is at most 1.
    """
    k = validate_metric(f, metric)
    dists = interventional_dists(f)
    tightest = ONE
    witness = None
    for x, y in itertools.permutations(f.x_values, 2):
        for o in f.outputs:
            p, q = dists[x][o], dists[y][o]
            r = ratio_bound(p, k[(x, y)] * q)
            if r is VACUOUS:
                continue
            tightest = max(tightest, r) if r is not INFINITE else INFINITE
            if witness is None and not within(r, ONE):
                witness = Witness(Side(eq(f.output, o), p, do={f.sensitive_in: x}),
                                  Side(eq(f.output, o), q, do={f.sensitive_in: y}),
                                  k[(x, y)], {"x": x, "y": y, "o": o})
    notes = ["ratio is the worst slack p / (k(x,y) q); 1 means every pair is within its metric bound"]
    return _report("lipschitz", f.pm, tightest, ONE, witness, notes)


def _dp_comparisons(df: DatabaseFrame) -> Iterable[Comparison]:
    m = df.model
    r_dist = df.pm.dist.marginal(df.randomness) if df.randomness else {None: Fraction(1)}
    doms = [m.domain(d).values for d in df.rows]
    cache: dict[tuple, dict[str, Fraction]] = {}

    def dist(db):
        if db not in cache:
            out = {o: Fraction(0) for o in df.outputs}
            for r, p in r_dist.items():
                out[df.system(db, r)] += p
            cache[db] = out
        return cache[db]

    for i, row in enumerate(df.rows):
        other_doms = doms[:i] + doms[i + 1:]
        for rest in itertools.product(*other_doms):
            for x1, x2 in itertools.permutations(doms[i], 2):
                db1 = rest[:i] + (x1,) + rest[i:]
                db2 = rest[:i] + (x2,) + rest[i:]
                d1, d2 = dist(db1), dist(db2)
                for o in df.outputs:
                    p, q = d1[o], d2[o]

                    def sides(db1=db1, db2=db2, o=o, p=p, q=q):
                        return (Side(eq(df.output, o), p, do=dict(zip(df.rows, df.effective(db1)))),
                                Side(eq(df.output, o), q, do=dict(zip(df.rows, df.effective(db2)))))

                    others = {df.rows[j]: v for j, v in zip([j for j in range(len(df.rows)) if j != i], rest)}
                    yield {"row": row, "x1": x1, "x2": x2, "others": others, "o": o}, p, q, sides


def check_differential_privacy(df: DatabaseFrame, bound=ONE) -> PropertyReport:
    """Bounded differential privacy: per-row eps-noninterference over all neighbouring databases."""
    bound = _bound(bound)
    require_fresh(df.pm, df.randomness)
    tightest, witness = _sweep(_dp_comparisons(df), bound)
    notes = [f"bot mode: {df.bot_mode}"]
    return _report("differential-privacy", df.pm, tightest, bound, witness, notes)
