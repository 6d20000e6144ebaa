"""Canonical fixture systems.

Randomness is always a fresh background variable ``R`` with rational masses,
so every fixture property is decided exactly.  Variable names follow one
convention: background ``X``, ``A...``, ``R``; inputs ``Xh``, ``Ah...``;
output ``O``.  Database fixtures use rows ``D1..Dk`` with inputs ``Dh1..Dhk``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from caudit.errors import InvalidParameter, InvalidPrior
from caudit.frames import BOT_IS_VALUE, AnalysisFrame, DatabaseFrame
from caudit.inference import INFINITE, ONE
from caudit.prop import Proposition, disj, conj, eq
from caudit.scm import (
    BACKGROUND,
    BOT,
    ENDOGENOUS,
    BackgroundDist,
    CausalModel,
    Domain,
    ProbCausalModel,
    StructuralEquation,
    Variable,
    validate_model,
)

UNIT = Domain("Unit", ("none",))


def _uniform(values: Sequence[str]) -> dict[str, Fraction]:
    return {v: Fraction(1, len(values)) for v in values}


def _prior(values: Sequence[str], prior: Mapping[str, object] | None) -> dict[str, Fraction]:
    if prior is None:
        return _uniform(values)
    if any(isinstance(p, float) for p in prior.values()):
        raise InvalidPrior("prior probabilities must be exact rationals")
    prior = {str(k): Fraction(p) for k, p in prior.items()}
    if set(prior) != set(values):
        raise InvalidPrior(f"prior must cover exactly {list(values)}")
    if any(p <= 0 for p in prior.values()):
        raise InvalidPrior("prior entries must be positive")
    if sum(prior.values()) != 1:
        raise InvalidPrior("prior must sum to 1")
    return {v: prior[v] for v in values}


def _rational(p, name: str) -> Fraction:
    if isinstance(p, float):
        raise InvalidParameter(f"{name} must be an exact rational")
    return Fraction(p)


def assemble_frame(
    x_domain: Domain,
    others: Sequence[tuple[str, Domain]],
    r_domain: Domain | None,
    o_domain: Domain,
    system: Callable[..., str],
    dist: BackgroundDist,
    *,
    reads: Sequence[str] | None = None,
) -> AnalysisFrame:
    """Build the canonical ``Xh=X, Ah=A, O=s(Xh, Ah, R)`` frame.

    ``system(x, *a, r)`` gives the output (``r`` only when ``r_domain`` is
    set).  ``reads`` restricts which inputs the output equation lists as
    parents; the system is then called with only those values, in the order
    X, A..., R.
    """
    names = ["Xh"] + [f"{a}h" for a, _ in others] + (["R"] if r_domain else [])
    doms = [x_domain] + [d for _, d in others] + ([r_domain] if r_domain else [])
    reads = names if reads is None else [n for n in names if n in set(reads)]
    vs = [Variable("X", BACKGROUND, x_domain)]
    vs += [Variable(a, BACKGROUND, d) for a, d in others]
    if r_domain:
        vs.append(Variable("R", BACKGROUND, r_domain))
    vs.append(Variable("Xh", ENDOGENOUS, x_domain))
    vs += [Variable(f"{a}h", ENDOGENOUS, d) for a, d in others]
    vs.append(Variable("O", ENDOGENOUS, o_domain))
    eqs = [StructuralEquation.identity("Xh", "X", x_domain)]
    eqs += [StructuralEquation.identity(f"{a}h", a, d) for a, d in others]
    eqs.append(StructuralEquation.from_function("O", reads, [doms[names.index(n)] for n in reads], system))
    model = validate_model(CausalModel(tuple(vs), {e.target: e for e in eqs}))
    pm = ProbCausalModel(model, dist)
    return AnalysisFrame(pm, "X", tuple(a for a, _ in others), "R" if r_domain else None,
                         "Xh", tuple(f"{a}h" for a, _ in others), "O")


# -- Appendix-style positivity system ---------------------------------------

APPENDIX_X = Domain("Num", ("0", "1", "2"))
APPENDIX_O = Domain("Sign", ("nonpositive", "positive"))


def even_x() -> Proposition:
    return disj(eq("X", "0"), eq("X", "2"))


def appendix_model(prior: Mapping[str, object] | None = None) -> AnalysisFrame:
    """``s(x, a) = pos(x)`` over x in {0, 1, 2} with a dummy other input."""
    p = _prior(APPENDIX_X.values, prior)
    dist = BackgroundDist.product({"X": p, "A": {"none": 1}})
    return assemble_frame(APPENDIX_X, [("A", UNIT)], None, APPENDIX_O,
                          lambda x, a: "positive" if int(x) > 0 else "nonpositive", dist)


# -- randomized response -----------------------------------------------------

BIT = Domain("Bit", ("0", "1"))
COIN = Domain("Coin", ("keep", "flip"))


def randomized_response(flip, prior: Mapping[str, object] | None = None) -> AnalysisFrame:
    """Report the bit X, flipped with probability ``flip`` (0 < flip < 1/2)."""
    flip = _rational(flip, "flip")
    if not 0 < flip < Fraction(1, 2):
        raise InvalidParameter(f"flip must lie strictly between 0 and 1/2, got {flip}")
    dist = BackgroundDist.product({"X": _prior(BIT.values, prior), "A": {"none": 1},
                                   "R": {"keep": 1 - flip, "flip": flip}})

    def s(x, a, r):
        return x if r == "keep" else str(1 - int(x))

    return assemble_frame(BIT, [("A", UNIT)], COIN, BIT, s, dist)


# -- hiring ------------------------------------------------------------------

DECISION = Domain("Decision", ("hire", "reject"))


def hiring_model(rates: Mapping[str, object], group_weights: Mapping[str, object] | None = None) -> AnalysisFrame:
    """Group X is hired with probability ``rates[X]``.

    R ranges over the intervals between consecutive distinct rates in [0, 1];
    group g is hired when R falls in an interval below its rate.
    """
    groups = [str(g) for g in rates]
    if len(groups) < 1:
        raise InvalidParameter("need at least one group")
    rate = {str(g): _rational(r, "rate") for g, r in rates.items()}
    if any(not 0 <= r <= 1 for r in rate.values()):
        raise InvalidParameter("rates must lie in [0, 1]")
    try:
        weights = _prior(groups, group_weights)
    except InvalidPrior as e:
        raise InvalidParameter(str(e)) from None
    cuts = sorted({Fraction(0), Fraction(1), *rate.values()})
    cells = {f"u{i}": hi - lo for i, (lo, hi) in enumerate(zip(cuts, cuts[1:]), start=1)}
    upper = {f"u{i}": hi for i, hi in enumerate(cuts[1:], start=1)}
    group_dom = Domain("Group", tuple(groups))
    r_dom = Domain("Threshold", tuple(cells))
    dist = BackgroundDist.product({"X": weights, "A": {"none": 1}, "R": cells})

    def s(x, a, r):
        return "hire" if upper[r] <= rate[x] else "reject"

    return assemble_frame(group_dom, [("A", UNIT)], r_dom, DECISION, s, dist)


# -- database release --------------------------------------------------------

ROW = Domain("Row", ("0", "1", BOT))
AGGREGATES = ("identity", "sum", "parity")


def database_release(k: int, per_row_flip=None, aggregate: str = "identity",
                     bot_mode: str = BOT_IS_VALUE) -> DatabaseFrame:
    """k binary rows (or absent), each row's bit passed through randomized response, then aggregated.

    An absent row contributes the bit 0 before noise.
    """
    if not 1 <= k <= 4:
        raise InvalidParameter("database_release supports 1 to 4 rows")
    if aggregate not in AGGREGATES:
        raise InvalidParameter(f"aggregate must be one of {AGGREGATES}")
    flip = None if per_row_flip is None else _rational(per_row_flip, "per_row_flip")
    if flip is not None and not 0 < flip <= Fraction(1, 2):
        raise InvalidParameter(f"per_row_flip must lie in (0, 1/2], got {flip}")
    rows = [f"D{i}" for i in range(1, k + 1)]
    hats = [f"Dh{i}" for i in range(1, k + 1)]
    if aggregate == "identity":
        o_dom = Domain("Bits", tuple("".join(b) for b in itertools.product("01", repeat=k)))
    elif aggregate == "sum":
        o_dom = Domain("Count", tuple(str(i) for i in range(k + 1)))
    else:
        o_dom = BIT

    def release(bits):
        if aggregate == "identity":
            return "".join(str(b) for b in bits)
        return str(sum(bits)) if aggregate == "sum" else str(sum(bits) % 2)

    marginals = {d: _uniform(ROW.values) for d in rows}
    vs = [Variable(d, BACKGROUND, ROW) for d in rows]
    parents = list(hats)
    doms = [ROW] * k
    if flip is not None:
        r_dom = Domain("Noise", tuple("".join(b) for b in itertools.product("01", repeat=k)))
        marginals["R"] = {pat: flip ** pat.count("1") * (1 - flip) ** pat.count("0") for pat in r_dom.values}
        vs.append(Variable("R", BACKGROUND, r_dom))
        parents.append("R")
        doms.append(r_dom)

    def s(*vals):
        bits = [0 if v == BOT else int(v) for v in vals[:k]]
        if flip is not None:
            bits = [b ^ int(c) for b, c in zip(bits, vals[k])]
        return release(bits)

    vs += [Variable(h, ENDOGENOUS, ROW) for h in hats]
    vs.append(Variable("O", ENDOGENOUS, o_dom))
    eqs = [StructuralEquation.identity(h, d, ROW) for h, d in zip(hats, rows)]
    eqs.append(StructuralEquation.from_function("O", parents, doms, s))
    model = validate_model(CausalModel(tuple(vs), {e.target: e for e in eqs}))
    pm = ProbCausalModel(model, BackgroundDist.product(marginals))
    return DatabaseFrame(pm, tuple(rows), tuple(hats), "R" if flip is not None else None, "O", bot_mode)


# -- average height disclosure -------------------------------------------------

DEFAULT_HEIGHTS = ("60", "62", "64")


def average_disclosure_model(heights: Sequence[str] = DEFAULT_HEIGHTS) -> AnalysisFrame:
    """Target height X and two other heights A1, A2; the output is the mean of A1 and A2.

    The target is not in the averaged group, so the output alone says
    nothing about X.  Heights must be even integers so the mean is integral.
    """
    heights = tuple(str(h) for h in heights)
    if any(int(h) % 2 for h in heights):
        raise InvalidParameter("heights must be even integers")
    h_dom = Domain("Height", heights)
    nums = sorted(int(h) for h in heights)
    means = sorted({(a + b) // 2 for a in nums for b in nums})
    o_dom = Domain("Mean", tuple(str(m) for m in means))
    u = _uniform(heights)
    dist = BackgroundDist.product({"X": u, "A1": u, "A2": u})
    return assemble_frame(h_dom, [("A1", h_dom), ("A2", h_dom)], None, o_dom,
                          lambda a1, a2: str((int(a1) + int(a2)) // 2), dist, reads=["A1h", "A2h"])


def two_below_average(f: AnalysisFrame) -> Proposition:
    """Auxiliary knowledge: the target is exactly two below the released average."""
    parts = [conj(eq("X", x), eq("O", str(int(x) + 2))) for x in f.x_values if str(int(x) + 2) in f.outputs]
    return disj(*parts)


@dataclass(frozen=True)
class DisclosureDemo:
    frame: AnalysisFrame
    phi: Proposition
    background: Proposition
    output: str


def average_disclosure_demo() -> DisclosureDemo:
    f = average_disclosure_model()
    return DisclosureDemo(f, eq("X", "60"), two_below_average(f), "62")


# -- small fixtures ------------------------------------------------------------


def xor_model(prior_x: Mapping[str, object] | None = None) -> AnalysisFrame:
    """Release ``Xh XOR Ah`` for independent uniform bits (X may take a prior override)."""
    dist = BackgroundDist.product({"X": _prior(BIT.values, prior_x), "A": _uniform(BIT.values)})
    return assemble_frame(BIT, [("A", BIT)], None, BIT, lambda x, a: str(int(x) ^ int(a)), dist)


def constant_model() -> AnalysisFrame:
    """A system that always outputs 0."""
    dist = BackgroundDist.product({"X": _uniform(BIT.values), "A": {"none": 1}})
    return assemble_frame(BIT, [("A", UNIT)], None, BIT, lambda: "0", dist, reads=[])


def projection_model() -> AnalysisFrame:
    """``s(x, a) = a``: ignores the sensitive input."""
    dist = BackgroundDist.product({"X": _uniform(BIT.values), "A": _uniform(BIT.values)})
    return assemble_frame(BIT, [("A", BIT)], None, BIT, lambda a: a, dist, reads=["Ah"])


# -- registry ------------------------------------------------------------------


@dataclass(frozen=True)
class MechanismSpec:
    """A named fixture with the tightest ratio it is expected to measure under ``property``."""

    name: str
    build: Callable[[], AnalysisFrame | DatabaseFrame]
    property: str
    nominal: object
    parameters: Mapping[str, Fraction] = field(default_factory=dict)
    positive: str | None = None
    description: str = ""

    def measured(self):
        from caudit.checkers import (check_80_rule, check_causal_irrelevance,
                                     check_differential_privacy, measure_noninterference)

        f = self.build()
        if self.property == "dp":
            return check_differential_privacy(f).tightest_ratio
        if self.property == "rule80":
            return check_80_rule(f, self.positive).tightest_ratio
        if self.property == "causal":
            return check_causal_irrelevance(f).tightest_ratio
        return measure_noninterference(f).tightest_ratio


F = Fraction
FIXTURES: dict[str, MechanismSpec] = {s.name: s for s in [
    MechanismSpec("appendix", appendix_model, "causal", INFINITE,
                  description="pos(x) over x in {0,1,2}, uniform prior"),
    MechanismSpec("rr", lambda: randomized_response(F(1, 4)), "noninterference", F(3), {"flip": F(1, 4)},
                  description="randomized response, flip 1/4"),
    MechanismSpec("rr_third", lambda: randomized_response(F(1, 3)), "noninterference", F(2), {"flip": F(1, 3)},
                  description="randomized response, flip 1/3"),
    MechanismSpec("hiring_boundary", lambda: hiring_model({"g1": F(1, 2), "g2": F(2, 5)}), "rule80", F(5, 4),
                  {"g1": F(1, 2), "g2": F(2, 5)}, positive="hire",
                  description="hire rates 1/2 and 2/5, equal group sizes"),
    MechanismSpec("hiring_fail", lambda: hiring_model({"g1": F(1, 2), "g2": F(39, 100)}), "rule80", F(50, 39),
                  {"g1": F(1, 2), "g2": F(39, 100)}, positive="hire",
                  description="hire rates 1/2 and 39/100, equal group sizes"),
    MechanismSpec("hiring_equal", lambda: hiring_model({"g1": F(1, 2), "g2": F(1, 2)}), "rule80", ONE,
                  {"g1": F(1, 2), "g2": F(1, 2)}, positive="hire", description="equal hire rates"),
    MechanismSpec("xor", xor_model, "noninterference", INFINITE, description="release X xor A"),
    MechanismSpec("constant", constant_model, "noninterference", ONE, description="always outputs 0"),
    MechanismSpec("projection", projection_model, "noninterference", ONE, description="releases A"),
    MechanismSpec("average", average_disclosure_model, "causal", ONE,
                  description="mean of two other heights; target is outside the averaged group"),
    MechanismSpec("db_identity_1", lambda: database_release(1, F(1, 4), "identity"), "dp", F(3),
                  {"k": F(1), "flip": F(1, 4)}, description="one row, randomized response"),
    MechanismSpec("db_identity_2", lambda: database_release(2, F(1, 4), "identity"), "dp", F(3),
                  {"k": F(2), "flip": F(1, 4)}, description="two rows, noisy bits released"),
    MechanismSpec("db_parity_2", lambda: database_release(2, F(1, 4), "parity"), "dp", F(5, 3),
                  {"k": F(2), "flip": F(1, 4)}, description="two rows, parity of noisy bits"),
    MechanismSpec("db_sum_noiseless_2", lambda: database_release(2, None, "sum"), "dp", INFINITE,
                  {"k": F(2)}, description="two rows, exact count"),
    MechanismSpec("db_identity_2_removed", lambda: database_release(2, F(1, 4), "identity", "removed"), "dp",
                  F(9), {"k": F(2), "flip": F(1, 4)},
                  description="two rows, absent rows removed before release"),
]}
