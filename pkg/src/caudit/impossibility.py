"""Open/closed propositions and the disclosure / diversity-loss impossibility.

A proposition is *closed* under a consistent context when its conditional
probability is 0 or 1, and *open* when it lies strictly between.  For any
system and proposition phi exactly one of four things happens, checked in
this order: phi is already closed, the system is uninformative (one output
has probability 1), some output alone closes phi, or for every realizable
output o the context ``O!=o | phi`` leaves phi open while adding ``O=o``
closes it.  The last two cases are the statistical disclosures (privacy) and
diversity losses (nondiscrimination) constructed below.

Outputs of probability zero are not quantified over: conditioning on them is
inconsistent, so no verdict about them can be either open or closed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from caudit.errors import CauditError, NoDisclosure, PreconditionViolated
from caudit.frames import AnalysisFrame
from caudit.inference import world_table
from caudit.prop import TRUE, Proposition, conj, disj, eq, ne
from caudit.scm import ProbCausalModel

OPEN = "Open"
CLOSED = "Closed"
INCONSISTENT = "Inconsistent"

PHI_CLOSED_FOR_SE = "PhiClosedForSE"
UNINFORMATIVE = "Uninformative"
TRIVIALLY_CLOSES = "TriviallyCloses"
WITNESS_FOR_EVERY_OUTPUT = "WitnessForEveryOutput"
CASES = (PHI_CLOSED_FOR_SE, UNINFORMATIVE, TRIVIALLY_CLOSES, WITNESS_FOR_EVERY_OUTPUT)


class ImpossibilityViolation(CauditError):
    """None of the four cases verified; only a bug can cause this."""


@dataclass(frozen=True)
class OpennessVerdict:
    status: str
    mass: Fraction | None
    context: Proposition = TRUE

    @property
    def open(self) -> bool:
        return self.status == OPEN

    @property
    def closed(self) -> bool:
        return self.status == CLOSED

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "mass": None if self.mass is None else f"{self.mass.numerator}/{self.mass.denominator}",
            "context": str(self.context),
        }


def classify_openness(pm: ProbCausalModel, context: Proposition, phi: Proposition) -> OpennessVerdict:
    table = world_table(pm)
    cmask = table.mask(context)
    cmass = table.mass(cmask)
    if cmass == 0:
        return OpennessVerdict(INCONSISTENT, None, context)
    mass = Fraction(table.mass(cmask & table.mask(phi)), cmass)
    return OpennessVerdict(OPEN if 0 < mass < 1 else CLOSED, mass, context)


def output_masses(f: AnalysisFrame) -> dict[str, Fraction]:
    table = world_table(f.pm)
    return {k[0]: Fraction(w, table.total) for k, w in table.joint([f.output]).items()}


def realizable_outputs(f: AnalysisFrame) -> list[str]:
    return [o for o, p in output_masses(f).items() if p > 0]


def forcing_output(f: AnalysisFrame) -> str | None:
    """The output of probability 1, if the system is uninformative."""
    return next((o for o, p in output_masses(f).items() if p == 1), None)


def is_informative(f: AnalysisFrame) -> bool:
    return forcing_output(f) is None


def trivially_closes(f: AnalysisFrame, phi: Proposition) -> str | None:
    """First output (domain order) that alone closes an otherwise open phi."""
    if not classify_openness(f.pm, TRUE, phi).open:
        return None
    for o in f.outputs:
        if classify_openness(f.pm, eq(f.output, o), phi).closed:
            return o
    return None


def lemma_context(f: AnalysisFrame, phi: Proposition, o: str) -> Proposition:
    """``O!=o | phi``: knowing it, seeing O=o settles phi."""
    return disj(ne(f.output, o), phi)


def output_pair(f: AnalysisFrame, phi: Proposition, o: str) -> tuple[OpennessVerdict, OpennessVerdict]:
    ctx = lemma_context(f, phi, o)
    return (classify_openness(f.pm, ctx, phi),
            classify_openness(f.pm, conj(eq(f.output, o), ctx), phi))


@dataclass(frozen=True)
class ImpossibilityClassification:
    case: str
    phi: Proposition
    output: str | None = None
    verdicts: Mapping[str, tuple[OpennessVerdict, OpennessVerdict]] = field(default_factory=dict)
    prior: OpennessVerdict | None = None
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "phi": str(self.phi),
            "output": self.output,
            "prior": self.prior.to_dict() if self.prior else None,
            "verdicts": {o: {"before": b.to_dict(), "after": a.to_dict()} for o, (b, a) in self.verdicts.items()},
            "notes": list(self.notes),
        }


def classify_impossibility(f: AnalysisFrame, phi: Proposition) -> ImpossibilityClassification:
    """Return the first of the four cases that applies, with re-checkable evidence."""
    prior = classify_openness(f.pm, TRUE, phi)
    forcing = forcing_output(f)
    if prior.closed:
        notes = (f"system is also uninformative (output {forcing} is certain)",) if forcing else ()
        return ImpossibilityClassification(PHI_CLOSED_FOR_SE, phi, prior=prior, notes=notes)
    if forcing is not None:
        return ImpossibilityClassification(UNINFORMATIVE, phi, output=forcing, prior=prior)
    o = trivially_closes(f, phi)
    if o is not None:
        return ImpossibilityClassification(TRIVIALLY_CLOSES, phi, output=o, prior=prior,
                                           verdicts={o: (prior, classify_openness(f.pm, eq(f.output, o), phi))})
    verdicts = {}
    for o in realizable_outputs(f):
        before, after = output_pair(f, phi, o)
        if not (before.open and after.closed):
            raise ImpossibilityViolation(
                f"phi={phi}: output {o} gives {before.status} before and {after.status} after")
        verdicts[o] = (before, after)
    return ImpossibilityClassification(WITNESS_FOR_EVERY_OUTPUT, phi, verdicts=verdicts, prior=prior)


@dataclass(frozen=True)
class DisclosureWitness:
    """Background knowledge that leaves phi open until output ``output`` is seen."""

    background: Proposition
    output: str
    before: OpennessVerdict
    after: OpennessVerdict

    def to_dict(self) -> dict:
        return {"background": str(self.background), "output": self.output,
                "before": self.before.to_dict(), "after": self.after.to_dict()}


def disclosure_witness(f: AnalysisFrame, phi: Proposition) -> DisclosureWitness:
    """An adversary (background proposition) who learns phi from some output.

    Raises NoDisclosure when phi is already resolved or the system is uninformative.
    """
    if not classify_openness(f.pm, TRUE, phi).open:
        raise NoDisclosure(f"{phi} is already resolved by the model")
    if not is_informative(f):
        raise NoDisclosure("the system is uninformative")
    o = trivially_closes(f, phi)
    if o is not None:
        background = TRUE
    else:
        o = realizable_outputs(f)[0]
        background = lemma_context(f, phi, o)
    before = classify_openness(f.pm, background, phi)
    after = classify_openness(f.pm, conj(background, eq(f.output, o)), phi)
    if not (before.open and after.closed):
        raise ImpossibilityViolation(f"disclosure witness for {phi} did not verify")
    return DisclosureWitness(background, o, before, after)


@dataclass(frozen=True)
class DiversityLossRecord:
    """The ``subpopulation`` has both phi and not-phi members; its ``O=output`` part has one kind only."""

    subpopulation: Proposition
    output: str
    phi: Proposition
    before: OpennessVerdict
    after: OpennessVerdict

    @property
    def kept_kind(self) -> bool:
        """Whether the remaining sub-subpopulation is all-phi (True) or all-not-phi."""
        return self.after.mass == 1

    def to_dict(self) -> dict:
        return {"subpopulation": str(self.subpopulation), "output": self.output, "phi": str(self.phi),
                "before": self.before.to_dict(), "after": self.after.to_dict()}


def diversity_report(f: AnalysisFrame, phi: Proposition, o: str) -> DiversityLossRecord:
    """Subpopulation ``O!=o | phi`` that loses diversity of phi among those with outcome o."""
    if not is_informative(f):
        raise PreconditionViolated("the system is uninformative")
    if not classify_openness(f.pm, TRUE, phi).open:
        raise PreconditionViolated(f"the population lacks all diversity of {phi}")
    if trivially_closes(f, phi) is not None:
        raise PreconditionViolated(f"the system trivially removes diversity of {phi}")
    if o not in realizable_outputs(f):
        raise PreconditionViolated(f"output {o!r} never occurs")
    before, after = output_pair(f, phi, o)
    if not (before.open and after.closed):
        raise ImpossibilityViolation(f"diversity loss for {phi} at {o} did not verify")
    return DiversityLossRecord(lemma_context(f, phi, o), o, phi, before, after)
