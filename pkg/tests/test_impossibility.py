from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from caudit.errors import NoDisclosure, PreconditionViolated
from caudit.harness import SplitMix64, background_atoms, sample_props
from caudit.impossibility import (
    CLOSED,
    INCONSISTENT,
    OPEN,
    PHI_CLOSED_FOR_SE,
    TRIVIALLY_CLOSES,
    UNINFORMATIVE,
    WITNESS_FOR_EVERY_OUTPUT,
    classify_impossibility,
    classify_openness,
    disclosure_witness,
    diversity_report,
    output_pair,
)
from caudit.mechlib import (
    appendix_model,
    average_disclosure_demo,
    average_disclosure_model,
    constant_model,
    even_x,
    hiring_model,
    randomized_response,
    xor_model,
)
from caudit.prop import FALSE, TRUE, Not, conj, eq
from strategies import frames

F = Fraction


def test_openness_basic():
    pm = appendix_model().pm
    assert classify_openness(pm, TRUE, even_x()).status == OPEN
    assert classify_openness(pm, eq("X", "0"), even_x()).status == CLOSED
    assert classify_openness(pm, FALSE, even_x()).status == INCONSISTENT
    assert classify_openness(pm, conj(eq("X", "0"), eq("X", "1")), even_x()).status == INCONSISTENT


def test_negation_symmetry():
    f = randomized_response(F(1, 4))
    for phi in background_atoms(f):
        for ctx in (TRUE, eq("O", "0"), eq("O", "1")):
            a, b = classify_openness(f.pm, ctx, phi), classify_openness(f.pm, ctx, Not(phi))
            assert a.status == b.status and a.mass + b.mass == 1


def test_appendix_even_x_witness():
    f = appendix_model()
    c = classify_impossibility(f, even_x())
    # O=nonpositive pins X=0; O=positive leaves even(X) at 1/2
    assert c.case == TRIVIALLY_CLOSES and c.output == "nonpositive"
    assert classify_openness(f.pm, eq("O", "positive"), even_x()).mass == F(1, 2)


def test_cases():
    assert classify_impossibility(appendix_model(), eq("A", "none")).case == PHI_CLOSED_FOR_SE
    c = classify_impossibility(constant_model(), eq("X", "1"))
    assert c.case == UNINFORMATIVE and c.output == "0"
    c = classify_impossibility(appendix_model(), eq("X", "0"))
    assert c.case == TRIVIALLY_CLOSES and c.output == "nonpositive"
    # xor: O alone says nothing about X, but with O!=o | phi it does
    c = classify_impossibility(xor_model(), eq("X", "1"))
    assert c.case == WITNESS_FOR_EVERY_OUTPUT and set(c.verdicts) == {"0", "1"}


def test_phi_closed_on_uninformative_gets_note():
    c = classify_impossibility(constant_model(), eq("A", "none"))
    assert c.case == PHI_CLOSED_FOR_SE and c.notes


def test_disclosure_witness_and_errors():
    w = disclosure_witness(xor_model(), eq("X", "1"))
    assert w.before.open and w.after.closed
    with pytest.raises(NoDisclosure):
        disclosure_witness(constant_model(), eq("X", "1"))
    with pytest.raises(NoDisclosure):
        disclosure_witness(appendix_model(), TRUE)


def test_average_height_demo():
    demo = average_disclosure_demo()
    f = demo.frame
    pm = f.pm
    # the release alone leaves X open, and is causally irrelevant to it
    assert classify_openness(pm, eq("O", demo.output), demo.phi).open
    assert classify_openness(pm, demo.background, demo.phi).open
    after = classify_openness(pm, conj(demo.background, eq("O", demo.output)), demo.phi)
    assert after.closed and after.mass == 1
    assert oracle.prob(pm, demo.phi, given=conj(demo.background, eq("O", demo.output))) == 1


def test_identical_heights_uninformative():
    f = average_disclosure_model(("60",))
    assert classify_impossibility(f, eq("X", "60")).case == PHI_CLOSED_FOR_SE


def test_hiring_diversity():
    f = hiring_model({"g1": F(1, 2), "g2": F(1, 4)})
    rec = diversity_report(f, eq("X", "g1"), "hire")
    assert rec.before.open and rec.after.closed
    with pytest.raises(PreconditionViolated):
        diversity_report(constant_model(), eq("X", "1"), "0")
    with pytest.raises(PreconditionViolated):
        diversity_report(appendix_model(), eq("X", "0"), "positive")
    with pytest.raises(PreconditionViolated):
        diversity_report(f, eq("A", "none"), "hire")


def test_lemma_pair_on_xor():
    f = xor_model()
    for o in "01":
        before, after = output_pair(f, eq("X", "0"), o)
        assert before.open and after.closed


@settings(max_examples=25, deadline=None)
@given(frames, st.integers(0, 2**64 - 1))
def test_classification_matches_oracle(f, seed):
    for phi in sample_props(f, SplitMix64(seed), 8):
        c = classify_impossibility(f, phi)
        case, out = oracle.classify(f, phi)
        assert c.case == case
        if case in (UNINFORMATIVE, TRIVIALLY_CLOSES):
            assert c.output == out


def test_average_demo_classification():
    demo = average_disclosure_demo()
    c = classify_impossibility(demo.frame, demo.phi)
    assert c.case in (TRIVIALLY_CLOSES, WITNESS_FOR_EVERY_OUTPUT)
    assert oracle.classify(demo.frame, demo.phi)[0] == c.case
