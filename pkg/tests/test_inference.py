from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from caudit.errors import InconsistentContext, UnknownVariable
from caudit.harness import SplitMix64, background_atoms, random_formula
from caudit.inference import (
    INFINITE,
    VACUOUS,
    QueryContext,
    distribution,
    independent,
    is_fresh,
    probability,
    ratio_bound,
)
from caudit.mechlib import appendix_model, even_x, randomized_response, xor_model
from caudit.prop import TRUE, conj, disj, eq
from caudit.scm import BackgroundDist, ProbCausalModel
from strategies import frames


def test_appendix_probabilities():
    pm = appendix_model().pm
    assert probability(pm, None, even_x()) == Fraction(2, 3)
    assert probability(pm, QueryContext.of(given=eq("O", "positive")), even_x()) == Fraction(1, 2)
    assert distribution(pm, None, "O") == {"nonpositive": Fraction(1, 3), "positive": Fraction(2, 3)}
    assert distribution(pm, QueryContext.of({"Xh": "1"}), "O") == {"nonpositive": 0, "positive": 1}


def test_intervention_forces_value():
    pm = appendix_model().pm
    for v in "012":
        assert probability(pm, QueryContext.of({"Xh": v}), eq("Xh", v)) == 1


def test_point_mass_distribution():
    m = appendix_model().model
    pm = ProbCausalModel(m, BackgroundDist.point_mass({"X": "2", "A": "none"}))
    assert distribution(pm, None, "O") == {"nonpositive": 0, "positive": 1}


def test_inconsistent_and_unknown():
    pm = appendix_model().pm
    with pytest.raises(InconsistentContext):
        probability(pm, QueryContext.of(given=conj(eq("X", "0"), eq("X", "1"))), TRUE)
    with pytest.raises(UnknownVariable):
        probability(pm, None, eq("Nope", "0"))


def test_independence_examples():
    assert independent(xor_model().pm, ["X"], ["A"])
    # A = X xor fresh fair bit is independent of X: O here plays that role
    assert independent(xor_model().pm, ["X"], ["O"])
    f = appendix_model()
    assert not independent(f.pm, ["X"], ["Xh"])


def test_freshness():
    rr = randomized_response(Fraction(1, 4))
    assert is_fresh(rr.pm, "R", {"keep": Fraction(3, 4), "flip": Fraction(1, 4)})
    assert not is_fresh(rr.pm, "R", {"keep": Fraction(1, 2), "flip": Fraction(1, 2)})
    m = rr.model
    corr = BackgroundDist.from_points([({"X": "0", "A": "none", "R": "keep"}, Fraction(1, 2)),
                                       ({"X": "1", "A": "none", "R": "flip"}, Fraction(1, 2))])
    assert not is_fresh(ProbCausalModel(m, corr), "R", {"keep": Fraction(1, 2), "flip": Fraction(1, 2)})


def test_ratio_bound():
    assert ratio_bound(Fraction(1, 3), Fraction(1, 6)) == 2
    assert ratio_bound(Fraction(0), Fraction(0)) is VACUOUS
    assert ratio_bound(Fraction(1, 2), Fraction(0)) is INFINITE
    assert INFINITE > Fraction(10**9) and not INFINITE < Fraction(1)


@settings(max_examples=40, deadline=None)
@given(frames, st.integers(0, 2**64 - 1))
def test_chain_rule_and_normalization(f, seed):
    rng = SplitMix64(seed)
    atoms = background_atoms(f) + [eq("O", o) for o in f.outputs]
    phi, psi = random_formula(rng, atoms), random_formula(rng, atoms)
    pm = f.pm
    p_psi = probability(pm, None, psi)
    if p_psi:
        lhs = probability(pm, None, conj(phi, psi))
        assert lhs == probability(pm, QueryContext.of(given=psi), phi) * p_psi
    assert probability(pm, None, phi) <= probability(pm, None, disj(phi, psi))
    assert sum(distribution(pm, None, "O").values()) == 1
    assert probability(pm, None, phi) == oracle.prob(pm, phi)


@settings(max_examples=30, deadline=None)
@given(frames)
def test_independence_matches_oracle(f):
    rest = list(f.other_bg) + ([f.randomness] if f.randomness else [])
    if rest:
        assert independent(f.pm, ["X"], rest) == oracle.independent(f.pm, ["X"], rest)
