from fractions import Fraction

import pytest

import oracle
from caudit.checkers import check_assoc_independence, check_causal_irrelevance, measure_noninterference
from caudit.errors import InvalidParameter, InvalidPrior
from caudit.inference import INFINITE
from caudit.mechlib import (
    FIXTURES,
    appendix_model,
    average_disclosure_model,
    database_release,
    hiring_model,
    randomized_response,
    xor_model,
)

F = Fraction


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixture_nominal(name):
    spec = FIXTURES[name]
    assert spec.measured() == spec.nominal


@pytest.mark.parametrize("flip", [F(1, 10), F(1, 4), F(1, 3), F(49, 100)])
def test_rr_ratio_formula(flip):
    f = randomized_response(flip)
    assert measure_noninterference(f).tightest_ratio == (1 - flip) / flip
    assert oracle.ni_ratio(f) == (1 - flip) / flip


@pytest.mark.parametrize("flip", [0, F(1, 2), F(3, 4), -1, 0.25])
def test_rr_invalid_flip(flip):
    with pytest.raises(InvalidParameter):
        randomized_response(flip)


def test_invalid_priors():
    for bad in ({"0": F(1, 2), "1": F(1, 2)}, {"0": 1, "1": 0, "2": 0}, {"0": 0.5, "1": 0.25, "2": 0.25},
                {"0": F(1, 2), "1": F(1, 4), "2": F(1, 2)}):
        with pytest.raises(InvalidPrior):
            appendix_model(bad)


def test_invalid_parameters():
    with pytest.raises(InvalidParameter):
        hiring_model({"a": F(3, 2)})
    with pytest.raises(InvalidParameter):
        hiring_model({"a": F(1, 2), "b": F(1, 2)}, {"a": 1, "b": 1})
    with pytest.raises(InvalidParameter):
        database_release(0)
    with pytest.raises(InvalidParameter):
        database_release(2, F(1, 4), "mean")
    with pytest.raises(InvalidParameter):
        database_release(2, F(3, 4))
    with pytest.raises(InvalidParameter):
        average_disclosure_model(("61", "63"))


def test_hiring_rates_exact():
    f = hiring_model({"a": F(3, 7), "b": F(2, 9), "c": F(0)}, {"a": F(1, 2), "b": F(1, 4), "c": F(1, 4)})
    for g, r in {"a": F(3, 7), "b": F(2, 9), "c": F(0)}.items():
        assert oracle.prob(f.pm, oracle.Atom("O", "hire"), given=oracle.Atom("X", g)) == r


def test_average_is_causally_irrelevant_and_independent():
    f = average_disclosure_model()
    assert check_causal_irrelevance(f).holds
    assert check_assoc_independence(f).holds


def test_xor_prior_override():
    f = xor_model({"0": F(1, 3), "1": F(2, 3)})
    # A stays uniform, so O is still independent of X
    assert check_assoc_independence(f).holds
    assert measure_noninterference(f).tightest_ratio is INFINITE
