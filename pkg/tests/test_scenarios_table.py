"""Test the shipped scenario table."""

import pytest

from kummerlag import scenarios
from kummerlag.core.errors import ScenarioInconsistency
from kummerlag.scenario import ConstructionScenario, classify
from kummerlag.scenarios import scenarios_list


def test_table_names():
    """Every named scenario is loaded."""
    assert set(scenarios) == {
        "cxc",
        "connected-graph",
        "g1-iso",
        "curve",
        "elliptic-curve",
        "three-surfaces",
        "inconsistent",
        "undecided",
    }
    assert scenarios_list() is scenarios


def test_entries_are_scenarios():
    """Each entry wraps a ConstructionScenario carrying its name."""
    for name, entry in scenarios.items():
        assert isinstance(entry.scenario, ConstructionScenario)
        assert entry.scenario.name == name
        assert entry.description


@pytest.mark.parametrize("name", sorted(scenarios))
def test_expected_verdicts(name):
    """Classification reproduces the expected verdict of every entry."""
    entry = scenarios[name]
    if entry.expected.get("error") == "inconsistent":
        with pytest.raises(ScenarioInconsistency):
            classify(entry.scenario)
        return
    verdict = classify(entry.scenario).to_json()
    for key, value in entry.expected.items():
        assert verdict[key] == value, key


def test_g1_iso_is_not_fibered():
    """The first map isomorphism scenario is not fibered and has one form."""
    verdict = classify(scenarios["g1-iso"].scenario)
    assert verdict.fibered == "no"
    assert verdict.lagrangian_form_count == 1
