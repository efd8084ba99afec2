"""
Scenarios subpackage for the kummerlag parent package.

Contains the scenarios.py module and the scenarios.json table of named
construction scenarios with their expected verdicts.
"""

from kummerlag.scenarios.scenarios import scenarios, scenarios_list

__all__ = [
    "scenarios",
    "scenarios_list",
]
