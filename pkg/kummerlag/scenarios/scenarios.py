"""Scenarios."""

import functools
from collections import namedtuple
from pathlib import Path

import pandas as pd

from kummerlag.scenario import ConstructionScenario

_scenario = namedtuple("scenario", ["description", "scenario", "expected"])


@functools.lru_cache(maxsize=None)
def scenarios_list():
    """
    Load the construction scenarios shipped with the package.

    Each entry pairs a :class:`ConstructionScenario` with the verdict fields the
    classification must reproduce, or ``{"error": "inconsistent"}``.

    """
    path = Path(__file__).absolute().parent
    df = pd.read_json(path.joinpath("scenarios.json"), orient="records", dtype=False)
    return {
        row["short_name"].lower(): _scenario(
            row["description"],
            ConstructionScenario(name=row["short_name"], **row["scenario"]),
            dict(row["expected"]),
        )
        for k, row in df.iterrows()
        if row["short_name"]
    }


scenarios = scenarios_list()
