"""Digital-twin vector data: variables observed under two scenarios.

The on-disk format is a long CSV::

    variable,scenario,value
    x1,without P2M,34654.53
    x1,by P2M,34654.53

Lines starting with ``#`` and blank lines are skipped.  Line numbers in
error messages count every physical line, header included.
"""

from __future__ import annotations

import enum
import io
import re
from importlib import resources

from .ecdf import Sample
from .exceptions import BadHeader, BadRow, BadScenario, BadValue, EmptyDataset

HEADER = "variable,scenario,value"
FIXTURE_RESOURCE = "table1.csv"

# dot decimal separator only, no thousands separators, no nan/inf
_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")


class Scenario(enum.Enum):
    BASELINE = "baseline"
    P2M = "p2m"

    @property
    def label(self):
        return _LABELS[self]

    @property
    def short(self):
        return self.value

    @classmethod
    def parse(cls, text):
        key = text.strip().lower()
        for scen in cls:
            if key in (scen.value, scen.label.lower()):
                return scen
        raise ValueError(f"unknown scenario label {text!r}")


_LABELS = {Scenario.BASELINE: "without P2M", Scenario.P2M: "by P2M"}


class Dataset:
    """Ordered mapping ``variable -> {Scenario: Sample}``.

    Variables keep first-appearance order; within a variable, scenarios are
    iterated Baseline first.
    """

    def __init__(self, variables):
        self._data = {}
        for name, series in variables:
            if not name:
                raise ValueError("variable names must be nonempty")
            if name in self._data:
                raise ValueError(f"duplicate variable {name!r}")
            if not series:
                raise ValueError(f"variable {name!r} has no scenario series")
            self._data[name] = {
                s: series[s] for s in Scenario if s in series
            }

    def variables(self):
        return list(self._data)

    def series(self, name):
        return dict(self._data[name])

    def __getitem__(self, key):
        name, scenario = key
        return self._data[name][scenario]

    def __contains__(self, name):
        return name in self._data

    def __iter__(self):
        for name, series in self._data.items():
            yield name, dict(series)

    def __len__(self):
        return len(self._data)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return list(self._data.items()) == list(other._data.items())

    def n_observations(self):
        return sum(s.n for series in self._data.values() for s in series.values())

    def __repr__(self):
        parts = ", ".join(
            f"{name}[{'/'.join(s.short for s in series)}]" for name, series in self._data.items()
        )
        return f"Dataset({parts})"


def variables(ds):
    return ds.variables()


def parse_long_csv(text):
    """Parse long-format CSV text (or a text stream) into a ``Dataset``.

    Raises
    ------
    BadHeader, BadRow, BadValue, BadScenario, EmptyDataset
    """
    if not isinstance(text, str):
        text = text.read()
    lines = text.lstrip("﻿").splitlines()
    if not lines or lines[0].rstrip("\r") != HEADER:
        raise BadHeader(lines[0] if lines else "")

    raw = {}
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split(",")
        if len(fields) != 3:
            raise BadRow(lineno, line)
        name, label, value = (f.strip() for f in fields)
        if not name:
            raise BadRow(lineno, line)
        try:
            scen = Scenario.parse(label)
        except ValueError:
            raise BadScenario(lineno, label) from None
        if not _NUMBER.fullmatch(value):
            raise BadValue(lineno, value)
        raw.setdefault(name, {}).setdefault(scen, []).append(float(value))

    if not raw:
        raise EmptyDataset()
    return Dataset(
        (name, {scen: Sample(vals) for scen, vals in series.items()})
        for name, series in raw.items()
    )


def read_long_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_long_csv(fh.read())


def to_long_csv(ds):
    """Serialize with canonical scenario labels; ``repr`` keeps floats exact."""
    out = io.StringIO()
    out.write(HEADER + "\n")
    for name, series in ds:
        for scen, sample in series.items():
            for v in sample:
                out.write(f"{name},{scen.label},{v!r}\n")
    return out.getvalue()


def fixture_text():
    return resources.files(__package__).joinpath("data", FIXTURE_RESOURCE).read_text("utf-8")


def table1_fixture():
    """The partially published initial-values table: x1..x4, 10 values per scenario."""
    return parse_long_csv(fixture_text())
