# -*- coding: utf-8 -*-
"""
Configuration and fixtures for pytest.

This file makes the config-file factory, a seeded random generator and an
independent Bessel series oracle available to all tests without needing to
import them.
"""
import json
import math
from decimal import Decimal, localcontext
from pathlib import Path

import numpy as np
import pytest

# Argument of the maximum of J_1
J1_MAX_ARG = 1.8412


def series_bessel(m: int, x: float, terms: int = 60) -> float:
    """J_m(x) from the ascending power series in 50-digit decimal arithmetic."""
    sign = 1
    if m < 0:
        m = -m
        sign = -1 if m % 2 else 1
    with localcontext() as ctx:
        ctx.prec = 50
        half = Decimal(x) / 2
        term = half ** m / math.factorial(m)
        total = term
        for k in range(1, terms):
            term = -term * half * half / (k * (k + m))
            total += term
        return sign * float(total)


@pytest.fixture
def bessel_oracle():
    """A pytest fixture that returns the extended-precision series J_m(x)."""
    return series_bessel


@pytest.fixture
def rng():
    """A seeded generator, so randomized property tests are reproducible."""
    return np.random.default_rng(20240611)


def dimer_document(**overrides) -> dict:
    """A minimal dimer spectrum config; top-level keys can be replaced."""
    document = {
        "scenario": "spectrum",
        "lattice": {"n_sites": 2, "tunnelings": [1.0], "gammas": [0.1, -0.1]},
        "modulation": {"l": 1, "omega0": 1.0,
                       "tones": [{"kappa": J1_MAX_ARG, "phi": 0.0, "rational": [1, 1]}]},
    }
    document.update(overrides)
    return document


@pytest.fixture
def make_document():
    """A pytest fixture that returns a factory for config documents."""
    return dimer_document


@pytest.fixture
def write_config(tmp_path):
    """A pytest fixture that returns a factory function for writing config files."""
    def _write_config(document, filename: str = "run.json") -> Path:
        path = tmp_path / filename
        text = document if isinstance(document, str) else json.dumps(document, indent=2)
        path.write_text(text, encoding="utf-8")
        return path

    return _write_config
