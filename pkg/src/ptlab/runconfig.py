# -*- coding: utf-8 -*-
"""
Run configuration: the JSON document a `ptlab run` is driven by.

parse_config validates the whole document up front, so that lattice and
modulation invariants surface as ConfigError with the offending field path
before any computation starts. dump_config writes the canonical echo that
parse_config reads back to an equal RunConfig.

The schema is documented in docs/config_schema.md.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from .config import BALANCE_TOL, MAX_SITES, QUADRATURE_STEPS, THRESHOLD_GRID_POINTS, THRESHOLD_TOL
from .errors import ConfigError, DomainError
from .lattice import Boundary, LatticeSpec, ModulationSpec, ModulationTone

logger = logging.getLogger(__name__)


class Scenario(str, Enum):
    SPECTRUM = "spectrum"
    SCAN_KAPPA = "scan_kappa"
    PHASE_DIAGRAM = "phase_diagram"
    THRESHOLD = "threshold"
    PROPAGATE = "propagate"
    EFFECTIVE_COUPLING = "effective_coupling"


# Sweeps each scenario requires
SCENARIO_SWEEPS = {
    Scenario.SCAN_KAPPA: ("kappa",),
    Scenario.PHASE_DIAGRAM: ("kappa", "gamma_sq"),
}


@dataclass(frozen=True)
class Sweep:
    min: float
    max: float
    points: int

    def axis(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.points)


@dataclass(frozen=True)
class Tolerances:
    tol_im: Optional[float] = None
    threshold_tol: float = THRESHOLD_TOL
    threshold_grid: int = THRESHOLD_GRID_POINTS
    m_max: Optional[int] = None


@dataclass(frozen=True)
class ThresholdSettings:
    gamma_max: float


@dataclass(frozen=True)
class PropagationSettings:
    z_end: float
    steps: int
    stride: int = 0
    initial_site: Optional[int] = None
    initial_amplitudes: Optional[Tuple[complex, ...]] = None


@dataclass(frozen=True)
class AveragingSettings:
    window_periods: int = 1
    steps_per_period: int = QUADRATURE_STEPS


@dataclass(frozen=True)
class RunConfig:
    """
    A validated run. For the phase_diagram and threshold scenarios the lattice
    gammas are the gain/loss profile that the swept gamma multiplies.
    """
    scenario: Scenario
    lattice: LatticeSpec
    modulation: ModulationSpec
    sweeps: Tuple[Tuple[str, Sweep], ...] = ()
    sweep_tone: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)
    threshold: Optional[ThresholdSettings] = None
    propagation: Optional[PropagationSettings] = None
    averaging: AveragingSettings = field(default_factory=AveragingSettings)
    output: Optional[str] = None

    def sweep(self, name: str) -> Sweep:
        return dict(self.sweeps)[name]


# --- Field readers ---------------------------------------------------------------

def _object(value: Any, path: str, allowed: Tuple[str, ...], required: Tuple[str, ...] = ()) -> Mapping:
    if not isinstance(value, dict):
        raise ConfigError("expected an object", field=path)
    for key in value:
        if key not in allowed:
            raise ConfigError(f"unknown field '{key}'", field=f"{path}.{key}" if path else key)
    for key in required:
        if key not in value:
            raise ConfigError("missing required field", field=f"{path}.{key}" if path else key)
    return value


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", field=path)
    if not math.isfinite(value):
        raise ConfigError("expected a finite number", field=path)
    return float(value)


def _integer(value: Any, path: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", field=path)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", field=path)
    return value


def _number_list(value: Any, path: str) -> List[float]:
    if not isinstance(value, list):
        raise ConfigError("expected an array of numbers", field=path)
    return [_number(item, f"{path}[{i}]") for i, item in enumerate(value)]


def _complex(value: Any, path: str) -> complex:
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigError("a complex amplitude is written [re, im]", field=path)
        return complex(_number(value[0], path), _number(value[1], path))
    return complex(_number(value, path))


def _parse_tone(value: Any, path: str) -> ModulationTone:
    if isinstance(value, dict) and "beta" in value:
        raise ConfigError("tones carry a rationality tag instead of 'beta': "
                          "{\"rational\": [p, q]} or {\"irrational\": value}", field=f"{path}.beta")
    tone = _object(value, path, ("kappa", "phi", "rational", "irrational"), ("kappa",))
    kappa = _number(tone["kappa"], f"{path}.kappa")
    phi = _number(tone.get("phi", 0.0), f"{path}.phi")
    has_rational, has_irrational = "rational" in tone, "irrational" in tone
    if has_rational == has_irrational:
        raise ConfigError("missing rationality tag: give exactly one of "
                          "{\"rational\": [p, q]} or {\"irrational\": value}", field=path)
    try:
        if has_rational:
            pair = tone["rational"]
            if not isinstance(pair, list) or len(pair) != 2:
                raise ConfigError("expected [p, q]", field=f"{path}.rational")
            p = _integer(pair[0], f"{path}.rational[0]", minimum=1)
            q = _integer(pair[1], f"{path}.rational[1]", minimum=1)
            if math.gcd(p, q) != 1:
                raise ConfigError(f"p and q must be coprime, got {p}/{q}", field=f"{path}.rational")
            return ModulationTone.rational(kappa, p, q, phi)
        return ModulationTone.irrational(kappa, _number(tone["irrational"], f"{path}.irrational"), phi)
    except DomainError as e:
        raise ConfigError(str(e), field=path) from e


def _parse_lattice(value: Any) -> LatticeSpec:
    lattice = _object(value, "lattice", ("n_sites", "tunnelings", "gammas", "boundary"),
                      ("n_sites", "tunnelings", "gammas"))
    n_sites = _integer(lattice["n_sites"], "lattice.n_sites", minimum=2)
    if n_sites > MAX_SITES:
        raise ConfigError(f"at most {MAX_SITES} sites are supported, got {n_sites}", field="lattice.n_sites")
    tunnelings = _number_list(lattice["tunnelings"], "lattice.tunnelings")
    gammas = _number_list(lattice["gammas"], "lattice.gammas")
    boundary = lattice.get("boundary", Boundary.OPEN.value)
    try:
        boundary = Boundary(boundary)
    except ValueError:
        raise ConfigError(f"expected 'open' or 'periodic', got {boundary!r}", field="lattice.boundary")
    if len(gammas) == n_sites and abs(math.fsum(gammas)) >= BALANCE_TOL * max([1.0] + [abs(g) for g in gammas]):
        raise ConfigError(f"gain and loss must be balanced (sum of gammas = 0), "
                          f"got sum {math.fsum(gammas):g}", field="lattice.gammas")
    try:
        return LatticeSpec(n_sites, tuple(tunnelings), tuple(gammas), boundary)
    except DomainError as e:
        raise ConfigError(str(e), field="lattice") from e


def _parse_modulation(value: Any) -> ModulationSpec:
    modulation = _object(value, "modulation", ("l", "omega0", "tones"), ("l", "omega0"))
    l = _integer(modulation["l"], "modulation.l")
    omega0 = _number(modulation["omega0"], "modulation.omega0")
    if omega0 <= 0:
        raise ConfigError(f"must be positive, got {omega0}", field="modulation.omega0")
    tones = modulation.get("tones", [])
    if not isinstance(tones, list):
        raise ConfigError("expected an array of tones", field="modulation.tones")
    parsed = tuple(_parse_tone(tone, f"modulation.tones[{i}]") for i, tone in enumerate(tones))
    return ModulationSpec(l, omega0, parsed)


def _parse_sweep(value: Any, path: str) -> Sweep:
    sweep = _object(value, path, ("min", "max", "points"), ("min", "max", "points"))
    low = _number(sweep["min"], f"{path}.min")
    high = _number(sweep["max"], f"{path}.max")
    points = _integer(sweep["points"], f"{path}.points", minimum=2)
    if not low < high:
        raise ConfigError(f"min must be below max, got {low} >= {high}", field=path)
    return Sweep(low, high, points)


def _parse_tolerances(value: Any) -> Tolerances:
    tolerances = _object(value, "tolerances", ("tol_im", "threshold_tol", "threshold_grid", "m_max"))
    tol_im = tolerances.get("tol_im")
    if tol_im is not None:
        tol_im = _number(tol_im, "tolerances.tol_im")
        if tol_im <= 0:
            raise ConfigError("must be positive", field="tolerances.tol_im")
    threshold_tol = _number(tolerances.get("threshold_tol", THRESHOLD_TOL), "tolerances.threshold_tol")
    if threshold_tol <= 0:
        raise ConfigError("must be positive", field="tolerances.threshold_tol")
    grid = _integer(tolerances.get("threshold_grid", THRESHOLD_GRID_POINTS), "tolerances.threshold_grid",
                    minimum=2)
    m_max = tolerances.get("m_max")
    if m_max is not None:
        m_max = _integer(m_max, "tolerances.m_max", minimum=0)
    return Tolerances(tol_im, threshold_tol, grid, m_max)


def _parse_propagation(value: Any) -> PropagationSettings:
    settings = _object(value, "propagation", ("z_end", "steps", "stride", "initial"),
                       ("z_end", "steps", "initial"))
    z_end = _number(settings["z_end"], "propagation.z_end")
    if z_end <= 0:
        raise ConfigError("must be positive", field="propagation.z_end")
    steps = _integer(settings["steps"], "propagation.steps", minimum=1)
    stride = _integer(settings.get("stride", 0), "propagation.stride", minimum=0)
    initial = _object(settings["initial"], "propagation.initial", ("site", "amplitudes"))
    if ("site" in initial) == ("amplitudes" in initial):
        raise ConfigError("give exactly one of 'site' or 'amplitudes'", field="propagation.initial")
    if "site" in initial:
        site = _integer(initial["site"], "propagation.initial.site", minimum=1)
        return PropagationSettings(z_end, steps, stride, initial_site=site)
    amplitudes = initial["amplitudes"]
    if not isinstance(amplitudes, list):
        raise ConfigError("expected an array", field="propagation.initial.amplitudes")
    values = tuple(_complex(a, f"propagation.initial.amplitudes[{i}]") for i, a in enumerate(amplitudes))
    return PropagationSettings(z_end, steps, stride, initial_amplitudes=values)


def _parse_averaging(value: Any) -> AveragingSettings:
    settings = _object(value, "averaging", ("window_periods", "steps_per_period"))
    return AveragingSettings(
        _integer(settings.get("window_periods", 1), "averaging.window_periods", minimum=1),
        _integer(settings.get("steps_per_period", QUADRATURE_STEPS), "averaging.steps_per_period", minimum=2))


TOP_LEVEL_FIELDS = ("scenario", "lattice", "modulation", "scan", "tolerances", "threshold",
                    "propagation", "averaging", "output")


def config_from_dict(document: Any) -> RunConfig:
    """Validates an already decoded document."""
    document = _object(document, "", TOP_LEVEL_FIELDS, ("scenario", "lattice", "modulation"))
    try:
        scenario = Scenario(document["scenario"])
    except ValueError:
        choices = ", ".join(s.value for s in Scenario)
        raise ConfigError(f"expected one of {choices}, got {document['scenario']!r}", field="scenario")
    lattice = _parse_lattice(document["lattice"])
    modulation = _parse_modulation(document["modulation"])

    needed = SCENARIO_SWEEPS.get(scenario, ())
    scan = _object(document.get("scan", {}), "scan", needed + ("tone",) if needed else ())
    sweeps = tuple((name, _parse_sweep(scan[name], f"scan.{name}")) for name in needed if name in scan)
    missing = [name for name in needed if name not in scan]
    if missing:
        raise ConfigError(f"scenario '{scenario.value}' needs a sweep", field=f"scan.{missing[0]}")
    if "gamma_sq" in scan and dict(sweeps)["gamma_sq"].min < 0:
        raise ConfigError("gamma^2 / T^2 cannot be negative", field="scan.gamma_sq.min")
    sweep_tone = _integer(scan.get("tone", 0), "scan.tone", minimum=0)
    if "kappa" in needed and sweep_tone >= len(modulation.tones):
        raise ConfigError(f"the kappa sweep needs modulation tone {sweep_tone}, "
                          f"but {len(modulation.tones)} tone(s) are defined", field="scan.tone")

    if scenario in (Scenario.PHASE_DIAGRAM, Scenario.THRESHOLD) and not any(lattice.gammas):
        raise ConfigError("this scenario scales the gammas as a gain/loss profile; "
                          "they cannot all be zero", field="lattice.gammas")

    threshold = None
    if scenario is Scenario.THRESHOLD:
        if "threshold" not in document:
            raise ConfigError("the threshold scenario needs 'threshold.gamma_max'", field="threshold")
        settings = _object(document["threshold"], "threshold", ("gamma_max",), ("gamma_max",))
        gamma_max = _number(settings["gamma_max"], "threshold.gamma_max")
        if gamma_max <= 0:
            raise ConfigError("must be positive", field="threshold.gamma_max")
        threshold = ThresholdSettings(gamma_max)
    elif "threshold" in document:
        raise ConfigError(f"not used by scenario '{scenario.value}'", field="threshold")

    propagation = None
    if scenario is Scenario.PROPAGATE:
        if "propagation" not in document:
            raise ConfigError("the propagate scenario needs a 'propagation' block", field="propagation")
        propagation = _parse_propagation(document["propagation"])
        if propagation.initial_site is not None and propagation.initial_site > lattice.n_sites:
            raise ConfigError(f"site {propagation.initial_site} outside 1..{lattice.n_sites}",
                              field="propagation.initial.site")
        if propagation.initial_amplitudes is not None:
            if len(propagation.initial_amplitudes) != lattice.n_sites:
                raise ConfigError(f"expected {lattice.n_sites} amplitudes", field="propagation.initial.amplitudes")
            if not any(propagation.initial_amplitudes):
                raise ConfigError("initial state has zero power", field="propagation.initial.amplitudes")
    elif "propagation" in document:
        raise ConfigError(f"not used by scenario '{scenario.value}'", field="propagation")

    output = document.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("expected a path string", field="output")

    return RunConfig(
        scenario=scenario,
        lattice=lattice,
        modulation=modulation,
        sweeps=sweeps,
        sweep_tone=sweep_tone,
        tolerances=_parse_tolerances(document.get("tolerances", {})),
        threshold=threshold,
        propagation=propagation,
        averaging=_parse_averaging(document.get("averaging", {})),
        output=output,
    )


def parse_config(text: str) -> RunConfig:
    """
    Parses and validates a JSON run configuration.

    Raises:
        ConfigError: With the line/column of a syntax error, or the field path of
            a schema or model violation.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(e.msg, line=e.lineno, column=e.colno) from e
    config = config_from_dict(document)
    logger.debug("Parsed %s config for %d sites", config.scenario.value, config.lattice.n_sites)
    return config


# --- Echo ------------------------------------------------------------------------

def _tone_to_dict(tone: ModulationTone) -> Dict[str, Any]:
    item: Dict[str, Any] = {"kappa": tone.kappa, "phi": tone.phi}
    if tone.is_rational:
        ratio = Fraction(tone.ratio)
        item["rational"] = [ratio.numerator, ratio.denominator]
    else:
        item["irrational"] = tone.beta
    return item


def config_to_dict(config: RunConfig) -> Dict[str, Any]:
    lattice = config.lattice
    document: Dict[str, Any] = {
        "scenario": config.scenario.value,
        "lattice": {
            "n_sites": lattice.n_sites,
            "tunnelings": list(lattice.tunnelings),
            "gammas": list(lattice.gammas),
            "boundary": lattice.boundary.value,
        },
        "modulation": {
            "l": config.modulation.l,
            "omega0": config.modulation.omega0,
            "tones": [_tone_to_dict(tone) for tone in config.modulation.tones],
        },
    }
    if config.sweeps:
        scan: Dict[str, Any] = {name: {"min": s.min, "max": s.max, "points": s.points}
                                for name, s in config.sweeps}
        scan["tone"] = config.sweep_tone
        document["scan"] = scan
    tolerances = config.tolerances
    document["tolerances"] = {
        "tol_im": tolerances.tol_im,
        "threshold_tol": tolerances.threshold_tol,
        "threshold_grid": tolerances.threshold_grid,
        "m_max": tolerances.m_max,
    }
    if config.threshold is not None:
        document["threshold"] = {"gamma_max": config.threshold.gamma_max}
    if config.propagation is not None:
        settings = config.propagation
        if settings.initial_site is not None:
            initial: Dict[str, Any] = {"site": settings.initial_site}
        else:
            initial = {"amplitudes": [[a.real, a.imag] for a in settings.initial_amplitudes]}
        document["propagation"] = {"z_end": settings.z_end, "steps": settings.steps,
                                   "stride": settings.stride, "initial": initial}
    document["averaging"] = {"window_periods": config.averaging.window_periods,
                             "steps_per_period": config.averaging.steps_per_period}
    if config.output is not None:
        document["output"] = config.output
    return document


def dump_config(config: RunConfig) -> str:
    return json.dumps(config_to_dict(config), indent=2) + "\n"
