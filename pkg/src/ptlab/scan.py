# -*- coding: utf-8 -*-
"""
Scenario runners behind `ptlab run`.

Every runner returns its tables in memory; `write_output` serializes them as
CSV. Independent kappa columns are evaluated on a thread pool, and
`Executor.map` hands results back in submission order, so the row order never
depends on which worker finishes first.
"""
import csv
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, TextIO, Tuple

import numpy as np

from .floquet import (EffectiveCoupling, effective_coupling_numeric,
                      effective_coupling_harmonic_product, effective_coupling_resonant)
from .lattice import ModulationSpec
from .propagation import StateVector, propagate
from .runconfig import RunConfig, Scenario
from .spectra import (SpectrumResult, effective_lattice_spectrum, eigenvalues_batch,
                      gain_loss_family, pt_threshold)

logger = logging.getLogger(__name__)

MAIN_TABLE = "main"


@dataclass
class Table:
    header: Tuple[str, ...]
    rows: List[Tuple[Any, ...]] = field(default_factory=list)


@dataclass
class RunOutput:
    scenario: Scenario
    tables: Dict[str, Table]
    overflow: bool = False

    @property
    def main(self) -> Table:
        return self.tables[MAIN_TABLE]


@dataclass
class KappaScan:
    kappas: np.ndarray
    spectra: List[SpectrumResult]

    def rows(self) -> List[Tuple[Any, ...]]:
        return [(kappa, index, e.real, e.imag)
                for kappa, spectrum in zip(self.kappas, self.spectra)
                for index, e in enumerate(spectrum.eigenvalues)]

    def summary_rows(self) -> List[Tuple[Any, ...]]:
        return [(kappa, spectrum.max_abs_imag, spectrum.is_real)
                for kappa, spectrum in zip(self.kappas, self.spectra)]

    def real_windows(self) -> List[Tuple[float, float]]:
        """(first, last) kappa of every run of consecutive real grid points."""
        windows = []
        start = None
        for kappa, spectrum in zip(self.kappas, self.spectra):
            if spectrum.is_real and start is None:
                start = last = float(kappa)
            elif spectrum.is_real:
                last = float(kappa)
            elif start is not None:
                windows.append((start, last))
                start = None
        if start is not None:
            windows.append((start, last))
        return windows


@dataclass
class PhaseDiagram:
    """Reality of the spectrum on the (kappa, gamma^2 / T^2) grid, indexed [kappa, gamma_sq]."""
    kappa_axis: np.ndarray
    gamma_sq_axis: np.ndarray
    max_abs_imag: np.ndarray
    is_real: np.ndarray

    def rows(self) -> List[Tuple[Any, ...]]:
        return [(kappa, g2, float(self.max_abs_imag[i, j]), bool(self.is_real[i, j]))
                for i, kappa in enumerate(self.kappa_axis)
                for j, g2 in enumerate(self.gamma_sq_axis)]

    def boundary(self) -> np.ndarray:
        """Largest gamma^2 / T^2 of the real region below the first break, per kappa (NaN if none)."""
        edges = np.full(len(self.kappa_axis), np.nan)
        for i in range(len(self.kappa_axis)):
            broken = np.flatnonzero(~self.is_real[i])
            last_real = broken[0] - 1 if broken.size else len(self.gamma_sq_axis) - 1
            if last_real >= 0:
                edges[i] = self.gamma_sq_axis[last_real]
        return edges


# --- Formatting ------------------------------------------------------------------

def format_value(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(table: Table, stream: TextIO):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([format_value(v) for v in row])


def table_path(path: Path, name: str) -> Path:
    """`path` itself for the main table, `<stem>_<name><suffix>` next to it otherwise."""
    if name == MAIN_TABLE:
        return path
    return path.with_name(f"{path.stem}_{name}{path.suffix}")


def write_output(output: RunOutput, path: Optional[Path] = None) -> List[Path]:
    """Writes every table next to `path`, or only the main table to stdout when path is None."""
    if path is None:
        write_table(output.main, sys.stdout)
        skipped = [name for name in output.tables if name != MAIN_TABLE]
        if skipped:
            logger.info("No output path given; not writing table(s): %s", ", ".join(skipped))
        return []
    written = []
    for name, table in output.tables.items():
        target = table_path(path, name)
        with open(target, "w", encoding="utf-8", newline="") as f:
            write_table(table, f)
        written.append(target)
    return written


# --- Helpers ---------------------------------------------------------------------

def _map(function: Callable, items: Iterable, threads: int) -> List:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(function, items))


def _coupling(config: RunConfig, spec: Optional[ModulationSpec] = None) -> EffectiveCoupling:
    return effective_coupling_resonant(spec or config.modulation, config.tolerances.m_max)


def _with_kappa(config: RunConfig, kappa: float) -> ModulationSpec:
    return config.modulation.with_tone(config.sweep_tone, kappa=float(kappa))


# --- Scenarios -------------------------------------------------------------------

def run_spectrum(config: RunConfig) -> RunOutput:
    coupling = _coupling(config)
    spectrum = effective_lattice_spectrum(config.lattice, coupling, config.tolerances.tol_im)
    main = Table(("eig_index", "re_E", "im_E"),
                 [(i, e.real, e.imag) for i, e in enumerate(spectrum.eigenvalues)])
    summary = Table(("re_coupling", "im_coupling", "max_abs_imag", "is_real"),
                    [(coupling.value.real, coupling.value.imag, spectrum.max_abs_imag, spectrum.is_real)])
    return RunOutput(config.scenario, {MAIN_TABLE: main, "summary": summary})


def scan_kappa(config: RunConfig, threads: int = 1) -> KappaScan:
    kappas = config.sweep("kappa").axis()
    logger.info("Scanning %d kappa values on %d thread(s)", len(kappas), threads)

    def evaluate(kappa: float) -> SpectrumResult:
        coupling = _coupling(config, _with_kappa(config, kappa))
        return effective_lattice_spectrum(config.lattice, coupling, config.tolerances.tol_im)

    return KappaScan(kappas, _map(evaluate, kappas, threads))


def run_scan_kappa(config: RunConfig, threads: int = 1) -> RunOutput:
    scan = scan_kappa(config, threads)
    for start, stop in scan.real_windows():
        logger.info("Real spectrum for kappa in [%g, %g]", start, stop)
    return RunOutput(config.scenario, {
        MAIN_TABLE: Table(("kappa", "eig_index", "re_E", "im_E"), scan.rows()),
        "summary": Table(("kappa", "max_abs_imag", "is_real"), scan.summary_rows()),
    })


def phase_diagram(config: RunConfig, threads: int = 1) -> PhaseDiagram:
    """
    Grid of H_eff spectra with gain/loss gamma * profile, gamma = T_1 sqrt(g2),
    where the profile is the configured lattice gammas and T_1 the first tunneling.
    """
    kappas = config.sweep("kappa").axis()
    gamma_sq = config.sweep("gamma_sq").axis()
    gammas = config.lattice.tunnelings[0] * np.sqrt(gamma_sq)
    logger.info("Phase diagram on a %d x %d grid, %d thread(s)", len(kappas), len(gamma_sq), threads)

    def column(kappa: float) -> Tuple[np.ndarray, np.ndarray]:
        coupling = _coupling(config, _with_kappa(config, kappa))
        builder = gain_loss_family(config.lattice, coupling, config.lattice.gammas)
        spectra = eigenvalues_batch([builder(g) for g in gammas], config.tolerances.tol_im)
        return (np.array([s.max_abs_imag for s in spectra]),
                np.array([s.is_real for s in spectra], dtype=bool))

    columns = _map(column, kappas, threads)
    return PhaseDiagram(kappas, gamma_sq,
                        np.vstack([c[0] for c in columns]), np.vstack([c[1] for c in columns]))


def run_phase_diagram(config: RunConfig, threads: int = 1) -> RunOutput:
    diagram = phase_diagram(config, threads)
    header = ("kappa", "gamma_sq_over_T_sq", "max_abs_imag", "is_real")
    return RunOutput(config.scenario, {MAIN_TABLE: Table(header, diagram.rows())})


def _parameter_columns(config: RunConfig) -> Tuple[List[str], List[Any]]:
    names = ["n_sites", "boundary", "l", "omega0"]
    values: List[Any] = [config.lattice.n_sites, config.lattice.boundary.value,
                         config.modulation.l, config.modulation.omega0]
    for i, t in enumerate(config.lattice.tunnelings, start=1):
        names.append(f"tunneling_{i}")
        values.append(t)
    for i, g in enumerate(config.lattice.gammas, start=1):
        names.append(f"gamma_{i}")
        values.append(g)
    for i, tone in enumerate(config.modulation.tones, start=1):
        names += [f"kappa_{i}", f"beta_{i}", f"phi_{i}"]
        values += [tone.kappa, tone.beta, tone.phi]
    return names, values


def run_threshold(config: RunConfig) -> RunOutput:
    coupling = _coupling(config)
    builder = gain_loss_family(config.lattice, coupling, config.lattice.gammas)
    tolerances = config.tolerances
    result = pt_threshold(builder, config.threshold.gamma_max, tolerances.threshold_tol,
                          tolerances.threshold_grid, tolerances.tol_im)
    names, values = _parameter_columns(config)
    gamma_star: Any = "unbroken" if result.unbroken else result.gamma_star
    header = tuple(names + ["gamma_max", "threshold_tol", "gamma_star", "broken_at_zero", "reentrant"])
    row = tuple(values + [config.threshold.gamma_max, tolerances.threshold_tol, gamma_star,
                          result.broken_at_zero, result.reentrant])
    return RunOutput(config.scenario, {MAIN_TABLE: Table(header, [row])})


def run_propagate(config: RunConfig) -> RunOutput:
    settings = config.propagation
    n_sites = config.lattice.n_sites
    if settings.initial_site is not None:
        psi0 = StateVector.localized(n_sites, settings.initial_site)
    else:
        psi0 = StateVector(np.array(settings.initial_amplitudes, dtype=complex))
    result = propagate(config.lattice, config.modulation, psi0, settings.z_end, settings.steps,
                       settings.stride)

    rows = []
    last = len(result.trace) - 1
    for k, point in enumerate(result.trace):
        status = "final" if k == last and not result.overflow else "trace"
        for site, psi in enumerate(point.amplitudes, start=1):
            rows.append((point.z, site, psi.real, psi.imag, point.power, status))
    if result.overflow:
        final = result.final
        for site, psi in enumerate(final.amplitudes, start=1):
            rows.append((final.z, site, psi.real, psi.imag, final.power, "overflow"))
    header = ("z", "site", "re_psi", "im_psi", "power", "status")
    return RunOutput(config.scenario, {MAIN_TABLE: Table(header, rows)}, overflow=result.overflow)


def polychromatic_harmonics(spec: ModulationSpec) -> Optional[Tuple[List[float], float, float]]:
    """
    (harmonic kappas, irrational kappa, irrational beta) when the tones are the
    integer harmonics 1..M in order followed by at most one irrational tone;
    None otherwise.
    """
    harmonics = []
    tones = list(spec.tones)
    while tones and tones[0].is_rational:
        tone = tones.pop(0)
        if tone.ratio != len(harmonics) + 1:
            return None
        harmonics.append(tone.kappa)
    if len(tones) > 1 or not harmonics:
        return None
    if tones:
        return harmonics, tones[0].kappa, tones[0].beta
    return harmonics, 0.0, 1.0


def run_effective_coupling(config: RunConfig) -> RunOutput:
    spec = config.modulation
    resonant = _coupling(config)
    averaging = config.averaging
    numeric = effective_coupling_numeric(spec, averaging.window_periods, averaging.steps_per_period)

    def row(method: str, coupling: EffectiveCoupling) -> Tuple[Any, ...]:
        return (method, coupling.value.real, coupling.value.imag, coupling.magnitude,
                coupling.peierls_phase, coupling.gauge_phase, coupling.accuracy_warning)

    rows = [row("resonant_sum", resonant), row("averaging", numeric)]
    harmonics = polychromatic_harmonics(spec)
    if harmonics is not None:
        product = effective_coupling_harmonic_product(spec.l, *harmonics)
        rows.append(row("harmonic_product", EffectiveCoupling(product, spec.gauge_phase)))
        if abs(abs(product) - resonant.magnitude) > 1e-6:
            logger.info("Harmonic product %.6g differs from the resonance sum %.6g",
                        abs(product), resonant.magnitude)
    header = ("method", "re_value", "im_value", "magnitude", "peierls_phase", "gauge_phase",
              "accuracy_warning")
    return RunOutput(config.scenario, {MAIN_TABLE: Table(header, rows)})


def run(config: RunConfig, threads: int = 1) -> RunOutput:
    """Runs the configured scenario."""
    if config.scenario is Scenario.SCAN_KAPPA:
        return run_scan_kappa(config, threads)
    if config.scenario is Scenario.PHASE_DIAGRAM:
        return run_phase_diagram(config, threads)
    runners = {
        Scenario.SPECTRUM: run_spectrum,
        Scenario.THRESHOLD: run_threshold,
        Scenario.PROPAGATE: run_propagate,
        Scenario.EFFECTIVE_COUPLING: run_effective_coupling,
    }
    return runners[config.scenario](config)
