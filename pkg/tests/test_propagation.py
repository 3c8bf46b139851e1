# -*- coding: utf-8 -*-
"""
Unit tests for the RK4 propagation and the one-period monodromy matrix.
"""
import logging
import math

import numpy as np
import pytest
import scipy.linalg

from ptlab.errors import DomainError
from ptlab.lattice import LatticeSpec, ModulationSpec, ModulationTone, static_hamiltonian
from ptlab.propagation import (StateVector, fold_quasi_energies, monodromy, power_ratio, propagate)
from ptlab.spectra import dimer_spectrum, match_spectra


def test_rabi_oscillation_in_static_dimer():
    lattice = LatticeSpec.dimer(1.0, 0.0)
    result = propagate(lattice, ModulationSpec(0, 1.0), StateVector.localized(2, 1), math.pi / 2, 1000)
    assert abs(result.final.amplitudes[1]) ** 2 == pytest.approx(1.0, abs=1e-10)
    assert result.final.z == pytest.approx(math.pi / 2)
    assert not result.overflow
    assert result.steps_taken == 1000


def test_power_conserved_without_gain_loss():
    lattice = LatticeSpec.uniform(4, 1.0, [0.0] * 4)
    spec = ModulationSpec.monochromatic(1, 2.0, 1.2, 0.3)
    z_end = 10 * spec.base_period
    result = propagate(lattice, spec, StateVector.localized(4, 2), z_end, 10 * 4096, record_every=512)
    for point in result.trace:
        assert point.power == pytest.approx(1.0, abs=1e-9)


def test_trace_layout():
    lattice = LatticeSpec.dimer(1.0, 0.1)
    spec = ModulationSpec.monochromatic(1, 1.0, 1.0)
    result = propagate(lattice, spec, StateVector.localized(2, 1), spec.base_period, 256, record_every=64)
    assert [point.z for point in result.trace] == pytest.approx(
        [0.0, 0.25, 0.5, 0.75, 1.0] * np.array(spec.base_period))
    assert result.trace[0].power == 1.0
    assert result.trace[-1].power == result.final.power


def test_pseudo_pt_dimer_stays_bounded():
    lattice = LatticeSpec.dimer(1.0, 0.1)
    spec = ModulationSpec.monochromatic(1, 50.0, 1.8412)
    result = propagate(lattice, spec, StateVector.localized(2, 1), 2 * math.pi, 25600, record_every=64)
    assert not result.overflow
    assert power_ratio(result) < 10.0


def test_unmodulated_tilt_gives_exponential_growth():
    gamma = 0.1
    lattice = LatticeSpec.dimer(1.0, gamma)
    spec = ModulationSpec.monochromatic(1, 50.0, 0.0)
    z_end = 2 * math.pi
    result = propagate(lattice, spec, StateVector.localized(2, 1), z_end, 25600)
    assert result.final.power / math.exp(2 * gamma * z_end) == pytest.approx(1.0, rel=0.1)


def test_fourth_order_convergence():
    lattice = LatticeSpec.dimer(1.0, 0.1)
    spec = ModulationSpec.monochromatic(1, 1.0, 1.0, 0.2)
    psi0 = StateVector.localized(2, 1)
    z_end = spec.base_period

    def final(steps):
        return propagate(lattice, spec, psi0, z_end, steps).final.amplitudes

    reference = final(16384)
    coarse = np.linalg.norm(final(512) - reference)
    fine = np.linalg.norm(final(1024) - reference)
    assert 12.0 < coarse / fine < 20.0


def test_overflow_is_flagged(caplog):
    lattice = LatticeSpec.dimer(1.0, 50.0)
    with caplog.at_level(logging.WARNING, logger="ptlab.propagation"):
        result = propagate(lattice, ModulationSpec(0, 1.0), StateVector.localized(2, 1), 20.0, 20000,
                           record_every=100)
    assert result.overflow
    assert result.steps_taken < 20000
    assert math.isfinite(result.final.power)
    assert result.final.z < 20.0
    assert "overflowed" in caplog.text


def test_propagate_rejects_bad_arguments():
    lattice = LatticeSpec.dimer(1.0, 0.1)
    spec = ModulationSpec.monochromatic(1, 1.0, 1.0)
    with pytest.raises(DomainError):
        propagate(lattice, spec, StateVector.localized(3, 1), 1.0, 1000)
    with pytest.raises(DomainError):
        propagate(lattice, spec, StateVector.localized(2, 1, z=2.0), 1.0, 1000)
    with pytest.raises(DomainError):
        propagate(lattice, spec, StateVector.localized(2, 1), 10 * spec.base_period, 100)


def test_state_vector_validation():
    with pytest.raises(DomainError):
        StateVector([1.0])
    with pytest.raises(DomainError):
        StateVector([0.0, 0.0])
    with pytest.raises(DomainError):
        StateVector([1.0, np.inf])
    with pytest.raises(DomainError):
        StateVector.localized(4, 5)
    assert StateVector([1.0, 1j]).power == pytest.approx(2.0)


def test_fold_quasi_energies():
    folded = fold_quasi_energies([0.0, 1.0, 2.6, -2.6, 7.0 + 0.5j], 5.0)
    np.testing.assert_allclose(folded, [0.0, 1.0, -2.4, 2.4, 2.0 + 0.5j], atol=1e-15)
    assert fold_quasi_energies([2.5], 5.0)[0] == pytest.approx(2.5)


class TestMonodromy:
    def test_constant_hamiltonian(self):
        lattice = LatticeSpec.dimer(1.0, 0.1)
        spec = ModulationSpec(0, 10.0)
        result = monodromy(lattice, spec)
        exact = scipy.linalg.expm(-1j * static_hamiltonian(lattice) * result.period)
        assert np.max(np.abs(result.matrix - exact)) < 1e-10
        assert result.zone_width == pytest.approx(10.0)
        root = math.sqrt(1.0 - 0.01)
        assert match_spectra(result.quasi_energies, [-root, root]) < 1e-9
        assert result.spectrum().is_real

    def test_unitary_without_gain_loss(self):
        lattice = LatticeSpec.uniform(4, 1.0, [0.0] * 4)
        spec = ModulationSpec.monochromatic(1, 5.0, 1.2, 0.4)
        u = monodromy(lattice, spec).matrix
        assert np.max(np.abs(u @ u.conj().T - np.eye(4))) < 1e-8

    def test_period_covers_all_tones(self):
        spec = ModulationSpec(1, 4.0, (ModulationTone.rational(1.0), ModulationTone.rational(0.5, 3, 2)))
        result = monodromy(LatticeSpec.dimer(1.0, 0.0), spec)
        assert result.period == pytest.approx(2 * spec.base_period)
        assert result.zone_width == pytest.approx(2.0)
        assert np.all(np.abs(result.quasi_energies.real) <= result.zone_width / 2 + 1e-12)

    def test_rejects_irrational_and_short_runs(self):
        lattice = LatticeSpec.dimer(1.0, 0.1)
        irrational = ModulationSpec(1, 1.0, (ModulationTone.irrational(1.0, math.sqrt(2)),))
        with pytest.raises(DomainError):
            monodromy(lattice, irrational)
        with pytest.raises(DomainError):
            monodromy(lattice, ModulationSpec.monochromatic(1, 1.0, 1.0), steps=100)

    def test_dimer_approaches_effective_spectrum(self):
        lattice = LatticeSpec.dimer(1.0, 0.1)
        effective = dimer_spectrum(1.0, 1, 1.8412, 0.1)
        errors = []
        for omega0 in (25.0, 50.0, 100.0):
            result = monodromy(lattice, ModulationSpec.monochromatic(1, omega0, 1.8412))
            errors.append(match_spectra(result.quasi_energies, effective))
        assert errors[0] > errors[1] > errors[2]
        assert errors[0] < 0.03

    def test_alternating_chain_inside_and_outside_real_window(self):
        lattice = LatticeSpec.alternating(16, 1.0, 0.1)
        inside = monodromy(lattice, ModulationSpec.monochromatic(1, 100.0, 1.8), steps=4096)
        outside = monodromy(lattice, ModulationSpec.monochromatic(1, 100.0, 0.5), steps=4096)
        assert np.max(np.abs(inside.quasi_energies.imag)) < 0.01
        assert np.max(np.abs(outside.quasi_energies.imag)) > 0.05
