# -*- coding: utf-8 -*-
"""
Exact z-dependent dynamics i d(psi)/dz = H(z) psi and the one-period propagator.

The integrator is the classical fixed-step fourth-order Runge-Kutta scheme. It
works on a single state or on a block of states at once, which is how the
monodromy matrix propagates the N columns of the identity together.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .config import (MIN_MONODROMY_STEPS, MIN_RK4_STEPS_PER_PERIOD, OVERFLOW_NORM,
                     RK4_STEPS_PER_PERIOD)
from .errors import DomainError, NumericalError
from .lattice import ComplexMatrix, LatticeSpec, ModulationSpec, potential_gradient, static_hamiltonian
from .spectra import SpectrumResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Mode amplitudes psi_n at position z."""
    amplitudes: np.ndarray
    z: float = 0.0

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).ravel()
        if amplitudes.size < 2:
            raise DomainError(f"A state needs at least two amplitudes, got {amplitudes.size}")
        if not np.all(np.isfinite(amplitudes)) or not np.any(amplitudes):
            raise DomainError("A state needs finite amplitudes with non-zero power")
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "z", float(self.z))

    @classmethod
    def localized(cls, n_sites: int, site: int, z: float = 0.0) -> "StateVector":
        """All power in `site` (1-based)."""
        if not 1 <= site <= n_sites:
            raise DomainError(f"Site {site} outside 1..{n_sites}")
        amplitudes = np.zeros(n_sites, dtype=complex)
        amplitudes[site - 1] = 1.0
        return cls(amplitudes, z)

    @property
    def power(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class TracePoint:
    z: float
    amplitudes: np.ndarray
    power: float


@dataclass(frozen=True)
class PropagationResult:
    final: StateVector
    trace: List[TracePoint] = field(default_factory=list)
    overflow: bool = False
    steps_taken: int = 0


@dataclass(frozen=True)
class MonodromyResult:
    """U(Z) over one common period Z and its quasi-energies folded into (-Omega/2, Omega/2]."""
    matrix: ComplexMatrix
    multipliers: np.ndarray
    quasi_energies: np.ndarray
    period: float
    zone_width: float

    def spectrum(self, tol_im: Optional[float] = None) -> SpectrumResult:
        return SpectrumResult.from_eigenvalues(self.quasi_energies, tol_im)


def _rk4(lattice: LatticeSpec, spec: ModulationSpec, psi: np.ndarray, z0: float, z1: float,
         steps: int, on_step: Optional[Callable[[int, float, np.ndarray], None]] = None
         ) -> Tuple[np.ndarray, int, bool]:
    """
    Integrates from z0 to z1 in `steps` equal steps. psi is (N,) or (N, k).

    Returns the last state, the number of completed steps and the overflow flag.
    """
    h0 = static_hamiltonian(lattice)
    sites = lattice.site_numbers.reshape((-1,) + (1,) * (psi.ndim - 1))

    def rhs(z: float, y: np.ndarray) -> np.ndarray:
        return -1j * (h0 @ y + potential_gradient(spec, z) * sites * y)

    dz = (z1 - z0) / steps
    y = psi.astype(complex, copy=True)
    for step in range(1, steps + 1):
        z = z0 + (step - 1) * dz
        k1 = rhs(z, y)
        k2 = rhs(z + 0.5 * dz, y + 0.5 * dz * k1)
        k3 = rhs(z + 0.5 * dz, y + 0.5 * dz * k2)
        k4 = rhs(z + dz, y + dz * k3)
        y = y + dz / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        norm = np.linalg.norm(y)
        if not math.isfinite(norm) or norm > OVERFLOW_NORM:
            return y, step, True
        if on_step is not None:
            on_step(step, z0 + step * dz, y)
    return y, steps, False


def propagate(lattice: LatticeSpec, spec: ModulationSpec, psi0: StateVector, z_end: float,
              steps: int, record_every: int = 0) -> PropagationResult:
    """
    Integrates i d(psi)/dz = H(z) psi from psi0.z to z_end.

    Args:
        lattice: Lattice of the state.
        spec: Modulation defining f(z).
        psi0: Initial state.
        z_end: Final position, > psi0.z.
        steps: Number of RK4 steps; at least MIN_RK4_STEPS_PER_PERIOD per base period.
        record_every: Record a trace point every this many steps (0 keeps only
            the start and the end).

    Returns:
        PropagationResult; `overflow` is set instead of raising when the norm
        exceeds OVERFLOW_NORM, and `final` then holds the last finite state.
    """
    if psi0.amplitudes.size != lattice.n_sites:
        raise DomainError(f"State has {psi0.amplitudes.size} amplitudes for {lattice.n_sites} sites")
    if not (math.isfinite(z_end) and z_end > psi0.z):
        raise DomainError(f"z_end must be finite and beyond z0 = {psi0.z}, got {z_end!r}")
    if steps < 1:
        raise DomainError(f"steps must be positive, got {steps}")
    periods = (z_end - psi0.z) / spec.base_period
    if steps < MIN_RK4_STEPS_PER_PERIOD * periods:
        raise DomainError(f"{steps} steps resolve fewer than {MIN_RK4_STEPS_PER_PERIOD} "
                          f"per base period over {periods:.3g} periods")

    trace = [TracePoint(psi0.z, psi0.amplitudes.copy(), psi0.power)]
    last_finite = [psi0.z, psi0.amplitudes]

    def record(step: int, z: float, y: np.ndarray):
        last_finite[0], last_finite[1] = z, y
        if record_every and step % record_every == 0 and step != steps:
            trace.append(TracePoint(z, y.copy(), float(np.sum(np.abs(y) ** 2))))

    y, taken, overflow = _rk4(lattice, spec, psi0.amplitudes, psi0.z, z_end, steps, record)
    if overflow:
        logger.warning("Propagation overflowed at step %d of %d (norm > %g)", taken, steps, OVERFLOW_NORM)
        z_last, y_last = last_finite
        final = StateVector(y_last, z_last)
    else:
        final = StateVector(y, z_end)
        trace.append(TracePoint(z_end, y.copy(), final.power))
    return PropagationResult(final, trace, overflow, taken)


def power_ratio(result: PropagationResult) -> float:
    """max / min power over the recorded trace."""
    powers = [point.power for point in result.trace]
    return max(powers) / min(powers)


def fold_quasi_energies(values: Sequence[complex], zone_width: float) -> np.ndarray:
    """Shift real parts by multiples of zone_width into (-zone_width/2, zone_width/2]."""
    values = np.asarray(values, dtype=complex)
    real = values.real - zone_width * np.ceil((values.real - zone_width / 2.0) / zone_width)
    return real + 1j * values.imag


def monodromy(lattice: LatticeSpec, spec: ModulationSpec, steps: Optional[int] = None) -> MonodromyResult:
    """
    One-period propagator U(Z) and quasi-energies (i/Z) Log(lambda_k).

    Z is the common period of `spec`; `steps` defaults to RK4_STEPS_PER_PERIOD per
    base period contained in Z.

    Raises:
        DomainError: If a tone is irrational or steps < MIN_MONODROMY_STEPS.
        NumericalError: If the propagator overflows or is singular.
    """
    if not spec.is_periodic:
        raise DomainError("monodromy needs a periodic modulation; an irrational tone has no exact period")
    period = spec.common_period
    if steps is None:
        steps = int(round(RK4_STEPS_PER_PERIOD * period / spec.base_period))
    if steps < MIN_MONODROMY_STEPS:
        raise DomainError(f"monodromy needs at least {MIN_MONODROMY_STEPS} steps, got {steps}")

    identity = np.eye(lattice.n_sites, dtype=complex)
    u, _, overflow = _rk4(lattice, spec, identity, 0.0, period, steps)
    if overflow:
        raise NumericalError("Monodromy propagation overflowed")
    try:
        multipliers = scipy.linalg.eigvals(u)
    except scipy.linalg.LinAlgError as e:
        raise NumericalError(f"Eigenvalue iteration did not converge: {e}") from e
    if np.any(multipliers == 0):
        raise NumericalError("Monodromy matrix is singular")
    zone_width = 2.0 * math.pi / period
    quasi = 1j / period * np.log(multipliers)
    logger.debug("Monodromy over Z = %g with %d steps", period, steps)
    return MonodromyResult(u, multipliers, fold_quasi_energies(quasi, zone_width), period, zone_width)
