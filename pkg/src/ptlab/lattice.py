# -*- coding: utf-8 -*-
"""
Data model of the modulated lattice: the potential gradient f(z), its integral
eta(z), and the instantaneous tight-binding Hamiltonian H(z).

Sites are indexed n = 1..N in the physics formulas; matrices are 0-based.
"""
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import BALANCE_TOL
from .errors import DomainError

ComplexMatrix = np.ndarray


class Boundary(str, Enum):
    OPEN = "open"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class ModulationTone:
    """
    One cosine tone omega0 * kappa * cos(beta * omega0 * z + phi) of the gradient.

    `ratio` is the caller's rationality tag: a Fraction p/q for a rational
    frequency ratio, or None when beta is declared irrational. A float beta is
    never inspected to decide this.
    """
    kappa: float
    beta: float
    phi: float = 0.0
    ratio: Optional[Fraction] = None

    def __post_init__(self):
        if self.ratio is not None:
            ratio = Fraction(self.ratio)
            if ratio <= 0:
                raise DomainError(f"Frequency ratio must be positive, got {ratio}")
            object.__setattr__(self, "ratio", ratio)
            object.__setattr__(self, "beta", float(ratio))
        beta = float(self.beta)
        if not math.isfinite(beta) or beta <= 0:
            raise DomainError(f"Frequency ratio beta must be positive, got {self.beta!r}")
        object.__setattr__(self, "beta", beta)
        kappa, phi = float(self.kappa), float(self.phi)
        if kappa < 0:
            kappa, phi = -kappa, phi + math.pi
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def rational(cls, kappa: float, p: int = 1, q: int = 1, phi: float = 0.0) -> "ModulationTone":
        return cls(kappa=kappa, beta=p / q, phi=phi, ratio=Fraction(p, q))

    @classmethod
    def irrational(cls, kappa: float, beta: float, phi: float = 0.0) -> "ModulationTone":
        return cls(kappa=kappa, beta=beta, phi=phi, ratio=None)

    @property
    def is_rational(self) -> bool:
        return self.ratio is not None


@dataclass(frozen=True)
class ModulationSpec:
    """f(z) = omega0 * (l + sum_i kappa_i cos(beta_i omega0 z + phi_i))."""
    l: int
    omega0: float
    tones: Tuple[ModulationTone, ...] = ()

    def __post_init__(self):
        if int(self.l) != self.l:
            raise DomainError(f"dc index l must be an integer, got {self.l!r}")
        object.__setattr__(self, "l", int(self.l))
        omega0 = float(self.omega0)
        if not math.isfinite(omega0) or omega0 <= 0:
            raise DomainError(f"omega0 must be positive, got {self.omega0!r}")
        object.__setattr__(self, "omega0", omega0)
        object.__setattr__(self, "tones", tuple(self.tones))

    @classmethod
    def monochromatic(cls, l: int, omega0: float, kappa: float, phi: float = 0.0) -> "ModulationSpec":
        return cls(l, omega0, (ModulationTone.rational(kappa, 1, 1, phi),))

    @classmethod
    def bichromatic(cls, l: int, omega0: float, kappa1: float, phi1: float,
                    second: ModulationTone) -> "ModulationSpec":
        return cls(l, omega0, (ModulationTone.rational(kappa1, 1, 1, phi1), second))

    @property
    def is_periodic(self) -> bool:
        return all(tone.is_rational for tone in self.tones)

    @property
    def base_period(self) -> float:
        return 2.0 * math.pi / self.omega0

    @property
    def frequency_gcd(self) -> Fraction:
        """gcd of the rational frequency ratios {1, beta_i} in units of omega0."""
        if not self.is_periodic:
            raise DomainError("An irrational tone has no common period")
        ratios = [Fraction(1)] + [tone.ratio for tone in self.tones]
        numerator = reduce(math.gcd, (r.numerator for r in ratios))
        denominator = reduce(math.lcm, (r.denominator for r in ratios))
        return Fraction(numerator, denominator)

    @property
    def common_period(self) -> float:
        """Smallest Z with f(z + Z) = f(z) and eta(Z) a multiple of 2 pi."""
        return self.base_period / float(self.frequency_gcd)

    @property
    def gauge_phase(self) -> float:
        """Constant part of eta from the lower integration limit."""
        return -sum(tone.kappa / tone.beta * math.sin(tone.phi) for tone in self.tones)

    def with_tone(self, index: int, **changes) -> "ModulationSpec":
        """Copy with the given fields of one tone replaced."""
        tones = list(self.tones)
        old = tones[index]
        values = dict(kappa=old.kappa, beta=old.beta, phi=old.phi, ratio=old.ratio)
        values.update(changes)
        tones[index] = ModulationTone(**values)
        return ModulationSpec(self.l, self.omega0, tuple(tones))


@dataclass(frozen=True)
class LatticeSpec:
    """Site count, bond tunnelings T_n > 0, balanced gain/loss gamma_n and boundary."""
    n_sites: int
    tunnelings: Tuple[float, ...]
    gammas: Tuple[float, ...]
    boundary: Boundary = Boundary.OPEN

    def __post_init__(self):
        boundary = Boundary(self.boundary)
        object.__setattr__(self, "boundary", boundary)
        tunnelings = tuple(float(t) for t in self.tunnelings)
        gammas = tuple(float(g) for g in self.gammas)
        object.__setattr__(self, "tunnelings", tunnelings)
        object.__setattr__(self, "gammas", gammas)
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise DomainError(f"n_sites must be an integer >= 2, got {self.n_sites!r}")
        expected = self.n_sites if boundary is Boundary.PERIODIC else self.n_sites - 1
        if len(tunnelings) != expected:
            raise DomainError(
                f"A {boundary.value} lattice of {self.n_sites} sites needs {expected} "
                f"tunnelings, got {len(tunnelings)}")
        if any(not (t > 0 and math.isfinite(t)) for t in tunnelings):
            raise DomainError("Every tunneling T_n must be a finite positive number")
        if len(gammas) != self.n_sites:
            raise DomainError(f"Expected {self.n_sites} gain/loss values, got {len(gammas)}")
        if any(not math.isfinite(g) for g in gammas):
            raise DomainError("Gain/loss values must be finite")
        imbalance = math.fsum(gammas)
        scale = max([1.0] + [abs(g) for g in gammas])
        if abs(imbalance) >= BALANCE_TOL * scale:
            raise DomainError(
                f"Gain and loss must be balanced (sum of gamma_n = 0), got sum {imbalance:g}")

    @classmethod
    def uniform(cls, n_sites: int, tunneling: float, gammas: Sequence[float],
                boundary: Union[Boundary, str] = Boundary.OPEN) -> "LatticeSpec":
        boundary = Boundary(boundary)
        bonds = n_sites if boundary is Boundary.PERIODIC else n_sites - 1
        return cls(n_sites, (tunneling,) * bonds, tuple(gammas), boundary)

    @classmethod
    def dimer(cls, tunneling: float, gamma: float) -> "LatticeSpec":
        return cls(2, (tunneling,), (gamma, -gamma))

    @classmethod
    def trimer(cls, t1: float, t2: float, s: float, gamma: float) -> "LatticeSpec":
        return cls(3, (t1, t2), (gamma, s * gamma, -(1.0 + s) * gamma))

    @classmethod
    def alternating(cls, n_sites: int, tunneling: float, gamma: float,
                    boundary: Union[Boundary, str] = Boundary.OPEN) -> "LatticeSpec":
        """gamma_n = (-1)^n gamma for n = 1..N."""
        return cls.uniform(n_sites, tunneling, alternating_profile(n_sites) * gamma, boundary)

    @property
    def bonds(self) -> List[Tuple[int, int, float]]:
        """(row, column, T_n) of each bond in 0-based site indices."""
        pairs = [(n, n + 1, t) for n, t in zip(range(self.n_sites - 1), self.tunnelings)]
        if self.boundary is Boundary.PERIODIC:
            pairs.append((self.n_sites - 1, 0, self.tunnelings[-1]))
        return pairs

    @property
    def site_numbers(self) -> np.ndarray:
        return np.arange(1, self.n_sites + 1, dtype=float)

    def with_gammas(self, gammas: Iterable[float]) -> "LatticeSpec":
        return LatticeSpec(self.n_sites, self.tunnelings, tuple(gammas), self.boundary)


def alternating_profile(n_sites: int) -> np.ndarray:
    return np.array([(-1.0) ** n for n in range(1, n_sites + 1)])


def potential_gradient(spec: ModulationSpec, z):
    """f(z); accepts a scalar or a numpy array of positions."""
    z = np.asarray(z, dtype=float)
    value = np.full(z.shape, float(spec.l))
    for tone in spec.tones:
        value = value + tone.kappa * np.cos(tone.beta * spec.omega0 * z + tone.phi)
    value = spec.omega0 * value
    return float(value) if value.ndim == 0 else value


def eta(spec: ModulationSpec, z):
    """Closed-form eta(z) = integral_0^z f(z') dz'; scalar or array."""
    z = np.asarray(z, dtype=float)
    value = spec.l * spec.omega0 * z
    for tone in spec.tones:
        value = value + tone.kappa / tone.beta * (
            np.sin(tone.beta * spec.omega0 * z + tone.phi) - math.sin(tone.phi))
    return float(value) if np.ndim(value) == 0 else value


def hopping_matrix(lattice: LatticeSpec, coupling: complex = 1.0) -> ComplexMatrix:
    """-T_n * coupling on (n, n+1) and -T_n * conj(coupling) on (n+1, n)."""
    h = np.zeros((lattice.n_sites, lattice.n_sites), dtype=complex)
    for row, col, t in lattice.bonds:
        h[row, col] += -t * coupling
        h[col, row] += -t * np.conj(coupling)
    return h


def static_hamiltonian(lattice: LatticeSpec) -> ComplexMatrix:
    """Hopping plus i gamma_n; H(z) without the gradient term."""
    return hopping_matrix(lattice) + np.diag(1j * np.asarray(lattice.gammas))


def hamiltonian_at(lattice: LatticeSpec, spec: ModulationSpec, z: float) -> ComplexMatrix:
    """Instantaneous H(z) with diagonal f(z) n + i gamma_n."""
    h = static_hamiltonian(lattice)
    h[np.diag_indices(lattice.n_sites)] += potential_gradient(spec, z) * lattice.site_numbers
    return h
