# -*- coding: utf-8 -*-
"""
Eigenvalue computation and reality classification.

Dense spectra go through LAPACK (Hessenberg reduction and shifted QR). The
dimer, the trimer and the dimerized ring also have closed forms here, and
`pt_threshold` locates the gain/loss strength at which a family of effective
Hamiltonians first leaves the real phase.
"""
import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment, minimize_scalar

from .config import (MAX_SITES, REALITY_TOL_SCALE, RESIDUAL_TOL, THRESHOLD_GRID_POINTS,
                     THRESHOLD_TOL)
from .errors import DomainError, NumericalError
from .floquet import EffectiveCoupling, build_effective_hamiltonian
from .lattice import ComplexMatrix, LatticeSpec
from .special import bessel_j

logger = logging.getLogger(__name__)

HamiltonianFamily = Callable[[float], ComplexMatrix]


def reality_tolerance(eigenvalues) -> float:
    """Scale-aware tolerance on |Im E|: REALITY_TOL_SCALE * max(1, spectral radius)."""
    values = np.asarray(eigenvalues, dtype=complex)
    radius = float(np.max(np.abs(values))) if values.size else 0.0
    return REALITY_TOL_SCALE * max(1.0, radius)


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: Tuple[complex, ...]
    max_abs_imag: float
    is_real: bool
    tol_im: float

    @classmethod
    def from_eigenvalues(cls, eigenvalues, tol_im: Optional[float] = None) -> "SpectrumResult":
        values = [complex(e) for e in np.ravel(np.asarray(eigenvalues, dtype=complex))]
        values.sort(key=lambda e: (e.real, e.imag))
        if tol_im is None:
            tol_im = reality_tolerance(values)
        max_abs_imag = max((abs(e.imag) for e in values), default=0.0)
        return cls(tuple(values), max_abs_imag, max_abs_imag < tol_im, float(tol_im))

    def as_array(self) -> np.ndarray:
        return np.array(self.eigenvalues, dtype=complex)


def _as_square(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] == 0:
        raise DomainError(f"Expected a non-empty square matrix, got shape {h.shape}")
    if h.shape[0] > MAX_SITES:
        raise DomainError(f"Matrix dimension {h.shape[0]} exceeds the supported {MAX_SITES}")
    if not np.all(np.isfinite(h)):
        raise DomainError("Matrix has non-finite entries")
    return h


def eigenvalues_dense(h: ComplexMatrix, tol_im: Optional[float] = None,
                      check_residual: bool = False) -> SpectrumResult:
    """
    All eigenvalues of a general complex matrix.

    Args:
        h: Square complex matrix of dimension <= MAX_SITES.
        tol_im: Reality tolerance; scale-aware default when None.
        check_residual: Also compute eigenvectors and require
            ||(H - E) v|| / (||H|| ||v||) < RESIDUAL_TOL for each of them.

    Raises:
        DomainError: If h is not a finite square matrix of supported size.
        NumericalError: If LAPACK fails to converge or a residual check fails.
    """
    h = _as_square(h)
    try:
        if check_residual:
            values, vectors = scipy.linalg.eig(h)
        else:
            values = scipy.linalg.eigvals(h)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise NumericalError(f"Eigenvalue iteration did not converge: {e}") from e
    if check_residual:
        scale = np.linalg.norm(h, 2)
        if scale > 0:
            residuals = np.linalg.norm(h @ vectors - vectors * values, axis=0)
            residuals /= scale * np.linalg.norm(vectors, axis=0)
            worst = float(np.max(residuals))
            if worst >= RESIDUAL_TOL:
                raise NumericalError(f"Eigenpair residual {worst:.3g} exceeds {RESIDUAL_TOL:g}")
    return SpectrumResult.from_eigenvalues(values, tol_im)


def eigenvalues_batch(stack, tol_im: Optional[float] = None) -> List[SpectrumResult]:
    """Spectra of a stack of matrices with shape (count, dim, dim)."""
    stack = np.asarray(stack, dtype=complex)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise DomainError(f"Expected a stack of square matrices, got shape {stack.shape}")
    if stack.shape[1] > MAX_SITES:
        raise DomainError(f"Matrix dimension {stack.shape[1]} exceeds the supported {MAX_SITES}")
    try:
        values = np.linalg.eigvals(stack)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"Eigenvalue iteration did not converge: {e}") from e
    return [SpectrumResult.from_eigenvalues(row, tol_im) for row in values]


def match_spectra(a, b) -> float:
    """Largest distance between paired eigenvalues under a minimum-weight pairing."""
    a = a.as_array() if isinstance(a, SpectrumResult) else np.ravel(np.asarray(a, dtype=complex))
    b = b.as_array() if isinstance(b, SpectrumResult) else np.ravel(np.asarray(b, dtype=complex))
    if a.shape != b.shape:
        raise DomainError(f"Cannot pair spectra of sizes {a.size} and {b.size}")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols])) if a.size else 0.0


# --- Dimer -----------------------------------------------------------------------

def dimer_spectrum(T: float, l: int, kappa: float, gamma: float) -> SpectrumResult:
    """E = -/+ sqrt(|T J_{-l}(kappa)|^2 - gamma^2)."""
    if not T > 0:
        raise DomainError(f"Tunneling T must be positive, got {T!r}")
    root = cmath.sqrt((T * bessel_j(-l, kappa)) ** 2 - gamma ** 2)
    return SpectrumResult.from_eigenvalues([-root, root])


# --- Trimer ----------------------------------------------------------------------

@dataclass(frozen=True)
class TrimerSpec:
    """Open trimer with gain/loss (gamma, s gamma, -(1 + s) gamma)."""
    T1: float
    T2: float
    s: float
    gamma: float
    coupling_mag: float

    def __post_init__(self):
        if not (self.T1 > 0 and self.T2 > 0):
            raise DomainError(f"Trimer tunnelings must be positive, got {self.T1!r}, {self.T2!r}")
        if self.coupling_mag < 0:
            raise DomainError(f"coupling_mag must be >= 0, got {self.coupling_mag!r}")

    @property
    def lattice(self) -> LatticeSpec:
        return LatticeSpec.trimer(self.T1, self.T2, self.s, self.gamma)

    def effective_hamiltonian(self) -> ComplexMatrix:
        return build_effective_hamiltonian(self.lattice, self.coupling_mag)


def trimer_coefficients(spec: TrimerSpec) -> Tuple[float, float]:
    """(a, b) of det(H_eff - E) = -(E^3 - a E - i b)."""
    j2 = spec.coupling_mag ** 2
    g, s = spec.gamma, spec.s
    a = (spec.T1 ** 2 + spec.T2 ** 2) * j2 - g ** 2 * (1 + s + s * s)
    b = g * (g ** 2 * s * (1 + s) + (spec.T1 ** 2 * (1 + s) - spec.T2 ** 2) * j2)
    return a, b


def trimer_spectrum(spec: TrimerSpec) -> SpectrumResult:
    """Roots of E^3 - a E - i b = 0 via the companion matrix."""
    a, b = trimer_coefficients(spec)
    if b == 0.0 and a >= 0.0:
        root = math.sqrt(a)
        return SpectrumResult.from_eigenvalues([-root, 0.0, root])
    roots = np.roots([1.0, 0.0, -a, -1j * b])
    residual = np.max(np.abs(roots ** 3 - a * roots - 1j * b))
    scale = max(1.0, abs(a) ** 1.5, abs(b))
    if residual >= RESIDUAL_TOL * scale:
        raise NumericalError(f"Cubic root residual {residual:.3g} exceeds tolerance")
    return SpectrumResult.from_eigenvalues(roots)


def trimer_gamma_real_points(T1: float, T2: float, s: float, coupling_mag: float) -> Tuple[float, float]:
    """
    The impurity strengths gamma_-/+ at which b vanishes for gamma != 0.

    Raises:
        DomainError: Unless s (1 + s) > 0 and T2^2 > T1^2 s (1 + s), or when
            T2^2 <= T1^2 (1 + s) leaves no real solution.
    """
    ss = s * (1 + s)
    if not ss > 0:
        raise DomainError(f"Requires s (1 + s) > 0, got s = {s!r}")
    if not T2 ** 2 > T1 ** 2 * ss:
        raise DomainError("Requires T2^2 > T1^2 s (1 + s)")
    numerator = T2 ** 2 - T1 ** 2 * (1 + s)
    if not numerator > 0:
        raise DomainError("Requires T2^2 > T1^2 (1 + s) for a real gamma")
    gamma = abs(coupling_mag) * math.sqrt(numerator / ss)
    return -gamma, gamma


def trimer_real_point_spectrum(T1: float, T2: float, s: float, coupling_mag: float) -> SpectrumResult:
    """Spectrum {0, -/+ sqrt(a)} at gamma_-/+, where b = 0."""
    gamma_minus, _ = trimer_gamma_real_points(T1, T2, s, coupling_mag)
    a, _ = trimer_coefficients(TrimerSpec(T1, T2, s, gamma_minus, abs(coupling_mag)))
    root = cmath.sqrt(a)
    return SpectrumResult.from_eigenvalues([-root, 0.0, root])


def trimer_critical_gamma(T: float, coupling_mag: float) -> float:
    """gamma_c = sqrt(2) T |J| of the s = 0, T1 = T2 = T trimer."""
    return math.sqrt(2.0) * T * abs(coupling_mag)


# --- Dimerized ring --------------------------------------------------------------

@dataclass(frozen=True)
class DimerizedRingSpec:
    """T_n = T (n odd), c T (n even), gamma_n = (-1)^n gamma on a ring; q is the Bloch momentum."""
    c: float
    T: float
    gamma: float
    coupling: EffectiveCoupling
    q: float = 0.0

    def __post_init__(self):
        if not (self.c > 0 and self.T > 0):
            raise DomainError(f"c and T must be positive, got c={self.c!r}, T={self.T!r}")

    def at(self, q: float) -> "DimerizedRingSpec":
        return DimerizedRingSpec(self.c, self.T, self.gamma, self.coupling, q)


def _band_bracket(c: float, q, theta: float):
    return (c - 1.0) ** 2 + 4.0 * c * np.cos((q - theta) / 2.0) ** 2


def band_radicand(spec: DimerizedRingSpec, q=None):
    """((c-1)^2 + 4 c cos^2((q - Theta)/2)) |T_eff|^2 - gamma^2; q defaults to spec.q."""
    q = spec.q if q is None else q
    t_eff = spec.T * spec.coupling.magnitude
    return _band_bracket(spec.c, q, spec.coupling.peierls_phase) * t_eff ** 2 - spec.gamma ** 2


def band_energy(spec: DimerizedRingSpec) -> Tuple[complex, complex]:
    root = cmath.sqrt(float(band_radicand(spec)))
    return -root, root


def band_critical_gamma(c: float, T: float, coupling: EffectiveCoupling) -> float:
    """gamma_PT = |(c - 1) T_eff| of the dimerized ring."""
    return abs((c - 1.0) * T * coupling.magnitude)


def ring_hamiltonian(spec: DimerizedRingSpec, n_cells: int) -> ComplexMatrix:
    """
    Explicit dimerized ring of 2 * n_cells sites whose spectrum is band_energy at
    q_k = 2 pi k / n_cells. Intra-cell bonds carry -T |c_eff|, the inter-cell bond
    carries the Peierls phase.
    """
    if n_cells < 1 or 2 * n_cells > MAX_SITES:
        raise DomainError(f"n_cells must be in 1..{MAX_SITES // 2}, got {n_cells}")
    size = 2 * n_cells
    magnitude = spec.T * spec.coupling.magnitude
    phase = cmath.exp(1j * spec.coupling.peierls_phase)
    h = np.zeros((size, size), dtype=complex)
    for cell in range(n_cells):
        a, b = 2 * cell, 2 * cell + 1
        nxt = (b + 1) % size
        h[a, b] += -magnitude
        h[b, a] += -magnitude
        h[nxt, b] += -spec.c * magnitude * phase
        h[b, nxt] += -spec.c * magnitude * phase.conjugate()
        h[a, a] += -1j * spec.gamma
        h[b, b] += 1j * spec.gamma
    return h


class BandMinimum(NamedTuple):
    q_min: float
    energy_min: float
    radicand_min: float


def band_minimum(spec: DimerizedRingSpec, q_points: int = 1024) -> BandMinimum:
    """
    Bottom of the lower band and the smallest radicand over q in (-pi, pi].

    A q grid brackets both extrema; a bounded scalar minimization refines them.
    The energy minimum is only meaningful in the real phase.
    """
    if q_points < 3:
        raise DomainError(f"q_points must be >= 3, got {q_points}")
    step = 2.0 * math.pi / q_points
    grid = -math.pi + step * np.arange(1, q_points + 1)
    radicand = band_radicand(spec, grid)

    def refine(objective, centre):
        found = minimize_scalar(objective, bounds=(centre - step, centre + step),
                                method="bounded", options={"xatol": 1e-10})
        return float(found.x), float(found.fun)

    q_top, negative_top = refine(lambda q: -float(band_radicand(spec, q)), grid[np.argmax(radicand)])
    _, radicand_min = refine(lambda q: float(band_radicand(spec, q)), grid[np.argmin(radicand)])
    q_min = math.remainder(q_top, 2.0 * math.pi)
    if q_min == -math.pi:
        q_min = math.pi
    energy_min = -math.sqrt(max(-negative_top, 0.0))
    return BandMinimum(q_min, energy_min, radicand_min)


# --- Threshold -------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdResult:
    gamma_star: float
    unbroken: bool = False
    broken_at_zero: bool = False
    reentrant: bool = False


def gain_loss_family(lattice: LatticeSpec, coupling: Union[EffectiveCoupling, complex],
                     profile: Optional[Sequence[float]] = None) -> HamiltonianFamily:
    """
    gamma -> H_eff with gain/loss gamma * profile. The profile defaults to
    (-1)^n and has to be balanced.
    """
    if profile is None:
        profile = np.array([(-1.0) ** n for n in range(1, lattice.n_sites + 1)])
        if lattice.n_sites % 2:
            raise DomainError("An odd lattice needs an explicit balanced gain/loss profile")
    profile = np.asarray(profile, dtype=float)
    lattice.with_gammas(profile)  # validates length and balance

    def build(gamma: float) -> ComplexMatrix:
        return build_effective_hamiltonian(lattice.with_gammas(gamma * profile), coupling)

    return build


def pt_threshold(builder: HamiltonianFamily, gamma_max: float, tol: float = THRESHOLD_TOL,
                 grid_points: int = THRESHOLD_GRID_POINTS,
                 tol_im: Optional[float] = None) -> ThresholdResult:
    """
    First gamma in [0, gamma_max] where the spectrum of builder(gamma) stops being real.

    A coarse scan over `grid_points` values brackets the first break and bisection
    narrows the bracket to `tol`; the returned gamma_star is the last value known
    to be real. Flags:
      - unbroken: real on the whole grid, gamma_star = gamma_max
      - broken_at_zero: complex at gamma = 0, or breaking at 0+ (the bisected
        bracket collapses onto the reality tolerance); gamma_star = 0
      - reentrant: real again at a grid point past the first break
    """
    if not (gamma_max > 0 and math.isfinite(gamma_max)):
        raise DomainError(f"gamma_max must be positive, got {gamma_max!r}")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    if grid_points < 2:
        raise DomainError(f"grid_points must be >= 2, got {grid_points}")

    def broken(gamma: float) -> bool:
        return not eigenvalues_dense(builder(gamma), tol_im).is_real

    grid = np.linspace(0.0, gamma_max, grid_points)
    flags = [broken(g) for g in grid]
    if not any(flags):
        return ThresholdResult(gamma_max, unbroken=True)
    first = flags.index(True)
    if first == 0:
        return ThresholdResult(0.0, broken_at_zero=True)
    reentrant = not all(flags[first:])
    if reentrant:
        logger.warning("Gain/loss family turns real again after gamma = %g; "
                       "reporting the first break only", grid[first])

    lo, hi = float(grid[first - 1]), float(grid[first])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if broken(mid):
            hi = mid
        else:
            lo = mid
    logger.debug("Threshold bracket [%.12g, %.12g]", lo, hi)
    if first == 1 and lo <= eigenvalues_dense(builder(lo), tol_im).tol_im:
        return ThresholdResult(0.0, broken_at_zero=True, reentrant=reentrant)
    return ThresholdResult(lo, reentrant=reentrant)


def effective_lattice_spectrum(lattice: LatticeSpec, coupling: Union[EffectiveCoupling, complex],
                               tol_im: Optional[float] = None) -> SpectrumResult:
    """Dense spectrum of H_eff for a lattice and one uniform effective coupling."""
    return eigenvalues_dense(build_effective_hamiltonian(lattice, coupling), tol_im)
