# -*- coding: utf-8 -*-
"""
Effective (z-averaged) couplings of the modulated lattice.

The high-frequency description replaces every tunneling T_n by T_n * c, where c is
the average of e^{i eta(z)}. This module provides:

- closed forms for monochromatic and bichromatic modulation and a product
  formula for integer harmonics,
- a general Jacobi-Anger resonance sum for any tone list,
- a brute-force averaging oracle that integrates e^{i eta(z)} numerically,
- assembly of the effective Hamiltonian.

Closed forms drop the constant -sum_i (kappa_i/beta_i) sin(phi_i)
that eta picks up from its lower integration limit and keep it as
`gauge_phase`, so `raw_value = value * e^{i gauge_phase}` is what the averaging
integral itself returns. Magnitudes and spectra do not depend on it.
"""
import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import simpson

from .config import MAX_PHASE_PER_STEP, MIN_QUADRATURE_STEPS, NEGLIGIBLE_TERM, QUADRATURE_STEPS
from .errors import DomainError
from .lattice import (ComplexMatrix, LatticeSpec, ModulationSpec, ModulationTone, eta,
                      hopping_matrix)
from .special import bessel_j, bessel_j_range, default_truncation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EffectiveCoupling:
    """Ratio T_eff / T of one bond."""
    value: complex
    gauge_phase: float = 0.0
    accuracy_warning: bool = False

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def peierls_phase(self) -> float:
        return cmath.phase(self.value)

    @property
    def raw_value(self) -> complex:
        return self.value * cmath.exp(1j * self.gauge_phase)


@dataclass(frozen=True)
class RationalBeta:
    """beta = p / q with p, q coprime positive integers."""
    p: int
    q: int

    def __post_init__(self):
        if int(self.p) != self.p or int(self.q) != self.q or self.p < 1 or self.q < 1:
            raise DomainError(f"p and q must be positive integers, got {self.p}/{self.q}")
        if math.gcd(int(self.p), int(self.q)) != 1:
            raise DomainError(f"p and q must be coprime, got {self.p}/{self.q}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "q", int(self.q))

    @property
    def value(self) -> float:
        return self.p / self.q


def effective_coupling_monochromatic(l: int, kappa: float, phi: float = 0.0) -> EffectiveCoupling:
    """T_eff / T = J_{-l}(kappa) e^{-i l phi}."""
    value = bessel_j(-l, kappa) * cmath.exp(-1j * l * phi)
    return EffectiveCoupling(value, gauge_phase=-kappa * math.sin(phi))


def effective_coupling_bichromatic(l: int, kappa1: float, phi1: float,
                                   beta: Union[RationalBeta, float], kappa2: float, phi2: float,
                                   m_max: Optional[int] = None) -> EffectiveCoupling:
    """
    Effective coupling of f(z) = omega0 (l + kappa1 cos(omega0 z + phi1)
    + kappa2 cos(beta omega0 z + phi2)).

    A RationalBeta sums the resonance set m = q k, the only second-tone orders
    for which the first-tone order -l - m beta is an integer. A plain float is a
    declared irrational ratio and keeps the m = 0 term alone.
    """
    rational = isinstance(beta, RationalBeta)
    ratio = beta.value if rational else float(beta)
    if not math.isfinite(ratio) or ratio <= 0:
        raise DomainError(f"Frequency ratio beta must be positive, got {beta!r}")
    x2 = kappa2 / ratio
    gauge = -kappa1 * math.sin(phi1) - x2 * math.sin(phi2)
    if m_max is None:
        m_max = int(math.ceil(max(abs(kappa1), abs(x2)))) + default_truncation(0.0)
    if m_max < 0:
        raise DomainError(f"m_max must be non-negative, got {m_max}")

    if not rational:
        value = bessel_j(-l, kappa1) * bessel_j(0, x2) * cmath.exp(-1j * l * phi1)
        return EffectiveCoupling(value, gauge_phase=gauge)

    p, q = beta.p, beta.q
    k = np.arange(-(m_max // q), m_max // q + 1)
    first_orders = -l - p * k
    first = bessel_j_range(int(first_orders.min()), int(first_orders.max()), kappa1)
    first = first[first_orders - first_orders.min()]
    second = bessel_j_range(-m_max, m_max, x2)[q * k + m_max]
    keep = (np.abs(first) >= NEGLIGIBLE_TERM) | (np.abs(second) >= NEGLIGIBLE_TERM)
    phases = np.exp(1j * q * k * (phi2 - ratio * phi1))
    total = np.sum((phases * first * second)[keep])
    return EffectiveCoupling(cmath.exp(-1j * l * phi1) * total, gauge_phase=gauge)


def effective_coupling_harmonic_product(l: int, harmonic_kappas: Sequence[float],
                                           irrational_kappa: float, beta: float) -> float:
    """
    Closed-form product J_0(kappa / beta) * prod_{m >= 1} J_{-l}(kappa_m / m),
    truncated at len(harmonic_kappas).
    """
    if not math.isfinite(beta) or beta <= 0:
        raise DomainError(f"Frequency ratio beta must be positive, got {beta!r}")
    product = bessel_j(0, irrational_kappa / beta)
    for m, kappa_m in enumerate(harmonic_kappas, start=1):
        product *= bessel_j(-l, kappa_m / m)
    return product


def polychromatic_spec(l: int, omega0: float, harmonic_kappas: Sequence[float],
                       harmonic_phis: Optional[Sequence[float]] = None,
                       irrational: Optional[Tuple[float, float, float]] = None) -> ModulationSpec:
    """
    Harmonics kappa_m cos(m omega0 z + phi_m), m = 1..M, plus an optional
    irrational tone given as (kappa, beta, phi).
    """
    phis = list(harmonic_phis) if harmonic_phis is not None else [0.0] * len(harmonic_kappas)
    tones = [ModulationTone.rational(kappa, m, 1, phi)
             for m, (kappa, phi) in enumerate(zip(harmonic_kappas, phis), start=1)]
    if irrational is not None:
        kappa, beta, phi = irrational
        tones.append(ModulationTone.irrational(kappa, beta, phi))
    return ModulationSpec(l, omega0, tuple(tones))


def effective_coupling_resonant(spec: ModulationSpec, m_max: Optional[int] = None) -> EffectiveCoupling:
    """
    Jacobi-Anger resonance sum for an arbitrary tone list.

    Rational tones live on the frequency lattice of step omega0 / Q, Q the lcm of
    their denominators; tone i moves by k_i = p_i Q / q_i per Bessel order. The
    running convolution of the tones' coefficient combs is read at frequency
    -l Q. Irrational tones are incommensurate with everything else and only
    their zeroth order survives the average.
    """
    rational = [tone for tone in spec.tones if tone.is_rational]
    irrational = [tone for tone in spec.tones if not tone.is_rational]
    big_q = math.lcm(*[tone.ratio.denominator for tone in rational]) if rational else 1
    target = -spec.l * big_q

    combs = []
    for tone in rational:
        step = tone.ratio.numerator * big_q // tone.ratio.denominator
        x = tone.kappa / tone.beta
        cutoff = default_truncation(x) if m_max is None else m_max
        orders = np.arange(-cutoff, cutoff + 1)
        coefficients = bessel_j_range(-cutoff, cutoff, x) * np.exp(1j * orders * tone.phi)
        combs.append((step, cutoff, coefficients))

    current = np.ones(1, dtype=complex)
    lowest = 0  # frequency of current[0]
    remaining = sum(step * cutoff for step, cutoff, _ in combs)
    for step, cutoff, coefficients in combs:
        kernel = np.zeros(2 * cutoff * step + 1, dtype=complex)
        kernel[::step] = coefficients
        current = np.convolve(current, kernel)
        lowest -= cutoff * step
        remaining -= cutoff * step
        # Only frequencies the remaining tones can still bring to the target matter.
        start = max(0, target - remaining - lowest)
        stop = min(len(current) - 1, target + remaining - lowest)
        if start > stop:
            return EffectiveCoupling(0.0, gauge_phase=spec.gauge_phase)
        current = current[start:stop + 1]
        lowest += start

    index = target - lowest
    value = complex(current[index]) if 0 <= index < len(current) else 0j
    for tone in irrational:
        value *= bessel_j(0, tone.kappa / tone.beta)
    return EffectiveCoupling(value, gauge_phase=spec.gauge_phase)


def effective_coupling_numeric(spec: ModulationSpec, window_periods: int = 1,
                               steps_per_period: int = QUADRATURE_STEPS) -> EffectiveCoupling:
    """
    Brute-force average (1/Z) integral_0^Z e^{i eta(z)} dz by composite Simpson.

    Z is `window_periods` common periods for a periodic spec, or that many base
    periods 2 pi / omega0 when an irrational tone is present. `steps_per_period`
    counts quadrature intervals per base period.
    """
    if window_periods < 1:
        raise DomainError(f"window_periods must be >= 1, got {window_periods}")
    period = spec.common_period if spec.is_periodic else spec.base_period
    window = window_periods * period
    intervals = max(2, int(round(steps_per_period * window / spec.base_period)))
    intervals += intervals % 2
    z = np.linspace(0.0, window, intervals + 1)
    integrand = np.exp(1j * eta(spec, z))
    integral = simpson(integrand.real, x=z) + 1j * simpson(integrand.imag, x=z)
    raw = integral / window

    max_rate = spec.omega0 * (abs(spec.l) + sum(tone.kappa for tone in spec.tones))
    phase_per_step = max_rate * window / intervals
    warn = steps_per_period < MIN_QUADRATURE_STEPS or phase_per_step > MAX_PHASE_PER_STEP
    if warn:
        logger.warning("Averaging quadrature is coarse: %d steps per period, %.3g rad per step",
                       steps_per_period, phase_per_step)
    gauge = spec.gauge_phase
    return EffectiveCoupling(raw * cmath.exp(-1j * gauge), gauge_phase=gauge, accuracy_warning=warn)


def build_effective_hamiltonian(lattice: LatticeSpec,
                                coupling: Union[EffectiveCoupling, complex]) -> ComplexMatrix:
    """H_eff: hopping -T_n c on (n, n+1), -T_n c* on (n+1, n), diagonal i gamma_n."""
    value = coupling.value if isinstance(coupling, EffectiveCoupling) else complex(coupling)
    h = hopping_matrix(lattice, value)
    h[np.diag_indices(lattice.n_sites)] += 1j * np.asarray(lattice.gammas)
    return h
