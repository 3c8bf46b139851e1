# -*- coding: utf-8 -*-
"""
Integer-order Bessel functions of the first kind and the Jacobi-Anger expansion.

Every effective-coupling formula in the package draws on a contiguous batch of
orders J_0(x) .. J_M(x), so the core routine returns the whole batch at once:
downward (Miller) recurrence normalized with J_0 + 2 * sum_k J_2k = 1, and the
ascending power series for small arguments. Negative orders and negative
arguments are resolved by the reflection identities, never computed separately.
"""
import logging
import math

import numpy as np

from .config import BESSEL_SERIES_CUTOFF, BESSEL_SUPPORT, TRUNCATION_PAD
from .errors import DomainError

logger = logging.getLogger(__name__)

# Rescaling bounds for the downward recurrence.
BIGNO = 1.0e250
BIGNI = 1.0e-250
# Extra start order for the Miller recurrence, see _miller_start_order.
ACC = 160.0


def _check_argument(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"Bessel argument must be finite, got {x!r}")
    if abs(x) > BESSEL_SUPPORT:
        logger.warning("Bessel argument %g lies outside the supported range |x| <= %g",
                       x, BESSEL_SUPPORT)
    return x


def _series_orders(m_max: int, x: float) -> np.ndarray:
    """Ascending power series for J_0..J_m_max at 0 <= x < BESSEL_SERIES_CUTOFF."""
    half = 0.5 * x
    orders = np.arange(m_max + 1)
    # Leading terms (x/2)^m / m!, built by cumulative product to avoid overflow.
    lead = np.ones(m_max + 1)
    if m_max > 0:
        lead[1:] = np.cumprod(half / orders[1:])
    total = lead.copy()
    term = lead.copy()
    q = -half * half
    for k in range(1, 40):
        term = term * q / (k * (k + orders))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _miller_start_order(m_max: int, x: float) -> int:
    n = max(m_max, int(math.ceil(x)))
    start = n + TRUNCATION_PAD + int(math.sqrt(ACC * max(n, 1)))
    return start + (start % 2)


def _miller_orders(m_max: int, x: float) -> np.ndarray:
    """Downward recurrence for J_0..J_m_max at x >= BESSEL_SERIES_CUTOFF."""
    start = _miller_start_order(m_max, x)
    b = np.zeros(start + 2)
    b[start] = 1.0
    tox = 2.0 / x
    for j in range(start, 0, -1):
        b[j - 1] = j * tox * b[j] - b[j + 1]
        if abs(b[j - 1]) > BIGNO:
            b[j - 1:] *= BIGNI
    norm = b[0] + 2.0 * np.sum(b[2:start + 1:2])
    return b[:m_max + 1] / norm


def bessel_j_orders(m_max: int, x: float) -> np.ndarray:
    """
    Returns the array [J_0(x), J_1(x), ..., J_m_max(x)].

    Args:
        m_max: Highest non-negative order of the batch.
        x: Finite real argument.

    Raises:
        DomainError: If x is not finite or m_max is negative.
    """
    if m_max < 0:
        raise DomainError(f"m_max must be non-negative, got {m_max}")
    x = _check_argument(x)
    ax = abs(x)
    if ax == 0.0:
        values = np.zeros(m_max + 1)
        values[0] = 1.0
        return values
    if ax < BESSEL_SERIES_CUTOFF:
        values = _series_orders(m_max, ax)
    else:
        values = _miller_orders(m_max, ax)
    if x < 0:
        values[1::2] = -values[1::2]
    return values


def bessel_j_range(m_min: int, m_max: int, x: float) -> np.ndarray:
    """Returns J_m(x) for the signed orders m_min..m_max (inclusive)."""
    if m_max < m_min:
        return np.zeros(0)
    top = max(abs(m_min), abs(m_max))
    positive = bessel_j_orders(top, x)
    orders = np.arange(m_min, m_max + 1)
    values = positive[np.abs(orders)]
    # J_{-m} = (-1)^m J_m
    flip = (orders < 0) & (orders % 2 == 1)
    values[flip] = -values[flip]
    return values


def bessel_j(m: int, x: float) -> float:
    """Integer-order Bessel function of the first kind J_m(x)."""
    m = int(m)
    value = float(bessel_j_orders(abs(m), x)[abs(m)])
    if m < 0 and m % 2:
        return -value
    return value


def default_truncation(kappa: float) -> int:
    """Order cutoff past which J_m(kappa) is negligible."""
    return int(math.ceil(abs(kappa))) + TRUNCATION_PAD


def jacobi_anger_partial(kappa: float, theta: float, m_max: int) -> complex:
    """
    Partial Jacobi-Anger sum sum_{|m| <= m_max} J_m(kappa) e^{i m theta}.

    Converges to e^{i kappa sin(theta)} as m_max grows past |kappa|.
    """
    if m_max < 0:
        raise DomainError(f"m_max must be non-negative, got {m_max}")
    theta = float(theta)
    if not math.isfinite(theta):
        raise DomainError(f"Jacobi-Anger angle must be finite, got {theta!r}")
    orders = np.arange(-m_max, m_max + 1)
    coefficients = bessel_j_range(-m_max, m_max, kappa)
    return complex(np.sum(coefficients * np.exp(1j * orders * theta)))
