"""Closed-form small-theta results around the paramagnetic product state.

Everything here is analytic: generalized harmonic numbers, the overlap
function ``G_N(alpha)``, first-order QFI densities for the six collective
operators, second-order energies, the ferromagnetic critical line and the
fidelity susceptibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError
from .lattice import ALL_LABELS

ZETA_CUTOFF = 10_000
VALIDITY_THRESHOLD = 0.1
SQRT8 = math.sqrt(8.0)


def _k(n: int) -> np.ndarray:
    # summed from the smallest terms up for accuracy
    return np.arange(n, 0, -1, dtype=float)


def harmonic_number(n: int, alpha: float) -> float:
    """``H_{n,alpha} = sum_{k=1}^n k^(-alpha)``; ``alpha`` may be negative or infinite."""
    if n < 0:
        raise DomainError("harmonic_number needs n >= 0")
    if n == 0:
        return 0.0
    if math.isinf(alpha):
        return 1.0 if alpha > 0 else math.inf
    return float(np.sum(_k(n) ** (-float(alpha))))


def harmonic_number_dalpha(n: int, alpha: float) -> float:
    """``d H_{n,alpha} / d alpha = -sum_k ln(k) k^(-alpha)``."""
    if n <= 1 or math.isinf(alpha):
        return 0.0
    k = _k(n)
    return float(-np.sum(np.log(k) * k ** (-float(alpha))))


def zeta(s: float) -> float:
    """Riemann zeta for real ``s > 1`` by a truncated sum plus an Euler-Maclaurin tail."""
    if not s > 1:
        raise DomainError(f"zeta needs s > 1, got {s}")
    if math.isinf(s):
        return 1.0
    K = ZETA_CUTOFF
    tail = K ** (1 - s) / (s - 1) - 0.5 * K ** (-s) + s / 12.0 * K ** (-s - 1)
    return harmonic_number(K, s) + tail


def zeta_derivative(s: float) -> float:
    """``d zeta / d s`` for ``s > 1`` (same truncation as :func:`zeta`)."""
    if not s > 1:
        raise DomainError(f"zeta_derivative needs s > 1, got {s}")
    if math.isinf(s):
        return 0.0
    K = float(ZETA_CUTOFF)
    L = math.log(K)
    tail = (
        -L * K ** (1 - s) / (s - 1)
        - K ** (1 - s) / (s - 1) ** 2
        + 0.5 * L * K ** (-s)
        + K ** (-s - 1) / 12.0
        - s / 12.0 * L * K ** (-s - 1)
    )
    return harmonic_number_dalpha(ZETA_CUTOFF, s) + tail


def _pair_sum(n: int, alpha: float) -> float:
    # N H_{N,a} - H_{N,a-1} = sum_{i<j} |i-j|^(-a); the alpha = inf limit keeps the N-1 bonds
    if math.isinf(alpha):
        return float(n - 1)
    return n * harmonic_number(n, alpha) - harmonic_number(n, alpha - 1)


def g_function(n: int, alpha: float) -> float:
    """``G_N(alpha) = (N H_{N,alpha} - H_{N,alpha-1}) / sqrt(8 N (N-1))``."""
    if n < 2:
        raise DomainError("g_function needs N >= 2")
    if alpha < 0:
        raise DomainError("alpha must be >= 0")
    return _pair_sum(n, alpha) / math.sqrt(8.0 * n * (n - 1))


def g_asymptotic(n: float, alpha: float) -> float:
    """Large-N form of ``G_N(alpha)``: zeta, log or power branch."""
    if alpha < 0:
        raise DomainError("alpha must be >= 0")
    if alpha > 1:
        return zeta(alpha) / SQRT8
    if alpha == 1:
        return math.log(n) / SQRT8
    return n ** (1 - alpha) / ((1 - alpha) * (2 - alpha)) / SQRT8


def g_alpha_derivative(n: int, alpha: float) -> tuple[float, float]:
    """``dG_N/dalpha`` from exact log-weighted sums, and its leading large-N form.

    The asymptotic value is ``zeta'(alpha)/sqrt(8)`` for ``alpha > 1``,
    ``-(ln N)^2 / (2 sqrt(8))`` at ``alpha = 1`` and
    ``-N^(1-alpha) ln N / ((1-alpha)(2-alpha) sqrt(8))`` below.
    """
    if n < 2:
        raise DomainError("g_alpha_derivative needs N >= 2")
    if alpha < 0:
        raise DomainError("alpha must be >= 0")
    if math.isinf(alpha) or n == 2:
        # G_2 = 1/4 for every alpha
        return 0.0, 0.0
    num = n * harmonic_number_dalpha(n, alpha) - harmonic_number_dalpha(n, alpha - 1)
    exact = num / math.sqrt(8.0 * n * (n - 1))
    if alpha > 1:
        asym = zeta_derivative(alpha) / SQRT8
    elif alpha == 1:
        asym = -math.log(n) ** 2 / (2 * SQRT8)
    else:
        asym = -(n ** (1 - alpha)) * math.log(n) / ((1 - alpha) * (2 - alpha)) / SQRT8
    return exact, asym


def perturbative_qfi(n: int, alpha: float, theta: float) -> dict:
    """First-order QFI densities of the six collective operators."""
    g = g_function(n, alpha)
    plain = theta * math.sqrt(8.0 * (n - 1) / n) * g
    stag = theta * math.sqrt(8.0 / (n * (n - 1))) * g
    fx = 8.0 / n * theta ** 2 * g ** 2
    return {
        "x": fx,
        "y": 1.0 + plain,
        "z": 1.0 - plain,
        "x_st": fx,
        "y_st": 1.0 - stag,
        "z_st": 1.0 + stag,
    }


def perturbative_energies(n: int, alpha: float, theta: float, gaps: bool = True):
    """Second-order energies (units of the coupling) and the large-N gaps.

    Returns ``(e_gs2, e_ex2, gap1, gap2)``.  The gaps use ``zeta(alpha)`` and
    exist only for ``alpha > 1``; with ``gaps=False`` they are returned as None.
    """
    g = g_function(n, alpha)
    e_gs = -n - 4.0 * theta ** 2 * g ** 2
    e_ex = 2.0 - n + 2.0 * theta * math.sqrt(8.0 * (n - 1) / n) * g - 12.0 * (n - 2) / n * theta ** 2 * g ** 2
    if not gaps:
        return e_gs, e_ex, None, None
    if alpha <= 1:
        raise DomainError("large-N gaps need alpha > 1 (zeta diverges)")
    z = zeta(alpha)
    gap1 = 2.0 + 2.0 * theta * z
    gap2 = gap1 - theta ** 2 * z ** 2
    return e_gs, e_ex, gap1, gap2


def fm_critical_line(alpha: float, order: int = 1) -> tuple[float, bool]:
    """Ferromagnetic critical angle from the vanishing of the perturbative gap.

    Returns ``(theta_c, valid)``; for ``alpha <= 1`` the line sits at 0 and
    ``valid`` is False.
    """
    if order not in (1, 2):
        raise ParameterError("order must be 1 or 2")
    if alpha <= 1:
        return 0.0, False
    z = zeta(alpha)
    return (-1.0 / z if order == 1 else -(math.sqrt(3.0) - 1.0) / z), True


def finite_size_fm_theta(n: int, alpha: float) -> float:
    """Finite-size ferromagnetic threshold ``-1/N^(1-alpha)`` (``-1/ln N`` at alpha = 1)."""
    if alpha > 1:
        raise DomainError("finite-size law holds for alpha <= 1; use fm_critical_line")
    if alpha == 1:
        return -1.0 / math.log(n)
    return -1.0 / n ** (1 - alpha)


def fidelity_susceptibility(n: int, alpha: float, theta: float) -> float:
    """``chi_alpha = theta^2 (dG_N/dalpha)^2``."""
    d, _ = g_alpha_derivative(n, alpha)
    return theta ** 2 * d ** 2


def qfi_alpha_slope(n: int, alpha: float, theta: float) -> float:
    """Perturbative ``d f(J_y) / d alpha = sqrt(8 (N-1)/N) theta dG/dalpha``."""
    d, _ = g_alpha_derivative(n, alpha)
    return math.sqrt(8.0 * (n - 1) / n) * theta * d


@dataclass
class PerturbativePrediction:
    g_value: float
    qfi: dict
    e_gs2: float
    e_ex2: float
    gap1: float | None
    gap2: float | None
    validity: bool


def perturbative_prediction(n: int, alpha: float, theta: float) -> PerturbativePrediction:
    g = g_function(n, alpha)
    e_gs, e_ex, g1, g2 = perturbative_energies(n, alpha, theta, gaps=alpha > 1)
    valid = abs(theta) * g < VALIDITY_THRESHOLD
    return PerturbativePrediction(g, perturbative_qfi(n, alpha, theta), e_gs, e_ex, g1, g2, valid)


LABEL_NAMES = tuple(l.name for l in ALL_LABELS)
