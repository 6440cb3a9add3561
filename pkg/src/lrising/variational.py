"""Gaussian variational ground state of the all-to-all chain (alpha = 0).

The ansatz is a Gaussian of width ``sigma^2`` over the symmetric (Dicke)
manifold.  Its energy, width equation and the resulting QFI density
``N / (4 sigma^2)`` are provided along with the Rabi / Josephson / Fock
regime classification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.optimize import minimize_scalar

from .errors import DomainError

BRACKET_LOW = 1e-3
ROOT_RTOL = 1e-10


def _check_theta(theta: float):
    if not (0 <= theta < math.pi / 2):
        raise DomainError(f"variational oracle needs 0 <= theta < pi/2, got {theta}")


def variational_energy(n: int, theta: float, sigma2: float) -> float:
    """``E / (2 J)`` of the Gaussian ansatz."""
    if not sigma2 > 0:
        raise DomainError("sigma2 must be positive")
    return sigma2 * math.sin(theta) - 0.5 * n * math.cos(theta) * (
        1.0 - 2.0 / n ** 2 * (sigma2 - 0.25)
    ) * math.exp(-1.0 / (8.0 * sigma2))


def width_equation(n: int, theta: float, sigma2: float) -> float:
    """Left minus right side of the stationarity condition for ``sigma^2``."""
    x = sigma2
    return math.exp(-1.0 / (8.0 * x)) * (n / (16.0 * x * x) - 1.0 / (8.0 * n * x) - 1.0 / n) * math.cos(
        theta
    ) - math.sin(theta)


def closed_form_sigma2(n: int, theta: float) -> float:
    """Large-width approximation ``(N/4) / sqrt(1 + N tan(theta))``."""
    return 0.25 * n / math.sqrt(1.0 + n * math.tan(theta))


def classify_regime(n: int, theta: float) -> str:
    """Rabi for ``tan(theta) < 1/N``, Fock for ``tan(theta) > N``, else Josephson."""
    _check_theta(theta)
    t = math.tan(theta)
    if t < 1.0 / n:
        return "Rabi"
    if t > n:
        return "Fock"
    return "Josephson"


@dataclass
class VariationalSolution:
    """``sigma2`` is the numerical root; ``qfi_y`` follows the closed-form width."""

    sigma2: float
    energy: float
    qfi_y: float
    regime: str
    sigma2_closed: float
    qfi_y_root: float
    fallback: bool = False
    metadata: dict = field(default_factory=dict)


def solve_sigma(n: int, theta: float) -> VariationalSolution:
    """Solve the width equation by bisection on ``(1e-3, N/4]``.

    The left side minus ``sin(theta)`` is negative at both ends of the
    bracket; the energy minimum is the root above the interior maximum.  When
    that maximum is negative there is no root and the closed form is used
    with ``fallback=True``.
    """
    if n < 4:
        raise DomainError("solve_sigma needs N >= 4")
    _check_theta(theta)
    lo, hi = BRACKET_LOW, 0.25 * n
    f = lambda x: width_equation(n, theta, x)  # noqa: E731
    peak = minimize_scalar(lambda x: -f(x), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    x_peak = float(peak.x)
    closed = closed_form_sigma2(n, theta)
    fallback = f(x_peak) < 0 or f(hi) > 0
    if fallback:
        s2 = closed
    else:
        a, b = x_peak, hi
        while b - a > ROOT_RTOL * b:
            mid = 0.5 * (a + b)
            if f(mid) > 0:
                a = mid
            else:
                b = mid
        s2 = 0.5 * (a + b)
    energy = 2.0 * variational_energy(n, theta, s2)
    meta = {"qfi_derivative_peak_theta": math.atan(n)}
    regime = classify_regime(n, theta)
    if regime == "Fock":
        meta["regime_qfi"] = n / 2 + 1
    return VariationalSolution(
        sigma2=s2,
        energy=energy,
        qfi_y=n / (4.0 * closed),
        regime=regime,
        sigma2_closed=closed,
        qfi_y_root=n / (4.0 * s2),
        fallback=fallback,
        metadata=meta,
    )
