import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lrising import ChainParams, DomainError, ground_state, qfi_pure
from lrising.perturbative import perturbative_qfi
from lrising.variational import (
    classify_regime,
    closed_form_sigma2,
    solve_sigma,
    variational_energy,
    width_equation,
)

thetas = st.floats(0.0, 1.5)
sizes = st.integers(4, 400)


def _mp_energy(n, theta, s2):
    mpmath.mp.dps = 50
    n, theta, s2 = mpmath.mpf(n), mpmath.mpf(theta), mpmath.mpf(s2)
    return s2 * mpmath.sin(theta) - n / 2 * mpmath.cos(theta) * (1 - 2 / n ** 2 * (s2 - mpmath.mpf(1) / 4)) * mpmath.exp(
        -1 / (8 * s2)
    )


def test_energy_at_full_width():
    # frozen from a 50-digit evaluation of the ansatz energy
    assert variational_energy(100, 0.0, 25.0) == pytest.approx(-49.504358371033927, abs=1e-12)


@given(n=sizes, theta=thetas, s2=st.floats(1e-2, 100))
def test_energy_against_mpmath(n, theta, s2):
    assert variational_energy(n, theta, s2) == pytest.approx(float(_mp_energy(n, theta, s2)), rel=1e-11, abs=1e-12)


def test_energy_confinement():
    assert variational_energy(20, 0.3, 1e6) > 1e5


def test_energy_narrow_limit():
    e = variational_energy(20, 0.3, 1e-4)
    assert -1e-200 < e < 1e-3


@given(n=sizes, theta=st.floats(0.0, 1.4))
def test_width_equation_is_energy_derivative(n, theta):
    s2 = 0.3 + n / 10
    h = 1e-6 * s2
    de = (variational_energy(n, theta, s2 + h) - variational_energy(n, theta, s2 - h)) / (2 * h)
    # the width equation drops the subleading cos(theta) e^(-1/(8 s2)) / (32 N s2^2) piece of dE/ds2
    dropped = math.cos(theta) * math.exp(-1 / (8 * s2)) / (32 * n * s2 ** 2)
    assert -width_equation(n, theta, s2) - dropped == pytest.approx(de, rel=1e-5, abs=1e-8)


def test_free_limit():
    sol = solve_sigma(100, 0.0)
    assert sol.sigma2_closed == 25.0
    assert sol.qfi_y == 1.0
    assert sol.sigma2 == pytest.approx(25.0, rel=0.01)
    assert sol.regime == "Rabi"


def test_josephson_value():
    sol = solve_sigma(100, math.atan(1.0))
    assert sol.qfi_y == pytest.approx(math.sqrt(101), rel=1e-12)
    assert sol.qfi_y == pytest.approx(10.05, abs=5e-3)
    assert sol.regime == "Josephson"


def test_fock_limit():
    sol = solve_sigma(10, 1.56)
    assert sol.regime == "Fock"
    assert sol.metadata["regime_qfi"] == 6
    assert sol.sigma2 < 0.1


def test_derivative_peak_metadata():
    assert solve_sigma(30, 0.2).metadata["qfi_derivative_peak_theta"] == pytest.approx(math.atan(30))


@pytest.mark.parametrize("n,theta,regime", [(100, 0.001, "Rabi"), (100, 0.5, "Josephson"), (10, 1.56, "Fock")])
def test_regimes(n, theta, regime):
    assert classify_regime(n, theta) == regime


def test_regime_boundaries_are_josephson():
    assert classify_regime(4, math.atan(0.25)) in ("Josephson", "Rabi")
    assert classify_regime(4, math.atan(4.0)) in ("Josephson", "Fock")


def test_domain():
    with pytest.raises(DomainError):
        solve_sigma(10, -0.1)
    with pytest.raises(DomainError):
        solve_sigma(2, 0.1)
    with pytest.raises(DomainError):
        variational_energy(10, 0.1, 0.0)


@given(n=sizes, theta=st.floats(0.0, 1.55))
def test_invariants(n, theta):
    sol = solve_sigma(n, theta)
    assert 0 < sol.sigma2 <= n / 4
    assert sol.qfi_y >= 1


@given(n=sizes, theta=st.floats(0.0, 1.2))
def test_root_solves_width_equation(n, theta):
    sol = solve_sigma(n, theta)
    if sol.fallback:
        return
    s = sol.sigma2
    assert width_equation(n, theta, s * (1 - 1e-9)) >= 0 >= width_equation(n, theta, min(s * (1 + 1e-9), n / 4))


@pytest.mark.parametrize("n", [14, 20, 50, 100])
@pytest.mark.parametrize("theta", [0.01, 0.05, 0.1, 0.2, 0.5, 0.8])
def test_root_consistency(n, theta):
    sol = solve_sigma(n, theta)
    if sol.sigma2 >= 1:
        assert abs(sol.sigma2 / sol.sigma2_closed - 1) <= 0.05


def test_ed_agreement():
    theta = 0.5
    _, psi, _ = ground_state(ChainParams(14, 0.0, theta))
    assert qfi_pure(psi, "y") == pytest.approx(math.sqrt(1 + 14 * math.tan(theta)), rel=0.15)


@pytest.mark.parametrize("theta", [1e-5, 1e-4, 1e-3])
def test_rabi_matches_perturbative(theta):
    n = 20
    pert = perturbative_qfi(n, 0.0, theta)["y"]
    var = solve_sigma(n, theta).qfi_y
    assert abs(var - (1 + n * theta / 2)) <= 2 * (n * theta) ** 2
    # the all-to-all perturbative slope is sqrt(8(N-1)/N) G_N(0) = (N-1)/2
    assert pert == pytest.approx(1 + (n - 1) * theta / 2, abs=1e-14)
    assert abs(var - pert) <= theta / 2 + 2 * (n * theta) ** 2
