"""Reference states used as analytic limits and in tests."""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .errors import ParameterError


def _popcount(dim: int) -> np.ndarray:
    b = np.arange(dim)
    out = np.zeros(dim, dtype=np.int64)
    while np.any(b):
        out += b & 1
        b = b >> 1
    return out


def product_state(spins) -> np.ndarray:
    """Basis state from a string like ``"udud"`` or a sequence of +1/-1 (site 1 first)."""
    if isinstance(spins, str):
        table = {"u": 0, "d": 1, "+": 0, "-": 1, "0": 0, "1": 1}
        try:
            bits = [table[c] for c in spins.lower()]
        except KeyError as exc:
            raise ParameterError(f"bad spin character in {spins!r}") from exc
    else:
        bits = [0 if s > 0 else 1 for s in spins]
    n = len(bits)
    idx = sum(bit << k for k, bit in enumerate(bits))
    v = np.zeros(2 ** n)
    v[idx] = 1.0
    return v


def ghz(n: int, sign: int = 1) -> np.ndarray:
    """(|up...up> + sign |down...down>)/sqrt(2)."""
    v = np.zeros(2 ** n)
    v[0] = 1.0
    v[-1] = float(sign)
    return v / math.sqrt(2.0)


def neel_superposition(n: int, sign: int = 1) -> np.ndarray:
    """(|udud...> + sign |dudu...>)/sqrt(2)."""
    a = product_state("ud" * (n // 2) + "u" * (n % 2))
    b = product_state("du" * (n // 2) + "d" * (n % 2))
    return (a + sign * b) / math.sqrt(2.0)


def dicke(n: int, n_down: int | None = None) -> np.ndarray:
    """Symmetric Dicke state with ``n_down`` flipped spins (default ``n // 2``)."""
    n_down = n // 2 if n_down is None else n_down
    if not 0 <= n_down <= n:
        raise ParameterError("n_down out of range")
    v = np.zeros(2 ** n)
    for sites in combinations(range(n), n_down):
        v[sum(1 << s for s in sites)] = 1.0
    return v / np.linalg.norm(v)


def x_polarized(n: int, down: bool = True) -> np.ndarray:
    """Product of sigma_x eigenstates; ``down=True`` gives the theta=0 ground state."""
    amp = np.full(2 ** n, 2.0 ** (-n / 2))
    if down:
        amp *= (-1.0) ** _popcount(2 ** n)
    return amp


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(2 ** n)
    return v / np.linalg.norm(v)
