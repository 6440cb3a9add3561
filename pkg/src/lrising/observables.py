"""Expectation values, two-point correlations and order parameters on real states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DomainError
from .lattice import CollectiveLabel, SparseOperator, build_collective, site_weights

_AXES = {"x": 0, "y": 1, "z": 2}
_BLOCK_BYTES = 4 * 10 ** 8


def _check_state(state) -> tuple[np.ndarray, int]:
    psi = np.ascontiguousarray(state, dtype=float)
    if psi.ndim != 1:
        raise DomainError("state must be a 1-D real vector")
    n = int(round(math.log2(psi.size))) if psi.size else 0
    if psi.size < 2 or 2 ** n != psi.size:
        raise DomainError(f"state length {psi.size} is not a power of two")
    nrm = float(np.linalg.norm(psi))
    if abs(nrm - 1.0) > 1e-8:
        raise DomainError(f"state is not normalised (norm {nrm})")
    return psi, n


def expectation(state, op: SparseOperator) -> float:
    """``<psi|O|psi>``; exactly zero for operators with an imaginary factor."""
    psi, _ = _check_state(state)
    if psi.size != op.dim:
        raise DomainError(f"state dim {psi.size} does not match operator dim {op.dim}")
    if op.is_imaginary:
        return 0.0
    return float(psi @ op.matvec(psi))


def collective_moments(state, label) -> tuple[float, float]:
    """Mean and variance of a collective operator on a real pure state."""
    psi, n = _check_state(state)
    op = build_collective(CollectiveLabel.parse(label), n)
    w = op.matvec(psi)
    second = float(w @ w)
    if op.is_imaginary:
        return 0.0, second
    mean = float(psi @ w)
    return mean, max(second - mean * mean, 0.0)


@njit(cache=True)
def _site_images(psi, sites, axis, out):
    for r in range(sites.size):
        i = sites[r]
        m = 1 << i
        for b in range(psi.size):
            bit = (b >> i) & 1
            if axis == 2:
                out[r, b] = (1.0 - 2.0 * bit) * psi[b]
            elif axis == 0:
                out[r, b] = psi[b ^ m]
            else:
                out[r, b] = (2.0 * bit - 1.0) * psi[b ^ m]


def site_images(psi: np.ndarray, axis: str, sites) -> np.ndarray:
    """Rows ``M_i psi`` for 0-based ``sites``, with ``M_i`` the real part of sigma_axis."""
    sites = np.asarray(sites, dtype=np.int64)
    out = np.empty((sites.size, psi.size))
    _site_images(np.ascontiguousarray(psi, dtype=float), sites, _AXES[axis], out)
    return out


@dataclass
class CorrelationMatrix:
    """Connected correlations ``C[i, j] = <s_i s_j> - <s_i><s_j>`` (0-based indices)."""

    axis: str
    values: np.ndarray
    state_id: str | None = None

    @property
    def n_spins(self) -> int:
        return self.values.shape[0]

    def validate(self, atol: float = 1e-10):
        c = self.values
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise DomainError("correlation matrix must be square")
        if not np.allclose(c, c.T, atol=atol):
            raise DomainError("correlation matrix is not symmetric")
        d = np.diag(c)
        if np.any(d < -atol) or np.any(d > 1 + atol) or np.any(np.abs(c) > 1 + atol):
            raise DomainError("correlation entries out of range")
        return self


def connected_correlations(state, axis: str, state_id: str | None = None) -> CorrelationMatrix:
    """All connected two-point functions along ``axis``.

    Each ``sigma^(j) psi`` is formed once per site block and contracted with
    the others; for ``axis='y'`` the two imaginary factors cancel and
    ``<s_y^i s_y^j> = (A_i psi) . (A_j psi)`` with ``A = X Z``.
    """
    if axis not in _AXES:
        raise DomainError(f"axis must be x, y or z, got {axis!r}")
    psi, n = _check_state(state)
    per_block = max(1, min(n, _BLOCK_BYTES // (8 * psi.size)))
    blocks = [np.arange(s, min(s + per_block, n)) for s in range(0, n, per_block)]
    G = np.empty((n, n))
    mean = np.zeros(n)
    for bi, si in enumerate(blocks):
        Vi = site_images(psi, axis, si)
        if axis != "y":
            mean[si] = Vi @ psi
        G[np.ix_(si, si)] = Vi @ Vi.T
        for sj in blocks[bi + 1 :]:
            Vj = site_images(psi, axis, sj)
            g = Vi @ Vj.T
            G[np.ix_(si, sj)] = g
            G[np.ix_(sj, si)] = g.T
    C = G - np.outer(mean, mean)
    C = 0.5 * (C + C.T)
    return CorrelationMatrix(axis, C, state_id)


def site_magnetization(state, axis: str = "z") -> np.ndarray:
    """``<sigma_axis^(i)>`` for every site (zero for y on real states)."""
    psi, n = _check_state(state)
    if axis == "y":
        return np.zeros(n)
    return site_images(psi, axis, np.arange(n)) @ psi


@dataclass(frozen=True)
class OrderParameters:
    """``phi_z = <J_z>`` and ``phi_z_st = <J_z^(st)>``, both with the 1/2 prefactor."""

    phi_z: float
    phi_z_st: float


def order_parameters(state) -> OrderParameters:
    psi, n = _check_state(state)
    probs = psi * psi
    b = np.arange(psi.size)
    phi = 0.0
    phi_st = 0.0
    w_st = site_weights(n, True)
    for i in range(n):
        mz = float(probs @ (1.0 - 2.0 * ((b >> i) & 1)))
        phi += 0.5 * mz
        phi_st += 0.5 * w_st[i] * mz
    return OrderParameters(phi, phi_st)
