"""Quantum Fisher information, entanglement witnesses and spin squeezing.

Densities are ``f = F / N``.  For a pure state ``F = 4 Var(J)``; for a mixed
state the eigenbasis formula ``F = 2 sum (p_k - p_l)^2/(p_k + p_l) |J_kl|^2``
is used.  A density above ``k`` witnesses ``(k+1)``-partite entanglement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .eigensolver import SpectrumResult
from .errors import ContractError, DomainError, UndefinedSqueezingError
from .lattice import (
    ALL_LABELS,
    CollectiveLabel,
    build_collective,
    sector_block,
)
from .observables import CorrelationMatrix, _check_state, collective_moments

WEIGHT_CUTOFF = 1e-14
WITNESS_TOL = 1e-8


def _labels(labels):
    if labels is None:
        return ALL_LABELS
    if isinstance(labels, (str, CollectiveLabel)):
        labels = [labels]
    return tuple(CollectiveLabel.parse(l) for l in labels)


def witnessed_depth(f: float, n_spins: int) -> int:
    """Largest integer ``k`` with ``f > k`` (a small tolerance guards f = k)."""
    k = math.ceil(f - WITNESS_TOL) - 1
    return int(min(max(k, 0), n_spins))


def qfi_pure(state, label) -> float:
    """QFI density ``4 Var(J_label) / N`` of a real pure state."""
    psi, n = _check_state(state)
    _, var = collective_moments(psi, label)
    return 4.0 * var / n


def qfi_from_correlations(corr: CorrelationMatrix, staggered: bool = False) -> float:
    """``(1/N) sum_ij w_i w_j C_ij`` with ``w_i = (-1)^i`` when staggered."""
    c = np.asarray(corr.values, dtype=float)
    n = c.shape[0]
    if staggered:
        w = np.array([(-1.0) ** (i + 1) for i in range(n)])
        return float(w @ c @ w) / n
    return float(c.sum()) / n


@dataclass
class QfiTomography:
    """QFI densities over collective operators with the maximizer and witness depth."""

    values: dict
    n_spins: int
    best_label: str = ""
    best_value: float = 0.0
    witnessed_depth: int = 0

    def __post_init__(self):
        if self.values and not self.best_label:
            self.best_label = max(self.values, key=lambda k: (self.values[k], k))
            self.best_value = float(self.values[self.best_label])
            self.witnessed_depth = witnessed_depth(self.best_value, self.n_spins)

    def __getitem__(self, label):
        return self.values[CollectiveLabel.parse(label).name]


def tomography(state, n_spins: int | None = None, labels=None) -> QfiTomography:
    psi, n = _check_state(state)
    if n_spins is not None and n_spins != n:
        raise DomainError(f"state has {n} spins, expected {n_spins}")
    vals = {l.name: qfi_pure(psi, l) for l in _labels(labels)}
    return QfiTomography(vals, n)


# --------------------------------------------------------------------------
# mixed states


@dataclass
class ThermalQfiResult:
    temperature: float
    values: dict
    truncation_cutoff: float
    n_spins: int
    cluster_size: int = 1
    metadata: dict = field(default_factory=dict)

    def __getitem__(self, label):
        return self.values[CollectiveLabel.parse(label).name]


def boltzmann_weights(spectrum: SpectrumResult, T: float, cluster_tol: float | None = None):
    """Occupation of each level; ``T = 0`` spreads weight evenly over the ground cluster."""
    if T < 0 or not math.isfinite(T):
        raise DomainError(f"temperature must be finite and >= 0, got {T}")
    e = spectrum.eigenvalues
    if T == 0:
        mu = spectrum.ground_cluster(cluster_tol)
        p = np.zeros(e.size)
        p[:mu] = 1.0 / mu
        return p
    x = -(e - e[0]) / T
    p = np.exp(x)
    return p / p.sum()


def _block_vectors(spectrum: SpectrumResult):
    """Per block: (sector, eigenvectors, merged level indices)."""
    out = []
    idx = {bi: [] for bi in range(len(spectrum.blocks))}
    for k, (bi, j) in enumerate(spectrum._where):
        idx[bi].append((j, k))
    for bi, blk in enumerate(spectrum.blocks):
        pairs = sorted(idx[bi])
        cols = np.array([j for j, _ in pairs], dtype=int)
        levels = np.array([k for _, k in pairs], dtype=int)
        out.append((blk.sector, blk.eigenvectors[:, cols], levels))
    return out


def _operator_blocks(label: CollectiveLabel, n: int, sectored: bool):
    op = build_collective(label, n)
    if not sectored:
        return {(None, None): op.to_csr()}
    out = {}
    for s_to in (1, -1):
        s_from = -s_to if label.parity_odd else s_to
        out[(s_to, s_from)] = sector_block(op, s_to, s_from).to_csr()
    return out


def qfi_thermal(
    spectrum: SpectrumResult,
    T: float,
    labels=None,
    weight_cutoff: float = WEIGHT_CUTOFF,
    cluster_tol: float | None = None,
) -> ThermalQfiResult:
    """Thermal QFI densities from a full spectrum.

    Pairs with ``p_k + p_l < weight_cutoff`` are skipped; together they add at
    most ``2 * weight_cutoff * ||J||^2`` to ``F``.  At ``T = 0`` the state is the
    equal mixture over the ground cluster, grouped with ``cluster_tol``
    (relative; defaults to the spectrum's degeneracy tolerance).
    """
    if spectrum.mode != "full":
        raise ContractError("qfi_thermal needs a full spectrum")
    n = spectrum.n_spins
    p = boltzmann_weights(spectrum, T, cluster_tol)
    blocks = _block_vectors(spectrum)
    by_sector = {s: (U, lv) for s, U, lv in blocks}
    vals = {}
    for label in _labels(labels):
        ops = _operator_blocks(label, n, spectrum.sectored)
        F = 0.0
        for (s_to, s_from), M in ops.items():
            U_to, lv_to = by_sector[s_to]
            U_from, lv_from = by_sector[s_from]
            p_to, p_from = p[lv_to], p[lv_from]
            rows = np.nonzero(p_to >= 0.5 * weight_cutoff)[0]
            if rows.size == 0:
                continue
            # matrix elements <k|M|l> for occupied k in the target block
            X = (M.T @ U_to[:, rows]).T @ U_from
            pk = p_to[rows][:, None]
            pl = p_from[None, :]
            s = pk + pl
            keep = s >= weight_cutoff
            with np.errstate(divide="ignore", invalid="ignore"):
                w = np.where(keep, (pk - pl) ** 2 / np.where(keep, s, 1.0), 0.0)
            # pairs with both levels occupied appear twice over the blocks;
            # pairs with one unoccupied level appear once and need doubling
            occ_l = p_from >= 0.5 * weight_cutoff
            mult = np.where(occ_l[None, :], 1.0, 2.0)
            F += 2.0 * float(np.sum(w * mult * X * X))
        vals[label.name] = F / n
    mu = spectrum.ground_cluster(cluster_tol) if T == 0 else 0
    return ThermalQfiResult(float(T), vals, weight_cutoff, n, mu)


def qfi_degenerate_limit(gs1, gs2, label) -> float:
    """``(2/N)[Var_1 + Var_2 - 2 |<1|J|2>|^2]`` for an orthonormal real pair."""
    a, n = _check_state(gs1)
    b, n2 = _check_state(gs2)
    if n != n2:
        raise DomainError("states have different sizes")
    if abs(float(a @ b)) > 1e-8:
        raise DomainError("degenerate-limit formula needs orthogonal states")
    label = CollectiveLabel.parse(label)
    op = build_collective(label, n)
    _, v1 = collective_moments(a, label)
    _, v2 = collective_moments(b, label)
    cross = float(a @ op.matvec(b))
    return 2.0 / n * (v1 + v2 - 2.0 * cross * cross)


def thermal_lower_bound(gap: float, T: float, mu: int, nu: int) -> float:
    """Lower bound on ``f(T) / f(T -> 0)`` below the crossover temperature."""
    if T == 0:
        return 1.0
    if T < 0:
        raise DomainError("temperature must be >= 0")
    if not gap > 0:
        raise DomainError("gap must be positive")
    if mu < 1 or nu < 1:
        raise DomainError("degeneracies must be >= 1")
    x = gap / T
    e = math.exp(-x)
    return math.tanh(0.5 * x) ** 2 * mu * (1.0 + e) / (mu + nu * e)


# --------------------------------------------------------------------------
# squeezing


@dataclass(frozen=True)
class SqueezingResult:
    xi2: float
    axis_parallel: str
    axis_perp: str

    @property
    def inverse(self) -> float:
        return 1.0 / self.xi2


def default_perp_axis(theta: float) -> str:
    """``z`` for theta >= 0 and ``y`` for theta < 0 (parallel axis ``x``)."""
    return "z" if theta >= 0 else "y"


def _squeezing_from_moments(n, mean_par, var_perp, par, perp):
    if abs(mean_par) <= 1e-12 * n:
        raise UndefinedSqueezingError(f"<J_{par}> vanishes; squeezing parameter undefined")
    return SqueezingResult(n * var_perp / mean_par ** 2, par, perp)


def spin_squeezing(state, parallel_axis: str = "x", perp_axis: str | None = None, theta: float | None = None):
    """``xi^2 = N Var(J_perp) / <J_par>^2`` along one of the fixed axis pairs."""
    psi, n = _check_state(state)
    if perp_axis is None:
        perp_axis = default_perp_axis(0.0 if theta is None else theta)
    if parallel_axis == perp_axis:
        raise DomainError("parallel and perpendicular axes must differ")
    mean_par, _ = collective_moments(psi, parallel_axis)
    _, var_perp = collective_moments(psi, perp_axis)
    return _squeezing_from_moments(n, mean_par, var_perp, parallel_axis, perp_axis)


def thermal_moments(spectrum: SpectrumResult, T: float, label, cluster_tol=None, weight_cutoff=WEIGHT_CUTOFF):
    """Thermal mean and variance of a collective operator."""
    if spectrum.mode != "full":
        raise ContractError("thermal moments need a full spectrum")
    label = CollectiveLabel.parse(label)
    n = spectrum.n_spins
    p = boltzmann_weights(spectrum, T, cluster_tol)
    ops = _operator_blocks(label, n, spectrum.sectored)
    by_sector = {s: (U, lv) for s, U, lv in _block_vectors(spectrum)}
    mean = 0.0
    second = 0.0
    for (s_to, s_from), M in ops.items():
        U_from, lv = by_sector[s_from]
        occ = np.nonzero(p[lv] >= weight_cutoff)[0]
        if occ.size == 0:
            continue
        W = M @ U_from[:, occ]
        second += float(p[lv][occ] @ np.sum(W * W, axis=0))
        if s_to == s_from and not label.imaginary:
            U_to, _ = by_sector[s_to]
            mean += float(p[lv][occ] @ np.sum(U_to[:, occ] * W, axis=0))
    return mean, max(second - mean * mean, 0.0)


def thermal_squeezing(spectrum, T, parallel_axis="x", perp_axis=None, theta=None, cluster_tol=None):
    if perp_axis is None:
        perp_axis = default_perp_axis(0.0 if theta is None else theta)
    mean_par, _ = thermal_moments(spectrum, T, parallel_axis, cluster_tol)
    _, var_perp = thermal_moments(spectrum, T, perp_axis, cluster_tol)
    return _squeezing_from_moments(spectrum.n_spins, mean_par, var_perp, parallel_axis, perp_axis)
