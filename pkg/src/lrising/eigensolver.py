"""Full and partial diagonalization, parity-sector bookkeeping and the mass gap.

``full_spectrum`` delegates to LAPACK through :func:`numpy.linalg.eigh`; the
partial solver :func:`lowest_eigenpairs` is an independent block Lanczos with
full reorthogonalization and thick restart, so the two routes cross-check each
other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, ContractError, ConvergenceError, ParameterError
from .lattice import (
    ChainParams,
    SparseOperator,
    apply_parity,
    build_hamiltonian,
    embed_sector,
)

DEFAULT_SEED = 20240917
DEGENERACY_TOL = 1e-8
FULL_MAX_DIM = 2 ** 14
DENSE_FALLBACK_DIM = 256


@dataclass
class SectorSpectrum:
    """Eigenpairs of one block; ``sector`` is +1/-1 or ``None`` for the full space."""

    sector: int | None
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray | None = None


@dataclass
class SpectrumResult:
    """Ascending eigenvalues with their eigenvectors stored per parity block.

    ``eigenvalues`` and ``parities`` are merged over blocks (ties ordered with
    the even sector first).  Use :meth:`state` to get a full-space eigenvector.
    """

    blocks: list
    n_spins: int
    mode: str
    degeneracy_tol: float = DEGENERACY_TOL
    coupling: float = 1.0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        vals, pars, where = [], [], []
        for bi, blk in enumerate(self.blocks):
            for k, e in enumerate(blk.eigenvalues):
                vals.append(float(e))
                pars.append(0 if blk.sector is None else blk.sector)
                where.append((bi, k))
        order = sorted(range(len(vals)), key=lambda i: (vals[i], -pars[i]))
        self.eigenvalues = np.array([vals[i] for i in order])
        self._parities = np.array([pars[i] for i in order], dtype=int)
        self._where = [where[i] for i in order]

    def __len__(self):
        return self.eigenvalues.size

    @property
    def dim(self) -> int:
        return 2 ** self.n_spins

    @property
    def sectored(self) -> bool:
        return any(b.sector is not None for b in self.blocks)

    @property
    def parities(self) -> np.ndarray:
        """Spin-flip parity of each level; measured from the vector when unsectored."""
        if self.sectored:
            return self._parities.copy()
        out = np.empty(len(self), dtype=int)
        for k in range(len(self)):
            v = self.state(k)
            out[k] = 1 if float(v @ apply_parity(v)) >= 0 else -1
        return out

    def state(self, k: int) -> np.ndarray:
        bi, j = self._where[k]
        blk = self.blocks[bi]
        v = blk.eigenvectors[:, j]
        return v.copy() if blk.sector is None else embed_sector(v, blk.sector)

    @property
    def eigenvectors(self) -> np.ndarray:
        """Full-space eigenvectors as columns (materialised on demand)."""
        if self.dim * len(self) > 2 ** 26:
            raise CapacityError("eigenvector matrix too large to materialise; use state(k)")
        return np.column_stack([self.state(k) for k in range(len(self))])

    def scale(self) -> float:
        return max(abs(float(self.eigenvalues[0])), self.coupling)

    def ground_cluster(self, tol: float | None = None) -> int:
        """Number of levels within ``tol`` (relative) of the lowest one."""
        tol = self.degeneracy_tol if tol is None else tol
        rel = (self.eigenvalues - self.eigenvalues[0]) / self.scale()
        return int(np.count_nonzero(rel <= tol))

    def levels(self, tol: float | None = None):
        """Group eigenvalues into clusters; returns a list of index ranges."""
        tol = self.degeneracy_tol if tol is None else tol
        out, start = [], 0
        s = self.scale()
        for k in range(1, len(self) + 1):
            if k == len(self) or (self.eigenvalues[k] - self.eigenvalues[start]) / s > tol:
                out.append(range(start, k))
                start = k
        return out


@dataclass
class GapResult:
    """Energy gap above the ground cluster and the two cluster multiplicities.

    ``truncated`` is set when the computed levels ended inside the excited
    cluster, so ``nu`` is a lower bound.  ``parity`` is the spin-flip parity
    of the ground level (0 when the field breaks the symmetry).
    """

    gap: float
    mu: int
    nu: int
    e0: float
    kind: str = "absolute"
    truncated: bool = False
    parity: int = 0
    spectrum: "SpectrumResult | None" = field(default=None, repr=False, compare=False)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def full_spectrum(op: SparseOperator) -> SpectrumResult:
    """All eigenpairs of a real symmetric operator via LAPACK."""
    if op.dim > FULL_MAX_DIM:
        raise CapacityError(f"full diagonalization limited to dim <= {FULL_MAX_DIM}, got {op.dim}")
    if op.is_imaginary:
        raise ContractError("full_spectrum expects a real symmetric operator")
    vals, vecs = np.linalg.eigh(op.to_dense())
    blk = SectorSpectrum(op.sector, vals, _fix_signs(vecs))
    return SpectrumResult([blk], op.n_spins, "full", coupling=_coupling_of(op))


def _coupling_of(op) -> float:
    params = getattr(op, "params", None)
    return params.coupling if params is not None else 1.0


def _orthonormalize_rows(W, V, j, rng, scale):
    """Gram-Schmidt of the rows of ``W`` among themselves.

    ``W`` must already be orthogonal to ``V[:j]``.  Rows that collapse (Krylov
    breakdown) are replaced by fresh random directions with zero coupling so
    the Krylov decomposition stays exact.
    """
    b = W.shape[0]
    R = np.zeros((b, b))
    Q = np.empty_like(W)
    for c in range(b):
        w = W[c].copy()
        if c:
            for _ in range(2):
                h = Q[:c] @ w
                w -= h @ Q[:c]
                R[:c, c] += h
        nrm = float(np.linalg.norm(w))
        if nrm > 1e-13 * scale:
            R[c, c] = nrm
            Q[c] = w / nrm
            continue
        w = rng.standard_normal(W.shape[1])
        for _ in range(2):
            if j:
                w -= (V[:j] @ w) @ V[:j]
            if c:
                w -= (Q[:c] @ w) @ Q[:c]
        Q[c] = w / np.linalg.norm(w)
    return Q, R


def lowest_eigenpairs(
    op: SparseOperator,
    k: int = 1,
    tol: float = 1e-10,
    seed: int = DEFAULT_SEED,
    block_size: int | None = None,
    max_basis: int | None = None,
    max_restarts: int = 300,
    start: np.ndarray | None = None,
) -> SpectrumResult:
    """``k`` lowest eigenpairs by thick-restart block Lanczos.

    Every new block is orthogonalized twice against the whole basis, and on
    restart the lowest Ritz vectors plus the residual block are kept.
    Convergence requires every Ritz residual ``||H v - lambda v||`` to drop
    below ``tol * ||H||_est``.  ``start`` (columns) seeds part of the start
    block, which helps along smooth parameter sweeps.
    """
    if k < 1:
        raise ParameterError("k must be >= 1")
    if op.is_imaginary:
        raise ContractError("lowest_eigenpairs expects a real symmetric operator")
    dim = op.dim
    if k > dim:
        raise ParameterError(f"k={k} exceeds dimension {dim}")
    norm = max(op.norm_bound(), 1e-300)
    meta = {"seed": seed, "solver": "block-lanczos"}
    if dim <= DENSE_FALLBACK_DIM:
        vals, vecs = np.linalg.eigh(op.to_dense())
        vecs = _fix_signs(vecs[:, :k])
        res = np.linalg.norm(op.matmat(vecs) - vecs * vals[:k], axis=0)
        blk = SectorSpectrum(op.sector, vals[:k], vecs, res)
        meta["solver"] = "dense"
        return SpectrumResult([blk], op.n_spins, "partial", coupling=_coupling_of(op), metadata=meta)

    if block_size is None:
        block_size = 1 if k <= 2 else min(k, 4)
    b = max(1, block_size)
    if max_basis is None:
        # clustered excited levels need a wider basis once k > 2
        max_basis = max(32 if k <= 2 else 96, 4 * k + 16 * b)
        mem_cap = int(1.2e9 // (8 * dim))
        max_basis = max(min(max_basis, mem_cap), k + 2 * b)
    m = min(max_basis - max_basis % b, dim - dim % b)
    if m < k + b:
        raise CapacityError("Krylov basis too small for requested k")
    keep = max(k, min(m - 2 * b, (m // 2) // b * b))

    rng = np.random.default_rng(seed)
    V = np.zeros((m, dim))
    T = np.zeros((m, m))
    Q0 = rng.standard_normal((b, dim))
    if start is not None:
        cols = np.asarray(start, dtype=float).reshape(dim, -1).T
        guess = np.zeros((min(b, cols.shape[0]), dim))
        for c, col in enumerate(cols):
            guess[c % guess.shape[0]] += col
        Q0[: guess.shape[0]] = guess + 1e-3 * Q0[: guess.shape[0]] / math.sqrt(dim)
    Qn, _ = _orthonormalize_rows(Q0, V, 0, rng, 1.0)
    V[:b] = Qn
    j = b
    best = math.inf
    matvecs = 0
    for restart in range(max_restarts + 1):
        while True:
            W = np.empty((b, dim))
            for c in range(b):
                W[c] = op.matvec(V[j - b + c])
            matvecs += b
            # local three-term step, then full passes until no norm collapse
            lo = max(0, j - 2 * b)
            C = np.zeros((j, b))
            C[lo:j] = V[lo:j] @ W.T
            W -= C[lo:j].T @ V[lo:j]
            for _ in range(3):
                before = np.linalg.norm(W)
                C2 = V[:j] @ W.T
                W -= C2.T @ V[:j]
                C += C2
                if np.linalg.norm(W) > 0.5 * before:
                    break
            T[:j, j - b : j] = C
            T[j - b : j, :j] = C.T
            Qn, R = _orthonormalize_rows(W, V, j, rng, norm)
            # W^T = Qn^T R, so the coupling to the next block is R
            if j + b > m:
                break
            V[j : j + b] = Qn
            T[j : j + b, j - b : j] = R
            T[j - b : j, j : j + b] = R.T
            j += b
        Tm = 0.5 * (T + T.T)
        theta, Y = np.linalg.eigh(Tm)
        coup = R @ Y[m - b : m, :]
        res = np.linalg.norm(coup, axis=0)
        best = min(best, float(res[:k].max()))
        if res[:k].max() <= tol * norm:
            X = _fix_signs(V.T @ Y[:, :k])
            true_res = np.linalg.norm(op.matmat(X) - X * theta[:k], axis=0)
            meta.update(restarts=restart, matvecs=matvecs + k, basis=m, block=b)
            blk_out = SectorSpectrum(op.sector, theta[:k].copy(), X, true_res)
            return SpectrumResult([blk_out], op.n_spins, "partial", coupling=_coupling_of(op), metadata=meta)
        # thick restart: keep the lowest Ritz vectors and the residual block
        V[:keep] = Y[:, :keep].T @ V
        V[keep : keep + b] = Qn
        V[keep + b :] = 0.0
        T[:] = 0.0
        T[np.arange(keep), np.arange(keep)] = theta[:keep]
        T[keep : keep + b, :keep] = coup[:, :keep]
        T[:keep, keep : keep + b] = coup[:, :keep].T
        j = keep + b
    raise ConvergenceError(
        f"Lanczos did not converge in {max_restarts} restarts (best residual {best:.3e})",
        best_residual=best,
    )


# --------------------------------------------------------------------------
# parameter-level drivers


def _sectors_for(params: ChainParams, use_sectors):
    if use_sectors is None:
        use_sectors = params.parity_symmetric
    if use_sectors and not params.parity_symmetric:
        raise ParameterError("parity sectors require sym_break_h = 0")
    return (1, -1) if use_sectors else (None,)


def solve(
    params: ChainParams,
    k: int | None = None,
    use_sectors: bool | None = None,
    seed: int = DEFAULT_SEED,
    tol: float = 1e-10,
    only_sector: int | None = None,
    start=None,
) -> SpectrumResult:
    """Diagonalize the chain Hamiltonian.

    ``k=None`` requests the full spectrum, otherwise the ``k`` lowest levels
    of each block are computed.  With ``h = 0`` the two parity sectors are
    treated separately unless ``use_sectors=False``.
    """
    sectors = _sectors_for(params, use_sectors)
    if only_sector is not None:
        if only_sector not in sectors:
            raise ParameterError(f"sector {only_sector} not available")
        sectors = (only_sector,)
    blocks, meta = [], {"seed": seed}
    for s in sectors:
        op = build_hamiltonian(params, s)
        if k is None:
            r = full_spectrum(op)
        else:
            st = None if start is None else start.get(s)
            r = lowest_eigenpairs(op, k=min(k, op.dim), tol=tol, seed=seed, start=st)
            meta[f"solver[{s}]"] = r.metadata
        blocks.extend(r.blocks)
    mode = "full" if k is None else "partial"
    return SpectrumResult(blocks, params.n_spins, mode, coupling=params.coupling, metadata=meta)


def ground_state(params: ChainParams, seed: int = DEFAULT_SEED, tol: float = 1e-10):
    """Lowest eigenpair ``(E0, psi, parity)``; with ``h=0`` ties go to the even sector.

    ``psi`` is a full-space real unit vector; parity is 0 when ``h != 0``.
    """
    spec = solve(params, k=1, seed=seed, tol=tol)
    return float(spec.eigenvalues[0]), spec.state(0), int(spec._parities[0])


def gap_from_spectrum(spec: SpectrumResult, tol: float | None = None, kind: str = "absolute") -> GapResult:
    clusters = spec.levels(tol)
    if len(clusters) < 2:
        raise ConvergenceError("spectrum holds a single level cluster; gap undefined")
    mu = len(clusters[0])
    exc = clusters[1]
    nu = len(exc)
    gap = float(spec.eigenvalues[exc[0]] - spec.eigenvalues[0])
    truncated = spec.mode == "partial" and exc[-1] == len(spec) - 1
    return GapResult(gap, mu, nu, float(spec.eigenvalues[0]), kind, truncated)


def mass_gap(
    params: ChainParams,
    kind: str = "absolute",
    k: int | None = None,
    seed: int = DEFAULT_SEED,
    max_k: int | None = None,
    tol: float = 1e-10,
    start=None,
) -> GapResult:
    """Gap between the ground cluster and the next level.

    ``kind='absolute'`` uses the merged spectrum of both parity sectors.
    ``kind='parity'`` measures the next level inside the sector holding the
    ground state, i.e. the lowest excitation that does not merely restore a
    broken spin-flip symmetry.  Levels are requested in growing batches
    until the excited cluster is closed or ``max_k`` is reached.  ``start``
    maps sector to warm-start vectors (see :func:`lowest_eigenpairs`).
    """
    if kind not in ("absolute", "parity"):
        raise ParameterError(f"unknown gap kind {kind!r}")
    if kind == "parity" and not params.parity_symmetric:
        raise ParameterError("parity-resolved gap requires sym_break_h = 0")
    k = k or (2 if kind == "parity" else 4)
    if max_k is None:
        # the parity gap never needs nu, so it does not grow the Krylov request
        max_k = k if kind == "parity" else max(2 * params.n_spins + 2, k)
    while True:
        spec = solve(params, k=k, seed=seed, tol=tol, start=start)
        parity = int(spec._parities[0])
        view = spec
        if kind == "parity":
            blk = next(b for b in spec.blocks if b.sector == parity)
            view = SpectrumResult([blk], spec.n_spins, spec.mode, coupling=spec.coupling)
        try:
            res = gap_from_spectrum(view, kind=kind)
        except ConvergenceError:
            res = None
        closed = res is not None and not _cluster_open(view, res)
        if closed or k >= max_k:
            if res is None:
                raise ConvergenceError("could not resolve a level above the ground cluster")
            res.truncated = not closed
            res.parity = parity
            res.spectrum = spec
            return res
        k = min(2 * k, max_k)


def _cluster_open(spec: SpectrumResult, res: GapResult) -> bool:
    """True if some block's highest computed level sits in or below the excited cluster."""
    if spec.mode == "full":
        return False
    top = spec.eigenvalues[0] + res.gap
    s = spec.scale()
    for blk in spec.blocks:
        if blk.eigenvalues.size and (blk.eigenvalues[-1] - top) / s <= spec.degeneracy_tol:
            if blk.eigenvalues.size < 2 ** (spec.n_spins - (blk.sector is not None)):
                return True
    return False
