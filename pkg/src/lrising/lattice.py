"""Variable-range Ising chain and collective spin operators in the sigma_z basis.

Basis convention: a basis state is an integer ``b`` whose bit ``i - 1`` encodes
site ``i`` (sites are numbered ``1..N``); bit value 0 means spin up
(sigma_z = +1) and 1 means spin down.  All matrices are real; sigma_y enters as
``i * A`` with ``A = X Z`` real antisymmetric, so an operator is fully described
by a real matrix ``M`` and an ``imaginary_factor`` in ``{1, 1j}``.

The global spin flip ``Pi = prod_i sigma_x^(i)`` maps ``b`` to its complement,
``dim - 1 - b``.  Parity sectors are represented on the representatives
``b < 2**(N-1)`` (site ``N`` up), with basis ``(|b> +- |~b>)/sqrt(2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from numba import njit

from .errors import CapacityError, DomainError, ParameterError

INF = math.inf
MAX_SPINS = 24
EXPLICIT_MAX_SPINS = 14


@dataclass(frozen=True)
class ChainParams:
    """One Hamiltonian instance.

    ``alpha = INF`` means nearest-neighbour coupling only.  ``sym_break_h`` is a
    longitudinal field ``h sigma_z^(N)`` on the last site.
    """

    n_spins: int
    alpha: float
    theta: float
    coupling: float = 1.0
    sym_break_h: float = 0.0

    def __post_init__(self):
        n = self.n_spins
        if isinstance(n, bool) or int(n) != n:
            raise ParameterError(f"n_spins must be an integer, got {n!r}")
        object.__setattr__(self, "n_spins", int(n))
        if n < 2 or n > MAX_SPINS or n % 2:
            raise ParameterError(f"n_spins must be even with 2 <= N <= {MAX_SPINS}, got {n}")
        if not (self.alpha >= 0):
            raise ParameterError(f"alpha must be >= 0, got {self.alpha}")
        if not (-math.pi / 2 <= self.theta <= math.pi / 2):
            raise ParameterError(f"theta must lie in [-pi/2, pi/2], got {self.theta}")
        if not (self.coupling > 0 and math.isfinite(self.coupling)):
            raise ParameterError(f"coupling must be positive, got {self.coupling}")
        if not (self.sym_break_h >= 0 and math.isfinite(self.sym_break_h)):
            raise ParameterError(f"sym_break_h must be >= 0, got {self.sym_break_h}")

    @property
    def nearest_neighbor(self) -> bool:
        return math.isinf(self.alpha)

    @property
    def parity_symmetric(self) -> bool:
        return self.sym_break_h == 0.0

    def with_(self, **changes) -> "ChainParams":
        return replace(self, **changes)


@dataclass(frozen=True, order=True)
class CollectiveLabel:
    """``J_axis`` or its staggered version, both with the 1/2 prefactor."""

    axis: str
    staggered: bool = False

    def __post_init__(self):
        if self.axis not in ("x", "y", "z"):
            raise ParameterError(f"axis must be x, y or z, got {self.axis!r}")

    @property
    def name(self) -> str:
        return f"{self.axis}_st" if self.staggered else self.axis

    @property
    def imaginary(self) -> bool:
        return self.axis == "y"

    @property
    def parity_odd(self) -> bool:
        """True when the operator anticommutes with the global spin flip."""
        return self.axis != "x"

    @classmethod
    def parse(cls, text) -> "CollectiveLabel":
        if isinstance(text, cls):
            return text
        t = str(text).strip().lower().replace("^(st)", "_st").replace("(st)", "_st").replace("^", "_")
        t = t.removeprefix("j_").removeprefix("j")
        staggered = t.endswith("_st") or t.endswith("st")
        axis = t[0] if t else ""
        if axis not in ("x", "y", "z") or t not in (axis, axis + "_st", axis + "st"):
            raise ParameterError(f"unknown collective operator label {text!r}")
        return cls(axis, staggered)

    def __str__(self):
        return self.name


ALL_LABELS = tuple(CollectiveLabel(a, s) for s in (False, True) for a in ("x", "y", "z"))


def coupling_strength(i: int, j: int, alpha: float, n_spins: int | None = None) -> float:
    """Coupling kernel ``|i - j|**(-alpha)`` between 1-based sites ``i`` and ``j``."""
    if i == j:
        raise DomainError("coupling_strength needs two distinct sites")
    if min(i, j) < 1 or (n_spins is not None and max(i, j) > n_spins):
        raise DomainError(f"site index out of range: ({i}, {j})")
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    r = abs(i - j)
    if math.isinf(alpha):
        return 1.0 if r == 1 else 0.0
    return float(r) ** (-alpha)


def coupling_pairs(n_spins: int, alpha: float):
    """Nonzero couplings as arrays ``(bit_i, bit_j, J_ij)`` with ``i < j``."""
    ii, jj = np.triu_indices(n_spins, k=1)
    dist = (jj - ii).astype(float)
    if math.isinf(alpha):
        vals = (dist == 1).astype(float)
    else:
        vals = dist ** (-float(alpha))
    keep = vals != 0
    return ii[keep].astype(np.int64), jj[keep].astype(np.int64), vals[keep]


def site_weights(n_spins: int, staggered: bool) -> np.ndarray:
    """Weights ``(-1)**i`` (sites 1..N) for staggered operators, else ones."""
    if not staggered:
        return np.ones(n_spins)
    return np.array([(-1.0) ** (k + 1) for k in range(n_spins)])


# --------------------------------------------------------------------------
# numba kernels


@njit(cache=True)
def _zz_diagonal(dim, pi, pj, pc, out):
    for b in range(dim):
        acc = 0.0
        for p in range(pi.size):
            if ((b >> pi[p]) ^ (b >> pj[p])) & 1:
                acc -= pc[p]
            else:
                acc += pc[p]
        out[b] = acc


@njit(cache=True)
def _flip_matvec(v, diag, field, n, out):
    for b in range(v.size):
        acc = 0.0
        for i in range(n):
            acc += v[b ^ (1 << i)]
        out[b] = diag[b] * v[b] + field * acc


@njit(cache=True)
def _sector_flip_matvec(v, diag, field, n, sign, out):
    mask = v.size - 1
    for b in range(v.size):
        acc = 0.0
        for i in range(n - 1):
            acc += v[b ^ (1 << i)]
        acc += sign * v[b ^ mask]
        out[b] = diag[b] * v[b] + field * acc


@njit(cache=True)
def _collective_apply(v, n, axis, weights, out):
    # axis: 0 = x, 1 = y (real part A), 2 = z
    for b in range(v.size):
        acc = 0.0
        for i in range(n):
            bit = (b >> i) & 1
            if axis == 2:
                acc += weights[i] * (1.0 - 2.0 * bit) * v[b]
            elif axis == 0:
                acc += weights[i] * v[b ^ (1 << i)]
            else:
                acc += weights[i] * (2.0 * bit - 1.0) * v[b ^ (1 << i)]
        out[b] = 0.5 * acc


_AXIS_CODE = {"x": 0, "y": 1, "z": 2}


# --------------------------------------------------------------------------
# operators


class SparseOperator:
    """Real matrix ``M`` with the physical operator equal to ``imaginary_factor * M``.

    Subclasses generate their structure on the fly; ``entries`` materialises the
    coordinate list (duplicates summed, explicit zeros dropped).
    """

    n_spins: int
    dim: int
    imaginary_factor: complex = 1
    sector: int | None = None

    @property
    def shape(self):
        return (self.dim, self.dim)

    @property
    def is_imaginary(self) -> bool:
        return self.imaginary_factor != 1

    def matvec(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def matmat(self, vs: np.ndarray) -> np.ndarray:
        vs = np.asarray(vs, dtype=float)
        if vs.ndim == 1:
            return self.matvec(vs)
        return np.column_stack([self.matvec(vs[:, k]) for k in range(vs.shape[1])])

    def _coo_parts(self):
        raise NotImplementedError

    def to_csr(self) -> sp.csr_matrix:
        if self.n_spins > EXPLICIT_MAX_SPINS + 6:
            raise CapacityError(f"explicit coordinate list refused for N={self.n_spins}")
        rows, cols, vals = self._coo_parts()
        m = sp.csr_matrix((vals, (rows, cols)), shape=self.shape)
        m.sum_duplicates()
        m.eliminate_zeros()
        return m

    def entries(self):
        """Coordinate list ``(rows, cols, values)`` of the real matrix."""
        m = self.to_csr().tocoo()
        return m.row, m.col, m.data

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()

    def norm_bound(self) -> float:
        """Cheap upper bound on the spectral norm (Gershgorin)."""
        m = self.to_csr()
        return float(abs(m).sum(axis=1).max()) if m.nnz else 0.0


class MatrixOperator(SparseOperator):
    """Operator backed by an explicit scipy sparse matrix."""

    def __init__(self, matrix, n_spins, imaginary_factor=1, sector=None):
        self.matrix = sp.csr_matrix(matrix, dtype=float)
        self.matrix.sum_duplicates()
        self.matrix.eliminate_zeros()
        self.n_spins = n_spins
        self.dim = self.matrix.shape[0]
        self.imaginary_factor = imaginary_factor
        self.sector = sector

    def matvec(self, v):
        return self.matrix @ np.asarray(v, dtype=float)

    def matmat(self, vs):
        return self.matrix @ np.asarray(vs, dtype=float)

    def to_csr(self):
        return self.matrix

    def _coo_parts(self):
        m = self.matrix.tocoo()
        return m.row, m.col, m.data


class IsingHamiltonian(SparseOperator):
    """Dense diagonal (ZZ couplings and pinning field) plus a uniform X field.

    With ``sector = +1/-1`` the operator acts on one spin-flip parity sector of
    dimension ``2**(N-1)``.
    """

    def __init__(self, params: ChainParams, sector: int | None = None):
        n = params.n_spins
        if sector is not None:
            if sector not in (1, -1):
                raise ParameterError(f"sector must be +1 or -1, got {sector}")
            if not params.parity_symmetric:
                raise ParameterError("parity sectors require sym_break_h = 0")
        self.params = params
        self.n_spins = n
        self.sector = sector
        self.dim = 2 ** n if sector is None else 2 ** (n - 1)
        J = params.coupling
        pi, pj, pc = coupling_pairs(n, params.alpha)
        diag = np.empty(self.dim)
        _zz_diagonal(self.dim, pi, pj, pc, diag)
        diag *= J * math.sin(params.theta)
        if params.sym_break_h:
            bit = (np.arange(self.dim) >> (n - 1)) & 1
            diag += params.sym_break_h * (1.0 - 2.0 * bit)
        self.diagonal = diag
        self.field = J * math.cos(params.theta)

    def matvec(self, v):
        v = np.ascontiguousarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DomainError(f"vector of length {v.size} does not match dim {self.dim}")
        out = np.empty_like(v)
        if self.sector is None:
            _flip_matvec(v, self.diagonal, self.field, self.n_spins, out)
        else:
            _sector_flip_matvec(v, self.diagonal, self.field, self.n_spins, float(self.sector), out)
        return out

    def _coo_parts(self):
        n, dim = self.n_spins, self.dim
        b = np.arange(dim)
        rows, cols, vals = [b], [b], [self.diagonal]
        if self.field != 0.0:
            nflip = n if self.sector is None else n - 1
            for i in range(nflip):
                rows.append(b)
                cols.append(b ^ (1 << i))
                vals.append(np.full(dim, self.field))
            if self.sector is not None:
                rows.append(b)
                cols.append(b ^ (dim - 1))
                vals.append(np.full(dim, self.sector * self.field))
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)

    def norm_bound(self):
        return float(np.abs(self.diagonal).max() + self.n_spins * abs(self.field))


class CollectiveOperator(SparseOperator):
    """``(1/2) sum_i w_i sigma_axis^(i)`` on the full 2**N space."""

    def __init__(self, label: CollectiveLabel, n_spins: int):
        if n_spins < 1 or n_spins > MAX_SPINS:
            raise CapacityError(f"N={n_spins} outside 1..{MAX_SPINS}")
        self.label = label
        self.n_spins = n_spins
        self.dim = 2 ** n_spins
        self.imaginary_factor = 1j if label.imaginary else 1
        self.weights = site_weights(n_spins, label.staggered)

    def matvec(self, v):
        v = np.ascontiguousarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DomainError(f"vector of length {v.size} does not match dim {self.dim}")
        out = np.empty_like(v)
        _collective_apply(v, self.n_spins, _AXIS_CODE[self.label.axis], self.weights, out)
        return out

    def _coo_parts(self):
        n, dim = self.n_spins, self.dim
        b = np.arange(dim)
        if self.label.axis == "z":
            d = np.zeros(dim)
            for i in range(n):
                d += self.weights[i] * (1.0 - 2.0 * ((b >> i) & 1))
            return b, b, 0.5 * d
        rows, cols, vals = [], [], []
        for i in range(n):
            rows.append(b)
            cols.append(b ^ (1 << i))
            if self.label.axis == "x":
                vals.append(np.full(dim, 0.5 * self.weights[i]))
            else:
                vals.append(0.5 * self.weights[i] * (2.0 * ((b >> i) & 1) - 1.0))
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)

    def norm_bound(self):
        return 0.5 * self.n_spins


def build_hamiltonian(params: ChainParams, sector: int | None = None) -> IsingHamiltonian:
    """Hamiltonian operator; ``sector`` restricts to one spin-flip parity sector."""
    if params.n_spins > MAX_SPINS:
        raise CapacityError(f"N={params.n_spins} exceeds MAX_SPINS={MAX_SPINS}")
    return IsingHamiltonian(params, sector)


def build_collective(label, n_spins: int) -> CollectiveOperator:
    return CollectiveOperator(CollectiveLabel.parse(label), n_spins)


# --------------------------------------------------------------------------
# parity sectors


def apply_parity(v: np.ndarray) -> np.ndarray:
    """Global spin flip on a full-space vector (bit complement reverses the index)."""
    return np.asarray(v)[::-1].copy()


def embed_sector(v: np.ndarray, sector: int) -> np.ndarray:
    """Map a sector vector (or columns) to the full 2**N basis."""
    v = np.asarray(v, dtype=float)
    s = 1.0 / math.sqrt(2.0)
    return np.concatenate([s * v, (sector * s) * v[::-1]], axis=0)


def project_sector(psi: np.ndarray, sector: int) -> np.ndarray:
    """Components of a full-space vector in the given parity sector basis."""
    psi = np.asarray(psi, dtype=float)
    half = psi.shape[0] // 2
    return (psi[:half] + sector * psi[::-1][:half]) / math.sqrt(2.0)


def sector_projector(n_spins: int, sector: int) -> sp.csr_matrix:
    """Isometry ``P`` (dim x dim/2) whose columns are the sector basis states."""
    dim = 2 ** n_spins
    half = dim // 2
    b = np.arange(half)
    s = 1.0 / math.sqrt(2.0)
    rows = np.concatenate([b, dim - 1 - b])
    cols = np.concatenate([b, b])
    vals = np.concatenate([np.full(half, s), np.full(half, sector * s)])
    return sp.csr_matrix((vals, (rows, cols)), shape=(dim, half))


def sector_block(op: SparseOperator, to_sector: int, from_sector: int) -> MatrixOperator:
    """Block ``P_to^T M P_from`` of a full-space operator between parity sectors."""
    if op.sector is not None:
        raise ParameterError("sector_block expects a full-space operator")
    p_to = sector_projector(op.n_spins, to_sector)
    p_from = sector_projector(op.n_spins, from_sector)
    block = (p_to.T @ op.to_csr() @ p_from).tocsr()
    return MatrixOperator(block, op.n_spins, op.imaginary_factor)
