"""Critical points from gap minima, finite-size extrapolation and scaling fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from .eigensolver import DEFAULT_SEED, ground_state, mass_gap
from .entanglement import qfi_pure, tomography
from .errors import DegenerateInputError, DomainError, FitError, ParameterError
from .lattice import ChainParams, CollectiveLabel
from .observables import site_images

GRID_STEP = 0.02
REFINE_TOL = 1e-4
SCAN_TOL = 1e-9
ENDPOINT_OFFSET = 1e-3
FIT_FORMS = ("power", "log", "shifted", "saturating")
SIDES = {"AFM": (0.0, math.pi / 2), "FM": (-math.pi / 2, 0.0)}
_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _side(side: str) -> str:
    s = str(side).upper()
    if s not in SIDES:
        raise ParameterError(f"side must be FM or AFM, got {side!r}")
    return s


# --------------------------------------------------------------------------
# fits


@dataclass
class ScalingFit:
    """Fitted scaling law ``f(N)``.

    ``power``: a N^beta; ``log``: 1 + a ln N; ``shifted``: 1 + a N^beta;
    ``saturating``: a - b / N^c (``exponent`` holds c).  ``residual`` is the
    RMS of ``ln f_fit - ln f`` over the data.
    """

    prefactor: float
    exponent: float
    form: str
    residual: float
    sizes: tuple
    values: tuple
    b: float = 0.0
    stderr: float = 0.0
    metadata: dict = field(default_factory=dict)

    def predict(self, n):
        n = np.asarray(n, dtype=float)
        if self.form == "power":
            return self.prefactor * n ** self.exponent
        if self.form == "log":
            return 1.0 + self.prefactor * np.log(n)
        if self.form == "shifted":
            return 1.0 + self.prefactor * n ** self.exponent
        return self.prefactor - self.b / n ** self.exponent


def _log_residual(pred, y) -> float:
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.log(pred) - np.log(y)
    if not np.all(np.isfinite(r)):
        return math.inf
    return float(math.sqrt(np.mean(r * r)))


def _linear_fit(x, y):
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    dof = max(len(x) - 2, 1)
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(A.T @ A)
    return coef, np.sqrt(np.maximum(np.diag(cov), 0.0))


def fit_power_law(sizes, values, form: str = "power") -> ScalingFit:
    """Least-squares fit of one of the scaling forms, in its natural linear space."""
    if form not in FIT_FORMS:
        raise ParameterError(f"form must be one of {FIT_FORMS}, got {form!r}")
    N = np.asarray(sizes, dtype=float)
    f = np.asarray(values, dtype=float)
    if N.shape != f.shape or N.ndim != 1:
        raise FitError("sizes and values must be 1-D arrays of equal length", data=(sizes, values))
    if N.size < 4:
        raise FitError("at least 4 sizes are required", data=(sizes, values))
    if not np.all(np.isfinite(f)) or np.any(N <= 0):
        raise FitError("sizes must be positive and values finite", data=(sizes, values))
    if np.any(f <= 0):
        raise DomainError("log-residual fits need positive values")
    b = 0.0
    if form == "power":
        coef, se = _linear_fit(np.log(N), np.log(f))
        a, beta, err = math.exp(coef[0]), float(coef[1]), float(se[1])
    elif form == "shifted":
        if np.any(f <= 1):
            raise DomainError("shifted power fit needs values > 1")
        coef, se = _linear_fit(np.log(N), np.log(f - 1.0))
        a, beta, err = math.exp(coef[0]), float(coef[1]), float(se[1])
    elif form == "log":
        x = np.log(N)
        a = float(x @ (f - 1.0) / (x @ x))
        r = f - 1.0 - a * x
        err = math.sqrt(float(r @ r) / max(N.size - 1, 1) / float(x @ x))
        beta = 0.0
    else:
        def model(n, a_, b_, c_):
            return a_ - b_ / n ** c_

        p0 = (float(f[-1]) * 1.1, float((f[-1] - f[0]) * N[0]), 1.0)
        try:
            popt, pcov = curve_fit(model, N, f, p0=p0, maxfev=20000)
        except (RuntimeError, ValueError) as exc:
            raise FitError(f"saturating fit failed: {exc}", data=(sizes, values)) from exc
        a, b, beta = map(float, popt)
        err = float(math.sqrt(max(pcov[2, 2], 0.0))) if np.all(np.isfinite(pcov)) else math.inf
    fit = ScalingFit(a, beta, form, 0.0, tuple(N.tolist()), tuple(f.tolist()), b=b, stderr=err)
    fit.residual = _log_residual(fit.predict(N), f)
    return fit


# --------------------------------------------------------------------------
# gap minima


@dataclass
class GapMinimum:
    theta: float
    gap: float
    boundary: bool
    n_spins: int
    alpha: float
    side: str
    evaluations: int = 0
    grid: tuple = ()


class _GapScan:
    """Memoised gap evaluations with warm-started eigensolves."""

    def __init__(self, alpha, n, kind, seed, coupling):
        self.alpha, self.n, self.kind, self.seed, self.coupling = alpha, n, kind, seed, coupling
        self.cache = {}
        self._start = None

    def __call__(self, theta: float) -> float:
        theta = float(min(max(theta, -math.pi / 2), math.pi / 2))
        if theta not in self.cache:
            p = ChainParams(self.n, self.alpha, theta, coupling=self.coupling)
            res = mass_gap(p, kind=self.kind, seed=self.seed, tol=SCAN_TOL, start=self._start)
            if res.spectrum is not None and res.spectrum.sectored:
                self._start = {b.sector: b.eigenvectors for b in res.spectrum.blocks}
            self.cache[theta] = res.gap
        return self.cache[theta]


def _golden(f, a, b, tol):
    c = b - _PHI * (b - a)
    d = a + _PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def locate_gap_minimum(
    alpha: float,
    n_spins: int,
    side: str,
    gap_kind: str = "parity",
    step: float = GRID_STEP,
    tol: float = REFINE_TOL,
    interval: tuple | None = None,
    seed: int = DEFAULT_SEED,
    coupling: float = 1.0,
) -> GapMinimum:
    """Minimum of the mass gap over one side of the phase diagram.

    A grid of spacing ``step`` over the side's theta interval (or the given
    sub-interval) is followed by golden-section refinement to ``tol``.  The
    endpoints +-pi/2 are replaced by +-(pi/2 - 1e-3).  A minimum on an end of
    the scanned range sets ``boundary``.
    """
    side = _side(side)
    lo, hi = SIDES[side]
    # the field vanishes at +-pi/2 and the levels become classically degenerate
    lo, hi = max(lo, -math.pi / 2 + ENDPOINT_OFFSET), min(hi, math.pi / 2 - ENDPOINT_OFFSET)
    if interval is not None:
        lo, hi = max(lo, interval[0]), min(hi, interval[1])
        if hi <= lo:
            raise ParameterError("empty scan interval")
    count = max(2, int(round((hi - lo) / step)) + 1)
    grid = np.linspace(lo, hi, count)
    scan = _GapScan(alpha, n_spins, gap_kind, seed, coupling)
    # sweep from the outer end inward so warm starts follow a smooth path
    order = range(count) if side == "FM" else range(count - 1, -1, -1)
    gaps = np.empty(count)
    for i in order:
        gaps[i] = scan(grid[i])
    i = int(np.argmin(gaps))
    if i in (0, count - 1):
        return GapMinimum(float(grid[i]), float(gaps[i]), True, n_spins, alpha, side, len(scan.cache), tuple(grid))
    theta, g = _golden(scan, grid[i - 1], grid[i + 1], tol)
    if gaps[i] < g:
        theta, g = grid[i], gaps[i]
    return GapMinimum(float(theta), float(g), False, n_spins, alpha, side, len(scan.cache), tuple(grid))


@dataclass
class CriticalPointEstimate:
    theta_c_finite: dict
    theta_c_extrapolated: float
    uncertainty: float
    side: str
    alpha: float
    omega: float = math.nan
    amplitude: float = math.nan
    boundary: dict = field(default_factory=dict)
    gaps: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)


def minima_over_sizes(alpha, sizes, side, gap_kind="parity", window: float | None = 0.3, seed=DEFAULT_SEED):
    """Per-size gap minima; after the smallest size only a window around the
    previous minimum is scanned (minima drift smoothly with N).
    """
    side = _side(side)
    out = []
    prev = None
    for n in sorted(sizes):
        interval = None if (prev is None or window is None) else (prev - window, prev + window)
        m = locate_gap_minimum(alpha, n, side, gap_kind=gap_kind, interval=interval, seed=seed)
        lo, hi = SIDES[side]
        lo, hi = max(lo, -math.pi / 2 + ENDPOINT_OFFSET), min(hi, math.pi / 2 - ENDPOINT_OFFSET)
        if m.boundary and interval is not None and not (math.isclose(m.theta, lo) or math.isclose(m.theta, hi)):
            m = locate_gap_minimum(alpha, n, side, gap_kind=gap_kind, seed=seed)
        out.append(m)
        prev = m.theta
    return out


def extrapolate_critical(
    alpha: float,
    sizes,
    side: str,
    gap_kind: str = "parity",
    minima=None,
    window: float | None = 0.3,
    seed: int = DEFAULT_SEED,
) -> CriticalPointEstimate:
    """Fit ``theta_N = theta_inf + c N^(-omega)`` to the per-size gap minima.

    The uncertainty combines the fit standard error with the refinement
    tolerance.  If the minima do not move (e.g. pinned to the interval end)
    the common value is returned with the refinement tolerance as error.
    """
    side = _side(side)
    sizes = sorted(sizes)
    if len(sizes) < 4:
        raise FitError("extrapolation needs at least 4 sizes", data=sizes)
    if minima is None:
        minima = minima_over_sizes(alpha, sizes, side, gap_kind, window, seed)
    thetas = {m.n_spins: m.theta for m in minima}
    N = np.array(sizes, dtype=float)
    y = np.array([thetas[n] for n in sizes])
    info = dict(
        theta_c_finite=thetas,
        side=side,
        alpha=alpha,
        boundary={m.n_spins: m.boundary for m in minima},
        gaps={m.n_spins: m.gap for m in minima},
    )
    if np.ptp(y) < 10 * REFINE_TOL:
        return CriticalPointEstimate(theta_c_extrapolated=float(y.mean()), uncertainty=REFINE_TOL, **info,
                                     metadata={"note": "minima do not drift with N"})

    def model(n, t_inf, c, omega):
        return t_inf + c * n ** (-omega)

    slope0 = (y[-1] - y[0]) / (N[-1] ** -1 - N[0] ** -1)
    try:
        popt, pcov = curve_fit(model, N, y, p0=(y[-1], slope0, 1.0), maxfev=20000)
    except (RuntimeError, ValueError) as exc:
        raise FitError(f"critical-point extrapolation failed: {exc}", data=thetas) from exc
    t_inf, c, omega = map(float, popt)
    var = float(pcov[0, 0]) if np.all(np.isfinite(pcov)) else math.inf
    unc = math.sqrt(max(var, 0.0) + REFINE_TOL ** 2)
    lo, hi = SIDES[side]
    meta = {}
    if not lo <= t_inf <= hi:
        meta["clipped_from"] = t_inf
        t_inf = min(max(t_inf, lo), hi)
    return CriticalPointEstimate(theta_c_extrapolated=t_inf, uncertainty=unc, omega=omega, amplitude=c,
                                 metadata=meta, **info)


# --------------------------------------------------------------------------
# exponents


def _interior(theta: float) -> float:
    """Pull a theta = +-pi/2 endpoint inward, where the ground level is degenerate."""
    if theta >= math.pi / 2 - ENDPOINT_OFFSET:
        return math.pi / 2 - ENDPOINT_OFFSET
    if theta <= -math.pi / 2 + ENDPOINT_OFFSET:
        return -math.pi / 2 + ENDPOINT_OFFSET
    return theta


def ground_qfi(n, alpha, theta, label=None, seed=DEFAULT_SEED) -> tuple[float, str]:
    """QFI density of the ground state for ``label`` (best label when None)."""
    _, psi, _ = ground_state(ChainParams(n, alpha, theta), seed=seed)
    if label is None:
        tom = tomography(psi)
        return tom.best_value, tom.best_label
    lab = CollectiveLabel.parse(label)
    return qfi_pure(psi, lab), lab.name


@dataclass
class ExponentEstimate:
    beta: float
    uncertainty: float
    fit: ScalingFit
    fit_fixed_theta: ScalingFit | None
    thetas: dict
    labels: dict
    metadata: dict = field(default_factory=dict)


def scaling_exponent_at_criticality(
    alpha: float,
    side: str,
    sizes,
    label=None,
    estimate: CriticalPointEstimate | None = None,
    gap_kind: str = "parity",
    seed: int = DEFAULT_SEED,
    form: str | None = None,
) -> ExponentEstimate:
    """Slope of ``ln f`` against ``ln N`` at the per-size critical angles.

    The uncertainty adds in quadrature the fit standard error and the shift of
    the slope when every size is evaluated at the extrapolated angle instead,
    which measures the indeterminacy of the critical point.  ``label=None``
    takes the maximizing collective operator at each point.

    At ``alpha = 0`` on the AFM side the endpoint state is the Dicke state,
    whose QFI is ``1 + N/2``; there the default form is ``shifted`` so the
    separable offset does not bias the slope.  The plain power slope is kept
    in ``metadata["power_beta"]``.
    """
    side = _side(side)
    dicke = alpha == 0 and side == "AFM"
    if form is None:
        form = "shifted" if dicke else "power"
    sizes = sorted(sizes)
    if estimate is None:
        estimate = extrapolate_critical(alpha, sizes, side, gap_kind=gap_kind, seed=seed)
    vals, labs, thetas = [], {}, {}
    for n in sizes:
        th = _interior(estimate.theta_c_finite[n])
        f, lab = ground_qfi(n, alpha, th, label, seed)
        vals.append(f)
        labs[n] = lab
        thetas[n] = th
    fit = fit_power_law(sizes, vals, form)
    th_inf = _interior(estimate.theta_c_extrapolated)
    fixed = None
    spread = 0.0
    if any(abs(th_inf - thetas[n]) > REFINE_TOL for n in sizes):
        fixed = fit_power_law(sizes, [ground_qfi(n, alpha, th_inf, label, seed)[0] for n in sizes], form)
        spread = abs(fixed.exponent - fit.exponent)
    unc = math.sqrt(fit.stderr ** 2 + spread ** 2)
    meta = {"theta_inf": th_inf, "form": form, "values": dict(zip(sizes, vals))}
    meta["power_beta"] = fit.exponent if form == "power" else fit_power_law(sizes, vals, "power").exponent
    return ExponentEstimate(fit.exponent, unc, fit, fixed, thetas, labs, meta)


@dataclass(frozen=True)
class MeanFieldExponent:
    value: float
    boundary: bool
    note: str = ""


def mean_field_exponent(alpha: float) -> MeanFieldExponent:
    """Mean-field exponent ``(alpha - 1)/2`` along the ferromagnetic line."""
    if alpha < 1:
        raise DomainError("mean-field exponent defined for alpha >= 1")
    if alpha == 1:
        return MeanFieldExponent(0.0, True, "alpha = 1 is the limit value")
    v = 0.5 * (alpha - 1)
    note = ""
    if alpha >= 3:
        note = "short-range regime: conformal value 3/4 applies instead"
    elif alpha > 5.0 / 3.0:
        note = "outside the accurate window 1 < alpha < 5/3"
    return MeanFieldExponent(v, False, note)


@dataclass(frozen=True)
class Derivative:
    value: float
    one_sided: bool = False
    step: float = 0.0


def qfi_theta_derivative(alpha, theta, n_spins, label, delta=1e-3, richardson=False, seed=DEFAULT_SEED):
    """``d f / d theta`` of the ground state by finite differences."""
    lo, hi = -math.pi / 2, math.pi / 2
    if not lo <= theta <= hi:
        raise DomainError("theta outside [-pi/2, pi/2]")
    f = lambda t: ground_qfi(n_spins, alpha, t, label, seed)[0]  # noqa: E731
    if theta - delta < lo or theta + delta > hi:
        sgn = 1.0 if theta - delta < lo else -1.0
        return Derivative(sgn * (f(theta + sgn * delta) - f(theta)) / delta, True, delta)
    d1 = (f(theta + delta) - f(theta - delta)) / (2 * delta)
    if richardson and lo <= theta - 2 * delta and theta + 2 * delta <= hi:
        d2 = (f(theta + 2 * delta) - f(theta - 2 * delta)) / (4 * delta)
        d1 = (4 * d1 - d2) / 3
    return Derivative(d1, False, delta)


def qfi_alpha_derivative(theta, alpha, n_spins, label, delta=0.05, seed=DEFAULT_SEED):
    """``d f / d alpha`` of the ground state by finite differences in alpha."""
    if math.isinf(alpha):
        raise DomainError("alpha derivative undefined at the nearest-neighbour limit")
    f = lambda a: ground_qfi(n_spins, a, theta, label, seed)[0]  # noqa: E731
    if alpha - delta < 0:
        return Derivative((f(alpha + delta) - f(alpha)) / delta, True, delta)
    return Derivative((f(alpha + delta) - f(alpha - delta)) / (2 * delta), False, delta)


# --------------------------------------------------------------------------
# correlations


def zz_correlator(psi: np.ndarray, i: int, j: int) -> float:
    """``<sigma_z^(i) sigma_z^(j)>`` for 1-based sites."""
    n = int(round(math.log2(psi.size)))
    img = site_images(psi, "z", np.array([i - 1, j - 1]))
    return float(img[0] @ img[1]) if n else 0.0


def correlation_scaling(
    alpha: float,
    side: str,
    sizes,
    mode: str = "size-scan",
    thetas: dict | None = None,
    estimate: CriticalPointEstimate | None = None,
    seed: int = DEFAULT_SEED,
) -> ScalingFit:
    """Power-law fit of the mid-chain zz correlator at criticality.

    ``size-scan`` uses sites ``N/2`` and ``N/2 + round(N/5)`` at each size;
    ``distance-scan`` uses separations ``r`` from site ``N/2`` at the largest
    size.  Magnitudes are fitted, which removes the AFM staggering.  The
    returned exponent is ``beta - 1`` (size scan) or the decay exponent in
    ``r``; ``metadata['beta']`` holds ``exponent + 1``.
    """
    side = _side(side)
    sizes = sorted(sizes)
    if mode not in ("size-scan", "distance-scan"):
        raise ParameterError("mode must be size-scan or distance-scan")
    if thetas is None:
        if estimate is None:
            estimate = extrapolate_critical(alpha, sizes, side, seed=seed)
        thetas = {n: _interior(estimate.theta_c_finite[n]) for n in sizes}
    if mode == "size-scan":
        xs, vals = [], []
        for n in sizes:
            r = round(n / 5)
            if r < 1:
                raise DomainError("size scan needs N/5 >= 1")
            _, psi, _ = ground_state(ChainParams(n, alpha, thetas[n]), seed=seed)
            xs.append(n)
            vals.append(abs(zz_correlator(psi, n // 2, n // 2 + r)))
    else:
        n = sizes[-1]
        _, psi, _ = ground_state(ChainParams(n, alpha, thetas[n]), seed=seed)
        xs = list(range(1, n // 2 + 1))
        vals = [abs(zz_correlator(psi, n // 2, n // 2 + r)) for r in xs]
    vals = np.array(vals)
    if np.all(vals < 1e-12):
        raise DegenerateInputError("correlator vanishes at every point; nothing to fit")
    if np.any(vals < 1e-12):
        raise DegenerateInputError("correlator vanishes at some points; power law undefined")
    fit = fit_power_law(xs, vals, "power")
    fit.metadata.update(mode=mode, beta=fit.exponent + 1.0, thetas=thetas)
    return fit
