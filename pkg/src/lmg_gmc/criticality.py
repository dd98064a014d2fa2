"""Field sweeps, derivative minima and finite-size scaling of GMC.

The pipeline per system size: sweep ``S^k(h)`` on a uniform field grid, take
the first derivative, locate its minimum ``h_min`` with a parabolic refinement,
evaluate ``S^k`` there, then fit ``S^k(h_min) = A N^alpha`` on a log-log scale
over the admissible sizes.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import curve_fit

from .measures import BlockEntropies, correlation_order
from .symmetric import ModelParams, SolverError, ground_state

log = logging.getLogger(__name__)

DEFAULT_H_START = 0.5
DEFAULT_H_STOP = 1.2
DEFAULT_H_STEP = 0.005
DEFAULT_DROP_BELOW = 24
DEFAULT_REFINE_LEVELS = 3
ZOOM_FACTOR = 10
ZOOM_HALF_WIDTH = 3  # coarse steps kept on each side when zooming
MIN_FIT_POINTS = 4

FRACTIONAL_SPECS = {"N": 1, "N/2": 2, "N/4": 4}


class GridRangeError(ValueError):
    """The derivative minimum sits on the boundary of the field grid."""


class InsufficientSizesError(ValueError):
    """Too few admissible system sizes for a fit."""


# ---------------------------------------------------------------- k specs

def parse_k_spec(spec) -> int | str:
    """Accept an integer order or one of ``N``, ``N/2``, ``N/4``."""
    if isinstance(spec, (int, np.integer)):
        k = int(spec)
    else:
        text = str(spec).strip().upper().replace(" ", "")
        if text in FRACTIONAL_SPECS:
            return text
        try:
            k = int(text)
        except ValueError:
            raise ValueError(f"unrecognised k spec {spec!r}") from None
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return k


def resolve_order(k_spec, n_spins: int) -> int:
    spec = parse_k_spec(k_spec)
    if isinstance(spec, str):
        m = FRACTIONAL_SPECS[spec]
        if n_spins % m:
            raise ValueError(f"k = {spec} is not integral for N = {n_spins}")
        k = n_spins // m
    else:
        k = spec
    if k > n_spins:
        raise ValueError(f"k = {k} exceeds N = {n_spins}")
    return k


def admissible_sizes(k_spec, n_max: int, n_min: int = 2) -> np.ndarray:
    """System sizes that avoid the floor-function ladder for a given order."""
    if n_max < 12:
        raise ValueError(f"n_max must be >= 12, got {n_max}")
    spec = parse_k_spec(k_spec)
    if isinstance(spec, str):
        stride = 2 * FRACTIONAL_SPECS[spec]
    elif spec == 1:
        stride = 2
    else:
        stride = math.lcm(spec - 1, spec)
    sizes = np.arange(stride, n_max + 1, stride)
    if isinstance(spec, int):
        sizes = sizes[sizes >= spec]
    sizes = sizes[sizes >= max(n_min, 2)]
    if sizes.size == 0:
        raise InsufficientSizesError(f"no admissible N <= {n_max} for k = {k_spec}")
    return sizes


# ---------------------------------------------------------------- sweeps

@dataclass
class SweepCurve:
    k: int
    params: ModelParams
    h_grid: np.ndarray
    values: np.ndarray
    derivative: np.ndarray | None = None

    @property
    def label(self) -> str:
        return "S_total" if self.k == 1 else f"S_k{self.k}"


def uniform_grid(start: float, stop: float, step: float) -> np.ndarray:
    if step <= 0 or stop <= start:
        raise ValueError(f"bad grid {start}:{stop}:{step}")
    count = int(round((stop - start) / step))
    if abs(start + count * step - stop) > 1e-9 * max(1.0, abs(stop)):
        raise ValueError(f"step {step} does not divide [{start}, {stop}]")
    return start + step * np.arange(count + 1)


def check_uniform(h_grid: np.ndarray) -> None:
    h = np.asarray(h_grid, dtype=float)
    if h.ndim != 1 or h.size < 2:
        raise ValueError("field grid needs at least two points")
    dh = np.diff(h)
    if np.any(dh <= 0):
        raise ValueError("field grid must be strictly increasing")
    if np.max(np.abs(dh - dh.mean())) > 1e-12 * max(abs(dh.mean()), 1.0) + 1e-15:
        raise ValueError("field grid must be uniform")


def evaluate_orders(params: ModelParams, orders: Sequence[int],
                    solver: Callable = ground_state) -> list[float]:
    """Solve once at ``params`` and return ``S^k`` for every requested order."""
    try:
        gs = solver(params)
    except SolverError as exc:
        raise SolverError(f"at h = {params.field!r}: {exc}") from exc
    ent = BlockEntropies(gs.vector)
    return [correlation_order(ent, k) for k in orders]


def _map(fn: Callable, items: Sequence, workers: int | None):
    if workers is not None and workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def sweep(params: ModelParams, k_list: Iterable, h_grid, workers: int | None = 1,
          evaluator: Callable[[ModelParams, Sequence[int]], list[float]] = evaluate_orders,
          ) -> list[SweepCurve]:
    """One curve per order; each field point is solved once and shared by all orders."""
    h_grid = np.asarray(h_grid, dtype=float)
    check_uniform(h_grid)
    if h_grid[0] < 0 or h_grid[-1] > 2.0 + 1e-12:
        raise ValueError("field grid must lie within [0, 2]")
    orders = [resolve_order(k, params.n_spins) for k in k_list]
    if not orders:
        raise ValueError("empty k list")
    rows = _map(lambda h: evaluator(params.with_field(float(h)), orders), h_grid, workers)
    table = np.array(rows, dtype=float).reshape(len(h_grid), len(orders))
    return [SweepCurve(k, params, h_grid.copy(), table[:, i].copy())
            for i, k in enumerate(orders)]


def differentiate(curve: SweepCurve) -> SweepCurve:
    """Second-order finite differences: central inside, one-sided at both ends."""
    if len(curve.h_grid) < 3:
        raise ValueError("need at least 3 grid points to differentiate")
    check_uniform(curve.h_grid)
    h = curve.h_grid
    step = (h[-1] - h[0]) / (len(h) - 1)
    deriv = np.gradient(curve.values, step, edge_order=2)
    return replace(curve, derivative=deriv)


# ---------------------------------------------------------------- minimum

@dataclass(frozen=True)
class DerivativeMinimum:
    h_min: float
    depth: float
    s_at_min: float
    tie: bool = False


def _parabola_vertex(x: np.ndarray, y: np.ndarray) -> tuple[float, float, bool]:
    """Vertex of the parabola through three equally spaced points."""
    step = x[1] - x[0]
    curv = y[0] - 2.0 * y[1] + y[2]
    if curv == 0.0:
        return float(x[1]), float(y[1]), True
    offset = 0.5 * (y[0] - y[2]) / curv
    depth = y[1] - 0.25 * (y[0] - y[2]) * offset
    return float(x[1] + offset * step), float(depth), False


def _quadratic_at(x: np.ndarray, y: np.ndarray, t: float) -> float:
    coeffs = np.polyfit(x - x[1], y, 2)
    return float(np.polyval(coeffs, t - x[1]))


def locate_h_min(curve: SweepCurve) -> DerivativeMinimum:
    if curve.derivative is None:
        raise ValueError("curve has no derivative; call differentiate() first")
    d = curve.derivative
    i = int(np.argmin(d))
    if i == 0 or i == len(d) - 1:
        raise GridRangeError(
            f"derivative minimum at grid boundary h = {curve.h_grid[i]:.4g} "
            f"(N = {curve.params.n_spins}, k = {curve.k})"
        )
    j = i
    while j + 1 < len(d) and d[j + 1] == d[i]:
        j += 1
    if j > i:
        # flat run of equal minima: report its midpoint
        h_mid = 0.5 * (curve.h_grid[i] + curve.h_grid[j])
        s_mid = float(np.interp(h_mid, curve.h_grid, curve.values))
        return DerivativeMinimum(float(h_mid), float(d[i]), s_mid, tie=True)
    window = slice(i - 1, i + 2)
    x, y = curve.h_grid[window], d[window]
    h_min, depth, tie = _parabola_vertex(x, y)
    s_at = _quadratic_at(x, curve.values[window], h_min)
    return DerivativeMinimum(h_min, depth, s_at, tie)


# ---------------------------------------------------------------- fits

@dataclass
class FssFit:
    k_spec: str
    sizes: np.ndarray
    h_min_values: np.ndarray
    correlation_at_min: np.ndarray
    alpha: float
    prefactor_A: float
    alpha_stderr: float
    intercept_stderr: float = 0.0
    excluded: list = field(default_factory=list)


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    """Straight-line least squares; standard errors from the residuals directly.

    (The ``1 - r**2`` route cancels badly on near-perfect fits.)
    """
    n = len(x)
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    s2 = float(resid @ resid) / (n - 2)
    return slope, intercept, math.sqrt(s2 / sxx), math.sqrt(s2 * (1.0 / n + xm**2 / sxx))


def fss_fit(sizes, values, k_spec="?", h_min_values=None) -> FssFit:
    """Ordinary least squares of ln S against ln N."""
    sizes = np.asarray(sizes, dtype=float)
    values = np.asarray(values, dtype=float)
    ok = values > 0
    excluded = sizes[~ok].astype(int).tolist()
    if excluded:
        warnings.warn(f"non-positive correlations excluded from fit at N = {excluded}")
    if ok.sum() < MIN_FIT_POINTS:
        raise InsufficientSizesError(
            f"need at least {MIN_FIT_POINTS} positive points, got {int(ok.sum())}")
    slope, intercept, slope_se, intercept_se = _ols(np.log(sizes[ok]), np.log(values[ok]))
    h_arr = (np.full(len(sizes), np.nan) if h_min_values is None
             else np.asarray(h_min_values, dtype=float))
    return FssFit(str(k_spec), sizes[ok].astype(int), h_arr[ok], values[ok],
                  slope, math.exp(intercept), slope_se, intercept_se, excluded)


def _powerlaw_approach(n, h_c, c, e):
    return h_c - c * n ** (-e)


def h_min_trend(sizes, h_min_values) -> dict:
    """Extrapolate ``h_min(N)`` to infinite size with two candidate trend forms."""
    n = np.asarray(sizes, dtype=float)
    h = np.asarray(h_min_values, dtype=float)
    if n.size < MIN_FIT_POINTS:
        raise InsufficientSizesError(f"need at least {MIN_FIT_POINTS} sizes, got {n.size}")

    report: dict = {}
    # h_min = a + b / ln N
    x = 1.0 / np.log(n)
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, h, rcond=None)
    resid = h - design @ coef
    report["inverselog"] = {
        "h_c": float(coef[0]), "b": float(coef[1]),
        "rms_residual": float(np.sqrt(np.mean(resid**2))), "ok": True,
    }

    spread = float(np.ptp(h))
    if spread == 0.0:
        report["powerlaw"] = {"h_c": float(h[0]), "c": 0.0, "e": float("nan"),
                              "rms_residual": 0.0, "ok": True,
                              "note": "constant sequence"}
        return report
    sign = 1.0 if h[-1] >= h[0] else -1.0
    h_far = float(h[-1] + sign * spread)
    p0 = (h_far, sign * spread * n[0] ** 0.5, 0.5)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            popt, _ = curve_fit(_powerlaw_approach, n, h, p0=p0, maxfev=20000)
        resid = h - _powerlaw_approach(n, *popt)
        report["powerlaw"] = {"h_c": float(popt[0]), "c": float(popt[1]),
                              "e": float(popt[2]),
                              "rms_residual": float(np.sqrt(np.mean(resid**2))),
                              "ok": bool(np.all(np.isfinite(popt)))}
    except (RuntimeError, ValueError) as exc:
        report["powerlaw"] = {"h_c": float("nan"), "c": float("nan"), "e": float("nan"),
                              "rms_residual": float("nan"), "ok": False,
                              "note": f"fit failed: {exc}"}
    return report


# ---------------------------------------------------------------- pipeline

@dataclass(frozen=True)
class SizePoint:
    n_spins: int
    order: int
    h_min: float
    depth: float
    s_at_min: float


def refine_h_min(params: ModelParams, k: int, h_grid, levels: int = DEFAULT_REFINE_LEVELS,
                 evaluator=evaluate_orders) -> DerivativeMinimum:
    """Coarse derivative minimum, then ``levels`` zoomed sweeps around it.

    Each zoom divides the step by ``ZOOM_FACTOR`` and keeps a window of
    ``ZOOM_HALF_WIDTH`` old steps either side of the current estimate.
    """
    h_grid = np.asarray(h_grid, dtype=float)
    (curve,) = sweep(params, [k], h_grid, workers=1, evaluator=evaluator)
    minimum = locate_h_min(differentiate(curve))
    step = float(h_grid[1] - h_grid[0])
    for _ in range(levels):
        half = ZOOM_HALF_WIDTH * step
        step /= ZOOM_FACTOR
        count = int(round(2 * half / step))
        lo = max(minimum.h_min - half, 0.0)
        fine = lo + step * np.arange(count + 1)
        (curve,) = sweep(params, [k], fine, workers=1, evaluator=evaluator)
        minimum = locate_h_min(differentiate(curve))
    return minimum


def scan_size(k_spec, n_spins: int, gamma: float = 0.5, coupling: float = 1.0,
              h_grid=None, refine_levels: int = DEFAULT_REFINE_LEVELS,
              evaluator=evaluate_orders) -> SizePoint:
    """Locate ``h_min`` for one system size and evaluate ``S^k`` exactly there."""
    if h_grid is None:
        h_grid = uniform_grid(DEFAULT_H_START, DEFAULT_H_STOP, DEFAULT_H_STEP)
    k = resolve_order(k_spec, n_spins)
    params = ModelParams(n_spins, gamma, 0.0, coupling)
    minimum = refine_h_min(params, k, h_grid, refine_levels, evaluator)
    (s_exact,) = evaluator(params.with_field(minimum.h_min), [k])
    return SizePoint(n_spins, k, minimum.h_min, minimum.depth, float(s_exact))


@dataclass
class FssResult:
    fit: FssFit
    points: list[SizePoint]
    trend: dict


def run_fss(k_spec, n_max: int, gamma: float = 0.5, coupling: float = 1.0,
            drop_below: int = DEFAULT_DROP_BELOW, h_grid=None,
            sizes: Sequence[int] | None = None, workers: int | None = 1,
            refine_levels: int = DEFAULT_REFINE_LEVELS,
            evaluator=evaluate_orders) -> FssResult:
    spec = parse_k_spec(k_spec)
    if sizes is None:
        sizes = admissible_sizes(spec, n_max, n_min=drop_below)
    else:
        allowed = set(admissible_sizes(spec, max(n_max, max(sizes), 12)).tolist())
        bad = sorted(int(n) for n in sizes if int(n) not in allowed)
        if bad:
            raise ValueError(f"sizes {bad} violate the divisibility rule for k = {spec}")
    sizes = sorted(int(n) for n in sizes)
    if len(sizes) < MIN_FIT_POINTS:
        raise InsufficientSizesError(
            f"only {len(sizes)} admissible sizes for k = {spec} with "
            f"{drop_below} <= N <= {n_max}; need {MIN_FIT_POINTS}")
    points = _map(lambda n: scan_size(spec, n, gamma, coupling, h_grid, refine_levels,
                                      evaluator),
                  sizes, workers)
    points.sort(key=lambda p: p.n_spins)
    ns = [p.n_spins for p in points]
    hs = [p.h_min for p in points]
    fit = fss_fit(ns, [p.s_at_min for p in points], k_spec=spec, h_min_values=hs)
    return FssResult(fit, points, h_min_trend(ns, hs))
