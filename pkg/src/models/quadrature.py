"""Adaptive quadrature and epsilon -> 0 extrapolation.

Integrals are evaluated with scipy's adaptive Gauss-Kronrod vector
integrator, so one call handles complex and array-valued integrands (the
whole regulator ladder at once). Results are deterministic for a fixed
QuadratureConfig: subdivision order depends only on the integrand values.
"""

import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad_vec

from src.detector_schema import ExtrapolationReport, QuadratureConfig
from src.errors import ConfigurationError, ConvergenceError, LadderError

logger = logging.getLogger(__name__)

_NOT_CONVERGED = 1
_ROUNDING = 2
_NAN = 3

# Inner integrals of a 2D integration run this much tighter than the outer one
_INNER_TIGHTENING = 10.0

# theta range of each semicircle, integrated upwards
_DETOUR_SIDES = {"below": (np.pi, 2.0 * np.pi), "above": (0.0, np.pi)}


def _unwrap(value):
    value = np.asarray(value)
    return value[()] if value.ndim == 0 else value


def integrate_1d(
    f: Callable,
    a: float,
    b: float,
    cfg: QuadratureConfig,
    points: Optional[Sequence[float]] = None,
    abs_tol: Optional[float] = None,
    rel_tol: Optional[float] = None,
):
    """Adaptive estimate of the integral of f over [a, b].

    f may return a scalar (real or complex) or an array; `points` forces
    breakpoints (window edges, kinks). Raises ConvergenceError with the best
    estimate when max_subdivisions is exhausted or the integrand is not finite.
    """
    if not a < b:
        raise ConfigurationError(f"integration bounds must satisfy a < b, got [{a}, {b}]")
    abs_tol = cfg.abs_tol if abs_tol is None else abs_tol
    rel_tol = cfg.rel_tol if rel_tol is None else rel_tol
    inner = None
    if points:
        inner = sorted({float(p) for p in points if a < p < b}) or None
    result, error, info = quad_vec(
        f,
        a,
        b,
        epsabs=abs_tol,
        epsrel=rel_tol,
        norm="max",
        limit=cfg.max_subdivisions,
        points=inner,
        full_output=True,
    )
    if info.status in (_NOT_CONVERGED, _NAN):
        raise ConvergenceError(
            f"quadrature over [{a:.6g}, {b:.6g}] failed: {info.message}",
            estimate=_unwrap(result),
            error_bound=float(error),
        )
    if info.status == _ROUNDING:
        logger.debug(
            "rounding-limited quadrature on [%g, %g]: error %.3e", a, b, error
        )
    return _unwrap(result)


def integrate_with_pole_detour(
    f: Callable,
    a: float,
    b: float,
    poles: Sequence[float],
    cfg: QuadratureConfig,
    radius: Optional[float] = None,
    side: str = "below",
    abs_tol: Optional[float] = None,
    rel_tol: Optional[float] = None,
    points: Optional[Sequence[float]] = None,
):
    """Integrate f along [a, b], going around each real pole on a semicircle.

    f must accept complex arguments near the poles. The semicircle around p
    is z = p + r exp(i theta), theta from pi to 2 pi for side="below" (poles
    approached from the upper half plane) and from pi to 0 for side="above".
    """
    if side not in _DETOUR_SIDES:
        raise ConfigurationError(f"detour side must be 'below' or 'above', got {side!r}")
    r = cfg.detour_radius if radius is None else radius
    tols = {"abs_tol": abs_tol, "rel_tol": rel_tol, "points": points}
    poles = sorted(float(p) for p in poles)
    if not poles:
        return integrate_1d(f, a, b, cfg, **tols)
    if poles[0] - r <= a or poles[-1] + r >= b:
        raise ConfigurationError(
            f"detours of radius {r} around {poles} do not fit inside [{a}, {b}]"
        )
    for left, right in zip(poles, poles[1:]):
        if right - left <= 2.0 * r:
            raise ConfigurationError(
                f"detours of radius {r} around poles {left} and {right} overlap"
            )

    total = 0.0
    start = a
    for pole in poles:
        total = total + integrate_1d(f, start, pole - r, cfg, **tols)
        lo, hi = _DETOUR_SIDES[side]
        arc = integrate_1d(
            _semicircle(f, pole, r), lo, hi, cfg, abs_tol=abs_tol, rel_tol=rel_tol
        )
        # the upper arc runs from pi down to 0
        total = total + (arc if side == "below" else -arc)
        start = pole + r
    total = total + integrate_1d(f, start, b, cfg, **tols)
    return _unwrap(total)


def _semicircle(f: Callable, centre: float, radius: float) -> Callable:
    def integrand(theta):
        step = radius * np.exp(1j * theta)
        return f(centre + step) * 1j * step

    return integrand


def integrate_2d(
    f: Callable,
    x_range: Tuple[float, float],
    y_range: Tuple[float, float],
    cfg: QuadratureConfig,
    x_points: Optional[Sequence[float]] = None,
    y_points: Optional[Sequence[float]] = None,
    y_poles: Optional[Callable[[float], Sequence[float]]] = None,
    radius: Optional[float] = None,
    side: str = "below",
):
    """Nested adaptive estimate of the integral of f(x, y) over a rectangle.

    `y_poles(x)` lists real poles of the inner integrand for a given x; the
    inner contour then goes around them on semicircles (see
    integrate_with_pole_detour), so f must accept complex y there.
    """
    y0, y1 = y_range
    inner_abs = cfg.abs_tol / _INNER_TIGHTENING
    inner_rel = cfg.rel_tol / _INNER_TIGHTENING

    def outer(x):
        poles = list(y_poles(x)) if y_poles is not None else []
        if poles:
            return integrate_with_pole_detour(
                lambda y: f(x, y),
                y0,
                y1,
                poles,
                cfg,
                radius=radius,
                side=side,
                abs_tol=inner_abs,
                rel_tol=inner_rel,
                points=y_points,
            )
        return integrate_1d(
            lambda y: f(x, y),
            y0,
            y1,
            cfg,
            points=y_points,
            abs_tol=inner_abs,
            rel_tol=inner_rel,
        )

    return integrate_1d(outer, x_range[0], x_range[1], cfg, points=x_points)


def extrapolate_epsilon(
    samples: List[Tuple[float, object]], max_order: Optional[int] = None
) -> ExtrapolationReport:
    """Richardson extrapolation of f(eps) to eps = 0 (Neville table at zero).

    Values may be scalars or arrays sampled on the same ladder. The residual
    is the largest difference between the last two diagonal entries.
    """
    if len(samples) < 3:
        raise LadderError(f"need at least 3 ladder samples, got {len(samples)}")
    eps = [float(e) for e, _ in samples]
    if any(e <= 0 for e in eps):
        raise LadderError("ladder values must be > 0")
    if any(later >= earlier for earlier, later in zip(eps, eps[1:])):
        raise LadderError(f"ladder must be strictly decreasing, got {eps}")

    count = len(samples)
    order = count - 1 if max_order is None else min(int(max_order), count - 1)
    if order < 1:
        raise LadderError(f"extrapolation order must be >= 1, got {max_order}")

    column = [np.asarray(v, dtype=complex) for _, v in samples]
    previous = column[-1]
    for j in range(1, order + 1):
        updated = list(column)
        for i in range(j, count):
            updated[i] = (eps[i - j] * column[i] - eps[i] * column[i - 1]) / (
                eps[i - j] - eps[i]
            )
        previous = column[-1]
        column = updated

    best = column[-1]
    residual = float(np.max(np.abs(best - previous)))
    return ExtrapolationReport(
        values_at_eps=[(e, _unwrap(np.asarray(v))) for e, v in samples],
        extrapolated=_unwrap(best),
        residual=residual,
    )
