"""Excitation probability P / lam^2 of a derivative-coupled static detector.

P = int int chi(tau) chi(tau') exp(-i omega (tau - tau')) A(tau, tau').
Stationary geometries split A = A_M + A_reg: the Minkowski piece has a
closed form and the regular piece is a 1D lag integral against the
switching autocorrelation. The time machine is a sum of non-stationary
image terms, each a 2D integral sampled on the regulator ladder and
extrapolated to eps -> 0.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy import special

from src.config import MODESUM_TAIL, RESPONSE_DEFAULTS, thread_count
from src.detector_schema import (
    DetectorConfig,
    EinsteinCylinder,
    ExtrapolationReport,
    ImageSumReport,
    Minkowski,
    PoincareAdS2,
    QuadratureConfig,
    ResponseMethod,
    ResponseResult,
    TimeMachine,
)
from src.errors import (
    ConfigurationError,
    InvalidGeometryError,
    TailBoundError,
    UndefinedSplitError,
)
from src.models.kernels import (
    kernel_tm_term,
    regular_part_at,
    regular_part_poles,
    tm_image_pole_spacing,
    tm_image_poles,
)
from src.models.quadrature import (
    extrapolate_epsilon,
    integrate_1d,
    integrate_2d,
    integrate_with_pole_detour,
)
from src.models.switching import GaussianSwitching, TruncatedGaussianSwitching
from src.utils import (
    decreasing_onset,
    geometric_tail,
    no_ctc_halfwidth,
    pair_magnitudes,
)

logger = logging.getLogger(__name__)

_SQRT_HALF_PI = math.sqrt(math.pi / 2.0)

Switching = Union[GaussianSwitching, TruncatedGaussianSwitching]


def _finish(
    value: complex,
    method: ResponseMethod,
    notes: Optional[List[str]] = None,
    **fields,
) -> ResponseResult:
    """Wrap a complex estimate, flagging imaginary residue and negativity."""
    notes = list(notes or [])
    value = complex(value)
    residue = abs(value.imag)
    limit = RESPONSE_DEFAULTS["imag_residue_rel"] * max(abs(value.real), 1e-300)
    if residue > limit:
        msg = f"imaginary residue {residue:.3e} exceeds {limit:.3e}"
        logger.warning(msg)
        notes.append(msg)
    if value.real < 0:
        msg = f"negative probability {value.real:.3e}"
        logger.warning(msg)
        notes.append(msg)
    return ResponseResult(
        probability=value.real,
        method=method,
        imag_residue=residue,
        notes=notes,
        **fields,
    )


# ============================================================================
# MINKOWSKI
# ============================================================================


def minkowski_closed_value(omega: float) -> float:
    """(1/2) (exp(-omega^2/2) - sqrt(pi/2) omega erfc(omega/sqrt 2))."""
    x = omega / math.sqrt(2.0)
    if omega >= 0:
        # erfcx keeps the large-gap cancellation under control
        return 0.5 * math.exp(-omega * omega / 2.0) * (
            1.0 - _SQRT_HALF_PI * omega * float(special.erfcx(x))
        )
    return 0.5 * (
        math.exp(-omega * omega / 2.0) - _SQRT_HALF_PI * omega * float(special.erfc(x))
    )


def response_minkowski_closed(det: DetectorConfig) -> ResponseResult:
    """Closed-form Minkowski response for Gaussian switching."""
    return ResponseResult(
        probability=minkowski_closed_value(det.omega),
        method=ResponseMethod.CLOSED_FORM,
    )


def response_minkowski_integral(
    det: DetectorConfig, cfg: QuadratureConfig
) -> ResponseResult:
    """int_0^inf dk (k / 2 pi) |chi~(omega + k)|^2, the oracle for the closed form."""
    switching = GaussianSwitching()
    omega = det.omega
    upper = max(0.0, -omega) + cfg.support_halfwidth
    # Absolute tolerance follows the Gaussian suppression of large gaps
    scale = math.exp(-max(omega, 0.0) ** 2 / 2.0)
    value = integrate_1d(
        lambda k: k / (2.0 * math.pi) * switching.fourier_power(omega + k),
        0.0,
        upper,
        cfg,
        abs_tol=cfg.abs_tol * scale,
    )
    return _finish(value, ResponseMethod.K_INTEGRAL)


def _minkowski_finite_part(
    switching: Switching, omega: float, cfg: QuadratureConfig
) -> float:
    """Minkowski response of an arbitrary even switching.

    P_M = -(1/2 pi) [FP int C(u) exp(-i omega u) / u^2 du + pi omega C(0)],
    with the finite part folded onto u > 0.
    """
    if isinstance(switching, GaussianSwitching):
        return minkowski_closed_value(omega)
    c0 = switching.autocorrelation(0.0, cfg)
    reach = switching.lag_halfwidth(cfg)

    def integrand(u):
        increment = switching.autocorrelation_increment(u, cfg)
        half = math.sin(omega * u / 2.0)
        return 2.0 * (increment * math.cos(omega * u) - 2.0 * c0 * half * half) / (u * u)

    kinks = [2.0 * e for e in switching.edges() if e > 0]
    finite_part = integrate_1d(integrand, 0.0, reach, cfg, kinks) - 2.0 * c0 / reach
    return -(finite_part + math.pi * omega * c0) / (2.0 * math.pi)


# ============================================================================
# STATIONARY GEOMETRIES
# ============================================================================


def _pole_spacing(geom) -> float:
    """Smallest distance between two real poles of the regular part."""
    if isinstance(geom, EinsteinCylinder):
        return geom.L
    if isinstance(geom, PoincareAdS2):
        return 4.0 / geom.W
    return math.inf


def _detour_radius(geom, radius: float) -> float:
    """Requested radius, shrunk so neighbouring detours stay apart."""
    return min(radius, 0.2 * _pole_spacing(geom))


def _detour_window(
    geom, halfwidth: float, radius: float
) -> Tuple[float, List[float]]:
    """Widen the lag window until no detour straddles its edge.

    Poles just outside the window count too. Terminates for
    radius <= spacing / 5: widening past the outermost pole never pulls in
    the next one.
    """
    while True:
        near = regular_part_poles(geom, halfwidth + 2.0 * radius)
        edge = [p for p in near if abs(p) > halfwidth - 2.0 * radius]
        if not edge:
            return halfwidth, near
        halfwidth = max(abs(p) for p in edge) + 2.0 * radius


def _regular_integral(
    omega: float,
    regular: Callable,
    poles: List[float],
    halfwidth: float,
    cfg: QuadratureConfig,
    radius: Optional[float] = None,
) -> complex:
    """sqrt(pi/2) int exp(-u^2/2) exp(-i omega u) A_reg(u) du on the detoured contour."""
    switching = GaussianSwitching()

    def integrand(u):
        return switching.autocorrelation(u) * np.exp(-1j * omega * u) * regular(u)

    return complex(
        integrate_with_pole_detour(
            integrand, -halfwidth, halfwidth, poles, cfg, radius=radius
        )
    )


def _stationary_response(
    det: DetectorConfig,
    geom,
    cfg: QuadratureConfig,
    radius: Optional[float] = None,
    regular: Optional[Callable] = None,
) -> ResponseResult:
    radius = _detour_radius(geom, cfg.detour_radius if radius is None else radius)
    if regular is None:
        halfwidth, poles = _detour_window(geom, cfg.support_halfwidth, radius)

        def regular(z):
            return regular_part_at(geom, z)

    else:
        halfwidth, poles = cfg.support_halfwidth, []
    p_m = minkowski_closed_value(det.omega)
    p_reg = _regular_integral(det.omega, regular, poles, halfwidth, cfg, radius)
    logger.debug("%s: P_M=%.16e P_reg=%s", geom, p_m, p_reg)
    return _finish(p_m + p_reg, ResponseMethod.REGULAR_SPLIT)


def response_einstein_cylinder(
    det: DetectorConfig,
    geom: EinsteinCylinder,
    cfg: QuadratureConfig,
    include_oscillator: bool = True,
) -> ResponseResult:
    """P_M plus the lag integral of the cylinder's regular part.

    With `include_oscillator=False` only the zero-mode constant gamma/(2L^2)
    is kept in the regular part.
    """
    if not isinstance(geom, EinsteinCylinder):
        raise InvalidGeometryError(f"expected EinsteinCylinder, got {geom!r}")
    g = geom.scaled(det.T)
    if include_oscillator:
        return _stationary_response(det, g, cfg)
    zero_mode = g.gamma / (2.0 * g.L * g.L)
    return _stationary_response(det, g, cfg, regular=lambda z: zero_mode + 0.0 * z)


def response_ads2(
    det: DetectorConfig,
    geom: PoincareAdS2,
    cfg: QuadratureConfig,
    radius: Optional[float] = None,
) -> ResponseResult:
    """P_M plus the regular part integrated below the poles at u = +-2/W."""
    if not isinstance(geom, PoincareAdS2):
        raise InvalidGeometryError(f"expected PoincareAdS2, got {geom!r}")
    return _stationary_response(det, geom.scaled(det.T), cfg, radius=radius)


def required_modes(omega: float, ell: float) -> int:
    """Smallest n_max with exp(-(omega + 2 pi n_max / ell)^2 / 2) < MODESUM_TAIL."""
    reach = math.sqrt(-2.0 * math.log(MODESUM_TAIL))
    return max(1, int(math.ceil((reach - omega) * ell / (2.0 * math.pi))) + 1)


def response_ec_modesum_oracle(
    det: DetectorConfig, geom: EinsteinCylinder, n_max: Optional[int] = None
) -> ResponseResult:
    """Discrete oscillator-mode sum plus the analytic zero-mode term.

    P = sum_{n>=1} (2 pi^2 n / ell^2) exp(-(omega + 2 pi n/ell)^2 / 2)
        + (gamma pi / 2 ell^2) exp(-omega^2 / 2)
    """
    if not isinstance(geom, EinsteinCylinder):
        raise InvalidGeometryError(f"expected EinsteinCylinder, got {geom!r}")
    g = geom.scaled(det.T)
    ell, omega = g.L, det.omega
    needed = required_modes(omega, ell)
    if n_max is None:
        n_max = needed
    elif n_max < needed:
        raise TailBoundError(
            f"n_max={n_max} leaves a Gaussian tail above {MODESUM_TAIL:g}; "
            f"need n_max >= {needed}"
        )
    n = np.arange(1, n_max + 1, dtype=float)
    k = 2.0 * math.pi * n / ell
    terms = (2.0 * math.pi**2 * n / ell**2) * np.exp(-((omega + k) ** 2) / 2.0)
    zero_mode = (g.gamma * math.pi / (2.0 * ell**2)) * math.exp(-omega * omega / 2.0)
    return ResponseResult(
        probability=math.fsum(terms) + zero_mode,
        method=ResponseMethod.MODE_SUM_ORACLE,
    )


def response_truncated_switching(
    det: DetectorConfig,
    geometry,
    eps_uv: float,
    cfg: QuadratureConfig,
) -> ResponseResult:
    """Stationary response with the tanh-windowed Gaussian on [-5/2, 5/2]."""
    if isinstance(geometry, TimeMachine):
        return response_time_machine(
            det,
            geometry,
            cfg,
            switching=TruncatedGaussianSwitching(eps_uv),
        )
    switching = TruncatedGaussianSwitching(eps_uv)
    omega = det.omega
    p_m = _minkowski_finite_part(switching, omega, cfg)
    if isinstance(geometry, Minkowski):
        return _finish(p_m, ResponseMethod.TRUNCATED_WINDOW)
    if not isinstance(geometry, (EinsteinCylinder, PoincareAdS2)):
        raise UndefinedSplitError(f"unsupported geometry {geometry!r}")

    g = geometry.scaled(det.T)
    reach = switching.lag_halfwidth(cfg)
    poles = regular_part_poles(g, reach)
    if poles:
        raise ConfigurationError(
            f"regular-part poles {poles} fall inside the lag window |u| < {reach:.3g}"
        )

    def integrand(u):
        return (
            2.0
            * switching.autocorrelation(u, cfg)
            * math.cos(omega * u)
            * regular_part_at(g, u)
        )

    kinks = [2.0 * e for e in switching.edges() if e > 0]
    p_reg = integrate_1d(integrand, 0.0, reach, cfg, kinks)
    return _finish(p_m + p_reg, ResponseMethod.TRUNCATED_WINDOW)


# ============================================================================
# TIME MACHINE
# ============================================================================


def _tm_domain(
    geom: TimeMachine, switching: Switching, cfg: QuadratureConfig
) -> Tuple[float, float]:
    return no_ctc_halfwidth(
        geom.W,
        switching.tau_halfwidth(cfg),
        RESPONSE_DEFAULTS["clipped_mass_limit"],
    )


def _image_pole_detours(
    geom: TimeMachine,
    n: int,
    halfwidth: float,
    edges: List[float],
    cfg: QuadratureConfig,
) -> Tuple[Optional[Callable[[float], List[float]]], float]:
    """Poles of the n-th image integrand in tau', as a function of tau.

    Poles within two radii of the window edge are left on the real axis
    (their weight is the switching tail there), as are poles near a
    switching edge, whose tanh corners are singular just above the axis.
    """
    if n == 0:
        return None, cfg.detour_radius
    radius = min(cfg.detour_radius, 0.25 * tm_image_pole_spacing(n, geom))
    reach = halfwidth - 2.0 * radius

    def poles(tau: float) -> List[float]:
        return [
            p
            for p in tm_image_poles(n, tau, geom)
            if abs(p) <= reach and all(abs(p - e) > 2.0 * radius for e in edges)
        ]

    return poles, radius


def tm_term_response(
    det: DetectorConfig,
    geom: TimeMachine,
    n: int,
    cfg: QuadratureConfig,
    switching: Optional[Switching] = None,
) -> ExtrapolationReport:
    """P(n) extrapolated to eps -> 0.

    The n = 0 image is the covering AdS2 kernel; it is split into the
    Minkowski part (added in closed form) and the regular part, which is
    integrated on the same ladder for uniform diagnostics. For n != 0 the
    kernel is singular on two null lines crossing the integration square;
    the inner tau' contour passes above them (see _image_pole_detours).
    """
    switching = switching or GaussianSwitching()
    g = geom.scaled(det.T)
    traj = det.trajectory
    omega = det.omega
    ladder = np.asarray(cfg.eps_ladder, dtype=float)
    halfwidth, _ = _tm_domain(g, switching, cfg)
    covering = g.covering()
    edges = list(switching.edges())

    def weight(tau, tau2):
        return switching(tau) * switching(tau2) * np.exp(-1j * omega * (tau - tau2))

    if n == 0:

        def integrand(tau, tau2):
            z = (tau - tau2) - 1j * ladder
            return weight(tau, tau2) * regular_part_at(covering, z)

        offset = _minkowski_finite_part(switching, omega, cfg)
    else:

        def integrand(tau, tau2):
            return weight(tau, tau2) * kernel_tm_term(n, tau, tau2, g, traj, ladder).value

        offset = 0.0

    poles, radius = _image_pole_detours(g, n, halfwidth, edges, cfg)
    values = integrate_2d(
        integrand,
        (-halfwidth, halfwidth),
        (-halfwidth, halfwidth),
        cfg,
        x_points=edges,
        y_points=edges,
        y_poles=poles,
        radius=radius,
        side="above",
    )
    samples = [(float(e), complex(v) + offset) for e, v in zip(ladder, values)]
    report = extrapolate_epsilon(samples)
    logger.debug(
        "image n=%d: P=%s residual=%.3e", n, report.extrapolated, report.residual
    )
    return report


def _image_terms(
    det: DetectorConfig,
    geom: TimeMachine,
    indices: List[int],
    cfg: QuadratureConfig,
    switching: Switching,
    workers: int,
) -> Dict[int, ExtrapolationReport]:
    """Evaluate image terms, possibly concurrently; order-independent results."""
    if workers <= 1 or len(indices) <= 1:
        return {n: tm_term_response(det, geom, n, cfg, switching) for n in indices}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        reports = list(
            pool.map(
                lambda n: tm_term_response(det, geom, n, cfg, switching), indices
            )
        )
    return dict(zip(indices, reports))


def response_time_machine(
    det: DetectorConfig,
    geom: TimeMachine,
    cfg: QuadratureConfig,
    N: Union[int, str] = 10,
    switching: Optional[Switching] = None,
    tail_tol: float = RESPONSE_DEFAULTS["tail_tol"],
    workers: Optional[int] = None,
) -> ResponseResult:
    """Truncated image sum P_TM = sum_{|n| <= N} P(n).

    N="auto" adds image pairs until |P(n)| + |P(-n)| < tail_tol twice in a
    row, capped at RESPONSE_DEFAULTS["max_images"].
    """
    if not isinstance(geom, TimeMachine):
        raise InvalidGeometryError(f"expected TimeMachine, got {geom!r}")
    switching = switching or GaussianSwitching()
    auto = N == "auto"
    if not auto and (isinstance(N, bool) or not isinstance(N, int) or N < 1):
        raise ConfigurationError(f"N must be a positive integer or 'auto', got {N!r}")
    workers = thread_count() if workers is None else max(1, workers)
    notes: List[str] = []

    _, clipped = _tm_domain(geom.scaled(det.T), switching, cfg)
    if clipped:
        msg = f"integration domain clipped to the no-CTC window; lost mass {clipped:.3e}"
        logger.warning(msg)
        notes.append(msg)

    reports = _image_terms(det, geom, [0], cfg, switching, 1)
    if auto:
        cap = RESPONSE_DEFAULTS["max_images"]
        quiet = 0
        n = 0
        while n < cap and quiet < 2:
            n += 1
            reports.update(_image_terms(det, geom, [n, -n], cfg, switching, workers))
            pair = abs(reports[n].extrapolated) + abs(reports[-n].extrapolated)
            quiet = quiet + 1 if pair < tail_tol else 0
            logger.debug("image pair %d: %.3e", n, pair)
        truncation = n
    else:
        indices = [k for n in range(1, N + 1) for k in (n, -n)]
        reports.update(_image_terms(det, geom, indices, cfg, switching, workers))
        truncation = N

    ordered = range(-truncation, truncation + 1)
    per_term = [(n, complex(reports[n].extrapolated)) for n in ordered]
    total = complex(sum(value for _, value in per_term))
    magnitudes = pair_magnitudes(per_term)
    tail = geometric_tail(magnitudes, RESPONSE_DEFAULTS["tail_safety"])
    if tail > tail_tol:
        msg = f"tail estimate {tail:.3e} exceeds tolerance {tail_tol:.1e} at N={truncation}"
        logger.warning(msg)
        notes.append(msg)

    report = ImageSumReport(
        per_term=per_term,
        truncation_N=truncation,
        tail_estimate=tail,
        pair_magnitudes=magnitudes,
        onset=decreasing_onset(magnitudes),
        term_reports={n: reports[n] for n in ordered},
    )
    method = (
        ResponseMethod.TRUNCATED_WINDOW
        if isinstance(switching, TruncatedGaussianSwitching)
        else ResponseMethod.IMAGE_SUM
    )
    return _finish(total, method, notes, image_sum=report, clipped_mass=clipped)


# ============================================================================
# DISPATCH
# ============================================================================


def compute_response(
    det: DetectorConfig,
    geom,
    cfg: QuadratureConfig,
    N: Union[int, str] = 10,
    tail_tol: float = RESPONSE_DEFAULTS["tail_tol"],
) -> ResponseResult:
    """Default method for each geometry."""
    if isinstance(geom, Minkowski):
        return response_minkowski_closed(det)
    if isinstance(geom, EinsteinCylinder):
        return response_einstein_cylinder(det, geom, cfg)
    if isinstance(geom, PoincareAdS2):
        return response_ads2(det, geom, cfg)
    if isinstance(geom, TimeMachine):
        return response_time_machine(det, geom, cfg, N=N, tail_tol=tail_tol)
    raise InvalidGeometryError(f"unknown geometry {geom!r}")
