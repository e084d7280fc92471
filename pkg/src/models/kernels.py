"""Derivative two-point functions pulled back to the static trajectory.

Every kernel is A(tau, tau') = d/dtau d/dtau' W(x(tau), x(tau')) evaluated
at a finite regulator eps > 0. The stationary kernels take dtau = tau - tau'
and are evaluated at z = dtau - i eps. All functions accept numpy arrays
and broadcast over dtau and eps.
"""

import logging
import math
from typing import List, Tuple

import numpy as np
from scipy import special

from src.config import SERIES_THRESHOLD_FACTOR
from src.detector_schema import (
    EinsteinCylinder,
    KernelValue,
    Minkowski,
    PoincareAdS2,
    TimeMachine,
    TrajectoryParams,
)
from src.errors import (
    ChronologyViolationError,
    InvalidGeometryError,
    InvalidRegulatorError,
    UndefinedSplitError,
)

logger = logging.getLogger(__name__)

_TWO_PI = 2.0 * math.pi
_FOUR_PI = 4.0 * math.pi


def _check_regulator(eps, allow_zero: bool = False) -> np.ndarray:
    arr = np.asarray(eps, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidRegulatorError(f"eps must be finite, got {eps!r}")
    bad = arr < 0 if allow_zero else arr <= 0
    if np.any(bad):
        raise InvalidRegulatorError(f"eps must be > 0, got {eps!r}")
    return arr


def _out(value):
    """Unwrap 0-d arrays to numpy scalars."""
    value = np.asarray(value)
    return value[()] if value.ndim == 0 else value


def _regulated(dtau, eps) -> np.ndarray:
    return np.asarray(dtau, dtype=float) - 1j * np.asarray(eps, dtype=float)


# ============================================================================
# STATIONARY KERNELS
# ============================================================================


def _minkowski(z):
    return -1.0 / (_TWO_PI * z * z)


def _ec_oscillator(z, L: float):
    s = np.sin(math.pi * z / L)
    return -(math.pi / (2.0 * L * L)) / (s * s)


def _ec_zero_mode(geom: EinsteinCylinder) -> float:
    return geom.gamma / (2.0 * geom.L * geom.L)


def _ads2(z, W: float):
    u = (W * z) ** 2
    return -(16.0 - 12.0 * u) / (_TWO_PI * z * z * (4.0 - u) ** 2)


def kernel_minkowski(dtau, eps) -> KernelValue:
    """-1 / (2 pi (dtau - i eps)^2)."""
    _check_regulator(eps)
    return KernelValue(_out(_minkowski(_regulated(dtau, eps))), eps)


def kernel_einstein_cylinder(dtau, geom: EinsteinCylinder, eps) -> KernelValue:
    """Oscillator part -(pi/2L^2) csc^2(pi z/L) plus zero mode gamma/(2L^2)."""
    if not isinstance(geom, EinsteinCylinder):
        raise InvalidGeometryError(f"expected EinsteinCylinder, got {geom!r}")
    _check_regulator(eps)
    oscillator = _out(_ec_oscillator(_regulated(dtau, eps), geom.L))
    zero_mode = _ec_zero_mode(geom)
    return KernelValue(
        oscillator + zero_mode,
        eps,
        {"oscillator": oscillator, "zero_mode": zero_mode},
    )


def kernel_ads2(dtau, geom: PoincareAdS2, eps) -> KernelValue:
    """Poincare-AdS2 kernel; double poles at dtau = +-2/W as eps -> 0."""
    if not isinstance(geom, PoincareAdS2):
        raise InvalidGeometryError(f"expected PoincareAdS2, got {geom!r}")
    _check_regulator(eps)
    return KernelValue(_out(_ads2(_regulated(dtau, eps), geom.W)), eps)


# ============================================================================
# REGULAR PARTS
# ============================================================================


def series_threshold(geom) -> float:
    """|z| below which regular parts are evaluated from their Taylor series."""
    if isinstance(geom, EinsteinCylinder):
        return SERIES_THRESHOLD_FACTOR * geom.L
    return SERIES_THRESHOLD_FACTOR / geom.W


def _ec_regular_series(z, geom: EinsteinCylinder):
    x2 = (math.pi * z / geom.L) ** 2
    bracket = 1.0 / 3.0 + x2 * (1.0 / 15.0 + x2 * (2.0 / 189.0 + x2 / 675.0))
    return _ec_zero_mode(geom) - (math.pi / (2.0 * geom.L**2)) * bracket


def _ec_regular_direct(z, geom: EinsteinCylinder):
    return _ec_oscillator(z, geom.L) - _minkowski(z) + _ec_zero_mode(geom)


def _ads2_regular_series(z, W: float):
    s = (W * z) ** 2 / 4.0
    return (W * W / (8.0 * math.pi)) * (1.0 + s * (3.0 + s * (5.0 + 7.0 * s)))


def _ads2_regular_direct(z, W: float):
    # A_AdS2 - A_M with the 1/z^2 poles cancelled algebraically
    u = (W * z) ** 2
    return W * W * (4.0 + u) / (_TWO_PI * (4.0 - u) ** 2)


def regular_part_at(geom, z):
    """A_geom(z) - A_M(z) at complex argument(s) z.

    Analytic away from the poles listed by `regular_part_poles`; used
    directly on deformed contours.
    """
    z = np.asarray(z, dtype=complex)
    eta = series_threshold(geom)
    small = np.abs(z) < eta
    # Avoid evaluating the direct branch at z = 0
    safe = np.where(small, eta, z)
    if isinstance(geom, EinsteinCylinder):
        with np.errstate(divide="ignore", invalid="ignore"):
            value = np.where(
                small, _ec_regular_series(z, geom), _ec_regular_direct(safe, geom)
            )
    elif isinstance(geom, PoincareAdS2):
        value = np.where(
            small, _ads2_regular_series(z, geom.W), _ads2_regular_direct(safe, geom.W)
        )
    else:
        raise UndefinedSplitError(f"no stationary regular part for {geom!r}")
    return _out(value)


def kernel_regular_part(
    geometry, dtau, eps=0.0, allow_minkowski: bool = False
) -> KernelValue:
    """A_geometry - A_M, finite at coincidence.

    Minkowski has an identically vanishing regular part; it is returned as an
    explicit zero only when `allow_minkowski` is set.
    """
    _check_regulator(eps, allow_zero=True)
    if isinstance(geometry, Minkowski):
        if not allow_minkowski:
            raise UndefinedSplitError("Minkowski regular part is identically zero")
        zero = np.zeros(np.broadcast(np.asarray(dtau), np.asarray(eps)).shape, complex)
        return KernelValue(_out(zero), eps)
    if not isinstance(geometry, (EinsteinCylinder, PoincareAdS2)):
        raise UndefinedSplitError(
            f"regular part is defined for stationary geometries only, got {geometry!r}"
        )
    return KernelValue(regular_part_at(geometry, _regulated(dtau, eps)), eps)


def regular_part_poles(geom, halfwidth: float) -> List[float]:
    """Real poles of the regular part strictly inside (-halfwidth, halfwidth)."""
    if isinstance(geom, EinsteinCylinder):
        count = int(math.floor(halfwidth / geom.L))
        poles = [n * geom.L for n in range(-count, count + 1) if n != 0]
    elif isinstance(geom, PoincareAdS2):
        poles = [-2.0 / geom.W, 2.0 / geom.W]
    elif isinstance(geom, Minkowski):
        poles = []
    else:
        raise UndefinedSplitError(f"no stationary regular part for {geom!r}")
    return sorted(p for p in poles if abs(p) < halfwidth)


# ============================================================================
# TIME MACHINE IMAGES
# ============================================================================


def _check_window(geom: TimeMachine, *taus) -> None:
    limit = 1.0 / geom.W
    for tau in taus:
        if np.any(np.abs(np.real(np.asarray(tau))) > limit * (1.0 + 1e-12)):
            raise ChronologyViolationError(
                f"proper time outside the no-CTC window |tau| <= 1/W = {limit:.6g}"
            )


def _image_kernel(tau, tau2, W: float, xi: float, eps, scale: float, scale2: float):
    """Kernel between scale * x(tau) and scale2 * x(tau') in the covering AdS2.

    The null-coordinate regulator is xi W eps sqrt(scale * scale2), which makes
    the result depend on scale2 / scale only and reduces to A_AdS2(dtau - i eps)
    for unit scales.
    """
    tau = np.asarray(tau)
    tau2 = np.asarray(tau2)
    p, m = 1.0 + W * tau, 1.0 - W * tau
    p2, m2 = 1.0 + W * tau2, 1.0 - W * tau2
    reg = 1j * xi * W * np.asarray(eps, dtype=float) * math.sqrt(scale * scale2)
    f1 = xi * (scale * p - scale2 * p2) - reg
    f2 = xi * (-scale * m + scale2 * m2) - reg
    f3 = xi * (-scale * m - scale2 * p2) - reg
    f4 = xi * (scale * p + scale2 * m2) - reg
    prefactor = scale * scale2 * (xi * W) ** 2 / _FOUR_PI
    return -prefactor * (1.0 / f1**2 + 1.0 / f2**2 - 1.0 / f3**2 - 1.0 / f4**2)


def kernel_tm_image(
    tau,
    tau2,
    geom: TimeMachine,
    traj: TrajectoryParams,
    eps,
    scale: float = 1.0,
    scale2: float = 1.0,
) -> KernelValue:
    """Covering-space kernel between two rescaled trajectory points."""
    _check_regulator(eps)
    _check_window(geom, tau, tau2)
    value = _image_kernel(tau, tau2, geom.W, traj.xi, eps, scale, scale2)
    return KernelValue(_out(value), eps, {"scale": scale, "scale2": scale2})


def kernel_tm_term(
    n: int, tau, tau2, geom: TimeMachine, traj: TrajectoryParams, eps
) -> KernelValue:
    """n-th image term, d/dtau d/dtau' W_AdS2(x(tau), A^n x(tau'))."""
    if not isinstance(geom, TimeMachine):
        raise InvalidGeometryError(f"expected TimeMachine, got {geom!r}")
    return kernel_tm_image(tau, tau2, geom, traj, eps, 1.0, geom.A ** int(n))


def tm_image_poles(n: int, tau: float, geom: TimeMachine) -> Tuple[float, float]:
    """Real tau' where the n-th image kernel blows up as eps -> 0.

    These are the null lines 1 + W tau = A^n (1 + W tau') and
    1 - W tau = A^n (1 - W tau'). At finite eps both poles sit at
    tau' - i eps A^(-n/2), below the real axis. For n = 0 both reduce to
    tau' = tau.
    """
    s = geom.A ** int(n)
    W = geom.W
    return (1.0 + W * tau - s) / (s * W), (s - 1.0 + W * tau) / (s * W)


def tm_image_pole_spacing(n: int, geom: TimeMachine) -> float:
    """Distance between the two poles of tm_image_poles, independent of tau."""
    s = geom.A ** int(n)
    return 2.0 * abs(s - 1.0) / (s * geom.W)


def kernel_tm_sum(
    tau,
    tau2,
    geom: TimeMachine,
    traj: TrajectoryParams,
    eps,
    n_min: int,
    n_max: int,
    scale: float = 1.0,
) -> KernelValue:
    """Partial image sum over n_min <= n <= n_max, unprimed point scaled by `scale`."""
    _check_regulator(eps)
    _check_window(geom, tau, tau2)
    total = 0.0
    for n in range(n_min, n_max + 1):
        total = total + _image_kernel(
            tau, tau2, geom.W, traj.xi, eps, scale, geom.A**n
        )
    return KernelValue(_out(total), eps, {"n_min": n_min, "n_max": n_max})


def wightman_ads2(
    point: Tuple[float, float], point2: Tuple[float, float], eps
) -> complex:
    """Undifferentiated AdS2 Wightman function in null coordinates.

    Points are (zeta+, zeta-); eps is the coordinate regulator.
    """
    _check_regulator(eps)
    zp, zm = point
    zp2, zm2 = point2
    ie = 1j * np.asarray(eps, dtype=float)
    logs = (
        np.log((zp - zp2) - ie)
        + np.log(-(zm - zm2) - ie)
        - np.log(-zm - zp2 - ie)
        - np.log(zp + zm2 - ie)
    )
    return _out(-logs / _FOUR_PI)


# ============================================================================
# EINSTEIN CYLINDER IMAGE SUM
# ============================================================================


def ec_image_sum(
    dtau: float, geom: EinsteinCylinder, eps: float, n_max: int, with_tail: bool = True
) -> complex:
    """Flat-space images sum_{|n| <= n_max} A_M(dtau - nL - i eps).

    With `with_tail` the exact remainder over |n| > n_max is added through
    the trigamma function, at eps = 0.
    """
    _check_regulator(eps)
    n = np.arange(-n_max, n_max + 1, dtype=float)
    total = complex(np.sum(_minkowski(dtau - n * geom.L - 1j * eps)))
    if with_tail:
        x = float(np.real(dtau)) / geom.L
        remainder = special.polygamma(1, n_max + 1 - x) + special.polygamma(
            1, n_max + 1 + x
        )
        total -= float(remainder) / (_TWO_PI * geom.L**2)
    return total


def stationary_kernel(geom, dtau, eps) -> KernelValue:
    """Dispatch to the kernel of a stationary geometry."""
    if isinstance(geom, Minkowski):
        return kernel_minkowski(dtau, eps)
    if isinstance(geom, EinsteinCylinder):
        return kernel_einstein_cylinder(dtau, geom, eps)
    if isinstance(geom, PoincareAdS2):
        return kernel_ads2(dtau, geom, eps)
    raise UndefinedSplitError(f"{geom!r} is not stationary")

