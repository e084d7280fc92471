"""Geometry, detector and result data structures."""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, ClassVar, Dict, List, Optional, Tuple, Union

from src.config import QUADRATURE_DEFAULTS, RESPONSE_DEFAULTS
from src.errors import ConfigurationError, InvalidGeometryError
from src.utils import eps_ladder, no_ctc_halfwidth, require_finite, require_positive


# ============================================================================
# GEOMETRIES
# ============================================================================


@dataclass(frozen=True)
class Minkowski:
    """Flat (1+1)-dimensional spacetime."""

    kind: ClassVar[str] = "minkowski"

    def scaled(self, T: float) -> "Minkowski":
        return self


@dataclass(frozen=True)
class EinsteinCylinder:
    """Flat cylinder with spatial circumference L and zero-mode regulator gamma."""

    L: float  # time units
    gamma: float = RESPONSE_DEFAULTS["gamma"]  # dimensionless

    kind: ClassVar[str] = "ec"

    def __post_init__(self):
        require_positive("L", self.L, InvalidGeometryError)
        gamma = require_finite("gamma", self.gamma, InvalidGeometryError)
        if gamma < 0:
            raise InvalidGeometryError(f"gamma must be >= 0, got {gamma}")

    def scaled(self, T: float) -> "EinsteinCylinder":
        """Same cylinder with times measured in units of T."""
        return EinsteinCylinder(L=self.L / T, gamma=self.gamma)


@dataclass(frozen=True)
class PoincareAdS2:
    """Poincare patch of AdS2 with inverse AdS length W."""

    W: float  # 1/time

    kind: ClassVar[str] = "ads2"

    def __post_init__(self):
        require_positive("W", self.W, InvalidGeometryError)

    def scaled(self, T: float) -> "PoincareAdS2":
        return PoincareAdS2(W=self.W * T)


@dataclass(frozen=True)
class TimeMachine:
    """Quotient of Poincare-AdS2 by (zeta+, zeta-) ~ A (zeta+, zeta-).

    The static detector sees the identification as a proper period L, so
    W = ln(A) / L.
    """

    A: float  # warp parameter, > 1
    L: float  # proper period, time units

    kind: ClassVar[str] = "tm"

    def __post_init__(self):
        A = require_finite("A", self.A, InvalidGeometryError)
        if A <= 1.0:
            raise InvalidGeometryError(
                f"time machine needs A > 1, got A = {A}; "
                "use EinsteinCylinder for the untwisted cylinder"
            )
        require_positive("L", self.L, InvalidGeometryError)

    @classmethod
    def from_curvature(cls, w: float, ell: float) -> "TimeMachine":
        """Build from dimensionless curvature w = WT and circumference ell = L/T."""
        w = require_positive("w", w, InvalidGeometryError)
        ell = require_positive("ell", ell, InvalidGeometryError)
        return cls(A=math.exp(w * ell), L=ell)

    @classmethod
    def from_delta(cls, delta: float, ell: float) -> "TimeMachine":
        """Build from A = 1 + delta."""
        delta = require_positive("delta", delta, InvalidGeometryError)
        return cls(A=1.0 + delta, L=ell)

    @property
    def W(self) -> float:
        return math.log(self.A) / self.L

    @property
    def delta(self) -> float:
        return self.A - 1.0

    @property
    def log_warp(self) -> float:
        """ln A = W L, the decay rate of the image terms per index."""
        return math.log(self.A)

    def regime(self) -> str:
        """Display label for log lines, not a physical classification.

        The slow and fast regimes are limits (delta -> 0 at fixed ell, and
        ell -> infinity at fixed delta). A single geometry is labelled 'slow'
        when ln A < 1, where neighbouring images differ by less than a factor
        e, and 'fast' otherwise.
        """
        return "slow" if self.log_warp < 1.0 else "fast"

    def covering(self) -> PoincareAdS2:
        return PoincareAdS2(W=self.W)

    def cylinder(self, gamma: float = RESPONSE_DEFAULTS["gamma"]) -> EinsteinCylinder:
        """Einstein cylinder of the same circumference."""
        return EinsteinCylinder(L=self.L, gamma=gamma)

    def scaled(self, T: float) -> "TimeMachine":
        return TimeMachine(A=self.A, L=self.L / T)


GeometryParams = Union[Minkowski, EinsteinCylinder, PoincareAdS2, TimeMachine]


# ============================================================================
# DETECTOR
# ============================================================================


@dataclass(frozen=True)
class TrajectoryParams:
    """Static trajectory zeta_pm(tau) = xi (1 +- W tau)."""

    xi: float = RESPONSE_DEFAULTS["xi"]  # time units

    def __post_init__(self):
        require_positive("xi", self.xi, InvalidGeometryError)


@dataclass(frozen=True)
class DetectorConfig:
    """Derivative-coupled two-level detector with Gaussian switching."""

    omega: float  # dimensionless gap, Omega * T
    lam: float = 1.0  # coupling, results are reported as P / lam^2
    T: float = 1.0  # switching width
    xi: float = RESPONSE_DEFAULTS["xi"]

    def __post_init__(self):
        require_finite("omega", self.omega)
        require_finite("lam", self.lam)
        require_positive("T", self.T)
        require_positive("xi", self.xi, InvalidGeometryError)

    @property
    def trajectory(self) -> TrajectoryParams:
        return TrajectoryParams(xi=self.xi / self.T)


# ============================================================================
# KERNELS AND QUADRATURE
# ============================================================================


@dataclass
class KernelValue:
    """Derivative two-point function sampled at finite regulator."""

    value: Any  # complex or complex ndarray, 1/time^2
    epsilon: Any  # time units
    components: Dict[str, Any] = field(default_factory=dict)


def _default_ladder() -> Tuple[float, ...]:
    return eps_ladder(QUADRATURE_DEFAULTS["eps0"], QUADRATURE_DEFAULTS["eps_rungs"])


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and geometry of the adaptive integrations."""

    abs_tol: float = QUADRATURE_DEFAULTS["abs_tol"]
    rel_tol: float = QUADRATURE_DEFAULTS["rel_tol"]
    max_subdivisions: int = QUADRATURE_DEFAULTS["max_subdivisions"]
    support_halfwidth: float = QUADRATURE_DEFAULTS["support_halfwidth"]  # units of T
    detour_radius: float = QUADRATURE_DEFAULTS["detour_radius"]  # units of T
    eps_ladder: Tuple[float, ...] = field(default_factory=_default_ladder)

    def __post_init__(self):
        require_positive("abs_tol", self.abs_tol)
        require_positive("rel_tol", self.rel_tol)
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise ConfigurationError(
                f"max_subdivisions must be a positive integer, got {self.max_subdivisions}"
            )
        halfwidth = require_finite("support_halfwidth", self.support_halfwidth)
        if halfwidth < 8:
            raise ConfigurationError(
                f"support_halfwidth must be >= 8 (Gaussian tail), got {halfwidth}"
            )
        require_positive("detour_radius", self.detour_radius)
        ladder = tuple(float(e) for e in self.eps_ladder)
        if len(ladder) < 3:
            raise ConfigurationError("eps_ladder needs at least 3 values")
        if any(e <= 0 for e in ladder):
            raise ConfigurationError("eps_ladder values must be > 0")
        if any(b >= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigurationError("eps_ladder must be strictly decreasing")
        object.__setattr__(self, "eps_ladder", ladder)

    def with_overrides(self, **changes) -> "QuadratureConfig":
        """Copy with the given non-None fields replaced."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


@dataclass
class ExtrapolationReport:
    """Richardson table summary for an epsilon -> 0 limit."""

    values_at_eps: List[Tuple[float, Any]]
    extrapolated: Any
    residual: float  # spread of the last column


# ============================================================================
# RESPONSES
# ============================================================================


class ResponseMethod(Enum):
    CLOSED_FORM = "closed_form"
    K_INTEGRAL = "k_integral"
    REGULAR_SPLIT = "regular_split"
    IMAGE_SUM = "image_sum"
    MODE_SUM_ORACLE = "mode_sum_oracle"
    TRUNCATED_WINDOW = "truncated_window"


@dataclass
class ImageSumReport:
    """Per-image contributions of a time-machine response."""

    per_term: List[Tuple[int, complex]]  # (n, P(n)), n = -N..N
    truncation_N: int
    tail_estimate: float
    pair_magnitudes: List[float] = field(default_factory=list)  # n = 1..N
    onset: int = 0
    term_reports: Dict[int, ExtrapolationReport] = field(default_factory=dict)

    def term(self, n: int) -> complex:
        return dict(self.per_term)[n]


@dataclass
class ResponseResult:
    """Excitation probability P / lam^2 with diagnostics."""

    probability: float
    method: ResponseMethod
    image_sum: Optional[ImageSumReport] = None
    imag_residue: float = 0.0
    clipped_mass: float = 0.0
    notes: List[str] = field(default_factory=list)

    @property
    def tail_estimate(self) -> float:
        return self.image_sum.tail_estimate if self.image_sum else 0.0

    @property
    def eps_residual(self) -> float:
        """Sum of Richardson residuals over every extrapolated quantity."""
        if self.image_sum is None:
            return 0.0
        return float(sum(r.residual for r in self.image_sum.term_reports.values()))

    def scaled_probability(self, lam: float) -> float:
        """P itself for coupling lam."""
        return self.probability * lam * lam


# ============================================================================
# VALIDATION
# ============================================================================


@dataclass
class CheckOutcome:
    """One validation measurement against its bound."""

    name: str
    measured: float
    bound: float
    passed: bool
    context: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def evaluate(
        cls, name: str, measured: float, bound: float, **context
    ) -> "CheckOutcome":
        measured = float(measured)
        # NaN never passes
        return cls(name, measured, float(bound), bool(measured <= bound), context)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "measured": self.measured,
            "bound": self.bound,
            "passed": self.passed,
            "context": self.context,
        }


# ============================================================================
# SWEEPS
# ============================================================================

SWEEP_MODES = ("circumference", "curvature")


@dataclass
class SweepConfig:
    """Reproduction recipe for one figure.

    In circumference mode the grid holds ell values and `fixed` is w; in
    curvature mode the grid holds w values and `fixed` is ell.
    """

    mode: str
    omega: float
    fixed: float
    grid: List[float]
    gamma: float = RESPONSE_DEFAULTS["gamma"]
    N: Union[int, str] = 10
    xi: float = RESPONSE_DEFAULTS["xi"]
    tail_tol: float = RESPONSE_DEFAULTS["tail_tol"]
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.mode not in SWEEP_MODES:
            raise ConfigurationError(
                f"mode must be one of {SWEEP_MODES}, got {self.mode!r}"
            )
        require_finite("omega", self.omega)
        require_positive("fixed", self.fixed)
        if not self.grid:
            raise ConfigurationError("sweep grid is empty")
        self.grid = [require_positive("grid value", g) for g in self.grid]
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ConfigurationError("sweep grid must be strictly increasing")
        if self.N != "auto" and (
            isinstance(self.N, bool) or not isinstance(self.N, int) or self.N < 1
        ):
            raise ConfigurationError(f"N must be a positive integer or 'auto', got {self.N!r}")
        require_positive("tail_tol", self.tail_tol)
        for w in self.curvatures():
            no_ctc_halfwidth(
                w,
                self.quadrature.support_halfwidth,
                RESPONSE_DEFAULTS["clipped_mass_limit"],
            )

    def curvatures(self) -> List[float]:
        return list(self.grid) if self.mode == "curvature" else [self.fixed]

    def point(self, swept: float) -> Tuple[float, float]:
        """(w, ell) at one grid value."""
        if self.mode == "circumference":
            return self.fixed, swept
        return swept, self.fixed


@dataclass
class SweepRow:
    swept: float
    P_TM: float
    P_AdS2: float
    P_EC: float
    P_M: float
    tail_estimate: float
    eps_residual: float
    status: str = "ok"


@dataclass
class SweepTable:
    """Ordered rows of a sweep, one per grid point."""

    mode: str
    rows: List[SweepRow] = field(default_factory=list)

    def column(self, name: str) -> List[Any]:
        return [getattr(row, name) for row in self.rows]
