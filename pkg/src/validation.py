"""Independent oracles and cross-checks, runnable as a suite.

Each check returns a list of CheckOutcome stamped with its parameters. The
suite runs checks concurrently and assembles the report in declared order.
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from src.config import VALIDATION_DEFAULTS, thread_count
from src.detector_schema import (
    CheckOutcome,
    DetectorConfig,
    EinsteinCylinder,
    Minkowski,
    PoincareAdS2,
    QuadratureConfig,
    TimeMachine,
    TrajectoryParams,
)
from src.errors import ConfigurationError
from src.models.kernels import (
    ec_image_sum,
    kernel_ads2,
    kernel_einstein_cylinder,
    kernel_minkowski,
    kernel_regular_part,
    kernel_tm_sum,
    wightman_ads2,
)
from src.models.response import (
    minkowski_closed_value,
    response_ads2,
    response_ec_modesum_oracle,
    response_einstein_cylinder,
    response_minkowski_closed,
    response_minkowski_integral,
    response_time_machine,
    response_truncated_switching,
    tm_term_response,
)

logger = logging.getLogger(__name__)

# Regulator small enough that kernel comparisons are eps-independent
_TINY_EPS = 1e-12


def _relative(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


# ============================================================================
# KERNEL CHECKS
# ============================================================================


def check_kernel_limits(
    dtau_grid: Sequence[float] = (0.5, 1.0, 2.0),
    tolerance: float = VALIDATION_DEFAULTS["kernel_scaling_tolerance"],
) -> List[CheckOutcome]:
    """O(w^2) and O(ell^-2) approach of the AdS2 and cylinder kernels to Minkowski."""
    outcomes = []
    for dtau in dtau_grid:
        flat = kernel_minkowski(dtau, _TINY_EPS).value

        def ads_gap(w):
            return abs(kernel_ads2(dtau, PoincareAdS2(w), _TINY_EPS).value - flat)

        def ec_gap(ell):
            cyl = EinsteinCylinder(ell)
            return abs(kernel_einstein_cylinder(dtau, cyl, _TINY_EPS).value - flat)

        ratio = ads_gap(0.02) / ads_gap(0.01)
        outcomes.append(
            CheckOutcome.evaluate(
                "kernel_limits.ads2_w2_scaling",
                abs(ratio / 4.0 - 1.0),
                tolerance,
                dtau=dtau,
                w=[0.02, 0.01],
                ratio=ratio,
            )
        )
        ratio = ec_gap(100.0) / ec_gap(200.0)
        outcomes.append(
            CheckOutcome.evaluate(
                "kernel_limits.ec_ell2_scaling",
                abs(ratio / 4.0 - 1.0),
                tolerance,
                dtau=dtau,
                ell=[100.0, 200.0],
                ratio=ratio,
            )
        )

    for geom in (EinsteinCylinder(2.0), PoincareAdS2(0.05)):
        value = kernel_regular_part(geom, 0.0).value
        finite = bool(np.isfinite(value))
        outcomes.append(
            CheckOutcome.evaluate(
                f"kernel_limits.{geom.kind}_coincidence_finite",
                0.0 if finite else math.inf,
                0.0,
                value=[float(np.real(value)), float(np.imag(value))],
            )
        )
    return outcomes


def check_ec_image_identity(
    L: float = 2.0,
    dtau_grid: Sequence[float] = (0.3, 1.0),
    n_max: int = VALIDATION_DEFAULTS["ec_image_n_max"],
    bound: float = VALIDATION_DEFAULTS["ec_image_bound"],
    eps: float = 1e-10,
) -> List[CheckOutcome]:
    """Cylinder oscillator kernel against the flat-space image sum."""
    geom = EinsteinCylinder(L)
    outcomes = []
    for dtau in dtau_grid:
        oscillator = kernel_einstein_cylinder(dtau, geom, eps).components["oscillator"]
        images = ec_image_sum(dtau, geom, eps, n_max)
        outcomes.append(
            CheckOutcome.evaluate(
                "ec_image.identity",
                abs(oscillator - images),
                bound,
                L=L,
                dtau=dtau,
                n_max=n_max,
            )
        )
    dtau = dtau_grid[0]
    half = ec_image_sum(dtau, geom, eps, n_max // 2)
    full = ec_image_sum(dtau, geom, eps, n_max)
    outcomes.append(
        CheckOutcome.evaluate(
            "ec_image.n_max_sensitivity",
            abs(full - half),
            VALIDATION_DEFAULTS["ec_image_sensitivity_bound"],
            L=L,
            dtau=dtau,
            n_max=[n_max // 2, n_max],
        )
    )
    return outcomes


# ============================================================================
# RESPONSE CHECKS
# ============================================================================


def check_minkowski_oracle(
    cfg: QuadratureConfig,
    omegas: Sequence[float] = (0.0, 0.1, 0.5, 1.0, 3.0, 5.0),
    bound: float = VALIDATION_DEFAULTS["minkowski_oracle_bound"],
) -> List[CheckOutcome]:
    """Closed-form Minkowski response against the k-integral."""
    outcomes = []
    for omega in omegas:
        det = DetectorConfig(omega=omega)
        closed = response_minkowski_closed(det).probability
        integral = response_minkowski_integral(det, cfg).probability
        outcomes.append(
            CheckOutcome.evaluate(
                "minkowski_oracle.k_integral",
                _relative(integral, closed),
                bound,
                omega=omega,
            )
        )
    outcomes.append(
        CheckOutcome.evaluate(
            "minkowski_oracle.zero_gap",
            abs(minkowski_closed_value(0.0) - 0.5),
            1e-12,
            omega=0.0,
        )
    )
    return outcomes


def check_ec_oracle(
    cfg: QuadratureConfig,
    omegas: Sequence[float] = (0.1, 1.0),
    ells: Sequence[float] = (10.0, 20.0, 100.0),
    gammas: Sequence[float] = (0.0, 0.01),
    bound: float = VALIDATION_DEFAULTS["ec_oracle_bound"],
) -> List[CheckOutcome]:
    """Regular-split cylinder response against the oscillator mode sum."""
    outcomes = []
    for omega in omegas:
        det = DetectorConfig(omega=omega)
        for ell in ells:
            for gamma in gammas:
                geom = EinsteinCylinder(ell, gamma)
                split = response_einstein_cylinder(det, geom, cfg).probability
                modes = response_ec_modesum_oracle(det, geom).probability
                outcomes.append(
                    CheckOutcome.evaluate(
                        "ec_oracle.mode_sum",
                        _relative(split, modes),
                        bound,
                        omega=omega,
                        ell=ell,
                        gamma=gamma,
                    )
                )
    return outcomes


def check_ir_limits(
    cfg: QuadratureConfig, omega: float = 0.1
) -> List[CheckOutcome]:
    """P_AdS2 -> P_M as w -> 0 (at rate w^2) and P_EC -> P_M as ell -> infinity."""
    det = DetectorConfig(omega=omega)
    p_m = minkowski_closed_value(omega)

    def ads(w):
        return response_ads2(det, PoincareAdS2(w), cfg).probability

    ratio = (ads(0.02) - p_m) / (ads(0.01) - p_m)
    p_ec = response_einstein_cylinder(det, EinsteinCylinder(1e4), cfg).probability
    return [
        CheckOutcome.evaluate(
            "ir_limits.ads2_small_w",
            _relative(ads(1e-3), p_m),
            VALIDATION_DEFAULTS["ads2_ir_bound"],
            omega=omega,
            w=1e-3,
        ),
        CheckOutcome.evaluate(
            "ir_limits.ads2_w2_scaling",
            abs(ratio / 4.0 - 1.0),
            VALIDATION_DEFAULTS["ir_scaling_tolerance"],
            omega=omega,
            w=[0.02, 0.01],
            ratio=ratio,
        ),
        CheckOutcome.evaluate(
            "ir_limits.ec_large_ell",
            _relative(p_ec, p_m),
            VALIDATION_DEFAULTS["ec_ir_bound"],
            omega=omega,
            ell=1e4,
        ),
    ]


def check_ads2_contour(
    cfg: QuadratureConfig,
    omega: float = 0.1,
    ws: Sequence[float] = (0.05, 0.2),
    radii: Sequence[float] = (0.2, 0.4),
    bound: float = VALIDATION_DEFAULTS["contour_bound"],
) -> List[CheckOutcome]:
    """Detour-radius independence of the AdS2 response."""
    det = DetectorConfig(omega=omega)
    outcomes = []
    for w in ws:
        values = [
            response_ads2(det, PoincareAdS2(w), cfg, radius=r).probability
            for r in radii
        ]
        outcomes.append(
            CheckOutcome.evaluate(
                "ads2_contour.radius_invariance",
                abs(values[0] - values[1]),
                bound,
                omega=omega,
                w=w,
                radii=list(radii),
            )
        )
    return outcomes


def check_truncated_switching(
    cfg: QuadratureConfig,
    omega: float = 0.1,
    eps_uv: Sequence[float] = (0.1, 0.05),
    bound: float = VALIDATION_DEFAULTS["truncated_bound"],
) -> List[CheckOutcome]:
    """Windowed switching approaches the full Gaussian as eps_uv shrinks."""
    det = DetectorConfig(omega=omega)
    full = minkowski_closed_value(omega)
    gaps = [
        _relative(
            response_truncated_switching(det, Minkowski(), e, cfg).probability, full
        )
        for e in eps_uv
    ]
    return [
        CheckOutcome.evaluate(
            "truncated_switching.gap",
            gaps[-1],
            bound,
            omega=omega,
            eps_uv=eps_uv[-1],
        ),
        CheckOutcome.evaluate(
            "truncated_switching.monotone",
            gaps[-1] - gaps[0],
            0.0,
            omega=omega,
            eps_uv=list(eps_uv),
            gaps=gaps,
        ),
    ]


def check_tm_consistency(
    cfg: QuadratureConfig,
    omega: float = 0.1,
    w: float = 0.05,
    ell: float = 100.0,
    N: int = 10,
    xis: Sequence[float] = (1.0, 5.0),
    full_sum: bool = True,
) -> List[CheckOutcome]:
    """n = 0 image vs AdS2, xi-invariance, scale invariance and reindexing."""
    geom = TimeMachine.from_curvature(w, ell)
    det = DetectorConfig(omega=omega)
    outcomes = []

    p_zero = tm_term_response(det, geom, 0, cfg).extrapolated
    p_ads = response_ads2(det, geom.covering(), cfg).probability
    outcomes.append(
        CheckOutcome.evaluate(
            "tm.zero_image_vs_ads2",
            abs(complex(p_zero) - p_ads) / p_ads,
            VALIDATION_DEFAULTS["tm_zero_bound"],
            omega=omega,
            w=w,
            ell=ell,
        )
    )

    if full_sum:
        values = [
            response_time_machine(
                DetectorConfig(omega=omega, xi=xi), geom, cfg, N=N
            ).probability
            for xi in xis
        ]
        measured = max(values) - min(values)
    else:
        values = [
            complex(
                tm_term_response(DetectorConfig(omega=omega, xi=xi), geom, 1, cfg)
                .extrapolated
            )
            for xi in xis
        ]
        measured = max(abs(v - values[0]) for v in values)
    outcomes.append(
        CheckOutcome.evaluate(
            "tm.xi_invariance",
            measured,
            VALIDATION_DEFAULTS["tm_xi_bound"],
            omega=omega,
            w=w,
            ell=ell,
            N=N,
            xi=list(xis),
            full_sum=full_sum,
        )
    )

    scale = geom.A**2
    a, b = (1.3, 0.7), (0.9, 1.2)
    direct = wightman_ads2(a, (scale * b[0], scale * b[1]), 1e-3)
    mapped = wightman_ads2((a[0] / scale, a[1] / scale), b, 1e-3 / scale)
    outcomes.append(
        CheckOutcome.evaluate(
            "tm.scale_invariance",
            abs(direct - mapped) / abs(direct),
            1e-12,
            points=[list(a), list(b)],
            n=2,
        )
    )

    traj = TrajectoryParams()
    tau, tau2 = 0.4, 0.1
    base = kernel_tm_sum(tau, tau2, geom, traj, 1e-2, -N, N).value
    shifted = kernel_tm_sum(tau, tau2, geom, traj, 1e-2, -N + 1, N + 1, scale=geom.A)
    outcomes.append(
        CheckOutcome.evaluate(
            "tm.index_shift",
            abs(shifted.value - base) / abs(base),
            VALIDATION_DEFAULTS["tm_shift_bound"],
            tau=[tau, tau2],
            N=N,
        )
    )
    return outcomes


# ============================================================================
# SUITE
# ============================================================================


@dataclass
class ValidationConfig:
    """Selection and overrides for run_all."""

    only: Optional[List[str]] = None  # None runs every enabled check
    bound: Optional[float] = None  # replaces every bound when set
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    tm_full_sum: bool = True
    workers: Optional[int] = None


@dataclass
class SuiteReport:
    outcomes: List[CheckOutcome] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    def failures(self) -> List[CheckOutcome]:
        return [o for o in self.outcomes if not o.passed]

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps(o.to_dict(), sort_keys=True) + "\n" for o in self.outcomes
        )


def _registry(config: ValidationConfig) -> Dict[str, Optional[Callable[[], list]]]:
    cfg = config.quadrature
    return {
        "kernel_limits": lambda: check_kernel_limits(),
        "ec_image": lambda: check_ec_image_identity(),
        "minkowski_oracle": lambda: check_minkowski_oracle(cfg),
        "ec_oracle": lambda: check_ec_oracle(cfg),
        "ir_limits": lambda: check_ir_limits(cfg),
        "ads2_contour": lambda: check_ads2_contour(cfg),
        "truncated_switching": lambda: check_truncated_switching(cfg),
        "tm": lambda: check_tm_consistency(cfg, full_sum=config.tm_full_sum),
        # Theta-function representation of the quotient Wightman function
        "tm_theta": None,
    }


CHECK_NAMES = tuple(_registry(ValidationConfig()).keys())


def run_all(config: Optional[ValidationConfig] = None) -> SuiteReport:
    """Run the selected checks and collect outcomes in declared order."""
    config = config or ValidationConfig()
    registry = _registry(config)
    if config.only is None:
        selected = [name for name, check in registry.items() if check is not None]
    else:
        unknown = [name for name in config.only if name not in registry]
        if unknown:
            raise ConfigurationError(
                f"unknown check(s) {unknown}; choose from {list(registry)}"
            )
        disabled = [name for name in config.only if registry[name] is None]
        if disabled:
            raise ConfigurationError(f"check(s) {disabled} are disabled")
        selected = [name for name in registry if name in config.only]

    workers = thread_count() if config.workers is None else max(1, config.workers)

    def run(name: str) -> List[CheckOutcome]:
        outcomes = registry[name]()
        logger.info("check %s: %d outcome(s)", name, len(outcomes))
        return outcomes

    if workers > 1 and len(selected) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(run, selected))
    else:
        batches = [run(name) for name in selected]

    outcomes = [o for batch in batches for o in batch]
    if config.bound is not None:
        outcomes = [
            CheckOutcome.evaluate(o.name, o.measured, config.bound, **o.context)
            for o in outcomes
        ]
    return SuiteReport(outcomes)
