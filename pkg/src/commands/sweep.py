"""`ctc-detector sweep`: responses along a circumference or curvature grid.

Each row holds P_TM next to its three comparison baselines. The baseline
that does not depend on the swept parameter is computed once. Rows run in
worker processes and are written back in grid order.
"""

import logging
import math
import os
import sys
from argparse import Namespace
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Optional

from src.config import thread_count
from src.data_sources.sweep_config import load_sweep_config
from src.data_sources.sweep_csv import write_sweep_table
from src.detector_schema import (
    DetectorConfig,
    EinsteinCylinder,
    PoincareAdS2,
    SweepConfig,
    SweepRow,
    SweepTable,
    TimeMachine,
)
from src.errors import ConfigurationError, ConvergenceError
from src.models.response import (
    minkowski_closed_value,
    response_ads2,
    response_einstein_cylinder,
    response_time_machine,
)
from src.utils import parse_ladder

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT = "sweep.csv"


@dataclass(frozen=True)
class _Baselines:
    P_M: float
    P_AdS2: Optional[float] = None  # fixed in circumference mode
    P_EC: Optional[float] = None  # fixed in curvature mode


def _baselines(config: SweepConfig, det: DetectorConfig) -> _Baselines:
    p_m = minkowski_closed_value(det.omega)
    cfg = config.quadrature
    if config.mode == "circumference":
        ads = response_ads2(det, PoincareAdS2(W=config.fixed), cfg)
        return _Baselines(P_M=p_m, P_AdS2=ads.probability)
    ec = response_einstein_cylinder(
        det, EinsteinCylinder(L=config.fixed, gamma=config.gamma), cfg
    )
    return _Baselines(P_M=p_m, P_EC=ec.probability)


def _sweep_row(config: SweepConfig, baselines: _Baselines, swept: float) -> SweepRow:
    det = DetectorConfig(omega=config.omega, xi=config.xi)
    cfg = config.quadrature
    w, ell = config.point(swept)
    nan = math.nan
    p_ads, p_ec = baselines.P_AdS2, baselines.P_EC
    try:
        if p_ads is None:
            p_ads = response_ads2(det, PoincareAdS2(W=w), cfg).probability
        if p_ec is None:
            p_ec = response_einstein_cylinder(
                det, EinsteinCylinder(L=ell, gamma=config.gamma), cfg
            ).probability
        tm = response_time_machine(
            det,
            TimeMachine.from_curvature(w, ell),
            cfg,
            N=config.N,
            tail_tol=config.tail_tol,
            workers=1,
        )
    except ConvergenceError as exc:
        logger.warning("row %s=%g failed: %s", config.mode, swept, exc)
        return SweepRow(
            swept=swept,
            P_TM=nan,
            P_AdS2=nan if p_ads is None else p_ads,
            P_EC=nan if p_ec is None else p_ec,
            P_M=baselines.P_M,
            tail_estimate=nan,
            eps_residual=nan,
            status=f"convergence_failure: {exc}".replace(",", ";").replace("\n", " "),
        )
    status = "tail_warning" if tm.tail_estimate > config.tail_tol else "ok"
    return SweepRow(
        swept=swept,
        P_TM=tm.probability,
        P_AdS2=p_ads,
        P_EC=p_ec,
        P_M=baselines.P_M,
        tail_estimate=tm.tail_estimate,
        eps_residual=tm.eps_residual,
        status=status,
    )


def run_sweep(config: SweepConfig, workers: Optional[int] = None) -> SweepTable:
    """Evaluate every grid point; a failed point is recorded, not raised."""
    det = DetectorConfig(omega=config.omega, xi=config.xi)
    baselines = _baselines(config, det)
    workers = thread_count() if workers is None else max(1, workers)
    task = partial(_sweep_row, config, baselines)
    logger.info(
        "%s sweep over %d point(s), %d worker(s)", config.mode, len(config.grid), workers
    )
    if workers > 1 and len(config.grid) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(config.grid))) as pool:
            rows = list(pool.map(task, config.grid))
    else:
        rows = [task(swept) for swept in config.grid]
    return SweepTable(mode=config.mode, rows=rows)


def _check_writable(path: Path) -> None:
    parent = path.parent if str(path.parent) else Path(".")
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise ConfigurationError(f"cannot write output to {path}")


def run(args: Namespace) -> int:
    ladder = args.eps_ladder
    overrides = {
        "mode": args.mode,
        "omega": args.omega,
        "w": args.w,
        "ell": args.ell,
        "gamma": args.gamma,
        "N": args.N,
        "xi": args.xi,
        "tail_tol": args.tail_tol,
        "rel_tol": args.tol,
        "eps_ladder": None if ladder is None else parse_ladder(ladder),
    }
    config = load_sweep_config(args.config, overrides)
    output = Path(args.out or config.output_path or DEFAULT_OUTPUT)
    _check_writable(output)
    table = run_sweep(config)
    write_sweep_table(table, output)
    failed = sum(1 for row in table.rows if row.status != "ok")
    sys.stdout.write(f"{output}: {len(table.rows)} row(s), {failed} flagged\n")
    return 0
