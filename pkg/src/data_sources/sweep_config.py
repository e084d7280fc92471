"""Load sweep configurations from JSON, with command-line overrides."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from src.config import RESPONSE_DEFAULTS
from src.detector_schema import QuadratureConfig, SweepConfig
from src.errors import ConfigurationError

logger = logging.getLogger(__name__)

_TOP_LEVEL_KEYS = {
    "mode",
    "omega",
    "fixed",
    "w",
    "ell",
    "gamma",
    "N",
    "xi",
    "tail_tol",
    "grid",
    "quadrature",
    "output_path",
    "description",
}
_QUADRATURE_KEYS = {
    "abs_tol",
    "rel_tol",
    "max_subdivisions",
    "support_halfwidth",
    "detour_radius",
    "eps_ladder",
}


def parse_grid(spec: Any) -> List[float]:
    """Grid from an explicit list or {"start", "stop", "num", "spacing"}."""
    if isinstance(spec, list):
        return [float(v) for v in spec]
    if isinstance(spec, dict):
        try:
            start, stop, num = float(spec["start"]), float(spec["stop"]), int(spec["num"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"bad grid spec {spec!r}") from exc
        spacing = spec.get("spacing", "linear")
        if spacing == "linear":
            return [float(v) for v in np.linspace(start, stop, num)]
        if spacing == "geometric":
            return [float(v) for v in np.geomspace(start, stop, num)]
        raise ConfigurationError(f"grid spacing must be linear or geometric, got {spacing!r}")
    raise ConfigurationError(f"grid must be a list or a range spec, got {spec!r}")


def read_config_document(path: str) -> Dict[str, Any]:
    """Parse a JSON sweep document into a dict."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: top level must be an object")
    return data


def build_sweep_config(
    data: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None
) -> SweepConfig:
    """Merge a config document with flag overrides and validate it.

    Overrides with value None are ignored. `w` and `ell` overrides land on
    the fixed parameter or replace the grid by a single point, depending
    on the mode.
    """
    unknown = set(data) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    data = dict(data)
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}

    mode = overrides.pop("mode", data.get("mode"))
    if mode is None:
        raise ConfigurationError("sweep mode is required (circumference or curvature)")
    fixed_key, swept_key = ("w", "ell") if mode == "circumference" else ("ell", "w")

    fixed = data.get("fixed", data.get(fixed_key))
    fixed = overrides.pop(fixed_key, fixed)
    grid = data.get("grid")
    if swept_key in overrides:
        grid = [overrides.pop(swept_key)]
    if fixed is None or grid is None:
        raise ConfigurationError(f"{mode} sweep needs '{fixed_key}' and a grid")

    quad_data = dict(data.get("quadrature") or {})
    bad = set(quad_data) - _QUADRATURE_KEYS
    if bad:
        raise ConfigurationError(f"unknown quadrature keys: {sorted(bad)}")
    for key in ("rel_tol", "eps_ladder"):
        if key in overrides:
            quad_data[key] = overrides.pop(key)
    if "eps_ladder" in quad_data:
        quad_data["eps_ladder"] = tuple(quad_data["eps_ladder"])

    N = overrides.pop("N", data.get("N", 10))
    if isinstance(N, str) and N != "auto":
        try:
            N = int(N)
        except ValueError as exc:
            raise ConfigurationError(f"N must be an integer or 'auto', got {N!r}") from exc

    config = SweepConfig(
        mode=mode,
        omega=overrides.pop("omega", data.get("omega")),
        fixed=fixed,
        grid=parse_grid(grid),
        gamma=overrides.pop("gamma", data.get("gamma", RESPONSE_DEFAULTS["gamma"])),
        N=N,
        xi=overrides.pop("xi", data.get("xi", RESPONSE_DEFAULTS["xi"])),
        tail_tol=overrides.pop("tail_tol", data.get("tail_tol", RESPONSE_DEFAULTS["tail_tol"])),
        quadrature=QuadratureConfig(**quad_data),
        output_path=overrides.pop("output_path", data.get("output_path")),
    )
    if overrides:
        logger.warning("ignored overrides: %s", sorted(overrides))
    return config


def load_sweep_config(
    path: Optional[str], overrides: Optional[Dict[str, Any]] = None
) -> SweepConfig:
    """SweepConfig from an optional JSON file plus flag overrides."""
    data = read_config_document(path) if path else {}
    return build_sweep_config(data, overrides)
