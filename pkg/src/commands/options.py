"""Translate parsed command-line flags into library objects."""

from argparse import Namespace
from typing import Union

from src.detector_schema import (
    EinsteinCylinder,
    GeometryParams,
    Minkowski,
    PoincareAdS2,
    QuadratureConfig,
    TimeMachine,
)
from src.errors import ConfigurationError
from src.utils import parse_ladder


def parse_truncation(text: str) -> Union[int, str]:
    """N flag: a positive integer or "auto"."""
    if text == "auto":
        return text
    try:
        value = int(text)
    except ValueError as exc:
        raise ConfigurationError(f"N must be an integer or 'auto', got {text!r}") from exc
    if value < 1:
        raise ConfigurationError(f"N must be >= 1, got {value}")
    return value


def _require(args: Namespace, name: str, geometry: str) -> float:
    value = getattr(args, name, None)
    if value is None:
        raise ConfigurationError(f"--{name} is required for geometry {geometry}")
    return value


def geometry_from_args(args: Namespace) -> GeometryParams:
    kind = args.geometry
    if kind == "minkowski":
        return Minkowski()
    if kind == "ec":
        return EinsteinCylinder(L=_require(args, "ell", kind), gamma=args.gamma)
    if kind == "ads2":
        return PoincareAdS2(W=_require(args, "w", kind))
    if kind == "tm":
        ell = _require(args, "ell", kind)
        given = [n for n in ("w", "delta", "A") if getattr(args, n, None) is not None]
        if len(given) != 1:
            raise ConfigurationError("geometry tm takes exactly one of --w, --delta, --A")
        if given[0] == "w":
            return TimeMachine.from_curvature(args.w, ell)
        if given[0] == "delta":
            return TimeMachine.from_delta(args.delta, ell)
        return TimeMachine(A=args.A, L=ell)
    raise ConfigurationError(f"unknown geometry {kind!r}")


def quadrature_from_args(args: Namespace) -> QuadratureConfig:
    ladder = getattr(args, "eps_ladder", None)
    return QuadratureConfig().with_overrides(
        rel_tol=getattr(args, "tol", None),
        eps_ladder=parse_ladder(ladder) if ladder else None,
    )
