"""Utility functions shared across the engine."""

import math
from typing import List, Tuple

from scipy import special

from src.errors import ChronologyViolationError, ConfigurationError


def format_number(num: float, digits: int = 17) -> str:
    """Format a number in scientific notation with `digits` significant digits."""
    if isinstance(num, complex):
        return f"{format_number(num.real, digits)}{num.imag:+.{digits - 1}e}j"
    return f"{num:.{digits - 1}e}"


def require_finite(name: str, value: float, error=ConfigurationError) -> float:
    """Return value as float, raising `error` if it is not finite."""
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise error(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(value):
        raise error(f"{name} must be finite, got {value}")
    return value


def require_positive(name: str, value: float, error=ConfigurationError) -> float:
    """Return value as float, raising `error` unless it is finite and > 0."""
    value = require_finite(name, value, error)
    if value <= 0:
        raise error(f"{name} must be > 0, got {value}")
    return value


def eps_ladder(eps0: float, rungs: int) -> Tuple[float, ...]:
    """Geometric regulator ladder eps0 * 2**-k, k = 0..rungs-1."""
    eps0 = require_positive("eps0", eps0)
    if rungs < 3:
        raise ConfigurationError(f"epsilon ladder needs >= 3 rungs, got {rungs}")
    return tuple(eps0 * 2.0**-k for k in range(rungs))


def parse_ladder(text: str) -> Tuple[float, ...]:
    """Parse '0.01,0.005,...' or 'eps0:rungs' into an epsilon ladder."""
    text = text.strip()
    if ":" in text:
        head, tail = text.split(":", 1)
        try:
            return eps_ladder(float(head), int(tail))
        except ValueError as exc:
            raise ConfigurationError(f"bad ladder spec {text!r}") from exc
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigurationError(f"bad ladder spec {text!r}") from exc


def gaussian_tail_mass(x: float) -> float:
    """Mass of chi(t)chi(t') = exp(-t^2 - t'^2) outside [-x, x]^2, normalised."""
    tail = special.erfc(x)
    return float(2.0 * tail - tail * tail)


def no_ctc_halfwidth(w: float, support_halfwidth: float, mass_limit: float):
    """Integration half-width respecting |tau| <= 1/w.

    Returns (halfwidth, clipped_mass). The domain is clipped to 1/w when the
    Gaussian mass beyond it stays below `mass_limit`.
    """
    window = 1.0 / w
    if support_halfwidth <= window:
        return support_halfwidth, 0.0
    mass = gaussian_tail_mass(window)
    if mass > mass_limit:
        raise ChronologyViolationError(
            f"switching support {support_halfwidth:g}T exceeds the no-CTC window "
            f"1/w = {window:.6g}T and the clipped Gaussian mass {mass:.3e} "
            f"exceeds {mass_limit:.1e}"
        )
    return window, mass


def pair_magnitudes(per_term: List[Tuple[int, complex]]) -> List[float]:
    """|P(n)| + |P(-n)| for n = 1..N from a list of (n, P(n))."""
    values = dict(per_term)
    top = max((abs(n) for n in values), default=0)
    return [
        abs(values.get(n, 0.0)) + abs(values.get(-n, 0.0)) for n in range(1, top + 1)
    ]


def decreasing_onset(magnitudes: List[float]) -> int:
    """Smallest n such that magnitudes are non-increasing from n onwards."""
    if not magnitudes:
        return 0
    start = len(magnitudes) - 1
    while start > 0 and magnitudes[start] <= magnitudes[start - 1]:
        start -= 1
    return start + 1


def geometric_tail(magnitudes: List[float], safety: float) -> float:
    """Tail bound for a positive series from its last two terms.

    Uses t_N * r / (1 - r), r = t_N / t_{N-1}, scaled by `safety`. A series
    that stopped decreasing gets t_N * N as a conservative bound.
    """
    if not magnitudes:
        return 0.0
    last = magnitudes[-1]
    if last == 0.0:
        return 0.0
    if len(magnitudes) >= 2 and 0.0 < last < magnitudes[-2]:
        ratio = last / magnitudes[-2]
        return safety * last * ratio / (1.0 - ratio)
    return safety * last * len(magnitudes)
