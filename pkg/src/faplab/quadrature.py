"""Adaptive quadrature over unbounded domains via tangent substitutions.

Heavy-tailed integrands (Cauchy-like decay) defeat naive truncation, so
every integral over the real line or the plane in this package goes through
the same change of variables:

* line:  y = center + scale * tan(theta),   theta in (-pi/2, pi/2)
* plane: y = center + r e(phi), r = scale * tan(theta),  theta in (0, pi/2)

which maps the tails onto a bounded interval where QUADPACK converges.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable, Sequence

from scipy import integrate

__all__ = [
    "integrate_real_line",
    "integrate_half_line",
    "integrate_plane",
    "QuadratureError",
]


class QuadratureError(RuntimeError):
    """Raised when an adaptive quadrature fails to converge."""


def _quad(f, a, b, epsabs, epsrel, limit=300):
    # QUADPACK's IntegrationWarning is advisory; the acceptance policy below
    # (finite value, error estimate small absolutely or relatively) decides.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit)
    if not math.isfinite(value) or err > max(1e4 * epsabs, 1e-6 * abs(value)):
        raise QuadratureError(
            f"quadrature did not converge: value={value}, error estimate={err}"
        )
    return value


def integrate_real_line(
    f: Callable[[float], float],
    center: float = 0.0,
    scale: float = 1.0,
    epsabs: float = 1e-12,
    epsrel: float = 1e-12,
) -> float:
    """Integral of f over the whole real line, tan-substituted around center."""
    if scale <= 0.0:
        raise ValueError("scale must be positive")

    def g(theta: float) -> float:
        t = math.tan(theta)
        return f(center + scale * t) * scale * (1.0 + t * t)

    return _quad(g, -0.5 * math.pi, 0.5 * math.pi, epsabs, epsrel)


def integrate_half_line(
    f: Callable[[float], float],
    scale: float = 1.0,
    epsabs: float = 1e-12,
    epsrel: float = 1e-12,
) -> float:
    """Integral of f over (0, inf) with the radial substitution r = scale tan(theta)."""
    if scale <= 0.0:
        raise ValueError("scale must be positive")

    def g(theta: float) -> float:
        t = math.tan(theta)
        return f(scale * t) * scale * (1.0 + t * t)

    return _quad(g, 0.0, 0.5 * math.pi, epsabs, epsrel)


def integrate_plane(
    f: Callable[[Sequence[float]], float],
    center: Sequence[float] = (0.0, 0.0),
    scale: float = 1.0,
    epsabs: float = 1e-10,
    epsrel: float = 1e-10,
) -> float:
    """Integral of f over the plane: polar angle times tan-substituted radius."""
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    cx, cy = float(center[0]), float(center[1])

    def ring(phi: float) -> float:
        c, s = math.cos(phi), math.sin(phi)

        def g(theta: float) -> float:
            t = math.tan(theta)
            r = scale * t
            return f((cx + r * c, cy + r * s)) * r * scale * (1.0 + t * t)

        return _quad(g, 0.0, 0.5 * math.pi, epsabs * 0.1, epsrel * 0.1)

    return _quad(ring, 0.0, 2.0 * math.pi, epsabs, epsrel, limit=100)


def integrate_plane_radial(
    f_radial: Callable[[float], float],
    scale: float = 1.0,
    epsabs: float = 1e-12,
    epsrel: float = 1e-12,
) -> float:
    """Integral over the plane of an isotropic f(r): 2 pi int r f(r) dr."""

    def g(r: float) -> float:
        return 2.0 * math.pi * r * f_radial(r)

    return integrate_half_line(g, scale=scale, epsabs=epsabs, epsrel=epsrel)
