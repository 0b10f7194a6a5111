"""Attacker-side optimizer: grid search for the flip probabilities that
maximize a scheme's closed-form error probability.

The attacker is assumed to know the sensor quality, priors, network size and
the scheme in use, mirroring the symmetric-knowledge convention of the
fusion side.  Surfaces are cheap closed-form evaluations, so an exhaustive
grid beats local search and makes the claims about global structure easy to
audit.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import analytic
from .model import AttackParams, DetectionParams, Scheme


@dataclass(frozen=True)
class AttackOptimum:
    p1: float
    p2: float
    p_e: float


@dataclass(frozen=True)
class SurfacePoint:
    p1: float
    p2: float
    p_e: float
    dpe_dp2_sign: int  # sign of the forward difference along p2 (0 at the edge)


def _grid(step: float) -> list[float]:
    if not 0.0 < step <= 0.5:
        raise ValueError("grid_step must lie in (0, 0.5]")
    values = []
    k = 0
    while True:
        x = round(k * step, 12)
        if x >= 1.0:
            break
        values.append(x)
        k += 1
    values.append(1.0)
    return values


def best_response_surface(scheme: Scheme, det: DetectionParams, alpha0: float,
                          n_sensors: int, grid_step: float = 0.01) -> list[SurfacePoint]:
    """Full error-probability surface over the attack square.

    Points are emitted in canonical (p1, p2) order together with the sign of
    the forward difference along p2 as a monotonicity diagnostic.
    """
    values = _grid(grid_step)
    surface: list[SurfacePoint] = []
    for p1 in values:
        row = []
        for p2 in values:
            atk = AttackParams(alpha0=alpha0, p1=p1, p2=p2)
            perf = analytic.scheme_performance(scheme, det, atk, n_sensors)
            row.append(perf.p_e)
        for j, p2 in enumerate(values):
            if j + 1 < len(values):
                diff = row[j + 1] - row[j]
                sign = (diff > 0) - (diff < 0)
            else:
                sign = 0
            surface.append(SurfacePoint(p1=p1, p2=p2, p_e=row[j], dpe_dp2_sign=sign))
    return surface


def optimize_attack(scheme: Scheme, det: DetectionParams, alpha0: float,
                    n_sensors: int, grid_step: float = 0.01) -> AttackOptimum:
    """Exhaustive argmax of the error probability over the attack square.

    Ties break toward smaller ``p1`` then smaller ``p2``; the selection is a
    deterministic reduction over the full surface, so traversal order never
    matters.
    """
    surface = best_response_surface(scheme, det, alpha0, n_sensors, grid_step)
    best = min(surface, key=lambda pt: (-pt.p_e, pt.p1, pt.p2))
    return AttackOptimum(p1=best.p1, p2=best.p2, p_e=best.p_e)
