"""Published closed-form polynomials, transcribed verbatim, plus a diagnostic.

The posterior expressions used for fusion elsewhere in this package are
derived from first-principles event sums (:mod:`auditfuse.events`).  The
expressions below reproduce the corresponding *published* polynomial forms
character-for-character so that their known quirks can be demonstrated
rather than silently inherited:

* ``tas_alpha_high_printed`` is an already-cancelled ratio: it evaluates to
  the posterior limit as the Byzantine fraction approaches zero instead of
  reporting the conditioning event as impossible at exactly zero.
* ``intelligent_alpha_low_printed`` carries a sign error on the
  ``alpha0**2 * p1**2 * p2`` term in both numerator and denominator; it
  agrees with the event-sum value only at ``p2 == 0``.
* ``ss_high_pair_factor_printed`` (the both-Byzantine both-high factor)
  disagrees with the event sum whenever ``p2 > 0``.

None of these functions is used by any fusion or simulation path; they feed
:func:`diagnose_printed_forms` and the documentation tests only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .model import AttackParams, SetLabel
from . import events


def _ratio(num: float, den: float) -> float:
    # Printed forms hit 0/0 at degenerate corners; report NaN rather than raise.
    return num / den if den != 0.0 else math.nan


def tas_alpha_low_printed(alpha0: float, p: float) -> float:
    """Two-set low-suspicion posterior, equal-flip attack, as printed."""
    num = alpha0 * (1.0 - p) * (1.0 - 2.0 * alpha0 * p * (1.0 - 2.0 * p))
    den = 1.0 - alpha0 * (3.0 - 2.0 * p) * p + 4.0 * alpha0**2 * (1.0 - p) * p**2
    return _ratio(num, den)


def tas_alpha_high_printed(alpha0: float, p: float) -> float:
    """Two-set high-suspicion posterior, equal-flip attack, as printed.

    Valid as a ratio only for ``alpha0 > 0``; at ``alpha0 == 0`` it returns
    the limiting value ``1 / (3 - 2p)`` even though the conditioning event
    has zero probability there.
    """
    num = 1.0 + 2.0 * (1.0 - p) * (alpha0 - 2.0 * alpha0 * p)
    den = 1.0 + 2.0 * (1.0 - p) * (1.0 - 2.0 * alpha0 * p)
    return _ratio(num, den)


def intelligent_alpha_low_printed(alpha0: float, p1: float, p2: float) -> float:
    """Two-set low-suspicion posterior, unequal flips, as printed.

    The leading ``4*alpha0**2*p1**2*p2`` terms appear with a positive sign in
    the published form; the event-sum derivation gives them a negative sign.
    """
    num = (4.0 * alpha0**2 * p1**2 * p2 + 4.0 * alpha0**2 * p1 * p2
           - 2.0 * alpha0**2 * p1 + 2.0 * alpha0**2 * p1**2
           - alpha0 * p2 + alpha0)
    den = (4.0 * alpha0**2 * p1**2 * p2 + 4.0 * alpha0**2 * p1 * p2
           + 2.0 * alpha0 * p1**2 - alpha0 * p2 - 2.0 * alpha0 * p1 + 1.0)
    return _ratio(num, den)


def intelligent_alpha_high_printed(alpha0: float, p1: float, p2: float) -> float:
    """Two-set high-suspicion posterior, unequal flips, as printed.

    The published ratio has the Byzantine-fraction factor cancelled out of
    numerator and denominator, so it does not vanish at ``alpha0 == 0``.
    """
    num = (4.0 * alpha0 * p1**2 * p2 - 4.0 * alpha0 * p1 * p2
           + 2.0 * alpha0 * p1 - 2.0 * alpha0 * p1**2 + p2)
    den = (4.0 * alpha0 * p1**2 * p2 - 4.0 * alpha0 * p1 * p2
           - 2.0 * p1**2 + p2 + 2.0 * p1)
    return _ratio(num, den)


def ss_high_pair_factor_printed(p1: float, p2: float) -> float:
    """Both-Byzantine factor of the both-high set, as printed."""
    return (2.0 * p1 * (1.0 - p2) * (1.0 - p1) + p2 * p1**2) ** 2


@dataclass(frozen=True)
class PrintedFormMismatch:
    name: str
    alpha0: float
    p1: float
    p2: float
    printed: float
    event_sum: float | None
    abs_diff: float | None

    def __str__(self) -> str:
        reference = "undefined" if self.event_sum is None else f"{self.event_sum:.12g}"
        return (f"{self.name} at (alpha0={self.alpha0:g}, p1={self.p1:g}, p2={self.p2:g}): "
                f"printed={self.printed:.12g}, event-sum={reference}")


def diagnose_printed_forms(
    grid: Iterable[float] = (0.0, 0.1, 0.3, 0.5, 0.7, 0.9),
    tol: float = 1e-9,
) -> list[PrintedFormMismatch]:
    """Compare every printed form against its event-sum counterpart.

    Returns one record per grid point where they disagree by more than
    ``tol`` (or where the event-sum posterior is undefined while the printed
    polynomial still produces a number).
    """
    points = [float(x) for x in grid]
    mismatches: list[PrintedFormMismatch] = []

    def compare(name, alpha0, p1, p2, printed, reference):
        if math.isnan(printed) and reference is None:
            return  # both sides agree the posterior is undefined
        if reference is None or math.isnan(printed) or abs(printed - reference) > tol:
            diff = None if (reference is None or math.isnan(printed)) else abs(printed - reference)
            mismatches.append(PrintedFormMismatch(name, alpha0, p1, p2, printed, reference, diff))

    for alpha0 in points:
        for p in points:
            atk = AttackParams(alpha0=alpha0, p1=p, p2=p)
            low, high, _ = events.tas_posteriors(atk)
            compare("tas_alpha_low", alpha0, p, p, tas_alpha_low_printed(alpha0, p), low)
            compare("tas_alpha_high", alpha0, p, p, tas_alpha_high_printed(alpha0, p), high)

    for alpha0 in points:
        for p1 in points:
            for p2 in points:
                atk = AttackParams(alpha0=alpha0, p1=p1, p2=p2)
                low, high, _ = events.tas_posteriors(atk)
                compare("intelligent_alpha_low", alpha0, p1, p2,
                        intelligent_alpha_low_printed(alpha0, p1, p2), low)
                compare("intelligent_alpha_high", alpha0, p1, p2,
                        intelligent_alpha_high_printed(alpha0, p1, p2), high)
                factors = events.pair_factors(p1, p2)
                compare("ss_high_pair_factor", alpha0, p1, p2,
                        ss_high_pair_factor_printed(p1, p2),
                        factors[SetLabel.SS_HIGH].bb)
    return mismatches
