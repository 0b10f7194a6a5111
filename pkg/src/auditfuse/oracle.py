"""Exact probabilistic enumeration over a single two-sensor group.

This is the ground-truth engine: it enumerates the full lattice of identity
assignments, local decisions and flip indicator variables (never pre-summed
expressions), accumulates exact joint probabilities of the observable bits,
and answers posterior / conditional-probability queries by summation.  The
closed forms in :mod:`auditfuse.analytic` are validated against it.

Outcome rows are keyed by
``(hypothesis, byz_a, byz_b, v_a, v_b, u_a, u_b, z_a, z_b)`` where ``z_x`` is
sensor ``x``'s own bit as delivered by its partner.  The partner-bound copies
``w`` are marginalized out; the status indicators are functions of the
retained bits (``d_a = [u_b == z_b]``).
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from math import fsum
from pathlib import Path
from typing import Callable, Mapping

from .model import AttackParams, DetectionParams, SetLabel, TasLabel

Outcome = tuple[int, int, int, int, int, int, int, int, int]
#: Predicate over one outcome row.
RowPredicate = Callable[[Outcome], bool]


class UndefinedPosteriorError(ValueError):
    """Conditioning event has zero probability."""


def _status_a(row: Outcome) -> int:
    # a's indicator: b's direct bit against b's bit relayed by a
    return int(row[6] == row[8])


def _status_b(row: Outcome) -> int:
    return int(row[5] == row[7])


def _event_predicate(event: TasLabel | SetLabel | RowPredicate) -> RowPredicate:
    """Resolve a set label to a predicate on sensor ``a``'s row coordinates."""
    if isinstance(event, TasLabel):
        want = 1 if event is TasLabel.S_LOW else 0
        return lambda row: _status_a(row) == want
    if isinstance(event, SetLabel):
        own = 1 if event in (SetLabel.SS_LOW, SetLabel.S_LOW_HIGH) else 0
        partner = 1 if event in (SetLabel.SS_LOW, SetLabel.S_HIGH_LOW) else 0
        return lambda row: _status_a(row) == own and _status_b(row) == partner
    return event


@dataclass(frozen=True)
class JointOutcomeTable:
    """Exact joint distribution of one group's observable bits."""

    det: DetectionParams
    atk: AttackParams
    probs: Mapping[Outcome, float] = field(repr=False)

    def rows(self):
        return self.probs.items()

    def total_probability(self, hypothesis: int) -> float:
        return fsum(p for row, p in self.probs.items() if row[0] == hypothesis)

    def probability(self, event: TasLabel | SetLabel | RowPredicate,
                    hypothesis: int | None = None) -> float:
        """P(event), conditional on a hypothesis or mixed with the priors."""
        pred = _event_predicate(event)
        if hypothesis is None:
            priors = (self.det.prior0, self.det.prior1)
            return fsum(priors[row[0]] * p
                        for row, p in self.probs.items() if pred(row))
        return fsum(p for row, p in self.probs.items()
                    if row[0] == hypothesis and pred(row))

    def conditional(self, numerator: RowPredicate,
                    conditioning: TasLabel | SetLabel | RowPredicate,
                    hypothesis: int | None = None) -> float:
        """P(numerator | conditioning), by summation."""
        cond = _event_predicate(conditioning)
        den = self.probability(cond, hypothesis)
        if den <= 0.0:
            raise UndefinedPosteriorError(
                f"conditioning event has zero probability under {self.atk}")
        num = self.probability(lambda row: cond(row) and numerator(row), hypothesis)
        return num / den

    def write_csv(self, path: str | Path) -> None:
        """Audit dump: one row per outcome, probabilities in scientific notation."""
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow([
                "hypothesis", "byz_a", "byz_b", "v_a", "v_b",
                "u_a", "u_b", "z_a", "z_b", "d_a", "d_b", "probability",
            ])
            for row in sorted(self.probs):
                writer.writerow(list(row) + [_status_a(row), _status_b(row),
                                             f"{self.probs[row]:.17e}"])


def enumerate_group(det: DetectionParams, atk: AttackParams) -> JointOutcomeTable:
    """Exhaustive joint table over identities, decisions and flip lattice.

    Honest sensors contribute a single zero-flip branch; Byzantine sensors
    contribute the full eight-point lattice of (direct-copy flip,
    partner-copy flip, relay flip) with independent Bernoulli weights.
    Probabilities are accumulated per retained outcome row.
    """
    a0, p1, p2 = atk.alpha0, atk.p1, atk.p2
    byz_flips = [
        (xu, xw, y,
         (p1 if xu else 1.0 - p1) * (p1 if xw else 1.0 - p1) * (p2 if y else 1.0 - p2))
        for xu, xw, y in itertools.product((0, 1), repeat=3)
    ]
    honest_flips = [(0, 0, 0, 1.0)]

    accum: dict[Outcome, list[float]] = {}
    for hyp in (0, 1):
        p_vote = det.p_d if hyp == 1 else det.p_f
        for byz_a in (0, 1):
            pa = a0 if byz_a else 1.0 - a0
            if pa == 0.0:
                continue
            flips_a = byz_flips if byz_a else honest_flips
            for byz_b in (0, 1):
                pb = a0 if byz_b else 1.0 - a0
                if pb == 0.0:
                    continue
                flips_b = byz_flips if byz_b else honest_flips
                for v_a in (0, 1):
                    pva = p_vote if v_a else 1.0 - p_vote
                    for v_b in (0, 1):
                        pvb = p_vote if v_b else 1.0 - p_vote
                        base = pa * pb * pva * pvb
                        if base == 0.0:
                            continue
                        for xu_a, xw_a, y_a, pfa in flips_a:
                            for xu_b, xw_b, y_b, pfb in flips_b:
                                p = base * pfa * pfb
                                if p == 0.0:
                                    continue
                                u_a = v_a ^ xu_a
                                u_b = v_b ^ xu_b
                                w_a = v_a ^ xw_a
                                w_b = v_b ^ xw_b
                                z_a = w_a ^ y_b  # a's bit, relayed by b
                                z_b = w_b ^ y_a
                                row = (hyp, byz_a, byz_b, v_a, v_b, u_a, u_b, z_a, z_b)
                                accum.setdefault(row, []).append(p)
    probs = {row: fsum(parts) for row, parts in accum.items()}
    return JointOutcomeTable(det=det, atk=atk, probs=probs)


def posterior_from_oracle(table: JointOutcomeTable,
                          event: TasLabel | SetLabel | RowPredicate) -> float:
    """Exact P(sensor a is Byzantine | event) by summation."""
    return table.conditional(lambda row: row[1] == 1, event)


def conditional_decision_pmf(table: JointOutcomeTable,
                             event: TasLabel | SetLabel | RowPredicate,
                             hypothesis: int) -> float:
    """Exact P(direct bit = 1 | event, hypothesis)."""
    return table.conditional(lambda row: row[5] == 1, event, hypothesis)


def pair_match_probability(table: JointOutcomeTable,
                           hypothesis: int | None = None) -> float:
    """Exact P(the two direct bits agree | both-low pair)."""
    return table.conditional(lambda row: row[5] == row[6], SetLabel.SS_LOW, hypothesis)


def group_vote_pmf_exact(table: JointOutcomeTable, hypothesis: int) -> float:
    """Exact P(both direct bits are 1 | both-low pair that matched)."""
    ss = _event_predicate(SetLabel.SS_LOW)
    return table.conditional(
        lambda row: row[5] == 1 and row[6] == 1,
        lambda row: ss(row) and row[5] == row[6],
        hypothesis,
    )


def mismatch_ratio_exact(table: JointOutcomeTable) -> float:
    """Exact P(direct bits agree | both-low pair with a Byzantine member)."""
    ss = _event_predicate(SetLabel.SS_LOW)
    return table.conditional(
        lambda row: row[5] == row[6],
        lambda row: ss(row) and (row[1] == 1 or row[2] == 1),
    )
