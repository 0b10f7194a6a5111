"""Monte Carlo simulator for the audit-bit fusion schemes.

One trial draws a hypothesis, sensor identities, local decisions and every
flip indicator, runs the match/mismatch partition over adjacent sensor
pairs, and exposes the realized set cardinalities and vote sums every
scheme's fusion rule needs.

Randomness is counter-split: trial ``t`` uses an independent Philox stream
keyed by the master seed with the trial index in the counter block, so any
single trial is reproducible in isolation and aggregation order never
affects results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Callable, Iterable, Sequence

import numpy as np

from . import analytic
from .model import (
    AttackParams, DetectionParams, GroupTranscript, IdentityMode,
    NetworkConfig, Scheme, SensorState, SetLabel, ThresholdMode,
)

_MASK64 = (1 << 64) - 1


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Independent, reproducible stream for one trial."""
    bitgen = np.random.Philox(
        key=np.array([seed & _MASK64, 0], dtype=np.uint64),
        counter=np.array([0, 0, 0, trial_index & _MASK64], dtype=np.uint64),
    )
    return np.random.Generator(bitgen)


@dataclass
class TrialRecord:
    """Everything observable about one simulated detection round."""

    hypothesis: int
    n_sensors: int
    byzantine: np.ndarray
    v: np.ndarray
    u: np.ndarray
    w: np.ndarray
    z: np.ndarray            # own bit as delivered by the partner
    d: np.ndarray            # status indicators
    counts: dict[str, int]   # realized cardinality per component name
    votes: dict[str, int]    # realized ones-count per component name
    decisions: dict[Scheme, int] = field(default_factory=dict)

    @property
    def partner(self) -> np.ndarray:
        return np.arange(self.n_sensors) ^ 1

    def labels(self) -> np.ndarray:
        """Four-set label index per sensor (1..4 in enum declaration order)."""
        d_own = self.d
        d_partner = self.d[self.partner]
        return np.where(d_own & d_partner, 1,
                        np.where(d_own & ~d_partner, 2,
                                 np.where(~d_own & d_partner, 3, 4)))

    def group_transcripts(self, ids: Sequence[int] | None = None) -> list[GroupTranscript]:
        """Materialize per-pair transcripts (for the cluster protocol)."""
        if ids is None:
            ids = range(self.n_sensors)
        ids = list(ids)
        out = []
        for g in range(self.n_sensors // 2):
            a, b = 2 * g, 2 * g + 1
            state_a = SensorState(
                byzantine=bool(self.byzantine[a]), v=int(self.v[a]),
                u=int(self.u[a]), w=int(self.w[a]), z_relay=int(self.z[b]))
            state_b = SensorState(
                byzantine=bool(self.byzantine[b]), v=int(self.v[b]),
                u=int(self.u[b]), w=int(self.w[b]), z_relay=int(self.z[a]))
            out.append(GroupTranscript(id_a=ids[a], id_b=ids[b], a=state_a, b=state_b))
        return out


def run_trial(seed: int, config: NetworkConfig, det: DetectionParams,
              atk: AttackParams, trial_index: int = 0) -> TrialRecord:
    """Simulate one detection round; deterministic given (seed, trial_index).

    Honest sensors relay faithfully; a Byzantine flips its direct copy and
    its partner-bound copy as independent events and its relayed partner bit
    as a third independent event.
    """
    rng = trial_rng(seed, trial_index)
    n = config.n_sensors
    hypothesis = int(rng.random() < det.prior1)

    if config.identity_mode is IdentityMode.FIXED_COUNT:
        k = int(round(atk.alpha0 * n))
        byz = np.zeros(n, dtype=bool)
        byz[rng.permutation(n)[:k]] = True
    else:
        byz = rng.random(n) < atk.alpha0

    p_vote = det.p_d if hypothesis == 1 else det.p_f
    v = rng.random(n) < p_vote
    flip_u = (rng.random(n) < atk.p1) & byz
    flip_w = (rng.random(n) < atk.p1) & byz
    flip_relay = (rng.random(n) < atk.p2) & byz

    partner = np.arange(n) ^ 1
    u = v ^ flip_u
    w = v ^ flip_w
    z = w ^ flip_relay[partner]          # own bit after the partner's relaying
    d = u[partner] == z[partner]         # status indicator per sensor

    d_partner = d[partner]
    in_ss_low = d & d_partner
    in_low_high = d & ~d_partner
    in_high_low = ~d & d_partner
    in_ss_high = ~d & ~d_partner
    matched = u == u[partner]
    group_rep = np.arange(n) % 2 == 0
    group_vote = in_ss_low & matched & group_rep

    counts = {
        analytic.COMPONENT_ALL: n,
        analytic.COMPONENT_S_LOW: int(d.sum()),
        analytic.COMPONENT_S_HIGH: int((~d).sum()),
        SetLabel.SS_LOW.value: int(in_ss_low.sum()),
        SetLabel.S_LOW_HIGH.value: int(in_low_high.sum()),
        SetLabel.S_HIGH_LOW.value: int(in_high_low.sum()),
        SetLabel.SS_HIGH.value: int(in_ss_high.sum()),
        analytic.COMPONENT_GROUP_VOTES: int(group_vote.sum()),
    }
    votes = {
        analytic.COMPONENT_ALL: int(u.sum()),
        analytic.COMPONENT_S_LOW: int(u[d].sum()),
        analytic.COMPONENT_S_HIGH: int(u[~d].sum()),
        SetLabel.SS_LOW.value: int(u[in_ss_low].sum()),
        SetLabel.S_LOW_HIGH.value: int(u[in_low_high].sum()),
        SetLabel.S_HIGH_LOW.value: int(u[in_high_low].sum()),
        SetLabel.SS_HIGH.value: int(u[in_ss_high].sum()),
        analytic.COMPONENT_GROUP_VOTES: int(u[group_vote].sum()),
    }
    return TrialRecord(
        hypothesis=hypothesis, n_sensors=n, byzantine=byz, v=v, u=u, w=w, z=z,
        d=d, counts=counts, votes=votes,
    )


def fuse(scheme: Scheme, trial: TrialRecord, perf: analytic.SchemePerformance,
         threshold_mode: ThresholdMode) -> int:
    """Apply one scheme's linear fusion rule to a trial.

    ``expected`` mode uses the large-network threshold carried by ``perf``;
    ``realized`` mode rebuilds the cardinality terms from the trial's
    observed set sizes.  Ties decide signal-present.
    """
    statistic = sum(c.weight * trial.votes[c.name] for c in perf.components)
    if threshold_mode is ThresholdMode.REALIZED:
        eta = perf.realized_eta(trial.counts)
    else:
        eta = perf.eta
    return int(statistic >= eta)


_SIM_SCHEMES = (Scheme.DIRECT, Scheme.TAS, Scheme.TAS_INTELLIGENT, Scheme.EAS, Scheme.RAS)


@dataclass(frozen=True)
class EmpiricalPerf:
    """Error-rate estimates from a batch of simulated trials."""

    trials: int
    errors: int
    trials_h0: int
    false_alarms: int
    trials_h1: int
    misses: int

    @property
    def p_e_hat(self) -> float:
        return self.errors / self.trials

    @property
    def standard_error(self) -> float:
        p = self.p_e_hat
        return sqrt(p * (1.0 - p) / self.trials)

    @property
    def false_alarm_rate(self) -> float:
        return self.false_alarms / self.trials_h0 if self.trials_h0 else 0.0

    @property
    def miss_rate(self) -> float:
        return self.misses / self.trials_h1 if self.trials_h1 else 0.0


def run_experiment(config: NetworkConfig, det: DetectionParams, atk: AttackParams,
                   schemes: Sequence[Scheme], n_trials: int,
                   on_trial: Callable[[TrialRecord], None] | None = None,
                   ) -> dict[Scheme, EmpiricalPerf]:
    """Stream ``n_trials`` rounds and aggregate per-scheme error estimates.

    The per-trial decisions for every requested scheme are recorded on each
    ``TrialRecord`` before the optional ``on_trial`` hook sees it.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    for scheme in schemes:
        if scheme not in _SIM_SCHEMES:
            raise ValueError(f"unknown scheme: {scheme!r}")
    perfs = {s: analytic.scheme_performance(s, det, atk, config.n_sensors)
             for s in schemes}
    errors = {s: 0 for s in schemes}
    false_alarms = {s: 0 for s in schemes}
    misses = {s: 0 for s in schemes}
    trials_h1 = 0
    for t in range(n_trials):
        trial = run_trial(config.seed, config, det, atk, trial_index=t)
        trials_h1 += trial.hypothesis
        for scheme in schemes:
            decision = fuse(scheme, trial, perfs[scheme], config.threshold_mode)
            trial.decisions[scheme] = decision
            if decision != trial.hypothesis:
                errors[scheme] += 1
                if trial.hypothesis == 0:
                    false_alarms[scheme] += 1
                else:
                    misses[scheme] += 1
        if on_trial is not None:
            on_trial(trial)
    trials_h0 = n_trials - trials_h1
    return {
        s: EmpiricalPerf(
            trials=n_trials, errors=errors[s],
            trials_h0=trials_h0, false_alarms=false_alarms[s],
            trials_h1=trials_h1, misses=misses[s],
        )
        for s in schemes
    }


def pair_status_counts(trials: Iterable[TrialRecord]) -> dict[tuple[int, int], int]:
    """Tally joint status patterns per pair, for occupancy goodness-of-fit."""
    counts = {(1, 1): 0, (1, 0): 0, (0, 1): 0, (0, 0): 0}
    for trial in trials:
        d = trial.d
        for g in range(trial.n_sensors // 2):
            key = (int(d[2 * g]), int(d[2 * g + 1]))
            counts[key] += 1
    return counts
