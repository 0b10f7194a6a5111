"""Closed-form engine for fusion weights, thresholds, Gaussian moments and
error probabilities of every supported scheme.

All Byzantine posteriors come from the event algebra in
:mod:`auditfuse.events`; published polynomial transcriptions live in
:mod:`auditfuse.as_printed` and are never used here for anything but
logging comparisons.

The Gaussian machinery treats each behavioural set as one component of a
linear statistic: set ``e`` contributes ``W_e * (ones in e)`` where ``W_e``
is the per-vote log-likelihood weight, and the decision threshold collects
``log(prior0/prior1)`` plus one cardinality term per set.  For large
networks cardinalities are replaced by their expectations; the simulator can
also evaluate the realized-cardinality variant.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from math import erfc, fsum, inf, log, sqrt

from . import as_printed, events
from .model import AttackParams, DetectionParams, Scheme, SetLabel, EAS_SETS

logger = logging.getLogger(__name__)

#: Clamp applied to boundary vote probabilities before taking logarithms.
PMF_EPSILON = 1e-15

#: Component names shared with the simulator and the cluster protocol.
COMPONENT_ALL = "all"
COMPONENT_S_LOW = "s_low"
COMPONENT_S_HIGH = "s_high"
COMPONENT_GROUP_VOTES = "group_votes"

COMPONENT_NAMES = (
    COMPONENT_ALL, COMPONENT_S_LOW, COMPONENT_S_HIGH,
    SetLabel.SS_LOW.value, SetLabel.S_LOW_HIGH.value,
    SetLabel.S_HIGH_LOW.value, SetLabel.SS_HIGH.value,
    COMPONENT_GROUP_VOTES,
)


class UndefinedPosteriorError(ValueError):
    """Conditioning event has zero probability; the posterior is undefined."""


class InfiniteWeightError(ValueError):
    """A vote probability sits exactly on {0, 1}; the log weight diverges."""


def q_function(x: float) -> float:
    """Standard Gaussian tail probability via the complementary error function."""
    if x == inf:
        return 0.0
    if x == -inf:
        return 1.0
    return 0.5 * erfc(x / sqrt(2.0))


@dataclass(frozen=True)
class ConditionalPmf:
    """Bernoulli vote probabilities of one behavioural set, per hypothesis."""

    pi11: float  # P(vote = 1 | signal present)
    pi10: float  # P(vote = 1 | signal absent)

    @property
    def pi01(self) -> float:
        return 1.0 - self.pi11

    @property
    def pi00(self) -> float:
        return 1.0 - self.pi10


@dataclass(frozen=True)
class TasPosterior:
    """Two-set Byzantine posteriors plus the match probability.

    ``alpha_low``/``alpha_high`` are ``None`` when the corresponding status
    event has zero probability.
    """

    alpha_low: float | None
    alpha_high: float | None
    p_status_match: float


@dataclass(frozen=True)
class EasPosterior:
    """Four-set Byzantine posteriors and set occupancy probabilities."""

    alphas: dict[SetLabel, float | None]
    occupancy: dict[SetLabel, float]


@dataclass(frozen=True)
class SchemeComponent:
    """One additive term of a scheme's fusion statistic."""

    name: str
    per_group: bool          # True when one vote is cast per matched group
    expected_count: float
    pmf: ConditionalPmf
    weight: float            # per-vote log-likelihood weight
    count_log_term: float    # log((1-pi10)/(1-pi11)), multiplies the cardinality


@dataclass(frozen=True)
class SchemePerformance:
    """Weights, threshold, Gaussian moments, tail arguments and error probability."""

    scheme: Scheme
    n_sensors: int
    prior_term: float
    components: tuple[SchemeComponent, ...]
    eta: float
    mu0: float
    mu1: float
    var0: float
    var1: float
    gamma_f: float
    gamma_m: float
    p_e: float
    degenerate: bool

    @property
    def expected_cardinalities(self) -> dict[str, float]:
        return {c.name: c.expected_count for c in self.components}

    @property
    def weights(self) -> dict[str, float]:
        return {c.name: c.weight for c in self.components}

    def realized_eta(self, counts: dict[str, float]) -> float:
        """Threshold evaluated with observed set cardinalities.

        Sets absent from ``counts`` contribute zero, matching the convention
        that an empty set drops out of the statistic entirely.
        """
        return self.prior_term + fsum(
            c.count_log_term * counts.get(c.name, 0.0) for c in self.components
        )


def _clamp(p: float) -> float:
    return min(max(p, PMF_EPSILON), 1.0 - PMF_EPSILON)


def conditional_pmf(det: DetectionParams, alpha: float, p1: float) -> ConditionalPmf:
    """Vote probabilities of a set whose Byzantine posterior is ``alpha``.

    The effective flip probability seen by the fusion side is
    ``alpha * p1``: a set member is Byzantine with probability ``alpha`` and
    then flips its direct bit with probability ``p1``.
    """
    ap = alpha * p1
    return ConditionalPmf(
        pi11=det.p_d * (1.0 - ap) + ap * (1.0 - det.p_d),
        pi10=det.p_f * (1.0 - ap) + ap * (1.0 - det.p_f),
    )


def group_vote_pmf(pmf: ConditionalPmf) -> ConditionalPmf:
    """Vote probabilities of a deduplicated group vote.

    A matched pair both voting one has conditional probability
    ``pi**2 / (pi**2 + (1-pi)**2)`` given that the pair matched; boundary
    inputs are handled as their limits.
    """

    def transform(pi: float) -> float:
        if pi in (0.0, 1.0):
            return pi
        num = pi * pi
        return num / (num + (1.0 - pi) * (1.0 - pi))

    return ConditionalPmf(pi11=transform(pmf.pi11), pi10=transform(pmf.pi10))


def llr_weight(pmf: ConditionalPmf) -> float:
    """Per-vote log-likelihood-ratio weight of a set.

    Raises :class:`InfiniteWeightError` on exact boundary probabilities; the
    caller is expected to clamp (see :data:`PMF_EPSILON`).
    """
    if pmf.pi11 in (0.0, 1.0) or pmf.pi10 in (0.0, 1.0):
        raise InfiniteWeightError(
            f"vote probabilities on the boundary: pi11={pmf.pi11}, pi10={pmf.pi10}"
        )
    return log(pmf.pi11 * (1.0 - pmf.pi10) / (pmf.pi10 * (1.0 - pmf.pi11)))


def _count_log_term(pmf: ConditionalPmf) -> float:
    return log((1.0 - pmf.pi10) / (1.0 - pmf.pi11))


def tas_posterior(atk: AttackParams) -> TasPosterior:
    """Two-set posteriors for the legacy equal-flip attack model.

    Requires ``p1 == p2``.  The published polynomial forms are evaluated
    alongside the event sums and any disagreement is logged; they are never
    returned.
    """
    if atk.p1 != atk.p2:
        raise ValueError("legacy two-set posterior requires p1 == p2")
    low, high, match = events.tas_posteriors(atk)
    _log_printed_mismatch("tas_alpha_low", as_printed.tas_alpha_low_printed(atk.alpha0, atk.p1), low, atk)
    _log_printed_mismatch("tas_alpha_high", as_printed.tas_alpha_high_printed(atk.alpha0, atk.p1), high, atk)
    return TasPosterior(alpha_low=low, alpha_high=high, p_status_match=match)


def _log_printed_mismatch(name: str, printed: float, reference: float | None, atk: AttackParams) -> None:
    if reference is None:
        if not math.isnan(printed):
            logger.warning(
                "published %s form yields %.12g at %s where the posterior is undefined",
                name, printed, atk)
    elif math.isnan(printed) or abs(printed - reference) > 1e-9:
        logger.warning(
            "published %s form disagrees with event sum at %s: %.12g vs %.12g",
            name, atk, printed, reference)


def intelligent_posterior(atk: AttackParams) -> TasPosterior:
    """Two-set posteriors under the general unequal-flip attack."""
    low, high, match = events.tas_posteriors(atk)
    return TasPosterior(alpha_low=low, alpha_high=high, p_status_match=match)


def eas_posterior(atk: AttackParams) -> EasPosterior:
    """Four-set posteriors and occupancies; zero-mass sets carry ``None``."""
    return EasPosterior(
        alphas=events.set_posteriors(atk),
        occupancy=events.set_occupancy(atk),
    )


def _component(name: str, per_group: bool, count: float, pmf: ConditionalPmf) -> SchemeComponent:
    clamped = ConditionalPmf(pi11=_clamp(pmf.pi11), pi10=_clamp(pmf.pi10))
    return SchemeComponent(
        name=name,
        per_group=per_group,
        expected_count=count,
        pmf=clamped,
        weight=llr_weight(clamped),
        count_log_term=_count_log_term(clamped),
    )


def _build_components(scheme: Scheme, det: DetectionParams, atk: AttackParams,
                      n_sensors: int) -> list[SchemeComponent]:
    p1 = atk.p1
    if scheme is Scheme.DIRECT:
        return [_component(COMPONENT_ALL, False, float(n_sensors),
                           conditional_pmf(det, atk.alpha0, p1))]

    if scheme in (Scheme.TAS, Scheme.TAS_INTELLIGENT):
        post = tas_posterior(atk) if scheme is Scheme.TAS else intelligent_posterior(atk)
        comps = []
        if post.alpha_low is not None and post.p_status_match > 0.0:
            comps.append(_component(COMPONENT_S_LOW, False,
                                    n_sensors * post.p_status_match,
                                    conditional_pmf(det, post.alpha_low, p1)))
        p_mismatch = 1.0 - post.p_status_match
        if post.alpha_high is not None and p_mismatch > 0.0:
            comps.append(_component(COMPONENT_S_HIGH, False,
                                    n_sensors * p_mismatch,
                                    conditional_pmf(det, post.alpha_high, p1)))
        return comps

    if scheme is Scheme.EAS:
        post = eas_posterior(atk)
        comps = []
        for label in EAS_SETS:
            alpha = post.alphas[label]
            if alpha is None:
                continue
            comps.append(_component(label.value, False,
                                    n_sensors * post.occupancy[label],
                                    conditional_pmf(det, alpha, p1)))
        return comps

    if scheme is Scheme.RAS:
        post = eas_posterior(atk)
        comps = []
        alpha1 = post.alphas[SetLabel.SS_LOW]
        if alpha1 is not None:
            match = events.pair_match_given_ss_low_mixed(det, atk)
            count = (n_sensors // 2) * match * post.occupancy[SetLabel.SS_LOW]
            if count > 0.0:
                pmf1 = conditional_pmf(det, alpha1, p1)
                comps.append(_component(COMPONENT_GROUP_VOTES, True, count,
                                        group_vote_pmf(pmf1)))
        for label in (SetLabel.S_LOW_HIGH, SetLabel.S_HIGH_LOW):
            alpha = post.alphas[label]
            if alpha is None:
                continue
            comps.append(_component(label.value, False,
                                    n_sensors * post.occupancy[label],
                                    conditional_pmf(det, alpha, p1)))
        return comps

    raise ValueError(f"unknown scheme: {scheme!r}")


def scheme_performance(scheme: Scheme, det: DetectionParams, atk: AttackParams,
                       n_sensors: int) -> SchemePerformance:
    """Full Gaussian performance characterization of one scheme.

    Expected set cardinalities are ``n * P(set)`` for per-sensor components
    and ``(n/2) * P(pair matched | both-low) * P(both-low pair)`` for the
    deduplicated group votes.  Sets with zero occupancy are dropped.  When
    every weight vanishes the statistic is deterministic and the error
    probability is returned as its decision-rule limit (``degenerate`` set).
    """
    if n_sensors < 2 or n_sensors % 2 != 0:
        raise ValueError("n_sensors must be even and at least 2")
    components = tuple(_build_components(scheme, det, atk, n_sensors))
    prior_term = log(det.prior0 / det.prior1)

    eta = prior_term + fsum(c.count_log_term * c.expected_count for c in components)
    mu0 = fsum(c.expected_count * c.pmf.pi10 * c.weight for c in components)
    mu1 = fsum(c.expected_count * c.pmf.pi11 * c.weight for c in components)
    var0 = fsum(c.expected_count * c.pmf.pi10 * (1.0 - c.pmf.pi10) * c.weight ** 2
                for c in components)
    var1 = fsum(c.expected_count * c.pmf.pi11 * (1.0 - c.pmf.pi11) * c.weight ** 2
                for c in components)

    degenerate = False
    if var0 > 0.0:
        gamma_f = (eta - mu0) / sqrt(var0)
    else:
        degenerate = True
        gamma_f = inf if eta > mu0 else -inf  # tie decides signal-present
    if var1 > 0.0:
        gamma_m = (mu1 - eta) / sqrt(var1)
    else:
        degenerate = True
        gamma_m = inf if mu1 >= eta else -inf

    p_e = det.prior0 * q_function(gamma_f) + det.prior1 * q_function(gamma_m)
    return SchemePerformance(
        scheme=scheme, n_sensors=n_sensors, prior_term=prior_term,
        components=components, eta=eta, mu0=mu0, mu1=mu1, var0=var0, var1=var1,
        gamma_f=gamma_f, gamma_m=gamma_m, p_e=p_e, degenerate=degenerate,
    )


def divergence_terms(pmf: ConditionalPmf) -> tuple[float, float, float, float]:
    """(D0, D1, g0, g1) for one set.

    ``D0``/``D1`` are the per-vote Kullback-Leibler divergences of the
    absent/present vote laws from each other, ``g0``/``g1`` the per-vote
    weighted variances.  They give an algebraically independent route to the
    Gaussian tail arguments.
    """
    w = llr_weight(pmf)
    d0 = (pmf.pi10 * log(pmf.pi10 / pmf.pi11)
          + (1.0 - pmf.pi10) * log((1.0 - pmf.pi10) / (1.0 - pmf.pi11)))
    d1 = (pmf.pi11 * log(pmf.pi11 / pmf.pi10)
          + (1.0 - pmf.pi11) * log((1.0 - pmf.pi11) / (1.0 - pmf.pi10)))
    g0 = pmf.pi10 * (1.0 - pmf.pi10) * w * w
    g1 = pmf.pi11 * (1.0 - pmf.pi11) * w * w
    return d0, d1, g0, g1


def gamma_args_via_divergence(perf: SchemePerformance,
                              det: DetectionParams) -> tuple[float, float]:
    """Second, divergence-based code path for the tail arguments.

    ``gamma_f = (log(prior0/prior1) + sum_e C_e D0_e) / sqrt(sum_e C_e g0_e)``
    and the mirrored expression (with the prior term negated) for
    ``gamma_m``.  Must agree with the moment-based arguments of
    :func:`scheme_performance` up to rounding.
    """
    prior_term = log(det.prior0 / det.prior1)
    num_f = prior_term
    num_m = -prior_term
    den_f = 0.0
    den_m = 0.0
    for c in perf.components:
        d0, d1, g0, g1 = divergence_terms(c.pmf)
        num_f += c.expected_count * d0
        num_m += c.expected_count * d1
        den_f += c.expected_count * g0
        den_m += c.expected_count * g1
    gamma_f = num_f / sqrt(den_f) if den_f > 0.0 else (inf if num_f > 0 else -inf)
    gamma_m = num_m / sqrt(den_m) if den_m > 0.0 else (inf if num_m >= 0 else -inf)
    return gamma_f, gamma_m


@dataclass(frozen=True)
class BlindingReport:
    is_blind: bool
    divergence: float  # D0 of the population-level vote laws


def blinding_condition(det: DetectionParams, atk: AttackParams) -> BlindingReport:
    """Detect the flip parameterization that makes votes uninformative.

    The population vote laws coincide exactly when
    ``alpha0 * p1 == 1/2``; at that point the per-vote divergence is zero
    and no fusion rule can beat the prior-only decision.
    """
    pmf = conditional_pmf(det, atk.alpha0, atk.p1)
    is_blind = pmf.pi11 == pmf.pi10
    if is_blind:
        return BlindingReport(is_blind=True, divergence=0.0)
    clamped = ConditionalPmf(pi11=_clamp(pmf.pi11), pi10=_clamp(pmf.pi10))
    d0, _, _, _ = divergence_terms(clamped)
    return BlindingReport(is_blind=False, divergence=d0)


def mismatch_ratio_F(det: DetectionParams, atk: AttackParams) -> float:
    """P(pair votes agree | both-low pair, at least one Byzantine member).

    Computed through the two textbook expansions: the vote-agreement
    probability of a both-low pair minus the honest-honest contribution,
    normalized by the probability that the pair is not honest-honest.
    Undefined (raises) when no Byzantine can occupy a both-low pair.
    """
    a0 = atk.alpha0
    occ = events.set_occupancy(atk)[SetLabel.SS_LOW]
    if occ <= 0.0:
        raise UndefinedPosteriorError("both-low set has zero probability")
    hh_share = (1.0 - a0) * (1.0 - a0) / occ
    denominator = 1.0 - hh_share
    if denominator <= 0.0:
        raise UndefinedPosteriorError(
            "no Byzantine member can occupy a both-low pair at these parameters")
    alpha1 = events.set_posteriors(atk)[SetLabel.SS_LOW]
    pmf1 = conditional_pmf(det, alpha1, atk.p1)
    match_set = (det.prior1 * (pmf1.pi11 ** 2 + (1.0 - pmf1.pi11) ** 2)
                 + det.prior0 * (pmf1.pi10 ** 2 + (1.0 - pmf1.pi10) ** 2))
    match_honest = (det.prior1 * (det.p_d ** 2 + (1.0 - det.p_d) ** 2)
                    + det.prior0 * (det.p_f ** 2 + (1.0 - det.p_f) ** 2))
    return (match_set - hh_share * match_honest) / denominator


def bhattacharyya_distance(det: DetectionParams, atk: AttackParams,
                           grouped: bool) -> float:
    """Per-sensor Bhattacharyya distance between the two vote laws.

    Ungrouped mode evaluates the population-level vote probabilities; grouped
    mode mixes the per-status-set laws with the status-match probability
    before taking the square roots.  Concavity of the mixed products in the
    effective flip probability makes the grouped distance at least the
    ungrouped one, with equality when relays are never flipped.
    """
    pmf_all = conditional_pmf(det, atk.alpha0, atk.p1)
    if not grouped:
        coeff = (sqrt(pmf_all.pi11 * pmf_all.pi10)
                 + sqrt((1.0 - pmf_all.pi11) * (1.0 - pmf_all.pi10)))
        return inf if coeff == 0.0 else -log(coeff)
    post = intelligent_posterior(atk)
    p_match = post.p_status_match
    ones_product = 0.0
    zeros_product = 0.0
    if post.alpha_low is not None and p_match > 0.0:
        low = conditional_pmf(det, post.alpha_low, atk.p1)
        ones_product += p_match * low.pi11 * low.pi10
        zeros_product += p_match * (1.0 - low.pi11) * (1.0 - low.pi10)
    if post.alpha_high is not None and p_match < 1.0:
        high = conditional_pmf(det, post.alpha_high, atk.p1)
        ones_product += (1.0 - p_match) * high.pi11 * high.pi10
        zeros_product += (1.0 - p_match) * (1.0 - high.pi11) * (1.0 - high.pi10)
    coeff = sqrt(ones_product) + sqrt(zeros_product)
    return inf if coeff == 0.0 else -log(coeff)


@dataclass(frozen=True)
class TransmittedBits:
    """Expected decision-payload bits per detection round."""

    group_votes: float      # one bit per matched both-low group
    low_high: float
    high_low: float
    ras_total: float
    ras_total_sensor_level: float  # alternative accounting: both bits of matched groups
    tas_total: float


def expected_transmitted_bits(det: DetectionParams, atk: AttackParams,
                              n_sensors: int) -> TransmittedBits:
    """Expected payload bits forwarded under the censoring scheme vs. 2N.

    The group-vote term is ``(n/2) * P(pair matched | both-low) *
    P(both-low pair)``, using the exact pair-match probability so that
    simulation means are reproduced to within Monte Carlo noise.
    """
    if n_sensors < 2 or n_sensors % 2 != 0:
        raise ValueError("n_sensors must be even and at least 2")
    occ = events.set_occupancy(atk)
    match = events.pair_match_given_ss_low_mixed(det, atk)
    group_votes = 0.0 if match is None else (n_sensors // 2) * match * occ[SetLabel.SS_LOW]
    low_high = n_sensors * occ[SetLabel.S_LOW_HIGH]
    high_low = n_sensors * occ[SetLabel.S_HIGH_LOW]
    total = group_votes + low_high + high_low
    return TransmittedBits(
        group_votes=group_votes,
        low_high=low_high,
        high_low=high_low,
        ras_total=total,
        ras_total_sensor_level=total + group_votes,
        tas_total=2.0 * n_sensors,
    )


def performance_row(perf: SchemePerformance, det: DetectionParams,
                    atk: AttackParams) -> dict[str, object]:
    """Flatten a performance record into one CSV-ready mapping."""
    row: dict[str, object] = {
        "scheme": perf.scheme.value,
        "n_sensors": perf.n_sensors,
        "alpha0": atk.alpha0, "p1": atk.p1, "p2": atk.p2,
        "p_d": det.p_d, "p_f": det.p_f,
        "prior0": det.prior0, "prior1": det.prior1,
        "eta": perf.eta, "mu0": perf.mu0, "mu1": perf.mu1,
        "var0": perf.var0, "var1": perf.var1,
        "gamma_f": perf.gamma_f, "gamma_m": perf.gamma_m,
        "p_e": perf.p_e, "degenerate": int(perf.degenerate),
    }
    counts = perf.expected_cardinalities
    weights = perf.weights
    for name in COMPONENT_NAMES:
        row[f"n_{name}"] = counts.get(name, "")
        row[f"w_{name}"] = weights.get(name, "")
    return row
