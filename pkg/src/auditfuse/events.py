"""Closed-form event algebra for a single two-sensor audit group.

Every quantity here is an exact sum over the independent flip indicators of
one group: a Byzantine sensor flips its direct copy and its partner-bound
copy independently, each with probability ``p1``, and flips the partner bit
it relays with probability ``p2``.  Status indicators depend only on those
flips, never on the local decisions, so all occupancy probabilities and
Byzantine posteriors below are hypothesis-free.

Conventions used throughout:

* ``q``: probability a Byzantine's two outgoing copies agree
  (``p1**2 + (1-p1)**2``).
* ``m``: probability a Byzantine partner's direct copy agrees with the
  relayed copy after a Byzantine relayer's flip
  (``q*(1-p2) + (1-q)*p2``).

Complement probabilities are computed from products of non-negative terms
rather than ``1 - x`` so that structurally impossible events come out as an
exact floating-point zero (e.g. the both-high set at ``p2 == 0`` with
``p1`` in ``{0, 1}``).
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import AttackParams, DetectionParams, SetLabel, EAS_SETS


def own_copies_agree(p1: float) -> float:
    """q: both outgoing copies of a Byzantine flipped, or neither."""
    return p1 * p1 + (1.0 - p1) * (1.0 - p1)


def own_copies_disagree(p1: float) -> float:
    return 2.0 * p1 * (1.0 - p1)


def relay_match_byz(p1: float, p2: float) -> float:
    """m: direct copy of a Byzantine partner matches its relayed copy
    when the relaying sensor is also Byzantine."""
    return own_copies_agree(p1) * (1.0 - p2) + own_copies_disagree(p1) * p2


def relay_mismatch_byz(p1: float, p2: float) -> float:
    return own_copies_agree(p1) * p2 + own_copies_disagree(p1) * (1.0 - p2)


@dataclass(frozen=True)
class StatusProbs:
    """Match/mismatch probabilities of one sensor's status indicator."""

    match_given_byz: float
    match_given_honest: float
    mismatch_given_byz: float
    mismatch_given_honest: float
    match: float
    mismatch: float


def status_probs(atk: AttackParams) -> StatusProbs:
    """Distribution of a sensor's status indicator by its own identity.

    A sensor's indicator reflects whether the *partner's* two copies agreed
    after this sensor's relaying, so conditioning is on the relayer identity
    while the partner identity is marginalized with weight ``alpha0``.
    """
    a0, p1, p2 = atk.alpha0, atk.p1, atk.p2
    q = own_copies_agree(p1)
    m = relay_match_byz(p1, p2)
    m_bar = relay_mismatch_byz(p1, p2)
    match_b = a0 * m + (1.0 - a0) * (1.0 - p2)
    match_h = a0 * q + (1.0 - a0)
    mismatch_b = a0 * m_bar + (1.0 - a0) * p2
    mismatch_h = a0 * own_copies_disagree(p1)
    return StatusProbs(
        match_given_byz=match_b,
        match_given_honest=match_h,
        mismatch_given_byz=mismatch_b,
        mismatch_given_honest=mismatch_h,
        match=a0 * match_b + (1.0 - a0) * match_h,
        mismatch=a0 * mismatch_b + (1.0 - a0) * mismatch_h,
    )


@dataclass(frozen=True)
class PairFactors:
    """P(pair status pattern | identities) for one four-set label.

    ``bb``/``bh``/``hb``/``hh`` condition on (own, partner) identities of the
    sensor carrying the label; ``bh`` means the labeled sensor is Byzantine
    and its partner honest.
    """

    bb: float
    bh: float
    hb: float
    hh: float


def pair_factors(p1: float, p2: float) -> dict[SetLabel, PairFactors]:
    """Joint status-pattern probabilities conditioned on pair identities.

    Given the identities, the two indicators are independent: each one is
    driven by a disjoint triple of flip indicators (the partner's two copy
    flips plus the labeled sensor's relay flip, and vice versa).
    """
    q = own_copies_agree(p1)
    q_bar = own_copies_disagree(p1)
    m = relay_match_byz(p1, p2)
    m_bar = relay_mismatch_byz(p1, p2)
    one_m_p2 = 1.0 - p2
    return {
        SetLabel.SS_LOW: PairFactors(
            bb=m * m, bh=q * one_m_p2, hb=q * one_m_p2, hh=1.0),
        SetLabel.S_LOW_HIGH: PairFactors(
            bb=m * m_bar, bh=q_bar * one_m_p2, hb=q * p2, hh=0.0),
        SetLabel.S_HIGH_LOW: PairFactors(
            bb=m_bar * m, bh=q * p2, hb=q_bar * one_m_p2, hh=0.0),
        SetLabel.SS_HIGH: PairFactors(
            bb=m_bar * m_bar, bh=q_bar * p2, hb=q_bar * p2, hh=0.0),
    }


def set_occupancy(atk: AttackParams) -> dict[SetLabel, float]:
    """P(a sensor carries each four-set label); sums to one."""
    a0 = atk.alpha0
    a2, ab, h2 = a0 * a0, a0 * (1.0 - a0), (1.0 - a0) * (1.0 - a0)
    factors = pair_factors(atk.p1, atk.p2)
    return {
        label: a2 * f.bb + ab * (f.bh + f.hb) + h2 * f.hh
        for label, f in factors.items()
    }


def set_posteriors(atk: AttackParams) -> dict[SetLabel, float | None]:
    """P(Byzantine | four-set label); ``None`` where the label has zero mass."""
    a0 = atk.alpha0
    a2, ab = a0 * a0, a0 * (1.0 - a0)
    factors = pair_factors(atk.p1, atk.p2)
    occupancy = set_occupancy(atk)
    out: dict[SetLabel, float | None] = {}
    for label in EAS_SETS:
        occ = occupancy[label]
        if occ == 0.0:
            out[label] = None
        else:
            f = factors[label]
            out[label] = (a2 * f.bb + ab * f.bh) / occ
    return out


def tas_posteriors(atk: AttackParams) -> tuple[float | None, float | None, float]:
    """(P(Byz | indicator 1), P(Byz | indicator 0), P(indicator 1)).

    Either posterior is ``None`` when its conditioning event has zero
    probability (e.g. the mismatch branch when nobody ever flips).
    """
    sp = status_probs(atk)
    a0 = atk.alpha0
    low = a0 * sp.match_given_byz / sp.match if sp.match > 0.0 else None
    high = a0 * sp.mismatch_given_byz / sp.mismatch if sp.mismatch > 0.0 else None
    return low, high, sp.match


def conditional_flip_prob(atk: AttackParams, label: SetLabel) -> float | None:
    """Exact P(a sensor's direct bit was flipped | its four-set label).

    Conditioning on the pair label skews the flip distribution: the partner's
    indicator is driven by the agreement of the labeled sensor's own two
    copies, which is correlated with the direct-copy flip.  Given the label
    and identities the relevant conditionals are

    * partner Byzantine: P(flip, copies agree) weighs the relay flip, giving
      ``p1 * (p1*(1-p2) + (1-p1)*p2) / m``;
    * partner honest: the copies must agree outright, giving ``p1**2 / q``.
    """
    a0, p1, p2 = atk.alpha0, atk.p1, atk.p2
    m = relay_match_byz(p1, p2)
    m_bar = relay_mismatch_byz(p1, p2)
    occ = set_occupancy(atk)[label]
    if occ == 0.0:
        return None
    a2, ab = a0 * a0, a0 * (1.0 - a0)
    one_m_p2 = 1.0 - p2
    # P(own direct-bit flip AND own-indicator part of the label | identities),
    # split by whether the label requires the partner's indicator to match.
    own_low = label in (SetLabel.SS_LOW, SetLabel.S_LOW_HIGH)
    partner_low = label in (SetLabel.SS_LOW, SetLabel.S_HIGH_LOW)
    # partner-indicator factor involves this sensor's copy flips:
    if partner_low:
        flip_bb = p1 * (p1 * one_m_p2 + (1.0 - p1) * p2)   # flip & relay outcome matches
        flip_bh = p1 * p1                                   # flip & copies agree
    else:
        flip_bb = p1 * (p1 * p2 + (1.0 - p1) * one_m_p2)
        flip_bh = p1 * (1.0 - p1)
    # own-indicator factor involves only the partner's copies and own relay flip:
    if own_low:
        own_bb, own_bh = m, one_m_p2
    else:
        own_bb, own_bh = m_bar, p2
    joint = a2 * flip_bb * own_bb + ab * flip_bh * own_bh
    return joint / occ


def pair_match_given_ss_low(det: DetectionParams, atk: AttackParams) -> tuple[float, float] | None:
    """Exact P(the two direct bits agree | both-low pair), per hypothesis.

    Returns ``(match_h0, match_h1)`` or ``None`` when the both-low set has
    zero mass.  Within a pair the direct bits agree when the local decisions
    agree and the flips cancel (or both differ); given the identities and the
    both-low event, the two flip conditionals are independent because they
    are driven by disjoint indicator triples.
    """
    a0, p1, p2 = atk.alpha0, atk.p1, atk.p2
    q = own_copies_agree(p1)
    m = relay_match_byz(p1, p2)
    a2, ab, h2 = a0 * a0, a0 * (1.0 - a0), (1.0 - a0) * (1.0 - a0)
    occ = set_occupancy(atk)[SetLabel.SS_LOW]
    if occ == 0.0:
        return None
    one_m_p2 = 1.0 - p2
    # Conditional flip probabilities of one sensor given identities + both-low.
    kappa_bb = p1 * (p1 * one_m_p2 + (1.0 - p1) * p2) / m if m > 0.0 else 0.0
    kappa_bh = p1 * p1 / q
    out = []
    for p_vote in (det.p_f, det.p_d):
        c = p_vote * p_vote + (1.0 - p_vote) * (1.0 - p_vote)  # local decisions agree
        s_bb = kappa_bb * kappa_bb + (1.0 - kappa_bb) * (1.0 - kappa_bb)
        s_bh = 1.0 - kappa_bh  # honest partner never flips
        num = (
            h2 * c
            + 2.0 * ab * q * one_m_p2 * (c * s_bh + (1.0 - c) * kappa_bh)
            + a2 * m * m * (c * s_bb + (1.0 - c) * (1.0 - s_bb))
        )
        out.append(num / occ)
    return out[0], out[1]


def pair_match_given_ss_low_mixed(det: DetectionParams, atk: AttackParams) -> float | None:
    """Prior-weighted version of :func:`pair_match_given_ss_low`."""
    per_hyp = pair_match_given_ss_low(det, atk)
    if per_hyp is None:
        return None
    return det.prior0 * per_hyp[0] + det.prior1 * per_hyp[1]
