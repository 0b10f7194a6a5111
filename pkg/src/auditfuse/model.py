"""Domain types shared by every other module.

The network under study pairs sensors into groups of two.  Each sensor sends
its binary decision to the fusion side over two paths: directly, and relayed
through its group partner (the relayed copy is the *audit bit*).  A match and
mismatch detector (MMSD) compares the two copies of each sensor's decision and
assigns a binary *status indicator* to the partner that did the relaying.
Compromised (Byzantine) sensors may flip their own outgoing bits with
probability ``p1`` and the partner bit they relay with probability ``p2``.

Nothing in this module computes probabilities; it only defines the immutable
value objects, the set labels derived from status indicators, and the
configuration validation rules.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Mapping


class Scheme(str, Enum):
    """Fusion schemes understood by the analytic engine and the simulator."""

    DIRECT = "direct"
    TAS = "tas"                        # legacy two-set audit scheme, assumes p1 == p2
    TAS_INTELLIGENT = "tas_intelligent"  # two-set audit scheme, general (p1, p2)
    EAS = "eas"                        # four-set (enhanced) audit scheme
    RAS = "ras"                        # censoring + group-vote (reduced) audit scheme


class IdentityMode(str, Enum):
    IID_BERNOULLI = "iid_bernoulli"
    FIXED_COUNT = "fixed_count"


class ThresholdMode(str, Enum):
    EXPECTED = "expected"
    REALIZED = "realized"


class TasLabel(Enum):
    """Two-set partition: a sensor's own status indicator only."""

    S_LOW = "s_low"    # status indicator 1: relayed copy matched
    S_HIGH = "s_high"  # status indicator 0: relayed copy mismatched


class SetLabel(Enum):
    """Four-set partition from both status indicators of a pair.

    The first half of the name is the sensor's own suspicion level, the
    second half is its partner's: ``S_LOW_HIGH`` means the sensor's own
    indicator is 1 while the partner's is 0.
    """

    SS_LOW = "ss_low"
    S_LOW_HIGH = "s_low_high"
    S_HIGH_LOW = "s_high_low"
    SS_HIGH = "ss_high"

    @classmethod
    def from_status(cls, d_own: int, d_partner: int) -> "SetLabel":
        if d_own and d_partner:
            return cls.SS_LOW
        if d_own and not d_partner:
            return cls.S_LOW_HIGH
        if not d_own and d_partner:
            return cls.S_HIGH_LOW
        return cls.SS_HIGH

    @property
    def tas_label(self) -> TasLabel:
        """Collapse to the two-set partition (own indicator only)."""
        if self in (SetLabel.SS_LOW, SetLabel.S_LOW_HIGH):
            return TasLabel.S_LOW
        return TasLabel.S_HIGH


EAS_SETS = (SetLabel.SS_LOW, SetLabel.S_LOW_HIGH, SetLabel.S_HIGH_LOW, SetLabel.SS_HIGH)


@dataclass(frozen=True)
class DetectionParams:
    """Per-sensor decision quality and hypothesis priors.

    ``p_d`` is the probability a sensor's local decision is 1 when the signal
    is present, ``p_f`` the same probability when it is absent.  Local
    decisions are modeled directly as Bernoulli draws with these parameters;
    no observation model sits underneath.
    """

    p_d: float
    p_f: float
    prior0: float = 0.5
    prior1: float = 0.5


@dataclass(frozen=True)
class AttackParams:
    """Byzantine population fraction and flip probabilities.

    ``alpha0`` is the probability that any given sensor is Byzantine.  A
    Byzantine flips each of its own outgoing copies (direct bit, partner-bound
    bit) independently with probability ``p1`` and flips the partner bit it
    relays with probability ``p2``.  The legacy attack model is the special
    case ``p1 == p2``; it is representable but not enforced.
    """

    alpha0: float
    p1: float
    p2: float


@dataclass(frozen=True)
class NetworkConfig:
    n_sensors: int
    n_clusters: int = 1
    identity_mode: IdentityMode = IdentityMode.IID_BERNOULLI
    threshold_mode: ThresholdMode = ThresholdMode.EXPECTED
    seed: int = 0


@dataclass(frozen=True)
class SensorState:
    """One sensor's bits within a group transcript.

    ``z_relay`` is the partner's bit as *this* sensor delivered it.  An honest
    sensor has ``v == u == w`` and relays the partner bit unchanged.
    """

    byzantine: bool
    v: int
    u: int
    w: int
    z_relay: int


@dataclass(frozen=True)
class GroupTranscript:
    """Transcript of one two-sensor group, with derived status indicators."""

    id_a: int
    id_b: int
    a: SensorState
    b: SensorState

    @property
    def d_a(self) -> int:
        # a's indicator: did b's direct bit survive a's relaying?
        return int(self.b.u == self.a.z_relay)

    @property
    def d_b(self) -> int:
        return int(self.a.u == self.b.z_relay)

    @property
    def label_a(self) -> SetLabel:
        return SetLabel.from_status(self.d_a, self.d_b)

    @property
    def label_b(self) -> SetLabel:
        return SetLabel.from_status(self.d_b, self.d_a)

    @property
    def matched(self) -> bool:
        return self.a.u == self.b.u


class ConfigError(ValueError):
    """Raised when a configuration violates an invariant.

    ``violations`` holds one message per violated rule, each prefixed with
    the offending field name.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def _check_probability(violations: list[str], name: str, value: Any) -> None:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        violations.append(f"{name}: must be a number, got {value!r}")
    elif not 0.0 <= float(value) <= 1.0:
        violations.append(f"{name}: must lie in [0, 1], got {value}")


def validate(config: NetworkConfig, det: DetectionParams, atk: AttackParams) -> None:
    """Check every invariant, raising ``ConfigError`` with the full list.

    All violations are collected before raising so a bad config is reported
    in one round trip.
    """
    violations: list[str] = []

    for name in ("p_d", "p_f", "prior0", "prior1"):
        _check_probability(violations, name, getattr(det, name))
    if isinstance(det.p_d, (int, float)) and isinstance(det.p_f, (int, float)):
        if not det.p_f < det.p_d:
            violations.append("p_f: p_f < p_d required (informative sensors)")
    if abs(det.prior0 + det.prior1 - 1.0) > 1e-12:
        violations.append("prior0/prior1: priors must sum to 1")

    for name in ("alpha0", "p1", "p2"):
        _check_probability(violations, name, getattr(atk, name))

    if not isinstance(config.n_sensors, int) or config.n_sensors < 2:
        violations.append(f"n_sensors: must be an integer >= 2, got {config.n_sensors!r}")
    elif config.n_sensors % 2 != 0:
        violations.append("n_sensors: n_sensors must be even")
    if not isinstance(config.n_clusters, int) or config.n_clusters < 1:
        violations.append(f"n_clusters: must be an integer >= 1, got {config.n_clusters!r}")
    elif isinstance(config.n_sensors, int) and config.n_sensors % (2 * config.n_clusters) != 0:
        violations.append("n_clusters: n_sensors must be divisible by 2 * n_clusters")
    if not isinstance(config.identity_mode, IdentityMode):
        violations.append(f"identity_mode: unknown mode {config.identity_mode!r}")
    if not isinstance(config.threshold_mode, ThresholdMode):
        violations.append(f"threshold_mode: unknown mode {config.threshold_mode!r}")
    if not isinstance(config.seed, int) or isinstance(config.seed, bool):
        violations.append(f"seed: must be an integer, got {config.seed!r}")

    if violations:
        raise ConfigError(violations)


_CONFIG_KEYS = {
    "n_sensors", "n_clusters", "identity_mode", "threshold_mode", "seed",
    "p_d", "p_f", "prior0", "prior1",
    "alpha0", "p1", "p2",
}
_REQUIRED_KEYS = {"n_sensors", "p_d", "p_f", "alpha0", "p1", "p2"}


def config_from_mapping(doc: Mapping[str, Any]) -> tuple[NetworkConfig, DetectionParams, AttackParams]:
    """Build and validate the three parameter objects from a flat mapping."""
    unknown = sorted(set(doc) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError([f"{k}: unknown configuration key" for k in unknown])
    missing = sorted(_REQUIRED_KEYS - set(doc))
    if missing:
        raise ConfigError([f"{k}: required configuration key missing" for k in missing])

    violations: list[str] = []
    identity_mode = doc.get("identity_mode", IdentityMode.IID_BERNOULLI)
    threshold_mode = doc.get("threshold_mode", ThresholdMode.EXPECTED)
    try:
        identity_mode = IdentityMode(identity_mode)
    except ValueError:
        violations.append(f"identity_mode: unknown mode {identity_mode!r}")
        identity_mode = IdentityMode.IID_BERNOULLI
    try:
        threshold_mode = ThresholdMode(threshold_mode)
    except ValueError:
        violations.append(f"threshold_mode: unknown mode {threshold_mode!r}")
        threshold_mode = ThresholdMode.EXPECTED

    config = NetworkConfig(
        n_sensors=doc["n_sensors"],
        n_clusters=doc.get("n_clusters", 1),
        identity_mode=identity_mode,
        threshold_mode=threshold_mode,
        seed=doc.get("seed", 0),
    )
    det = DetectionParams(
        p_d=doc["p_d"], p_f=doc["p_f"],
        prior0=doc.get("prior0", 0.5), prior1=doc.get("prior1", 0.5),
    )
    atk = AttackParams(alpha0=doc["alpha0"], p1=doc["p1"], p2=doc["p2"])

    try:
        validate(config, det, atk)
    except ConfigError as err:
        raise ConfigError(violations + err.violations) from None
    if violations:
        raise ConfigError(violations)
    return config, det, atk


def load_config(path: str | Path) -> tuple[NetworkConfig, DetectionParams, AttackParams]:
    """Read a JSON configuration document.  Unknown keys are an error."""
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    if not isinstance(doc, dict):
        raise ConfigError(["<root>: configuration document must be a JSON object"])
    return config_from_mapping(doc)
