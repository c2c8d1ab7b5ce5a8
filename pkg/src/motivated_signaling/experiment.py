"""Agent-based simulation of the two sender-receiver experiments.

Three modes:

* ``block1`` — senders pick one message per possible receiver prior (the
  11-point strategy method), receivers state a grid prior and rate both
  messages with the quadratic rule.
* ``block2`` — one message per question; the receiver's prior is never
  revealed, so senders integrate it out (party-conditional when the party
  is known).
* ``expt2``  — the computer-message variant: questions are anchored at the
  receiver's stated median, so a bias-free rating is exactly one half; the
  receiver picks "first/second message more likely true / equally likely"
  under a 100/55/0 rule, senders bet on one message under a 100/50/0 rule,
  and a second phase elicits willingness to pay for the receiver's party.

Receivers are *naive about incentives by construction*: their perceived
sender strategy comes from the shared game calibration (the incentivized
arm's rating weight) via the most-truthful consistent-strategy rule, never
from the matched sender's arm, and :func:`rate_message` ignores the
``sender_incentivized`` flag entirely.

Determinism: every random draw comes from a generator derived from
``(seed, stream key)``, so runs with the same config and seed are
byte-identical and trials are independent of iteration order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .config import ScenarioConfig
from .equilibrium import BneKind, enumerate_pure_bne
from .game_core import (
    POOL_HIGH,
    POOL_LOW,
    TRUTHFUL,
    MessageLabel,
    OffPathPolicy,
    RatingFamily,
    SenderStrategy,
)


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Independent deterministic stream for one (seed, key) pair."""
    return np.random.default_rng(np.random.SeedSequence(entropy=(seed, *key)))


class Direction(Enum):
    GREATER = "greater"
    LESS = "less"

    @property
    def opposite(self) -> "Direction":
        return Direction.LESS if self is Direction.GREATER else Direction.GREATER


class Party(Enum):
    DEM = "dem"
    REP = "rep"
    INDEPENDENT_HALF = "independent_half"  # expt2 only: no leaning either way


class Alignment(Enum):
    TRUE_ALIGNED = "true_aligned"
    FALSE_ALIGNED = "false_aligned"
    UNKNOWN = "unknown"
    NEUTRAL = "neutral"


class PairRating(Enum):
    """Receiver's comparative rating of the two computer messages.

    "First" is the greater-than message by convention.
    """

    FIRST_MORE_LIKELY = "greater_more_likely"
    SECOND_MORE_LIKELY = "less_more_likely"
    EQUALLY_LIKELY = "equally_likely"


@dataclass(frozen=True)
class Topic:
    """One question: its politics, truthful direction, and anchor number."""

    id: str
    political: bool
    pro_dem_direction: Direction | None
    true_direction: Direction
    target_or_median: float

    def __post_init__(self) -> None:
        if self.political and self.pro_dem_direction is None:
            raise ValueError(f"political topic {self.id!r} needs a pro-Dem direction")
        if not self.political and self.pro_dem_direction is not None:
            raise ValueError(f"neutral topic {self.id!r} must not carry a party direction")

    def pro_direction(self, party: Party) -> Direction | None:
        if not self.political or party is Party.INDEPENDENT_HALF:
            return None
        if party is Party.DEM:
            return self.pro_dem_direction
        return self.pro_dem_direction.opposite


def load_topics(path: str | Path) -> list[Topic]:
    """Read a topic fixture CSV (``builtin:primary`` / ``builtin:additional`` or a path)."""
    if isinstance(path, str) and path.startswith("builtin:"):
        name = path.split(":", 1)[1]
        ref = resources.files("motivated_signaling").joinpath(f"data/topics_{name}.csv")
        text = ref.read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    topics = []
    for row in csv.DictReader(text.splitlines()):
        topics.append(
            Topic(
                id=row["id"],
                political=row["political"] == "1",
                pro_dem_direction=Direction(row["pro_dem_direction"]) if row["pro_dem_direction"] else None,
                true_direction=Direction(row["true_direction"]),
                target_or_median=float(row["target_or_median"]),
            )
        )
    if not topics:
        raise ValueError(f"no topics found in {path}")
    return topics


@dataclass(frozen=True)
class ReceiverAgent:
    id: int
    party: Party
    bias: float
    prior_mean: float
    prior_sd: float
    stream_id: int

    def __post_init__(self) -> None:
        if not -2.0 < self.bias < 2.0:
            raise ValueError(f"receiver bias must be in (-2,2), got {self.bias}")


@dataclass(frozen=True)
class SenderAgent:
    id: int
    party: Party
    honesty_weight: float
    rating_weight: float  # exactly 0 in the unincentivized arm
    belief_bias: float
    expressive_weight: float = 0.0
    noise_rate: float = 0.0

    def __post_init__(self) -> None:
        if self.rating_weight < 0.0:
            raise ValueError("rating_weight must be >= 0")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError("noise_rate must be in [0,1]")
        if self.expressive_weight < 0.0:
            raise ValueError("expressive_weight must be >= 0")

    @property
    def incentivized(self) -> bool:
        return self.rating_weight > 0.0


@dataclass(frozen=True)
class TreatmentCell:
    incentivized: bool
    info_revealed: bool
    topic_political: bool
    alignment: Alignment

    def __post_init__(self) -> None:
        unknown = self.alignment is Alignment.UNKNOWN
        if unknown != (self.topic_political and not self.info_revealed):
            raise ValueError("alignment UNKNOWN iff party info withheld on a political topic")


@dataclass(frozen=True)
class SimWorld:
    """Shared calibration every agent reasons against.

    ``rating_weight`` here is the incentivized arm's weight; it drives the
    perceived-strategy rule for everyone (receiver naivete) while each
    sender's own utility uses her personal weight.
    """

    honesty_weight: float
    rating_weight: float
    bias_hat_receiver: float
    off_path: OffPathPolicy
    prior_mean: float
    prior_sd: float
    info_price_premium: float

    @classmethod
    def from_config(cls, cfg: ScenarioConfig) -> "SimWorld":
        return cls(
            honesty_weight=cfg.tau,
            rating_weight=cfg.gamma,
            bias_hat_receiver=cfg.lambda_hat_r,
            off_path=cfg.off_path_policy(),
            prior_mean=cfg.prior_mean,
            prior_sd=cfg.prior_sd,
            info_price_premium=cfg.info_price_premium,
        )


@dataclass(frozen=True)
class ScoreOutcome:
    points: float
    bonus_probability: float

    def __post_init__(self) -> None:
        if abs(self.bonus_probability - self.points / 100.0) > 1e-12:
            raise ValueError("bonus_probability must equal points/100")


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    mode: str
    phase: str  # "message" or "demand"
    sender_id: int
    receiver_id: int | None
    topic_id: str
    political: bool
    incentivized: bool
    info_revealed: bool
    alignment: Alignment
    own_party_alignment: Alignment
    sender_party: Party
    receiver_party: Party | None
    true_direction: Direction
    receiver_prior_true: float | None
    messages: tuple[Direction, ...]
    false_share: float | None
    rating_greater: float | None = None
    rating_less: float | None = None
    pair_response: PairRating | None = None
    sender_points: float | None = None
    receiver_points: float | None = None
    purchased: bool | None = None
    info_point_gain: float | None = None


@dataclass(frozen=True)
class EffectEstimate:
    """A named difference in means, in percentage points, with a cluster-bootstrap CI."""

    contrast: str
    estimate: float
    ci_lo: float
    ci_hi: float
    n_clusters: int
    n_obs: int

    def __post_init__(self) -> None:
        if not self.ci_lo <= self.estimate <= self.ci_hi:
            raise ValueError("CI must bracket the estimate")


# ---------------------------------------------------------------------------
# Treatment derivation, priors and ratings


def derive_alignment(topic: Topic, receiver_party: Party | None, info_revealed: bool) -> Alignment:
    """Party-truth alignment of one matched pair, as the sender sees it."""
    if not topic.political:
        return Alignment.NEUTRAL
    if not info_revealed or receiver_party is None:
        return Alignment.UNKNOWN
    pro = topic.pro_direction(receiver_party)
    if pro is None:  # independent receiver: no motivated direction
        return Alignment.UNKNOWN
    return Alignment.FALSE_ALIGNED if pro != topic.true_direction else Alignment.TRUE_ALIGNED


def _truncated_normal(rng: np.random.Generator, mean: float, sd: float, lo: float, hi: float) -> float:
    if sd <= 0.0:
        return min(max(mean, lo), hi)
    for _ in range(1000):
        x = float(rng.normal(mean, sd))
        if lo <= x <= hi:
            return x
    return min(max(mean, lo), hi)


def snap_to_grid(p: float) -> float:
    """Nearest multiple of 0.1 (halves round up)."""
    return min(math.floor(p * 10.0 + 0.5), 10) / 10.0


def receiver_prior(agent: ReceiverAgent, topic: Topic, rng: np.random.Generator) -> float:
    """Stated grid prior that the topic's *true* direction is correct.

    Political topics draw the agent's pro-party probability from a
    truncated normal and convert; neutral topics (and partyless agents)
    draw symmetrically around one half.
    """
    pro = topic.pro_direction(agent.party)
    if pro is None:
        return snap_to_grid(_truncated_normal(rng, 0.5, agent.prior_sd, 0.0, 1.0))
    p_pro = snap_to_grid(_truncated_normal(rng, agent.prior_mean, agent.prior_sd, 0.0, 1.0))
    return p_pro if pro == topic.true_direction else round(1.0 - p_pro, 10)


def select_perceived_strategy(prior_pro: float, world: SimWorld) -> SenderStrategy:
    """Sender strategy the receiver best-responds to, in the pro-party frame.

    The most-truthful strategy that is consistent at the receiver's
    believed bias and the shared rating weight: separating first, then
    pooling on the anti-party message, then pooling on the pro-party one.
    """
    kinds = {
        b.kind
        for b in enumerate_pure_bne(
            prior_pro,
            world.honesty_weight,
            world.rating_weight,
            world.bias_hat_receiver,
            world.off_path,
        )
    }
    if BneKind.SEPARATING in kinds:
        return TRUTHFUL
    if BneKind.POOL_L in kinds:
        return POOL_LOW
    if BneKind.POOL_H in kinds:
        return POOL_HIGH
    return TRUTHFUL


@dataclass(frozen=True)
class _Frame:
    """Pro-party orientation of one (receiver-party, topic) context.

    MSG_H is the pro-party direction (the greater-than direction when no
    party applies); the model prior is the probability that MSG_H's
    direction is the true one.
    """

    pro: Direction | None
    msg_h_direction: Direction

    @classmethod
    def build(cls, topic: Topic, party: Party | None) -> "_Frame":
        pro = topic.pro_direction(party) if party is not None else None
        return cls(pro, pro if pro is not None else Direction.GREATER)

    def model_prior(self, prior_on_true: float, topic: Topic) -> float:
        return prior_on_true if self.msg_h_direction == topic.true_direction else 1.0 - prior_on_true

    def model_message(self, direction: Direction) -> MessageLabel:
        return MessageLabel.MSG_H if direction == self.msg_h_direction else MessageLabel.MSG_L


def rate_message(
    receiver: ReceiverAgent,
    topic: Topic,
    msg_direction: Direction,
    sender_incentivized: bool,
    perceived_strategy: SenderStrategy,
    *,
    prior_on_true: float,
) -> float:
    """The receiver's truthfulness rating for one message direction.

    Bias enters with a positive sign for the pro-party direction and is
    zero when the topic carries no motive for the receiver's party. The
    ``sender_incentivized`` flag is accepted but deliberately ignored:
    ratings are invariant to the matched sender's incentive arm.
    """
    del sender_incentivized  # receiver naivete by construction
    frame = _Frame.build(topic, receiver.party)
    bias = receiver.bias if frame.pro is not None else 0.0
    family = RatingFamily(
        perceived_strategy, frame.model_prior(prior_on_true, topic), OffPathPolicy.full_punishment()
    )
    return family.rate(frame.model_message(msg_direction), bias)


def _expected_ratings_by_direction(
    topic: Topic,
    party: Party | None,
    prior_on_true: float,
    belief_bias: float,
    world: SimWorld,
) -> dict[Direction, float]:
    """Ratings the sender expects for each direction, at her believed bias.

    An unknown party averages the two partisan frames (matching is
    balanced by design); the believed bias is zero when the frame carries
    no motive.
    """
    parties = [party] if party is not None else [Party.DEM, Party.REP]
    totals = {d: 0.0 for d in Direction}
    for p in parties:
        frame = _Frame.build(topic, p)
        prior_pro = frame.model_prior(prior_on_true, topic)
        perceived = select_perceived_strategy(prior_pro, world)
        family = RatingFamily(perceived, prior_pro, world.off_path)
        bias = belief_bias if frame.pro is not None else 0.0
        for d in Direction:
            totals[d] += family.rate(frame.model_message(d), bias)
    return {d: v / len(parties) for d, v in totals.items()}


def _pick_direction(
    sender: SenderAgent,
    topic: Topic,
    expected_ratings: dict[Direction, float],
) -> Direction:
    """Utility-maximizing direction; exact ties go to the truthful one."""
    own_pro = topic.pro_direction(sender.party)

    def utility(d: Direction) -> float:
        u = sender.rating_weight * expected_ratings[d]
        if d == topic.true_direction:
            u += sender.honesty_weight
        if own_pro is not None and d == own_pro:
            u += sender.expressive_weight
        return u

    truth = topic.true_direction
    lie = truth.opposite
    return truth if utility(truth) >= utility(lie) else lie


def _maybe_noise(direction: Direction, noise_rate: float, rng: np.random.Generator) -> Direction:
    # a noisy choice replaces the intended message with a uniform one
    if noise_rate > 0.0 and rng.random() < noise_rate:
        return Direction.GREATER if rng.random() < 0.5 else Direction.LESS
    return direction


PRIOR_GRID = tuple(round(0.1 * k, 1) for k in range(11))


def strategy_method_choices(
    sender: SenderAgent,
    topic: Topic,
    receiver_party: Party | None,
    world: SimWorld,
    rng: np.random.Generator,
) -> tuple[Direction, ...]:
    """One message per grid prior-on-true (11 choices), noise applied per choice."""
    choices = []
    for p in PRIOR_GRID:
        ratings = _expected_ratings_by_direction(topic, receiver_party, p, sender.belief_bias, world)
        choices.append(_maybe_noise(_pick_direction(sender, topic, ratings), sender.noise_rate, rng))
    return tuple(choices)


def _prior_grid_distribution(mean: float, sd: float) -> dict[float, float]:
    """Exact distribution of a truncated-normal draw snapped to the 0.1 grid."""
    if sd <= 0.0:
        return {snap_to_grid(min(max(mean, 0.0), 1.0)): 1.0}

    def cdf(x: float) -> float:
        return 0.5 * (1.0 + math.erf((x - mean) / (sd * math.sqrt(2.0))))

    z = cdf(1.0) - cdf(0.0)
    weights = {}
    for g in PRIOR_GRID:
        lo = max(g - 0.05, 0.0)
        hi = min(g + 0.05, 1.0)
        weights[g] = (cdf(hi) - cdf(lo)) / z
    total = sum(weights.values())
    return {g: w / total for g, w in weights.items()}


def choose_message_block2(
    sender: SenderAgent,
    topic: Topic,
    receiver_party: Party | None,
    world: SimWorld,
    rng: np.random.Generator,
) -> Direction:
    """Single choice with the receiver's prior integrated out.

    The expectation runs over the stated-prior distribution (party-
    conditional pro-party framing when the party is known, the equal
    two-party mixture otherwise).
    """
    parties = [receiver_party] if receiver_party is not None else [Party.DEM, Party.REP]
    totals = {d: 0.0 for d in Direction}
    for p in parties:
        frame = _Frame.build(topic, p)
        dist = _prior_grid_distribution(
            world.prior_mean if frame.pro is not None else 0.5, world.prior_sd
        )
        for prior_pro, weight in dist.items():
            perceived = select_perceived_strategy(prior_pro, world)
            family = RatingFamily(perceived, prior_pro, world.off_path)
            bias = sender.belief_bias if frame.pro is not None else 0.0
            for d in Direction:
                totals[d] += weight * family.rate(frame.model_message(d), bias)
    ratings = {d: v / len(parties) for d, v in totals.items()}
    return _maybe_noise(_pick_direction(sender, topic, ratings), sender.noise_rate, rng)


# ---------------------------------------------------------------------------
# Median-anchored mode: pair ratings, betting, demand for information


def subjective_pro_probability(bias: float) -> float:
    """Belief that the pro-party message is true when a bias-free one is 1/2."""
    return min(max(0.5 + 0.5 * bias, 0.0), 1.0)


def rate_pair_expt2(receiver: ReceiverAgent, topic: Topic) -> PairRating:
    """Comparative rating of the greater/less message pair at the stated median.

    The report maximizes expected points under the 100/55/0 rule, so
    "equally likely" is optimal exactly when the subjective probability
    sits in [0.45, 0.55].
    """
    pro = topic.pro_direction(receiver.party)
    p_pro = subjective_pro_probability(receiver.bias) if pro is not None else 0.5
    if 0.45 <= p_pro <= 0.55 or pro is None:
        return PairRating.EQUALLY_LIKELY
    more = pro if p_pro > 0.55 else pro.opposite
    return PairRating.FIRST_MORE_LIKELY if more is Direction.GREATER else PairRating.SECOND_MORE_LIKELY


def score_quadratic(report: float, outcome: bool) -> float:
    """Quadratic-rule points for a probability report against a binary outcome."""
    if not 0.0 <= report <= 1.0:
        raise ValueError(f"report must be in [0,1], got {report}")
    return 100.0 * (1.0 - (1.0 - report) ** 2) if outcome else 100.0 * (1.0 - report**2)


def score_linear(guess: float, answer: float) -> float:
    """Linear-rule points for a numeric guess, floored at zero."""
    return max(100.0 - abs(guess - answer), 0.0)


def score_rating_rule(choice: PairRating, true_direction: Direction) -> float:
    """100 for the correct directional pick, 0 for the wrong one, 55 for "equally"."""
    if choice is PairRating.EQUALLY_LIKELY:
        return 55.0
    picked_greater = choice is PairRating.FIRST_MORE_LIKELY
    return 100.0 if picked_greater == (true_direction is Direction.GREATER) else 0.0


def binarized_bonus(points: float) -> float:
    """Probability of winning the fixed bonus: points/100."""
    if not 0.0 <= points <= 100.0:
        raise ValueError(f"points must be in [0,100], got {points}")
    return points / 100.0


def score_outcome(points: float) -> ScoreOutcome:
    return ScoreOutcome(points, binarized_bonus(points))


def _sender_points_expt2(chosen: Direction, response: PairRating) -> float:
    if response is PairRating.EQUALLY_LIKELY:
        return 50.0
    favored = Direction.GREATER if response is PairRating.FIRST_MORE_LIKELY else Direction.LESS
    return 100.0 if chosen == favored else 0.0


def _predicted_response(topic: Topic, party: Party, belief_bias: float) -> PairRating:
    """The pair rating a sender expects from a receiver of the given party."""
    pro = topic.pro_direction(party)
    p_pro = subjective_pro_probability(belief_bias) if pro is not None else 0.5
    if p_pro > 0.55:
        more = pro
    elif p_pro < 0.45:
        more = pro.opposite
    else:
        return PairRating.EQUALLY_LIKELY
    return PairRating.FIRST_MORE_LIKELY if more is Direction.GREATER else PairRating.SECOND_MORE_LIKELY


def info_gain_from_ratings(rating_pro_party: float, rating_anti_party: float) -> float:
    """Point gain from conditioning on party under an equal two-party mix.

    With the party known the sender always earns the pro-party rating;
    without it, either fixed message meets one party's pro side and the
    other's anti side.
    """
    with_info = 100.0 * rating_pro_party
    without = 100.0 * (rating_pro_party + rating_anti_party) / 2.0
    return with_info - without


def value_of_party_info(
    sender: SenderAgent,
    topic: Topic,
    receiver_party_mix: dict[Party, float] | None,
    world: SimWorld,
) -> tuple[float, bool]:
    """Expected point gain from conditioning on the receiver's party, and
    whether paying the configured premium for certain conditioning beats
    conditioning only half the time."""
    mix = receiver_party_mix or {Party.DEM: 0.5, Party.REP: 0.5}
    if not topic.political:
        return 0.0, False
    points: dict[Party, dict[Direction, float]] = {}
    for party in mix:
        response = _predicted_response(topic, party, sender.belief_bias)
        points[party] = {d: _sender_points_expt2(d, response) for d in Direction}
    with_info = sum(w * max(points[p].values()) for p, w in mix.items())
    without = max(sum(w * points[p][d] for p, w in mix.items()) for d in Direction)
    gain = with_info - without
    return gain, 0.5 * gain > world.info_price_premium


# ---------------------------------------------------------------------------
# Population and the full runs


def _build_populations(cfg: ScenarioConfig, seed: int) -> tuple[list[SenderAgent], list[ReceiverAgent]]:
    rng = rng_for(seed, 0)
    n_inc = cfg.n_senders // 2
    order = rng.permutation(cfg.n_senders) if cfg.n_senders else np.array([], dtype=int)
    senders = []
    for i in range(cfg.n_senders):
        party = _party_for_index(i, cfg.swap_parties)
        belief = _truncated_normal(rng_for(seed, 0, 1, i), cfg.lambda_hat_s, cfg.lambda_hat_s_sd, 0.0, 1.999)
        senders.append(
            SenderAgent(
                id=i,
                party=party,
                honesty_weight=cfg.tau,
                rating_weight=cfg.gamma if order[i] < n_inc else 0.0,
                belief_bias=belief,
                expressive_weight=cfg.expressive_weight,
                noise_rate=cfg.noise_rate,
            )
        )
    receivers = []
    for j in range(cfg.n_receivers):
        bias = _truncated_normal(rng_for(seed, 0, 2, j), cfg.lambda_true, cfg.bias_sd, -1.999, 1.999)
        receivers.append(
            ReceiverAgent(
                id=j,
                party=_party_for_index(j, cfg.swap_parties),
                bias=bias,
                prior_mean=cfg.prior_mean,
                prior_sd=cfg.prior_sd,
                stream_id=j,
            )
        )
    return senders, receivers


def _party_for_index(i: int, swap: bool) -> Party:
    base = Party.DEM if i % 2 == 0 else Party.REP
    if swap:
        return Party.REP if base is Party.DEM else Party.DEM
    return base


def resolve_topics_file(cfg: ScenarioConfig) -> str:
    if cfg.topics_file:
        return cfg.topics_file
    return "builtin:additional" if cfg.mode == "expt2" else "builtin:primary"


def run_experiment(cfg: ScenarioConfig, seed: int | None = None) -> list[TrialRecord]:
    """Simulate every trial of one experiment run; pure in (config, seed)."""
    if seed is None:
        seed = cfg.seed
    if seed is None:
        raise ValueError("a seed is required (config `seed` key or explicit argument)")
    topics = load_topics(resolve_topics_file(cfg))
    senders, receivers = _build_populations(cfg, seed)
    world = SimWorld.from_config(cfg)
    records: list[TrialRecord] = []
    trial_id = 0
    for s_idx, sender in enumerate(senders):
        for t_idx, topic in enumerate(topics):
            trial_rng = rng_for(seed, 1, s_idx, t_idx)
            receiver = receivers[int(trial_rng.integers(len(receivers)))]
            info_revealed = bool(trial_rng.random() < 0.5)
            if cfg.mode == "expt2":
                records.append(
                    _run_expt2_message_trial(
                        trial_id, sender, receiver, topic, info_revealed, world, trial_rng
                    )
                )
            else:
                prior_rng = rng_for(seed, 2, receiver.id, t_idx)
                stated = receiver_prior(receiver, topic, prior_rng)
                records.append(
                    _run_primary_trial(
                        trial_id, cfg.mode, sender, receiver, topic, stated, info_revealed, world, trial_rng
                    )
                )
            trial_id += 1
    if cfg.mode == "expt2":
        for s_idx, sender in enumerate(senders):
            for t_idx, topic in enumerate(topics):
                demand_rng = rng_for(seed, 3, s_idx, t_idx)
                records.append(_run_demand_trial(trial_id, sender, topic, world, demand_rng))
                trial_id += 1
    return records


def _own_party_alignment(topic: Topic, party: Party) -> Alignment:
    if not topic.political:
        return Alignment.NEUTRAL
    pro = topic.pro_direction(party)
    if pro is None:
        return Alignment.UNKNOWN
    return Alignment.FALSE_ALIGNED if pro != topic.true_direction else Alignment.TRUE_ALIGNED


def _run_primary_trial(
    trial_id: int,
    mode: str,
    sender: SenderAgent,
    receiver: ReceiverAgent,
    topic: Topic,
    stated_prior: float,
    info_revealed: bool,
    world: SimWorld,
    rng: np.random.Generator,
) -> TrialRecord:
    party_info = receiver.party if info_revealed else None
    if mode == "block1":
        messages = strategy_method_choices(sender, topic, party_info, world, rng)
        matched = messages[int(round(stated_prior * 10))]
    else:
        matched = choose_message_block2(sender, topic, party_info, world, rng)
        messages = (matched,)

    # the receiver rates both possible messages at his stated prior
    frame = _Frame.build(topic, receiver.party)
    perceived = select_perceived_strategy(frame.model_prior(stated_prior, topic), world)
    ratings = {
        d: rate_message(receiver, topic, d, sender.incentivized, perceived, prior_on_true=stated_prior)
        for d in Direction
    }
    matched_truthful = matched == topic.true_direction
    sender_points = 100.0 * ratings[matched]
    receiver_points = score_quadratic(ratings[matched], matched_truthful)
    return TrialRecord(
        trial_id=trial_id,
        mode=mode,
        phase="message",
        sender_id=sender.id,
        receiver_id=receiver.id,
        topic_id=topic.id,
        political=topic.political,
        incentivized=sender.incentivized,
        info_revealed=info_revealed,
        alignment=derive_alignment(topic, receiver.party, info_revealed),
        own_party_alignment=_own_party_alignment(topic, sender.party),
        sender_party=sender.party,
        receiver_party=receiver.party,
        true_direction=topic.true_direction,
        receiver_prior_true=stated_prior,
        messages=messages,
        false_share=sum(m != topic.true_direction for m in messages) / len(messages),
        rating_greater=ratings[Direction.GREATER],
        rating_less=ratings[Direction.LESS],
        sender_points=sender_points,
        receiver_points=receiver_points,
    )


def _run_expt2_message_trial(
    trial_id: int,
    sender: SenderAgent,
    receiver: ReceiverAgent,
    topic: Topic,
    info_revealed: bool,
    world: SimWorld,
    rng: np.random.Generator,
) -> TrialRecord:
    party_info = receiver.party if info_revealed else None
    parties = [party_info] if party_info is not None else [Party.DEM, Party.REP]
    expected_points = {
        d: sum(_sender_points_expt2(d, _predicted_response(topic, p, sender.belief_bias)) for p in parties)
        / len(parties)
        for d in Direction
    }
    # betting utility: points rescaled to [0,1] play the role of the rating
    chosen = _maybe_noise(
        _pick_direction(sender, topic, {d: v / 100.0 for d, v in expected_points.items()}),
        sender.noise_rate,
        rng,
    )
    response = rate_pair_expt2(receiver, topic)
    return TrialRecord(
        trial_id=trial_id,
        mode="expt2",
        phase="message",
        sender_id=sender.id,
        receiver_id=receiver.id,
        topic_id=topic.id,
        political=topic.political,
        incentivized=sender.incentivized,
        info_revealed=info_revealed,
        alignment=derive_alignment(topic, receiver.party, info_revealed),
        own_party_alignment=_own_party_alignment(topic, sender.party),
        sender_party=sender.party,
        receiver_party=receiver.party,
        true_direction=topic.true_direction,
        receiver_prior_true=0.5,  # anchored at the stated median
        messages=(chosen,),
        false_share=float(chosen != topic.true_direction),
        pair_response=response,
        sender_points=_sender_points_expt2(chosen, response),
        receiver_points=score_rating_rule(response, topic.true_direction),
    )


def _run_demand_trial(
    trial_id: int,
    sender: SenderAgent,
    topic: Topic,
    world: SimWorld,
    rng: np.random.Generator,
) -> TrialRecord:
    gain, purchase = value_of_party_info(sender, topic, None, world)
    if sender.noise_rate > 0.0 and rng.random() < sender.noise_rate:
        purchase = bool(rng.random() < 0.5)
    return TrialRecord(
        trial_id=trial_id,
        mode="expt2",
        phase="demand",
        sender_id=sender.id,
        receiver_id=None,
        topic_id=topic.id,
        political=topic.political,
        incentivized=True,  # everyone faces rating incentives in these rounds
        info_revealed=False,
        alignment=Alignment.UNKNOWN if topic.political else Alignment.NEUTRAL,
        own_party_alignment=_own_party_alignment(topic, sender.party),
        sender_party=sender.party,
        receiver_party=None,
        true_direction=topic.true_direction,
        receiver_prior_true=None,
        messages=(),
        false_share=None,
        purchased=purchase,
        info_point_gain=gain,
    )


# ---------------------------------------------------------------------------
# Effects


CONTRASTS = (
    "party_false_vs_true",
    "party_false_vs_noinfo",
    "political_vs_neutral",
    "incentivized_vs_not",
    "own_party_false",
    "info_purchase_gap",
)


class EmptyCellError(Exception):
    def __init__(self, cell: str):
        self.cell = cell
        super().__init__(f"contrast cell {cell!r} has no observations")


def _message_obs(records: Sequence[TrialRecord]) -> list[tuple[TrialRecord, int, int]]:
    """(record, n_false, n_choices) per message-phase record."""
    out = []
    for r in records:
        if r.phase != "message":
            continue
        n = len(r.messages)
        out.append((r, sum(m != r.true_direction for m in r.messages), n))
    return out


def _cell_selectors(contrast: str):
    if contrast == "party_false_vs_true":
        return (
            "party_false_aligned",
            lambda r: r.political and r.alignment is Alignment.FALSE_ALIGNED,
            "party_true_aligned",
            lambda r: r.political and r.alignment is Alignment.TRUE_ALIGNED,
        )
    if contrast == "party_false_vs_noinfo":
        return (
            "party_false_aligned",
            lambda r: r.political and r.alignment is Alignment.FALSE_ALIGNED,
            "party_unknown",
            lambda r: r.political and r.alignment is Alignment.UNKNOWN,
        )
    if contrast == "political_vs_neutral":
        return (
            "political",
            lambda r: r.political,
            "neutral",
            lambda r: not r.political,
        )
    if contrast == "incentivized_vs_not":
        return (
            "incentivized",
            lambda r: r.incentivized,
            "unincentivized",
            lambda r: not r.incentivized,
        )
    if contrast == "own_party_false":
        return (
            "own_party_false_aligned",
            lambda r: r.political and r.own_party_alignment is Alignment.FALSE_ALIGNED,
            "own_party_true_aligned",
            lambda r: r.political and r.own_party_alignment is Alignment.TRUE_ALIGNED,
        )
    raise ValueError(f"unknown contrast {contrast!r}; choose from {CONTRASTS}")


def aggregate_effects(
    records: Sequence[TrialRecord],
    contrast: str,
    n_bootstrap: int = 1000,
    seed: int = 0,
) -> EffectEstimate:
    """Difference in means (percentage points) with a sender-clustered
    percentile-bootstrap confidence interval.

    Message contrasts compare false-message shares over individual choices
    (each strategy-method entry counts once); ``info_purchase_gap``
    compares purchase rates on demand-phase records.
    """
    if contrast == "info_purchase_gap":
        rows = [r for r in records if r.phase == "demand"]
        cell_a, in_a = "political_demand", lambda r: r.political
        cell_b, in_b = "neutral_demand", lambda r: not r.political
        data = [(r, int(bool(r.purchased)), 1) for r in rows]
    else:
        cell_a, in_a, cell_b, in_b = _cell_selectors(contrast)
        data = _message_obs(records)

    senders = sorted({r.sender_id for r, _, _ in data})
    index = {s: i for i, s in enumerate(senders)}
    k = len(senders)
    s_a = np.zeros(k)
    n_a = np.zeros(k)
    s_b = np.zeros(k)
    n_b = np.zeros(k)
    for r, n_false, n in data:
        i = index[r.sender_id]
        if in_a(r):
            s_a[i] += n_false
            n_a[i] += n
        elif in_b(r):
            s_b[i] += n_false
            n_b[i] += n
    if n_a.sum() == 0:
        raise EmptyCellError(cell_a)
    if n_b.sum() == 0:
        raise EmptyCellError(cell_b)

    estimate = 100.0 * (s_a.sum() / n_a.sum() - s_b.sum() / n_b.sum())
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, 4)))
    draws = rng.integers(0, k, size=(n_bootstrap, k))
    ra_n = n_a[draws].sum(axis=1)
    rb_n = n_b[draws].sum(axis=1)
    valid = (ra_n > 0) & (rb_n > 0)
    ests = 100.0 * (
        s_a[draws].sum(axis=1)[valid] / ra_n[valid] - s_b[draws].sum(axis=1)[valid] / rb_n[valid]
    )
    if ests.size:
        ci_lo, ci_hi = np.percentile(ests, [2.5, 97.5])
    else:
        ci_lo = ci_hi = estimate
    return EffectEstimate(
        contrast=contrast,
        estimate=estimate,
        ci_lo=min(float(ci_lo), estimate),
        ci_hi=max(float(ci_hi), estimate),
        n_clusters=k,
        n_obs=int(n_a.sum() + n_b.sum()),
    )


# ---------------------------------------------------------------------------
# Trial CSV (fixed column order; floats rendered via str())


TRIAL_CSV_COLUMNS = (
    "trial_id", "mode", "phase", "sender_id", "receiver_id", "topic_id",
    "political", "incentivized", "info_revealed", "alignment",
    "own_party_alignment", "sender_party", "receiver_party",
    "true_direction", "receiver_prior_true",
    *(f"m{k}" for k in range(11)),
    "false_share", "rating_greater", "rating_less", "pair_response",
    "sender_points", "receiver_points", "purchased", "info_point_gain",
)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, Enum):
        return value.value
    return str(value)


def write_trials_csv(records: Sequence[TrialRecord], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRIAL_CSV_COLUMNS)
    for r in records:
        msgs = list(r.messages) + [None] * (11 - len(r.messages))
        writer.writerow(
            [
                _cell(r.trial_id), _cell(r.mode), _cell(r.phase), _cell(r.sender_id),
                _cell(r.receiver_id), _cell(r.topic_id), _cell(r.political),
                _cell(r.incentivized), _cell(r.info_revealed), _cell(r.alignment),
                _cell(r.own_party_alignment), _cell(r.sender_party), _cell(r.receiver_party),
                _cell(r.true_direction), _cell(r.receiver_prior_true),
                *(_cell(m) for m in msgs),
                _cell(r.false_share), _cell(r.rating_greater), _cell(r.rating_less),
                _cell(r.pair_response), _cell(r.sender_points), _cell(r.receiver_points),
                _cell(r.purchased), _cell(r.info_point_gain),
            ]
        )
