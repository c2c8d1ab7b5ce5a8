"""Primitives of the binary sender-receiver rating game.

A sender observes a binary state (high/low) and sends one of two messages;
a receiver then rates the probability that the message is truthful. The
receiver may be a *motivated* reasoner: his optimal rating is the Bayesian
posterior shifted by half his bias toward the message he prefers to
believe, clamped to [0,1]. The sender values both truth-telling
(``honesty_weight``) and the rating itself (``rating_weight``).

Everything in this module is a pure function of its arguments; the
equilibrium, sweep and simulation layers compose these primitives.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class StateLabel(Enum):
    """The two states of the world; HIGH is the receiver-preferred state."""

    HIGH = "high"
    LOW = "low"


class MessageLabel(Enum):
    """The two messages; MSG_H claims the state is high and is the one the receiver would like to believe."""

    MSG_H = "msg_h"
    MSG_L = "msg_l"


def truthful_message(state: StateLabel) -> MessageLabel:
    return MessageLabel.MSG_H if state is StateLabel.HIGH else MessageLabel.MSG_L


def message_matches_state(msg: MessageLabel, state: StateLabel) -> bool:
    return msg is truthful_message(state)


class OffPathMessageError(Exception):
    """Raised when a message has zero probability under the assumed strategy.

    Bayesian updating is undefined there; callers substitute an
    :class:`OffPathPolicy` rating instead.
    """


@dataclass(frozen=True)
class OffPathPolicy:
    """Ratings assigned to messages that have zero probability in equilibrium.

    ``full_punishment`` (both ratings 0) is the default everywhere; custom
    ratings support exploring alternative off-path beliefs.
    """

    rating_msgH_offpath: float = 0.0
    rating_msgL_offpath: float = 0.0

    def __post_init__(self) -> None:
        for name in ("rating_msgH_offpath", "rating_msgL_offpath"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {v}")

    @classmethod
    def full_punishment(cls) -> "OffPathPolicy":
        return cls(0.0, 0.0)

    @classmethod
    def custom(cls, rating_msgH_offpath: float, rating_msgL_offpath: float) -> "OffPathPolicy":
        return cls(rating_msgH_offpath, rating_msgL_offpath)

    @property
    def is_full_punishment(self) -> bool:
        return self.rating_msgH_offpath == 0.0 and self.rating_msgL_offpath == 0.0

    def rating_for(self, msg: MessageLabel) -> float:
        return self.rating_msgH_offpath if msg is MessageLabel.MSG_H else self.rating_msgL_offpath


@dataclass(frozen=True)
class BeliefHierarchy:
    """Point beliefs about the receiver's bias at every order.

    First-order beliefs may differ between the two players; from order two
    on, both sides' beliefs collapse to the receiver's first-order belief
    (the receiver projects his belief onto the sender and the sender knows
    it).
    """

    order_1_sender: float
    order_1_receiver: float

    def order_k(self, player: str, k: int) -> float:
        if k < 1:
            raise ValueError("belief order must be >= 1")
        if k == 1:
            if player == "sender":
                return self.order_1_sender
            if player == "receiver":
                return self.order_1_receiver
            raise ValueError(f"unknown player {player!r}")
        return self.order_1_receiver


@dataclass(frozen=True)
class GameParams:
    """All scalar parameters of one game instance.

    ``bias_true`` is the receiver's actual bias; ``bias_hat_receiver`` and
    ``bias_hat_sender`` are the two players' first-order beliefs about it.
    The sender is assumed to believe the receiver is at least as biased as
    the receiver believes himself to be (equality permitted).
    """

    prior: float
    honesty_weight: float
    rating_weight: float
    bias_true: float
    bias_hat_receiver: float
    bias_hat_sender: float
    off_path: OffPathPolicy = OffPathPolicy.full_punishment()

    def __post_init__(self) -> None:
        if not 0.0 <= self.prior <= 1.0:
            raise ValueError(f"prior must be in [0,1], got {self.prior}")
        if not self.honesty_weight > 0.0:
            raise ValueError(f"honesty_weight must be > 0, got {self.honesty_weight}")
        if not self.rating_weight >= 0.0:
            raise ValueError(f"rating_weight must be >= 0, got {self.rating_weight}")
        if not -2.0 < self.bias_true < 2.0:
            raise ValueError(f"bias_true must be in (-2,2), got {self.bias_true}")
        for name in ("bias_hat_receiver", "bias_hat_sender"):
            v = getattr(self, name)
            if not 0.0 <= v < 2.0:
                raise ValueError(f"{name} must be in [0,2), got {v}")
        if self.bias_hat_sender < self.bias_hat_receiver:
            raise ValueError(
                "bias_hat_sender must be >= bias_hat_receiver "
                f"(got {self.bias_hat_sender} < {self.bias_hat_receiver})"
            )

    @property
    def belief_hierarchy(self) -> BeliefHierarchy:
        return BeliefHierarchy(self.bias_hat_sender, self.bias_hat_receiver)


@dataclass(frozen=True)
class SenderStrategy:
    """Behavioral sender strategy: probability of sending MSG_H in each state."""

    prob_msgH_given_high: float
    prob_msgH_given_low: float

    def __post_init__(self) -> None:
        for name in ("prob_msgH_given_high", "prob_msgH_given_low"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {v}")

    @property
    def likelihood_msgH_given_high(self) -> float:
        return self.prob_msgH_given_high

    @property
    def likelihood_msgL_given_low(self) -> float:
        return 1.0 - self.prob_msgH_given_low

    def prob_of_message(self, msg: MessageLabel, state: StateLabel) -> float:
        p = self.prob_msgH_given_high if state is StateLabel.HIGH else self.prob_msgH_given_low
        return p if msg is MessageLabel.MSG_H else 1.0 - p

    def is_pure(self) -> bool:
        return self.prob_msgH_given_high in (0.0, 1.0) and self.prob_msgH_given_low in (0.0, 1.0)


# The four pure sender rules.
TRUTHFUL = SenderStrategy(1.0, 0.0)
POOL_HIGH = SenderStrategy(1.0, 1.0)
POOL_LOW = SenderStrategy(0.0, 0.0)
INVERTED = SenderStrategy(0.0, 1.0)


@dataclass(frozen=True)
class ReceiverStrategy:
    """Receiver ratings (probability the message is truthful), one per message."""

    rating_msgH: float
    rating_msgL: float

    def __post_init__(self) -> None:
        for name in ("rating_msgH", "rating_msgL"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {v}")

    def rating_for(self, msg: MessageLabel) -> float:
        return self.rating_msgH if msg is MessageLabel.MSG_H else self.rating_msgL


def bayes_posterior(prior: float, strategy: SenderStrategy, msg: MessageLabel) -> float:
    """Probability that ``msg`` is truthful, by Bayes' rule under ``strategy``.

    Raises :class:`OffPathMessageError` when the message has zero
    probability under (prior, strategy).
    """
    p_h = strategy.likelihood_msgH_given_high
    p_l = strategy.likelihood_msgL_given_low
    if msg is MessageLabel.MSG_H:
        num = prior * p_h
        den = prior * p_h + (1.0 - prior) * (1.0 - p_l)
    else:
        num = (1.0 - prior) * p_l
        den = prior * (1.0 - p_h) + (1.0 - prior) * p_l
    if den <= 0.0:
        raise OffPathMessageError(f"{msg} has zero probability under the assumed strategy")
    return num / den


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def motivated_rating(prior: float, strategy: SenderStrategy, bias: float, msg: MessageLabel) -> float:
    """Optimal rating of a motivated receiver with the given bias.

    The Bayesian posterior shifted by +bias/2 for MSG_H and -bias/2 for
    MSG_L. Clamped to [0,1] on both sides; the clamp away from the shift
    direction only binds for negative bias, where it is the maximizer of
    the shifted quadratic objective.
    """
    posterior = bayes_posterior(prior, strategy, msg)
    shift = 0.5 * bias if msg is MessageLabel.MSG_H else -0.5 * bias
    return _clamp01(posterior + shift)


def receiver_expected_utility(rating: float, p_truthful: float, bias: float, msg: MessageLabel) -> float:
    """Expected receiver utility of stating ``rating`` for a message truthful w.p. ``p_truthful``.

    Accuracy term is quadratic; the bias term rewards ratings that lean
    toward the preferred belief (high ratings of MSG_H, low ratings of
    MSG_L).
    """
    a = rating
    accuracy = p_truthful * (1.0 - (1.0 - a) ** 2) + (1.0 - p_truthful) * (1.0 - a * a)
    lean = a if msg is MessageLabel.MSG_H else 1.0 - a
    return accuracy + bias * lean


def sender_expected_utility(
    msg: MessageLabel,
    state: StateLabel,
    expected_ratings: ReceiverStrategy,
    honesty_weight: float,
    rating_weight: float,
) -> float:
    """rating_weight * rating(msg) + honesty_weight if the message matches the state."""
    u = rating_weight * expected_ratings.rating_for(msg)
    if message_matches_state(msg, state):
        u += honesty_weight
    return u


@dataclass(frozen=True)
class RatingFamily:
    """Receiver rating rule as a function of message and bias.

    Built from a prior and the sender strategy the receiver is assumed to
    best-respond to. Evaluating at bias 0 recovers the Bayesian posterior;
    messages that are off-path under the perceived strategy return the
    off-path policy rating at every bias. Realized play evaluates at the
    receiver's true bias, the sender's expectations at her belief about it,
    and perceived-sender consistency at the receiver's own belief.
    """

    perceived_sender: SenderStrategy
    prior: float
    off_path: OffPathPolicy = OffPathPolicy.full_punishment()

    def is_on_path(self, msg: MessageLabel) -> bool:
        try:
            bayes_posterior(self.prior, self.perceived_sender, msg)
        except OffPathMessageError:
            return False
        return True

    def rate(self, msg: MessageLabel, bias: float) -> float:
        try:
            return motivated_rating(self.prior, self.perceived_sender, bias, msg)
        except OffPathMessageError:
            return self.off_path.rating_for(msg)

    def ratings_at(self, bias: float) -> ReceiverStrategy:
        return ReceiverStrategy(self.rate(MessageLabel.MSG_H, bias), self.rate(MessageLabel.MSG_L, bias))

    # allow use as a plain evaluator callable
    def __call__(self, msg: MessageLabel, bias: float) -> float:
        return self.rate(msg, bias)


def sender_best_response(
    state: StateLabel,
    family: RatingFamily,
    bias_eval: float,
    honesty_weight: float,
    rating_weight: float,
) -> MessageLabel:
    """Message maximizing sender utility against ``family`` evaluated at ``bias_eval``.

    Exact ties break toward the truthful message.
    """
    ratings = family.ratings_at(bias_eval)
    truth = truthful_message(state)
    lie = MessageLabel.MSG_L if truth is MessageLabel.MSG_H else MessageLabel.MSG_H
    u_truth = sender_expected_utility(truth, state, ratings, honesty_weight, rating_weight)
    u_lie = sender_expected_utility(lie, state, ratings, honesty_weight, rating_weight)
    return truth if u_truth >= u_lie else lie
