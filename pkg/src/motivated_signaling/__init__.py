"""Solver and experiment simulator for a binary sender-receiver rating game with motivated receivers."""

__version__ = "0.1.0"

from .game_core import (
    BeliefHierarchy,
    GameParams,
    MessageLabel,
    OffPathMessageError,
    OffPathPolicy,
    RatingFamily,
    ReceiverStrategy,
    SenderStrategy,
    StateLabel,
    bayes_posterior,
    motivated_rating,
    receiver_expected_utility,
    sender_best_response,
    sender_expected_utility,
)

__all__ = [
    "__version__",
    "BeliefHierarchy",
    "GameParams",
    "MessageLabel",
    "OffPathMessageError",
    "OffPathPolicy",
    "RatingFamily",
    "ReceiverStrategy",
    "SenderStrategy",
    "StateLabel",
    "bayes_posterior",
    "motivated_rating",
    "receiver_expected_utility",
    "sender_best_response",
    "sender_expected_utility",
]
