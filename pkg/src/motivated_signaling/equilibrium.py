"""Equilibrium enumeration and brute-force certification.

Two solution concepts:

* **BNE** of the game where the receiver's bias is common knowledge
  (three pure kinds: separating, pool-high, pool-low, plus two partially
  characterized mixed profiles).
* **Motivated equilibrium (ME)**: the receiver best-responds, at his true
  bias, to a hypothetical sender who is consistent with the receiver's own
  belief about that bias, while the actual sender best-responds under her
  (typically larger) belief. Six pure profile families exist, indexed as
  rows 1-6:

  ====  =================  ================
  row   perceived sender   actual sender
  ====  =================  ================
  1     truthful           truthful
  2     pool on MSG_H      pool on MSG_H
  3     pool on MSG_L      pool on MSG_L
  4     truthful           pool on MSG_H
  5     pool on MSG_L      truthful
  6     pool on MSG_L      pool on MSG_H
  ====  =================  ================

Existence conditions compare the honesty/rating weight ratio with rating
gaps; all slacks here are reported in utility units (the inequality
multiplied through by the rating weight) so that a zero rating weight
needs no special-casing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .game_core import (
    POOL_HIGH,
    POOL_LOW,
    TRUTHFUL,
    GameParams,
    MessageLabel,
    OffPathMessageError,
    OffPathPolicy,
    RatingFamily,
    ReceiverStrategy,
    SenderStrategy,
    StateLabel,
    bayes_posterior,
    receiver_expected_utility,
    sender_best_response,
    truthful_message,
)

# Absolute tolerance for "condition satisfied" checks; slack is always
# surfaced so boundary cases stay auditable.
SLACK_TOL = 1e-9


class BneKind(Enum):
    SEPARATING = "separating"
    POOL_H = "pool_high"
    POOL_L = "pool_low"


@dataclass(frozen=True)
class PureBne:
    """A pure-strategy BNE candidate that satisfied its existence condition."""

    kind: BneKind
    receiver: ReceiverStrategy
    sender: SenderStrategy
    condition_slack: float

    def __post_init__(self) -> None:
        if not self.sender.is_pure():
            raise ValueError("PureBne sender strategy must be pure")
        if self.condition_slack < -SLACK_TOL:
            raise ValueError("PureBne condition violated")


class MixedKind(Enum):
    # named for the state in which the sender is truthful with probability one
    MIX_TRUTHFUL_HIGH_STATE = "mix_truthful_high_state"
    MIX_TRUTHFUL_LOW_STATE = "mix_truthful_low_state"


@dataclass(frozen=True)
class MixedBne:
    """Partially-mixed profile from the common-knowledge (bias 0) game.

    The receiver ratings stated here make the sender's two message
    utilities exactly equal in :attr:`indifference_state` (the identity
    ``honesty + rating_weight*(1 - ratio) == rating_weight`` holds for any
    parameters), while in the other state the truthful message wins
    strictly by twice the honesty weight. These profiles are reference
    points for the brute-force verifier rather than certified equilibria;
    :func:`verify_profile` reports their deviation gain honestly.
    """

    kind: MixedKind
    mix_prob: float
    receiver: ReceiverStrategy

    def __post_init__(self) -> None:
        if not 0.0 <= self.mix_prob <= 1.0:
            raise ValueError(f"mix_prob must be in [0,1], got {self.mix_prob}")

    @property
    def sender(self) -> SenderStrategy:
        if self.kind is MixedKind.MIX_TRUTHFUL_HIGH_STATE:
            # truthful in HIGH; sends MSG_L in LOW with probability mix_prob
            return SenderStrategy(1.0, 1.0 - self.mix_prob)
        # truthful in LOW; sends MSG_H in HIGH with probability mix_prob
        return SenderStrategy(self.mix_prob, 0.0)

    @property
    def indifference_state(self) -> StateLabel:
        return (
            StateLabel.HIGH
            if self.kind is MixedKind.MIX_TRUTHFUL_HIGH_STATE
            else StateLabel.LOW
        )


@dataclass(frozen=True)
class Condition:
    """One existence inequality with its slack (>= 0 means satisfied)."""

    expr: str
    slack: float


@dataclass(frozen=True)
class MotivatedEquilibrium:
    row: int
    receiver: ReceiverStrategy
    perceived_sender: SenderStrategy
    actual_sender: SenderStrategy
    conditions: tuple[Condition, ...]

    def __post_init__(self) -> None:
        if self.row not in range(1, 7):
            raise ValueError(f"row must be 1..6, got {self.row}")
        differ = self.perceived_sender != self.actual_sender
        if self.row <= 3 and differ:
            raise ValueError("rows 1-3 require perceived == actual sender")
        if self.row >= 4 and not differ:
            raise ValueError("rows 4-6 require perceived != actual sender")
        if any(c.slack < -SLACK_TOL for c in self.conditions):
            raise ValueError("a listed condition is violated")

    @property
    def min_slack(self) -> float:
        return min(c.slack for c in self.conditions)


@dataclass(frozen=True)
class VerificationReport:
    """Result of brute-force best-response search on a candidate profile."""

    clause_i_gain: float
    clause_ii_gain: float
    clause_iii_gain: float
    grid_step: float
    tolerance: float
    passed: bool

    @property
    def max_gain(self) -> float:
        return max(self.clause_i_gain, self.clause_ii_gain, self.clause_iii_gain)


# (perceived, actual) sender rules for the six rows.
ME_ROW_STRATEGIES: dict[int, tuple[SenderStrategy, SenderStrategy]] = {
    1: (TRUTHFUL, TRUTHFUL),
    2: (POOL_HIGH, POOL_HIGH),
    3: (POOL_LOW, POOL_LOW),
    4: (TRUTHFUL, POOL_HIGH),
    5: (POOL_LOW, TRUTHFUL),
    6: (POOL_LOW, POOL_HIGH),
}

BNE_KIND_SENDER: dict[BneKind, SenderStrategy] = {
    BneKind.SEPARATING: TRUTHFUL,
    BneKind.POOL_H: POOL_HIGH,
    BneKind.POOL_L: POOL_LOW,
}


def realized_receiver(
    perceived: SenderStrategy, prior: float, bias: float, off_path: OffPathPolicy
) -> ReceiverStrategy:
    """Receiver ratings at ``bias`` given the perceived sender; off-path ratings from policy."""
    return RatingFamily(perceived, prior, off_path).ratings_at(bias)


def _me_conditions(
    row: int,
    prior: float,
    tau: float,
    gamma: float,
    bias_hat_r: float,
    bias_hat_s: float,
    off_path: OffPathPolicy,
) -> tuple[Condition, ...]:
    """Existence inequalities for one row, slacks in utility units (scaled by gamma)."""
    off_h = off_path.rating_msgH_offpath
    off_l = off_path.rating_msgL_offpath
    if row == 1:
        # The actual sender's no-deviation condition binds (her believed bias
        # is the larger one); the perceived-sender condition is implied.
        return (Condition("tau/gamma >= bias_hat_sender/2", tau - gamma * bias_hat_s / 2.0),)
    if row == 2:
        cap = min(prior + bias_hat_r / 2.0, 1.0) - off_l
        return (Condition("tau/gamma <= min{prior + bias_hat_receiver/2, 1} - offpath(MSG_L)", gamma * cap - tau),)
    if row == 3:
        cap = max(1.0 - prior - bias_hat_s / 2.0, 0.0) - off_h
        return (Condition("tau/gamma <= max{1 - prior - bias_hat_sender/2, 0} - offpath(MSG_H)", gamma * cap - tau),)
    if row == 4:
        return (
            Condition("tau/gamma >= bias_hat_receiver/2", tau - gamma * bias_hat_r / 2.0),
            Condition("tau/gamma <= bias_hat_sender/2", gamma * bias_hat_s / 2.0 - tau),
        )
    b_r = max(1.0 - prior - bias_hat_r / 2.0, 0.0) - off_h
    b_s = max(1.0 - prior - bias_hat_s / 2.0, 0.0) - off_h
    if row == 5:
        return (
            Condition("tau/gamma <= max{1 - prior - bias_hat_receiver/2, 0} - offpath(MSG_H)", gamma * b_r - tau),
            Condition("tau/gamma >= max{1 - prior - bias_hat_sender/2, 0} - offpath(MSG_H)", tau - gamma * b_s),
            Condition("tau/gamma >= -(max{1 - prior - bias_hat_sender/2, 0} - offpath(MSG_H))", tau + gamma * b_s),
        )
    if row == 6:
        return (
            Condition("tau/gamma <= max{1 - prior - bias_hat_receiver/2, 0} - offpath(MSG_H)", gamma * b_r - tau),
            Condition("tau/gamma <= -(max{1 - prior - bias_hat_sender/2, 0} - offpath(MSG_H))", -gamma * b_s - tau),
        )
    raise ValueError(f"row must be 1..6, got {row}")


def enumerate_me(params: GameParams) -> list[MotivatedEquilibrium]:
    """All rows 1-6 whose existence conditions hold at ``params``.

    Boundary slacks of exactly zero count as satisfied; callers can filter
    on the reported slack. A rating weight of zero yields row 1 only.
    """
    out: list[MotivatedEquilibrium] = []
    for row in range(1, 7):
        conds = _me_conditions(
            row,
            params.prior,
            params.honesty_weight,
            params.rating_weight,
            params.bias_hat_receiver,
            params.bias_hat_sender,
            params.off_path,
        )
        if min(c.slack for c in conds) < -SLACK_TOL:
            continue
        perceived, actual = ME_ROW_STRATEGIES[row]
        receiver = realized_receiver(perceived, params.prior, params.bias_true, params.off_path)
        out.append(MotivatedEquilibrium(row, receiver, perceived, actual, conds))
    return out


def enumerate_pure_bne(
    prior: float,
    honesty_weight: float,
    rating_weight: float,
    bias: float,
    off_path: OffPathPolicy,
) -> list[PureBne]:
    """Pure BNE of the game where ``bias`` is common knowledge.

    Separating exists iff the honesty/rating ratio weakly exceeds the
    rating gap; each pooling kind exists iff the ratio is weakly below the
    on-path versus off-path rating advantage.
    """
    tau, gamma = honesty_weight, rating_weight
    out: list[PureBne] = []

    sep = realized_receiver(TRUTHFUL, prior, bias, off_path)
    slack = tau - gamma * abs(sep.rating_msgH - sep.rating_msgL)
    if slack >= -SLACK_TOL:
        out.append(PureBne(BneKind.SEPARATING, sep, TRUTHFUL, slack))

    pool_h = realized_receiver(POOL_HIGH, prior, bias, off_path)
    slack = gamma * (pool_h.rating_msgH - pool_h.rating_msgL) - tau
    if slack >= -SLACK_TOL:
        out.append(PureBne(BneKind.POOL_H, pool_h, POOL_HIGH, slack))

    pool_l = realized_receiver(POOL_LOW, prior, bias, off_path)
    slack = gamma * (pool_l.rating_msgL - pool_l.rating_msgH) - tau
    if slack >= -SLACK_TOL:
        out.append(PureBne(BneKind.POOL_L, pool_l, POOL_LOW, slack))

    return out


class UnsupportedRegimeError(Exception):
    """Raised when mixed profiles are requested outside the bias-0 base game."""


def mixed_bne(
    prior: float, honesty_weight: float, rating_weight: float, bias: float = 0.0
) -> list[MixedBne]:
    """The two partially-mixed profiles of the bias-0 base game.

    Emits the high-state-truthful variant when the honesty/rating ratio is
    at most 1 - prior and the low-state-truthful variant when it is at most
    prior. A rating weight of zero makes both conditions unsatisfiable and
    returns an empty list.
    """
    if bias != 0.0:
        raise UnsupportedRegimeError("mixed profiles are only characterized for bias 0")
    if rating_weight <= 0.0:
        return []
    ratio = honesty_weight / rating_weight
    out: list[MixedBne] = []
    if ratio <= (1.0 - prior) + SLACK_TOL and (1.0 - prior) > 0.0 and ratio < 1.0:
        q = (1.0 - prior - ratio) / ((1.0 - prior) * (1.0 - ratio))
        out.append(
            MixedBne(
                MixedKind.MIX_TRUTHFUL_HIGH_STATE,
                min(max(q, 0.0), 1.0),
                ReceiverStrategy(1.0 - ratio, 1.0),
            )
        )
    if ratio <= prior + SLACK_TOL and prior > 0.0 and ratio < 1.0:
        s = (prior - ratio) / (prior * (1.0 - ratio))
        out.append(
            MixedBne(
                MixedKind.MIX_TRUTHFUL_LOW_STATE,
                min(max(s, 0.0), 1.0),
                ReceiverStrategy(1.0, 1.0 - ratio),
            )
        )
    return out


# ---------------------------------------------------------------------------
# Brute-force verification


def _state_deviation_gain(
    strategy: SenderStrategy,
    family: RatingFamily,
    bias_eval: float,
    tau: float,
    gamma: float,
    prior: float,
) -> float:
    """Largest per-state gain from deviating to the best pure message.

    States with zero prior mass impose no best-response constraint.
    """
    ratings = family.ratings_at(bias_eval)
    worst = -math.inf
    for state, mass in ((StateLabel.HIGH, prior), (StateLabel.LOW, 1.0 - prior)):
        if mass <= 0.0:
            continue
        utils = {}
        for msg in MessageLabel:
            u = gamma * ratings.rating_for(msg)
            if msg is truthful_message(state):
                u += tau
            utils[msg] = u
        played = sum(strategy.prob_of_message(m, state) * utils[m] for m in MessageLabel)
        worst = max(worst, max(utils.values()) - played)
    return worst


def _receiver_grid_gain(
    receiver: ReceiverStrategy,
    perceived: SenderStrategy,
    prior: float,
    bias: float,
    grid: np.ndarray,
) -> float:
    """Best grid-rating improvement over the candidate's on-path ratings."""
    worst = -math.inf
    for msg in MessageLabel:
        try:
            p_truth = bayes_posterior(prior, perceived, msg)
        except OffPathMessageError:
            continue  # off-path rating is policy-set, not optimized
        lean = grid if msg is MessageLabel.MSG_H else 1.0 - grid
        utils = (
            p_truth * (1.0 - (1.0 - grid) ** 2)
            + (1.0 - p_truth) * (1.0 - grid**2)
            + bias * lean
        )
        candidate = receiver_expected_utility(receiver.rating_for(msg), p_truth, bias, msg)
        worst = max(worst, float(utils.max()) - candidate)
    return worst if worst > -math.inf else 0.0


Candidate = Union[MotivatedEquilibrium, PureBne, MixedBne]


def verify_profile(
    candidate: Candidate, params: GameParams, grid_step: float = 1e-3
) -> VerificationReport:
    """Independent certification of a candidate profile by exhaustive search.

    Clause (i): the actual sender cannot gain against the rating family
    evaluated at her believed bias, checked state by state over both
    messages. Clause (ii): each on-path rating maximizes the receiver
    objective at the true bias over a rating grid. Clause (iii): the
    perceived sender cannot gain at the receiver's believed bias. For BNE
    candidates all three biases coincide with the true one; mixed
    candidates are evaluated in the bias-0 base game.
    """
    if not 0.0 < grid_step <= 0.01:
        raise ValueError(f"grid_step must be in (0, 0.01], got {grid_step}")
    if isinstance(candidate, MotivatedEquilibrium):
        perceived, actual, receiver = candidate.perceived_sender, candidate.actual_sender, candidate.receiver
        bias_s, bias_r, bias_true = params.bias_hat_sender, params.bias_hat_receiver, params.bias_true
    elif isinstance(candidate, PureBne):
        perceived = actual = candidate.sender
        receiver = candidate.receiver
        bias_s = bias_r = bias_true = params.bias_true
    elif isinstance(candidate, MixedBne):
        perceived = actual = candidate.sender
        receiver = candidate.receiver
        bias_s = bias_r = bias_true = 0.0
    else:
        raise ValueError(f"malformed candidate: expected an equilibrium object, got {type(candidate).__name__}")

    tau, gamma, prior = params.honesty_weight, params.rating_weight, params.prior
    family = RatingFamily(perceived, prior, params.off_path)
    grid = np.linspace(0.0, 1.0, round(1.0 / grid_step) + 1)

    gain_i = _state_deviation_gain(actual, family, bias_s, tau, gamma, prior)
    gain_ii = _receiver_grid_gain(receiver, perceived, prior, bias_true, grid)
    gain_iii = _state_deviation_gain(perceived, family, bias_r, tau, gamma, prior)

    tolerance = 1e-6 + grid_step**2
    passed = max(gain_i, gain_ii, gain_iii) <= tolerance
    return VerificationReport(gain_i, gain_ii, gain_iii, grid_step, tolerance, passed)


def build_me_candidate(params: GameParams, row: int) -> MotivatedEquilibrium:
    """Row candidate built unconditionally (no existence check) for verification."""
    perceived, actual = ME_ROW_STRATEGIES[row]
    receiver = realized_receiver(perceived, params.prior, params.bias_true, params.off_path)
    return MotivatedEquilibrium(
        row=row,
        receiver=receiver,
        perceived_sender=perceived,
        actual_sender=actual,
        conditions=(Condition("candidate (unchecked)", 0.0),),
    )


def build_bne_candidate(params: GameParams, kind: BneKind) -> PureBne:
    """Kind candidate built unconditionally (no existence check) for verification."""
    sender = BNE_KIND_SENDER[kind]
    receiver = realized_receiver(sender, params.prior, params.bias_true, params.off_path)
    return PureBne(kind, receiver, sender, condition_slack=0.0)


# ---------------------------------------------------------------------------
# Closed-form regions over the rating weight


def _interval(lo: float, hi: float) -> list[tuple[float, float]]:
    return [(lo, hi)] if lo <= hi else []


def me_row_interval(
    row: int,
    prior: float,
    honesty_weight: float,
    bias_hat_receiver: float,
    bias_hat_sender: float,
    off_path: OffPathPolicy,
) -> list[tuple[float, float]]:
    """Analytic rating-weight interval on which ``row`` exists (possibly empty).

    Upper endpoints of unbounded intervals are ``math.inf``; the interval
    for row 1 starts at 0 (it always contains arbitrarily small positive
    rating weights, and the zero-weight game as well).
    """
    tau = honesty_weight
    off_h = off_path.rating_msgH_offpath
    off_l = off_path.rating_msgL_offpath
    if row == 1:
        hi = 2.0 * tau / bias_hat_sender if bias_hat_sender > 0.0 else math.inf
        return _interval(0.0, hi)
    if row == 2:
        cap = min(prior + bias_hat_receiver / 2.0, 1.0) - off_l
        return _interval(tau / cap, math.inf) if cap > 0.0 else []
    if row == 3:
        cap = max(1.0 - prior - bias_hat_sender / 2.0, 0.0) - off_h
        return _interval(tau / cap, math.inf) if cap > 0.0 else []
    if row == 4:
        if bias_hat_sender <= 0.0:
            return []
        lo = 2.0 * tau / bias_hat_sender
        hi = 2.0 * tau / bias_hat_receiver if bias_hat_receiver > 0.0 else math.inf
        return _interval(lo, hi)
    b_r = max(1.0 - prior - bias_hat_receiver / 2.0, 0.0) - off_h
    b_s = max(1.0 - prior - bias_hat_sender / 2.0, 0.0) - off_h
    if row == 5:
        if b_r <= 0.0:
            return []
        hi = math.inf if b_s == 0.0 else tau / abs(b_s)
        return _interval(tau / b_r, hi)
    if row == 6:
        if b_r <= 0.0 or b_s >= 0.0:
            return []
        return _interval(max(tau / b_r, tau / (-b_s)), math.inf)
    raise ValueError(f"row must be 1..6, got {row}")


def bne_kind_interval(
    kind: BneKind,
    prior: float,
    honesty_weight: float,
    bias: float,
    off_path: OffPathPolicy,
) -> list[tuple[float, float]]:
    """Analytic rating-weight interval on which a pure BNE kind exists."""
    tau = honesty_weight
    if kind is BneKind.SEPARATING:
        sep = realized_receiver(TRUTHFUL, prior, bias, off_path)
        gap = abs(sep.rating_msgH - sep.rating_msgL)
        return _interval(0.0, tau / gap if gap > 0.0 else math.inf)
    if kind is BneKind.POOL_H:
        pool = realized_receiver(POOL_HIGH, prior, bias, off_path)
        cap = pool.rating_msgH - pool.rating_msgL
        return _interval(tau / cap, math.inf) if cap > 0.0 else []
    pool = realized_receiver(POOL_LOW, prior, bias, off_path)
    cap = pool.rating_msgL - pool.rating_msgH
    return _interval(tau / cap, math.inf) if cap > 0.0 else []


def me_region(
    params: GameParams, gamma_range: tuple[float, float]
) -> dict[int, list[tuple[float, float]]]:
    """Per-row rating-weight intervals intersecting ``gamma_range``.

    Endpoints are analytic and reported at full precision (not clipped);
    rows whose interval misses the range map to an empty list.
    ``params.rating_weight`` is ignored.
    """
    lo, hi = gamma_range
    if not (lo >= 0.0 and hi > lo):
        raise ValueError(f"gamma_range must be 0 <= lo < hi, got {gamma_range}")
    out: dict[int, list[tuple[float, float]]] = {}
    for row in range(1, 7):
        ivs = me_row_interval(
            row,
            params.prior,
            params.honesty_weight,
            params.bias_hat_receiver,
            params.bias_hat_sender,
            params.off_path,
        )
        out[row] = [(a, b) for a, b in ivs if a <= hi and b >= lo]
    return out


# ---------------------------------------------------------------------------
# Directional model checks


@dataclass(frozen=True)
class PredictionReport:
    """Three directional checks on one parameterization.

    ``lying_window`` is the open rating-weight window in which the
    row-4 profile (truthful perceived sender, pooling actual sender) is
    the operative equilibrium.
    """

    lying_window: tuple[float, float]
    window_empty: bool
    gamma_evaluated: float | None
    incentives_reduce_truth: bool  # row-4 exists; receiver unchanged; sender strictly less truthful
    deviation_is_highward: bool  # MSG_H rated above MSG_L while sender pools on MSG_H
    no_conditioning_without_incentives: bool  # zero rating weight: best response invariant to believed bias
    notes: tuple[str, ...] = ()


def check_predictions(params: GameParams, belief_grid: tuple[float, ...] = (0.0, 0.5, 1.0, 1.9)) -> PredictionReport:
    """Evaluate the three directional claims at ``params``.

    The window check uses ``params.rating_weight`` when it falls inside the
    open window, otherwise the window midpoint.
    """
    tau = params.honesty_weight
    lo = 2.0 * tau / params.bias_hat_sender if params.bias_hat_sender > 0.0 else math.inf
    hi = 2.0 * tau / params.bias_hat_receiver if params.bias_hat_receiver > 0.0 else math.inf
    window = (lo, hi)
    window_empty = not lo < hi
    notes: list[str] = []

    p1 = False
    p2 = False
    gamma_eval: float | None = None
    if not window_empty:
        gamma_eval = params.rating_weight if lo < params.rating_weight < hi else (
            (lo + hi) / 2.0 if math.isfinite(hi) else 2.0 * lo
        )
        probe = GameParams(
            prior=params.prior,
            honesty_weight=tau,
            rating_weight=gamma_eval,
            bias_true=params.bias_true,
            bias_hat_receiver=params.bias_hat_receiver,
            bias_hat_sender=params.bias_hat_sender,
            off_path=params.off_path,
        )
        row4 = next((m for m in enumerate_me(probe) if m.row == 4), None)
        if row4 is None:
            notes.append("row-4 profile absent inside the window")
        else:
            sep_at_hat_r = realized_receiver(
                TRUTHFUL, params.prior, params.bias_hat_receiver, params.off_path
            )
            receiver_unchanged = (
                abs(row4.receiver.rating_msgH - sep_at_hat_r.rating_msgH) <= 1e-12
                and abs(row4.receiver.rating_msgL - sep_at_hat_r.rating_msgL) <= 1e-12
            )
            if not receiver_unchanged:
                notes.append(
                    "realized receiver differs from the separating response at the"
                    " receiver's believed bias (true bias != believed bias)"
                )
            truthfulness = lambda s: params.prior * s.prob_msgH_given_high + (
                1.0 - params.prior
            ) * (1.0 - s.prob_msgH_given_low)
            less_truthful = truthfulness(row4.actual_sender) < truthfulness(TRUTHFUL)
            p1 = receiver_unchanged and less_truthful
            p2 = (
                row4.receiver.rating_msgH > row4.receiver.rating_msgL
                and row4.actual_sender.prob_msgH_given_high == 1.0
                and row4.actual_sender.prob_msgH_given_low == 1.0
            )
    else:
        notes.append("window empty: both belief parameters coincide, only BNE remain")

    # zero rating weight: the best response never depends on the believed bias
    p3 = True
    fam = RatingFamily(TRUTHFUL, params.prior, params.off_path)
    for state in StateLabel:
        responses = {
            sender_best_response(state, fam, b, tau, 0.0)
            for b in tuple(belief_grid) + (params.bias_hat_sender,)
        }
        if responses != {truthful_message(state)}:
            p3 = False

    return PredictionReport(
        lying_window=window,
        window_empty=window_empty,
        gamma_evaluated=gamma_eval,
        incentives_reduce_truth=p1,
        deviation_is_highward=p2,
        no_conditioning_without_incentives=p3,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# JSON serialization (stable schema, documented in the README)


def _strategy_dict(s: SenderStrategy) -> dict:
    return {
        "prob_msgH_given_high": s.prob_msgH_given_high,
        "prob_msgH_given_low": s.prob_msgH_given_low,
    }


def _receiver_dict(r: ReceiverStrategy) -> dict:
    return {"rating_msgH": r.rating_msgH, "rating_msgL": r.rating_msgL}


def params_dict(params: GameParams) -> dict:
    return {
        "prior": params.prior,
        "honesty_weight": params.honesty_weight,
        "rating_weight": params.rating_weight,
        "bias_true": params.bias_true,
        "bias_hat_receiver": params.bias_hat_receiver,
        "bias_hat_sender": params.bias_hat_sender,
        "off_path": {
            "rating_msgH_offpath": params.off_path.rating_msgH_offpath,
            "rating_msgL_offpath": params.off_path.rating_msgL_offpath,
        },
    }


def equilibrium_document(params: GameParams, include_mixed: bool = True) -> dict:
    """JSON-ready document: {params, bne: [...], me: [...]} (+ mixed_bne at bias 0)."""
    doc = {
        "params": params_dict(params),
        "bne": [
            {
                "kind": b.kind.value,
                "condition_slack": b.condition_slack,
                "strategies": {
                    "receiver": _receiver_dict(b.receiver),
                    "sender": _strategy_dict(b.sender),
                },
            }
            for b in enumerate_pure_bne(
                params.prior,
                params.honesty_weight,
                params.rating_weight,
                params.bias_true,
                params.off_path,
            )
        ],
        "me": [
            {
                "row": m.row,
                "conditions": [{"expr": c.expr, "slack": c.slack} for c in m.conditions],
                "strategies": {
                    "receiver": _receiver_dict(m.receiver),
                    "perceived_sender": _strategy_dict(m.perceived_sender),
                    "actual_sender": _strategy_dict(m.actual_sender),
                },
            }
            for m in enumerate_me(params)
        ],
    }
    if include_mixed and params.bias_true == 0.0:
        doc["mixed_bne"] = [
            {
                "kind": m.kind.value,
                "mix_prob": m.mix_prob,
                "indifference_state": m.indifference_state.value,
                "strategies": {
                    "receiver": _receiver_dict(m.receiver),
                    "sender": _strategy_dict(m.sender),
                },
            }
            for m in mixed_bne(params.prior, params.honesty_weight, params.rating_weight)
        ]
    return doc
