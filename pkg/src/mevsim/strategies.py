"""Bidding strategies.

Four strategies are modeled: naive (bid the valuation), adaptive (top the
observed highest standing bid by a small increment, capped at the
valuation), last-minute (hold back until the reveal step, then bid
naively) and bluff (hold an oversized decoy bid until the reveal step,
then drop to the valuation, relying on cancellation-by-replacement).

All strategy functions are pure: the engine feeds them one immutable
per-step context and collects the resulting bids.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .signals import STEP_SECONDS


class ConfigError(ValueError):
    """Invalid player or auction configuration."""


class StrategyKind(str, Enum):
    NAIVE = "naive"
    ADAPTIVE = "adaptive"
    LAST_MINUTE = "last_minute"
    BLUFF = "bluff"


# Integer codes shared with the compiled fast path.
KIND_CODES = {
    StrategyKind.NAIVE: 0,
    StrategyKind.ADAPTIVE: 1,
    StrategyKind.LAST_MINUTE: 2,
    StrategyKind.BLUFF: 3,
}

DEFAULT_DELTA = 3e-4  # adaptive outbidding increment, ETH


@dataclass(frozen=True)
class PlayerConfig:
    id: int
    kind: StrategyKind
    access_prob: float
    profit_margin: float
    individual_delay: float          # seconds, >= one step
    reveal_gap: float = 0.0          # epsilon, seconds (last-minute / bluff)
    bluff_level: float = 0.0         # decoy bid, ETH (bluff only)
    delta: float = DEFAULT_DELTA     # outbid increment, ETH (adaptive only)

    def __post_init__(self):
        if not 0.0 <= self.access_prob <= 1.0:
            raise ConfigError(f"player {self.id}: access_prob outside [0, 1]")
        if self.profit_margin < 0:
            raise ConfigError(f"player {self.id}: negative profit margin")
        if self.individual_delay < STEP_SECONDS:
            raise ConfigError(f"player {self.id}: individual delay below one step")
        if self.reveal_gap < 0:
            raise ConfigError(f"player {self.id}: negative reveal gap")
        if self.kind is StrategyKind.BLUFF and self.bluff_level <= 0:
            raise ConfigError(f"player {self.id}: bluff level must be positive")
        if self.kind is StrategyKind.ADAPTIVE and self.delta <= 0:
            raise ConfigError(f"player {self.id}: delta must be positive")


@dataclass(frozen=True)
class BidContext:
    """Observable inputs one strategy evaluation consumes."""

    step: int
    own_signal: float        # aggregated signal of this player, ETH
    highest_standing: float  # max standing bid across all players, 0 if none
    reveal_step: int         # theta in steps; -1 when not applicable
    global_delay: float      # seconds


def valuation(own_signal: float, profit_margin: float) -> float:
    """Highest bid still leaving a nonnegative profit (may be negative)."""
    return own_signal - profit_margin


def reveal_step(reveal_gap: float, global_delay: float, individual_delay: float) -> int:
    """Step at which a held-back bid must be submitted.

    Submitting at this step makes the bid accepted exactly ``reveal_gap``
    seconds before the nominal 12 s termination.
    """
    t = 12.0 - reveal_gap - global_delay - individual_delay
    if t < 0:
        raise ConfigError("negative reveal step")
    return int(round(t / STEP_SECONDS))


def compute_bid(kind: StrategyKind, cfg: PlayerConfig, ctx: BidContext) -> Optional[float]:
    """Bid of one player at one step; None means no submission.

    Nonpositive clamped values are suppressed (a 0 ETH bid cannot win).
    The engine additionally suppresses a value equal to the player's
    current standing bid, so holding a bid costs no resubmission.
    """
    return bid_value(
        KIND_CODES[kind],
        cfg.profit_margin,
        cfg.delta,
        cfg.bluff_level,
        ctx.reveal_step,
        ctx.step,
        ctx.own_signal,
        ctx.highest_standing,
    )


def bid_value(
    kind_code: int,
    profit_margin: float,
    delta: float,
    bluff_level: float,
    theta: int,
    step: int,
    own_signal: float,
    highest_standing: float,
) -> Optional[float]:
    """Scalar core of compute_bid, shared with the engine's hot loop."""
    if kind_code == 2 and step < theta:    # last-minute: silent before reveal
        return None
    if kind_code == 3 and step < theta:    # bluff: decoy before reveal
        return bluff_level
    v = own_signal - profit_margin
    if kind_code == 1:                     # adaptive: top the highest, capped at v
        capped = highest_standing + delta
        if capped < v:
            v = capped
    if v <= 0.0:
        return None
    return v
