"""Single-auction engine.

Runs the 10 ms step loop against a signal source, routes bids through a
latency-delayed relay queue, and settles the auction at a (possibly
random) termination step. Per step the order is: apply signal events,
process relay acceptances, check termination, snapshot the observable
state, then let every player act against that same snapshot
(simultaneity). A bid becomes a player's standing bid once accepted;
later acceptances replace earlier ones even with a lower value, which is
what makes cancellation effective.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .signals import STEP_SECONDS, SignalState, apply_events
from .strategies import (
    ConfigError,
    KIND_CODES,
    PlayerConfig,
    StrategyKind,
    bid_value,
    reveal_step,
)


class SimulationError(RuntimeError):
    """Internal inconsistency or exceeded safety cap."""


@dataclass(frozen=True)
class AuctionConfig:
    global_delay: float = 0.01        # relay processing delay, seconds
    termination_mean: float = 12.0    # seconds
    termination_sigma: float = 0.0    # seconds
    step_seconds: float = STEP_SECONDS
    max_horizon_steps: int = 2400     # safety cap (24 s)

    def __post_init__(self):
        if self.step_seconds != STEP_SECONDS:
            raise ConfigError("step size is fixed at 10 ms")
        if self.global_delay < STEP_SECONDS:
            raise ConfigError("global delay below one step")
        if self.termination_sigma < 0:
            raise ConfigError("termination sigma must be nonnegative")
        if self.termination_mean <= 0:
            raise ConfigError("termination mean must be positive")


@dataclass(frozen=True)
class BidEvent:
    player: int
    value: float
    submit_step: int
    accept_step: int


class RelayState:
    """Delayed-acceptance queue plus one standing-bid slot per player."""

    def __init__(self, n_players: int):
        self.n_players = n_players
        self._in_flight: dict[int, list[BidEvent]] = {}
        self.standing: list[Optional[BidEvent]] = [None] * n_players
        self.accepted_log: list[BidEvent] = []

    def submit(self, player: int, value: float, submit_step: int,
               total_latency_steps: int) -> None:
        if value <= 0:
            raise SimulationError("bid values must be positive")
        if total_latency_steps < 1:
            raise SimulationError("total latency must be at least one step")
        ev = BidEvent(player, value, submit_step, submit_step + total_latency_steps)
        self._in_flight.setdefault(ev.accept_step, []).append(ev)

    def process_acceptances(self, step: int) -> None:
        # Buckets are appended in submission order (FIFO, player-id order
        # within a step), so plain assignment realizes "latest wins".
        due = self._in_flight.pop(step, None)
        if due is None:
            return
        for ev in due:
            self.standing[ev.player] = ev
            self.accepted_log.append(ev)

    def observable_highest(self) -> float:
        best = 0.0
        for ev in self.standing:
            if ev is not None and ev.value > best:
                best = ev.value
        return best


@dataclass(frozen=True)
class AuctionOutcome:
    termination_step: int
    winner: Optional[int]
    winning_bid: Optional[float]
    winning_submit_step: Optional[int]
    per_player_profit: np.ndarray
    per_player_signal_at_tw: Optional[np.ndarray]
    total_signal_at_end: float
    no_winner: bool
    accepted_bids: Optional[tuple[BidEvent, ...]] = None


def total_latency_steps(global_delay: float, individual_delay: float) -> int:
    steps = int(round((global_delay + individual_delay) / STEP_SECONDS))
    if steps < 1:
        raise ConfigError("total latency below one step")
    return steps


def sample_termination(sigma: float, rng: np.random.Generator,
                       mean: float = 12.0) -> int:
    """Termination step: a Normal(mean, sigma) draw in seconds, rounded to
    the nearest step; negative draws clamp to 0."""
    if sigma < 0:
        raise ConfigError("sigma must be nonnegative")
    t = rng.normal(mean, sigma)
    return int(round(max(t, 0.0) / STEP_SECONDS))


def settle(relay: RelayState, termination_step: int, signal_history: np.ndarray,
           total_signal: float,
           accepted_bids: Optional[tuple[BidEvent, ...]] = None) -> AuctionOutcome:
    """Pick the winner from standing bids and compute profits.

    Highest standing bid wins; ties break by earliest acceptance, then
    lowest player id. The winner's profit is their aggregated signal at
    the submission step minus the bid; losers earn exactly 0.
    """
    n = relay.n_players
    candidates = [ev for ev in relay.standing if ev is not None]
    profits = np.zeros(n)
    if not candidates:
        return AuctionOutcome(
            termination_step, None, None, None, profits, None,
            total_signal, True, accepted_bids,
        )
    best = min(candidates, key=lambda ev: (-ev.value, ev.accept_step, ev.player))
    signal_at_tw = signal_history[best.submit_step].copy()
    profits[best.player] = signal_at_tw[best.player] - best.value
    return AuctionOutcome(
        termination_step, best.player, best.value, best.submit_step,
        profits, signal_at_tw, total_signal, False, accepted_bids,
    )


def run_auction(
    cfg: AuctionConfig,
    players: list[PlayerConfig],
    signal,
    rng: Optional[np.random.Generator] = None,
    termination_step: Optional[int] = None,
    record_trace: bool = False,
) -> AuctionOutcome:
    """Run one auction to termination. Deterministic given its inputs.

    ``signal`` is any object with ``events_at(step)`` (a TraceSignal over
    generated or scripted events). The termination step is drawn from the
    config's Gaussian unless given explicitly.
    """
    if not players:
        raise ConfigError("at least one player required")
    n = len(players)
    if termination_step is None:
        if rng is None:
            raise ConfigError("termination draw requires an rng")
        termination_step = sample_termination(
            cfg.termination_sigma, rng, cfg.termination_mean)
    tau = termination_step
    if tau > cfg.max_horizon_steps:
        raise SimulationError(
            f"termination step {tau} exceeds horizon cap {cfg.max_horizon_steps}")

    kinds = [KIND_CODES[p.kind] for p in players]
    latencies = [total_latency_steps(cfg.global_delay, p.individual_delay)
                 for p in players]
    thetas = [
        reveal_step(p.reveal_gap, cfg.global_delay, p.individual_delay)
        if p.kind in (StrategyKind.LAST_MINUTE, StrategyKind.BLUFF) else -1
        for p in players
    ]

    state = SignalState(n)
    relay = RelayState(n)
    s_hist = np.empty((tau + 1, n))

    for t in range(tau + 1):
        state.current_step = t
        public, bundles = signal.events_at(t)
        apply_events(state, public, bundles)
        relay.process_acceptances(t)
        s_hist[t] = state.aggregated_all()
        if t == tau:
            break
        highest = relay.observable_highest()
        pub = state.public_total
        priv = state.private_totals
        for i, p in enumerate(players):
            b = bid_value(kinds[i], p.profit_margin, p.delta, p.bluff_level,
                          thetas[i], t, pub + priv[i], highest)
            if b is None:
                continue
            st = relay.standing[i]
            if st is not None and st.value == b:
                continue
            relay.submit(i, b, t, latencies[i])

    trace = tuple(relay.accepted_log) if record_trace else None
    return settle(relay, tau, s_hist, state.total(), trace)
