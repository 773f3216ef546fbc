"""MEV signal processes.

The market is driven by two compound Poisson processes with log-normal
marks: a public stream (mempool transactions, visible to everyone) and a
bundle stream (exclusive orderflow from searchers). Each bundle is shared
among the players that "received" it, which is decided by an independent
Bernoulli draw per player with that player's access probability. All
values are denominated in ETH; time is discretized in 10 ms steps.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

STEP_SECONDS = 0.01


class SignalError(ValueError):
    """Inconsistent signal state or event input."""


@dataclass(frozen=True)
class SignalParams:
    """Rates and log-normal mark parameters of both event streams.

    Defaults are chosen so that the mean public signal over a 12 s auction
    is about 0.08 ETH and the mean bundle total about 0.015 ETH, i.e. well
    below the 0.3-0.4 ETH decoy range, with mark dispersion heavy enough
    that a single large event regularly reorders the field.
    """

    # mean public MEV per second = lambda * exp(xi + omega^2 / 2) = 6.6e-3
    lambda_public: float = 18.0        # public events per second
    xi_public: float = math.log(4e-3 / 18.0) + 0.5 - 1.3 ** 2 / 2
    omega_public: float = 1.3          # log-normal scale of public MEV
    # mean bundle MEV over 12 s = 12 * lambda * exp(xi + omega^2 / 2) = 0.0148
    lambda_bundle: float = 1.5         # bundle events per second
    xi_bundle: float = math.log(0.0148 / 18.0) - 0.5
    omega_bundle: float = 1.0

    def __post_init__(self):
        if self.lambda_public < 0 or self.lambda_bundle < 0:
            raise SignalError("event rates must be nonnegative")
        if self.omega_public <= 0 or self.omega_bundle <= 0:
            raise SignalError("log-normal scale parameters must be positive")


@dataclass(frozen=True)
class PublicEvent:
    step: int
    value: float


@dataclass(frozen=True)
class BundleEvent:
    step: int
    value: float
    recipients: frozenset[int]


@dataclass
class SignalState:
    """Running cumulative signal totals for one auction.

    ``aggregated(i)`` is the signal a player actually observes:
    public total plus that player's private total.
    """

    n_players: int
    public_total: float = 0.0
    bundle_total: float = 0.0
    private_totals: np.ndarray = field(default=None)  # type: ignore[assignment]
    current_step: int = 0

    def __post_init__(self):
        if self.private_totals is None:
            self.private_totals = np.zeros(self.n_players)

    def aggregated(self, player: int) -> float:
        return self.public_total + self.private_totals[player]

    def aggregated_all(self) -> np.ndarray:
        return self.public_total + self.private_totals

    def total(self) -> float:
        return self.public_total + self.bundle_total


def sample_event_count(rate: float, dt: float, rng: np.random.Generator) -> int:
    """Number of events of a rate-``rate`` Poisson process in a window of ``dt`` s."""
    if rate < 0:
        raise SignalError("rate must be nonnegative")
    if dt <= 0:
        raise SignalError("dt must be positive")
    if rate == 0:
        return 0
    return int(rng.poisson(rate * dt))


def sample_value(xi: float, omega: float, rng: np.random.Generator) -> float:
    """One log-normal MEV mark, exp(Normal(xi, omega))."""
    if omega <= 0:
        raise SignalError("omega must be positive")
    return float(np.exp(rng.normal(xi, omega)))


def generate_step_events(
    params: SignalParams,
    step: int,
    access_probs,
    rng: np.random.Generator,
) -> tuple[list[PublicEvent], list[BundleEvent]]:
    """Draw one 10 ms bin of public and bundle events.

    Bundle recipients are realized by independent Bernoulli(access_prob)
    draws per player (Poisson thinning), so player i's bundle count is
    Poisson(lambda_bundle * t * pi_i) marginally while shared receipt
    stays correlated across players.
    """
    access_probs = np.asarray(access_probs, dtype=float)
    if np.any(access_probs < 0) or np.any(access_probs > 1):
        raise SignalError("access probabilities must lie in [0, 1]")
    n_pub = sample_event_count(params.lambda_public, STEP_SECONDS, rng)
    public = [
        PublicEvent(step, sample_value(params.xi_public, params.omega_public, rng))
        for _ in range(n_pub)
    ]
    n_bun = sample_event_count(params.lambda_bundle, STEP_SECONDS, rng)
    bundles = []
    for _ in range(n_bun):
        value = sample_value(params.xi_bundle, params.omega_bundle, rng)
        got = rng.random(access_probs.shape[0]) < access_probs
        bundles.append(BundleEvent(step, value, frozenset(np.flatnonzero(got).tolist())))
    return public, bundles


def apply_events(
    state: SignalState,
    public_events: list[PublicEvent],
    bundle_events: list[BundleEvent],
) -> SignalState:
    """Accumulate one step's events into the running totals.

    Events must carry the state's current step. Per-step sums are formed
    first and added once, so the accumulation order is a left fold over
    step sums (the fast path reproduces this bit for bit).
    """
    for ev in public_events:
        if ev.step != state.current_step:
            raise SignalError(
                f"public event at step {ev.step} applied at step {state.current_step}"
            )
        if ev.value <= 0:
            raise SignalError("event values must be positive")
    for ev in bundle_events:
        if ev.step != state.current_step:
            raise SignalError(
                f"bundle event at step {ev.step} applied at step {state.current_step}"
            )
        if ev.value <= 0:
            raise SignalError("event values must be positive")

    pub_sum = 0.0
    for ev in public_events:
        pub_sum += ev.value
    bun_sum = 0.0
    priv_sums = np.zeros(state.n_players)
    for ev in bundle_events:
        bun_sum += ev.value
        for i in ev.recipients:
            if not 0 <= i < state.n_players:
                raise SignalError(f"recipient {i} outside player set")
            priv_sums[i] += ev.value
    state.public_total += pub_sum
    state.bundle_total += bun_sum
    state.private_totals += priv_sums
    return state


@dataclass(frozen=True)
class EventTrace:
    """All events of one auction, in generation order."""

    n_players: int
    public_steps: np.ndarray   # int64
    public_values: np.ndarray  # float64
    bundle_steps: np.ndarray
    bundle_values: np.ndarray
    recipients: np.ndarray     # bool, shape (n_bundles, n_players)


def sample_event_trace(
    params: SignalParams,
    access_probs,
    horizon_steps: int,
    rng: np.random.Generator,
) -> EventTrace:
    """Vectorized draw of a whole auction's events for steps 0..horizon_steps.

    Stream consumption order (fixed for reproducibility): public counts,
    public values, bundle counts, bundle values, recipients matrix.
    """
    access_probs = np.asarray(access_probs, dtype=float)
    if np.any(access_probs < 0) or np.any(access_probs > 1):
        raise SignalError("access probabilities must lie in [0, 1]")
    n_players = access_probs.shape[0]
    n_steps = horizon_steps + 1

    pub_counts = rng.poisson(params.lambda_public * STEP_SECONDS, n_steps)
    n_pub = int(pub_counts.sum())
    pub_values = np.exp(rng.normal(params.xi_public, params.omega_public, n_pub))
    pub_steps = np.repeat(np.arange(n_steps, dtype=np.int64), pub_counts)

    bun_counts = rng.poisson(params.lambda_bundle * STEP_SECONDS, n_steps)
    n_bun = int(bun_counts.sum())
    bun_values = np.exp(rng.normal(params.xi_bundle, params.omega_bundle, n_bun))
    bun_steps = np.repeat(np.arange(n_steps, dtype=np.int64), bun_counts)
    recipients = rng.random((n_bun, n_players)) < access_probs[None, :]

    return EventTrace(n_players, pub_steps, pub_values, bun_steps, bun_values, recipients)


def step_increments(trace: EventTrace, horizon_steps: int):
    """Per-step signal increments (public, bundle-total, per-player private).

    Within-step summation follows generation order, matching apply_events.
    """
    n_steps = horizon_steps + 1
    pub_inc = np.zeros(n_steps)
    np.add.at(pub_inc, trace.public_steps, trace.public_values)
    bundle_inc = np.zeros(n_steps)
    np.add.at(bundle_inc, trace.bundle_steps, trace.bundle_values)
    priv_inc = np.zeros((n_steps, trace.n_players))
    if trace.bundle_steps.shape[0]:
        contrib = trace.bundle_values[:, None] * trace.recipients
        np.add.at(priv_inc, trace.bundle_steps, contrib)
    return pub_inc, bundle_inc, priv_inc


class TraceSignal:
    """Per-step event source over a fixed EventTrace (generated or scripted)."""

    def __init__(self, trace: EventTrace):
        self.trace = trace
        self._by_step: dict[int, tuple[list[PublicEvent], list[BundleEvent]]] = {}
        for step, value in zip(trace.public_steps.tolist(), trace.public_values.tolist()):
            self._bucket(step)[0].append(PublicEvent(step, value))
        for j, (step, value) in enumerate(
            zip(trace.bundle_steps.tolist(), trace.bundle_values.tolist())
        ):
            got = frozenset(np.flatnonzero(trace.recipients[j]).tolist())
            self._bucket(step)[1].append(BundleEvent(step, value, got))

    def _bucket(self, step: int):
        if step not in self._by_step:
            self._by_step[step] = ([], [])
        return self._by_step[step]

    def events_at(self, step: int) -> tuple[list[PublicEvent], list[BundleEvent]]:
        return self._by_step.get(step, ([], []))


def load_scripted_trace(doc, n_players: int) -> EventTrace:
    """Build an EventTrace from a scripted-event document.

    ``doc`` is a dict (or a path to a JSON file) with arrays
    ``public: [{step, value}]`` and ``bundles: [{step, value, recipients}]``;
    steps are in 10 ms units. Scripted events replace the stochastic
    generator for hand-checkable auctions.
    """
    if not isinstance(doc, dict):
        with open(doc, encoding="utf-8") as fh:
            doc = json.load(fh)
    unknown = set(doc) - {"public", "bundles"}
    if unknown:
        raise SignalError(f"unknown scripted-event keys: {sorted(unknown)}")
    public = doc.get("public", [])
    bundles = doc.get("bundles", [])

    pub_steps = np.array([int(e["step"]) for e in public], dtype=np.int64)
    pub_values = np.array([float(e["value"]) for e in public])
    bun_steps = np.array([int(e["step"]) for e in bundles], dtype=np.int64)
    bun_values = np.array([float(e["value"]) for e in bundles])
    recipients = np.zeros((len(bundles), n_players), dtype=bool)
    for j, e in enumerate(bundles):
        for i in e.get("recipients", []):
            if not 0 <= int(i) < n_players:
                raise SignalError(f"recipient {i} outside player set")
            recipients[j, int(i)] = True
    if (pub_steps < 0).any() or (bun_steps < 0).any():
        raise SignalError("event steps must be nonnegative")
    if (pub_values <= 0).any() or (bun_values <= 0).any():
        raise SignalError("event values must be positive")
    return EventTrace(n_players, pub_steps, pub_values, bun_steps, bun_values, recipients)
