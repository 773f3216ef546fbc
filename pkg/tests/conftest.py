"""Shared helpers for the test suite."""
import numpy as np
import pytest

from mevsim import (
    AuctionConfig,
    PlayerConfig,
    StrategyKind,
    TraceSignal,
    load_scripted_trace,
    run_auction,
)


def scripted(doc: dict, n_players: int) -> TraceSignal:
    """Scripted-event document -> per-step event source."""
    return TraceSignal(load_scripted_trace(doc, n_players))


def naive(i, pm, delay=0.01, access=1.0):
    return PlayerConfig(id=i, kind=StrategyKind.NAIVE, access_prob=access,
                        profit_margin=pm, individual_delay=delay)


def adaptive(i, pm, delay=0.01, delta=1e-6, access=1.0):
    return PlayerConfig(id=i, kind=StrategyKind.ADAPTIVE, access_prob=access,
                        profit_margin=pm, individual_delay=delay, delta=delta)


def last_minute(i, pm, delay=0.01, reveal_gap=0.0, access=1.0):
    return PlayerConfig(id=i, kind=StrategyKind.LAST_MINUTE, access_prob=access,
                        profit_margin=pm, individual_delay=delay,
                        reveal_gap=reveal_gap)


def bluff(i, pm, level, delay=0.01, reveal_gap=0.0, access=1.0):
    return PlayerConfig(id=i, kind=StrategyKind.BLUFF, access_prob=access,
                        profit_margin=pm, individual_delay=delay,
                        reveal_gap=reveal_gap, bluff_level=level)


def run_scripted(players, doc, tau, global_delay=0.01, **cfg_kwargs):
    cfg = AuctionConfig(global_delay=global_delay, **cfg_kwargs)
    signal = scripted(doc, len(players))
    return run_auction(cfg, players, signal, termination_step=tau,
                       record_trace=True)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
