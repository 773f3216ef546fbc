"""Compiled batch path for Monte Carlo runs.

A numba kernel that replays the exact step semantics of engine.run_auction
against precomputed per-step signal increments. Accumulation and
comparison order mirror the reference engine, so outcomes are
bit-identical (asserted by the equivalence tests); the kernel exists only
because batches of 10,000+ auctions are CPU-bound in pure Python.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .engine import AuctionConfig, total_latency_steps
from .signals import EventTrace, step_increments
from .strategies import KIND_CODES, PlayerConfig, StrategyKind, reveal_step


@dataclass(frozen=True)
class AuctionRecord:
    """Compact per-auction result used for batch aggregation."""

    termination_step: int
    winner: Optional[int]
    winning_bid: Optional[float]
    winning_submit_step: Optional[int]
    winner_profit: float
    total_signal_at_end: float


@njit(cache=True)
def run_auction_kernel(tau, pub_inc, bundle_inc, priv_inc,
                       kinds, pms, deltas, bluffs, thetas, latencies):
    """One auction over steps 0..tau. Returns winner data plus the full
    submission log (every logged submission is eventually accepted)."""
    n = kinds.shape[0]
    cap = tau * n
    sub_player = np.empty(cap, np.int64)
    sub_value = np.empty(cap)
    sub_submit = np.empty(cap, np.int64)
    sub_sig = np.empty(cap)
    nxt = np.full(cap, -1, np.int64)
    head = np.full(tau + 1, -1, np.int64)
    tail = np.full(tau + 1, -1, np.int64)

    pub_cum = 0.0
    bundle_cum = 0.0
    priv_cum = np.zeros(n)
    standing_value = np.zeros(n)
    standing_submit = np.full(n, -1, np.int64)
    standing_accept = np.full(n, -1, np.int64)
    standing_sig = np.zeros(n)
    has_standing = np.zeros(n, np.bool_)
    highest = 0.0
    n_sub = 0

    for t in range(tau + 1):
        pub_cum += pub_inc[t]
        bundle_cum += bundle_inc[t]
        for i in range(n):
            priv_cum[i] += priv_inc[t, i]

        idx = head[t]
        changed = idx != -1
        while idx != -1:
            p = sub_player[idx]
            standing_value[p] = sub_value[idx]
            standing_submit[p] = sub_submit[idx]
            standing_accept[p] = t
            standing_sig[p] = sub_sig[idx]
            has_standing[p] = True
            idx = nxt[idx]

        if t == tau:
            break

        if changed:
            highest = 0.0
            for i in range(n):
                if has_standing[i] and standing_value[i] > highest:
                    highest = standing_value[i]

        for i in range(n):
            k = kinds[i]
            if k == 2 and t < thetas[i]:
                continue
            if k == 3 and t < thetas[i]:
                b = bluffs[i]
            else:
                b = (pub_cum + priv_cum[i]) - pms[i]
                if k == 1:
                    capped = highest + deltas[i]
                    if capped < b:
                        b = capped
                if b <= 0.0:
                    continue
            if has_standing[i] and standing_value[i] == b:
                continue
            acc = t + latencies[i]
            if acc > tau:
                continue
            sub_player[n_sub] = i
            sub_value[n_sub] = b
            sub_submit[n_sub] = t
            sub_sig[n_sub] = pub_cum + priv_cum[i]
            if head[acc] == -1:
                head[acc] = n_sub
            else:
                nxt[tail[acc]] = n_sub
            tail[acc] = n_sub
            n_sub += 1

    winner = -1
    w_value = 0.0
    w_submit = -1
    w_accept = -1
    w_sig = 0.0
    for i in range(n):
        if not has_standing[i]:
            continue
        if (winner == -1 or standing_value[i] > w_value
                or (standing_value[i] == w_value
                    and standing_accept[i] < w_accept)):
            winner = i
            w_value = standing_value[i]
            w_submit = standing_submit[i]
            w_accept = standing_accept[i]
            w_sig = standing_sig[i]

    total_signal = pub_cum + bundle_cum
    return (winner, w_value, w_submit, w_accept, w_sig, total_signal,
            sub_player[:n_sub], sub_value[:n_sub], sub_submit[:n_sub])


def player_arrays(cfg: AuctionConfig, players: list[PlayerConfig]):
    """Static per-player arrays the kernel consumes."""
    kinds = np.array([KIND_CODES[p.kind] for p in players], dtype=np.int64)
    pms = np.array([p.profit_margin for p in players])
    deltas = np.array([p.delta for p in players])
    bluffs = np.array([p.bluff_level for p in players])
    thetas = np.array([
        reveal_step(p.reveal_gap, cfg.global_delay, p.individual_delay)
        if p.kind in (StrategyKind.LAST_MINUTE, StrategyKind.BLUFF) else -1
        for p in players
    ], dtype=np.int64)
    latencies = np.array([
        total_latency_steps(cfg.global_delay, p.individual_delay)
        for p in players
    ], dtype=np.int64)
    return kinds, pms, deltas, bluffs, thetas, latencies


def run_auction_fast(cfg: AuctionConfig, players: list[PlayerConfig],
                     trace: EventTrace, termination_step: int) -> AuctionRecord:
    """Run one auction through the kernel from a full event trace."""
    tau = termination_step
    if tau > cfg.max_horizon_steps:
        raise RuntimeError(
            f"termination step {tau} exceeds horizon cap {cfg.max_horizon_steps}")
    pub_inc, bundle_inc, priv_inc = step_increments(trace, tau)
    arrays = player_arrays(cfg, players)
    res = run_auction_kernel(tau, pub_inc, bundle_inc, priv_inc, *arrays)
    return record_from_kernel(tau, res)


def record_from_kernel(tau: int, res) -> AuctionRecord:
    winner, w_value, w_submit, _, w_sig, total_signal = res[:6]
    if winner < 0:
        return AuctionRecord(tau, None, None, None, 0.0, total_signal)
    return AuctionRecord(tau, int(winner), float(w_value), int(w_submit),
                         float(w_sig - w_value), float(total_signal))
