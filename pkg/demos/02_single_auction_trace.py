"""Trace one hand-scripted auction with all four bidding strategies.

A single 0.05 ETH public event lands at step 0 and a second small event
arrives mid-slot. Watch the naive player re-bid on news, the adaptive
player ratchet just above the visible leader, the last-minute player
stay silent until its reveal step, and the bluff player park a 0.35 ETH
decoy that it cancels (by replacement) at reveal time.

Side effect worth noticing: once the decoy stands, the adaptive player's
"top the highest bid" cap is far above its own valuation, so it stops
shading and bids full valuation for the rest of the slot.
"""
from mevsim import (
    AuctionConfig,
    PlayerConfig,
    StrategyKind,
    load_scripted_trace,
    run_auction,
    reveal_step,
)
from mevsim.signals import TraceSignal

players = [
    PlayerConfig(0, StrategyKind.NAIVE, access_prob=1.0, profit_margin=0.004,
                 individual_delay=0.01),
    PlayerConfig(1, StrategyKind.ADAPTIVE, access_prob=1.0, profit_margin=0.002,
                 individual_delay=0.01, delta=3e-4),
    PlayerConfig(2, StrategyKind.LAST_MINUTE, access_prob=1.0,
                 profit_margin=0.003, individual_delay=0.01, reveal_gap=0.2),
    PlayerConfig(3, StrategyKind.BLUFF, access_prob=1.0, profit_margin=0.001,
                 individual_delay=0.01, reveal_gap=0.2, bluff_level=0.35),
]
doc = {
    "public": [{"step": 0, "value": 0.05}, {"step": 600, "value": 0.01}],
    "bundles": [{"step": 300, "value": 0.008, "recipients": [1, 3]}],
}
cfg = AuctionConfig(global_delay=0.01)
trace = load_scripted_trace(doc, n_players=4)
out = run_auction(cfg, players, TraceSignal(trace), termination_step=1200,
                  record_trace=True)

names = {0: "naive", 1: "adaptive", 2: "last-minute", 3: "bluff"}
for i in (2, 3):
    theta = reveal_step(players[i].reveal_gap, cfg.global_delay,
                        players[i].individual_delay)
    print(f"{names[i]} reveal step: {theta}")

print("\naccepted bids (deduplicated consecutive repeats):")
prev = {}
for ev in out.accepted_bids:
    if prev.get(ev.player) == ev.value:
        continue
    prev[ev.player] = ev.value
    print(f"  step {ev.accept_step:4d}  {names[ev.player]:<12} {ev.value:.6f}")

print(f"\nwinner: {names[out.winner]} at {out.winning_bid:.6f} ETH "
      f"(submitted step {out.winning_submit_step})")
print(f"winner profit: {out.per_player_profit[out.winner]:.6f} ETH")
print(f"total MEV on the table: {out.total_signal_at_end:.6f} ETH")
