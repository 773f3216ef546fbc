"""mevsim: agent-based simulator of MEV-Boost block auctions.

Public and exclusive orderflow arrive as compound Poisson MEV signals;
builders running naive, adaptive, last-minute or bluff strategies bid
through a latency-delayed relay; the proposer terminates the auction
around the 12 s slot boundary and takes the highest standing bid.
"""

__version__ = "0.1.0"

from .engine import (
    AuctionConfig,
    AuctionOutcome,
    BidEvent,
    RelayState,
    SimulationError,
    run_auction,
    sample_termination,
    settle,
    total_latency_steps,
)
from .harness import (
    BatchMetrics,
    ExperimentSpec,
    GroupMetrics,
    PlayerMetrics,
    PlayerTemplate,
    ProfileSpec,
    build_profile,
    efficiency,
    run_batch,
    run_single,
    run_sweep,
)
from .signals import (
    STEP_SECONDS,
    BundleEvent,
    EventTrace,
    PublicEvent,
    SignalError,
    SignalParams,
    SignalState,
    TraceSignal,
    apply_events,
    generate_step_events,
    load_scripted_trace,
    sample_event_count,
    sample_event_trace,
    sample_value,
    step_increments,
)
from .strategies import (
    BidContext,
    ConfigError,
    PlayerConfig,
    StrategyKind,
    compute_bid,
    reveal_step,
    valuation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
