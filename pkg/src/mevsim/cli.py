"""Command-line front end.

Subcommands:
  run     execute a single-point experiment from a config file
  sweep   execute a parameter sweep
  replay  re-run one auction from a manifest and emit its bid trace

Outputs are plain CSV (UTF-8, LF, RFC-4180) plus a manifest.json that is
sufficient to reproduce any auction of the batch bit for bit.

Exit codes: 0 success, 1 configuration/validation error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from dataclasses import asdict, replace
from pathlib import Path

from . import __version__
from .engine import AuctionConfig, run_auction
from .harness import (
    ExperimentSpec,
    PROFILE_NAMES,
    ProfileSpec,
    PlayerTemplate,
    SWEEP_AXES,
    build_profile,
    run_single,
    run_sweep,
)
from .signals import SignalParams, TraceSignal
from .strategies import ConfigError, DEFAULT_DELTA, StrategyKind

# CLI sweep values are given in the axis's natural unit and converted to
# the internal unit (seconds) here.
_AXIS_SCALE = {
    "global_delay": 1e-3,      # milliseconds
    "individual_delay": 1e-3,  # milliseconds
    "reveal_gap": 1e-3,        # milliseconds
    "sigma": 1.0,              # seconds
    "access_prob": 1.0,
}

_SIGNAL_KEYS = {"lambda_public", "xi_public", "omega_public",
                "lambda_bundle", "xi_bundle", "omega_bundle"}
_AUCTION_KEYS = {"global_delay", "termination_mean", "termination_sigma",
                 "max_horizon_steps"}
_EXPERIMENT_KEYS = {"id", "runs", "seed", "sweep"}
_SWEEP_KEYS = {"axis", "values"}
_PLAYER_KEYS = {"kind", "access_prob", "profit_margin", "individual_delay",
                "reveal_gap", "bluff_level", "delta"}


def _reject_unknown(section: dict, allowed: set, where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _parse_players(entries) -> ProfileSpec:
    templates = []
    for j, entry in enumerate(entries):
        _reject_unknown(entry, _PLAYER_KEYS, f"players[{j}]")
        try:
            kind = StrategyKind(entry["kind"])
        except (KeyError, ValueError):
            raise ConfigError(f"players[{j}]: unknown strategy kind") from None
        templates.append(PlayerTemplate(
            kind=kind,
            individual_delay=float(entry.get("individual_delay", 0.01)),
            reveal_gap=float(entry.get("reveal_gap", 0.0)),
            access_prob=(None if entry.get("access_prob") is None
                         else float(entry["access_prob"])),
            profit_margin=(None if entry.get("profit_margin") is None
                           else float(entry["profit_margin"])),
            bluff_level=(None if entry.get("bluff_level") is None
                         else float(entry["bluff_level"])),
            delta=float(entry.get("delta", DEFAULT_DELTA)),
        ))
    if not templates:
        raise ConfigError("players list is empty")
    return ProfileSpec(name="custom", players=tuple(templates))


def parse_and_validate(doc: dict) -> tuple[ExperimentSpec, str]:
    """Resolve a config document into an ExperimentSpec with defaults.

    Returns (spec, experiment id). Raises ConfigError with a named
    message on any schema or semantic violation.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config root must be an object")
    _reject_unknown(doc, {"signal", "auction", "profile", "players",
                          "experiment"}, "config")

    signal_doc = doc.get("signal", {})
    _reject_unknown(signal_doc, _SIGNAL_KEYS, "signal")
    signal = SignalParams(**{k: float(v) for k, v in signal_doc.items()})

    auction_doc = doc.get("auction", {})
    _reject_unknown(auction_doc, _AUCTION_KEYS, "auction")
    kwargs = {k: (int(v) if k == "max_horizon_steps" else float(v))
              for k, v in auction_doc.items()}
    auction = AuctionConfig(**kwargs)

    if ("profile" in doc) == ("players" in doc):
        raise ConfigError("config needs exactly one of 'profile' or 'players'")
    if "profile" in doc:
        profile_doc = doc["profile"]
        if isinstance(profile_doc, str):
            profile_doc = {"name": profile_doc}
        if "name" not in profile_doc:
            raise ConfigError("profile requires a name")
        name = profile_doc["name"]
        if name not in PROFILE_NAMES:
            raise ConfigError(f"unknown profile name: {name!r}")
        overrides = {k: v for k, v in profile_doc.items() if k != "name"}
        profile = build_profile(name, **overrides)
    else:
        profile = _parse_players(doc["players"])

    exp_doc = doc.get("experiment", {})
    _reject_unknown(exp_doc, _EXPERIMENT_KEYS, "experiment")
    sweep_doc = exp_doc.get("sweep", {})
    _reject_unknown(sweep_doc, _SWEEP_KEYS, "experiment.sweep")
    axis = sweep_doc.get("axis", "none")
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis: {axis!r}")
    raw_values = sweep_doc.get("values", [])
    values = tuple(float(v) * _AXIS_SCALE.get(axis, 1.0) for v in raw_values)

    spec = ExperimentSpec(
        profile=profile,
        auction=auction,
        signal=signal,
        sweep_axis=axis,
        sweep_values=values,
        runs_per_point=int(exp_doc.get("runs", 10000)),
        master_seed=int(exp_doc.get("seed", 0)),
    )
    _validate_spec(spec)
    return spec, str(exp_doc.get("id", profile.name))


def _validate_spec(spec: ExperimentSpec) -> None:
    """Semantic checks across every sweep point (delays, reveal steps)."""
    points = [None] if spec.sweep_axis == "none" else list(spec.sweep_values)
    for value in points:
        cfg, profile = spec.at_point(value)
        if cfg.global_delay < 0.01:
            raise ConfigError("global delay below one step")
        for t in profile.players:
            if t.individual_delay < 0.01:
                raise ConfigError("individual delay below one step")
            if t.access_prob is not None and not 0 <= t.access_prob <= 1:
                raise ConfigError("access probability outside [0, 1]")
            if t.kind in (StrategyKind.LAST_MINUTE, StrategyKind.BLUFF):
                if 12.0 - t.reveal_gap - cfg.global_delay - t.individual_delay < 0:
                    raise ConfigError("negative reveal step")


def parse_values(text: str) -> list[float]:
    """Sweep value syntax: 'start:stop:step' (inclusive) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("range syntax is start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ConfigError("range step must be positive")
        values = []
        v = start
        while v <= stop + 1e-9:
            values.append(round(v, 12))
            v += step
        return values
    return [float(p) for p in text.split(",") if p.strip()]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _write_csv(path: Path, header: list[str], rows) -> None:
    # Values contain no separators or quotes, so plain joins are RFC-4180.
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _summary_rows(exp_id, axis, value, metrics):
    disp = None if value is None else value / _AXIS_SCALE.get(axis, 1.0)
    rows = []

    def add(group, player, metric, val):
        rows.append((exp_id, axis, disp, group, player, metric, val))

    for name, g in metrics.groups.items():
        add(name, "group", "win_rate", g.win_rate)
        add(name, "group", "average_profit", g.average_profit)
        add(name, "group", "profit_per_win_q1", g.profit_per_win_q1)
        add(name, "group", "profit_per_win_median", g.profit_per_win_median)
        add(name, "group", "profit_per_win_q3", g.profit_per_win_q3)
        add(name, "group", "negative_profit_wins", g.negative_profit_wins)
    add("auction", "group", "no_winner_rate", metrics.no_winner_rate)
    add("auction", "group", "efficiency_q1", metrics.efficiency_q1)
    add("auction", "group", "efficiency_median", metrics.efficiency_median)
    add("auction", "group", "efficiency_q3", metrics.efficiency_q3)
    add("auction", "group", "efficiency_above_one", metrics.efficiency_above_one)
    return rows


def _player_rows(exp_id, axis, value, metrics):
    disp = None if value is None else value / _AXIS_SCALE.get(axis, 1.0)
    return [
        (exp_id, axis, disp, p.player, p.kind, p.wins, p.win_rate,
         p.average_profit, p.profit_per_win_q1, p.profit_per_win_median,
         p.profit_per_win_q3, p.negative_profit_wins)
        for p in metrics.players
    ]


def _auction_rows(records):
    from .harness import efficiency
    for k, rec in enumerate(records):
        yield (k, "" if rec.winner is None else rec.winner,
               rec.winning_bid, rec.winning_submit_step,
               rec.termination_step, rec.total_signal_at_end,
               efficiency(rec))


def _serialize_config(spec: ExperimentSpec, exp_id: str) -> dict:
    profile = asdict(spec.profile)
    profile["players"] = [
        {**p, "kind": p["kind"].value if isinstance(p["kind"], StrategyKind)
         else p["kind"]}
        for p in profile["players"]
    ]
    return {
        "id": exp_id,
        "signal": asdict(spec.signal),
        "auction": asdict(spec.auction),
        "resolved_profile": profile,
        "sweep": {"axis": spec.sweep_axis, "values": list(spec.sweep_values)},
        "runs_per_point": spec.runs_per_point,
        "master_seed": spec.master_seed,
    }


def _spec_from_manifest(manifest: dict) -> ExperimentSpec:
    cfgdoc = manifest["config"]
    profile_doc = cfgdoc["resolved_profile"]
    templates = tuple(
        PlayerTemplate(
            kind=StrategyKind(p["kind"]),
            individual_delay=p["individual_delay"],
            reveal_gap=p["reveal_gap"],
            access_prob=p["access_prob"],
            profit_margin=p["profit_margin"],
            bluff_level=p["bluff_level"],
            delta=p["delta"],
        )
        for p in profile_doc["players"]
    )
    profile = ProfileSpec(
        name=profile_doc["name"], players=templates,
        pm_range=tuple(profile_doc["pm_range"]),
        access_range=tuple(profile_doc["access_range"]),
        bluff_range=tuple(profile_doc["bluff_range"]),
        shared_pm=profile_doc["shared_pm"],
    )
    return ExperimentSpec(
        profile=profile,
        auction=AuctionConfig(**cfgdoc["auction"]),
        signal=SignalParams(**cfgdoc["signal"]),
        sweep_axis=cfgdoc["sweep"]["axis"],
        sweep_values=tuple(cfgdoc["sweep"]["values"]),
        runs_per_point=cfgdoc["runs_per_point"],
        master_seed=cfgdoc["master_seed"],
    )


def _execute_experiment(spec: ExperimentSpec, exp_id: str, out_dir: Path,
                        workers: int, quiet: bool) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    axis = spec.sweep_axis
    results = []
    values = [None] if axis == "none" else list(spec.sweep_values)
    for idx, value in enumerate(values):
        if not quiet:
            shown = "-" if value is None else _fmt(value)
            print(f"[{idx + 1}/{len(values)}] {axis}={shown} "
                  f"({spec.runs_per_point} runs)", file=sys.stderr)
        from .harness import run_batch
        metrics, records = run_batch(spec, idx, value, workers,
                                     collect_records=True)
        results.append((idx, value, metrics, records))

    summary_rows = []
    player_rows = []
    points = []
    for idx, value, metrics, records in results:
        summary_rows.extend(_summary_rows(exp_id, axis, value, metrics))
        player_rows.extend(_player_rows(exp_id, axis, value, metrics))
        auctions_name = f"auctions_{idx:03d}.csv"
        _write_csv(out_dir / auctions_name,
                   ["auction", "winner", "winning_bid", "t_w_step",
                    "termination_step", "total_signal", "efficiency"],
                   _auction_rows(records))
        disp = None if value is None else value / _AXIS_SCALE.get(axis, 1.0)
        points.append({"index": idx, "axis": axis, "value": disp,
                       "auctions_csv": auctions_name})

    _write_csv(out_dir / "summary.csv",
               ["experiment", "sweep_axis", "sweep_value", "group", "player",
                "metric", "value"], summary_rows)
    _write_csv(out_dir / "players.csv",
               ["experiment", "sweep_axis", "sweep_value", "player", "kind",
                "wins", "win_rate", "average_profit", "profit_per_win_q1",
                "profit_per_win_median", "profit_per_win_q3",
                "negative_profit_wins"], player_rows)

    manifest = {
        "tool": "mevsim",
        "version": __version__,
        "started_utc": started,
        "finished_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "master_seed": spec.master_seed,
        "config": _serialize_config(spec, exp_id),
        "points": points,
        "summary_csv": "summary.csv",
        "players_csv": "players.csv",
    }
    tmp = out_dir / "manifest.json.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, out_dir / "manifest.json")

    if not quiet:
        _print_summary(results, axis)


def _print_summary(results, axis) -> None:
    print(f"{'point':>10} {'group':>12} {'win_rate':>9} {'avg_profit':>12} "
          f"{'ppw_median':>12}")
    for _, value, metrics, _ in results:
        shown = "-" if value is None else f"{value / _AXIS_SCALE.get(axis, 1.0):g}"
        for name, g in metrics.groups.items():
            med = "-" if g.profit_per_win_median is None \
                else f"{g.profit_per_win_median:.3e}"
            print(f"{shown:>10} {name:>12} {g.win_rate:>9.4f} "
                  f"{g.average_profit:>12.3e} {med:>12}")


def _cmd_run(args) -> int:
    spec, exp_id = _load_spec(args)
    if spec.sweep_axis != "none":
        spec = replace(spec, sweep_axis="none", sweep_values=())
    _execute_experiment(spec, exp_id, Path(args.out), args.threads, args.quiet)
    return 0


def _cmd_sweep(args) -> int:
    spec, exp_id = _load_spec(args)
    if args.axis:
        axis = args.axis.replace("-", "_")
        if axis not in SWEEP_AXES or axis == "none":
            raise ConfigError(f"unknown sweep axis: {args.axis!r}")
        values = tuple(v * _AXIS_SCALE.get(axis, 1.0)
                       for v in parse_values(args.values))
        spec = replace(spec, sweep_axis=axis, sweep_values=values)
        _validate_spec(spec)
    if spec.sweep_axis == "none":
        raise ConfigError("sweep requires an axis (config or --axis)")
    _execute_experiment(spec, exp_id, Path(args.out), args.threads, args.quiet)
    return 0


def _cmd_replay(args) -> int:
    with open(args.manifest, encoding="utf-8") as fh:
        manifest = json.load(fh)
    spec = _spec_from_manifest(manifest)
    values = [None] if spec.sweep_axis == "none" else list(spec.sweep_values)
    if not 0 <= args.point < len(values):
        raise ConfigError(f"point index {args.point} out of range")
    if not 0 <= args.auction < spec.runs_per_point:
        raise ConfigError(f"auction index {args.auction} out of range")
    cfg, players, trace, tau = run_single(spec, args.point, args.auction,
                                          values[args.point])
    outcome = run_auction(cfg, players, TraceSignal(trace),
                          termination_step=tau, record_trace=True)
    lines = ["step,player,value"]
    for ev in outcome.accepted_bids:
        lines.append(f"{ev.accept_step},{ev.player},{_fmt(ev.value)}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _load_spec(args) -> tuple[ExperimentSpec, str]:
    doc = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
    if args.profile:
        doc.pop("players", None)
        doc["profile"] = {"name": args.profile}
    spec, exp_id = parse_and_validate(doc)
    if args.runs is not None:
        spec = replace(spec, runs_per_point=args.runs)
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    return spec, exp_id


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--profile", choices=PROFILE_NAMES,
                   help="named profile (overrides config)")
    p.add_argument("--runs", type=int, default=None,
                   help="auctions per sweep point")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--out", default=os.environ.get("MEVSIM_OUT", "results"),
                   help="output directory (or $MEVSIM_OUT)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker processes (1 gives identical results)")
    p.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mevsim",
        description="Agent-based MEV-Boost auction simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single-point experiment")
    _add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="parameter sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--axis", help="sweep axis, e.g. global-delay")
    p_sweep.add_argument("--values", default="",
                         help="start:stop:step or comma list "
                              "(delays in ms, sigma in s)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_replay = sub.add_parser("replay", help="re-run one auction from a manifest")
    p_replay.add_argument("--manifest", required=True)
    p_replay.add_argument("--auction", type=int, required=True,
                          help="run index within the batch")
    p_replay.add_argument("--point", type=int, default=0,
                          help="sweep point index")
    p_replay.add_argument("--out", help="trace CSV path (default stdout)")
    p_replay.set_defaults(func=_cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
