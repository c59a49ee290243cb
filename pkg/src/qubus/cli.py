"""Command-line front end.

Every subcommand reads the same flat config format, honours --seed and
--out overrides, and writes CSV with fixed 17-digit float formatting so
identical inputs reproduce identical bytes.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .chain import (
    McResult,
    connection_redundancy,
    mc_distribute,
    memory_space,
    t_tot,
)
from .config import (
    ConfigError,
    RunConfig,
    chain_params,
    link_params,
    load_config,
    qnd_params,
    source_state,
)
from .link import p_g_exact, fig3_sweep, simulate_attempts
from .optics import DetectorParams
from .parity import verify_circuit
from .qnd import QndParams, comparison_error, comparison_success, purify_source

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

TABLE_FREQUENCIES_HZ = (1330.0, 40.0e3, 1.0e6, 1.0e7, 1.0e8)
FIG4_DISTANCES_KM = (150.0, 300.0, 600.0, 1200.0, 2400.0)
FIG4_DEFAULT_PAIRS = ((40.0e3, 0.5), (1.0e6, 0.5), (40.0e3, 1.0), (1.0e6, 1.0))
DARK_RATE_SWEEP = (0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4)

LINK_TRIALS_DEFAULT = 100_000
CHAIN_TRIALS_DEFAULT = 200


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_lines(path: Path, lines: list[str]) -> None:
    path.write_text("".join(line + "\n" for line in lines))


def _csv(header: str, rows: list[tuple]) -> list[str]:
    return [header] + [",".join(_fmt(v) for v in row) for row in rows]


def _out_path(args, default_name: str) -> Path:
    return Path(args.out) if args.out else Path(default_name)


def cmd_purify(args) -> int:
    cfg = _config(args)
    q = qnd_params(cfg)
    src = source_state(cfg)
    p_success = comparison_success(q)
    click, fidelity = purify_source(src, q)
    lines = [
        "# source purification by nondemolition comparison",
        f"P_S = {_fmt(p_success)}",
        f"P_E = {_fmt(comparison_error(q))}",
        f"click_prob = {_fmt(click)}",
        f"cond_fidelity = {_fmt(fidelity)}",
    ]
    if args.sweep_dark:
        lines.append("")
        lines.append("lambda_dark,click_prob,cond_fidelity")
        for lam in DARK_RATE_SWEEP:
            det = DetectorParams(eta_D=q.det.eta_D, lambda_dark=lam)
            c, f = purify_source(src, QndParams(q.alpha0, q.theta, det=det))
            lines.append(f"{_fmt(lam)},{_fmt(c)},{_fmt(f)}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_fig3(args) -> int:
    _config(args)  # validate the file even though the sweep grid is fixed
    rows = fig3_sweep()
    out = _out_path(args, "fig3.csv")
    _write_lines(out, _csv("L0_km,F,P_g", rows))
    print(f"wrote {out} ({len(rows)} rows)")
    return EXIT_OK


def cmd_table(args) -> int:
    cfg = _config(args)
    rows = []
    for f in TABLE_FREQUENCIES_HZ:
        p = chain_params(cfg, f_hz=f)
        rows.append((f, t_tot(p), memory_space(p, "rate-limited")))
    out = _out_path(args, "table.csv")
    _write_lines(out, _csv("f_hz,T_tot_s,M_E", rows))
    print(f"wrote {out} ({len(rows)} rows)")
    print()
    print(f"{'f_hz':>12}  {'T_tot_s':>12}  {'M_E':>10}")
    for f, t, m in rows:
        print(f"{f:>12g}  {t:>12.4g}  {m:>10d}")
    return EXIT_OK


def cmd_fig4(args) -> int:
    cfg = _config(args)
    if cfg.was_provided("f_hz") or cfg.was_provided("P_c"):
        pairs = ((cfg.f_hz, cfg.P_c),)
    else:
        pairs = FIG4_DEFAULT_PAIRS
    rows = []
    for f, pc in pairs:
        for L in FIG4_DISTANCES_KM:
            p = chain_params(cfg, L_km=L, f_hz=f, P_c=pc)
            rows.append((L, f, pc, t_tot(p), L / cfg.c_km_s))
    out = _out_path(args, "fig4.csv")
    _write_lines(out, _csv("L_km,f_hz,P_c,T_tot_s,classical_s", rows))
    print(f"wrote {out} ({len(rows)} rows)")
    return EXIT_OK


def cmd_verify_circuit(args) -> int:
    report = verify_circuit()
    text = report.render()
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    return EXIT_OK if report.all_ok else EXIT_VERIFY_FAILED


def cmd_mc(args) -> int:
    cfg = _config(args)
    seed = args.seed if args.seed is not None else cfg.seed
    trials = args.trials if args.trials is not None else LINK_TRIALS_DEFAULT
    if trials < 1:
        raise ConfigError("--trials must be >= 1")

    lp = link_params(cfg)
    hh = np.array([1.0, 0.0, 0.0, 0.0])
    batch = simulate_attempts(hh, lp, trials, np.random.default_rng(seed))

    cp = chain_params(cfg)
    result = mc_distribute(cp, seed, CHAIN_TRIALS_DEFAULT)

    rows: list[tuple] = [
        ("link", "trials", batch.trials),
        ("link", "successes", batch.successes),
        ("link", "success_rate", batch.success_rate),
        ("link", "model_success_prob", batch.statistics.success_prob),
        ("link", "p_g_exact", p_g_exact(lp)),
        ("chain", "trials", result.trials),
        ("chain", "completed", result.completed),
        ("chain", "failures", result.failures),
        ("chain", "mean_time_s", result.mean_time_s),
        ("chain", "t_tot_bound_s", t_tot(cp)),
        ("chain", "classical_floor_s", cp.L_km / cp.c_km_s),
        ("chain", "redundancy", connection_redundancy(cp.P_c)),
    ]
    for level, count in enumerate(result.failures_by_level):
        if level == 0:
            continue
        rows.append(("chain", f"failures_level_{level}", count))
    for i, (lo, hi, count) in enumerate(result.histogram):
        rows.append(("chain", f"hist_{i}_lo_s", lo))
        rows.append(("chain", f"hist_{i}_hi_s", hi))
        rows.append(("chain", f"hist_{i}_count", count))

    out = _out_path(args, "mc.csv")
    _write_lines(out, _csv("kind,name,value", rows))
    events_path = out.with_name(out.stem + "_events.log")
    _write_events(events_path, result)
    print(f"wrote {out} ({len(rows)} rows)")
    print(f"wrote {events_path} ({len(result.events)} events)")
    return EXIT_OK


def _write_events(path: Path, result: McResult) -> None:
    lines = ["# event log, first trial"]
    for i, rec in enumerate(result.events):
        lines.append(f"# event {i}")
        lines.append(f"time_s = {_fmt(rec.time_s)}")
        lines.append(f"station = {rec.station}")
        lines.append(f"kind = {rec.kind}")
        if rec.info:
            lines.append(f"info = {rec.info}")
    _write_lines(path, lines)


def _config(args) -> RunConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = RunConfig(
            **{k: getattr(cfg, k) for k in cfg.__dataclass_fields__ if k not in ("seed", "provided")},
            seed=args.seed,
            provided=cfg.provided | {"seed"},
        )
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubus",
        description="Bus-mediated repeater models: link heralding, swap circuit, chain timing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="output path")

    p = sub.add_parser("purify", help="heralded source figures of merit")
    common(p)
    p.add_argument("--sweep-dark", action="store_true", help="append a dark-rate sweep")
    p.set_defaults(func=cmd_purify)

    p = sub.add_parser("fig3", help="success probability vs link fidelity CSV")
    common(p)
    p.set_defaults(func=cmd_fig3)

    p = sub.add_parser("table", help="distribution time and memory table CSV")
    common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("fig4", help="distribution time vs distance CSV")
    common(p)
    p.set_defaults(func=cmd_fig4)

    p = sub.add_parser("verify-circuit", help="run the swap-circuit invariant suite")
    common(p)
    p.set_defaults(func=cmd_verify_circuit)

    p = sub.add_parser("mc", help="seeded link and chain Monte Carlo")
    common(p)
    p.add_argument("--trials", type=int, help="link attempts to sample")
    p.set_defaults(func=cmd_mc)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
