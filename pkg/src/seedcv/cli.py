"""Command line entry point: ``seedcv <subcommand> [flags]``.

Exit status is 0 on success, 2 on configuration errors and 3 when the
requested parameters describe an unphysical state. Failures print a single
``error kind=<kind> message=<json string>`` line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .core import UnphysicalStateError
from .countermeasure import monitor_gain, read_monitor_csv
from .experiments import (ConfigError, FIGURES, ScenarioConfig, fmt_param, load_config,
                          parse_grid, parse_list, run_concealment_table, run_estimation_study,
                          run_figure, run_keyrate_sweep, to_csv)
from .seeding import PowerTrace, intensity_from_power_trace, seeding_gain_from_intensities

EXIT_CONFIG = 2
EXIT_UNPHYSICAL = 3


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="INI scenario file")
    parser.add_argument("--out", help="output CSV path (default: stdout)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--g", type=parse_list, help="comma-separated seeding gains")
    parser.add_argument("--eps", type=parse_list, help="comma-separated excess noises (SNU)")
    parser.add_argument("--grid", type=parse_grid, help="distance grid START:STOP:STEP in km")
    parser.add_argument("--n", type=lambda s: parse_list(s, int), help="Monte Carlo sample counts")
    parser.add_argument("--workers", type=int, help="worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seedcv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("figure", help="key-rate data for figure 3, 5 or 6")
    p.add_argument("figure_id", type=int, choices=sorted(FIGURES))
    _common(p)

    p = sub.add_parser("keyrate", help="estimated vs practical key-rate sweep")
    p.add_argument("--protocol", choices=("oneway", "mdi"))
    p.add_argument("--topology", choices=("symmetric", "asymmetric"))
    _common(p)

    p = sub.add_parser("estimate", help="Monte Carlo channel-estimation study")
    p.add_argument("--u", type=float, help="intercept-resend fraction on the Alice link")
    _common(p)

    p = sub.add_parser("conceal", help="seeding gain needed to hide intercept-resend noise")
    p.add_argument("--eps-t", type=float, default=0.1, help="technical excess noise (SNU)")
    p.add_argument("--u", type=parse_list, default=(0.0, 0.1, 0.2, 0.5, 1.0))
    _common(p)

    p = sub.add_parser("monitor", help="seeding gain from monitored LO intensities")
    p.add_argument("readings", help="CSV with timestamp,source_id,intensity")
    _common(p)

    p = sub.add_parser("intensity", help="pulse intensity from a sampled power trace")
    p.add_argument("trace", help="CSV with t,P columns")
    p.add_argument("--period", type=float, required=True)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--reference-trace", help="un-attacked trace; adds the seeding gain")
    _common(p)
    return parser


def _scenario(args, base: ScenarioConfig | None = None) -> ScenarioConfig:
    overrides = load_config(args.config) if args.config else {}
    for name in ("seed", "g", "eps", "grid", "n", "workers"):
        val = getattr(args, name, None)
        if val is not None:
            overrides[name] = val
    for name in ("protocol", "topology", "u"):
        val = getattr(args, name, None)
        if val is not None:
            overrides[name] = val
    if args.out:
        overrides["out"] = args.out
    return replace(base, **overrides) if base else ScenarioConfig(**overrides)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run(args) -> None:
    cmd = args.command
    if cmd == "figure":
        cfg = _scenario(args, FIGURES[args.figure_id])
        _emit(to_csv(*run_figure(args.figure_id, **_as_overrides(cfg))), cfg.out)
    elif cmd == "keyrate":
        cfg = _scenario(args)
        _emit(to_csv(*run_keyrate_sweep(cfg)), cfg.out)
    elif cmd == "estimate":
        cfg = _scenario(args)
        _emit(to_csv(*run_estimation_study(cfg)), cfg.out)
    elif cmd == "conceal":
        eps = args.eps[0] if args.eps else args.eps_t
        _emit(to_csv(*run_concealment_table(eps, args.u)), args.out)
    elif cmd == "monitor":
        cfg = _scenario(args)
        try:
            readings = read_monitor_csv(args.readings, cfg.references)
        except (KeyError, ValueError, OSError) as exc:
            raise ConfigError(str(exc).strip('"')) from exc
        rows = []
        for r in readings:
            gr = monitor_gain(r)
            rows.append((fmt_param(r.timestamp), r.source_id, fmt_param(r.I_measured),
                         fmt_param(r.I_reference), fmt_param(gr.g), str(int(gr.below_reference))))
        header = ("timestamp", "source_id", "intensity", "reference", "g", "below_reference")
        _emit(to_csv(header, rows), cfg.out)
    elif cmd == "intensity":
        try:
            trace = PowerTrace.from_csv(args.trace, args.period, args.mu)
            I = intensity_from_power_trace(trace)
            header, row = ["intensity"], [fmt_param(I)]
            if args.reference_trace:
                ref = PowerTrace.from_csv(args.reference_trace, args.period, args.mu)
                I0 = intensity_from_power_trace(ref)
                header += ["reference_intensity", "g"]
                row += [fmt_param(I0), fmt_param(seeding_gain_from_intensities(I, I0))]
        except (ValueError, OSError) as exc:
            raise ConfigError(str(exc)) from exc
        _emit(to_csv(header, [row]), args.out)


def _as_overrides(cfg: ScenarioConfig) -> dict:
    return {f: getattr(cfg, f) for f in cfg.__dataclass_fields__}


def _fail(kind: str, exc: BaseException, code: int) -> int:
    print(f"error kind={kind} message={json.dumps(str(exc))}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _run(args)
    except ConfigError as exc:
        return _fail("config", exc, EXIT_CONFIG)
    except UnphysicalStateError as exc:
        return _fail("unphysical", exc, EXIT_UNPHYSICAL)
    return 0


if __name__ == "__main__":
    sys.exit(main())
