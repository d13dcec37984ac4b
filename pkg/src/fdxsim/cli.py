"""Command-line driver: validate configs, run sweeps, emit figure data.

Exit codes: 0 success, 1 configuration problem, 2 I/O failure.  Output
files are written atomically (temp file, then rename), so a failed run
never leaves a truncated CSV or JSON behind.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

try:
    import tomllib
except ModuleNotFoundError:  # python 3.10
    import tomli as tomllib

from . import params as params_mod
from .cancellation import PlacementStrategy
from .montecarlo import (
    Scheme,
    SweepResult,
    SweepSpec,
    SweepVariable,
    run_sweep,
    write_csv,
    write_json,
)
from .params import ParamsError, SystemParams


class ConfigError(ValueError):
    pass


_SWEEP_KEYS = {"name", "variable", "values", "n_runs", "seed", "strategy"}
_SERIES_KEYS = {"scheme", "n_taps"}


def _require_keys(table: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys in [{where}]: {', '.join(unknown)}")


def load_config(path: str) -> dict:
    """Parse and sanity-check a sweep configuration file."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}")

    _require_keys(raw, {"params", "sweep", "series"}, "top level")
    try:
        base = params_mod.from_mapping(raw.get("params", {}))
    except ParamsError as exc:
        raise ConfigError(str(exc))

    sweep = raw.get("sweep")
    if not isinstance(sweep, dict):
        raise ConfigError("missing [sweep] table")
    _require_keys(sweep, _SWEEP_KEYS, "sweep")
    try:
        variable = SweepVariable(sweep["variable"])
        strategy = PlacementStrategy(sweep.get("strategy", "row_wise"))
        values = tuple(sweep["values"])
        n_runs = int(sweep["n_runs"])
        seed = int(sweep["seed"])
        name = str(sweep.get("name") or os.path.splitext(os.path.basename(path))[0])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad [sweep] table: {exc}")

    series_raw = raw.get("series")
    if not series_raw:
        raise ConfigError("at least one [[series]] entry is required")
    series = []
    for entry in series_raw:
        _require_keys(entry, _SERIES_KEYS, "series")
        try:
            scheme = Scheme(entry["scheme"])
        except (KeyError, ValueError):
            raise ConfigError(f"series entry needs scheme in "
                              f"{[s.value for s in Scheme]}: {entry}")
        series.append((scheme, int(entry.get("n_taps", base.n_taps))))

    return {
        "name": name,
        "base": base,
        "variable": variable,
        "values": values,
        "n_runs": n_runs,
        "seed": seed,
        "strategy": strategy,
        "series": series,
    }


def build_sweep_specs(config: dict) -> list[SweepSpec]:
    """Group series sharing a tap budget into one spec each.

    Schemes with the same budget see identical channel realizations and
    are computed from the same runs, in the order listed.
    """
    groups: dict[int, list[Scheme]] = {}
    order: list[int] = []
    for scheme, n_taps in config["series"]:
        if n_taps not in groups:
            groups[n_taps] = []
            order.append(n_taps)
        groups[n_taps].append(scheme)

    specs = []
    for n_taps in order:
        base = params_mod.validate(replace(config["base"], n_taps=n_taps))
        specs.append(
            SweepSpec(
                variable=config["variable"],
                values=config["values"],
                n_runs=config["n_runs"],
                base=base,
                strategy=config["strategy"],
                schemes=tuple(groups[n_taps]),
                seed=config["seed"],
            )
        )
    return specs


def _summary_table(results: list[SweepResult]) -> str:
    header = f"{'value':>12} {'scheme':>14} {'mean_rate':>12} {'stderr':>10} " \
             f"{'mean_mse':>12} {'feas':>6} {'runs':>6}"
    lines = [header]
    for result in results:
        for row in result.rows:
            lines.append(
                f"{row.value:>12} {row.scheme:>14} {row.mean_rate:>12.4f} "
                f"{row.stderr_rate:>10.4f} {row.mean_mse:>12.3e} "
                f"{row.feasible_frac:>6.3f} {row.n_runs:>6}"
            )
    return "\n".join(lines)


def _execute(config: dict, outdir: str, quiet: bool) -> None:
    results = [run_sweep(spec) for spec in build_sweep_specs(config)]
    try:
        os.makedirs(outdir, exist_ok=True)
        csv_path = os.path.join(outdir, config["name"] + ".csv")
        json_path = os.path.join(outdir, config["name"] + ".json")
        write_csv(results, csv_path)
        write_json(results, json_path)
    except OSError as exc:
        raise _IoFailure(str(exc))
    if not quiet:
        print(f"wrote {csv_path} and {json_path}")
        print(_summary_table(results))


class _IoFailure(Exception):
    pass


def _apply_overrides(config: dict, args: argparse.Namespace) -> dict:
    config = dict(config)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.runs is not None:
        if args.runs < 1:
            raise ConfigError("--runs must be >= 1")
        config["n_runs"] = args.runs
    return config


def cmd_run(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_config(args.config), args)
    _execute(config, args.out, args.quiet)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    base = config["base"]
    print(f"config ok: sweep '{config['name']}' over {config['variable'].value} "
          f"({len(config['values'])} points x {config['n_runs']} runs, "
          f"{len(config['series'])} series)")
    print(f"saturation thresholds: BS {base.lambda_b_dbm:.2f} dBm, "
          f"UE {base.lambda_u_dbm:.2f} dBm")
    return 0


def preset_path(name: str) -> str:
    return os.path.join(os.path.dirname(__file__), "presets", name)


def cmd_figures(args: argparse.Namespace) -> int:
    for preset in ("fig2.toml", "fig3.toml", "fig4.toml"):
        config = _apply_overrides(load_config(preset_path(preset)), args)
        if not args.quiet:
            print(f"== {config['name']} ==")
        _execute(config, args.out, args.quiet)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdxsim",
        description="Full-duplex MIMO link simulator: Monte Carlo sweeps "
                    "of achievable rate and channel-estimation MSE.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config):
        if needs_config:
            p.add_argument("--config", required=True, help="sweep config (TOML)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override master seed")
        p.add_argument("--runs", type=int, default=None, help="override runs per point")
        p.add_argument("--quiet", action="store_true", help="suppress summary output")

    common(sub.add_parser("run", help="run the sweep described by a config file"), True)
    p_val = sub.add_parser("validate", help="check a config file and report")
    p_val.add_argument("--config", required=True, help="sweep config (TOML)")
    common(sub.add_parser("figures", help="run the three bundled figure sweeps"), False)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": cmd_run, "validate": cmd_validate, "figures": cmd_figures}
    try:
        return handlers[args.command](args)
    except (ConfigError, ParamsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _IoFailure as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
