"""Command-line front end for the sweep presets.

Usage:
    simulate <preset> [--set key=value]... [--config file] [--out path]
             [--jobs n] [--nmax k] [--plot]

``--set`` accepts three value forms: a number (pins a fixed parameter, or
degenerates an axis to a single point), a lo:hi:steps triple (overrides an
axis grid), and true/false for flags.  ``--config`` reads the same key=value
pairs from a file, one per line, with # comments; command-line --set entries
win over the file.

Exit codes: 0 on success, 1 for configuration errors, 2 when any grid point
failed at run time (its rows carry the message in the ``note`` column; the
CSV is still written in full).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .plotting import render_heatmap
from .sweep import PRESETS, build_config, emit_csv, error_rows, run_sweep

# key aliases accepted in --set and config files
_ALIASES = {"N": "n_subtract", "T": "coupler_t"}

# metrics compared against the classical two-thirds threshold when plotting
_FIDELITY_METRICS = {"fidelity", "f_avg"}
CLASSICAL_THRESHOLD = 2.0 / 3.0


class _ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse default exits 2
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_value(text: str):
    """Value grammar: lo:hi:steps axis triple, true/false, or a number."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise _ConfigError(f"axis override must be lo:hi:steps, got {text!r}")
        try:
            return (float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise _ConfigError(f"bad axis override {text!r}: {exc}") from exc
    low = text.strip().lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return float(text)
    except ValueError as exc:
        raise _ConfigError(f"expected a number, true/false, or lo:hi:steps, got {text!r}") from exc


def _parse_pair(item: str) -> tuple[str, object]:
    if "=" not in item:
        raise _ConfigError(f"expected key=value, got {item!r}")
    key, _, raw = item.partition("=")
    key = key.strip()
    if not key:
        raise _ConfigError(f"empty key in {item!r}")
    return _ALIASES.get(key, key), _parse_value(raw.strip())


def _read_config_file(path: str) -> dict:
    out: dict = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise _ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        try:
            key, val = _parse_pair(stripped)
        except _ConfigError as exc:
            raise _ConfigError(f"{path}:{lineno}: {exc}") from exc
        out[key] = val
    return out


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(
        prog="simulate",
        description="Run a pipeline sweep preset and write its CSV table.",
        epilog="Presets: " + "; ".join(f"{n}: {s.doc}" for n, s in sorted(PRESETS.items())),
    )
    parser.add_argument("preset", help="preset name (see below)")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        dest="assignments",
        help="override a parameter or axis (repeatable)",
    )
    parser.add_argument("--config", help="key=value file applied before --set")
    parser.add_argument("--out", help="output CSV path (default <preset>.csv)")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    parser.add_argument("--nmax", type=int, help="per-mode photon-number cutoff (default 10)")
    parser.add_argument("--plot", action="store_true", help="also render a heatmap PNG")
    args = parser.parse_args(argv)

    try:
        overrides: dict = {}
        if args.config:
            overrides.update(_read_config_file(args.config))
        for item in args.assignments:
            key, val = _parse_pair(item)
            overrides[key] = val
        if args.nmax is not None:
            overrides["n_max"] = args.nmax
        overrides["jobs"] = args.jobs
        config = build_config(args.preset, overrides)
    except (_ConfigError, KeyError, ValueError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"simulate: error: {msg}", file=sys.stderr)
        return 1

    out_path = Path(args.out) if args.out else Path(f"{args.preset}.csv")
    table = run_sweep(config)
    try:
        emit_csv(table, out_path)
    except OSError as exc:
        print(f"simulate: error: cannot write {out_path}: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(table.rows)} rows to {out_path}")

    if args.plot:
        spec = PRESETS[config.preset]
        level = CLASSICAL_THRESHOLD if spec.metric in _FIDELITY_METRICS else None
        base = out_path.with_suffix("") if out_path.suffix == ".csv" else out_path
        png = base.with_suffix(".png")
        contour_csv = Path(f"{base}.contour.csv") if level is not None else None
        n = render_heatmap(
            table,
            table.axis_names[0],
            table.axis_names[1],
            spec.metric,
            level,
            png,
            contour_csv_path=contour_csv,
        )
        print(f"wrote {png}" + (f" and {contour_csv} ({n} vertices)" if contour_csv else ""))

    failures = error_rows(table)
    if failures:
        for row in failures[:10]:
            print(f"simulate: point {row.axis_values}: {row.note}", file=sys.stderr)
        if len(failures) > 10:
            print(f"simulate: ... {len(failures) - 10} more failed points", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
