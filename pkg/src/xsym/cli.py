"""Command-line front end: ``xsym sweep|figure|classify|discriminate|evolve``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, presets
from .channels import apply_channel, channel_from_json
from .correlations import bell_f_x, concurrence_x, discord_x
from .errors import DiscriminationError, XSymError
from .qmat import XState, state_from_json

DEFAULT_GRID = "0:1:0.005"
FIGURE_GRID = "0:1:0.002"

EXIT_INPUT = 2
EXIT_DISCRIMINATION = 3


class CLIError(Exception):
    """Input problem detected by the front end itself."""


def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:step`` with both ends included, inside [0, 1]."""
    try:
        a, b, step = (float(v) for v in spec.split(":"))
    except ValueError:
        raise CLIError(f"grid must look like start:stop:step, got {spec!r}") from None
    if not (0.0 <= a <= b <= 1.0) or step <= 0:
        raise CLIError(f"grid {spec!r} must satisfy 0 <= start <= stop <= 1 and step > 0")
    n = int(round((b - a) / step)) + 1
    grid = a + step * np.arange(n)
    grid[-1] = min(grid[-1], b)
    return grid[grid <= b + 1e-12]


def parse_measures(spec: str) -> list:
    ms = [analysis.as_measure(m) for m in spec.split(",") if m.strip()]
    if not ms:
        raise CLIError("--measures must name at least one of C, F, D")
    return ms


def _load_json(text: str):
    path = Path(text)
    if not text.lstrip().startswith(("{", "[")) and path.is_file():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CLIError(f"invalid JSON: {exc}") from None


def load_state(spec: str | None) -> XState:
    if spec is None:
        raise CLIError("--state is required")
    if spec in presets.STATES:
        return presets.STATES[spec]
    return state_from_json(_load_json(spec))


def load_channel(args, required: bool = True):
    if args.channel and args.config:
        raise CLIError("give either --channel or --config, not both")
    spec = args.channel or args.config
    if spec is None:
        if required:
            raise CLIError("--channel or --config is required")
        return None
    obj = _load_json(spec)
    if args.config and isinstance(obj, dict) and "layout" not in obj:
        raise CLIError("--config JSON needs a 'layout' key")
    return channel_from_json(obj)


def _fmt(v: float) -> str:
    return "%.12g" % v


def sweep_csv(result: analysis.SweepResult) -> str:
    cols = result.columns()
    lines = [",".join(name for name, _ in cols)]
    for i in range(len(result.p_grid)):
        lines.append(",".join(_fmt(float(c[i])) for _, c in cols))
    return "\n".join(lines) + "\n"


def sweep_json(result: analysis.SweepResult) -> str:
    return json.dumps({name: [float(v) for v in col] for name, col in result.columns()},
                      indent=1) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- commands ----------------------------------------------------------------------

def cmd_sweep(args) -> int:
    x = load_state(args.state)
    ch = load_channel(args)
    result = analysis.sweep(x, ch, parse_measures(args.measures), parse_grid(args.grid))
    _emit(sweep_csv(result) if args.format == "csv" else sweep_json(result), args.out)
    return 0


def cmd_figure(args) -> int:
    out = Path(args.out or f"figures/fig{args.id}")
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if args.id == "table1":
        rows = presets.table1(n=args.samples, seed=args.seed, grid=parse_grid(args.grid))
        keys = list(rows[0])
        lines = [",".join(keys)] + [",".join(str(r[k]) for k in keys) for r in rows]
        path = out / "table1.csv"
        path.write_text("\n".join(lines) + "\n")
        written.append(str(path))
    else:
        panels, extra = presets.figure_data(args.id, parse_grid(args.grid))
        for panel in panels:
            path = out / f"fig{args.id}_{panel.name}_{panel.kind.value}.csv"
            path.write_text(sweep_csv(panel.data))
            written.append(str(path))
        meta = {"states": {p.name: p.state.to_json() for p in panels}, **extra}
        (out / "meta.json").write_text(_dump(meta))
        written.append(str(out / "meta.json"))
    sys.stdout.write(_dump({"figure": args.id, "files": written}))
    return 0


def cmd_classify(args) -> int:
    x = load_state(args.state)
    ch = load_channel(args)
    report = analysis.symmetry_report(x, ch, parse_grid(args.grid))
    _emit(_dump(report), args.out)
    return 0


def cmd_discriminate(args) -> int:
    hidden = load_channel(args)
    box = analysis.SimulatedBlackBox(hidden)
    result = analysis.discriminate_channel(box)
    _emit(_dump(result.to_json()), args.out)
    return 0


def cmd_evolve(args) -> int:
    x = load_state(args.state)
    ch = load_channel(args)
    y = apply_channel(x, ch)
    out = {"channel": ch.to_json(), "state": y.to_json(),
           "concurrence": concurrence_x(y), "bell": bell_f_x(y)}
    if y.has_real_coherences:
        out["discord"] = discord_x(y)
    _emit(_dump(out), args.out)
    return 0


# -- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--state", help="preset name, JSON file or inline JSON")
    common.add_argument("--channel", help='JSON, e.g. {"kind": "ad", "location": "U", "p": 0.3}')
    common.add_argument("--config", help='JSON, e.g. {"layout": "c", "slots": ["ad", "dep", "ad"]}')
    common.add_argument("--measures", default="C,F,D", help="subset of C,F,D")
    common.add_argument("--grid", default=DEFAULT_GRID, help="start:stop:step")
    common.add_argument("--out", help="output path (directory for 'figure')")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="xsym", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="C/F/D traces for noise on U and on L")
    fig = sub.add_parser("figure", parents=[common], help="data behind a figure or Table 1")
    fig.add_argument("id", choices=sorted(presets.FIGURES) + ["table1"])
    fig.add_argument("--samples", type=int, default=100, help="states per family (table1)")
    sub.add_parser("classify", parents=[common], help="symmetry report as JSON")
    sub.add_parser("discriminate", parents=[common],
                   help="identify a hidden channel given by --channel/--config")
    sub.add_parser("evolve", parents=[common], help="apply a channel at its p")
    return parser


COMMANDS = {"sweep": cmd_sweep, "figure": cmd_figure, "classify": cmd_classify,
            "discriminate": cmd_discriminate, "evolve": cmd_evolve}


def _error(kind: str, message: str, **extra) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "figure" and args.grid == DEFAULT_GRID:
        args.grid = FIGURE_GRID
    try:
        return COMMANDS[args.command](args)
    except DiscriminationError as exc:
        _error(type(exc).__name__, str(exc), candidates=exc.candidates)
        return EXIT_DISCRIMINATION
    except (CLIError, XSymError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        _error(type(exc).__name__, str(msg))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
