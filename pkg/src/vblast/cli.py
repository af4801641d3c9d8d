"""Command-line sweeps that regenerate the figure data as CSV.

    vblast pdf       --t 3 --r 4 --layers 2,3 --trials 1e6 --seed 7
    vblast outage    --t 3 --r 4 --rate 1 --rho-db 0:25:26
    vblast capacity  --t 3 --r 4 --eps 0.1 --rho-db 0:25:26
    vblast waterfill --t 3 --r 4 --rho-db 5 --eps 0.01:0.5:50
    vblast simulate  --t 3 --r 4 --trials 1e5 --seed 1 --out gains.csv
    vblast verify    [--quick]

Options may also come from ``--config FILE`` (``key = value`` lines, keys
named like the long options); command-line flags win.  A sweep is written
``start:stop:points``; ``--scale`` picks linear, log or dB spacing for
``--rho``.

Exit codes: 0 success, 1 invalid configuration, 2 numerical failure,
3 verification failure.
"""

import argparse
import shlex
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .distribution import LayerLaw, NoOrderingLaw
from .errors import NumericError, ParameterError
from .power import (db_to_linear, eps_outage_capacity, layer_thresholds, linear_to_db,
                    outage_probability, waterfill_gains)
from .quadrature import QuadratureSettings
from .simulator import default_workers, histogram, simulate_gains

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3


class ConfigError(Exception):
    """Invalid run configuration; the message names the offending field."""


@dataclass
class ResultTable:
    columns: list
    rows: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("duplicate column names")
        if self.rows.size and self.rows.shape[1] != len(self.columns):
            raise ValueError("row width does not match header")

    def write(self, fh):
        for key, value in self.meta.items():
            fh.write(f"# {key}: {value}\n")
        fh.write(",".join(self.columns) + "\n")
        if self.rows.size:
            np.savetxt(fh, self.rows, fmt="%.9g", delimiter=",")


# --------------------------------------------------------------------------
# parsing helpers

@dataclass(frozen=True)
class Axis:
    """Parsed scalar-or-sweep option."""

    values: np.ndarray
    swept: bool
    text: str


def parse_axis(text, name, scale="linear"):
    """``'5'`` -> one value; ``'0:25:26'`` -> 26 points.

    ``scale='db'`` reads the numbers as dB and returns linear values;
    ``scale='log'`` spaces the points geometrically.
    """
    try:
        parts = [float(p) for p in str(text).split(":")]
    except ValueError:
        raise ConfigError(f"--{name}: cannot parse {text!r}") from None
    if len(parts) == 1:
        vals = np.array(parts)
    elif len(parts) == 3:
        start, stop, points = parts
        if points < 1 or points != int(points):
            raise ConfigError(f"--{name}: point count must be a positive integer")
        if scale == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError(f"--{name}: log sweep needs positive bounds")
            vals = np.geomspace(start, stop, int(points))
        else:
            vals = np.linspace(start, stop, int(points))
    else:
        raise ConfigError(f"--{name}: expected a number or start:stop:points, got {text!r}")
    if scale == "db":
        vals = db_to_linear(vals)
    return Axis(vals, len(parts) == 3, str(text))


def _count(text, name):
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"--{name}: not a number: {text!r}") from None
    if v != int(v):
        raise ConfigError(f"--{name}: must be an integer, got {text!r}")
    return int(v)


def read_config(path):
    cfg = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value")
                key, value = (s.strip() for s in line.split("=", 1))
                cfg[key.replace("-", "_")] = value
    except OSError as exc:
        raise ConfigError(f"--config: {exc}") from None
    return cfg


def _common(p, trials_default):
    p.add_argument("--t", default="3", help="transmit antennas")
    p.add_argument("--r", default="4", help="receive antennas")
    p.add_argument("--seed", default="0")
    p.add_argument("--trials", default=str(trials_default), help="Monte Carlo trials (1e6 ok)")
    p.add_argument("--workers", default=None, help="threads for Monte Carlo (env VBLAST_WORKERS)")
    p.add_argument("--nodes", default="16", help="initial quadrature nodes per axis")
    p.add_argument("--rel-tol", default="1e-9", help="quadrature relative tolerance")
    p.add_argument("--gamma-max", default=None, help="initial inverse-CDF bracket")
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.add_argument("--config", default=None, help="key = value file; flags override it")


def build_parser():
    parser = argparse.ArgumentParser(prog="vblast", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pdf", help="marginal layer-gain PDFs (+ MC histograms)")
    _common(p, 0)
    p.add_argument("--layers", default="2,3")
    p.add_argument("--bins", default="100")
    p.add_argument("--range", default="0:12", help="lo:hi of the histogram / x grid")

    p = sub.add_parser("outage", help="per-layer outage probability vs power")
    _common(p, 0)
    p.add_argument("--rate", default="1", help="target rate per layer, bits/s/Hz")
    p.add_argument("--rho-db", default=None, help="total power sweep in dB")
    p.add_argument("--rho", default=None, help="total power sweep, see --scale")
    p.add_argument("--scale", default="db", choices=["db", "linear", "log"])

    p = sub.add_parser("capacity", help="per-layer eps-outage capacity, greedy vs no ordering")
    _common(p, 0)
    p.add_argument("--eps", default="0.1")
    p.add_argument("--rho-db", default=None)
    p.add_argument("--rho", default=None)
    p.add_argument("--scale", default="db", choices=["db", "linear", "log"])
    p.add_argument("--power", default="uniform", choices=["uniform", "waterfill"])

    p = sub.add_parser("waterfill", help="1/F^-1(eps), water level and powers")
    _common(p, 0)
    p.add_argument("--eps", default="0.01:0.5:50")
    p.add_argument("--rho-db", default=None)
    p.add_argument("--rho", default=None)
    p.add_argument("--scale", default="db", choices=["db", "linear", "log"])

    p = sub.add_parser("simulate", help="raw greedy gain samples or their ECDFs")
    _common(p, 100000)
    p.add_argument("--m", default=None, help="leading layers to keep (default t)")
    p.add_argument("--ecdf", default=None, help="x sweep; emit ECDF columns instead of samples")

    p = sub.add_parser("verify", help="run every analytic-vs-oracle check")
    _common(p, 10**6)
    p.add_argument("--quick", action="store_true", help="1e5 trials and fewer oracle draws")
    return parser


# --------------------------------------------------------------------------
# run configuration

@dataclass
class RunConfig:
    command: str
    t: int
    r: int
    seed: int
    trials: int
    workers: int
    quad: QuadratureSettings
    out: str
    raw: dict

    def law(self):
        return LayerLaw(self.t, self.r, quad=self.quad)

    def echo(self):
        skip = {"command", "config", "out"}
        args = [self.command]
        for key, value in sorted(self.raw.items()):
            if key in skip or value is None or value is False:
                continue
            flag = "--" + key.replace("_", "-")
            args += [flag] if value is True else [flag, str(value)]
        return "vblast " + " ".join(shlex.quote(a) for a in args)


def resolve(argv):
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.config:
        cfg = read_config(ns.config)
        sub = parser._subparsers._group_actions[0].choices[ns.command]
        known = {a.dest for a in sub._actions}
        unknown = set(cfg) - known
        if unknown:
            raise ConfigError(f"--config: unknown key(s) {sorted(unknown)}")
        sub.set_defaults(**{k: (v.lower() in ("1", "true", "yes") if k == "quick" else v)
                            for k, v in cfg.items()})
        ns = parser.parse_args(argv)
    raw = {k: v for k, v in vars(ns).items()}

    t, r = _count(ns.t, "t"), _count(ns.r, "r")
    if not 1 <= t <= r:
        raise ConfigError(f"--t/--r: need 1 <= t <= r, got t={t}, r={r}")
    trials = _count(ns.trials, "trials")
    if trials < 0:
        raise ConfigError("--trials: must be >= 0")
    workers = default_workers() if ns.workers is None else _count(ns.workers, "workers")
    if workers < 1:
        raise ConfigError("--workers: must be >= 1")
    try:
        quad = QuadratureSettings(
            nodes=_count(ns.nodes, "nodes"),
            rel_tol=float(ns.rel_tol),
            gamma_max=None if ns.gamma_max is None else float(ns.gamma_max))
    except ParameterError as exc:
        raise ConfigError(f"quadrature settings: {exc}") from None
    except ValueError:
        raise ConfigError("--rel-tol/--gamma-max: not a number") from None
    return RunConfig(ns.command, t, r, _count(ns.seed, "seed"), trials, workers, quad,
                     ns.out, raw)


def _power_axis(cfg, default):
    raw = cfg.raw
    if raw.get("rho_db") is not None and raw.get("rho") is not None:
        raise ConfigError("--rho/--rho-db: give only one")
    if raw.get("rho_db") is not None:
        ax = parse_axis(raw["rho_db"], "rho-db", "db")
    elif raw.get("rho") is not None:
        ax = parse_axis(raw["rho"], "rho", raw.get("scale", "db"))
    else:
        ax = parse_axis(default, "rho-db", "db")
    if np.any(ax.values <= 0):
        raise ConfigError("--rho: powers must be positive")
    return ax


def _eps_axis(cfg):
    ax = parse_axis(cfg.raw["eps"], "eps")
    if np.any(ax.values <= 0) or np.any(ax.values >= 1):
        raise ConfigError("--eps: values must lie in (0, 1)")
    return ax


def _meta(cfg):
    return {"vblast": __version__, "numpy": np.__version__, "config": cfg.echo()}


# --------------------------------------------------------------------------
# subcommands

def cmd_pdf(cfg):
    try:
        layers = [int(v) for v in str(cfg.raw["layers"]).split(",") if v.strip()]
    except ValueError:
        raise ConfigError("--layers: expected a comma-separated list of integers") from None
    if not layers or any(not 1 <= v <= cfg.t for v in layers):
        raise ConfigError(f"--layers: each layer must lie in 1..{cfg.t}")
    bins = _count(cfg.raw["bins"], "bins")
    try:
        lo, hi = (float(v) for v in str(cfg.raw["range"]).split(":"))
    except ValueError:
        raise ConfigError(f"--range: expected lo:hi, got {cfg.raw['range']!r}") from None
    if bins < 1 or not hi > lo >= 0:
        raise ConfigError("--bins/--range: need bins >= 1 and 0 <= lo < hi")
    edges = np.linspace(lo, hi, bins + 1)
    centers = 0.5 * (edges[1:] + edges[:-1])
    law = cfg.law()
    cols, data = ["x"], [centers]
    samples = None
    if cfg.trials:
        samples = simulate_gains(cfg.t, cfg.r, max(layers), cfg.trials, cfg.seed, cfg.workers)
    for layer in layers:
        cols.append(f"pdf_layer{layer}")
        data.append(_sweep(lambda x: law.pdf(layer, x), centers, "x"))
        if samples is not None:
            _, dens = histogram(samples, layer, bins, (lo, hi))
            cols.append(f"hist_layer{layer}")
            data.append(dens)
    return ResultTable(cols, np.column_stack(data), _meta(cfg))


def _sweep(fn, values, label):
    out = []
    for v in values:
        try:
            out.append(fn(v))
        except NumericError as exc:
            raise NumericError(f"{exc} (at {label}={v:.9g})", exc.estimate) from exc
    return np.array(out)


def _x_column(ax, name):
    if name == "rho":
        return "rho_db", linear_to_db(ax.values)
    return name, ax.values


def cmd_outage(cfg):
    try:
        rate = float(cfg.raw["rate"])
    except ValueError:
        raise ConfigError("--rate: not a number") from None
    if rate <= 0:
        raise ConfigError("--rate: must be positive")
    ax = _power_axis(cfg, "0:25:26")
    law = cfg.law()
    name, xcol = _x_column(ax, "rho")
    cols, data = [name], [xcol]
    for layer in range(1, cfg.t + 1):
        cols.append(f"pout_layer{layer}")
        data.append(_sweep(lambda p: outage_probability(law, layer, rate, p / cfg.t),
                           ax.values, "rho"))
    return ResultTable(cols, np.column_stack(data), _meta(cfg))


def _one_swept(eps_ax, rho_ax):
    if eps_ax.swept and rho_ax.swept:
        raise ConfigError("--eps/--rho: sweep at most one of them")
    return ("eps", eps_ax) if eps_ax.swept else ("rho", rho_ax)


def cmd_capacity(cfg):
    eps_ax = _eps_axis(cfg)
    rho_ax = _power_axis(cfg, "0:25:26")
    name, ax = _one_swept(eps_ax, rho_ax)
    law, base = cfg.law(), NoOrderingLaw(cfg.t, cfg.r)
    waterfilled = cfg.raw["power"] == "waterfill"
    rows = []
    for eps in eps_ax.values:
        for rho in rho_ax.values:
            row = []
            try:
                for model in (law, base):
                    g = layer_thresholds(model, eps)
                    p = waterfill_gains(g, rho).powers if waterfilled else np.full(cfg.t, rho / cfg.t)
                    caps = [eps_outage_capacity(model, i, eps, p[i - 1])
                            for i in range(1, cfg.t + 1)]
                    row += caps + [sum(caps)]
            except NumericError as exc:
                raise NumericError(f"{exc} (at eps={eps:.9g}, rho={rho:.9g})", exc.estimate) from exc
            rows.append(row)
    xname, xcol = _x_column(ax, name)
    cols = [xname]
    for tag in ("greedy", "noorder"):
        cols += [f"{tag}_layer{i}" for i in range(1, cfg.t + 1)] + [f"{tag}_sum"]
    return ResultTable(cols, np.column_stack([xcol, np.array(rows)]), _meta(cfg))


def cmd_waterfill(cfg):
    eps_ax = _eps_axis(cfg)
    rho_ax = _power_axis(cfg, "5")
    name, ax = _one_swept(eps_ax, rho_ax)
    law = cfg.law()
    rows = []
    for eps in eps_ax.values:
        try:
            g = layer_thresholds(law, eps)
        except NumericError as exc:
            raise NumericError(f"{exc} (at eps={eps:.9g})", exc.estimate) from exc
        for rho in rho_ax.values:
            a = waterfill_gains(g, rho)
            rows.append(list(1.0 / g) + [a.mu] + list(a.powers) + list(a.rates()))
    xname, xcol = _x_column(ax, name)
    t = cfg.t
    cols = ([xname] + [f"inv_g{i}" for i in range(1, t + 1)] + ["mu"]
            + [f"power_layer{i}" for i in range(1, t + 1)]
            + [f"rate_layer{i}" for i in range(1, t + 1)])
    return ResultTable(cols, np.column_stack([xcol, np.array(rows)]), _meta(cfg))


def cmd_simulate(cfg):
    m = cfg.t if cfg.raw.get("m") is None else _count(cfg.raw["m"], "m")
    if not 1 <= m <= cfg.t:
        raise ConfigError(f"--m: must lie in 1..{cfg.t}")
    if cfg.trials < 1:
        raise ConfigError("--trials: must be >= 1")
    samples = simulate_gains(cfg.t, cfg.r, m, cfg.trials, cfg.seed, cfg.workers)
    if cfg.raw.get("ecdf") is None:
        return ResultTable([f"gamma_{i}" for i in range(1, m + 1)], samples.gains, _meta(cfg))
    xs = parse_axis(cfg.raw["ecdf"], "ecdf").values
    cols, data = ["x"], [xs]
    for layer in range(1, m + 1):
        srt = np.sort(samples.layer(layer))
        cols.append(f"ecdf_layer{layer}")
        data.append(np.searchsorted(srt, xs, side="right") / srt.size)
    return ResultTable(cols, np.column_stack(data), _meta(cfg))


def cmd_verify(cfg, stream=sys.stdout):
    from .verification import run_all

    quick = bool(cfg.raw.get("quick"))
    trials = 10**5 if quick else (cfg.trials or 10**6)
    header = f"{'check':<62} {'expected':>18} {'got':>14} {'tolerance':>18}  status"
    stream.write(header + "\n" + "-" * len(header) + "\n")

    def show(c):
        stream.write(f"{c.name:<62} {c.expected:>18} {c.got:>14.6g} {c.tolerance:>18}  "
                     f"{'PASS' if c.passed else 'FAIL'} ({c.seconds:.1f}s)\n")
        stream.flush()

    results = run_all(trials=trials, seed=cfg.seed, workers=cfg.workers,
                      oracle_draws=20 if quick else 100, progress=show)
    failed = [c for c in results if not c.passed]
    stream.write(f"\n{len(results) - len(failed)}/{len(results)} checks passed\n")
    return not failed


COMMANDS = {
    "pdf": cmd_pdf,
    "outage": cmd_outage,
    "capacity": cmd_capacity,
    "waterfill": cmd_waterfill,
    "simulate": cmd_simulate,
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    t0 = time.perf_counter()
    try:
        cfg = resolve(argv)
        if cfg.command == "verify":
            ok = cmd_verify(cfg)
            return EXIT_OK if ok else EXIT_VERIFY
        table = COMMANDS[cfg.command](cfg)
    except (ConfigError, ParameterError) as exc:
        print(f"vblast: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"vblast: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.out == "-":
        table.write(sys.stdout)
    else:
        with open(cfg.out, "w") as fh:
            table.write(fh)
    print(f"vblast: {cfg.command} done in {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
