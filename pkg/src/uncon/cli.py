"""Reproducible experiment driver.

Subcommands: ``generate`` writes a censored curve population to CSV, ``run``
executes a full benchmark (generate -> censor -> unconstrain with each
method -> score) and writes ``report.csv``, ``per_curve.csv``, a resolved
``config.json`` echo, and one comparison SVG per censoring level, ``plot``
renders the comparison SVG for a single curve from a saved population.

Everything is deterministic given (config, seed): repeated runs produce
byte-identical CSV files.  ``UNCON_THREADS`` caps the worker pool used to
unconstrain curves in parallel.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import simgen
from .baselines import SeriesTask, UnorderedTask, des, em, em_daily, mean_impute, pd, pd_daily
from .errors import UnconError
from .gp import HyperGrid
from .metrics import e1, e2, e3
from .simgen import HORIZON, BookingCurve
from .unconstrainer import GpUnconstrainConfig, gp_unconstrain, gp_unconstrain_cp

__all__ = ["RunConfig", "run", "plot_curve", "main"]

ALL_METHODS = ("em", "pd", "em_daily", "pd_daily", "des", "gp", "gp_cp", "mean_impute")
PATH_METHODS = frozenset({"em_daily", "pd_daily", "des", "gp", "gp_cp"})
EXPERIMENTS = ("exp1", "exp2", "exp3", "changepoint")
WINDOW_M = 15          # constrained curves per rate family under window censoring
PER_FAMILY = 30        # curves per rate family in exp2/exp3 populations

_DEFAULT_METHODS = {
    "exp1": ("em", "pd", "em_daily", "pd_daily", "des", "gp", "mean_impute"),
    "exp2": ("em", "pd", "em_daily", "pd_daily", "des", "gp", "mean_impute"),
    "exp3": ("em", "pd", "em_daily", "pd_daily", "des", "gp", "mean_impute"),
    "changepoint": ("gp", "gp_cp"),
}
_DEFAULT_CENSOR = {
    "exp1": (0.2, 0.6, 0.98),
    "exp2": (20,),
    "exp3": (20,),
    "changepoint": (105,),
}
_DEFAULT_SHAPE = {"exp3": "dpp", "changepoint": "scenario3"}
_METRICS = {
    "exp1": ("e1", "e2", "e3"),
    "exp2": ("e1", "e2", "e3"),
    "exp3": ("e1", "e2", "e3"),
    "changepoint": ("rate_mae", "e3"),
}
_EXP1_SHAPES = ("homogeneous", "convex", "concave")
_EXP2_SHAPES = ("convex", "concave")
_SCENARIOS = ("scenario1", "scenario2", "scenario3")

REPORT_COLUMNS = ("experiment", "shape", "censor_spec", "method", "metric", "value", "seed")
PER_CURVE_COLUMNS = ("experiment", "shape", "censor_spec", "method", "repeat",
                     "curve", "actual_total", "uncon_total", "abs_err")


@dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration; the config.json echo serializes this."""

    experiment: str
    shape: str
    censor_spec: tuple = ()
    methods: tuple = ()
    repeats: int = 5
    seed: int = 0
    curves: int = 100
    grid: dict | None = None
    forecast_mode: str = "integrated"
    out: str = "run_output"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError("experiment must be one of %s" % (EXPERIMENTS,))
        if not self.censor_spec:
            object.__setattr__(self, "censor_spec", _DEFAULT_CENSOR[self.experiment])
        if not self.methods:
            object.__setattr__(self, "methods", _DEFAULT_METHODS[self.experiment])
        object.__setattr__(self, "censor_spec", tuple(self.censor_spec))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.curves < 2:
            raise ValueError("curves must be >= 2")
        bad = [m for m in self.methods if m not in ALL_METHODS]
        if bad:
            raise ValueError("unknown methods: %s" % bad)
        if self.experiment == "exp1":
            if self.shape not in _EXP1_SHAPES:
                raise ValueError("exp1 shape must be one of %s" % (_EXP1_SHAPES,))
            if not all(0.0 < q < 1.0 for q in self.censor_spec):
                raise ValueError("exp1 censor_spec entries are fractions in (0, 1)")
        elif self.experiment == "exp2":
            if self.shape not in _EXP2_SHAPES:
                raise ValueError("exp2 shape must be one of %s" % (_EXP2_SHAPES,))
            if not all(1 <= int(k) < HORIZON for k in self.censor_spec):
                raise ValueError("exp2 censor_spec entries are day windows")
        elif self.experiment == "exp3":
            if not all(1 <= int(k) < HORIZON for k in self.censor_spec):
                raise ValueError("exp3 censor_spec entries are day windows")
        elif self.experiment == "changepoint":
            if self.shape not in _SCENARIOS:
                raise ValueError("changepoint shape must be one of %s" % (_SCENARIOS,))
            if not all(0 < int(d) < HORIZON for d in self.censor_spec):
                raise ValueError("changepoint censor_spec entries are constraining days")


def _workers() -> int:
    env = os.environ.get("UNCON_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def _gp_cfgs(cfg: RunConfig):
    grid = HyperGrid.from_config(cfg.grid) if cfg.grid else HyperGrid.default()
    std = GpUnconstrainConfig(grid=grid, forecast_mode=cfg.forecast_mode)
    cp = GpUnconstrainConfig(grid=grid, family="changepoint",
                             forecast_mode=cfg.forecast_mode)
    return std, cp


def _repeat_seed(master: int, repeat: int) -> int:
    return master * 1000 + repeat


def _generate_population(cfg: RunConfig, rep_seed: int):
    """One repeat's censored curve set (and true rates where known)."""
    if cfg.experiment == "exp1":
        raw = simgen.gen_exp1(cfg.shape, cfg.curves, seed=rep_seed)
        return raw, None
    if cfg.experiment == "exp2":
        return simgen.gen_exp2(cfg.shape, seed=rep_seed, per_family=PER_FAMILY), None
    if cfg.experiment == "exp3":
        return simgen.gen_dpp(seed=rep_seed, per_family=PER_FAMILY), None
    sc = simgen.gen_scenario(int(cfg.shape[-1]), seed=rep_seed)
    return [sc.curve], sc.rates


def _censor(cfg: RunConfig, curves, spec, rep_seed: int):
    if cfg.experiment == "exp1":
        censored, _ = simgen.constrain_by_limits(curves, q=float(spec), seed=rep_seed)
        return censored
    if cfg.experiment in ("exp2", "exp3"):
        return simgen.constrain_window(curves, k_days=int(spec), m=WINDOW_M,
                                       seed=rep_seed, family_size=PER_FAMILY)
    day = int(spec)
    c = curves[0]
    return [BookingCurve(daily=c.daily, family=c.family,
                         limit=float(c.cumulative[day - 1]), constrained_from=day)]


def _gp_job(args):
    curve, gp_cfg, use_cp = args
    if use_cp:
        out, _ = gp_unconstrain_cp(curve, gp_cfg)
        return out.unconstrained
    return gp_unconstrain(curve, gp_cfg).unconstrained


def _apply_method(method: str, curves, cons, std_cfg, cp_cfg, workers: int):
    """Unconstrain the constrained curves with one method.

    Returns (totals, paths): totals aligned to ``cons``; paths is a list of
    cumulative vectors over each curve's constrained days, or None for
    totals-only methods.  All outputs are floored at the observed censor
    value — demand can never be below what was actually booked.
    """
    limits = np.array([curves[i].limit for i in cons])
    if method in ("em", "pd", "mean_impute"):
        observed = np.array([float(c.observed_cumulative[-1]) for c in curves])
        censored = np.array([c.constrained for c in curves])
        task = UnorderedTask(values=observed, censored=censored, limits=observed)
        fn = {"em": em, "pd": pd, "mean_impute": mean_impute}[method]
        totals = np.maximum(fn(task).unconstrained, limits)
        return totals, None
    if method in ("em_daily", "pd_daily"):
        outs = em_daily(curves) if method == "em_daily" else pd_daily(curves)
        paths = [np.maximum(outs[i].unconstrained, curves[i].limit) for i in cons]
    elif method == "des":
        paths = []
        for i in cons:
            curve = curves[i]
            cf = curve.constrained_from
            task = SeriesTask(cumulative=curve.cumulative[:cf].astype(float),
                              horizon=len(curve.daily) - cf)
            paths.append(np.maximum(des(task).unconstrained, curve.limit))
    elif method in ("gp", "gp_cp"):
        jobs = [(curves[i], cp_cfg if method == "gp_cp" else std_cfg,
                 method == "gp_cp") for i in cons]
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                raw = list(pool.map(_gp_job, jobs))
        else:
            raw = [_gp_job(j) for j in jobs]
        paths = [np.maximum(raw[k], curves[i].limit) for k, i in enumerate(cons)]
    else:
        raise ValueError("unknown method %r" % method)
    totals = np.array([p[-1] for p in paths])
    return totals, paths


def _score_repeat(cfg: RunConfig, method, curves, cons, rates, std_cfg, cp_cfg,
                  workers):
    """Metric values and per-curve rows for one (repeat, censor, method)."""
    totals, paths = _apply_method(method, curves, cons, std_cfg, cp_cfg, workers)
    actual = np.array([float(curves[i].total) for i in cons])
    scores = {}
    if cfg.experiment == "changepoint":
        if paths is None:
            raise ValueError("changepoint runs need daily-path methods")
        i = cons[0]
        cf = curves[i].constrained_from
        daily = np.diff(np.concatenate([[curves[i].prefix_total], paths[0]]))
        scores["rate_mae"] = float(np.abs(daily - rates[cf:]).mean())
        scores["e3"] = e3(totals, actual)
    else:
        scores["e1"] = e1(totals, actual)
        if paths is not None:
            actual_paths = [curves[i].cumulative[curves[i].constrained_from:]
                            for i in cons]
            scores["e2"] = e2(paths, actual_paths)
        else:
            scores["e2"] = None
        scores["e3"] = e3(totals, actual)
    per_curve = [(i, actual[k], float(totals[k]), float(abs(totals[k] - actual[k])))
                 for k, i in enumerate(cons)]
    return scores, per_curve, paths


def _fmt(value) -> str:
    return "" if value is None else "%.6f" % value


def _write_csv(path: str, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(x) for x in row) + "\n")


def run(cfg: RunConfig) -> list:
    """Execute a full experiment; returns the report rows it wrote."""
    os.makedirs(cfg.out, exist_ok=True)
    with open(os.path.join(cfg.out, "config.json"), "w") as fh:
        json.dump(dataclasses.asdict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")
    std_cfg, cp_cfg = _gp_cfgs(cfg)
    workers = _workers()
    report_rows = []
    per_curve_rows = []
    svg_jobs = {}
    try:
        for spec in cfg.censor_spec:
            cell = {m: {k: [] for k in _METRICS[cfg.experiment]} for m in cfg.methods}
            for rep in range(cfg.repeats):
                rep_seed = _repeat_seed(cfg.seed, rep)
                raw, rates = _generate_population(cfg, rep_seed)
                curves = _censor(cfg, raw, spec, rep_seed)
                cons = [i for i, c in enumerate(curves) if c.constrained]
                if not cons:
                    raise UnconError(
                        "no constrained curves for censor_spec=%r seed=%d"
                        % (spec, rep_seed))
                for method in cfg.methods:
                    scores, pc, paths = _score_repeat(
                        cfg, method, curves, cons, rates, std_cfg, cp_cfg, workers)
                    for name, value in scores.items():
                        cell[method][name].append(value)
                    per_curve_rows.extend(
                        (cfg.experiment, cfg.shape, spec, method, rep, i,
                         "%.6f" % a, "%.6f" % u, "%.6f" % err)
                        for i, a, u, err in pc)
                    if rep == 0:
                        svg_jobs.setdefault(spec, (curves[cons[0]], {}))
                        forecast = (paths[0] if paths is not None else
                                    np.array([pc[0][2]]))
                        svg_jobs[spec][1][method] = forecast
            for method in cfg.methods:
                for name in _METRICS[cfg.experiment]:
                    vals = cell[method][name]
                    agg = (None if any(v is None for v in vals)
                           else float(np.mean(vals)))
                    report_rows.append((cfg.experiment, cfg.shape, spec, method,
                                        name, _fmt(agg), cfg.seed))
    finally:
        _write_csv(os.path.join(cfg.out, "report.csv"), REPORT_COLUMNS, report_rows)
        _write_csv(os.path.join(cfg.out, "per_curve.csv"), PER_CURVE_COLUMNS,
                   per_curve_rows)
        for spec, (curve, forecasts) in svg_jobs.items():
            svg = plot_curve(curve, forecasts,
                             title="%s %s censor=%s" % (cfg.experiment, cfg.shape, spec))
            name = "curves_%s.svg" % str(spec).replace(".", "_")
            with open(os.path.join(cfg.out, name), "w") as fh:
                fh.write(svg)
    return report_rows


# ---------------------------------------------------------------------------
# SVG rendering (dependency-free)

_PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#e377c2", "#17becf")
_W, _H = 720, 440
_ML, _MR, _MT, _MB = 62, 18, 30, 46


def _ticks(lo: float, hi: float, n: int = 6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min(s * mag for s in (1, 2, 5, 10) if s * mag >= raw)
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + 0.5 * step, step)


def plot_curve(actual: BookingCurve, forecasts: dict, title: str = "") -> str:
    """Standalone SVG overlaying the actual cumulative curve with per-method
    unconstrained reconstructions over the constrained window.

    ``forecasts`` maps method name to a cumulative vector over the
    constrained days (a length-1 vector is drawn as a final-total point).
    A vertical rule marks the constraining day.
    """
    horizon = len(actual.daily)
    cum = actual.cumulative.astype(float)
    cf = actual.constrained_from
    ymax = max(float(cum.max()), 1.0)
    for vec in forecasts.values():
        v = np.asarray(vec, float)
        if v.size:
            ymax = max(ymax, float(v.max()))
    xmax = float(horizon - 1)
    sx = lambda x: _ML + (x / xmax) * (_W - _ML - _MR)
    sy = lambda y: _H - _MB - (y / (ymax * 1.05)) * (_H - _MT - _MB)

    def poly(xs, ys, color, dash=""):
        pts = " ".join("%.2f,%.2f" % (sx(x), sy(y)) for x, y in zip(xs, ys))
        extra = ' stroke-dasharray="%s"' % dash if dash else ""
        return ('<polyline fill="none" stroke="%s" stroke-width="1.6"%s '
                'points="%s"/>' % (color, extra, pts))

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">' % (_W, _H, _W, _H),
        '<desc>%s</desc>' % title,
        '<rect width="%d" height="%d" fill="white"/>' % (_W, _H),
    ]
    for t in _ticks(0, xmax):
        parts.append('<line x1="%.2f" y1="%d" x2="%.2f" y2="%d" stroke="#ccc"/>'
                     % (sx(t), _MT, sx(t), _H - _MB))
        parts.append('<text x="%.2f" y="%d" font-size="11" text-anchor="middle">'
                     '%g</text>' % (sx(t), _H - _MB + 16, t))
    for t in _ticks(0, ymax * 1.05):
        parts.append('<line x1="%d" y1="%.2f" x2="%d" y2="%.2f" stroke="#eee"/>'
                     % (_ML, sy(t), _W - _MR, sy(t)))
        parts.append('<text x="%d" y="%.2f" font-size="11" text-anchor="end">'
                     '%g</text>' % (_ML - 6, sy(t) + 4, t))
    parts.append('<text x="%d" y="%d" font-size="12" text-anchor="middle">day'
                 '</text>' % ((_ML + _W - _MR) // 2, _H - 10))
    parts.append('<text x="14" y="%d" font-size="12" transform="rotate(-90 14 %d)"'
                 ' text-anchor="middle">cumulative bookings</text>'
                 % ((_MT + _H - _MB) // 2, (_MT + _H - _MB) // 2))
    if title:
        parts.append('<text x="%d" y="18" font-size="13" text-anchor="middle">'
                     '%s</text>' % (_W // 2, title))
    parts.append(poly(np.arange(horizon), cum, "#000000"))
    if cf is not None:
        parts.append('<line x1="%.2f" y1="%d" x2="%.2f" y2="%d" stroke="#555" '
                     'stroke-dasharray="4,3"/>' % (sx(cf), _MT, sx(cf), _H - _MB))
        parts.append('<text x="%.2f" y="%d" font-size="11" text-anchor="middle">'
                     'constrained from day %d</text>' % (sx(cf), _MT - 6, cf))
    legend_y = _MT + 14
    parts.append('<text x="%d" y="%d" font-size="11">actual</text>'
                 % (_ML + 26, legend_y + 4))
    parts.append('<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="#000" '
                 'stroke-width="1.6"/>' % (_ML + 4, legend_y, _ML + 22, legend_y))
    for k, (name, vec) in enumerate(sorted(forecasts.items())):
        color = _PALETTE[k % len(_PALETTE)]
        v = np.asarray(vec, float)
        if cf is not None and v.size > 1:
            days = np.arange(cf, cf + v.size)
            xs = np.concatenate([[cf - 1], days]) if cf > 0 else days
            ys = np.concatenate([[cum[cf - 1]], v]) if cf > 0 else v
            parts.append(poly(xs, ys, color, dash="6,3"))
        elif v.size:
            parts.append('<circle cx="%.2f" cy="%.2f" r="3.5" fill="%s"/>'
                         % (sx(horizon - 1), sy(float(v[-1])), color))
        legend_y += 16
        parts.append('<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="%s" '
                     'stroke-width="1.6"/>' % (_ML + 4, legend_y, _ML + 22,
                                               legend_y, color))
        parts.append('<text x="%d" y="%d" font-size="11">%s</text>'
                     % (_ML + 26, legend_y + 4, name))
    parts.append("</svg>")
    return "\n".join(parts)


# ---------------------------------------------------------------------------
# argument parsing

def _parse_censor(text: str):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        value = float(tok)
        out.append(int(value) if value == int(value) and "." not in tok else value)
    return tuple(out)


def _build_run_config(args) -> RunConfig:
    base = {}
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
    if args.experiment:
        base["experiment"] = args.experiment
    if args.shape:
        base["shape"] = args.shape
    if args.censor:
        base["censor_spec"] = _parse_censor(args.censor)
    if args.methods:
        base["methods"] = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    if args.repeats is not None:
        base["repeats"] = args.repeats
    if args.seed is not None:
        base["seed"] = args.seed
    if args.curves is not None:
        base["curves"] = args.curves
    if args.grid:
        base["grid"] = json.loads(args.grid) if isinstance(args.grid, str) else args.grid
    if args.forecast:
        base["forecast_mode"] = args.forecast
    if args.out:
        base["out"] = args.out
    if "experiment" not in base:
        raise ValueError("an experiment must be given (flag or config file)")
    base.setdefault("shape", _DEFAULT_SHAPE.get(base["experiment"]))
    if base.get("shape") is None:
        raise ValueError("a shape must be given for %s" % base["experiment"])
    base["censor_spec"] = tuple(base.get("censor_spec", ()))
    base["methods"] = tuple(base.get("methods", ()))
    if base.get("grid") is not None:
        base["grid"] = dict(base["grid"])
    return RunConfig(**base)


def _cmd_generate(args) -> int:
    cfg = RunConfig(experiment=args.experiment,
                    shape=args.shape or _DEFAULT_SHAPE.get(args.experiment, ""),
                    censor_spec=_parse_censor(args.censor) if args.censor else (),
                    curves=args.curves if args.curves is not None else 100,
                    seed=args.seed or 0)
    raw, _ = _generate_population(cfg, cfg.seed)
    curves = _censor(cfg, raw, cfg.censor_spec[0], cfg.seed)
    simgen.save_curves(args.out, curves)
    print("wrote %d curves (%d constrained) to %s"
          % (len(curves), sum(c.constrained for c in curves), args.out))
    return 0


def _cmd_run(args) -> int:
    cfg = _build_run_config(args)
    rows = run(cfg)
    print("wrote %d report rows to %s" % (len(rows), cfg.out))
    return 0


def _cmd_plot(args) -> int:
    curves = simgen.load_curves(args.curves)
    cons = [i for i, c in enumerate(curves) if c.constrained]
    if not cons:
        raise UnconError("no constrained curve to plot")
    index = args.index if args.index is not None else cons[0]
    if index not in cons:
        raise UnconError("curve %d is not constrained" % index)
    methods = tuple(m.strip() for m in (args.methods or "gp,des").split(",") if m.strip())
    std_cfg, cp_cfg = _gp_cfgs(RunConfig(experiment="exp1", shape="convex",
                                         grid=json.loads(args.grid) if args.grid else None))
    forecasts = {}
    for method in methods:
        totals, paths = _apply_method(method, curves, [index], std_cfg, cp_cfg,
                                      _workers())
        forecasts[method] = paths[0] if paths is not None else totals[:1]
    svg = plot_curve(curves[index], forecasts, title="curve %d" % index)
    with open(args.out, "w") as fh:
        fh.write(svg)
    print("wrote %s" % args.out)
    return 0


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uncon",
        description="Censored booking-curve unconstraining benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a censored curve population CSV")
    gen.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    gen.add_argument("--shape", default=None)
    gen.add_argument("--censor", default=None,
                     help="single censor spec (fraction, window days, or day)")
    gen.add_argument("--curves", type=int, default=None)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(fn=_cmd_generate)

    runp = sub.add_parser("run", help="run a benchmark and write reports")
    runp.add_argument("--config", default=None, help="JSON config file")
    runp.add_argument("--experiment", default=None, choices=EXPERIMENTS)
    runp.add_argument("--shape", default=None)
    runp.add_argument("--censor", default=None, help="comma list, e.g. 0.2,0.6,0.98")
    runp.add_argument("--methods", default=None, help="comma list, e.g. em,gp,des")
    runp.add_argument("--repeats", type=int, default=None)
    runp.add_argument("--seed", type=int, default=None)
    runp.add_argument("--curves", type=int, default=None)
    runp.add_argument("--grid", default=None, help="JSON hyperparameter grid spec")
    runp.add_argument("--forecast", default=None, choices=("plugin", "integrated"))
    runp.add_argument("--out", default=None)
    runp.set_defaults(fn=_cmd_run)

    plot = sub.add_parser("plot", help="render a comparison SVG for one curve")
    plot.add_argument("--curves", required=True, help="curve CSV from `generate`")
    plot.add_argument("--index", type=int, default=None)
    plot.add_argument("--methods", default="gp,des")
    plot.add_argument("--grid", default=None)
    plot.add_argument("--out", required=True)
    plot.set_defaults(fn=_cmd_plot)
    return parser


def main(argv=None) -> int:
    args = _make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (UnconError, ValueError, OSError, json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
