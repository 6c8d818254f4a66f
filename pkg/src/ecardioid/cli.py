"""Command-line front end.

Every subcommand parses its flags, calls one library operation and prints
the result as JSON (default) or CSV. Exit status: 0 success, 1 usage error,
2 numerical failure. Numerical failures also print a JSON error object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict
from typing import Any, Callable, Optional, Sequence

from . import __version__
from .data import AngleParseError, WIND_DEGREES, parse_angle_values, wind_sample
from .ec_core import ECParams, cdf, pdf, quantile_approx_details, quantile_exact, sample
from .estimation import Method, Model, Sample, fit_model
from .gof import gof_compare, lrt_from_fits
from .modality import MODALITY_HEADER, modality_row, modality_table
from .moments import (
    SKEW_KURT_HEADER,
    SeriesTruncation,
    cdf_series,
    circular_measures,
    first_trig_moment,
    measure_to_json,
    second_trig_moment,
    skew_kurt_grid,
    trig_moment_series,
)
from .numerics import NumericsError
from .simulate import SIM_HEADER, SimConfig, compare_estimation_systems, report_rows, run_mc_study

SCHEMA = "1"
PI = math.pi
TABLE1_BETAS = (0.3, 0.6, 1.0, 2.0, 4.0, 10.0)
TABLE1_RHOS = (0.1, 0.2, 0.3, 0.4, 0.5)
TABLE1_MUS = (PI / 6, PI / 3, 2 * PI / 3, PI, 4 * PI / 3, 2 * PI)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 by default; usage errors are 1 here
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(x, ".17g")


def _to_jsonable(obj: Any) -> Any:
    if hasattr(obj, "item") and callable(obj.item) and getattr(obj, "ndim", 1) == 0:
        obj = obj.item()
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)) or hasattr(obj, "tolist"):
        seq = obj.tolist() if hasattr(obj, "tolist") else obj
        return [_to_jsonable(v) for v in seq]
    return obj


def dumps(obj: Any) -> str:
    """JSON with every float written to 17 significant digits."""
    obj = _to_jsonable(obj)

    def emit(o) -> str:
        if isinstance(o, bool) or o is None or isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return _fmt(o) if math.isfinite(o) else "null"
        if isinstance(o, dict):
            return "{" + ", ".join(f"{json.dumps(k)}: {emit(v)}" for k, v in o.items()) + "}"
        if isinstance(o, list):
            return "[" + ", ".join(emit(v) for v in o) + "]"
        raise TypeError(f"cannot serialise {type(o).__name__}")

    return emit(obj)


def to_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, float) else ("" if v is None else v) for v in row])
    return buf.getvalue()


class Output:
    """A payload with a JSON form and a CSV table form."""

    def __init__(self, payload: dict, header: Sequence[str] = (), rows: Sequence[Sequence[Any]] = ()):
        self.payload = {"schema": SCHEMA, **payload}
        self.header = tuple(header)
        self.rows = [tuple(r) for r in rows]

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            if not self.header:
                raise UsageError("this command has no CSV form")
            return to_csv(self.header, self.rows)
        return dumps(self.payload) + "\n"


# ---------------------------------------------------------------------------
# Flag helpers
# ---------------------------------------------------------------------------

def _floats(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {text!r}")
    return vals


def _params(args) -> ECParams:
    try:
        return ECParams.normalized(args.beta, args.rho, args.mu)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _angles(args, values: Sequence[float]) -> list[float]:
    return [float(v) for v in parse_angle_values([" ".join(map(repr, values))], args.unit)]


def _load_sample(args) -> Sample:
    if args.data is None:
        return wind_sample()
    try:
        if args.data == "-":
            vals = parse_angle_values(sys.stdin, args.unit)
        else:
            with open(args.data, encoding="utf-8") as fh:
                vals = parse_angle_values(fh, args.unit)
        return Sample(vals)
    except (AngleParseError, OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)


def _add_data(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", help="angle file, '-' for stdin; defaults to the bundled wind data")


def _trunc(args) -> SeriesTruncation:
    try:
        return SeriesTruncation(max_k=args.max_k, tail_tol=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_density(args) -> Output:
    p = _params(args)
    th = _angles(args, args.theta)
    vals = [float(pdf(t, p)) for t in th]
    return Output({"params": asdict(p), "theta": th, "density": vals}, ("theta", "density"), zip(th, vals))


def cmd_cdf(args) -> Output:
    p = _params(args)
    th = _angles(args, args.theta)
    if args.series:
        trunc = _trunc(args)
        vals = [cdf_series(t, p, trunc) for t in th]
    else:
        vals = [float(cdf(t, p)) for t in th]
    return Output({"params": asdict(p), "theta": th, "cdf": vals, "series": args.series},
                  ("theta", "cdf"), zip(th, vals))


def cmd_quantile(args) -> Output:
    p = _params(args)
    for a in args.alpha:
        if not 0.0 < a <= 1.0:
            raise UsageError(f"alpha must lie in (0, 1], got {a}")
    if args.approx:
        det = [quantile_approx_details(a, p) for a in args.alpha]
        vals = [d.value for d in det]
        extra = {"branch": [d.branch for d in det], "self_consistent": [d.self_consistent for d in det]}
        rows = [(a, d.value, d.branch, str(d.self_consistent).lower()) for a, d in zip(args.alpha, det)]
        header = ("alpha", "quantile", "branch", "self_consistent")
    else:
        vals = [quantile_exact(a, p, tol=min(args.tol, 1e-12)) for a in args.alpha]
        extra = {}
        rows = list(zip(args.alpha, vals))
        header = ("alpha", "quantile")
    payload = {"params": asdict(p), "method": "approx" if args.approx else "exact",
               "alpha": args.alpha, "quantile": vals, **extra}
    return Output(payload, header, rows)


def cmd_sample(args) -> Output:
    p = _params(args)
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    draws = [float(v) for v in sample(args.n, p, seed=args.seed)]
    return Output({"params": asdict(p), "seed": args.seed, "angles": draws}, ("angle",), [(v,) for v in draws])


def _moment_json(m) -> dict:
    return {"order": m.order, "alpha": m.alpha, "beta": m.beta, "resultant": m.resultant}


def cmd_moments(args) -> Output:
    p = _params(args)
    if args.series:
        trunc = _trunc(args)
        m1, m2 = trig_moment_series(p, 1, trunc), trig_moment_series(p, 2, trunc)
    else:
        m1, m2 = first_trig_moment(p), second_trig_moment(p)
    rows = [(m.order, m.alpha, m.beta) for m in (m1, m2)]
    return Output({"params": asdict(p), "series": args.series, "moments": [_moment_json(m1), _moment_json(m2)]},
                  ("order", "alpha", "beta"), rows)


def cmd_measures(args) -> Output:
    p = _params(args)
    cm = circular_measures(p)
    fields = asdict(cm)
    payload = {k: measure_to_json(getattr(cm, k)) for k in fields}
    rows = [(k, v if isinstance(v, float) else "undefined") for k, v in
            ((k, getattr(cm, k)) for k in fields)]
    return Output({"params": asdict(p), "measures": payload}, ("measure", "value"), rows)


def _cell_json(cell) -> dict:
    res = cell.result
    return {
        "beta": cell.beta, "rho": cell.rho, "mu": cell.mu,
        "class": cell.label,
        "modes": [] if res is None else list(res.mode_locations),
        "borderline": False if res is None else res.borderline,
        "error": cell.error,
    }


def cmd_modality(args) -> Output:
    p = _params(args)
    cells = modality_table([p.beta], [p.rho], [p.mu], args.grid_n, args.merge_tol)
    return Output(_cell_json(cells[0]), MODALITY_HEADER, [modality_row(cells[0])])


def cmd_modality_table(args) -> Output:
    try:
        cells = modality_table(args.betas, args.rhos, args.mus, args.grid_n, args.merge_tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return Output({"cells": [_cell_json(c) for c in cells]}, MODALITY_HEADER, [modality_row(c) for c in cells])


def _fit_rows(fit) -> list[tuple]:
    se = fit.se or (None,) * len(fit.params)
    return [(fit.model.value, fit.method.value, name, val, s) for name, val, s in zip(fit.names, fit.params, se)]


def cmd_fit(args) -> Output:
    s = _load_sample(args)
    model = {"ec": Model.EC, "cardioid": Model.CARDIOID, "vonmises": Model.VONMISES}[args.model]
    method = Method(args.method.upper())
    if method is Method.QLSE and model is not Model.EC:
        raise UsageError("--method qlse is only available for --model ec")
    fit = fit_model(s, model, method)
    payload = fit.to_json()
    payload["residuals"] = list(fit.residuals)
    payload["n"] = s.n
    if fit.diagnostic:
        payload["diagnostic"] = fit.diagnostic
    return Output(payload, ("model", "method", "param", "value", "se"), _fit_rows(fit))


_GOF_HEADER = ("model", "param1", "param2", "param3", "kuiper", "watson")


def _gof_rows(reports) -> list[tuple]:
    rows = []
    for r in reports:
        params = list(r.fit.params) if r.fit else []
        params += [None] * (3 - len(params))
        rows.append((r.model.value, *params, r.kuiper, r.watson))
    return rows


def cmd_gof(args) -> Output:
    s = _load_sample(args)
    reports = gof_compare(s)
    return Output({"n": s.n, "models": [r.to_json() for r in reports]}, _GOF_HEADER, _gof_rows(reports))


def cmd_lrt(args) -> Output:
    s = _load_sample(args)
    ec = fit_model(s, Model.EC, with_se=False)
    card = fit_model(s, Model.CARDIOID, with_se=False)
    rep = lrt_from_fits(ec, card)
    return Output({"n": s.n, **rep.to_json()}, ("statistic", "df", "p_value"),
                  [(rep.statistic, rep.df, rep.p_value)])


def _sim_config(args) -> SimConfig:
    try:
        return SimConfig(_params(args), args.n, args.reps, args.seed, tuple(m.upper() for m in args.methods))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _summary_json(m) -> dict:
    return {"method": m.method, "bias": dict(zip(("beta", "rho", "mu"), m.bias)),
            "mse": dict(zip(("beta", "rho", "mu"), m.mse)), "failures": m.failures, "successes": m.successes}


def cmd_simulate(args) -> Output:
    cfg = _sim_config(args)
    rep = run_mc_study(cfg)
    payload = {"truth": asdict(cfg.truth), "n": cfg.n, "replications": cfg.replications, "seed": cfg.seed,
               "methods": [_summary_json(m) for m in rep.summaries]}
    return Output(payload, SIM_HEADER, report_rows(rep))


def cmd_compare_systems(args) -> Output:
    cfg = _sim_config(args)
    rep = compare_estimation_systems(cfg)
    payload = {"truth": asdict(cfg.truth), "n": cfg.n, "replications": cfg.replications, "seed": cfg.seed,
               "full": _summary_json(rep.full), "profiled": _summary_json(rep.profiled),
               "seconds_full": rep.seconds_full, "seconds_profiled": rep.seconds_profiled}
    rows = [("full", *rep.full.mse, rep.full.failures), ("profiled", *rep.profiled.mse, rep.profiled.failures)]
    return Output(payload, ("system", "mse_beta", "mse_rho", "mse_mu", "failures"), rows)


def cmd_skewkurt_map(args) -> Output:
    try:
        rows = skew_kurt_grid(args.betas, args.rhos, args.mus)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    table = [(r.beta, r.rho, r.mu,
              r.skewness if r.defined else "undefined", r.kurtosis if r.defined else "undefined") for r in rows]
    payload = {"rows": [{"beta": r.beta, "rho": r.rho, "mu": r.mu, "skewness": measure_to_json(r.skewness),
                         "kurtosis": measure_to_json(r.kurtosis), "defined": r.defined} for r in rows]}
    return Output(payload, SKEW_KURT_HEADER, table)


def wind_report(s: Optional[Sample] = None) -> dict:
    """EC, cardioid and von Mises fits with Kuiper, Watson and the LRT."""
    s = wind_sample() if s is None else s
    reports = gof_compare(s)
    by_model = {r.model: r for r in reports}
    lrt = lrt_from_fits(by_model[Model.EC].fit, by_model[Model.CARDIOID].fit)
    return {"n": s.n, "models": [r.to_json() for r in reports], "lrt": lrt.to_json()}


def cmd_wind_demo(args) -> Output:
    payload = wind_report(_load_sample(args) if args.data else None)
    if args.data is None:
        payload["data_degrees"] = list(WIND_DEGREES)
    rows = []
    for m in payload["models"]:
        vals = list((m["params"] or {}).values())
        ses = list((m["se"] or {}).values())
        vals += [None] * (3 - len(vals))
        ses += [None] * (3 - len(ses))
        rows.append((m["model"], *vals, *ses, m["kuiper"], m["watson"]))
    header = ("model", "param1", "param2", "param3", "se1", "se2", "se3", "kuiper", "watson")
    return Output(payload, header, rows)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-12)
    common.add_argument("--max-k", type=int, default=40)
    common.add_argument("--reps", type=int, default=500)
    common.add_argument("--unit", choices=("deg", "rad"), default="rad")

    parser = _Parser(prog="ecardioid", description="Exponentiated cardioid toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    for name, fn in (("density", cmd_density), ("cdf", cmd_cdf)):
        p = add(name, fn, f"evaluate the {name}")
        _add_params(p)
        p.add_argument("--theta", type=_floats, required=True, help="angles, comma separated")
        if name == "cdf":
            p.add_argument("--series", action="store_true", help="use the binomial series")

    p = add("quantile", cmd_quantile, "quantile function")
    _add_params(p)
    p.add_argument("--alpha", type=_floats, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", help="root finding (default)")
    g.add_argument("--approx", action="store_true", help="closed-form approximation")

    p = add("sample", cmd_sample, "draw random angles")
    _add_params(p)
    p.add_argument("--n", type=int, required=True)

    p = add("moments", cmd_moments, "first and second central trigonometric moments")
    _add_params(p)
    p.add_argument("--series", action="store_true")

    p = add("measures", cmd_measures, "circular shape measures")
    _add_params(p)

    p = add("modality", cmd_modality, "classify one parameter point")
    _add_params(p)
    for q in (p, add("modality-table", cmd_modality_table, "classify a parameter lattice")):
        q.add_argument("--grid-n", type=int, default=8192)
        q.add_argument("--merge-tol", type=float, default=1e-3)
    q.add_argument("--betas", type=_floats, default=list(TABLE1_BETAS))
    q.add_argument("--rhos", type=_floats, default=list(TABLE1_RHOS))
    q.add_argument("--mus", type=_floats, default=list(TABLE1_MUS))

    p = add("fit", cmd_fit, "fit a model to angles")
    _add_data(p)
    p.add_argument("--model", choices=("ec", "cardioid", "vonmises"), default="ec")
    p.add_argument("--method", choices=("mle", "qlse"), default="mle")

    for name, fn, help_ in (("gof", cmd_gof, "Kuiper and Watson statistics for three fitted models"),
                            ("lrt", cmd_lrt, "cardioid versus EC likelihood-ratio test"),
                            ("wind-demo", cmd_wind_demo, "full report on the wind data")):
        _add_data(add(name, fn, help_))

    for name, fn, help_ in (("simulate", cmd_simulate, "Monte Carlo bias and MSE"),
                            ("compare-systems", cmd_compare_systems, "joint versus profiled MLE")):
        p = add(name, fn, help_)
        _add_params(p)
        p.add_argument("--n", type=int, default=100)
        if name == "simulate":
            p.add_argument("--methods", nargs="+", choices=("mle", "qlse", "MLE", "QLSE"), default=["mle", "qlse"])
        else:
            p.set_defaults(methods=["mle"])

    p = add("skewkurt-map", cmd_skewkurt_map, "skewness and kurtosis over a lattice")
    p.add_argument("--betas", type=_floats, default=[0.5, 1.0, 2.0, 4.0])
    p.add_argument("--rhos", type=_floats, default=[0.1, 0.2, 0.3, 0.4, 0.5])
    p.add_argument("--mus", type=_floats, default=[PI / 3, 2 * PI / 3, PI, 4 * PI / 3, 5 * PI / 3, 2 * PI])
    return parser


def _error_json(kind: str, message: str) -> str:
    return dumps({"schema": SCHEMA, "error": {"type": kind, "message": message}}) + "\n"


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text = args.func(args).render(args.format)
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return 1
    except NumericsError as exc:
        stdout.write(_error_json(type(exc).__name__, str(exc)))
        stderr.write(f"numerical failure: {exc}\n")
        return 2
    except ValueError as exc:
        stderr.write(f"invalid input: {exc}\n")
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
