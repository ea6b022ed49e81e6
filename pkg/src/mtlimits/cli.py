"""Config-driven experiment runner.

Every exact and Monte Carlo quantity in the package is reachable from here,
with reproducible seeds (randomized commands require an explicit ``--seed``)
and CSV/JSON output carrying the resolved configuration.  Exit codes:
0 success, 2 parameter errors (the message names the violated precondition),
3 enumeration-guard refusals.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
import sys

import click

from . import __version__, exact
from .bounds import BOUND_NAMES, evaluate_bound
from .errors import DomainError, GuardRefusal, MtlimitsError
from .mc import LearnerSpec, engine
from .output import render_document, write_document
from .scenarios import (
    MultitaskScenario,
    make_agnostic_scenario,
    make_background_scenario,
    make_fair_noisy_scenario,
    scenario_from_json,
    scenario_to_json,
)

RISK_COLUMNS = ["quantity", "scenario_id", "learner", "trials", "seed", "mean", "stderr"]


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except GuardRefusal as exc:
            _fail(3, str(exc))
        except (DomainError, MtlimitsError) as exc:
            _fail(2, str(exc))
        except FileNotFoundError as exc:
            _fail(2, str(exc))

    return wrapper


def _load_scenario(path: str) -> MultitaskScenario:
    return scenario_from_json(path)


def _emit(command: str, config: dict, columns: list[str], rows: list[dict],
          fmt: str, out: str | None, extras: dict | None = None) -> None:
    write_document(render_document(command, config, columns, rows, fmt, extras), out)


def _risk_row(quantity: str, scenario_id: str, learner: str, trials, seed,
              mean: float, stderr: float) -> dict:
    return {"quantity": quantity, "scenario_id": scenario_id, "learner": learner,
            "trials": trials, "seed": seed, "mean": mean, "stderr": stderr}


output_options = [
    click.option("--out", default="-", show_default=True,
                 help="Output path, or - for stdout."),
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                 default="csv", show_default=True),
]


def add_options(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return deco


@click.group()
@click.version_option(__version__)
def main():
    """Exact and Monte Carlo experiments on multitask-learning limits."""


# ---------------------------------------------------------------------- scenario


@main.group()
def scenario():
    """Build and serialize multitask scenarios."""


@scenario.command("make")
@click.option("--family", type=click.Choice(["agnostic", "fair-noisy", "background"]),
              required=True)
@click.option("--n", "n", type=int, required=True, help="Samples per task.")
@click.option("--N", "big_n", type=int, default=None, help="Number of source tasks.")
@click.option("--beta", type=float, default=None)
@click.option("--c-beta", type=float, default=2.0, show_default=True)
@click.option("--delta", type=float, default=None)
@click.option("--n-p", type=int, default=None, help="Benign sources (background).")
@click.option("--n-q", type=int, default=None, help="Noisy sources (background).")
@click.option("--n-target", type=int, default=None, help="Target samples (background).")
@click.option("--c0-const", type=float, default=0.5, show_default=True)
@click.option("--c1-const", type=float, default=0.5, show_default=True)
@click.option("--y-star", type=click.Choice(["0", "1"]), default="1", show_default=True)
@click.option("--out", required=True, help="Path for the scenario JSON document.")
@handle_errors
def scenario_make(family, n, big_n, beta, c_beta, delta, n_p, n_q, n_target,
                  c0_const, c1_const, y_star, out):
    """Construct a scenario and write its JSON document."""
    y = int(y_star)
    if family == "agnostic":
        if big_n is None or delta is None:
            raise DomainError("agnostic scenarios need --N and --delta")
        scen = make_agnostic_scenario(n, big_n, delta)
    elif family == "fair-noisy":
        if big_n is None or beta is None:
            raise DomainError("fair-noisy scenarios need --N and --beta")
        scen = make_fair_noisy_scenario(n, big_n, beta, c_beta, y_star=y)
    else:
        if None in (n_p, n_q, n_target, beta):
            raise DomainError("background scenarios need --n-p, --n-q, --n-target and --beta")
        scen = make_background_scenario(n, n_p, n_q, n_target, beta,
                                        c0=c0_const, c1=c1_const, y_star=y)
    scenario_to_json(scen, out)
    click.echo(f"wrote scenario {scen.scenario_id} ({scen.family}, "
               f"N={scen.num_tasks}, n={scen.n_per_task}) to {out}")


# ---------------------------------------------------------------------- risk


@main.group()
def risk():
    """Learner risks, exact or simulated."""


@risk.command("exact")
@click.option("--scenario", "scenario_path", required=True)
@click.option("--learner", type=click.Choice(["erm", "pool", "oracle"]), required=True)
@click.option("--t-star-int", type=int, default=None,
              help="Fair tasks the oracle pools (default: round(t*)).")
@add_options(output_options)
@handle_errors
def risk_exact(scenario_path, learner, t_star_int, out, fmt):
    """Exact error probability and expected excess risk of a learner."""
    scen = _load_scenario(scenario_path)
    p = scen.params
    if scen.family == "agnostic":
        if learner in ("erm", "oracle"):
            err = exact.erm_error_exact_agnostic(scen.n_per_task, p.epsilon)
        else:
            err = exact.pooling_error_exact_agnostic(scen.n_per_task, scen.num_tasks,
                                                     p.epsilon)
    elif scen.family == "fair_noisy":
        if learner == "pool":
            raise DomainError(
                "no exact pooled-risk formula for fair_noisy; use `risk mc --learner pool`")
        t_int = t_star_int
        if t_int is None:
            t_int = 1 if learner == "erm" else int(math.floor(p.t_star + 0.5))
        err = exact.oracle_error_exact_fair(scen.n_per_task, t_int, p.beta,
                                            p.c_beta, scen.num_tasks)
    else:
        raise DomainError("exact risks cover the agnostic and fair_noisy families")
    rows = [
        _risk_row(f"error_exact:{learner}", scen.scenario_id, learner, None, None, err, 0.0),
        _risk_row(f"risk_exact:{learner}", scen.scenario_id, learner, None, None,
                  scen.target_excess * err, 0.0),
    ]
    config = {"scenario": scenario_path, "scenario_id": scen.scenario_id,
              "learner": learner, "t_star_int": t_star_int}
    _emit("risk exact", config, RISK_COLUMNS, rows, fmt, out)


@risk.command("mc")
@click.option("--scenario", "scenario_path", required=True)
@click.option("--learner", type=click.Choice(["erm", "pool", "oracle", "ibb"]),
              required=True)
@click.option("--task", type=int, default=0, show_default=True,
              help="Task index for --learner erm.")
@click.option("--c0", type=float, default=1.0, show_default=True)
@click.option("--delta", type=float, default=None,
              help="Confidence level for --learner ibb (default: scenario delta).")
@click.option("--trials", type=int, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--backend", type=click.Choice(["numba", "numpy"]), default=None)
@add_options(output_options)
@handle_errors
def risk_mc(scenario_path, learner, task, c0, delta, trials, seed, threads,
            backend, out, fmt):
    """Monte Carlo estimate of a learner's expected excess risk."""
    scen = _load_scenario(scenario_path)
    spec = {"erm": LearnerSpec.per_task_erm(task), "pool": LearnerSpec.pool(),
            "oracle": LearnerSpec.oracle(), "ibb": LearnerSpec.ibb(c0, delta)}[learner]
    est = engine.simulate_learner_risk(scen, spec, trials, seed, threads=threads,
                                       backend=backend)
    rows = [_risk_row(est.quantity, scen.scenario_id, learner, est.trials, est.seed,
                      est.mean, est.stderr)]
    config = {"scenario": scenario_path, "scenario_id": scen.scenario_id,
              "learner": learner, "task": task, "c0": c0, "delta": delta,
              "trials": trials, "seed": seed}
    _emit("risk mc", config, RISK_COLUMNS, rows, fmt, out,
          extras={"estimate": est.to_dict()} if est.extras else None)


# ---------------------------------------------------------------------- kl


@main.group()
def kl():
    """Mixture KL divergence and the testing lower bounds it implies."""


KL_COLUMNS = ["scenario_id", "per_task", "total", "pinsker", "bretagnolle_huber",
              "risk_bound"]


@kl.command("exact")
@click.option("--scenario", "scenario_path", required=True)
@click.option("--tables/--no-tables", default=False, show_default=True,
              help="Attach the per-task statistic tables (JSON output only).")
@add_options(output_options)
@handle_errors
def kl_exact(scenario_path, tables, out, fmt):
    """Exact per-task/total KL with its error and risk lower bounds."""
    scen = _load_scenario(scenario_path)
    per_task, total = exact.mixture_task_kl(scen)
    lb = exact.adaptive_error_lower_bound(scen)
    rows = [{"scenario_id": scen.scenario_id, "per_task": per_task, "total": total,
             "pinsker": lb.pinsker, "bretagnolle_huber": lb.bretagnolle_huber,
             "risk_bound": lb.risk_bound}]
    config = {"scenario": scenario_path, "scenario_id": scen.scenario_id}
    extras = None
    if tables:
        sigma = scen.y_star
        extras = {"mixture_suffstat": {
            "truth": exact.mixture_suffstat_dist(scen, sigma).to_dict(),
            "flipped": exact.mixture_suffstat_dist(scen, 1 - sigma).to_dict(),
        }}
    _emit("kl exact", config, KL_COLUMNS, rows, fmt, out, extras=extras)


@kl.command("mc")
@click.option("--scenario", "scenario_path", required=True)
@click.option("--trials", type=int, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--backend", type=click.Choice(["numba", "numpy"]), default=None)
@add_options(output_options)
@handle_errors
def kl_mc(scenario_path, trials, seed, threads, backend, out, fmt):
    """Monte Carlo estimate of the total mixture KL."""
    scen = _load_scenario(scenario_path)
    est = engine.estimate_mixture_kl_mc(scen, trials, seed, threads=threads,
                                        backend=backend)
    rows = [_risk_row(est.quantity, scen.scenario_id, "", est.trials, est.seed,
                      est.mean, est.stderr)]
    config = {"scenario": scenario_path, "scenario_id": scen.scenario_id,
              "trials": trials, "seed": seed}
    _emit("kl mc", config, RISK_COLUMNS, rows, fmt, out)


# ---------------------------------------------------------------------- testerror


@main.group()
def testerror():
    """Bayes (likelihood-ratio) test error of the label hypothesis problem."""


@testerror.command("mc")
@click.option("--scenario", "scenario_path", required=True)
@click.option("--trials", type=int, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--backend", type=click.Choice(["numba", "numpy"]), default=None)
@click.option("--by-fair-count", is_flag=True, default=False,
              help="Also report error frequencies conditional on the realized "
                   "number of favorable tasks (JSON extras; fair-noisy only).")
@add_options(output_options)
@handle_errors
def testerror_mc(scenario_path, trials, seed, threads, backend, by_fair_count,
                 out, fmt):
    scen = _load_scenario(scenario_path)
    est = engine.simulate_bayes_test_error(scen, trials, seed, threads=threads,
                                           backend=backend,
                                           by_favorable_count=by_fair_count)
    rows = [_risk_row(est.quantity, scen.scenario_id, "", est.trials, est.seed,
                      est.mean, est.stderr)]
    config = {"scenario": scenario_path, "scenario_id": scen.scenario_id,
              "trials": trials, "seed": seed, "by_fair_count": by_fair_count}
    _emit("testerror mc", config, RISK_COLUMNS, rows, fmt, out,
          extras={"estimate": est.to_dict()} if est.extras else None)


# ---------------------------------------------------------------------- bruteforce


@main.command("bruteforce")
@click.option("--scenario", "scenario_path", required=True)
@click.option("--n-small", "--N-small", "n_small", type=click.IntRange(1, 3),
              required=True)
@add_options(output_options)
@handle_errors
def bruteforce(scenario_path, n_small, out, fmt):
    """Exact TV / Bayes error / KL of a small joint task block."""
    scen = _load_scenario(scenario_path)
    tv, bayes, kl_val = exact.joint_bruteforce_test(scen, n_small)
    columns = ["scenario_id", "n_small", "tv", "bayes_error", "kl"]
    rows = [{"scenario_id": scen.scenario_id, "n_small": n_small, "tv": tv,
             "bayes_error": bayes, "kl": kl_val}]
    config = {"scenario": scenario_path, "scenario_id": scen.scenario_id,
              "n_small": n_small}
    _emit("bruteforce", config, columns, rows, fmt, out)


# ---------------------------------------------------------------------- bounds


@main.group()
def bounds():
    """Closed-form concentration inequality values."""


def _parse_params(text: str) -> dict:
    out: dict = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise DomainError(f"malformed parameter {item!r}; expected key=value")
        key, value = item.split("=", 1)
        key = key.strip().replace("-", "_")
        value = value.strip()
        if ":" in value:
            out[key] = [float(v) for v in value.split(":")]
        else:
            out[key] = float(value)
    return out


@bounds.command("eval")
@click.option("--name", type=click.Choice(list(BOUND_NAMES)), required=True)
@click.option("--params", default="", help="Comma-separated key=value pairs.")
@add_options(output_options)
@handle_errors
def bounds_eval(name, params, out, fmt):
    ev = evaluate_bound(name, **_parse_params(params))
    columns = ["name", "params", "lower", "upper", "value"]
    rows = [{"name": ev.name,
             "params": ";".join(f"{k}={v}" for k, v in ev.inputs.items()),
             "lower": ev.lower, "upper": ev.upper, "value": ev.value}]
    _emit("bounds eval", {"name": name, "params": params}, columns, rows, fmt, out)


# ---------------------------------------------------------------------- rates


@main.command("rates")
@click.option("--minimax", "which", flag_value="minimax")
@click.option("--pooling", "which", flag_value="pooling")
@click.option("--params", default="", help="Comma-separated key=value pairs; "
              "colon-separated lists (sizes=16:16).")
@add_options(output_options)
@handle_errors
def rates(which, params, out, fmt):
    """Minimax rate breakdown or the high-probability pooling bound."""
    if which is None:
        raise DomainError("choose one of --minimax or --pooling")
    p = _parse_params(params)
    if which == "minimax":
        for key in ("beta", "sizes", "rhos"):
            if key not in p:
                raise DomainError(f"--minimax needs {key}= in --params")
        sizes = p["sizes"] if isinstance(p["sizes"], list) else [p["sizes"]]
        rhos = p["rhos"] if isinstance(p["rhos"], list) else [p["rhos"]]
        rb = exact.minimax_rate(p["beta"], [int(s) for s in sizes], rhos)
        columns = ["t", "cumulative_n", "rho_bar", "rate", "is_argmin"]
        rows = [{"t": pr.t, "cumulative_n": pr.cumulative_n, "rho_bar": pr.rho_bar,
                 "rate": pr.rate, "is_argmin": pr.t == rb.argmin_t}
                for pr in rb.per_prefix]
        _emit("rates minimax", {"params": params}, columns, rows, fmt, out,
              extras={"breakdown": rb.to_dict()})
    else:
        needed = ("alpha", "beta", "c_beta", "c0", "c_rho", "d", "n", "N", "delta",
                  "rho_bar")
        missing = [k for k in needed if k not in p]
        if missing:
            raise DomainError(f"--pooling needs {missing} in --params")
        value = exact.pooling_rate_bound(p["alpha"], p["beta"], p["c_beta"], p["c0"],
                                         p["c_rho"], int(p["d"]), int(p["n"]),
                                         int(p["N"]), p["delta"], p["rho_bar"])
        columns = list(needed) + ["value"]
        rows = [{**{k: p[k] for k in needed}, "value": value}]
        _emit("rates pooling", {"params": params}, columns, rows, fmt, out)


# ---------------------------------------------------------------------- construction


@main.group()
def construction():
    """Random index construction feasibility."""


@construction.command("mc")
@click.option("--n-plus-1", type=int, required=True)
@click.option("--trials", type=int, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--backend", type=click.Choice(["numba", "numpy"]), default=None)
@add_options(output_options)
@handle_errors
def construction_mc(n_plus_1, trials, seed, threads, backend, out, fmt):
    est = engine.estimate_construction_feasibility(n_plus_1, trials, seed,
                                                   threads=threads, backend=backend)
    rows = [_risk_row(est.quantity, "", "", est.trials, est.seed, est.mean, est.stderr)]
    config = {"n_plus_1": n_plus_1, "trials": trials, "seed": seed}
    _emit("construction mc", config, RISK_COLUMNS, rows, fmt, out)


# ---------------------------------------------------------------------- sweep


SWEEP_COMMANDS = ("risk-exact", "risk-mc", "kl-exact", "kl-mc", "testerror-mc",
                  "construction-mc")


def _parse_sweep_config(path: str) -> tuple[dict, list[tuple[str, list]]]:
    base: dict = {}
    grids: list[tuple[str, list]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key.startswith("grid."):
                grids.append((key[len("grid."):], _parse_grid_values(value)))
            else:
                base[key] = value
    return base, grids


def _parse_grid_values(value: str) -> list:
    if "," in value:
        return [_maybe_number(v.strip()) for v in value.split(",")]
    if ":" in value:
        start, stop, step = (float(v) for v in value.split(":"))
        count = max(0, math.ceil((stop - start) / step - 1e-12))
        return [_maybe_int(start + i * step) for i in range(count)]
    return [_maybe_number(value)]


def _maybe_int(x: float):
    return int(round(x)) if abs(x - round(x)) < 1e-9 else x


def _maybe_number(text: str):
    try:
        return _maybe_int(float(text))
    except ValueError:
        return text


def _cell_scenario(params: dict) -> MultitaskScenario:
    family = params.get("scenario.family")
    n = int(params["scenario.n"])
    if family == "agnostic":
        return make_agnostic_scenario(n, int(params["scenario.N"]),
                                      float(params["scenario.delta"]))
    if family == "fair-noisy":
        return make_fair_noisy_scenario(n, int(params["scenario.N"]),
                                        float(params["scenario.beta"]),
                                        float(params.get("scenario.c-beta", 2.0)))
    if family == "background":
        return make_background_scenario(n, int(params["scenario.n-p"]),
                                        int(params["scenario.n-q"]),
                                        int(params["scenario.n-target"]),
                                        float(params["scenario.beta"]))
    raise DomainError(f"sweep cell needs scenario.family, got {family!r}")


def _run_sweep_cell(command: str, params: dict) -> dict:
    if command == "construction-mc":
        est = engine.estimate_construction_feasibility(
            int(params["n-plus-1"]), int(params["trials"]), int(params["seed"]))
        return {"quantity": est.quantity, "mean": est.mean, "stderr": est.stderr}
    scen = _cell_scenario(params)
    out = {"scenario_id": scen.scenario_id}
    if command == "risk-exact":
        p = scen.params
        learner = params.get("learner", "erm")
        if scen.family == "agnostic":
            err = (exact.erm_error_exact_agnostic(scen.n_per_task, p.epsilon)
                   if learner in ("erm", "oracle") else
                   exact.pooling_error_exact_agnostic(scen.n_per_task, scen.num_tasks,
                                                      p.epsilon))
        else:
            t_int = int(params.get("t-star-int", math.floor(p.t_star + 0.5)))
            err = exact.oracle_error_exact_fair(scen.n_per_task, t_int, p.beta,
                                                p.c_beta, scen.num_tasks)
        out.update(quantity=f"error_exact:{learner}", mean=err, stderr=0.0)
    elif command == "risk-mc":
        learner = params.get("learner", "pool")
        spec = {"erm": LearnerSpec.per_task_erm(int(params.get("task", 0))),
                "pool": LearnerSpec.pool(), "oracle": LearnerSpec.oracle(),
                "ibb": LearnerSpec.ibb(float(params.get("c0", 1.0)),
                                       float(params["delta"]) if "delta" in params else None),
                }[learner]
        est = engine.simulate_learner_risk(scen, spec, int(params["trials"]),
                                           int(params["seed"]))
        out.update(quantity=est.quantity, mean=est.mean, stderr=est.stderr)
    elif command == "kl-exact":
        per_task, total = exact.mixture_task_kl(scen)
        lb = exact.adaptive_error_lower_bound(scen)
        out.update(quantity="kl_exact", mean=total, stderr=0.0, per_task=per_task,
                   bretagnolle_huber=lb.bretagnolle_huber)
    elif command == "kl-mc":
        est = engine.estimate_mixture_kl_mc(scen, int(params["trials"]),
                                            int(params["seed"]))
        out.update(quantity=est.quantity, mean=est.mean, stderr=est.stderr)
    elif command == "testerror-mc":
        est = engine.simulate_bayes_test_error(scen, int(params["trials"]),
                                               int(params["seed"]))
        out.update(quantity=est.quantity, mean=est.mean, stderr=est.stderr)
    else:
        raise DomainError(f"unknown sweep command {command!r}; choose from {SWEEP_COMMANDS}")
    return out


@main.command("sweep")
@click.option("--config", "config_path", required=True)
@click.option("--out", default=None, help="Overrides the config's out= entry.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None)
@handle_errors
def sweep(config_path, out, fmt):
    """Run a grid of experiment cells from a flat key=value config file.

    Repeated ``grid.<param> = start:stop:step`` (stop exclusive) or
    ``grid.<param> = v1,v2,...`` entries define the grid; every other key is
    a fixed parameter.  One output row per cell, ordered by cell index.
    """
    base, grids = _parse_sweep_config(config_path)
    command = base.get("command")
    if command not in SWEEP_COMMANDS:
        raise DomainError(f"config needs command= one of {SWEEP_COMMANDS}, got {command!r}")
    out = out or base.get("out", "-")
    fmt = fmt or base.get("format", "csv")
    grid_keys = [k for k, _ in grids]
    cells = list(itertools.product(*[vals for _, vals in grids])) or [()]
    rows = []
    value_cols: list[str] = []
    for index, cell in enumerate(cells):
        params = dict(base)
        params.update(dict(zip(grid_keys, cell)))
        result = _run_sweep_cell(command, params)
        for key in result:
            if key not in value_cols:
                value_cols.append(key)
        rows.append({"cell": index, **dict(zip(grid_keys, cell)), **result})
    columns = ["cell"] + grid_keys + value_cols
    config = {"config_path": config_path, "base": base,
              "grid": {k: v for k, v in grids}}
    _emit(f"sweep {command}", config, columns, rows, fmt, out)


if __name__ == "__main__":
    main()
