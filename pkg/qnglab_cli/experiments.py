"""
Experiment runners behind the `petz-curve` and `optimize` commands.

Everything here returns plain rows or writes CSV; console output stays in
the command modules.
"""
import csv
import importlib
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import click
import numpy as np
import yaml

from qnglab_cli.errors import ConfigError, InvalidParameter
from qnglab_cli.optimizer import STATUS_ERROR, OptimizerConfig, run_optimization
from qnglab_cli.petz import PetzFunction, classify_alpha, petz_eval
from qnglab_cli.utils import _thread_cap

PETZ_CURVE_FIELDS = ["t", "alpha", "f"]
OPTIMIZE_FIELDS = ["iter", "alpha", "cost", "grad_norm", "step_norm", "predicted_decrease"]
REGIME_FIELD = "regime"
DEFAULT_T_RANGE = (0.01, 5.0)
DEFAULT_SAMPLES = 500
DEFAULT_OUT = "optimize.csv"


def format_number(x):
    """17 significant digits, '.' decimal separator."""
    return "%.17g" % float(x)


def output_fields(fields, regime=False):
    """fields, plus a trailing regime column when regime is set."""
    return fields + [REGIME_FIELD] if regime else list(fields)


def write_csv(path, fieldnames, rows):
    """Rows may carry keys beyond fieldnames; those are dropped."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


# --- petz-curve ---

def curve_grid(t_min, t_max, samples):
    """Evenly spaced t values; t = 1 is included exactly when it lies in range."""
    if not (0 < t_min <= t_max) or samples < 1:
        raise InvalidParameter(f"Need 0 < t_min <= t_max and samples >= 1, got ({t_min}, {t_max}, {samples}).")
    grid = np.linspace(t_min, t_max, samples)
    if t_min <= 1.0 <= t_max:
        grid[np.isclose(grid, 1.0, rtol=0.0, atol=1e-12)] = 1.0
        grid = np.union1d(grid, [1.0])
    return grid


def petz_curve_rows(alphas, t_min=DEFAULT_T_RANGE[0], t_max=DEFAULT_T_RANGE[1],
                    samples=DEFAULT_SAMPLES, envelope=False):
    """
    One block of rows per Petz function, t ascending within each block.

    With envelope=True the SLD and rRLD curves bounding the monotone window
    are appended as extra blocks.
    """
    functions = [PetzFunction.parse(a) for a in alphas]
    if envelope:
        functions += [PetzFunction.sld(), PetzFunction.rrld()]
    grid = curve_grid(t_min, t_max, samples)
    rows = []
    for f in functions:
        regime = classify_alpha(f)
        for t, value in zip(grid, petz_eval(f, grid)):
            rows.append({"t": format_number(t), "alpha": f.label, "f": format_number(value), "regime": regime})
    return rows


# --- optimize ---

@dataclass
class SweepResult:
    petz: PetzFunction
    trajectory: object
    seconds: float


def load_problem(settings, debug=False):
    """Imports qnglab_cli.families.<family> and calls its build(settings)."""
    family_id = settings["family"]
    module_name = f"qnglab_cli.families.{family_id}"
    try:
        module = importlib.import_module(module_name)
    except ImportError:
        raise ConfigError(f"Family module '{module_name}' not found.")
    if not hasattr(module, "build"):
        raise ConfigError(f"Family module '{module_name}' has no build() function.")
    if debug:
        click.echo(f"DEBUG: Resolved family '{family_id}' to {module.__file__}")
    return module.build(settings)


def optimizer_config(settings, petz):
    return OptimizerConfig(
        mode=settings["mode"],
        epsilon=settings["epsilon"],
        eta=settings["eta"],
        petz=petz,
        xi=settings["xi"],
        delta=settings["delta"],
        diagonal=settings["diagonal"],
        max_iters=settings["max_iters"],
        grad_tol=settings["grad_tol"],
        mix_cost=settings["mix_cost"],
    )


def run_sweep(settings, debug=False):
    """
    Runs one optimization per entry of settings["alpha"].

    Runs are spread over at most QNGLAB_THREADS worker threads; results come
    back in alpha-list order whatever order they finish in.
    """
    problem = load_problem(settings, debug=debug)
    configs = [optimizer_config(settings, PetzFunction.parse(a)) for a in settings["alpha"]]

    def run_one(cfg):
        start = time.perf_counter()
        trajectory = run_optimization(problem.family, problem.target, cfg, problem.theta0)
        return SweepResult(petz=cfg.petz, trajectory=trajectory, seconds=time.perf_counter() - start)

    workers = _thread_cap()
    if workers == 0:
        results = [run_one(cfg) for cfg in configs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(run_one, configs))

    if debug:
        for result in results:
            click.echo(f"DEBUG: alpha={result.petz.label} finished in {result.seconds:.3f}s "
                       f"({len(result.trajectory)} records, status {result.trajectory.status})")
    return problem, results


def optimize_rows(result):
    trajectory = result.trajectory
    regime = classify_alpha(result.petz)
    rows = [
        {
            "iter": r.iteration,
            "alpha": trajectory.label,
            "cost": format_number(r.cost),
            "grad_norm": format_number(r.grad_norm),
            "step_norm": format_number(r.step_norm),
            "predicted_decrease": format_number(r.predicted_decrease),
            "regime": regime,
        }
        for r in trajectory.records
    ]
    if trajectory.status == STATUS_ERROR:
        rows.append({
            "iter": len(trajectory.records),
            "alpha": trajectory.label,
            "cost": "",
            "grad_norm": "",
            "step_norm": "",
            "predicted_decrease": "",
            "regime": "error",
        })
    return rows


def meta_path(out):
    return f"{out}.meta.yaml"


def run_metadata(settings, problem, results):
    return {
        "config": dict(settings),
        "family": problem.family.descriptor(),
        "stencil_delta": float(settings["delta"]),
        "runs": [
            {
                "alpha": r.petz.label,
                "regime": classify_alpha(r.petz),
                "status": r.trajectory.status,
                "message": r.trajectory.message,
                "records": len(r.trajectory),
                "final_cost": float(r.trajectory.records[-1].cost) if r.trajectory.records else None,
            }
            for r in results
        ],
    }


def write_optimize_outputs(out, settings, problem, results, regime=False):
    rows = []
    for result in results:
        rows.extend(optimize_rows(result))
    write_csv(out, output_fields(OPTIMIZE_FIELDS, regime), rows)
    with open(meta_path(out), 'w') as f:
        yaml.safe_dump(run_metadata(settings, problem, results), f, default_flow_style=False, sort_keys=False)
    return rows


def cost_gap(trajectories, a_lo, a_hi, iteration):
    """
    cost(a_hi) - cost(a_lo) at a common iteration.

    trajectories maps Petz labels (or any alpha token) to Trajectory objects.
    """
    by_label = {PetzFunction.parse(k).label: v for k, v in trajectories.items()}
    lo = PetzFunction.parse(a_lo).label
    hi = PetzFunction.parse(a_hi).label
    for label in (lo, hi):
        if label not in by_label:
            raise InvalidParameter(f"No trajectory for alpha {label}.")
    return by_label[hi].cost_at(iteration) - by_label[lo].cost_at(iteration)
