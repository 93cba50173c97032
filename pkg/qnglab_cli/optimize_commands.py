import sys

import click

from qnglab_cli.errors import QngError
from qnglab_cli.experiments import DEFAULT_OUT, meta_path, run_sweep, write_optimize_outputs
from qnglab_cli.optimizer import STATUS_ERROR
from qnglab_cli.petz_commands import split_alpha_list
from qnglab_cli.utils import _log_step, load_experiment_config


@click.command()
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), help='Flat key = value experiment file.')
@click.option('--alpha', help='Comma-separated alphas or presets to sweep.')
@click.option('--mode', type=click.Choice(['trust', 'fixed']), help='Update rule: trust-region or fixed step.')
@click.option('--epsilon', type=float, help='Trust-region radius.')
@click.option('--eta', type=float, help='Fixed-step learning rate.')
@click.option('--xi', type=float, help='Metric regularizer in [0, 1).')
@click.option('--delta', type=float, help='State mixing weight in [0, 1).')
@click.option('--diagonal/--full', default=None, help='Use only the diagonal of the metric.')
@click.option('--max-iters', type=int, help='Number of steps per alpha.')
@click.option('--out', help='Output CSV path (a .meta.yaml file is written beside it).')
@click.option('--regime', is_flag=True, help='Append a column marking each alpha as monotone or non-monotone.')
@click.option('--debug', is_flag=True, help='Show debug output including per-alpha timing.')
def optimize(config_path, alpha, mode, epsilon, eta, xi, delta, diagonal, max_iters, out, regime, debug):
    """
    Runs natural-gradient descent for every alpha in the sweep.

    Writes one CSV block per alpha with columns
    iter,alpha,cost,grad_norm,step_norm,predicted_decrease
    (plus regime with --regime). A run that fails keeps its rows and gets an
    error row; the exit status is then 1.
    """
    overrides = {
        "alpha": split_alpha_list(alpha),
        "mode": mode,
        "epsilon": epsilon,
        "eta": eta,
        "xi": xi,
        "delta": delta,
        "diagonal": diagonal,
        "max_iters": max_iters,
        "out": out,
    }
    try:
        settings = load_experiment_config(config_path, overrides, debug=debug)
        out = settings["out"] or DEFAULT_OUT
        problem, results = run_sweep(settings, debug=debug)
        write_optimize_outputs(out, settings, problem, results, regime=regime)
    except (QngError, OSError) as e:
        click.echo(f"❌ optimize failed: {e}", err=True)
        sys.exit(1)

    failed = False
    for result in results:
        trajectory = result.trajectory
        name = f"alpha={trajectory.label}"
        final = trajectory.records[-1].cost if trajectory.records else float('nan')
        if trajectory.status == STATUS_ERROR:
            failed = True
            _log_step(name, "FAIL", trajectory.message, "optimizer")
        else:
            _log_step(name, "COMPLETED", f"{trajectory.status} after {len(trajectory) - 1} steps, cost {final:.6e}", "optimizer")

    click.echo(f"Wrote {out} and {meta_path(out)}")
    if failed:
        click.echo("❌ At least one run stopped on an error; see the error rows.", err=True)
        sys.exit(1)
