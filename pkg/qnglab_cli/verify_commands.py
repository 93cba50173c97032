import sys

import click

from qnglab_cli.errors import QngError
from qnglab_cli.utils import _log_step, _print_final_report, _reset_steps, load_experiment_config
from qnglab_cli.verify import run_suite


@click.command()
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), help='Flat key = value experiment file.')
@click.option('--seed', type=int, help='Seed for the Philox generator.')
@click.option('--trials', type=int, help='Random instances per property.')
@click.option('--negative-control', is_flag=True, help='Also run a deliberately false order check that must fail.')
@click.option('--debug', is_flag=True, help='Show debug output.')
def verify(config_path, seed, trials, negative_control, debug):
    """
    Runs the property suite and prints a pass/fail report.

    Exits with status 1 when any property fails.
    """
    try:
        settings = load_experiment_config(config_path, {"seed": seed, "trials": trials}, debug=debug)
        click.echo(f"Running property suite (seed {settings['seed']}, {settings['trials']} trials)...")
        _reset_steps()

        def report(result):
            message = f"max violation {result.violation:.3e} (tolerance {result.tolerance:.0e})"
            _log_step(result.name, result.status, message, result.category)

        results = run_suite(settings["seed"], settings["trials"], negative_control=negative_control,
                            fd_step=settings["fd_step"], on_result=report)
    except (QngError, OSError) as e:
        click.echo(f"❌ verify failed: {e}", err=True)
        sys.exit(1)

    _print_final_report()
    if not all(r.ok for r in results):
        sys.exit(1)
