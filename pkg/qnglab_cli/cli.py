import click
from qnglab_cli.petz_commands import petz_curve
from qnglab_cli.optimize_commands import optimize
from qnglab_cli.verify_commands import verify
from qnglab_cli.config_commands import config


@click.group()
def qnglab():
    """
    Generalized quantum natural gradient with Petz-function metrics.

    qnglab tabulates Petz functions, runs alpha sweeps of natural-gradient
    descent and checks the order relations between the induced metrics.
    """
    pass


qnglab.add_command(petz_curve)
qnglab.add_command(optimize)
qnglab.add_command(verify)
qnglab.add_command(config)

if __name__ == '__main__':
    qnglab()
