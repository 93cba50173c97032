import sys

import click
import yaml

from qnglab_cli.errors import QngError
from qnglab_cli import utils
from qnglab_cli.utils import load_experiment_config


@click.group()
def config():
    """
    Inspects the layered qnglab configuration.

    Layers, lowest precedence first: the packaged defaults, the user file
    ($QNGLAB_CONFIG/config.yaml), a --config experiment file, then flags.
    """
    pass


@config.command(name="view")
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), help='Flat key = value experiment file to merge.')
@click.option('--debug', is_flag=True, help='Show which files were loaded.')
def config_view(config_path, debug):
    """
    Displays the merged configuration as YAML.
    """
    try:
        merged = load_experiment_config(config_path, debug=debug)
    except (QngError, OSError) as e:
        click.echo(f"❌ Could not load configuration: {e}", err=True)
        sys.exit(1)
    click.echo(yaml.safe_dump(merged, default_flow_style=False, sort_keys=False))


@config.command(name="path")
def config_path_cmd():
    """
    Prints the location of the user configuration file.
    """
    click.echo(utils.GLOBAL_QNGLAB_CONFIG_FILE)
