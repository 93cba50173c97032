import sys

import click

from qnglab_cli.errors import QngError
from qnglab_cli.experiments import (
    DEFAULT_SAMPLES,
    DEFAULT_T_RANGE,
    PETZ_CURVE_FIELDS,
    output_fields,
    petz_curve_rows,
    write_csv,
)
from qnglab_cli.utils import load_experiment_config


def split_alpha_list(text):
    """'0.1, 0.3,sld' -> ['0.1', '0.3', 'sld']; None passes through."""
    if text is None:
        return None
    return [token.strip() for token in text.split(',') if token.strip()]


@click.command(name="petz-curve")
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), help='Flat key = value experiment file.')
@click.option('--alpha', help='Comma-separated alphas or presets (sld, rrld, kubo_mori, large_alpha).')
@click.option('--t-min', type=float, default=DEFAULT_T_RANGE[0], show_default=True, help='Smallest t.')
@click.option('--t-max', type=float, default=DEFAULT_T_RANGE[1], show_default=True, help='Largest t.')
@click.option('--samples', type=int, default=DEFAULT_SAMPLES, show_default=True, help='Number of t values.')
@click.option('--envelope', is_flag=True, help='Append the SLD and rRLD curves that bound the monotone window.')
@click.option('--regime', is_flag=True, help='Append a column marking each alpha as monotone or non-monotone.')
@click.option('--out', default='petz_curve.csv', show_default=True, help='Output CSV path.')
@click.option('--debug', is_flag=True, help='Show debug output.')
def petz_curve(config_path, alpha, t_min, t_max, samples, envelope, regime, out, debug):
    """
    Tabulates Petz functions f_alpha(t) as CSV with columns t,alpha,f.

    --regime appends a column marking each alpha as monotone or non-monotone.
    """
    try:
        settings = load_experiment_config(config_path, {"alpha": split_alpha_list(alpha)}, debug=debug)
        rows = petz_curve_rows(settings["alpha"], t_min, t_max, samples, envelope=envelope)
        write_csv(out, output_fields(PETZ_CURVE_FIELDS, regime), rows)
    except (QngError, OSError) as e:
        click.echo(f"❌ petz-curve failed: {e}", err=True)
        sys.exit(1)
    click.echo(f"✅ Wrote {len(rows)} rows to {out}")
