import os
import click
import yaml

from qnglab_cli.errors import ConfigError, QngError
from qnglab_cli.petz import PetzFunction

# Global status tracking
STEP_STATUS = {}
STEP_CATEGORY = {}
STEP_MESSAGE = {}
STEP_COUNT = 0

# QNGLAB_CONFIG points to the CONFIG DIRECTORY (default: ~/.config/qnglab)
GLOBAL_QNGLAB_CONFIG_DIR = os.environ.get("QNGLAB_CONFIG", os.path.expanduser("~/.config/qnglab"))
GLOBAL_QNGLAB_CONFIG_FILE = os.path.join(GLOBAL_QNGLAB_CONFIG_DIR, "config.yaml")
BASE_CONFIG_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "config.default.yaml")

CATEGORY_ORDER = ["petz", "metrics", "divergences", "states", "classical", "optimizer"]

STATUS_EMOJI = {
    "PASS": "✅",
    "COMPLETED": "✅",
    "SKIP": "⏭️",
    "PARTIAL": "⚠️",
    "XFAIL": "❎",
    "FAIL": "❌",
}

STATUS_TEXT = {
    "PASS": "PASSED",
    "COMPLETED": "COMPLETED (just finished)",
    "SKIP": "SKIPPED (not applicable)",
    "PARTIAL": "PARTIAL (needs attention)",
    "XFAIL": "FAILED (expected, negative control)",
    "FAIL": "FAILED",
}


def _log_step(step_name, status, message="", category=None):
    """
    Logs a step with its status and optional message.
    Args:
        step_name: Name of the step
        status: Status string (PASS, FAIL, SKIP, COMPLETED, PARTIAL, XFAIL)
        message: Optional message to display
        category: Optional category (petz, metrics, divergences, states, classical, optimizer)
    """
    global STEP_COUNT
    STEP_COUNT += 1
    STEP_STATUS[step_name] = status
    STEP_MESSAGE[step_name] = message
    if category:
        STEP_CATEGORY[step_name] = category

    click.echo(f"{STATUS_EMOJI.get(status, '❓')} {step_name} - {STATUS_TEXT.get(status, 'UNKNOWN')}")
    if message:
        click.echo(f"  → {message}")


def _reset_steps():
    global STEP_COUNT
    STEP_STATUS.clear()
    STEP_CATEGORY.clear()
    STEP_MESSAGE.clear()
    STEP_COUNT = 0


def _print_final_report(title="VERIFICATION REPORT"):
    """
    Prints the step table grouped by category, followed by a summary line.
    """
    click.echo("\n" + "=" * 72)
    click.echo(title.center(72))
    click.echo("=" * 72)
    click.echo(f"{'PROPERTY':<48} {'STATUS':<10}")
    click.echo("-" * 72)

    categorized_steps = {}
    for step, status in STEP_STATUS.items():
        categorized_steps.setdefault(STEP_CATEGORY.get(step, "other"), []).append((step, status))

    for category in CATEGORY_ORDER + ["other"]:
        if category not in categorized_steps:
            continue
        click.echo(f"\n{category.upper()}")
        for step, status in categorized_steps[category]:
            click.echo(f"{step:<48} {STATUS_EMOJI.get(status, '❓')} {status}")
            if status in ("FAIL", "PARTIAL") and STEP_MESSAGE.get(step):
                click.echo(f"  → {STEP_MESSAGE[step]}")

    counts = {}
    for status in STEP_STATUS.values():
        counts[status] = counts.get(status, 0) + 1

    click.echo("-" * 72)
    labels = [("PASS", "passed"), ("COMPLETED", "completed"), ("SKIP", "skipped"),
              ("PARTIAL", "partial"), ("XFAIL", "expected failures"), ("FAIL", "failed")]
    summary_parts = [f"{counts[s]} {label}" for s, label in labels if counts.get(s)]
    if summary_parts:
        click.echo(f"SUMMARY: {', '.join(summary_parts)}")
    else:
        click.echo("SUMMARY: No steps processed")
    click.echo("=" * 72)


def _deep_update(base_dict, update_dict):
    """
    Recursively updates a dictionary.
    Used to merge default config with user-provided config.
    """
    for key, value in update_dict.items():
        if isinstance(value, dict) and key in base_dict and isinstance(base_dict[key], dict):
            base_dict[key] = _deep_update(base_dict[key], value)
        else:
            base_dict[key] = value
    return base_dict


def _thread_cap():
    """Parallelism cap for alpha sweeps from QNGLAB_THREADS; 0 means serial."""
    raw = os.environ.get("QNGLAB_THREADS")
    if raw is None or raw.strip() == "":
        return min(8, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"QNGLAB_THREADS must be an integer, got '{raw}'.")
    if value < 0:
        raise ConfigError(f"QNGLAB_THREADS must be non-negative, got {value}.")
    return value


# --- Experiment configuration schema ---

def _as_float(key, value):
    if isinstance(value, bool):
        raise ConfigError(f"'{key}' must be a number, got {value!r}.")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{key}' must be a number, got {value!r}.")


def _as_int(key, value):
    number = _as_float(key, value)
    if number != int(number):
        raise ConfigError(f"'{key}' must be an integer, got {value!r}.")
    return int(number)


def _as_bool(key, value):
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in ("true", "false", "yes", "no", "on", "off"):
        return value.strip().lower() in ("true", "yes", "on")
    raise ConfigError(f"'{key}' must be true or false, got {value!r}.")


def _as_vector(key, value, length=None):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"'{key}' must be a list of numbers, got {value!r}.")
    vec = [_as_float(key, v) for v in value]
    if length is not None and len(vec) != length:
        raise ConfigError(f"'{key}' must have {length} entries, got {len(vec)}.")
    return vec


def _as_alpha_list(key, value):
    tokens = value if isinstance(value, (list, tuple)) else [value]
    if not tokens:
        raise ConfigError(f"'{key}' must name at least one alpha or preset.")
    out = []
    for token in tokens:
        try:
            f = PetzFunction.parse(token)
        except QngError as e:
            raise ConfigError(f"'{key}': {e}")
        out.append(float(f.alpha) if f.alpha is not None else f.kind.value)
    return out


def _as_choice(choices):
    def coerce(key, value):
        text = str(value).strip().lower()
        if text not in choices:
            raise ConfigError(f"'{key}' must be one of {', '.join(choices)}, got {value!r}.")
        return text
    return coerce


def _as_optional(coerce):
    def wrapped(key, value):
        return None if value is None else coerce(key, value)
    return wrapped


CONFIG_SCHEMA = {
    "family": _as_choice(("rotation", "softmax")),
    "bloch": lambda k, v: _as_vector(k, v, 3),
    "logits_target": _as_optional(_as_vector),
    "theta0": _as_vector,
    "theta_star": _as_vector,
    "mode": _as_choice(("trust", "fixed")),
    "epsilon": _as_float,
    "eta": _as_float,
    "alpha": _as_alpha_list,
    "xi": _as_float,
    "delta": _as_float,
    "diagonal": _as_bool,
    "mix_cost": _as_bool,
    "max_iters": _as_int,
    "grad_tol": _as_float,
    "out": _as_optional(lambda k, v: str(v)),
    "seed": _as_int,
    "trials": _as_int,
    "fd_step": _as_float,
}


def _normalize_config(raw, source):
    """Validates keys against CONFIG_SCHEMA and coerces every value."""
    unknown = sorted(set(raw) - set(CONFIG_SCHEMA))
    if unknown:
        raise ConfigError(f"Unknown configuration key(s) in {source}: {', '.join(unknown)}.")
    return {key: CONFIG_SCHEMA[key](key, value) for key, value in raw.items()}


def _parse_flat_config(path):
    """
    Reads an experiment file of `key = value` lines.

    Blank lines and `#` comments are ignored; each value is typed by YAML
    scalar parsing, so `alpha = [0.1, 0.3]` yields a list.
    """
    raw = {}
    with open(path, 'r') as f:
        for lineno, line in enumerate(f, start=1):
            text = line.split('#', 1)[0].strip()
            if not text:
                continue
            if '=' not in text:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got '{text}'.")
            key, value = (part.strip() for part in text.split('=', 1))
            if not key:
                raise ConfigError(f"{path}:{lineno}: missing key.")
            try:
                raw[key] = yaml.safe_load(value) if value else None
            except yaml.YAMLError as e:
                raise ConfigError(f"{path}:{lineno}: cannot parse value for '{key}': {e}")
    return raw


def _load_yaml_mapping(path, debug=False):
    with open(path, 'r') as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"Error parsing config file {path}: {e}")
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must contain a mapping.")
    if debug:
        click.echo(f"DEBUG: Loaded config from: {path}")
    return data


def _load_global_config(debug=False):
    """
    Loads the qnglab configuration in a layered approach:
    1. Base config from qnglab_cli/config.default.yaml (tool's default).
    2. User config from GLOBAL_QNGLAB_CONFIG_FILE (overrides base).

    Returns a tuple (merged_config_dict, actual_global_config_file_path).
    """
    merged_config = {}
    _deep_update(merged_config, _normalize_config(_load_yaml_mapping(BASE_CONFIG_FILE, debug), BASE_CONFIG_FILE))

    actual_global_config_file = GLOBAL_QNGLAB_CONFIG_FILE
    if os.path.exists(actual_global_config_file):
        user_config = _load_yaml_mapping(actual_global_config_file, debug)
        _deep_update(merged_config, _normalize_config(user_config, actual_global_config_file))
    elif debug:
        click.echo(f"DEBUG: User config file not found at {actual_global_config_file}. Using defaults.")

    return merged_config, actual_global_config_file


def load_experiment_config(config_path=None, overrides=None, debug=False):
    """
    Merges the layered config with an optional flat experiment file and
    command-line overrides (flags win). Overrides set to None are ignored.
    """
    merged_config, _ = _load_global_config(debug=debug)
    if config_path:
        _deep_update(merged_config, _normalize_config(_parse_flat_config(config_path), config_path))
        if debug:
            click.echo(f"DEBUG: Loaded experiment config from: {config_path}")
    if overrides:
        flags = {k: v for k, v in overrides.items() if v is not None}
        _deep_update(merged_config, _normalize_config(flags, "command-line flags"))
    return merged_config
