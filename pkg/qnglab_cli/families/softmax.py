import numpy as np

from qnglab_cli.classical import SoftmaxFamily
from qnglab_cli.errors import ConfigError
from qnglab_cli.families import Problem


def build(settings):
    """
    Categorical distribution with one logit per outcome.

    The outcome count is len(theta0); the target distribution is the softmax
    of logits_target, or of theta_star when logits_target is unset.
    """
    theta0 = np.asarray(settings["theta0"], dtype=float)
    logits = settings.get("logits_target")
    if logits is None:
        logits = settings["theta_star"]
    if len(logits) != theta0.size:
        raise ConfigError(
            f"Softmax target has {len(logits)} logits but theta0 has {theta0.size} entries."
        )
    family = SoftmaxFamily(theta0.size)
    return Problem(family=family, target=family.value(logits), theta0=theta0)
