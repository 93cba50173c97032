import numpy as np

from qnglab_cli.families import Problem
from qnglab_cli.states import RotationFamily


def build(settings):
    """Single-qubit Rz(theta_3) Ry(theta_2) Rz(theta_1) circuit on the configured Bloch state."""
    family = RotationFamily(settings["bloch"])
    theta0 = family.check_theta(settings["theta0"])
    target = family.value(settings["theta_star"])
    return Problem(family=family, target=target, theta0=np.array(theta0))
