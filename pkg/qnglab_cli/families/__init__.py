"""
Parameterized families selectable by the `family` config key.

Each module here exposes build(settings) returning a Problem.
"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Problem:
    family: object
    target: object
    theta0: np.ndarray
