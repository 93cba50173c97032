from unittest.mock import patch

import numpy as np
import pytest

from qnglab_cli.states import DensityOperator, RotationFamily


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(7))


@pytest.fixture
def rotation():
    return RotationFamily([0.5, 0.0, 0.0])


@pytest.fixture
def diag_state():
    """diag(0.75, 0.25)"""
    return DensityOperator.from_matrix(np.diag([0.75, 0.25]))


@pytest.fixture
def isolated_config(tmp_path):
    """
    Points the user config file at an empty temporary directory so tests never
    read ~/.config/qnglab/config.yaml. Yields the (not yet created) file path.
    """
    config_dir = tmp_path / "config"
    config_dir.mkdir()
    config_file = config_dir / "config.yaml"
    with patch("qnglab_cli.utils.GLOBAL_QNGLAB_CONFIG_DIR", new=str(config_dir)), \
         patch("qnglab_cli.utils.GLOBAL_QNGLAB_CONFIG_FILE", new=str(config_file)):
        yield config_file
