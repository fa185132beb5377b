import numpy as np
import pytest

from piezoharvest import DesignSpace, SimConfig


@pytest.fixture
def space_2d():
    return DesignSpace(
        names=("f", "omega"),
        lower=np.array([0.08, 0.75]),
        upper=np.array([0.1, 0.85]),
        fixed={"xi": 0.01, "chi": 0.05, "lam": 0.05, "kappa": 0.5},
    )


@pytest.fixture
def short_sim():
    # Keeps unit tests fast; the observable still has >= 100 samples.
    return SimConfig(t_end=300.0, power_window=(150.0, 300.0), observable_stride=1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
