import json

import numpy as np
import pytest

import igflow as ig


@pytest.fixture
def ideal():
    return ig.ideal_gas()


@pytest.fixture
def ideal_unit_scales():
    return ig.ideal_gas(alpha2=1.0, beta2=1.0)


@pytest.fixture
def vdw():
    return ig.vdw_gas(a=0.5, b=0.1)


@pytest.fixture
def log2():
    return ig.log_affine([1.0, 1.0])


@pytest.fixture
def identity_model():
    """Euclidean toy: identity vielbein, unit scales, charges (0.6, 0.8)."""
    return ig.custom_model(
        name="euclid",
        dim=2,
        vielbein=lambda q: np.eye(2),
        eta=[1.0, 1.0],
        charges=[0.6, 0.8],
        entropy=lambda q: 0.6 * q[0] + 0.8 * q[1],
    )


@pytest.fixture
def write_config(tmp_path):
    def _write(cfg, name="model.json"):
        path = tmp_path / name
        path.write_text(json.dumps(cfg))
        return str(path)

    return _write
