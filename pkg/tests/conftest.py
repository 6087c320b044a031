import sys
import os

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../src")))

import pytest

from cosymcr.accs.report import Sample
from cosymcr.models.registry import ModelSpec, build_model


@pytest.fixture(scope="session")
def flat():
    return build_model(ModelSpec("flat", 1))


@pytest.fixture(scope="session")
def model_mu0():
    return build_model(ModelSpec("model-frame", 1, 0.0))


@pytest.fixture(scope="session")
def model_mu1():
    return build_model(ModelSpec("model-frame", 1, 1.0))


@pytest.fixture(scope="session")
def contact():
    return build_model(ModelSpec("control-contact", 1))


@pytest.fixture(scope="session")
def twisted():
    return build_model(ModelSpec("control-twisted", 2))


@pytest.fixture
def sample3(model_mu0):
    return Sample.draw(model_mu0.chart, 20, seed=7)
