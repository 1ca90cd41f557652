import pytest

from fhesparse import CkksEngine, ModelEngine


@pytest.fixture(scope="session")
def model_engine():
    return ModelEngine()


@pytest.fixture(scope="session")
def ckks_engine():
    return CkksEngine(seed=1234)


@pytest.fixture(scope="session", params=["model", "ckks"])
def engine(request, model_engine, ckks_engine):
    return model_engine if request.param == "model" else ckks_engine


def linear_tol(engine) -> float:
    """Tolerance for encrypt/add/rotate paths: exact on the model engine."""
    return 0.0 if isinstance(engine, ModelEngine) else 1e-5


def mult_tol(engine) -> float:
    """Tolerance for multiplicative circuits."""
    return 0.0 if isinstance(engine, ModelEngine) else 1e-3
