import numpy as np
import pytest

from hmmtrend import HmmModel, kernels
from hmmtrend import datasets


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def published():
    """Row-normalized published models keyed by lag."""
    return {k: datasets.published_model(k) for k in range(1, 7)}


@pytest.fixture
def flip_model():
    """Deterministic 2-state alternating chain; state i always emits symbol i."""
    return HmmModel(["a", "b"], ["x", "y"], [[0, 1], [1, 0]], [[1, 0], [0, 1]], [1, 0])


BACKENDS = [kernels.python_backend]
if kernels.compiled_backend is not None:
    BACKENDS.append(kernels.compiled_backend)


@pytest.fixture(params=BACKENDS, ids=lambda b: b.__name__.rsplit(".", 1)[-1])
def backend(request, monkeypatch):
    """Run a test once per available kernel backend."""
    for name in ("forward_scaled", "backward_scaled", "xi_sum", "viterbi", "sample_path"):
        monkeypatch.setattr(kernels, name, getattr(request.param, name))
    return request.param


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.summary_lines():
            terminalreporter.write_line(line)
