import numpy as np
import pytest

from shellkit import sampling


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(params=sampling.AUDIT_CHARTS)
def chart(request):
    return sampling.audit_chart(request.param)


@pytest.fixture
def plate():
    return sampling.audit_chart("plate")


@pytest.fixture
def sphere():
    return sampling.audit_chart("sphere")
