import pytest

from qtriple.ncpoly import QParam


@pytest.fixture(scope="session")
def qp():
    return QParam(0.5)


@pytest.fixture(scope="session", params=[0.3, 0.5, 0.8])
def qp_any(request):
    return QParam(request.param)
