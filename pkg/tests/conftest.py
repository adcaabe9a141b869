import pytest

from tracelab import Params

# the parameter pairs used across the suite; all have p > q
ORDERED = [(3, 2), (5, 2), (5, 3), (4, 3), (7, 2)]


@pytest.fixture(params=ORDERED, ids=lambda pq: f"{pq[0]}_{pq[1]}")
def params(request):
    return Params(*request.param)


@pytest.fixture
def p32():
    return Params(3, 2)
