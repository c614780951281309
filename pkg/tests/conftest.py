import functools

import pytest

from psvsurf import Mat2, ROT90, assemble, enumerate_ball, validate_generating_set

GROUPS = {
    "rot90": [ROT90],
    "neg_id": [Mat2.diag(-1, -1)],
    "diag": [Mat2.diag(2, 1)],
    "sanov": [Mat2.of([[1, 2], [0, 1]]), Mat2.of([[1, 0], [2, 1]])],
}
ORDERS = {"rot90": 4, "neg_id": 2}


@functools.lru_cache(maxsize=None)
def gens(name):
    return validate_generating_set(GROUPS[name])


@functools.lru_cache(maxsize=None)
def ball(name, R):
    return enumerate_ball(gens(name), R)


@functools.lru_cache(maxsize=None)
def surface(name, R):
    return assemble(ball(name, R), gens(name))


@pytest.fixture(params=sorted(GROUPS))
def group_name(request):
    return request.param
