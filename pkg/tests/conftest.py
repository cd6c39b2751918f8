import numpy as np
import pytest
from hypothesis import settings

from pcp_mwspp.field import gf
from pcp_mwspp.qcsp import boost_soundness, planted_instance

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


def naive_mul(a, b, modulus, r):
    """Schoolbook F_2[x] product on bit lists, reduced by long division."""
    abits = [(a >> i) & 1 for i in range(r)]
    bbits = [(b >> i) & 1 for i in range(r)]
    prod = [0] * (2 * r)
    for i, x in enumerate(abits):
        for j, y in enumerate(bbits):
            prod[i + j] ^= x & y
    mod = [(modulus >> i) & 1 for i in range(r + 1)]
    for deg in range(2 * r - 1, r - 1, -1):
        if prod[deg]:
            for k in range(r + 1):
                prod[deg - r + k] ^= mod[k]
    return sum(bit << i for i, bit in enumerate(prod[:r]))


@pytest.fixture(scope="session")
def planted_q16_m1():
    spec = gf(4)
    P0, A = planted_instance(spec, 2, 3, np.random.default_rng(1))
    return boost_soundness(P0), A


@pytest.fixture(scope="session")
def planted_q8_m1():
    spec = gf(3)
    P0, A = planted_instance(spec, 2, 3, np.random.default_rng(1))
    return boost_soundness(P0), A
