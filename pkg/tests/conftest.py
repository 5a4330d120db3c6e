import numpy as np
import pytest

from sheaflab.digraph import Bigraph, random_digraph
from sheaflab.formats import data_file, parse_digraph, parse_sheaf
from sheaflab.linalg import PrimeField


def triangular(xs) -> bool:
    return all(xs[i] <= xs[i - 1] + xs[i + 1] for i in range(1, len(xs) - 1))


def unhappy(p: int | None = None):
    path = data_file("unhappy.sheaf")
    return parse_sheaf(path.read_text(), path.parent, p)


def connected_digraph(rng, n_v: int, n_e: int, prefix: str = ""):
    """Rejection-sample until the random digraph is connected."""
    while True:
        g = random_digraph(rng, n_v, n_e, prefix)
        if len(g.components()) == 1:
            return g


@pytest.fixture
def b2() -> Bigraph:
    return parse_digraph(data_file("b2.dg").read_text())


@pytest.fixture
def gf2() -> PrimeField:
    return PrimeField(2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
