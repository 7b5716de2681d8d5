import numpy as np
import pytest

from eit_secrecy.channels import WiretapChannel, bswc, quantized_awgn_wiretap
from eit_secrecy.eit import eit_system
from eit_secrecy.probability import Pmf, TransitionMatrix

TAU = np.array([1.0, -1.0]) / np.sqrt(2.0)


def random_channel(rng: np.random.Generator, nx: int, ny: int, nz: int) -> WiretapChannel:
    """严格内点的随机信道：Dirichlet 列加下限后重新归一化。"""
    px = rng.dirichlet(np.ones(nx)) + 0.05
    bob = rng.dirichlet(np.ones(ny), size=nx).T + 0.02
    eve = rng.dirichlet(np.ones(nz), size=nx).T + 0.02
    return WiretapChannel(
        px=Pmf.renormalized(px),
        bob=TransitionMatrix(bob / bob.sum(axis=0)),
        eve=TransitionMatrix(eve / eve.sum(axis=0)),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def tau():
    return TAU.copy()


@pytest.fixture
def bswc_channel():
    return bswc(0.1, 0.25)


@pytest.fixture
def bswc_system(bswc_channel):
    return eit_system(bswc_channel)


@pytest.fixture
def awgn5():
    return quantized_awgn_wiretap(5, 5, 5, 6.0, 6.0, rng_seed=1)


@pytest.fixture
def awgn8():
    return quantized_awgn_wiretap(8, 8, 8, 8.0, 0.0, rng_seed=7)


@pytest.fixture
def awgn8_system(awgn8):
    return eit_system(awgn8)
