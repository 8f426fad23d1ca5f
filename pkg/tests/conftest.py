import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gradedlie import builders
from gradedlie.builders import WindowSpec


@pytest.fixture(scope="session")
def k_alg():
    return builders.build_counterexample_k()


@pytest.fixture(scope="session")
def sl2():
    return builders.build_sl(2)


@pytest.fixture(scope="session")
def sl3():
    return builders.build_sl(3)


@pytest.fixture(scope="session")
def borel_plus():
    return builders.build_borel(3, "+")


@pytest.fixture(scope="session")
def sv1():
    return builders.build_sv(WindowSpec(1))


@pytest.fixture(scope="session")
def sv2():
    return builders.build_sv(WindowSpec(2))


@pytest.fixture(scope="session")
def sv4():
    return builders.build_sv(WindowSpec(4))


@pytest.fixture(scope="session")
def witt1():
    return builders.build_witt(1, WindowSpec(2))
