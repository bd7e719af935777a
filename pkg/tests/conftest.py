import random

import pytest

from bifib.suite import DEFAULT_RNG_SEED, FREE_GRAPHS, free_signature


def pytest_addoption(parser):
    parser.addoption("--seed-rng", type=int, default=DEFAULT_RNG_SEED,
                     help="seed for the randomized property tests")


@pytest.hookimpl(tryfirst=True)
def pytest_configure(config):
    # hypothesis draws from the same seed unless it was given one explicitly
    if config.getoption("hypothesis_seed", None) is None:
        config.option.hypothesis_seed = str(config.getoption("--seed-rng"))


@pytest.fixture
def rng_seed(request) -> int:
    return request.config.getoption("--seed-rng")


@pytest.fixture
def rng(rng_seed) -> random.Random:
    return random.Random(rng_seed)


@pytest.fixture(params=range(len(FREE_GRAPHS)), ids=["loops", "cycle", "triangle"])
def free_sig(request):
    return free_signature(FREE_GRAPHS[request.param])


@pytest.fixture
def loop_sig():
    return free_signature({"a": ("x", "x"), "b": ("x", "x")})
