import random
from importlib import resources

import pytest
from hypothesis import HealthCheck, settings

from torman.baserings import BaseCohomRing, BaseKRing, load_base
from torman.charpair import load_input
from torman.exactalg import LaurentPoly

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = resources.files("torman") / "data"
PAIR_FILES = ["cp1.pair.json", "cp2.pair.json", "cp1xcp1.pair.json", "hirzebruch1.fan.json"]


def load(name):
    return load_input(str(DATA / name))


def load_base_file(name):
    return load_base(str(DATA / name))


@pytest.fixture(scope="session")
def pairs():
    return {name.split(".")[0]: load(name) for name in PAIR_FILES}


@pytest.fixture(scope="session")
def cp1(pairs):
    return pairs["cp1"]


@pytest.fixture(scope="session")
def cp2(pairs):
    return pairs["cp2"]


def cp1_cohom_base(n):
    """H*(CP^1) with c_1(xi_{e_j}) = t for every j."""
    return BaseCohomRing.projective_space(1, [1] * n)


def cp1_k_base(n):
    """K(CP^1) with [xi_{e_j}] = 1 + s for every j."""
    return BaseKRing.projective_space(1, [1] * n)


def random_laurent(rng: random.Random, variables, terms=4, lo=-2, hi=2, coeff=5):
    t = {}
    for _ in range(rng.randint(0, terms)):
        e = tuple(rng.randint(lo, hi) for _ in variables)
        t[e] = t.get(e, 0) + rng.randint(-coeff, coeff)
    return LaurentPoly(variables, t)


def random_poly(rng: random.Random, variables, terms=4, hi=3, coeff=5):
    return random_laurent(rng, variables, terms, 0, hi, coeff).to_intpoly()


# acceptance results, one line per criterion, echoed in the terminal summary
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
