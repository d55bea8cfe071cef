import numpy as np
import pytest
from hypothesis import settings

from dqc_sim.bath import BathSpec, BrownianMode
from dqc_sim.model import AggregateSpec

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def random_aggregate(rng: np.random.Generator, n: int, kappa: float = 1.0) -> AggregateSpec:
    e = 15000.0 + rng.uniform(-400.0, 400.0, n)
    j = np.triu(rng.uniform(-120.0, 120.0, (n, n)), 1)
    u2 = np.triu(rng.uniform(-80.0, 0.0, (n, n)), 1)
    return AggregateSpec(
        site_energies=e,
        couplings=j + j.T,
        overtone_nonlinearity=rng.uniform(-300.0, -50.0, n),
        combination_nonlinearity=u2 + u2.T,
        site_dipoles=rng.uniform(0.3, 1.5, n),
        overtone_dipole_scale=kappa,
    )


@pytest.fixture
def dimer_spec():
    return AggregateSpec.from_arrays(
        [15000.0, 15300.0],
        couplings=[[0.0, 100.0], [100.0, 0.0]],
        overtone=[-150.0, -150.0],
        combination=[[0.0, -50.0], [-50.0, 0.0]],
        dipoles=[1.0, 0.5],
    )


@pytest.fixture
def drude_bath():
    return BathSpec(lambda0=10.0, gamma0=100.0, temperature=273.0)


@pytest.fixture
def full_bath():
    return BathSpec(lambda0=10.0, gamma0=100.0,
                    modes=(BrownianMode(2.0, 260.0, 20.0), BrownianMode(1.5, 740.0, 20.0)),
                    temperature=273.0)


ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
