import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(n, rng, density=False):
    from mbsim.simcore import QuantumState

    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    st = QuantumState.from_vector(v)
    return st.to_density() if density else st


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
