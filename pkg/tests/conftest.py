import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from xsym.qmat import XState

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

KINDS = ("depolarizing", "amplitude_damping", "bit_flip", "bit_phase_flip", "dephasing")

probs = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def x_states(draw, real=False):
    w = [draw(st.floats(min_value=0.0, max_value=1.0)) for _ in range(4)]
    total = sum(w)
    if total < 1e-3:
        w, total = [1.0, 1.0, 1.0, 1.0], 4.0
    d = [v / total for v in w]
    f14, f23 = draw(probs), draw(probs)
    m14, m23 = f14 * np.sqrt(d[0] * d[3]), f23 * np.sqrt(d[1] * d[2])
    if real:
        s14 = draw(st.sampled_from([-1.0, 1.0]))
        s23 = draw(st.sampled_from([-1.0, 1.0]))
        return XState(*d, s14 * m14, s23 * m23)
    a14 = draw(st.floats(min_value=0.0, max_value=2 * np.pi))
    a23 = draw(st.floats(min_value=0.0, max_value=2 * np.pi))
    return XState(*d, m14 * np.exp(1j * a14), m23 * np.exp(1j * a23))


@pytest.fixture
def rng():
    return np.random.default_rng(42)


ACCEPTANCE = []  # (number, title, passed, detail), filled by test_acceptance


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{num:2d}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
