import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from stark_resonance import GaussianState, ModelParams

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# the asymmetric double well used throughout: deeper well at x = 0
TYPE_I = dict(alpha1=-2.8, alpha2=-2.0, a=5.0)
TYPE_II = dict(alpha1=-3.2, alpha2=-2.0, a=5.0)

# resonances and weights of the type I well, Gaussian at 0 with sigma 1/2.
# E1 is the branch continued from the deep-well level at weak field. Frozen
# from this package and confirmed as roots of an mpmath Krein determinant.
REFERENCE = {
    0.17: dict(
        E1=-1.962711272549842 - 3.5063022593113e-07j,
        E2=-1.8595783399916779 - 3.2896820550220e-04j,
        c1=0.9655089007878901 - 1.120914482537563e-05j,
        c2=0.004100267196446376 + 8.513417930376629e-06j,
    ),
    0.21: dict(
        E1=-2.066347218982649 - 1.3720036770469e-03j,
        E2=-1.963162650914945 - 1.4622209271231e-05j,
        c1=0.003490477807072457 - 1.444006480892853e-04j,
        c2=0.9654801224389707 + 1.2991650906172408e-04j,
    ),
}
F_CRITICAL = 0.19020041652009725


def type_one(F=0.17):
    return ModelParams.from_separation(F=F, **TYPE_I)


def type_two(F=0.3):
    return ModelParams.from_separation(F=F, **TYPE_II)


@pytest.fixture
def params():
    return type_one(0.17)


@pytest.fixture
def gaussian():
    return GaussianState(center=0.0, sigma=0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# criterion number -> (passed, one-line summary), filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, line = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'}  {line}")
