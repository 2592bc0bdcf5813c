import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from gradings.graded_matrix import construct_matrix_grading
from gradings.involution import InvolutionParams
from gradings.lie_grading import LieGradingParams, construct_lie

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def build(p):
    """Concrete algebra for any parameter tuple."""
    if isinstance(p, LieGradingParams):
        return construct_lie(p)
    if isinstance(p, InvolutionParams):
        return p.build()
    return construct_matrix_grading(p)


@pytest.fixture
def build_params():
    return build


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.RESULTS[k])
