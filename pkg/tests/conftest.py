import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from paulimag.catalog import ShellConfig, load_catalog

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def d7():
    return load_catalog(ShellConfig.d(7))


@pytest.fixture(scope="session")
def d8():
    return load_catalog(ShellConfig.d(8))


@pytest.fixture(scope="session")
def d7_low():
    return load_catalog(ShellConfig.d(7, "low"))


def F(text):
    return Fraction(text)
