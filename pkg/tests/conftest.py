import pytest

from cohomkit.groups import (cyclic, klein_four, quaternion_8, symmetric_3)


@pytest.fixture(scope="session")
def groups():
    """Shared group instances so factorization caches persist across tests."""
    return {
        "c2": cyclic(2),
        "c3": cyclic(3),
        "c4": cyclic(4),
        "c6": cyclic(6),
        "c8": cyclic(8),
        "klein4": klein_four(),
        "s3": symmetric_3(),
        "q8": quaternion_8(),
    }


def pytest_configure(config):
    config.addinivalue_line("markers",
                            "slow: long-running property checks")
