import pytest

from slfd import validate


@pytest.fixture(scope="session")
def vctx():
    """Shared validation context: canonical problems and runs are solved once
    and reused by every acceptance criterion."""
    return validate.ValidationContext()


@pytest.fixture(scope="session")
def golden():
    return validate.load_golden()
