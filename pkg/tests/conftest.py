import pytest

from hornpoc.library import get_entry


@pytest.fixture(scope="session")
def running_example():
    return get_entry("running_example").load()
