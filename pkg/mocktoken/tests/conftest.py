import pytest

import mocktoken
from mocktoken.scenario import parse_scenario


@pytest.fixture
def token_for():
    """Activate an inline scenario and return its token; reset afterwards."""
    def make(text: str) -> mocktoken.Token:
        return mocktoken.activate(parse_scenario(text))
    yield make
    mocktoken.deactivate()
