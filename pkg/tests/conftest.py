import pytest

from chainruler import fixtures
from chainruler.lexicon import default_lexicon


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def jill(lexicon):
    return fixtures.jill_item(lexicon)


@pytest.fixture(scope="session")
def lily(lexicon):
    return fixtures.lily_item(lexicon)
