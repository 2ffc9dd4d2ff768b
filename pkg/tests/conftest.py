import pytest

from twolane import bank as bank_mod


@pytest.fixture(scope="session")
def starter_bank():
    return bank_mod.starter_bank()
