import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from spndiff import resolve_description, zero_key  # noqa: E402


@pytest.fixture(scope="session")
def toy():
    return resolve_description("toy-heys")[1]


@pytest.fixture(scope="session")
def ref():
    return resolve_description("separ-encblock-ref")[1]


@pytest.fixture(scope="session")
def onesbox():
    return resolve_description("separ-encblock-onesbox")[1]


@pytest.fixture(scope="session")
def toy_key(toy):
    return zero_key(toy)


@pytest.fixture(scope="session")
def ref_key(ref):
    return zero_key(ref)


IDENTITY_TEXT = """\
name identity
blockbits 16
rounds 0
round
end
"""


@pytest.fixture(scope="session")
def identity_desc():
    from spndiff import parse_description

    return parse_description(IDENTITY_TEXT)
