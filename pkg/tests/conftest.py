import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from odgrammar import parse, reference_lexicon


@pytest.fixture(scope="session")
def lex():
    return reference_lexicon()


@pytest.fixture(scope="session")
def key_structure(lex):
    """The unique analysis of the object-fronted sentence."""
    from corpus import KEY_SENTENCE

    result = parse(KEY_SENTENCE.split(), lex)
    assert len(result.structures) == 1
    return result.structures[0]
