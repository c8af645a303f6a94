import pytest

from datawords.words import alphabet, make_data_word
from datawords.ltl import parse_ltl

AB = alphabet("a", "b")

# the length-3 word over {a,b}: "aab" with classes {0,2} and {1}
SIGMA_WORD = make_data_word("aab", [{0, 2}, {1}])

# "no two a's share a class, and every a is followed by a same-class b"
PHI_TEXT = "G (a -> store1 X ((G (a -> !up1)) & F (b & up1)))"


@pytest.fixture
def ab():
    return AB


@pytest.fixture
def sigma_word():
    return SIGMA_WORD


@pytest.fixture
def phi():
    return parse_ltl(PHI_TEXT, AB)
