"""Reference machines used across the test suite and the shipped corpus/.

``matching_ra`` is the sixteen-location one-register automaton equivalent to
the running sentence ("no two a's share a class, every a is followed by a
same-class b"); the self-loops q1/q2 and q7/q8 carry even ranks, the q11/q12
eventuality loop an odd one.  This module fixes one concrete rank/height
assignment; the corpus text files must stay in sync (tested).
"""

from __future__ import annotations

from .ca import CounterAutomaton
from .ra import (
    BLetter, BUp, RegisterAutomaton, TAnd, TBottom, TMove, TOr, TStore, TTest, TTop,
)
from .words import Alphabet, alphabet


def matching_ra() -> RegisterAutomaton:
    q = [f"q{i}" for i in range(17)]  # q[0] unused
    delta = {
        q[1]: TAnd(q[2], q[3]),
        q[2]: TMove(True, True, q[1]),
        q[3]: TTest(BLetter("a"), q[4], q[15]),
        q[4]: TStore(1, q[5]),
        q[5]: TMove(True, False, q[6]),
        q[6]: TAnd(q[7], q[11]),
        q[7]: TAnd(q[8], q[9]),
        q[8]: TMove(True, True, q[7]),
        q[9]: TTest(BLetter("a"), q[10], q[15]),
        q[10]: TTest(BUp(1), q[16], q[15]),
        q[11]: TOr(q[12], q[13]),
        q[12]: TMove(True, False, q[11]),
        q[13]: TTest(BLetter("b"), q[14], q[16]),
        q[14]: TTest(BUp(1), q[15], q[16]),
        q[15]: TTop(),
        q[16]: TBottom(),
    }
    rank = {q[i]: 2 for i in range(1, 11)}
    rank.update({q[11]: 1, q[12]: 1, q[13]: 1, q[14]: 1, q[15]: 0, q[16]: 0})
    height = {q[1]: 3, q[2]: 0, q[3]: 2, q[4]: 1, q[5]: 0, q[6]: 4, q[7]: 3,
              q[8]: 0, q[9]: 2, q[10]: 1, q[11]: 3, q[12]: 0, q[13]: 2,
              q[14]: 1, q[15]: 0, q[16]: 0}
    return RegisterAutomaton(alphabet("a", "b"), tuple(q[1:]), q[1], 1, delta, rank, height)


def ca_fin() -> CounterAutomaton:
    """One-counter machine over finite words: every a is eventually matched
    by a separate later b.  The if-nonzero arcs of the source figure are
    expanded into a decrement followed by a silent increment."""
    trans = [
        ("z", "a", "inc", 1, "n"),
        ("z", "b", "ifz", 1, "z"),
        ("n", "a", "inc", 1, "n"),
        ("n", "b", "dec", 1, "nx"),
        ("nx", None, "inc", 1, "n"),
        ("n", None, "dec", 1, "i"),
        ("i", "b", "ifz", 1, "z"),
        ("i", "b", "dec", 1, "ix"),
        ("ix", None, "inc", 1, "n"),
    ]
    return CounterAutomaton(
        Alphabet(("a", "b")), ("z", "n", "nx", "i", "ix"), "z", 1,
        tuple(trans), frozenset({"z"}),
    )


def ca_inf() -> CounterAutomaton:
    """Two-counter machine over infinite words for the same property,
    accepting by visiting the marked locations infinitely often."""
    trans = [
        # component guarding counter 2
        ("n1", None, "inc", 1, "n1i"),
        ("n1i", "a", "dec", 2, "y1"), ("y1", None, "inc", 2, "n1"),
        ("n1i", "a", "ifz", 2, "n12"),
        ("n1", None, "dec", 1, "n1d"),
        ("n1", None, "dec", 2, "n1d"),
        ("n1d", "b", "dec", 2, "y2"), ("y2", None, "inc", 2, "n1"),
        ("n1d", "b", "ifz", 2, "n12"),
        ("n1", "b", "dec", 2, "y3"), ("y3", None, "inc", 2, "n1"),
        ("n1", "b", "ifz", 2, "n12"),
        ("n12", None, "ifz", 2, "n2"),
        # symmetric component guarding counter 1
        ("n2", None, "inc", 2, "n2i"),
        ("n2i", "a", "dec", 1, "y4"), ("y4", None, "inc", 1, "n2"),
        ("n2i", "a", "ifz", 1, "n21"),
        ("n2", None, "dec", 2, "n2d"),
        ("n2", None, "dec", 1, "n2d"),
        ("n2d", "b", "dec", 1, "y5"), ("y5", None, "inc", 1, "n2"),
        ("n2d", "b", "ifz", 1, "n21"),
        ("n2", "b", "dec", 1, "y6"), ("y6", None, "inc", 1, "n2"),
        ("n2", "b", "ifz", 1, "n21"),
        ("n21", None, "ifz", 1, "n1"),
    ]
    locs = ("n1", "n1i", "n1d", "n12", "y1", "y2", "y3",
            "n2", "n2i", "n2d", "n21", "y4", "y5", "y6")
    return CounterAutomaton(
        Alphabet(("a", "b")), locs, "n1", 2, tuple(trans), frozenset({"n12", "n21"}),
    )


def every_a_matched(word) -> bool:
    """Independent oracle for the running property: an injective map from
    each a to a strictly later b exists (greedy matching)."""
    unmatched = 0
    for c in word:
        if c == "a":
            unmatched += 1
        elif c == "b" and unmatched:
            unmatched -= 1
    return unmatched == 0
