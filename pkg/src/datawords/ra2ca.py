"""Compiling one-register alternating automata into incrementing counter
automata that accept exactly the letter projections of their languages.

A set of automaton states at one word position is abstracted to the letter,
an at-the-end flag, the locations whose register holds the current class,
the locations with an undefined register, and a bag counting, for every
location set, how many other classes are held by exactly that set.  One
abstraction step ("big step") follows a strategy of the automaton until it
moves to the next position; the table of per-location successor pairs is
computed by recursion over heights.

The counter machine stores the bag in counters indexed by location sets and
realizes a big step by a silent subroutine: drain each bag counter choosing
successor pairs into auxiliary pair counters, choose successors for the
current-class and empty rows, collect everything that stored the current
class into one refreshed group, then refill the bag from the auxiliaries.
Spurious increments only ever add superfluous obligations, which embeds the
faulty run into a larger legitimate one, so the language is unchanged.

The infinitary variant tags location sets with pending-obligation marks in
the style of breakpoint constructions: a step may be declared fresh, which
requires no mark to survive at equal rank and restarts the marks on all
odd-rank successors; accepting locations record fresh steps, and words whose
obligations die out entirely are absorbed by an accepting sink.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .ca import CounterAutomaton
from .errors import CapExceeded, ClassMismatch
from .ra import (
    BBeg, BEnd, BLetter, BUp, RegisterAutomaton, TAnd, TBottom, TMove, TOr,
    TStore, TTest, TTop, classify_ra, validate,
)

def _skey(x):
    return repr(x)


class SuccTable:
    """Per-location big-step successor pairs (kept set, refreshed set),
    computed by recursion over heights and memoized."""

    def __init__(self, a: RegisterAutomaton):
        self.a = a
        self.memo: dict = {}

    def get(self, letter: str, at_end: bool, uu: bool, q) -> frozenset:
        key = (letter, at_end, uu, q)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        tf = self.a.delta[q]
        t = type(tf)
        if t is TTest:
            g = tf.guard
            if isinstance(g, BLetter):
                val = g.letter == letter
            elif isinstance(g, BEnd):
                val = at_end
            elif isinstance(g, BUp):
                val = uu
            else:
                raise ClassMismatch("beginning test in a one-way automaton")
            out = self.get(letter, at_end, uu, tf.then if val else tf.other)
        elif t is TStore:
            out = self.get(letter, at_end, True, tf.target)
        elif t is TAnd:
            left = self.get(letter, at_end, uu, tf.left)
            right = self.get(letter, at_end, uu, tf.right)
            out = frozenset((y1 | y2, z1 | z2) for (y1, z1) in left for (y2, z2) in right)
        elif t is TOr:
            out = self.get(letter, at_end, uu, tf.left) | self.get(letter, at_end, uu, tf.right)
        elif t is TTop:
            out = frozenset({(frozenset(), frozenset())})
        elif t is TBottom:
            out = frozenset()
        else:
            if not tf.forward:
                raise ClassMismatch("backward move in a one-way automaton")
            if at_end:
                out = frozenset({(frozenset(), frozenset())}) if tf.weak else frozenset()
            elif uu:
                out = frozenset({(frozenset(), frozenset({tf.target}))})
            else:
                out = frozenset({(frozenset({tf.target}), frozenset())})
        self.memo[key] = out
        return out


def succ_table(a: RegisterAutomaton, letter: str, at_end: bool, uu: bool, q) -> frozenset:
    """The set of (kept, refreshed) location-set pairs for one location."""
    _require_1ara1(a)
    out = SuccTable(a).get(letter, at_end, uu, q)
    if uu:
        assert all(not y for (y, _z) in out), "kept side must be empty when uu holds"
    return out


def _require_1ara1(a: RegisterAutomaton) -> None:
    c = classify_ra(a)
    if not c.one_way:
        raise ClassMismatch("expected a one-way automaton")
    if a.n_registers > 1:
        raise ClassMismatch("expected at most one register")


# ---------------------------------------------------------------------------
# Abstract sets and the big-step relation (reference implementations used by
# tests and oracles; the counter machine encodes the unbounded version)


@dataclass(frozen=True)
class AbstractSet:
    letter: str
    at_end: bool
    q_eq: frozenset      # locations whose register holds the current class
    q_empty: frozenset   # locations with an undefined register
    counts: tuple        # sorted ((location set, multiplicity), ...), all > 0

    def __post_init__(self):
        assert self.q_eq or self.q_empty or self.counts, "the empty set is spelled None"

    def count_map(self) -> dict:
        return dict(self.counts)


def make_counts(mapping: dict) -> tuple:
    return tuple(sorted(((g, c) for g, c in mapping.items() if c > 0),
                        key=lambda t: _skey(t[0])))


def _fold_choices(succ: SuccTable, letter: str, at_end: bool, uu: bool, items) -> set:
    """All (kept union, refreshed union) values over per-location choices."""
    acc = {(frozenset(), frozenset())}
    for q in sorted(items, key=_skey):
        choices = succ.get(letter, at_end, uu, q)
        if not choices:
            return set()
        acc = {(u1 | y, u2 | z) for (u1, u2) in acc for (y, z) in choices}
    return acc


def _combos(a: RegisterAutomaton, h: AbstractSet):
    """All map combinations: yields (refreshed-union, next empty row, bag)."""
    succ = SuccTable(a)
    eqs = _fold_choices(succ, h.letter, h.at_end, True, h.q_eq)
    emps = _fold_choices(succ, h.letter, h.at_end, False, h.q_empty)
    unit_folds = []
    for g, c in h.counts:
        s = _fold_choices(succ, h.letter, h.at_end, False, g)
        unit_folds.extend([sorted(s, key=_skey)] * c)
    for eq in sorted(eqs, key=_skey):
        for emp in sorted(emps, key=_skey):
            for units in itertools.product(*unit_folds):
                u2_all = eq[1] | emp[1]
                bag: Counter = Counter()
                for (uy, uz) in units:
                    u2_all = u2_all | uz
                    if uy:
                        bag[uy] += 1
                if u2_all:
                    bag[u2_all] += 1
                yield emp[0], bag


def big_step(a: RegisterAutomaton, h: AbstractSet, h2: Optional[AbstractSet]) -> bool:
    """Whether h can step to h2 (None meaning all obligations discharged)."""
    _require_1ara1(a)
    for q_empty2, bag in _combos(a, h):
        if h2 is None:
            if not q_empty2 and not bag:
                return True
            continue
        if h2.q_empty != q_empty2:
            continue
        want = Counter(dict(h2.counts))
        if h2.q_eq:
            want[h2.q_eq] += 1
        if bag == want:
            return True
    return False


def big_step_successors(a: RegisterAutomaton, h: AbstractSet, cap: int,
                        letters: Optional[tuple] = None) -> list:
    """All successors with bag values within cap (None stands for the
    discharged end).  Only suitable for small instances."""
    _require_1ara1(a)
    if any(c > cap for _g, c in h.counts):
        raise CapExceeded(f"input bag exceeds cap {cap}")
    letters = letters or a.alphabet.letters
    out = set()
    saw_none = False
    for q_empty2, bag in _combos(a, h):
        if not q_empty2 and not bag:
            saw_none = True
        if any(c > cap for c in bag.values()):
            continue
        for letter in letters:
            for at_end in (False, True):
                counts = make_counts(bag)
                if q_empty2 or counts:
                    out.add(AbstractSet(letter, at_end, frozenset(), q_empty2, counts))
                for g in bag:
                    rest = Counter(bag)
                    rest[g] -= 1
                    out.add(AbstractSet(letter, at_end, g, q_empty2, make_counts(rest)))
    result = sorted(out, key=_skey)
    return ([None] if saw_none else []) + result


def embeds(h: Optional[AbstractSet], h2: Optional[AbstractSet]) -> bool:
    """The subsumption order: componentwise containment plus an injective,
    containment-respecting map between the bag units.  The discharged set
    embeds into everything."""
    if h is None:
        return True
    if h2 is None:
        return False
    if (h.letter, h.at_end) != (h2.letter, h2.at_end):
        return False
    if not (h.q_eq <= h2.q_eq and h.q_empty <= h2.q_empty):
        return False
    units = [g for g, c in h.counts for _ in range(c)]
    slots = [g for g, c in h2.counts for _ in range(c)]

    def match(k: int, used: int) -> bool:
        if k == len(units):
            return True
        for j, s in enumerate(slots):
            if not used >> j & 1 and units[k] <= s:
                if match(k + 1, used | 1 << j):
                    return True
        return False

    return match(0, 0)


# ---------------------------------------------------------------------------
# The counter machine


def _compact(a: RegisterAutomaton) -> RegisterAutomaton:
    """Rename locations to small integers: program points embed location
    sets, and hashing deep formula keys over and over dominates the build."""
    ix = {q: k for k, q in enumerate(a.locations)}

    def retarget(tf):
        t = type(tf)
        if t is TTest:
            return TTest(tf.guard, ix[tf.then], ix[tf.other])
        if t is TStore:
            return TStore(tf.register, ix[tf.target])
        if t is TAnd:
            return TAnd(ix[tf.left], ix[tf.right])
        if t is TOr:
            return TOr(ix[tf.left], ix[tf.right])
        if t is TMove:
            return TMove(tf.forward, tf.weak, ix[tf.target])
        return tf

    return RegisterAutomaton(
        a.alphabet, tuple(range(len(a.locations))), ix[a.initial], a.n_registers,
        {ix[q]: retarget(tf) for q, tf in a.delta.items()},
        {ix[q]: r for q, r in a.rank.items()},
        {ix[q]: h for q, h in a.height.items()},
    )


class _Builder:
    def __init__(self, a: RegisterAutomaton, infinite: bool):
        _require_1ara1(a)
        errs = validate(a)
        if errs:
            raise ClassMismatch(f"invalid automaton: {errs[0]}")
        a = _compact(a)
        self.a = a
        self.infinite = infinite
        self.succ = SuccTable(a)
        self.letters = a.alphabet.letters
        self.modes = ("stay", "fresh") if infinite else (None,)
        self.groups: list = []
        self.gset: set = set()
        self.pairs: list = []
        self.pset: set = set()
        self.fold_cache: dict = {}
        self.stats = {"succ_entries": 0}

    # --- item plumbing (items are locations, or (location, marked) pairs)

    def init_items(self) -> frozenset:
        if self.infinite:
            return frozenset({(self.a.initial, self.a.rank[self.a.initial] % 2 == 1)})
        return frozenset({self.a.initial})

    def norm(self, items) -> frozenset:
        if not self.infinite:
            return frozenset(items)
        best: dict = {}
        for q, t in items:
            best[q] = best.get(q, False) or t
        return frozenset(best.items())

    def item_choices(self, letter: str, uu: bool, item, mode) -> list:
        """(kept items, refreshed items, mark survived) per choice; choices
        that would keep a mark alive are dropped in fresh mode."""
        q = item[0] if self.infinite else item
        tag = item[1] if self.infinite else False
        out = []
        for (y, z) in sorted(self.succ.get(letter, False, uu, q), key=_pair_key):
            if not self.infinite:
                out.append((frozenset(y), frozenset(z), False))
                continue
            blocked = False
            nat = False

            def convert(qs):
                nonlocal blocked, nat
                items2 = []
                for q2 in qs:
                    same_rank = tag and self.a.rank[q2] == self.a.rank[q]
                    if mode == "fresh":
                        if same_rank:
                            blocked = True
                        items2.append((q2, self.a.rank[q2] % 2 == 1))
                    else:
                        if same_rank:
                            nat = True
                        items2.append((q2, same_rank))
                return self.norm(items2)

            y2, z2 = convert(y), convert(z)
            if not blocked:
                out.append((y2, z2, nat))
        return out

    def fold(self, letter: str, uu: bool, items: frozenset, mode) -> list:
        """All (kept union, refreshed union, mark survived) triples."""
        key = (letter, uu, items, mode)
        hit = self.fold_cache.get(key)
        if hit is not None:
            return hit
        acc = {(frozenset(), frozenset(), False)}
        for item in sorted(items, key=_skey):
            per = self.item_choices(letter, uu, item, mode)
            if not per:
                acc = set()
                break
            acc = {(self.norm(u1 | y), self.norm(u2 | z), n1 or n2)
                   for (u1, u2, n1) in acc for (y, z, n2) in per}
        out = sorted(acc, key=_skey)
        self.fold_cache[key] = out
        return out

    def add_group(self, g: frozenset) -> bool:
        if g and g not in self.gset:
            self.gset.add(g)
            self.groups.append(g)
            return True
        return False

    def add_pair(self, p: tuple) -> bool:
        if p not in self.pset:
            self.pset.add(p)
            self.pairs.append(p)
            return True
        return False

    # --- phase A: discover reachable mains, groups and pairs

    def discover(self):
        init_ready = (frozenset(), self.init_items(), False)
        readys = {init_ready}
        mains: set = set()
        changed = True
        while changed:
            changed = False
            for (qeq, qemp, _fl) in sorted(readys, key=_skey):
                for letter in self.letters:
                    core = (letter, qeq, qemp)
                    if core not in mains:
                        mains.add(core)
                        changed = True
            for core in sorted(mains, key=_skey):
                letter, qeq, qemp = core
                for mode in self.modes:
                    eqf = self.fold(letter, True, qeq, mode)
                    empf = self.fold(letter, False, qemp, mode)
                    for g in list(self.groups):
                        for (u1, u2, _n) in self.fold(letter, False, g, mode):
                            changed |= self.add_pair((u1, u2))
                    qddags = {self.norm(e2 | m2)
                              for (_e1, e2, _n1) in eqf for (_m1, m2, _n2) in empf}
                    for (pu1, pu2) in list(self.pairs):
                        qddags |= {self.norm(v | pu2) for v in qddags}
                        changed |= self.add_group(pu1)
                    for v in qddags:
                        changed |= self.add_group(v)
                    emp_values = {m1 for (m1, _m2, _n) in empf}
                    flag = (mode == "fresh") if self.infinite else False
                    for m1 in emp_values:
                        for qeq2 in [frozenset()] + self.groups:
                            r = (qeq2, m1, flag)
                            if r not in readys:
                                readys.add(r)
                                changed = True
        self.readys = readys
        self.mains = mains

    # --- phase B: emit locations and transitions

    def counter_ids(self):
        self.c_zero = 1
        self.c_group = {g: 2 + k for k, g in enumerate(self.groups)}
        base = 2 + len(self.groups)
        self.c_pair = {p: base + k for k, p in enumerate(self.pairs)}
        self.n_counters = 1 + len(self.groups) + len(self.pairs)

    def emit(self) -> CounterAutomaton:
        self.counter_ids()
        trans: set = set()
        locs: set = set()

        def loc(x):
            locs.add(x)
            return x

        def add(src, letter, op, ctr, dst):
            trans.add((loc(src), letter, op, ctr, loc(dst)))

        def noop(src, dst, letter=None):
            add(src, letter, "ifz", self.c_zero, dst)

        sink = ("accept_sink",)
        for letter in self.letters:
            noop(sink, sink, letter)
        accept_end = ("accept_end",)
        accept_more = ("accept_more",)
        if not self.infinite:
            loc(accept_end)
            for letter in self.letters:
                noop(accept_more, sink, letter)

        ok_eq_cache: dict = {}
        ok_emp_cache: dict = {}
        bad_groups_cache: dict = {}

        def discharged(letter, at_end, uu, q) -> bool:
            return (frozenset(), frozenset()) in self.succ.get(letter, at_end, uu, q)

        def items_ok(items, letter, at_end, uu) -> bool:
            qs = [i[0] if self.infinite else i for i in items]
            return all(discharged(letter, at_end, uu, q) for q in qs)

        def bad_groups(letter, at_end):
            key = (letter, at_end)
            if key not in bad_groups_cache:
                bad_groups_cache[key] = [
                    g for g in self.groups
                    if not items_ok(g, letter, at_end, False)
                ]
            return bad_groups_cache[key]

        # ready locations: read the next letter or guess the discharge
        for (qeq, qemp, flag) in sorted(self.readys, key=_skey):
            r = ("ready", qeq, qemp, flag)
            for letter in self.letters:
                noop(r, ("main", letter, qeq, qemp, flag), letter)
            ends = (False,) if self.infinite else (False, True)
            for letter in self.letters:
                for at_end in ends:
                    if not items_ok(qeq, letter, at_end, True):
                        continue
                    if not items_ok(qemp, letter, at_end, False):
                        continue
                    cur = r
                    for k, g in enumerate(bad_groups(letter, at_end)):
                        nxt = ("final", qeq, qemp, flag, letter, at_end, k)
                        add(cur, None, "ifz", self.c_group[g], nxt)
                        cur = nxt
                    if self.infinite:
                        noop(cur, sink, letter)
                    else:
                        noop(cur, accept_end if at_end else accept_more, letter)

        # main locations: run the big-step subroutine
        for core in sorted(self.mains, key=_skey):
            letter, qeq, qemp = core
            for flag in ((False, True) if self.infinite else (False,)):
                m = ("main", letter, qeq, qemp, flag)
                if m not in locs:
                    continue  # unreachable flag variant
                for mode in self.modes:
                    if self.groups:
                        entry = ("drain", core, mode, 0, False)
                    else:
                        entry = ("eqmap", core, mode, 0, frozenset(), False)
                    noop(m, entry)
            for mode in self.modes:
                self.emit_subroutine(core, mode, add, noop)

        order = sorted(locs, key=_skey)
        initial = ("ready", frozenset(), self.init_items(), False)
        assert initial in locs
        if self.infinite:
            accepting = frozenset(
                x for x in locs
                if x == sink or (x[0] == "main" and x[4])
            )
        else:
            accepting = frozenset(x for x in locs if x in (accept_end, sink))
        ca = CounterAutomaton(self.a.alphabet, tuple(order), initial,
                              self.n_counters, tuple(sorted(trans, key=_skey)),
                              accepting)
        self.stats.update({
            "locations": len(order),
            "transitions": len(trans),
            "counters": self.n_counters,
            "groups": len(self.groups),
            "pairs": len(self.pairs),
            "succ_entries": len(self.succ.memo),
        })
        return ca

    def emit_subroutine(self, core, mode, add, noop):
        letter, qeq, qemp = core

        def drain(gi, nat):
            if gi == len(self.groups):
                return ("eqmap", core, mode, 0, frozenset(), nat)
            return ("drain", core, mode, gi, nat)

        for nat in ((False, True) if self.infinite else (False,)):
            for gi, g in enumerate(self.groups):
                d = ("drain", core, mode, gi, nat)
                add(d, None, "ifz", self.c_group[g], drain(gi + 1, nat))
                add(d, None, "dec", self.c_group[g],
                    ("dmap", core, mode, gi, 0, frozenset(), frozenset(), nat))

        # choose a map for one drained unit
        seen_dmap: set = set()
        stack: list = []
        for nat in ((False, True) if self.infinite else (False,)):
            for gi in range(len(self.groups)):
                stack.append((gi, 0, frozenset(), frozenset(), nat))
        while stack:
            gi, k, u1, u2, nat = stack.pop()
            key = (gi, k, u1, u2, nat)
            if key in seen_dmap:
                continue
            seen_dmap.add(key)
            src = ("dmap", core, mode, gi, k, u1, u2, nat)
            items = sorted(self.groups[gi], key=_skey)
            if k == len(items):
                assert (u1, u2) in self.pset, "pair escaped discovery"
                add(src, None, "inc", self.c_pair[(u1, u2)], drain(gi, nat))
                continue
            for (y, z, n2) in self.item_choices(letter, False, items[k], mode):
                nu1, nu2, nn = self.norm(u1 | y), self.norm(u2 | z), nat or n2
                noop(src, ("dmap", core, mode, gi, k + 1, nu1, nu2, nn))
                stack.append((gi, k + 1, nu1, nu2, nn))

        # choose the current-class and empty-row maps
        seen: set = set()
        stack = [("eq", 0, frozenset(), nat)
                 for nat in ((False, True) if self.infinite else (False,))]
        while stack:
            entry = stack.pop()
            if entry in seen:
                continue
            seen.add(entry)
            kind = entry[0]
            if kind == "eq":
                _, k, u2, nat = entry
                src = ("eqmap", core, mode, k, u2, nat)
                items = sorted(qeq, key=_skey)
                if k == len(items):
                    nxt = ("empmap", core, mode, 0, frozenset(), u2, nat)
                    noop(src, nxt)
                    stack.append(("emp", 0, frozenset(), u2, nat))
                    continue
                for (y, z, n2) in self.item_choices(letter, True, items[k], mode):
                    assert not y
                    nu2, nn = self.norm(u2 | z), nat or n2
                    noop(src, ("eqmap", core, mode, k + 1, nu2, nn))
                    stack.append(("eq", k + 1, nu2, nn))
            elif kind == "emp":
                _, k, u1, u2, nat = entry
                src = ("empmap", core, mode, k, u1, u2, nat)
                items = sorted(qemp, key=_skey)
                if k == len(items):
                    nxt = ("pair", core, mode, 0, u2, u1, nat)
                    noop(src, nxt)
                    stack.append(("pair", 0, u2, u1, nat))
                    continue
                for (y, z, n2) in self.item_choices(letter, False, items[k], mode):
                    nu1, nu2, nn = self.norm(u1 | y), self.norm(u2 | z), nat or n2
                    noop(src, ("empmap", core, mode, k + 1, nu1, nu2, nn))
                    stack.append(("emp", k + 1, nu1, nu2, nn))
            elif kind == "pair":
                _, pi, qddag, qemp1, nat = entry
                src = ("pair", core, mode, pi, qddag, qemp1, nat)
                if pi == len(self.pairs):
                    nxt = ("refill", core, mode, 0, qemp1, nat)
                    if qddag:
                        assert qddag in self.gset, "group escaped discovery"
                        add(src, None, "inc", self.c_group[qddag], nxt)
                    else:
                        noop(src, nxt)
                    stack.append(("refill", 0, qemp1, nat))
                    continue
                p = self.pairs[pi]
                add(src, None, "ifz", self.c_pair[p],
                    ("pair", core, mode, pi + 1, qddag, qemp1, nat))
                stack.append(("pair", pi + 1, qddag, qemp1, nat))
                mid = ("bump", core, mode, pi, qddag, qemp1, nat)
                add(src, None, "dec", self.c_pair[p], mid)
                qd2 = self.norm(qddag | p[1])
                add(mid, None, "inc", self.c_pair[p],
                    ("pair", core, mode, pi + 1, qd2, qemp1, nat))
                stack.append(("pair", pi + 1, qd2, qemp1, nat))
            elif kind == "refill":
                _, pi, qemp1, nat = entry
                src = ("refill", core, mode, pi, qemp1, nat)
                if pi == len(self.pairs):
                    if self.infinite and mode == "stay" and not nat:
                        continue  # an unmarked step must be declared fresh
                    flag = (mode == "fresh") if self.infinite else False
                    noop(src, ("ready", frozenset(), qemp1, flag))
                    for g in self.groups:
                        add(src, None, "dec", self.c_group[g],
                            ("ready", g, qemp1, flag))
                    continue
                p = self.pairs[pi]
                add(src, None, "ifz", self.c_pair[p],
                    ("refill", core, mode, pi + 1, qemp1, nat))
                stack.append(("refill", pi + 1, qemp1, nat))
                mid = ("refillmid", core, mode, pi, qemp1, nat)
                add(src, None, "dec", self.c_pair[p], mid)
                if p[0]:
                    add(mid, None, "inc", self.c_group[p[0]],
                        ("refill", core, mode, pi, qemp1, nat))
                else:
                    noop(mid, ("refill", core, mode, pi, qemp1, nat))


def _pair_key(p):
    return (_skey(p[0]), _skey(p[1]))


def build_ca_finite(a: RegisterAutomaton) -> CounterAutomaton:
    """An incrementing machine accepting exactly the letter projections of
    the finite data words the automaton accepts."""
    return _build(a, infinite=False)[0]


def build_ca_infinite(a: RegisterAutomaton) -> CounterAutomaton:
    """The infinitary variant, accepting by visiting marked locations
    infinitely often."""
    return _build(a, infinite=True)[0]


def build_ca_finite_with_stats(a: RegisterAutomaton):
    return _build(a, infinite=False)


def build_ca_infinite_with_stats(a: RegisterAutomaton):
    return _build(a, infinite=True)


def _build(a: RegisterAutomaton, infinite: bool):
    b = _Builder(a, infinite)
    b.discover()
    ca = b.emit()
    return ca, dict(b.stats)
