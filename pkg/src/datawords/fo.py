"""Two-variable first-order logic over data words, and the translations
between its formulas and simple one-register temporal sentences.

Variables are integers (x0, x1, ...).  Position arithmetic atoms are
``x = y + k`` with k >= 0; k = 0 doubles as plain equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from . import ltl
from .errors import NotSimpleFragment, NotTwoVariable, ParseError, UnboundVariable, WrongFreeVariable
from .words import DataWord


class FoFormula:
    __slots__ = ()

    def __str__(self) -> str:
        return format_fo(self)


@dataclass(frozen=True)
class FoTop(FoFormula):
    pass


@dataclass(frozen=True)
class FoBottom(FoFormula):
    pass


@dataclass(frozen=True)
class Pred(FoFormula):
    """P_a(x): the letter at position x is a."""

    letter: str
    var: int


@dataclass(frozen=True)
class Same(FoFormula):
    """x ~ y: the positions carry equal data."""

    left: int
    right: int


@dataclass(frozen=True)
class Less(FoFormula):
    left: int
    right: int


@dataclass(frozen=True)
class PlusEq(FoFormula):
    """left = right + offset (offset >= 0)."""

    left: int
    right: int
    offset: int


@dataclass(frozen=True)
class FoNot(FoFormula):
    body: FoFormula


@dataclass(frozen=True)
class FoAnd(FoFormula):
    left: FoFormula
    right: FoFormula


@dataclass(frozen=True)
class FoOr(FoFormula):
    left: FoFormula
    right: FoFormula


@dataclass(frozen=True)
class FoImplies(FoFormula):
    left: FoFormula
    right: FoFormula


@dataclass(frozen=True)
class Exists(FoFormula):
    var: int
    body: FoFormula


@dataclass(frozen=True)
class Forall(FoFormula):
    var: int
    body: FoFormula


FO_TOP = FoTop()
FO_BOT = FoBottom()


def fo_and(parts) -> FoFormula:
    """Right-nested conjunction; the empty conjunction is true."""
    parts = list(parts)
    if not parts:
        return FO_TOP
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = FoAnd(p, out)
    return out


def fo_or(parts) -> FoFormula:
    parts = list(parts)
    if not parts:
        return FO_BOT
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = FoOr(p, out)
    return out


def free_vars(phi: FoFormula) -> frozenset[int]:
    t = type(phi)
    if t in (FoTop, FoBottom):
        return frozenset()
    if t is Pred:
        return frozenset([phi.var])
    if t in (Same, Less):
        return frozenset([phi.left, phi.right])
    if t is PlusEq:
        return frozenset([phi.left, phi.right])
    if t is FoNot:
        return free_vars(phi.body)
    if t in (FoAnd, FoOr, FoImplies):
        return free_vars(phi.left) | free_vars(phi.right)
    if t in (Exists, Forall):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(phi)


def all_vars(phi: FoFormula) -> frozenset[int]:
    t = type(phi)
    if t in (FoTop, FoBottom):
        return frozenset()
    if t is Pred:
        return frozenset([phi.var])
    if t in (Same, Less, PlusEq):
        return frozenset([phi.left, phi.right])
    if t is FoNot:
        return all_vars(phi.body)
    if t in (FoAnd, FoOr, FoImplies):
        return all_vars(phi.left) | all_vars(phi.right)
    if t in (Exists, Forall):
        return all_vars(phi.body) | {phi.var}
    raise TypeError(phi)


def max_offset(phi: FoFormula) -> int:
    t = type(phi)
    if t is PlusEq:
        return phi.offset
    if t is FoNot:
        return max_offset(phi.body)
    if t in (FoAnd, FoOr, FoImplies):
        return max(max_offset(phi.left), max_offset(phi.right))
    if t in (Exists, Forall):
        return max_offset(phi.body)
    return 0


def is_two_variable(phi: FoFormula) -> bool:
    return all_vars(phi) <= {0, 1}


def eval_fo(w: DataWord, asg: dict[int, int], phi: FoFormula) -> bool:
    """Tarskian satisfaction; assignments map variables to positions."""
    missing = free_vars(phi) - set(asg)
    if missing:
        raise UnboundVariable(f"unassigned variables {sorted(missing)}")
    for i in asg.values():
        w.check_position(i)
    return _ev(w, dict(asg), phi)


def _ev(w: DataWord, asg: dict[int, int], phi: FoFormula) -> bool:
    t = type(phi)
    if t is FoTop:
        return True
    if t is FoBottom:
        return False
    if t is Pred:
        return w.letters[asg[phi.var]] == phi.letter
    if t is Same:
        return w.class_of[asg[phi.left]] == w.class_of[asg[phi.right]]
    if t is Less:
        return asg[phi.left] < asg[phi.right]
    if t is PlusEq:
        return asg[phi.left] == asg[phi.right] + phi.offset
    if t is FoNot:
        return not _ev(w, asg, phi.body)
    if t is FoAnd:
        return _ev(w, asg, phi.left) and _ev(w, asg, phi.right)
    if t is FoOr:
        return _ev(w, asg, phi.left) or _ev(w, asg, phi.right)
    if t is FoImplies:
        return (not _ev(w, asg, phi.left)) or _ev(w, asg, phi.right)
    if t in (Exists, Forall):
        old = asg.get(phi.var)
        hits = []
        for p in range(len(w)):
            asg[phi.var] = p
            hits.append(_ev(w, asg, phi.body))
            if t is Exists and hits[-1]:
                break
            if t is Forall and not hits[-1]:
                break
        if old is None:
            asg.pop(phi.var, None)
        else:
            asg[phi.var] = old
        return any(hits) if t is Exists else all(hits)
    raise TypeError(phi)


# ---------------------------------------------------------------------------
# The chi positional constraints


def chi(j: int, k: int, m: int) -> FoFormula:
    """Positional relation between x_j and x_{1-j} selected by k.

    |k| <= m pins the distance exactly; k = +-(m+1) says strictly beyond
    the +-m window.  Requires |k| <= m + 1.
    """
    if j not in (0, 1) or abs(k) > m + 1:
        raise ValueError(f"chi out of range: j={j}, k={k}, m={m}")
    other = 1 - j
    if k == 0:
        return PlusEq(other, j, 0)
    if 1 <= k <= m:
        return PlusEq(other, j, k)
    if -m <= k <= -1:
        return PlusEq(j, other, -k)
    if k == m + 1:
        return fo_and([Less(j, other)] +
                      [FoNot(PlusEq(other, j, kk)) for kk in range(1, m + 1)])
    return fo_and([Less(other, j)] +
                  [FoNot(PlusEq(j, other, kk)) for kk in range(1, m + 1)])


def _op_block(k: int, m: int, body: ltl.Formula) -> ltl.Formula:
    """The compound operator for jump k: freeze, k nexts, maybe eventually."""
    if k == 0:
        return ltl.Freeze(1, body)
    if 1 <= k <= m:
        for _ in range(k):
            body = ltl.Next(body)
        return ltl.Freeze(1, body)
    if -m <= k <= -1:
        for _ in range(-k):
            body = ltl.Prev(body)
        return ltl.Freeze(1, body)
    if k == m + 1:
        body = ltl.Future(body)
        for _ in range(m + 1):
            body = ltl.Next(body)
        return ltl.Freeze(1, body)
    if k == -(m + 1):
        body = ltl.Past(body)
        for _ in range(m + 1):
            body = ltl.Prev(body)
        return ltl.Freeze(1, body)
    raise ValueError(k)


# ---------------------------------------------------------------------------
# Simple temporal sentences -> two-variable formulas


def simple_ltl_to_fo2(phi: ltl.Formula, j: int, m: Optional[int] = None) -> FoFormula:
    """Translate a simple one-register sentence to a formula with at most
    x_j free, preserving satisfaction position for position."""
    if j not in (0, 1):
        raise ValueError("j must be 0 or 1")
    if m is None:
        info = ltl.classify(phi)
        if info.is_simple_Om is None:
            raise NotSimpleFragment(f"not simple for any m: {phi}")
        m = info.is_simple_Om
    elif not ltl.is_simple_in(phi, m):
        raise NotSimpleFragment(f"not simple at m={m}: {phi}")
    return _t_fwd(phi, j, m)


def _t_fwd(phi: ltl.Formula, j: int, m: int) -> FoFormula:
    t = type(phi)
    if t is ltl.Atom:
        return Pred(phi.letter, j)
    if t is ltl.NAtom:
        return FoNot(Pred(phi.letter, j))
    if t is ltl.Top:
        return FO_TOP
    if t is ltl.Bottom:
        return FO_BOT
    if t is ltl.Reg:
        return Same(1 - j, j)
    if t is ltl.NReg:
        return FoNot(Same(1 - j, j))
    if t is ltl.Not:
        return FoNot(_t_fwd(phi.body, j, m))
    if t is ltl.And:
        return FoAnd(_t_fwd(phi.left, j, m), _t_fwd(phi.right, j, m))
    if t is ltl.Or:
        return FoOr(_t_fwd(phi.left, j, m), _t_fwd(phi.right, j, m))
    if t is ltl.Implies:
        return FoImplies(_t_fwd(phi.left, j, m), _t_fwd(phi.right, j, m))
    if t is ltl.Freeze:
        k, body = _strip_block(phi)
        return Exists(1 - j, FoAnd(chi(j, k, m), _t_fwd(body, 1 - j, m)))
    raise NotSimpleFragment(f"unexpected node in simple formula: {phi}")


def _strip_block(phi: ltl.Formula) -> tuple[int, ltl.Formula]:
    body = phi.body
    k = 0
    sign = 1
    while isinstance(body, (ltl.Next, ltl.Prev)):
        sign = 1 if isinstance(body, ltl.Next) else -1
        k += 1
        body = body.body
    if isinstance(body, ltl.Future):
        return sign * k, body.body  # k = m + 1 by simplicity
    if isinstance(body, ltl.Past):
        return -k, body.body
    return sign * k, body


# ---------------------------------------------------------------------------
# Two-variable formulas -> simple temporal sentences


def fo2_to_simple_ltl(phi: FoFormula, j: int, m: Optional[int] = None) -> ltl.Formula:
    """Translate a two-variable formula with at most x_j free into an
    equivalent simple one-register sentence.

    The existential case sorts the matrix into two-variable atoms, subformulas
    of the current variable and subformulas of the other variable, evaluates
    the two-variable atoms under each jump hypothesis, and precomputes the
    current-variable parts outside the jump.  Output size is exponential in
    the worst case; translations of shared subformulas are memoized.
    """
    if j not in (0, 1):
        raise ValueError("j must be 0 or 1")
    if not is_two_variable(phi):
        raise NotTwoVariable(f"uses variables beyond x0/x1: {phi}")
    if not free_vars(phi) <= {j}:
        raise WrongFreeVariable(f"free variables {sorted(free_vars(phi))}, expected <= {{x{j}}}")
    if m is None:
        m = max_offset(phi)
    memo: dict[tuple[FoFormula, int], ltl.Formula] = {}
    return _t_back(phi, j, m, memo)


def _swap(phi: FoFormula) -> FoFormula:
    """Exchange x0 and x1 everywhere (bound and free)."""
    t = type(phi)
    if t in (FoTop, FoBottom):
        return phi
    if t is Pred:
        return Pred(phi.letter, 1 - phi.var)
    if t is Same:
        return Same(1 - phi.left, 1 - phi.right)
    if t is Less:
        return Less(1 - phi.left, 1 - phi.right)
    if t is PlusEq:
        return PlusEq(1 - phi.left, 1 - phi.right, phi.offset)
    if t is FoNot:
        return FoNot(_swap(phi.body))
    if t in (FoAnd, FoOr, FoImplies):
        return t(_swap(phi.left), _swap(phi.right))
    if t in (Exists, Forall):
        return t(1 - phi.var, _swap(phi.body))
    raise TypeError(phi)


def _and2(a: ltl.Formula, b: ltl.Formula) -> ltl.Formula:
    if isinstance(a, ltl.Top):
        return b
    if isinstance(b, ltl.Top):
        return a
    if isinstance(a, ltl.Bottom) or isinstance(b, ltl.Bottom):
        return ltl.BOT
    return ltl.And(a, b)


def _or2(a: ltl.Formula, b: ltl.Formula) -> ltl.Formula:
    if isinstance(a, ltl.Bottom):
        return b
    if isinstance(b, ltl.Bottom):
        return a
    if isinstance(a, ltl.Top) or isinstance(b, ltl.Top):
        return ltl.TOP
    return ltl.Or(a, b)


def _not2(a: ltl.Formula) -> ltl.Formula:
    if isinstance(a, ltl.Top):
        return ltl.BOT
    if isinstance(a, ltl.Bottom):
        return ltl.TOP
    return ltl.Not(a)


def _big_and(parts) -> ltl.Formula:
    out = ltl.TOP
    for p in reversed(list(parts)):
        out = _and2(p, out)
    return out


def _big_or(parts) -> ltl.Formula:
    out = ltl.BOT
    for p in reversed(list(parts)):
        out = _or2(p, out)
    return out


def _t_back(phi: FoFormula, j: int, m: int, memo) -> ltl.Formula:
    key = (phi, j)
    hit = memo.get(key)
    if hit is not None:
        return hit
    out = _t_back_raw(phi, j, m, memo)
    memo[key] = out
    return out


def _t_back_raw(phi: FoFormula, j: int, m: int, memo) -> ltl.Formula:
    t = type(phi)
    if t is FoTop:
        return ltl.TOP
    if t is FoBottom:
        return ltl.BOT
    if t is Pred:
        return ltl.Atom(phi.letter)
    if t is Same:
        return ltl.TOP  # both occurrences are x_j
    if t is Less:
        return ltl.BOT
    if t is PlusEq:
        return ltl.TOP if phi.offset == 0 else ltl.BOT
    if t is FoNot:
        return _not2(_t_back(phi.body, j, m, memo))
    if t is FoAnd:
        return _and2(_t_back(phi.left, j, m, memo), _t_back(phi.right, j, m, memo))
    if t is FoOr:
        return _or2(_t_back(phi.left, j, m, memo), _t_back(phi.right, j, m, memo))
    if t is FoImplies:
        return _or2(_not2(_t_back(phi.left, j, m, memo)), _t_back(phi.right, j, m, memo))
    if t is Forall:
        return _not2(_t_back(Exists(phi.var, FoNot(phi.body)), j, m, memo))
    if t is Exists:
        if phi.var == j:
            # rebinding the free variable: rename the quantifier by swapping
            return _t_back(Exists(1 - j, _swap(phi.body)), j, m, memo)
        return _t_exists(phi.body, j, m, memo)
    raise TypeError(phi)


def _t_exists(body: FoFormula, j: int, m: int, memo) -> ltl.Formula:
    alphas: list[FoFormula] = []
    xis: list[FoFormula] = []
    zetas: list[FoFormula] = []

    def leaf(kind: str, f: FoFormula) -> tuple[str, int]:
        lst = {"a": alphas, "x": xis, "z": zetas}[kind]
        for idx, g in enumerate(lst):
            if g == f:
                return kind, idx
        lst.append(f)
        return kind, len(lst) - 1

    def skeleton(f: FoFormula):
        fv = free_vars(f)
        if type(f) in (Same, Less, PlusEq) and len(fv) == 2:
            return leaf("a", f)
        if fv <= {j}:
            return leaf("x", f)
        if fv <= {1 - j}:
            return leaf("z", f)
        t = type(f)
        if t is FoNot:
            return ("not", skeleton(f.body))
        if t in (FoAnd, FoOr, FoImplies):
            return (t.__name__, skeleton(f.left), skeleton(f.right))
        raise NotTwoVariable(f"cannot sort subformula {f}")

    beta = skeleton(body)

    def instantiate(node, alpha_vals, xi_vals, zeta_vals) -> ltl.Formula:
        if isinstance(node, tuple) and node[0] in ("a", "x", "z"):
            kind, idx = node
            if kind == "a":
                return alpha_vals[idx]
            if kind == "x":
                return xi_vals[idx]
            return zeta_vals[idx]
        if node[0] == "not":
            return _not2(instantiate(node[1], alpha_vals, xi_vals, zeta_vals))
        op = node[0]
        a = instantiate(node[1], alpha_vals, xi_vals, zeta_vals)
        b = instantiate(node[2], alpha_vals, xi_vals, zeta_vals)
        if op == "FoAnd":
            return _and2(a, b)
        if op == "FoOr":
            return _or2(a, b)
        return _or2(_not2(a), b)

    xi_tr = [_t_back(x, j, m, memo) for x in xis]
    zeta_tr = [_t_back(z, 1 - j, m, memo) for z in zetas]

    disjuncts: list[ltl.Formula] = []
    n_xi = len(xis)
    for k in range(-(m + 1), m + 2):
        for b in (True, False):
            alpha_vals = [_alpha_value(a, j, k, m, b) for a in alphas]
            for mask in range(1 << n_xi):
                xi_vals = [ltl.TOP if mask >> i & 1 else ltl.BOT for i in range(n_xi)]
                guard = _big_and(
                    xi_tr[i] if mask >> i & 1 else _not2(xi_tr[i])
                    for i in range(n_xi)
                )
                if isinstance(guard, ltl.Bottom):
                    continue
                reg = ltl.Reg(1) if b else ltl.NReg(1)
                inner = _and2(reg, instantiate(beta, alpha_vals, xi_vals, zeta_tr))
                if isinstance(inner, ltl.Bottom):
                    continue
                disjuncts.append(_and2(guard, _op_block(k, m, inner)))
    return _big_or(disjuncts)


def _alpha_value(atom: FoFormula, j: int, k: int, m: int, b: bool) -> ltl.Formula:
    """Truth value of a two-variable atom under the jump hypothesis.

    d is the position of x_{1-j} minus the position of x_j: exactly k when
    |k| <= m, and beyond the window otherwise.
    """
    if isinstance(atom, Same):
        return ltl.TOP if b else ltl.BOT
    exact = abs(k) <= m
    if isinstance(atom, Less):
        # atom: left < right
        want_d_positive = atom.right == 1 - j
        if exact:
            val = k > 0 if want_d_positive else k < 0
        else:
            val = (k > 0) == want_d_positive
        return ltl.TOP if val else ltl.BOT
    assert isinstance(atom, PlusEq)
    # atom: left = right + offset, i.e. d = offset or d = -offset
    target = atom.offset if atom.left == 1 - j else -atom.offset
    if exact:
        val = k == target
    else:
        val = False  # |d| > m >= |offset|
    return ltl.TOP if val else ltl.BOT


# ---------------------------------------------------------------------------
# Parsing and printing

_FO_TOKEN = re.compile(r"\s*(->|[()&|!~<]|=|\+|\d+|[A-Za-z_][A-Za-z0-9_.]*)")


def _fo_tokens(text: str) -> list[tuple[str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _FO_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        out.append((m.group(1), m.start(1)))
        pos = m.end()
    return out


class _FoParser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.k = 0

    def peek(self, ahead=0):
        idx = self.k + ahead
        return self.tokens[idx][0] if idx < len(self.tokens) else None

    def pos(self):
        return self.tokens[self.k][1] if self.k < len(self.tokens) else -1

    def take(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.k += 1
        return tok

    def expect(self, tok):
        if self.peek() != tok:
            raise ParseError(f"expected {tok!r}, found {self.peek()!r}", self.pos())
        self.k += 1

    def var(self) -> int:
        tok = self.take()
        m = re.fullmatch(r"x(\d+)", tok)
        if not m:
            raise ParseError(f"expected a variable, found {tok!r}", self.pos())
        return int(m.group(1))

    def parse(self):
        f = self.implies()
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()!r}", self.pos())
        return f

    def implies(self):
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return FoImplies(left, self.implies())
        return left

    def disj(self):
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = FoOr(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = FoAnd(f, self.unary())
        return f

    def unary(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return FoNot(self.unary())
        if tok in ("exists", "forall"):
            self.take()
            v = self.var()
            body = self.unary()
            return (Exists if tok == "exists" else Forall)(v, body)
        return self.atom()

    def atom(self):
        tok = self.peek()
        if tok == "(":
            self.take()
            f = self.implies()
            self.expect(")")
            return f
        if tok == "true":
            self.take()
            return FO_TOP
        if tok == "false":
            self.take()
            return FO_BOT
        if tok is not None and tok.startswith("P") and len(tok) > 1:
            letter = self.take()[1:]
            self.expect("(")
            v = self.var()
            self.expect(")")
            return Pred(letter, v)
        if tok is not None and re.fullmatch(r"x\d+", tok):
            a = self.var()
            op = self.take()
            if op == "~":
                return Same(a, self.var())
            if op == "<":
                return Less(a, self.var())
            if op == "=":
                b = self.var()
                if self.peek() == "+":
                    self.take()
                    off = self.take()
                    if not off.isdigit():
                        raise ParseError(f"expected a number after '+', found {off!r}", self.pos())
                    return PlusEq(a, b, int(off))
                return PlusEq(a, b, 0)
            raise ParseError(f"unexpected operator {op!r}", self.pos())
        raise ParseError(f"unexpected token {tok!r}", self.pos())


def parse_fo(text: str) -> FoFormula:
    return _FoParser(_fo_tokens(text)).parse()


def format_fo(phi: FoFormula) -> str:
    t = type(phi)
    if t is FoTop:
        return "true"
    if t is FoBottom:
        return "false"
    if t is Pred:
        return f"P{phi.letter}(x{phi.var})"
    if t is Same:
        return f"x{phi.left} ~ x{phi.right}"
    if t is Less:
        return f"x{phi.left} < x{phi.right}"
    if t is PlusEq:
        if phi.offset == 0:
            return f"x{phi.left} = x{phi.right}"
        return f"x{phi.left} = x{phi.right} + {phi.offset}"
    if t is FoNot:
        return f"!({format_fo(phi.body)})"
    if t is FoAnd:
        return f"({format_fo(phi.left)} & {format_fo(phi.right)})"
    if t is FoOr:
        return f"({format_fo(phi.left)} | {format_fo(phi.right)})"
    if t is FoImplies:
        return f"({format_fo(phi.left)} -> {format_fo(phi.right)})"
    if t is Exists:
        return f"exists x{phi.var} ({format_fo(phi.body)})"
    if t is Forall:
        return f"forall x{phi.var} ({format_fo(phi.body)})"
    raise TypeError(phi)
