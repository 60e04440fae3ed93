"""A small expression language for index-dependent generators.

Scalar expressions in the index ``k``::

    1/k^2        (-1)^k        floor(sqrt(k))/k        2 - 1/k

Fuzzy expressions build on them::

    crisp(1/k)
    tri(-k^2, 0, k^2) * tri(-k, 0, k)
    select(k odd, tri(-1/k, 0, 1/k), crisp(0))
    select(k is_square, crisp(1), crisp(0))

Moduli have their own grammar, see :func:`parse_modulus`::

    id    rat    pow 0.5    id + rat    pow 0.5 . rat    (id + rat)^2

Grammar (precedence low to high)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?           # right associative, binds tighter than unary minus
    atom    := NUMBER | NAME | "(" expr ")" | call
    call    := ("sqrt" | "floor" | "abs" | "crisp") "(" expr ")"
             | "tri" "(" expr "," expr "," expr ")"
             | "select" "(" expr PRED "," expr "," expr ")"
    PRED    := "even" | "odd" | "is_square"

``(-1)^e`` is recognised as an alternation node. Evaluation comes in two
modes: vectorised binary floating point over an array of indices
(:func:`eval_array`) and exact rational arithmetic at a single index
(:func:`eval_exact`), falling back to 50-digit ``mpmath`` numbers only where a
value is irrational.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import mpmath
import numpy as np

from . import modulus as mod
from .fuzzy import FuzzyArray

SCALAR, FUZZY = "scalar", "fuzzy"
PREDICATES = ("even", "odd", "is_square")
FUNCTIONS = ("sqrt", "floor", "abs")
RESERVED = set(PREDICATES) | set(FUNCTIONS) | {"select", "crisp", "tri"}


class DslSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int, expected=()):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line, self.column, self.expected = line, col, tuple(expected)
        exp = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at line {line}, column {col}{exp}")


class DslEvalError(ValueError):
    def __init__(self, message: str, k=None):
        self.k = k
        super().__init__(message if k is None else f"{message} at k={k}")


# -- AST ---------------------------------------------------------------------

class Node:
    kind = SCALAR
    prec = 5

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Num(Node):
    value: Fraction


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class Neg(Node):
    arg: Node
    prec = 3

    @property
    def kind(self):
        return self.arg.kind


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    @property
    def prec(self):
        return 1 if self.op in "+-" else 2

    @property
    def kind(self):
        return FUZZY if FUZZY in (self.left.kind, self.right.kind) else SCALAR


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exp: Node
    prec = 4


@dataclass(frozen=True)
class Alternation(Node):
    """``(-1)^exp``; the exponent must evaluate to an integer."""

    exp: Node
    prec = 4


@dataclass(frozen=True)
class Func(Node):
    name: str
    arg: Node


@dataclass(frozen=True)
class Pred(Node):
    test: str
    arg: Node


@dataclass(frozen=True)
class Select(Node):
    pred: Pred
    then: Node
    other: Node

    @property
    def kind(self):
        return self.then.kind


@dataclass(frozen=True)
class Crisp(Node):
    arg: Node
    kind = FUZZY


@dataclass(frozen=True)
class Tri(Node):
    a: Node
    b: Node
    c: Node
    kind = FUZZY


# -- printing ----------------------------------------------------------------

def _num_text(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    # literals come from decimal text, so the denominator is 2^a 5^b
    d, twos, fives = v.denominator, 0, 0
    while d % 2 == 0:
        d, twos = d // 2, twos + 1
    while d % 5 == 0:
        d, fives = d // 5, fives + 1
    if d != 1:
        raise ValueError(f"literal {v} has no finite decimal form")
    digits = max(twos, fives)
    scaled = v.numerator * 10**digits // v.denominator
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def _paren(node: Node, ok: bool) -> str:
    text = to_text(node)
    return text if ok else f"({text})"


def to_text(node: Node) -> str:
    """Canonical text; ``parse(to_text(n)) == n`` for every parsed node."""
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return "-" + _paren(node.arg, node.arg.prec >= 3)
    if isinstance(node, BinOp):
        left = _paren(node.left, node.left.prec >= node.prec)
        right = _paren(node.right, node.right.prec > node.prec)
        return f"{left} {node.op} {right}"
    if isinstance(node, Pow):
        return f"{_paren(node.base, node.base.prec > 4)}^{_paren(node.exp, node.exp.prec >= 3)}"
    if isinstance(node, Alternation):
        return f"(-1)^{_paren(node.exp, node.exp.prec >= 3)}"
    if isinstance(node, Func):
        return f"{node.name}({to_text(node.arg)})"
    if isinstance(node, Pred):
        return f"{to_text(node.arg)} {node.test}"
    if isinstance(node, Select):
        return f"select({to_text(node.pred)}, {to_text(node.then)}, {to_text(node.other)})"
    if isinstance(node, Crisp):
        return f"crisp({to_text(node.arg)})"
    if isinstance(node, Tri):
        return f"tri({to_text(node.a)}, {to_text(node.b)}, {to_text(node.c)})"
    raise TypeError(f"not a DSL node: {node!r}")


# -- lexer -------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),.]))"
)


@dataclass(frozen=True)
class Token:
    type: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens, pos = [], 0
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:]
            if rest.strip() == "":
                tokens.append(Token("eof", "", len(text)))
                return tokens
            bad = pos + len(rest) - len(rest.lstrip())
            raise DslSyntaxError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()


# -- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, params=()):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.names = {"k", *params}

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message, expected=(), tok=None):
        tok = tok or self.tok
        return DslSyntaxError(message, self.text, tok.pos, expected)

    def take(self, text=None, type_=None, expected=()):
        tok = self.tok
        if (text is not None and tok.text != text) or (type_ is not None and tok.type != type_):
            want = expected or ((text,) if text else (type_,))
            found = tok.text or "end of input"
            raise self.error(f"unexpected {found!r}", want)
        self.i += 1
        return tok

    def accept(self, *texts):
        if self.tok.type == "op" and self.tok.text in texts:
            return self.take().text
        return None

    def expect_kind(self, node, kind, tok):
        if node.kind != kind:
            raise self.error(f"expected a {kind} expression, got a {node.kind} one", tok=tok)
        return node

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.type != "eof":
            raise self.error(f"unexpected {self.tok.text!r}", ("operator", "end of input"))
        return node

    def expr(self) -> Node:
        node = self.term()
        while (op := self.accept("+", "-")) is not None:
            tok = self.tok
            right = self.term()
            if node.kind != right.kind:
                raise self.error(f"cannot combine {node.kind} and {right.kind} with {op!r}", tok=tok)
            node = BinOp(op, node, right)
        return node

    def term(self) -> Node:
        node = self.unary()
        while (op := self.accept("*", "/")) is not None:
            tok = self.tok
            right = self.unary()
            if op == "/" and right.kind == FUZZY:
                raise self.error("cannot divide by a fuzzy expression", tok=tok)
            node = BinOp(op, node, right)
        return node

    def unary(self) -> Node:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        start = self.tok
        base = self.atom()
        if self.accept("^") is None:
            return base
        tok = self.tok
        exp = self.unary()
        self.expect_kind(base, SCALAR, start)
        self.expect_kind(exp, SCALAR, tok)
        if base == Neg(Num(Fraction(1))):
            # a Neg base can only come from parentheses, so this is (-1)^e
            return Alternation(exp)
        return Pow(base, exp)

    def atom(self) -> Node:
        tok = self.tok
        if tok.type == "num":
            self.take()
            return Num(Fraction(tok.text))
        if tok.type == "name":
            if tok.text in FUNCTIONS:
                self.take()
                self.take("(")
                arg = self.expect_kind(self.expr(), SCALAR, tok)
                self.take(")", expected=(")",))
                return Func(tok.text, arg)
            if tok.text == "crisp":
                self.take()
                self.take("(")
                arg = self.expect_kind(self.expr(), SCALAR, tok)
                self.take(")", expected=(")",))
                return Crisp(arg)
            if tok.text == "tri":
                self.take()
                self.take("(")
                args = [self.expect_kind(self.expr(), SCALAR, tok)]
                for _ in range(2):
                    self.take(",", expected=(",",))
                    args.append(self.expect_kind(self.expr(), SCALAR, tok))
                self.take(")", expected=(")",))
                return Tri(*args)
            if tok.text == "select":
                return self.select()
            if tok.text in RESERVED:
                raise self.error(f"misplaced keyword {tok.text!r}")
            if tok.text not in self.names:
                raise self.error(f"unknown identifier {tok.text!r}", sorted(self.names))
            self.take()
            return Var(tok.text)
        if self.accept("("):
            node = self.expr()
            self.take(")", expected=(")",))
            return node
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}", ("number", "k", "(", "function"))

    def select(self) -> Node:
        head = self.take()
        self.take("(")
        arg = self.expect_kind(self.expr(), SCALAR, head)
        test = self.tok
        if test.type != "name" or test.text not in PREDICATES:
            raise self.error("expected a predicate", PREDICATES)
        self.take()
        self.take(",", expected=(",",))
        then = self.expr()
        self.take(",", expected=(",",))
        tok = self.tok
        other = self.expr()
        if then.kind != other.kind:
            raise self.error("select branches must have the same kind", tok=tok)
        self.take(")", expected=(")",))
        return Select(Pred(test.text, arg), then, other)


def parse(text: str, params=()) -> Node:
    """Parse a scalar or fuzzy generator expression in ``k`` (and ``params``)."""
    return _Parser(text, params).parse()


def parse_scalar(text: str, params=()) -> Node:
    node = parse(text, params)
    if node.kind != SCALAR:
        raise DslSyntaxError("expected a scalar expression", text, 0)
    return node


def parse_fuzzy(text: str, params=()) -> Node:
    node = parse(text, params)
    if node.kind != FUZZY:
        raise DslSyntaxError("expected a fuzzy expression (crisp, tri, select of them)", text, 0)
    return node


# -- float evaluation (vectorised) -------------------------------------------

def _int_valued(x: np.ndarray, ks: np.ndarray, what: str) -> np.ndarray:
    bad = (x != np.floor(x)) | ~np.isfinite(x)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DslEvalError(f"{what} needs an integer value, got {x[i]!r}", int(ks[i]))
    if np.any(np.abs(x) > 2**53):
        i = int(np.argmax(np.abs(x) > 2**53))
        raise DslEvalError(f"{what} argument too large for exact integer arithmetic", int(ks[i]))
    return x.astype(np.int64)


def isqrt_array(n: np.ndarray) -> np.ndarray:
    """Exact integer square roots of non-negative int64 values.

    A floating-point estimate is corrected with integer arithmetic, so the
    result equals ``math.isqrt`` elementwise.
    """
    r = np.floor(np.sqrt(n.astype(float))).astype(np.int64)
    r -= (r * r > n).astype(np.int64)
    r += ((r + 1) * (r + 1) <= n).astype(np.int64)
    return r


def eval_array(node: Node, ks, params: Mapping[str, float] | None = None):
    """Evaluate at every index in ``ks``.

    Returns a float array for scalar expressions and a :class:`FuzzyArray`
    for fuzzy ones.
    """
    ks = np.asarray(ks, dtype=np.int64)
    return _Eval(ks, params or {}).run(node)


class _Eval:
    def __init__(self, ks, params):
        self.ks = ks
        self.params = params

    def fail(self, message, mask):
        i = int(np.argmax(mask))
        raise DslEvalError(message, int(self.ks[i]))

    def run(self, node):
        method = getattr(self, "_" + type(node).__name__)
        return method(node)

    def _Num(self, node):
        return np.full(len(self.ks), float(node.value))

    def _Var(self, node):
        if node.name == "k":
            return self.ks.astype(float)
        if node.name not in self.params:
            raise DslEvalError(f"no value bound for parameter {node.name!r}")
        return np.full(len(self.ks), float(self.params[node.name]))

    def _Neg(self, node):
        x = self.run(node.arg)
        return -x

    def _BinOp(self, node):
        a, b = self.run(node.left), self.run(node.right)
        fa, fb = isinstance(a, FuzzyArray), isinstance(b, FuzzyArray)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a + (-b) if fa else a - b
        if node.op == "*":
            if fa and fb:
                return a * b
            if fa:
                return a.scale(b)
            if fb:
                return b.scale(a)
            return a * b
        if np.any(b == 0):
            self.fail("division by zero", b == 0)
        return a.scale(1.0 / b) if fa else a / b

    def _Pow(self, node):
        base, exp = self.run(node.base), self.run(node.exp)
        bad = ((base < 0) & (exp != np.floor(exp))) | ((base == 0) & (exp < 0))
        if np.any(bad):
            self.fail("power outside its domain", bad)
        with np.errstate(over="ignore"):
            out = np.power(base, exp)
        return out

    def _Alternation(self, node):
        e = _int_valued(self.run(node.exp), self.ks, "(-1)^e")
        return np.where(e % 2 == 0, 1.0, -1.0)

    def _Func(self, node):
        if node.name == "floor" and isinstance(node.arg, Func) and node.arg.name == "sqrt":
            x = self.run(node.arg.arg)
            if np.any(x < 0):
                self.fail("sqrt of a negative number", x < 0)
            if np.all(x == np.floor(x)) and np.all(x <= 2**53):
                return isqrt_array(x.astype(np.int64)).astype(float)
            return np.floor(np.sqrt(x))
        x = self.run(node.arg)
        if node.name == "sqrt":
            if np.any(x < 0):
                self.fail("sqrt of a negative number", x < 0)
            return np.sqrt(x)
        if node.name == "floor":
            return np.floor(x)
        return np.abs(x)

    def _Pred(self, node):
        n = _int_valued(self.run(node.arg), self.ks, node.test)
        if node.test == "even":
            return n % 2 == 0
        if node.test == "odd":
            return n % 2 != 0
        ok = n >= 0
        r = isqrt_array(np.where(ok, n, 0))
        return ok & (r * r == n)

    def _Select(self, node):
        mask = self.run(node.pred)
        a, b = self.run(node.then), self.run(node.other)
        if isinstance(a, FuzzyArray):
            return a.select(mask, b)
        return np.where(mask, a, b)

    def _Crisp(self, node):
        return FuzzyArray.crisp(self.run(node.arg))

    def _Tri(self, node):
        a, b, c = self.run(node.a), self.run(node.b), self.run(node.c)
        bad = (a > b) | (b > c)
        if np.any(bad):
            self.fail("tri(a, b, c) needs a <= b <= c", bad)
        return FuzzyArray.triangular(a, b, c)


def eval_scalar(node: Node | str, k: int, params=None) -> float:
    if isinstance(node, str):
        node = parse_scalar(node, tuple(params or ()))
    return float(eval_array(node, [k], params)[0])


def eval_fuzzy(node: Node | str, k: int, params=None):
    if isinstance(node, str):
        node = parse_fuzzy(node, tuple(params or ()))
    return eval_array(node, [k], params)[0]


# -- exact evaluation --------------------------------------------------------

#: working precision for irrational values in exact mode
EXACT_DPS = 50


@dataclass(frozen=True)
class ExactFuzzy:
    """Fuzzy value with exact endpoints on a rational alpha grid."""

    alphas: tuple
    lower: tuple
    upper: tuple

    def __post_init__(self):
        # endpoints are either all rational or all mpf; the two do not mix
        both = _homogeneous(self.lower + self.upper)
        n = len(self.lower)
        object.__setattr__(self, "lower", both[:n])
        object.__setattr__(self, "upper", both[n:])

    @property
    def rational(self) -> bool:
        return isinstance(self.lower[0], Fraction)

    def aligned(self, other: "ExactFuzzy"):
        x, y = self, other
        if x.rational != y.rational:
            x, y = x._as_mp(), y._as_mp()
        if x.alphas == y.alphas:
            return x, y
        grid = tuple(sorted(set(x.alphas) | set(y.alphas)))
        return x.regrid(grid), y.regrid(grid)

    def _as_mp(self) -> "ExactFuzzy":
        return ExactFuzzy(self.alphas, tuple(map(_mp, self.lower)), tuple(map(_mp, self.upper)))

    def regrid(self, grid) -> "ExactFuzzy":
        def at(values, a):
            for j in range(1, len(self.alphas)):
                a0, a1 = self.alphas[j - 1], self.alphas[j]
                if a0 <= a <= a1:
                    w = (a - a0) / (a1 - a0)
                    return values[j - 1] + w * (values[j] - values[j - 1])
            raise ValueError("alpha outside grid")

        return ExactFuzzy(
            tuple(grid),
            tuple(at(self.lower, a) for a in grid),
            tuple(at(self.upper, a) for a in grid),
        )

    def distance(self, other: "ExactFuzzy"):
        x, y = self.aligned(other)
        return max(
            max(abs(a - b) for a, b in zip(x.lower, y.lower)),
            max(abs(a - b) for a, b in zip(x.upper, y.upper)),
        )

    def norm(self):
        return max(abs(self.lower[0]), abs(self.upper[0]))


_ZERO = Fraction(0)
_ONE = Fraction(1)


# Integer-valued intermediates stay plain ints (much cheaper than Fraction);
# only division and negative powers create Fractions. eval_exact returns
# Fraction at the boundary.

def _is_rat(x) -> bool:
    return type(x) is int or isinstance(x, Fraction)


def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _homogeneous(values) -> tuple:
    if all(_is_rat(v) for v in values):
        return tuple(Fraction(v) if type(v) is int else v for v in values)
    return tuple(_mp(v) for v in values)


def _promote(a, b):
    if _is_rat(a) and _is_rat(b):
        return a, b
    return _mp(a), _mp(b)


def _exact_int(x, k, what):
    if _is_rat(x) and x.denominator == 1:
        return int(x.numerator)
    if not _is_rat(x) and mpmath.isint(x):
        return int(x)
    raise DslEvalError(f"{what} needs an integer value, got {x}", k)


def _exact_sqrt(x):
    if _is_rat(x):
        n, d = x.numerator, x.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn == n and rd * rd == d:
            return Fraction(rn, rd)
    return mpmath.sqrt(_mp(x))


def eval_exact(node: Node, k: int, params: Mapping | None = None):
    """Evaluate at one index with rational arithmetic.

    Scalars come back as :class:`~fractions.Fraction` (or ``mpmath.mpf`` when
    an irrational intermediate appears), fuzzy values as :class:`ExactFuzzy`.
    """
    params = params or {}
    if mpmath.mp.dps >= EXACT_DPS:  # callers already in a wide context keep it
        out = _exact(node, k, params)
    else:
        with mpmath.workdps(EXACT_DPS):
            out = _exact(node, k, params)
    return Fraction(out) if type(out) is int else out


def _exact(node, k, params):
    t = type(node)
    if t is Num:
        v = node.value
        return v.numerator if v.denominator == 1 else v
    if t is Var:
        if node.name == "k":
            return int(k)
        if node.name not in params:
            raise DslEvalError(f"no value bound for parameter {node.name!r}")
        return Fraction(params[node.name])
    if t is Neg:
        x = _exact(node.arg, k, params)
        if isinstance(x, ExactFuzzy):
            return ExactFuzzy(x.alphas, tuple(-u for u in x.upper), tuple(-lo for lo in x.lower))
        return -x
    if t is BinOp:
        return _exact_bin(node, k, params)
    if t is Pow:
        base, exp = _exact(node.base, k, params), _exact(node.exp, k, params)
        if _is_rat(exp) and exp.denominator == 1:
            e = int(exp.numerator)
            if base == 0 and e < 0:
                raise DslEvalError("power outside its domain", k)
            if type(base) is int and e < 0:
                return Fraction(1, base**-e)
            return base**e
        if base < 0:
            raise DslEvalError("power outside its domain", k)
        base, exp = _promote(base, exp)
        if _is_rat(base):
            base, exp = _mp(base), _mp(exp)
        return base**exp
    if t is Alternation:
        e = _exact_int(_exact(node.exp, k, params), k, "(-1)^e")
        return 1 if e % 2 == 0 else -1
    if t is Func:
        if node.name == "floor" and isinstance(node.arg, Func) and node.arg.name == "sqrt":
            x = _exact(node.arg.arg, k, params)
            if x < 0:
                raise DslEvalError("sqrt of a negative number", k)
            if _is_rat(x):
                return math.isqrt(x.numerator // x.denominator)
            return int(mpmath.floor(mpmath.sqrt(x)))
        x = _exact(node.arg, k, params)
        if node.name == "sqrt":
            if x < 0:
                raise DslEvalError("sqrt of a negative number", k)
            return _exact_sqrt(x)
        if node.name == "floor":
            return math.floor(x) if _is_rat(x) else int(mpmath.floor(x))
        return abs(x)
    if t is Pred:
        n = _exact_int(_exact(node.arg, k, params), k, node.test)
        if node.test == "even":
            return n % 2 == 0
        if node.test == "odd":
            return n % 2 != 0
        return n >= 0 and math.isqrt(n) ** 2 == n
    if t is Select:
        branch = node.then if _exact(node.pred, k, params) else node.other
        return _exact(branch, k, params)
    if t is Crisp:
        r = _exact(node.arg, k, params)
        return ExactFuzzy((_ZERO, _ONE), (r, r), (r, r))
    if t is Tri:
        a, b, c = _homogeneous([_exact(x, k, params) for x in (node.a, node.b, node.c)])
        if not a <= b <= c:
            raise DslEvalError("tri(a, b, c) needs a <= b <= c", k)
        return ExactFuzzy((_ZERO, _ONE), (a, b), (c, b))
    raise TypeError(f"not a DSL node: {node!r}")


def _exact_bin(node, k, params):
    a, b = _exact(node.left, k, params), _exact(node.right, k, params)
    fa, fb = isinstance(a, ExactFuzzy), isinstance(b, ExactFuzzy)
    op = node.op
    if fa and fb:
        x, y = a.aligned(b)
        if op == "+":
            return ExactFuzzy(x.alphas, _zip(x.lower, y.lower, "+"), _zip(x.upper, y.upper, "+"))
        if op == "-":
            return ExactFuzzy(x.alphas, _zip(x.lower, y.upper, "-"), _zip(x.upper, y.lower, "-"))
        lo, hi = [], []
        for xl, xu, yl, yu in zip(x.lower, x.upper, y.lower, y.upper):
            p = [xl * yl, xl * yu, xu * yl, xu * yu]
            lo.append(min(p))
            hi.append(max(p))
        return ExactFuzzy(x.alphas, tuple(lo), tuple(hi))
    if fa or fb:
        x, c = (a, b) if fa else (b, a)
        if op == "/":
            if c == 0:
                raise DslEvalError("division by zero", k)
            c = Fraction(1, c) if type(c) is int else 1 / c
        lo = tuple(c * v for v in x.lower)
        hi = tuple(c * v for v in x.upper)
        return ExactFuzzy(x.alphas, lo, hi) if c >= 0 else ExactFuzzy(x.alphas, hi, lo)
    a, b = _promote(a, b)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if b == 0:
        raise DslEvalError("division by zero", k)
    if type(a) is int and type(b) is int:
        return Fraction(a, b)
    return a / b


def _zip(xs, ys, op):
    if op == "+":
        return tuple(x + y for x, y in zip(xs, ys))
    return tuple(x - y for x, y in zip(xs, ys))


# -- moduli ------------------------------------------------------------------

class _ModParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, message, expected=()):
        return DslSyntaxError(message, self.text, self.tok.pos, expected)

    def accept(self, text):
        if self.tok.text == text and self.tok.type in ("op", "name"):
            self.i += 1
            return True
        return False

    def parse(self) -> mod.ModulusFn:
        node = self.sum()
        if self.tok.type != "eof":
            raise self.error(f"unexpected {self.tok.text!r}", ("+", ".", "^", "end of input"))
        return node

    def sum(self):
        node = self.compose()
        while self.accept("+"):
            node = mod.Sum(node, self.compose())
        return node

    def compose(self):
        node = self.iterate()
        while self.accept("."):
            node = mod.Compose(node, self.iterate())
        return node

    def iterate(self):
        node = self.atom()
        if self.accept("^"):
            tok = self.tok
            if tok.type != "num" or not tok.text.isdigit() or int(tok.text) < 1:
                raise self.error("iteration count must be a positive integer", ("integer",))
            self.i += 1
            node = mod.Iterate(node, int(tok.text))
        return node

    def atom(self):
        tok = self.tok
        if self.accept("id"):
            return mod.ID
        if self.accept("rat"):
            return mod.RAT
        if self.accept("pow"):
            num = self.tok
            if num.type != "num":
                raise self.error("pow needs an exponent", ("number",))
            self.i += 1
            try:
                return mod.Power(float(num.text))
            except ValueError as exc:
                raise DslSyntaxError(str(exc), self.text, num.pos) from None
        if self.accept("("):
            node = self.sum()
            if not self.accept(")"):
                raise self.error("unbalanced parenthesis", (")",))
            return node
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}", ("id", "rat", "pow", "("))


def parse_modulus(text: str) -> mod.ModulusFn:
    """Parse ``id``, ``rat``, ``pow p``, ``f + g``, ``g . f`` and ``f^n``.

    ``+`` binds loosest, then ``.`` (composition, applied right to left), then
    ``^n`` (n-fold iteration).
    """
    return _ModParser(text).parse()
