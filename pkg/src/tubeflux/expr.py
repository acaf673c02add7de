"""Expression trees for functions of one complex variable.

Grammar (whitespace insignificant)::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | factor
    factor := base ('^' int)?
    base   := number | 'i' | 'z' | '(' expr ')' | ('exp'|'log') '(' expr ')'

Powers take integer exponents only and ``log`` is the principal branch.
Trees are immutable.  Evaluation is vectorised over numpy arrays and
deterministic; it fails loudly (carrying the offending point) instead of
silently picking a branch or dividing by zero.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ExprError", "ExprSyntaxError", "EvalDomainError",
    "Const", "Var", "Add", "Sub", "Mul", "Div", "Neg", "Pow", "Exp", "Log",
    "Opaque", "parse", "evaluate", "differentiate", "to_string",
]

# evaluation refuses points closer than this to the log cut
LOG_CUT_TOL = 1e-13


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message, pos):
        super().__init__(f"{message} (position {pos})")
        self.pos = pos


class EvalDomainError(ExprError):
    """Evaluation hit a point where the expression is undefined."""

    def __init__(self, message, z=None):
        if z is not None:
            message = f"{message} at z={z}"
        super().__init__(message)
        self.z = z


# --- nodes -----------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Div:
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Exp:
    arg: object


@dataclass(frozen=True)
class Log:
    arg: object


@dataclass(frozen=True)
class Opaque:
    """Numeric leaf: a named callable with an optional derivative hook.

    ``fn`` maps a complex ndarray to a complex ndarray.  ``deriv`` is either
    None (differentiation raises), a node, or a zero-argument callable
    producing a node on first use.  Lets series-backed functions live in the
    same trees as parsed expressions.
    """
    name: str
    fn: object
    deriv: object = None

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)


# --- evaluation ------------------------------------------------------------

def _first_bad(mask, z):
    idx = np.argwhere(mask)
    if idx.size == 0:
        return None
    return complex(z[tuple(idx[0])])


def _eval(node, z):
    # z is always a complex ndarray; results broadcast against it
    if isinstance(node, Const):
        return np.broadcast_to(np.asarray(node.value, dtype=complex), z.shape)
    if isinstance(node, Var):
        return z
    if isinstance(node, Add):
        return _eval(node.left, z) + _eval(node.right, z)
    if isinstance(node, Sub):
        return _eval(node.left, z) - _eval(node.right, z)
    if isinstance(node, Mul):
        return _eval(node.left, z) * _eval(node.right, z)
    if isinstance(node, Neg):
        return -_eval(node.arg, z)
    if isinstance(node, Div):
        num = _eval(node.left, z)
        den = np.broadcast_to(np.asarray(_eval(node.right, z)), z.shape)
        bad = _first_bad(den == 0, z)
        if bad is not None:
            raise EvalDomainError("division by zero", bad)
        return num / den
    if isinstance(node, Pow):
        base = np.broadcast_to(np.asarray(_eval(node.base, z)), z.shape)
        k = node.exponent
        if k < 0:
            bad = _first_bad(base == 0, z)
            if bad is not None:
                raise EvalDomainError(f"zero base raised to power {k}", bad)
        return base ** k
    if isinstance(node, Exp):
        return np.exp(_eval(node.arg, z))
    if isinstance(node, Log):
        w = np.broadcast_to(np.asarray(_eval(node.arg, z)), z.shape)
        bad = _first_bad(w == 0, z)
        if bad is not None:
            raise EvalDomainError("log of zero", bad)
        # principal branch; refuse points within LOG_CUT_TOL of the cut
        near_cut = (w.real < 0) & (np.abs(w.imag) < LOG_CUT_TOL)
        bad = _first_bad(near_cut, z)
        if bad is not None:
            raise EvalDomainError("log evaluated too close to its branch cut", bad)
        return np.log(w)
    if isinstance(node, Opaque):
        return np.broadcast_to(np.asarray(node.fn(z)), z.shape)
    raise ExprError(f"unknown node {node!r}")


def evaluate(node, z):
    """Evaluate ``node`` at ``z`` (complex scalar or ndarray)."""
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    if scalar:
        arr = arr.reshape(1)
    with np.errstate(all="ignore"):
        out = np.asarray(_eval(node, arr))
    out = np.broadcast_to(out, arr.shape)
    if scalar:
        return complex(out[0])
    return out.copy()


# --- differentiation -------------------------------------------------------

def _is_zero(node):
    return isinstance(node, Const) and node.value == 0


def _is_one(node):
    return isinstance(node, Const) and node.value == 1


def _add(a, b):
    if _is_zero(a):
        return b
    if _is_zero(b):
        return a
    return Add(a, b)


def _sub(a, b):
    if _is_zero(b):
        return a
    if _is_zero(a):
        return Neg(b)
    return Sub(a, b)


def _mul(a, b):
    if _is_zero(a) or _is_zero(b):
        return Const(0)
    if _is_one(a):
        return b
    if _is_one(b):
        return a
    return Mul(a, b)


def _div(a, b):
    if _is_zero(a):
        return Const(0)
    if _is_one(b):
        return a
    return Div(a, b)


def differentiate(node):
    """Symbolic derivative with respect to z."""
    if isinstance(node, Const):
        return Const(0)
    if isinstance(node, Var):
        return Const(1)
    if isinstance(node, Add):
        return _add(differentiate(node.left), differentiate(node.right))
    if isinstance(node, Sub):
        return _sub(differentiate(node.left), differentiate(node.right))
    if isinstance(node, Neg):
        d = differentiate(node.arg)
        return Const(0) if _is_zero(d) else Neg(d)
    if isinstance(node, Mul):
        a, b = node.left, node.right
        return _add(_mul(differentiate(a), b), _mul(a, differentiate(b)))
    if isinstance(node, Div):
        a, b = node.left, node.right
        num = _sub(_mul(differentiate(a), b), _mul(a, differentiate(b)))
        return _div(num, Pow(b, 2))
    if isinstance(node, Pow):
        k = node.exponent
        if k == 0:
            return Const(0)
        inner = differentiate(node.base)
        step = _mul(Const(k), Pow(node.base, k - 1)) if k != 1 else Const(k)
        return _mul(step, inner)
    if isinstance(node, Exp):
        return _mul(node, differentiate(node.arg))
    if isinstance(node, Log):
        return _div(differentiate(node.arg), node.arg)
    if isinstance(node, Opaque):
        if node.deriv is None:
            raise ExprError(f"no derivative available for {node.name}")
        d = node.deriv
        return d() if callable(d) and not isinstance(d, _NODE_TYPES) else d
    raise ExprError(f"unknown node {node!r}")


_NODE_TYPES = (Const, Var, Add, Sub, Mul, Div, Neg, Pow, Exp, Log, Opaque)


# --- printing --------------------------------------------------------------

# precedence: additive 1, multiplicative 2, unary minus 3, power 4, atoms 5

def _const_str(value):
    v = complex(value)
    if v.imag == 0:
        return repr(v.real), (3 if v.real < 0 else 5)
    if v.real == 0:
        if v.imag == 1:
            return "i", 5
        if v.imag == -1:
            return "-i", 3
        return f"{v.imag!r}*i", 2
    sign = "+" if v.imag >= 0 else "-"
    return f"({v.real!r}{sign}{abs(v.imag)!r}*i)", 5


def _render(node):
    # returns (text, precedence of outermost operator)
    if isinstance(node, Const):
        return _const_str(node.value)
    if isinstance(node, Var):
        return "z", 5
    if isinstance(node, Add):
        lt, lp = _render(node.left)
        rt, rp = _render(node.right)
        lt = f"({lt})" if lp < 1 else lt
        rt = f"({rt})" if rp < 1 else rt
        return f"{lt} + {rt}", 1
    if isinstance(node, Sub):
        lt, lp = _render(node.left)
        rt, rp = _render(node.right)
        lt = f"({lt})" if lp < 1 else lt
        rt = f"({rt})" if rp <= 1 else rt
        return f"{lt} - {rt}", 1
    if isinstance(node, Mul):
        lt, lp = _render(node.left)
        rt, rp = _render(node.right)
        lt = f"({lt})" if lp < 2 else lt
        rt = f"({rt})" if rp < 2 else rt
        return f"{lt}*{rt}", 2
    if isinstance(node, Div):
        lt, lp = _render(node.left)
        rt, rp = _render(node.right)
        lt = f"({lt})" if lp < 2 else lt
        rt = f"({rt})" if rp <= 2 else rt
        return f"{lt}/{rt}", 2
    if isinstance(node, Neg):
        t, p = _render(node.arg)
        t = f"({t})" if p < 3 else t
        return f"-{t}", 3
    if isinstance(node, Pow):
        t, p = _render(node.base)
        safe = isinstance(node.base, (Var, Exp, Log)) or (
            isinstance(node.base, Const)
            and node.base.value.imag == 0 and node.base.value.real >= 0)
        if not safe:
            t = f"({t})"
        return f"{t}^{node.exponent}", 4
    if isinstance(node, Exp):
        return f"exp({_render(node.arg)[0]})", 5
    if isinstance(node, Log):
        return f"log({_render(node.arg)[0]})", 5
    if isinstance(node, Opaque):
        return f"{node.name}(z)", 5
    raise ExprError(f"unknown node {node!r}")


def to_string(node):
    """Render a tree back to grammar text (Opaque leaves print their name)."""
    return _render(node)[0]


# --- parsing ---------------------------------------------------------------

_NUMBER = re.compile(r"\d+(?:\.\d*)?(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_]+")


class _Tokens:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self._skip_ws()
        if self.pos >= len(self.text):
            return ("end", "", self.pos)
        ch = self.text[self.pos]
        if ch in "+-*/^()":
            return ("op", ch, self.pos)
        m = _NUMBER.match(self.text, self.pos)
        if m:
            return ("number", m.group(), self.pos)
        m = _IDENT.match(self.text, self.pos)
        if m:
            return ("ident", m.group(), self.pos)
        raise ExprSyntaxError(f"unexpected character {ch!r}", self.pos)

    def take(self):
        kind, text, pos = self.peek()
        self.pos = pos + len(text)
        return kind, text, pos


def _parse_expr(tok):
    node = _parse_term(tok)
    while True:
        kind, text, _ = tok.peek()
        if kind == "op" and text in "+-":
            tok.take()
            rhs = _parse_term(tok)
            node = Add(node, rhs) if text == "+" else Sub(node, rhs)
        else:
            return node


def _parse_term(tok):
    node = _parse_unary(tok)
    while True:
        kind, text, _ = tok.peek()
        if kind == "op" and text in "*/":
            tok.take()
            rhs = _parse_unary(tok)
            node = Mul(node, rhs) if text == "*" else Div(node, rhs)
        else:
            return node


def _parse_unary(tok):
    kind, text, _ = tok.peek()
    if kind == "op" and text == "-":
        tok.take()
        return Neg(_parse_unary(tok))
    return _parse_factor(tok)


def _parse_factor(tok):
    node = _parse_base(tok)
    kind, text, _ = tok.peek()
    if kind == "op" and text == "^":
        tok.take()
        node = Pow(node, _parse_int_exponent(tok))
    return node


def _parse_int_exponent(tok):
    sign = 1
    kind, text, pos = tok.peek()
    if kind == "op" and text == "-":
        tok.take()
        sign = -1
        kind, text, pos = tok.peek()
    if kind != "number":
        raise ExprSyntaxError("expected an integer exponent", pos)
    if "." in text or "e" in text or "E" in text:
        raise ExprSyntaxError(f"exponent must be an integer, got {text!r}", pos)
    tok.take()
    return sign * int(text)


def _parse_base(tok):
    kind, text, pos = tok.take()
    if kind == "number":
        return Const(complex(float(text)))
    if kind == "ident":
        if text == "z":
            return Var()
        if text == "i":
            return Const(1j)
        if text in ("exp", "log"):
            k2, t2, p2 = tok.take()
            if not (k2 == "op" and t2 == "("):
                raise ExprSyntaxError(f"expected '(' after {text}", p2)
            arg = _parse_expr(tok)
            k3, t3, p3 = tok.take()
            if not (k3 == "op" and t3 == ")"):
                raise ExprSyntaxError("expected ')'", p3)
            return Exp(arg) if text == "exp" else Log(arg)
        raise ExprSyntaxError(f"unknown name {text!r}", pos)
    if kind == "op" and text == "(":
        node = _parse_expr(tok)
        k2, t2, p2 = tok.take()
        if not (k2 == "op" and t2 == ")"):
            raise ExprSyntaxError("expected ')'", p2)
        return node
    raise ExprSyntaxError(f"unexpected token {text!r}", pos)


def parse(text):
    """Parse grammar text into a tree.  Raises ExprSyntaxError with position."""
    tok = _Tokens(text)
    node = _parse_expr(tok)
    kind, t, pos = tok.peek()
    if kind != "end":
        raise ExprSyntaxError(f"trailing input {t!r}", pos)
    return node
