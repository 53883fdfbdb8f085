"""Tiny closed-form expression language for recurrence coefficients.

Grammar (infix, ^ is right-associative power, ** accepted as alias):

    expr    := term (('+'|'-') term)*
    term    := factor (('*'|'/') factor)*
    factor  := ('+'|'-') factor | power
    power   := atom ('^' factor)?
    atom    := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Known functions: exp, log, sin, cos, sinh, cosh, sqrt.
Known constants: pi, e, i. Free variables: x, and eps where allowed.

Evaluation is backend-generic: the same AST evaluates on numpy arrays,
TaylorSeries jets (giving exact derivative towers), and mpmath scalars.
"""

import math

import mpmath
import numpy as np

from .errors import ParseError
from .series import TaylorSeries

FUNCTIONS = ("exp", "log", "sin", "cos", "sinh", "cosh", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e, "i": 1j}

_MP_CONST = {"pi": lambda: mpmath.pi, "e": lambda: mpmath.e, "i": lambda: mpmath.mpc(0, 1)}


def _apply(fn, v):
    if isinstance(v, TaylorSeries):
        return getattr(v, fn)()
    if isinstance(v, (mpmath.mpf, mpmath.mpc)):
        return getattr(mpmath, fn)(v)
    return getattr(np, fn)(v)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text, line=1, col_offset=0):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        col = i + 1 + col_offset
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < len(text) and text[i + 1].isdigit()):
            j = i
            seen_e = False
            while j < len(text) and (
                text[j].isdigit()
                or text[j] == "."
                or (text[j] in "eE" and j + 1 < len(text) and (text[j + 1].isdigit() or text[j + 1] in "+-") and not seen_e)
                or (text[j] in "+-" and j > i and text[j - 1] in "eE")
            ):
                if text[j] in "eE":
                    seen_e = True
                j += 1
            tokens.append(Token("num", text[i:j], line, col))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("name", text[i:j], line, col))
            i = j
            continue
        if text.startswith("**", i):
            tokens.append(Token("op", "^", line, col))
            i += 2
            continue
        if ch in "+-*/^()":
            tokens.append(Token("op", ch, line, col))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("end", "", line, len(text) + 1 + col_offset))
    return tokens


class _Parser:
    def __init__(self, tokens, variables):
        self.toks = tokens
        self.pos = 0
        self.variables = variables

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind=None, text=None):
        t = self.toks[self.pos]
        if kind and t.kind != kind or (text and t.text != text):
            raise ParseError(f"expected {text or kind}, found {t.text!r}", t.line, t.col)
        self.pos += 1
        return t

    def parse(self):
        node = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"trailing input {t.text!r}", t.line, t.col)
        return node

    def expr(self):
        node = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek().text in ("*", "/"):
            op = self.take().text
            rhs = self.factor()
            node = ("mul" if op == "*" else "div", node, rhs)
        return node

    def factor(self):
        t = self.peek()
        if t.text == "+":
            self.take()
            return self.factor()
        if t.text == "-":
            self.take()
            return ("neg", self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().text == "^":
            self.take()
            return ("pow", base, self.factor())
        return base

    def atom(self):
        t = self.peek()
        if t.kind == "num":
            self.take()
            return ("num", float(t.text))
        if t.kind == "name":
            self.take()
            name = t.text
            if self.peek().text == "(":
                if name not in FUNCTIONS:
                    raise ParseError(f"unknown function {name!r}", t.line, t.col)
                self.take(text="(")
                arg = self.expr()
                self.take(text=")")
                return ("call", name, arg)
            if name in self.variables:
                return ("var", name)
            if name in CONSTANTS:
                return ("const", name)
            raise ParseError(f"unknown name {name!r}", t.line, t.col)
        if t.text == "(":
            self.take()
            node = self.expr()
            self.take(text=")")
            return node
        raise ParseError(f"expected a value, found {t.text!r}", t.line, t.col)


class Expression:
    """Parsed expression; evaluate with numpy arrays, jets, or mpmath."""

    def __init__(self, text, variables=("x",), line=1):
        self.text = text.strip()
        self.variables = tuple(variables)
        self.ast = _Parser(_tokenize(text, line=line), set(variables)).parse()

    def __repr__(self):
        return f"Expression({self.text!r})"

    def __call__(self, **env):
        mp_mode = any(isinstance(v, (mpmath.mpf, mpmath.mpc)) for v in env.values())
        return _eval(self.ast, env, mp_mode)


def _eval(node, env, mp_mode):
    kind = node[0]
    if kind == "num":
        return mpmath.mpf(node[1]) if mp_mode else node[1]
    if kind == "const":
        return _MP_CONST[node[1]]() if mp_mode else CONSTANTS[node[1]]
    if kind == "var":
        return env[node[1]]
    if kind == "neg":
        return -_eval(node[1], env, mp_mode)
    if kind == "add":
        return _eval(node[1], env, mp_mode) + _eval(node[2], env, mp_mode)
    if kind == "sub":
        return _eval(node[1], env, mp_mode) - _eval(node[2], env, mp_mode)
    if kind == "mul":
        return _eval(node[1], env, mp_mode) * _eval(node[2], env, mp_mode)
    if kind == "div":
        return _eval(node[1], env, mp_mode) / _eval(node[2], env, mp_mode)
    if kind == "pow":
        base = _eval(node[1], env, mp_mode)
        expo = _eval(node[2], env, mp_mode)
        if isinstance(base, TaylorSeries):
            if not isinstance(expo, TaylorSeries) and float(expo) == int(float(expo)):
                return base ** int(float(expo))
            return base ** expo
        return base**expo
    if kind == "call":
        return _apply(node[1], _eval(node[2], env, mp_mode))
    raise AssertionError(f"bad node {node!r}")
