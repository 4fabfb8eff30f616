"""
Frame Expression Parser
Parses the scalar expression language used for frame components and conformal factors
"""

import math
import re
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from geometry.errors import (ExprSyntaxError, NonConstantExponentError, SingularEvaluationError,
                             UnknownIdentifierError, UnknownVariableError)
from geometry.jet import ELEMENTARY, Jet2, jet_arith, jet_compose, jet_const, jet_var, power_derivatives

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}

_OPERATOR_NAMES = {"+": "add", "-": "sub", "*": "mul", "/": "div"}

TOKEN_PATTERN = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))")
VARIABLE_PATTERN = re.compile(r"^x(\d+)$")


class Expr:
    """Node of an immutable expression tree"""

    def jet(self, point: np.ndarray) -> Jet2:
        raise NotImplementedError

    def value(self, point: Sequence[float]) -> float:
        raise NotImplementedError

    def text(self) -> str:
        raise NotImplementedError

    def max_index(self) -> int:
        """Largest 0-based coordinate index referenced, -1 when none"""
        return -1

    def __str__(self) -> str:
        return self.text()


@dataclass(frozen=True)
class Number(Expr):
    number: float

    def jet(self, point):
        return jet_const(self.number, len(point))

    def value(self, point):
        return self.number

    def text(self):
        if self.number < 0:
            return f"(-{-self.number!r})"
        return repr(self.number)


@dataclass(frozen=True)
class Constant(Expr):
    name: str

    def jet(self, point):
        return jet_const(CONSTANTS[self.name], len(point))

    def value(self, point):
        return CONSTANTS[self.name]

    def text(self):
        return self.name


@dataclass(frozen=True)
class Variable(Expr):
    index: int  # 0-based

    def jet(self, point):
        return jet_var(point, self.index)

    def value(self, point):
        return float(point[self.index])

    def text(self):
        return f"x{self.index + 1}"

    def max_index(self):
        return self.index


@dataclass(frozen=True)
class Negate(Expr):
    operand: Expr

    def jet(self, point):
        return -self.operand.jet(point)

    def value(self, point):
        return -self.operand.value(point)

    def text(self):
        return f"(-{self.operand.text()})"

    def max_index(self):
        return self.operand.max_index()


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr

    def jet(self, point):
        return jet_arith(_OPERATOR_NAMES[self.op], self.left.jet(point), self.right.jet(point))

    def value(self, point):
        a = self.left.value(point)
        b = self.right.value(point)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if b == 0.0:
            raise SingularEvaluationError("division by zero")
        return a / b

    def text(self):
        return f"({self.left.text()} {self.op} {self.right.text()})"

    def max_index(self):
        return max(self.left.max_index(), self.right.max_index())


@dataclass(frozen=True)
class Power(Expr):
    base: Expr
    exponent: float

    def jet(self, point):
        return jet_compose("pow_const", self.base.jet(point), self.exponent)

    def value(self, point):
        return power_derivatives(self.base.value(point), self.exponent)[0]

    def text(self):
        exponent = repr(self.exponent) if self.exponent >= 0 else f"(-{-self.exponent!r})"
        return f"({self.base.text()}^{exponent})"

    def max_index(self):
        return self.base.max_index()


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr

    def jet(self, point):
        return jet_compose(self.func, self.arg.jet(point))

    def value(self, point):
        return ELEMENTARY[self.func](self.arg.value(point))[0]

    def text(self):
        return f"{self.func}({self.arg.text()})"

    def max_index(self):
        return self.arg.max_index()


@dataclass(frozen=True)
class Token:
    """Lexical token with its byte offset"""
    kind: str  # 'number', 'name', 'op' or 'end'
    text: str
    offset: int


# Binding powers: ^ > unary minus > * / > + -
INFIX_POWER = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
PREFIX_MINUS_POWER = 30


class ExpressionParser:
    """Pratt parser for one expression over the coordinates x1..xn"""

    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.tokens = self._tokenize(text)
        self.position = 0

    def _byte_offset(self, char_offset: int) -> int:
        return len(self.text[:char_offset].encode("utf-8"))

    def _tokenize(self, text: str) -> List[Token]:
        """Split text into tokens, rejecting unknown characters"""
        tokens = []
        pos = 0
        while True:
            match = TOKEN_PATTERN.match(text, pos)
            if match is None:
                rest = text[pos:]
                bad = pos + len(rest) - len(rest.lstrip())
                if bad == len(text):
                    break
                raise ExprSyntaxError(f"unexpected character '{text[bad]}'", self._byte_offset(bad))
            kind = match.lastgroup
            tokens.append(Token(kind, match.group(kind), self._byte_offset(match.start(kind))))
            pos = match.end()
        tokens.append(Token("end", "", self._byte_offset(len(text))))
        return tokens

    @property
    def current(self) -> Token:
        return self.tokens[self.position]

    def _advance(self) -> Token:
        token = self.tokens[self.position]
        if token.kind != "end":
            self.position += 1
        return token

    def _expect(self, op: str) -> Token:
        token = self.current
        if token.kind != "op" or token.text != op:
            found = "end of input" if token.kind == "end" else f"'{token.text}'"
            raise ExprSyntaxError(f"expected '{op}', found {found}", token.offset)
        return self._advance()

    def parse(self) -> Expr:
        """Parse the whole input"""
        tree = self.expression(0)
        if self.current.kind != "end":
            raise ExprSyntaxError(f"unexpected '{self.current.text}'", self.current.offset)
        return tree

    def expression(self, right_power: int) -> Expr:
        """Parse while the next operator binds tighter than right_power"""
        left = self._prefix(self._advance())
        while True:
            token = self.current
            power = INFIX_POWER.get(token.text, 0) if token.kind == "op" else 0
            if power <= right_power:
                return left
            self._advance()
            left = self._infix(token, left)

    def _prefix(self, token: Token) -> Expr:
        if token.kind == "number":
            number = float(token.text)
            if not math.isfinite(number):
                raise ExprSyntaxError("numeric literal out of range", token.offset)
            return Number(number)
        if token.kind == "name":
            return self._name(token)
        if token.kind == "op" and token.text == "-":
            return Negate(self.expression(PREFIX_MINUS_POWER))
        if token.kind == "op" and token.text == "(":
            inner = self.expression(0)
            self._expect(")")
            return inner
        if token.kind == "end":
            raise ExprSyntaxError("unexpected end of input", token.offset)
        raise ExprSyntaxError(f"unexpected '{token.text}'", token.offset)

    def _name(self, token: Token) -> Expr:
        name = token.text
        if name in FUNCTIONS:
            self._expect("(")
            arg = self.expression(0)
            self._expect(")")
            return Call(name, arg)
        if name in CONSTANTS:
            return Constant(name)
        match = VARIABLE_PATTERN.match(name)
        if match:
            index = int(match.group(1))
            if not 1 <= index <= self.n:
                raise UnknownVariableError(
                    f"unknown variable '{name}' (coordinates are x1..x{self.n})", token.offset)
            return Variable(index - 1)
        raise UnknownIdentifierError(f"unknown identifier '{name}'", token.offset)

    def _infix(self, token: Token, left: Expr) -> Expr:
        if token.text == "^":
            start = self.current.offset
            # right-associative
            exponent = self.expression(INFIX_POWER["^"] - 1)
            return Power(left, self._fold_exponent(exponent, start))
        right = self.expression(INFIX_POWER[token.text])
        return Binary(token.text, left, right)

    def _fold_exponent(self, exponent: Expr, offset: int) -> float:
        """Reduce a coordinate-free exponent to its numeric value"""
        if exponent.max_index() >= 0:
            raise NonConstantExponentError("exponent of '^' must be constant", offset)
        try:
            value = exponent.value(())
        except SingularEvaluationError as exc:
            raise ExprSyntaxError(f"exponent is not a real number ({exc})", offset) from exc
        if not math.isfinite(value):
            raise ExprSyntaxError("exponent is not finite", offset)
        return float(value)


def parse(text: str, n: int) -> Expr:
    """Parse an expression over x1..xn"""
    return ExpressionParser(text, n).parse()


def to_text(expr: Expr) -> str:
    """Canonical fully parenthesized form; parse(to_text(e)) reproduces e"""
    return expr.text()


def eval_jet(expr: Expr, point: Sequence[float]) -> Jet2:
    """Value, gradient and Hessian of expr at point"""
    point = np.asarray(point, dtype=float)
    if expr.max_index() >= point.size:
        raise ValueError(f"expression uses x{expr.max_index() + 1} but the point has {point.size} coordinates")
    return expr.jet(point)


def evaluate(expr: Expr, point: Sequence[float]) -> float:
    """Plain value of expr at point"""
    if expr.max_index() >= len(point):
        raise ValueError(f"expression uses x{expr.max_index() + 1} but the point has {len(point)} coordinates")
    return expr.value(point)


def scaled_by_exp(rho: Expr, expr: Expr, sign: int = -1) -> Expr:
    """exp(sign * rho) * expr, built at tree level"""
    exponent = Negate(rho) if sign < 0 else rho
    return Binary("*", Call("exp", exponent), expr)
