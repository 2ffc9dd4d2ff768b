"""Equation grammar for the math task family.

Supported forms (operands are nonnegative integers of at most 4 digits):
  direct:  <int> <op> <int> =            op in {+, -, ×, ÷}
  linear:  <int> + x = <int>
           x + <int> = <int>
           x - <int> = <int>
           <int> × x = <int>
ASCII aliases accepted on input: * for ×, / for ÷, − for -. Division must
be exact; the variable always solves to an integer or the equation is
rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .errors import AnswerDoesNotFit, NoIntegerSolution, UngrammaticalEquation

_ALIASES = {"*": "×", "/": "÷", "−": "-"}
OPS = ("+", "-", "×", "÷")

_TOKEN_RE = re.compile(r"\d+|[+\-×÷*/−=x]|\S")


@dataclass(frozen=True)
class Equation:
    form: str  # "direct" or "x"
    op: str
    a: Optional[int]  # left operand (None when x sits there)
    b: Optional[int]  # right operand (None when x sits there)
    rhs: Optional[int]  # right-hand side for x forms
    x_side: Optional[str]  # "left" | "right" | None

    def tiles(self) -> list[str]:
        """Single-character tile labels spelling the equation row."""
        left = "x" if self.x_side == "left" else str(self.a)
        right = "x" if self.x_side == "right" else str(self.b)
        chars = list(left) + [self.op] + list(right) + ["="]
        if self.form == "x":
            chars += list(str(self.rhs))
        return chars

    def text(self) -> str:
        left = "x" if self.x_side == "left" else str(self.a)
        right = "x" if self.x_side == "right" else str(self.b)
        out = f"{left} {self.op} {right} ="
        if self.form == "x":
            out += f" {self.rhs}"
        return out


def _operand(token: str) -> int:
    if not token.isdigit():
        raise UngrammaticalEquation(f"expected integer, got {token!r}")
    if len(token) > 4:
        raise UngrammaticalEquation(f"operand {token} exceeds 4 digits")
    return int(token)


def parse_equation(text: str) -> Equation:
    tokens = _TOKEN_RE.findall(text)
    tokens = [_ALIASES.get(t, t) for t in tokens]
    if not tokens:
        raise UngrammaticalEquation("empty equation")
    # direct: INT OP INT =
    if len(tokens) == 4 and tokens[3] == "=" and tokens[1] in OPS and "x" not in tokens[:3]:
        return Equation("direct", tokens[1], _operand(tokens[0]), _operand(tokens[2]), None, None)
    # x forms: (INT|x) OP (INT|x) = INT
    if len(tokens) == 5 and tokens[3] == "=" and tokens[1] in OPS:
        left, op, right, _, rhs = tokens
        if left == "x" and right == "x":
            raise UngrammaticalEquation("only one variable allowed")
        if left == "x":
            if op not in ("+", "-"):
                raise UngrammaticalEquation(f"form 'x {op} a = c' not supported")
            return Equation("x", op, None, _operand(right), _operand(rhs), "left")
        if right == "x":
            if op not in ("+", "×"):
                raise UngrammaticalEquation(f"form 'a {op} x = c' not supported")
            return Equation("x", op, _operand(left), None, _operand(rhs), "right")
    raise UngrammaticalEquation(f"unrecognized equation {text!r}")


def solve(eq: Equation) -> int:
    """Exact integer answer: the result digits for direct forms, x otherwise."""
    if eq.form == "direct":
        a, b = eq.a, eq.b
        if eq.op == "+":
            return a + b
        if eq.op == "-":
            return a - b
        if eq.op == "×":
            return a * b
        if b == 0 or a % b != 0:
            raise NoIntegerSolution(f"{a} ÷ {b} is not exact")
        return a // b
    if eq.x_side == "left":
        # x + b = rhs  |  x - b = rhs
        return eq.rhs - eq.b if eq.op == "+" else eq.rhs + eq.b
    # a + x = rhs  |  a × x = rhs
    if eq.op == "+":
        return eq.rhs - eq.a
    if eq.a == 0 or eq.rhs % eq.a != 0:
        raise NoIntegerSolution(f"{eq.a} × x = {eq.rhs} has no integer x")
    return eq.rhs // eq.a


def answer_digits(eq: Equation, answer: int) -> str:
    """Digit labels the plan must lay down; rejects unrepresentable answers.

    The tile world has no minus sign, and an x cell holds exactly one tile,
    so negative answers and multi-digit substitutions do not fit.
    """
    if answer < 0:
        raise AnswerDoesNotFit(f"answer {answer} is negative")
    digits = str(answer)
    if eq.form == "x" and len(digits) > 1:
        raise AnswerDoesNotFit(f"answer {answer} needs {len(digits)} tiles in one cell")
    return digits


def solved_row(eq: Equation, answer: int) -> str:
    """Labels the equation row spells once solved, left to right."""
    if eq.form == "direct":
        return "".join(eq.tiles()) + str(answer)
    return "".join(eq.tiles()).replace("x", str(answer))
