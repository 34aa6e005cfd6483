from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, List, Optional

from ..algebra import STEP, ExpressionParser, MultiPoly, RatFunc, Scanner, Token, VarTable, hat_name
from ..errors import ParseError, UnknownNameError
from .system import QuadSystem

__all__ = ("parse_system", "parse_expression", "format_system", "KEYWORDS")

logger = logging.getLogger(__name__)

KEYWORDS = ("var", "param")


class _ModelParser:
    """
    Line-oriented parser of the model language:

    ```
    var x, y
    param a = 1/2
    x' = y
    y' = 6*x^2 - a   # comment
    ```
    """

    def __init__(self, text: str) -> None:
        self.scanner = Scanner(text)
        self.state: List[str] = []
        self.params: Dict[str, Fraction] = {}
        self.equations: Dict[str, MultiPoly] = {}
        self.vartable: Optional[VarTable] = None

    def error(self, reason: str, token: Token) -> ParseError:
        return self.scanner.error(reason, token.line, token.column)

    def parse(self) -> None:
        while not self.scanner.at_end():
            if self.scanner.accept("LINEBREAK"):
                continue

            token = self.scanner.expect("NAME", "'var', 'param' or an equation")
            if token.value == "var":
                self._declare_vars(token)
            elif token.value == "param":
                self._declare_param()
            else:
                self._equation(token)

            if not self.scanner.at_end():
                self.scanner.expect("LINEBREAK", "end of line")

    def _check_new_name(self, token: Token) -> None:
        name = token.value
        if name in KEYWORDS or name == STEP:
            raise self.error(f"{name!r} is reserved", token)

        if name in self.state or name in self.params:
            raise self.error(f"{name!r} is already declared", token)

        if any(name == hat_name(other) or other == hat_name(name) for other in self.state):
            raise self.error(f"{name!r} collides with the hatted copy of another variable", token)

    # <VARS> -> 'var' <NAME> { ',' <NAME> }*
    def _declare_vars(self, keyword: Token) -> None:
        if self.equations:
            raise self.error("variables must be declared before the first equation", keyword)

        while True:
            token = self.scanner.expect("NAME", "a variable name")
            self._check_new_name(token)
            self.state.append(token.value)

            if not self.scanner.accept("COMMA"):
                break

    # <PARAM> -> 'param' <NAME> '=' [ '-' ] <INTEGER> [ '/' <INTEGER> ]
    def _declare_param(self) -> None:
        token = self.scanner.expect("NAME", "a parameter name")
        self._check_new_name(token)
        self.scanner.expect("EQUALS", "'='")

        sign = -1 if self.scanner.accept("MINUS") else 1
        numerator = int(self.scanner.expect("INTEGER", "a rational value").value)
        denominator = 1

        if self.scanner.accept("DIVIDE"):
            slash = self.scanner.tokens[self.scanner.position - 1]
            denominator = int(self.scanner.expect("INTEGER", "a denominator").value)
            if denominator == 0:
                raise self.error("zero denominator", slash)

        self.params[token.value] = Fraction(sign * numerator, denominator)

    # <EQUATION> -> <NAME> "'" '=' <EXPRESSION>
    def _equation(self, token: Token) -> None:
        if token.value not in self.state:
            source = self.scanner.lines[token.line - 1]
            raise UnknownNameError(f"{token.value!r} is not a declared variable", token.line, token.column, source)

        if token.value in self.equations:
            raise self.error(f"second equation for {token.value!r}", token)

        self.scanner.expect("PRIME", "\"'\" after the variable name")
        self.scanner.expect("EQUALS", "'='")

        if self.vartable is None:
            self.vartable = VarTable(self.state)

        start = self.scanner.token
        expr = ExpressionParser(self.scanner, self.vartable, self._resolve).parse()

        if not expr.is_polynomial:
            raise self.error(f"right-hand side of {token.value}' is not a polynomial", start or token)

        self.equations[token.value] = expr.as_poly()

    def _resolve(self, token: Token) -> RatFunc:
        assert self.vartable is not None

        if token.value in self.state:
            return RatFunc.variable(self.vartable, token.value)

        if token.value in self.params:
            return RatFunc.constant(self.vartable, self.params[token.value])

        source = self.scanner.lines[token.line - 1]
        raise UnknownNameError(f"unknown name {token.value!r}", token.line, token.column, source)

    def build(self, name: str) -> QuadSystem:
        if not self.state:
            line, column = self.scanner.end_position()
            raise self.scanner.error("no 'var' declaration", line, column)

        missing = [variable for variable in self.state if variable not in self.equations]
        if missing:
            line, column = self.scanner.end_position()
            raise self.scanner.error(f"no equation for {', '.join(missing)}", line, column)

        polys = [self.equations[variable] for variable in self.state]
        return QuadSystem.from_polys(self.state, polys, params=self.params, name=name)


def parse_system(text: str, *, name: str = "") -> QuadSystem:
    """
    Parses a model source into a [cremona.model.QuadSystem][].

    Parameters:
        text (str): The model source.
        name (str): A label for the system.

    Raises:
        [cremona.errors.ParseError][] on malformed syntax, with line and column.
        [cremona.errors.UnknownNameError][] on an undeclared identifier.
        [cremona.errors.DegreeError][] if a right-hand side has degree above two.

    Example:
        ```py
        system = parse_system("var x, y\\nparam a = 1/2\\nx' = y\\ny' = 6*x^2 - a")
        ```

    """
    parser = _ModelParser(text)
    parser.parse()
    system = parser.build(name)

    logger.debug(f"SYSTEM PARSED: {system.name or '<anonymous>'} dimension={system.dimension}")
    return system


def parse_expression(system: QuadSystem, text: str) -> MultiPoly:
    """
    Parses a polynomial in the state variables and parameters of a system, e.g. a first
    integral such as `y^2/2 - 2*x^3 + a*x`.

    Raises:
        [cremona.errors.ParseError][] on malformed text or a non-polynomial expression.
        [cremona.errors.UnknownNameError][] on any other identifier.

    """
    parser = _ModelParser(text)
    parser.state = list(system.state)
    parser.params = system.param_dict
    parser.vartable = system.vartable

    scanner = parser.scanner
    while scanner.accept("LINEBREAK"):
        pass

    start = scanner.token
    expr = ExpressionParser(scanner, parser.vartable, parser._resolve).parse()
    while scanner.accept("LINEBREAK"):
        pass

    if not scanner.at_end():
        raise scanner.unexpected("an operator or end of input")

    if not expr.is_polynomial:
        raise scanner.error("expression is not a polynomial", start.line if start else 1, start.column if start else 1)

    return expr.as_poly()


def format_system(system: QuadSystem) -> str:
    """
    Prints a system in the model language; parsing the output gives back an equal system.
    """
    lines = []
    if system.name:
        lines.append(f"# {system.name}")

    lines.append(f"var {', '.join(system.state)}")
    lines.extend(f"param {key} = {value}" for key, value in system.params)
    lines.extend(f"{variable}' = {poly.format()}" for variable, poly in zip(system.state, system.rhs_polys()))

    return "\n".join(lines) + "\n"
