from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, List, Optional

from ..errors import ParseError, UnknownNameError, UsageError
from .poly import MultiPoly
from .ratfunc import RatFunc
from .vartable import VarTable

__all__ = (
    "Token",
    "Scanner",
    "ExpressionParser",
    "parse_poly",
    "parse_ratfunc",
    "parse_rational",
    "format_poly",
)

_TOKENS = re.compile(
    r"""
    (?P<INTEGER>\d+)
    |(?P<NAME>[A-Za-z_][A-Za-z_0-9]*)
    |(?P<PRIME>')
    |(?P<PLUS>\+)
    |(?P<MINUS>-)
    |(?P<TIMES>\*)
    |(?P<DIVIDE>/)
    |(?P<CARET>\^)
    |(?P<LPAREN>\()
    |(?P<RPAREN>\))
    |(?P<COMMA>,)
    |(?P<EQUALS>=)
    |(?P<LINEBREAK>\n)
    |(?P<SPACE>[ \t\r]+)
    |(?P<COMMENT>\#[^\n]*)
    |(?P<MISMATCH>.)
    """,
    re.VERBOSE,
)

_RATIONAL = re.compile(r"\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*")


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int


class Scanner:
    """
    Splits model or polynomial text into tokens with 1-based line and column positions.
    Spaces and `#` comments are dropped; line breaks are kept as `LINEBREAK` tokens.
    """

    def __init__(self, text: str) -> None:
        self.text = text
        self.lines = text.split("\n")
        self.tokens: List[Token] = list(self._scan())
        self.position = 0

    def _scan(self) -> Iterator[Token]:
        line, start = 1, 0

        for match in _TOKENS.finditer(self.text):
            kind = match.lastgroup or "MISMATCH"
            column = match.start() - start + 1

            if kind == "MISMATCH":
                raise self.error(f"unexpected character {match.group()!r}", line, column)

            if kind not in ("SPACE", "COMMENT"):
                yield Token(kind, match.group(), line, column)

            if kind == "LINEBREAK":
                line, start = line + 1, match.end()

    def error(self, reason: str, line: int, column: int) -> ParseError:
        source = self.lines[line - 1] if 0 < line <= len(self.lines) else ""
        return ParseError(reason, line, column, source)

    @property
    def token(self) -> Optional[Token]:
        return self.tokens[self.position] if self.position < len(self.tokens) else None

    def end_position(self):
        last = self.tokens[-1] if self.tokens else None
        if last is None:
            return 1, 1

        return last.line, last.column + len(last.value)

    def peek(self, kind: str) -> bool:
        return self.token is not None and self.token.kind == kind

    def accept(self, kind: str) -> Optional[Token]:
        if self.peek(kind):
            token = self.token
            self.position += 1
            return token

        return None

    def expect(self, kind: str, what: Optional[str] = None) -> Token:
        token = self.accept(kind)
        if token is None:
            raise self.unexpected(what or kind.lower())

        return token

    def unexpected(self, expected: str) -> ParseError:
        token = self.token
        if token is None:
            line, column = self.end_position()
            return self.error(f"expected {expected}, found end of input", line, column)

        found = "end of line" if token.kind == "LINEBREAK" else repr(token.value)
        return self.error(f"expected {expected}, found {found}", token.line, token.column)

    def at_end(self) -> bool:
        return self.token is None


class ExpressionParser:
    """
    Recursive-descent parser for polynomial expressions with `+ - * / ^`, integer
    literals and parentheses, evaluated exactly into rational functions.

    Identifiers are handed to `resolve`, which returns their value or raises
    [cremona.errors.UnknownNameError][].
    """

    def __init__(self, scanner: Scanner, vartable: VarTable, resolve: Callable[[Token], RatFunc]) -> None:
        self.scanner = scanner
        self.vartable = vartable
        self.resolve = resolve

    def parse(self) -> RatFunc:
        return self._expression()

    # <EXPRESSION> -> <TERM> { ( '+' | '-' ) <TERM> }*
    def _expression(self) -> RatFunc:
        expr = self._term()
        while self.scanner.peek("PLUS") or self.scanner.peek("MINUS"):
            if self.scanner.accept("PLUS"):
                expr = expr + self._term()
            elif self.scanner.accept("MINUS"):
                expr = expr - self._term()

        return expr

    # <TERM> -> <FACTOR> { ( '*' | '/' ) <FACTOR> }*
    def _term(self) -> RatFunc:
        expr = self._factor()
        while self.scanner.peek("TIMES") or self.scanner.peek("DIVIDE"):
            if self.scanner.accept("TIMES"):
                expr = expr * self._factor()
                continue

            token = self.scanner.expect("DIVIDE")
            divisor = self._factor()
            if divisor.is_zero:
                raise self.scanner.error("division by zero", token.line, token.column)

            expr = expr / divisor

        return expr

    # <FACTOR> -> [ '-' | '+' ] <ATOM>
    def _factor(self) -> RatFunc:
        if self.scanner.accept("MINUS"):
            return -self._factor()

        if self.scanner.accept("PLUS"):
            return self._factor()

        return self._atom()

    # <ATOM> -> <BASE> [ '^' <INTEGER> ]
    def _atom(self) -> RatFunc:
        base = self._base()
        if self.scanner.accept("CARET"):
            exponent = self.scanner.expect("INTEGER", "a non-negative integer exponent")
            return base ** int(exponent.value)

        return base

    # <BASE> -> <INTEGER> | <NAME> | '(' <EXPRESSION> ')'
    def _base(self) -> RatFunc:
        token = self.scanner.accept("INTEGER")
        if token is not None:
            return RatFunc.constant(self.vartable, int(token.value))

        token = self.scanner.accept("NAME")
        if token is not None:
            return self.resolve(token)

        if self.scanner.accept("LPAREN"):
            expr = self._expression()
            self.scanner.expect("RPAREN", "')'")
            return expr

        raise self.scanner.unexpected("a number, a name or '('")


def _variable_resolver(scanner: Scanner, vartable: VarTable) -> Callable[[Token], RatFunc]:
    def resolve(token: Token) -> RatFunc:
        if token.value not in vartable:
            source = scanner.lines[token.line - 1]
            raise UnknownNameError(f"unknown name {token.value!r}", token.line, token.column, source)

        return RatFunc.variable(vartable, token.value)

    return resolve


def parse_ratfunc(text: str, vartable: VarTable) -> RatFunc:
    """
    Parses an expression over the names of a table into a rational function.

    Raises:
        [cremona.errors.ParseError][] on malformed text or a division by zero.
        [cremona.errors.UnknownNameError][] on a name missing from the table.

    """
    scanner = Scanner(text)
    while scanner.accept("LINEBREAK"):
        pass

    expr = ExpressionParser(scanner, vartable, _variable_resolver(scanner, vartable)).parse()
    while scanner.accept("LINEBREAK"):
        pass

    if not scanner.at_end():
        raise scanner.unexpected("an operator or end of input")

    return expr


def parse_poly(text: str, vartable: VarTable) -> MultiPoly:
    """
    Parses the canonical polynomial text format, e.g. `3*dt^4 - 4`.

    Division is accepted only by nonzero constants, so `p/q*x` coefficients read back.

    Raises:
        [cremona.errors.ParseError][] on malformed text or a non-polynomial expression.
        [cremona.errors.UnknownNameError][] on a name missing from the table.

    """
    expr = parse_ratfunc(text, vartable)
    if not expr.is_polynomial:
        raise ParseError(f"{text.strip()!r} is not a polynomial", 1, 1, text.split("\n")[0])

    return expr.as_poly()


def parse_rational(text: str) -> Fraction:
    """
    Parses an exact rational written as `p` or `p/q`; decimals are refused.

    Raises:
        [cremona.errors.UsageError][] on anything else, including a zero denominator.

    """
    match = _RATIONAL.fullmatch(text)
    if match is None:
        raise UsageError(f"{text!r} is not an exact rational (write p or p/q, e.g. 1/2)")

    numerator, denominator = match.groups()
    if denominator is not None and int(denominator) == 0:
        raise UsageError(f"{text!r} has a zero denominator")

    return Fraction(int(numerator), int(denominator or 1))


def format_poly(poly: MultiPoly) -> str:
    return poly.format()
