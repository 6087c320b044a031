"""
Recursive-descent parser for coordinate expressions.

Grammar::

    expression := term (("+" | "-") term)*
    term       := unary (("*" | "/") unary)*
    unary      := ("-" | "+") unary | power
    power      := primary ("^" exponent)?
    exponent   := ["-"] INTEGER | "(" ["-"] INTEGER ")"
    primary    := NUMBER | "i" | IDENT | IDENT "(" arguments ")" | "(" expression ")"

Identifiers are chart coordinates, the complex aliases z<k>, zb<k>, zbar<k> (bare z, zb
and zbar when n = 1), and declared parameters. ``-x^2`` parses as ``-(x^2)``.
"""
import re

from cosymcr.errors import ArityError, ExpressionSyntaxError, UnknownIdentifierError
from cosymcr.expr.expression import FUNCTIONS, I, add, conj, const, div, func, mul, neg, param, power, sub

FUNCTION_NAMES = FUNCTIONS + ("conj",)

_TOKEN = re.compile(
    r"""
    (?P<space>\s+)
  | (?P<number>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


class Token:
    __slots__ = ("kind", "text", "position")

    def __init__(self, kind, text, position):
        self.kind = kind
        self.text = text
        self.position = position

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.position})"


def tokenize(source):
    tokens = []
    position = 0
    while position < len(source):
        match = _TOKEN.match(source, position)
        if match is None:
            raise ExpressionSyntaxError(f"Unexpected character {source[position]!r}", position, source)
        kind = match.lastgroup
        if kind != "space":
            tokens.append(Token(kind, match.group(), position))
        position = match.end()
    tokens.append(Token("end", "", len(source)))
    return tokens


class ExpressionParser:
    """Parses expression strings against one chart and a set of parameter names."""

    def __init__(self, chart, parameters=()):
        self.chart = chart
        self.parameters = set(chart.parameters) | set(parameters)
        self.source = ""
        self.tokens = []
        self.pos = 0

    def parse(self, source):
        self.source = source
        self.tokens = tokenize(source)
        self.pos = 0
        if self.current.kind == "end":
            raise ExpressionSyntaxError("Empty expression", 0, source)
        result = self.expression()
        if self.current.kind != "end":
            self.error(f"Unexpected token {self.current.text!r}")
        return result

    @property
    def current(self):
        return self.tokens[self.pos]

    def peek(self, offset=1):
        index = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def error(self, message, token=None, cls=ExpressionSyntaxError):
        token = token or self.current
        raise cls(message, token.position, self.source)

    def eat(self, text):
        token = self.current
        if token.kind != "op" or token.text != text:
            found = token.text or "end of input"
            self.error(f"Expected {text!r} but found {found!r}")
        self.pos += 1
        return token

    def at_op(self, *texts):
        return self.current.kind == "op" and self.current.text in texts

    def expression(self):
        result = self.term()
        while self.at_op("+", "-"):
            op = self.current.text
            self.pos += 1
            right = self.term()
            result = add(result, right) if op == "+" else sub(result, right)
        return result

    def term(self):
        result = self.unary()
        while self.at_op("*", "/"):
            op = self.current.text
            self.pos += 1
            right = self.unary()
            result = mul(result, right) if op == "*" else div(result, right)
        return result

    def unary(self):
        if self.at_op("-"):
            self.pos += 1
            return neg(self.unary())
        if self.at_op("+"):
            self.pos += 1
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        if self.at_op("^"):
            self.pos += 1
            return power(base, self.exponent())
        return base

    def exponent(self):
        wrapped = self.at_op("(")
        if wrapped:
            self.pos += 1
        sign = 1
        if self.at_op("-"):
            sign = -1
            self.pos += 1
        token = self.current
        if token.kind != "number" or not token.text.isdigit():
            self.error("Exponent must be an integer literal")
        self.pos += 1
        if wrapped:
            self.eat(")")
        return sign * int(token.text)

    def primary(self):
        token = self.current
        if token.kind == "number":
            self.pos += 1
            return const(float(token.text))
        if token.kind == "ident":
            return self.identifier()
        if self.at_op("("):
            self.pos += 1
            inner = self.expression()
            self.eat(")")
            return inner
        found = token.text or "end of input"
        self.error(f"Unexpected {found!r}")

    def identifier(self):
        token = self.current
        name = token.text
        self.pos += 1
        if self.at_op("("):
            if name not in FUNCTION_NAMES:
                self.error(f"Unknown function '{name}'", token, UnknownIdentifierError)
            arguments = self.arguments()
            if len(arguments) != 1:
                self.error(f"{name}() takes exactly 1 argument ({len(arguments)} given)", token, ArityError)
            if name == "conj":
                return conj(arguments[0])
            return func(name, arguments[0])
        if name in FUNCTION_NAMES:
            self.error(f"Function '{name}' must be called with parentheses", token)
        return self.resolve(name, token)

    def arguments(self):
        self.eat("(")
        arguments = []
        if self.at_op(")"):
            self.pos += 1
            return arguments
        arguments.append(self.expression())
        while self.at_op(","):
            self.pos += 1
            arguments.append(self.expression())
        self.eat(")")
        return arguments

    def resolve(self, name, token):
        if name in self.chart.names:
            return self.chart.var(name)
        if name == "i":
            return I
        aliases = self.chart.aliases
        if name in aliases:
            return aliases[name]
        if name in self.parameters:
            return param(name)
        self.error(f"Unknown identifier '{name}'", token, UnknownIdentifierError)


def parse_expression(source, chart, parameters=()):
    """Parse ``source`` into an expression over ``chart``."""
    return ExpressionParser(chart, parameters).parse(source)
