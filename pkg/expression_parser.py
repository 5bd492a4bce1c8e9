"""
Expression Parser
=================
Text in. RatExpr out. Column numbers on every error.

Grammar:
    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' ['-'] INT)?
    atom   := INT | NAME | '(' expr ')'
"""

import re
from typing import List, NamedTuple

from engine_errors import JacobiEngineError, ParseError
from exact_algebra import ConstraintContext, RatExpr

TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


class Token(NamedTuple):
    kind: str  # 'int', 'name', 'op', 'end'
    text: str
    column: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = TOKEN_RE.match(text, pos)
        if match.group(0).strip() == '':
            break
        number, name, op = match.groups()
        column = match.start(match.lastindex) + 1
        if number is not None:
            tokens.append(Token('int', number, column))
        elif name is not None:
            tokens.append(Token('name', name, column))
        elif op in '+-*/^()':
            tokens.append(Token('op', op, column))
        else:
            raise ParseError(f"unexpected character '{op}'", column)
        pos = match.end()
    tokens.append(Token('end', '', len(text) + 1))
    return tokens


class ExpressionParser:
    """Recursive-descent parser bound to one constraint context"""

    def __init__(self, context: ConstraintContext):
        self.context = context
        self.tokens: List[Token] = []
        self.pos = 0

    def parse(self, text: str) -> RatExpr:
        self.tokens = tokenize(text)
        self.pos = 0
        if self.peek.kind == 'end':
            raise ParseError("empty expression", 1)
        value = self.expr()
        if self.peek.kind != 'end':
            raise ParseError(f"unexpected '{self.peek.text}'", self.peek.column)
        return value

    @property
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def accept(self, op: str) -> bool:
        if self.peek.kind == 'op' and self.peek.text == op:
            self.pos += 1
            return True
        return False

    def expr(self) -> RatExpr:
        value = self.term()
        while True:
            if self.accept('+'):
                value = value + self.term()
            elif self.accept('-'):
                value = value - self.term()
            else:
                return value

    def term(self) -> RatExpr:
        value = self.unary()
        while True:
            if self.accept('*'):
                value = value * self.unary()
            elif self.peek.kind == 'op' and self.peek.text == '/':
                column = self.advance().column
                divisor = self.unary()
                try:
                    value = value / divisor
                except JacobiEngineError as e:
                    raise ParseError(str(e), column) from e
            else:
                return value

    def unary(self) -> RatExpr:
        if self.accept('-'):
            return -self.unary()
        if self.accept('+'):
            return self.unary()
        return self.power()

    def power(self) -> RatExpr:
        base = self.atom()
        if not self.accept('^'):
            return base
        negative = self.accept('-')
        token = self.advance()
        if token.kind != 'int':
            raise ParseError("exponent must be an integer", token.column)
        exp = int(token.text)
        try:
            return base ** (-exp if negative else exp)
        except JacobiEngineError as e:
            raise ParseError(str(e), token.column) from e

    def atom(self) -> RatExpr:
        token = self.advance()
        if token.kind == 'int':
            return self.context.const(int(token.text))
        if token.kind == 'name':
            if token.text not in self.context.variables:
                raise ParseError(f"unknown symbol '{token.text}'", token.column)
            return self.context.symbol(token.text)
        if token.kind == 'op' and token.text == '(':
            value = self.expr()
            if not self.accept(')'):
                raise ParseError("missing ')'", self.peek.column)
            return value
        if token.kind == 'end':
            raise ParseError("unexpected end of input", token.column)
        raise ParseError(f"unexpected '{token.text}'", token.column)


def parse_expression(text: str, context: ConstraintContext) -> RatExpr:
    return ExpressionParser(context).parse(text)
