"""A small language for ladder-operator expressions.

Grammar::

    expr    := term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := '-' factor | scalar | ladder | '(' expr ')' | '[' expr ',' expr ']'
    ladder  := 'a' '[' int ',' int ']' ('^'? 'dag')?
    scalar  := decimal 'i'? | 'i'

``a[k,l]`` is the annihilator for momentum index k and polarization l;
``dag`` is the physical (metric) adjoint. Complex constants are written with
``+`` and ``*``, e.g. ``(0.5 + 2i) * a[0,3]``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import scipy.sparse as sp

from .fock import FockBasis, FockError, Mode, Operator, Polarization, annihilator, as_momentum, commutator, eta_adjoint


class ParseError(ValueError):
    def __init__(self, message: str, position: int, expected: Sequence[str] = ()):
        self.position = position
        self.expected = tuple(expected)
        detail = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at position {position}{detail}")


class LexError(ParseError):
    pass


class EvalError(FockError):
    pass


class TokenKind(enum.Enum):
    IDENT = "ident"
    DAGGER = "dagger"
    PLUS = "+"
    MINUS = "-"
    STAR = "*"
    LPAREN = "("
    RPAREN = ")"
    LBRACKET = "["
    RBRACKET = "]"
    COMMA = ","
    NUMBER = "number"
    I_UNIT = "i"
    END = "end of input"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    position: int


_PUNCT = {
    "+": TokenKind.PLUS,
    "-": TokenKind.MINUS,
    "*": TokenKind.STAR,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    "[": TokenKind.LBRACKET,
    "]": TokenKind.RBRACKET,
    ",": TokenKind.COMMA,
}
_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_WORD = re.compile(r"[A-Za-z_]\w*")
_DAGGER = re.compile(r"\^\s*dag\b")


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, pos))
            pos += 1
            continue
        if ch == "^":
            m = _DAGGER.match(text, pos)
            if not m:
                raise LexError("'^' must be followed by 'dag'", pos)
            tokens.append(Token(TokenKind.DAGGER, m.group(), pos))
            pos = m.end()
            continue
        m = _NUMBER.match(text, pos)
        if m:
            tokens.append(Token(TokenKind.NUMBER, m.group(), pos))
            pos = m.end()
            continue
        m = _WORD.match(text, pos)
        if m:
            word = m.group()
            kind = {"dag": TokenKind.DAGGER, "i": TokenKind.I_UNIT}.get(word, TokenKind.IDENT)
            tokens.append(Token(kind, word, pos))
            pos = m.end()
            continue
        raise LexError(f"unexpected character {ch!r}", pos)
    tokens.append(Token(TokenKind.END, "", len(text)))
    return tokens


@dataclass(frozen=True)
class Scalar:
    value: complex


@dataclass(frozen=True)
class Ladder:
    momentum: int
    polarization: int
    dagger: bool = False


@dataclass(frozen=True)
class Sum:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Difference:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Product:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Commutator:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


Expr = Union[Scalar, Ladder, Sum, Difference, Product, Commutator, Neg]

_FACTOR_START = ("number", "i", "a[..]", "(", "[", "-")


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: TokenKind) -> Token:
        if self.tok.kind is not kind:
            raise ParseError(f"unexpected {self._describe(self.tok)}", self.tok.position, [kind.value])
        return self.advance()

    @staticmethod
    def _describe(tok: Token) -> str:
        return "end of input" if tok.kind is TokenKind.END else repr(tok.lexeme)

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind is not TokenKind.END:
            raise ParseError(f"unexpected {self._describe(self.tok)}", self.tok.position, ["+", "-", "*", "end of input"])
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind in (TokenKind.PLUS, TokenKind.MINUS):
            op = self.advance()
            rhs = self.term()
            node = Sum(node, rhs) if op.kind is TokenKind.PLUS else Difference(node, rhs)
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.tok.kind is TokenKind.STAR:
            self.advance()
            node = Product(node, self.factor())
        return node

    def factor(self) -> Expr:
        tok = self.tok
        kind = tok.kind
        if kind is TokenKind.MINUS:
            self.advance()
            return Neg(self.factor())
        if kind is TokenKind.NUMBER:
            self.advance()
            value = float(tok.lexeme)
            if self.tok.kind is TokenKind.I_UNIT:
                self.advance()
                return Scalar(complex(0.0, value))
            return Scalar(complex(value))
        if kind is TokenKind.I_UNIT:
            self.advance()
            return Scalar(1j)
        if kind is TokenKind.IDENT:
            return self.ladder()
        if kind is TokenKind.LPAREN:
            self.advance()
            node = self.expr()
            self.expect(TokenKind.RPAREN)
            return node
        if kind is TokenKind.LBRACKET:
            self.advance()
            lhs = self.expr()
            self.expect(TokenKind.COMMA)
            rhs = self.expr()
            self.expect(TokenKind.RBRACKET)
            return Commutator(lhs, rhs)
        raise ParseError(f"unexpected {self._describe(tok)}", tok.position, _FACTOR_START)

    def integer(self) -> int:
        tok = self.expect(TokenKind.NUMBER)
        if not tok.lexeme.isdigit():
            raise ParseError(f"index must be a nonnegative integer, got {tok.lexeme!r}", tok.position, ["integer"])
        return int(tok.lexeme)

    def ladder(self) -> Ladder:
        tok = self.advance()
        if tok.lexeme != "a":
            raise ParseError(f"unknown identifier {tok.lexeme!r}", tok.position, ["a"])
        self.expect(TokenKind.LBRACKET)
        k = self.integer()
        self.expect(TokenKind.COMMA)
        lam = self.integer()
        self.expect(TokenKind.RBRACKET)
        dagger = False
        if self.tok.kind is TokenKind.DAGGER:
            self.advance()
            dagger = True
        return Ladder(k, lam, dagger)


def parse(text: str) -> Expr:
    return _Parser(text).parse()


def _format_real(x: float) -> str:
    return repr(float(x))


def print_canonical(node: Expr) -> str:
    """Fully parenthesized rendering; ``parse`` maps it back to ``node``.

    Exact round trip holds for scalars that are nonnegative reals or
    nonnegative imaginaries, which is everything ``parse`` produces. Other
    complex constants render as an equivalent expression.
    """
    if isinstance(node, Scalar):
        re_, im = node.value.real, node.value.imag
        if im == 0 and re_ >= 0:
            return _format_real(abs(re_))
        if re_ == 0 and im >= 0:
            return "i" if im == 1 else f"{_format_real(im)}i"
        parts = []
        if re_ != 0:
            parts.append(_format_real(abs(re_)) if re_ > 0 else f"(-{_format_real(-re_)})")
        if im != 0:
            parts.append(f"{_format_real(abs(im))}i" if im > 0 else f"(-{_format_real(-im)}i)")
        return "(" + " + ".join(parts) + ")" if len(parts) > 1 else parts[0]
    if isinstance(node, Ladder):
        return f"a[{node.momentum},{node.polarization}]" + ("^dag" if node.dagger else "")
    if isinstance(node, Neg):
        return f"(-{print_canonical(node.operand)})"
    if isinstance(node, Commutator):
        return f"[{print_canonical(node.lhs)}, {print_canonical(node.rhs)}]"
    op = {Sum: "+", Difference: "-", Product: "*"}[type(node)]
    return f"({print_canonical(node.lhs)} {op} {print_canonical(node.rhs)})"


def ladder_degree(node: Expr) -> int:
    """Largest number of ladder operators in any product of the expansion."""
    if isinstance(node, Scalar):
        return 0
    if isinstance(node, Ladder):
        return 1
    if isinstance(node, Neg):
        return ladder_degree(node.operand)
    if isinstance(node, (Sum, Difference)):
        return max(ladder_degree(node.lhs), ladder_degree(node.rhs))
    return ladder_degree(node.lhs) + ladder_degree(node.rhs)


def evaluate(node: Expr, basis: FockBasis, momenta: Mapping[int, Sequence[float]] | Sequence[Sequence[float]]) -> Operator:
    """Assemble the operator for ``node``; ``momenta`` maps index -> 3-vector."""
    table = dict(momenta) if isinstance(momenta, Mapping) else dict(enumerate(momenta))
    cache: dict[Ladder, Operator] = {}

    def ladder(node: Ladder) -> Operator:
        if node.momentum not in table:
            raise EvalError(f"unknown momentum index {node.momentum}")
        if node.polarization not in range(4):
            raise EvalError(f"polarization {node.polarization} outside 0..3")
        key = Ladder(node.momentum, node.polarization, False)
        if key not in cache:
            mode = Mode(as_momentum(table[node.momentum]), Polarization(node.polarization))
            if not basis.has_mode(mode):
                raise EvalError(f"mode a[{node.momentum},{node.polarization}] is not in the basis")
            cache[key] = annihilator(basis, mode)
        a = cache[key]
        return eta_adjoint(basis, a) if node.dagger else a

    def walk(node: Expr) -> Operator:
        if isinstance(node, Scalar):
            return Operator(sp.identity(basis.dimension, dtype=complex, format="csr") * node.value, basis)
        if isinstance(node, Ladder):
            return ladder(node)
        if isinstance(node, Neg):
            return -walk(node.operand)
        if isinstance(node, Sum):
            return walk(node.lhs) + walk(node.rhs)
        if isinstance(node, Difference):
            return walk(node.lhs) - walk(node.rhs)
        if isinstance(node, Product):
            return walk(node.lhs) @ walk(node.rhs)
        if isinstance(node, Commutator):
            return commutator(walk(node.lhs), walk(node.rhs))
        raise TypeError(f"not an expression node: {node!r}")

    return walk(node)


__all__ = [
    "Commutator",
    "Difference",
    "EvalError",
    "Expr",
    "LexError",
    "Ladder",
    "Neg",
    "ParseError",
    "Product",
    "Scalar",
    "Sum",
    "Token",
    "TokenKind",
    "evaluate",
    "ladder_degree",
    "parse",
    "print_canonical",
    "tokenize",
]
