"""Parser for the expression text grammar.

Accepts what :func:`ellstab.theta.format_expr` prints plus Maple-flavoured
input (``t[1]``, ``theta(q*a)+theta(b/q)``, ``sqrt(q)``)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' exponent)?
    atom   := INT | NAME index? | FUNC '(' expr ')' | '(' expr ')'
"""

import re
from fractions import Fraction

from .errors import ValidationError
from .monomial import Monomial, var_from_name
from .theta import KIND_CODES, ThetaExpr

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\[[0-9,\s]*\])|(\*\*|[-+*/^()]))")


def _tokenize(text):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValidationError("unexpected character at %d in %r" % (pos, text))
        num, name, idx, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name))
        elif idx is not None:
            out.append(("idx", idx))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ValidationError("parse error near token %d in %r" % (self.i, self.text))
        self.i += 1
        return tok

    def parse(self):
        e = self.expr()
        if self.i != len(self.toks):
            raise ValidationError("trailing input in %r" % self.text)
        return e

    def expr(self):
        e = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            e = e * rhs if op == "*" else e / rhs
        return e

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def exponent(self):
        tok = self.peek()
        if tok == ("op", "("):
            self.take()
            e = self.expr()
            self.take("op", ")")
            m = e.as_monomial()
            if m.exps:
                raise ValidationError("exponent must be a rational number")
            return m.coeff
        if tok == ("op", "-"):
            self.take()
            return -Fraction(self.take("num")[1])
        return Fraction(self.take("num")[1])

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            base = base ** self.exponent()
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return ThetaExpr.constant(int(val))
        if kind == "op" and val == "(":
            self.take()
            e = self.expr()
            self.take("op", ")")
            return e
        if kind == "name":
            self.take()
            if val in KIND_CODES or val == "sqrt":
                self.take("op", "(")
                inner = self.expr()
                self.take("op", ")")
                if val == "sqrt":
                    return inner ** Fraction(1, 2)
                m = inner.as_monomial()
                return ThetaExpr.factor(KIND_CODES[val], m)
            if self.peek()[0] == "idx":
                val = val + self.take()[1]
            return ThetaExpr.from_monomial(Monomial.var(var_from_name(val)))
        raise ValidationError("parse error near token %d in %r" % (self.i, self.text))


def parse_expr(text):
    """Parse text into a raw (not normal-formed) ThetaExpr."""
    return _Parser(text).parse()


def parse_monomial(text):
    return parse_expr(text).as_monomial()
