"""Variables and Laurent monomials with exact rational exponents.

Exponent maps are stored as tuples of ``(Var, Fraction)`` pairs sorted by the
global variable order, with no zero entries.  This makes them hashable and
gives a canonical printed form for free.
"""

from fractions import Fraction
from typing import NamedTuple

from .errors import DomainError


class Var(NamedTuple):
    """A variable.  Tuples sort by ``rank`` first, which fixes the global order:

    q < t1 < t2 < hbar < u[i,j] < z[i] < x[i,k] < auxiliary names.
    """

    rank: int
    idx: tuple
    name: str

    def __str__(self):
        if self.rank == U_RANK:
            return "u[%d,%d]" % self.idx
        if self.rank == Z_RANK:
            return "z[%d]" % self.idx
        if self.rank == X_RANK:
            return "x[%d,%d]" % self.idx
        return self.name

    def __repr__(self):
        return "Var(%s)" % self


Q_RANK, T1_RANK, T2_RANK, HBAR_RANK, U_RANK, Z_RANK, X_RANK, AUX_RANK = range(8)

q = Var(Q_RANK, (), "q")
t1 = Var(T1_RANK, (), "t1")
t2 = Var(T2_RANK, (), "t2")
hbar = Var(HBAR_RANK, (), "hbar")


def u(i, j):
    return Var(U_RANK, (int(i), int(j)), "u")


def z(i):
    return Var(Z_RANK, (int(i),), "z")


def x(i, k):
    return Var(X_RANK, (int(i), int(k)), "x")


def sym(name):
    """Auxiliary symbol, e.g. ``sym("a")``; the reserved names map to their variables."""
    reserved = {"q": q, "t1": t1, "t2": t2, "hbar": hbar}
    if name in reserved:
        return reserved[name]
    if not name.isidentifier():
        raise DomainError("invalid symbol name %r" % name)
    return Var(AUX_RANK, (), name)


def _frac(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise DomainError("float exponents/coefficients are not exact: %r" % value)
    return Fraction(value)


def mul_exps(a, b):
    """Add two sorted exponent tuples."""
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        s = d.get(v, 0) + e
        if s:
            d[v] = s
        else:
            del d[v]
    return tuple(sorted(d.items()))


def scale_exps(a, k):
    if k == 0:
        return ()
    return tuple((v, e * k) for v, e in a)


def exps_from_dict(d):
    return tuple(sorted((v, _frac(e)) for v, e in d.items() if e != 0))


class Monomial:
    """``coeff * prod(var ** exp)`` with exact rational coefficient and exponents."""

    __slots__ = ("coeff", "exps")

    def __init__(self, coeff=1, exps=()):
        self.coeff = _frac(coeff)
        if isinstance(exps, dict):
            exps = exps_from_dict(exps)
        self.exps = tuple(exps)
        if self.coeff == 0:
            self.exps = ()

    @classmethod
    def var(cls, v, power=1):
        return cls(1, ((v, _frac(power)),)) if power else cls(1)

    @classmethod
    def one(cls):
        return cls(1)

    # -- algebra ---------------------------------------------------------
    def __mul__(self, other):
        if not isinstance(other, Monomial):
            return Monomial(self.coeff * _frac(other), self.exps)
        return Monomial(self.coeff * other.coeff, mul_exps(self.exps, other.exps))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Monomial):
            other = Monomial(_frac(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Monomial(_frac(other)) * self.inverse()

    def inverse(self):
        if self.coeff == 0:
            raise DomainError("cannot invert the zero monomial")
        return Monomial(1 / self.coeff, scale_exps(self.exps, -1))

    def __neg__(self):
        return Monomial(-self.coeff, self.exps)

    def __pow__(self, k):
        k = _frac(k)
        if k.denominator == 1:
            c = self.coeff ** int(k)
        elif self.coeff == 1:
            c = Fraction(1)
        else:
            raise DomainError("rational power of a monomial with coefficient %s" % self.coeff)
        return Monomial(c, scale_exps(self.exps, k))

    def __eq__(self, other):
        if not isinstance(other, Monomial):
            if isinstance(other, (int, Fraction)):
                return not self.exps and self.coeff == other
            return NotImplemented
        return self.coeff == other.coeff and self.exps == other.exps

    def __hash__(self):
        return hash((self.coeff, self.exps))

    # -- queries ---------------------------------------------------------
    def degree(self, v):
        for w, e in self.exps:
            if w == v:
                return e
        return Fraction(0)

    @property
    def variables(self):
        return tuple(v for v, _ in self.exps)

    def is_unit(self):
        return self.coeff == 1 and not self.exps

    def is_zero(self):
        return self.coeff == 0

    def subs(self, mapping):
        """Replace variables by monomials (``mapping``: Var -> Monomial)."""
        coeff = self.coeff
        out = []
        for v, e in self.exps:
            img = mapping.get(v)
            if img is None:
                out.append(((v, e),))
                continue
            if img.coeff != 1:
                if e.denominator != 1:
                    raise DomainError("rational power of substituted coefficient %s" % img.coeff)
                coeff *= img.coeff ** int(e)
            out.append(scale_exps(img.exps, e))
        exps = ()
        for part in out:
            exps = mul_exps(exps, part)
        return Monomial(coeff, exps)

    def evaluate(self, values):
        val = complex(self.coeff)
        for v, e in self.exps:
            try:
                base = values[v]
            except KeyError:
                raise DomainError("no value assigned to variable %s" % (v,)) from None
            val *= _cpow(base, e)
        return val

    # -- printing --------------------------------------------------------
    def __str__(self):
        return format_monomial(self.coeff, self.exps)

    def __repr__(self):
        return "Monomial(%s)" % self

    def to_json(self):
        return {"coeff": str(self.coeff), "exps": exps_to_json(self.exps)}


def _cpow(base, e):
    if e.denominator == 1:
        return complex(base) ** int(e)
    return complex(base) ** float(e)


def format_power(e):
    if e == 1:
        return ""
    if e.denominator == 1 and e > 0:
        return "^%d" % e
    return "^(%s)" % e


def format_exps(exps):
    return "*".join("%s%s" % (v, format_power(e)) for v, e in exps)


def format_monomial(coeff, exps):
    body = format_exps(exps)
    if not body:
        return str(coeff)
    if coeff == 1:
        return body
    if coeff == -1:
        return "-" + body
    return "%s*%s" % (coeff, body)


def exps_to_json(exps):
    return {str(v): str(e) for v, e in exps}


def var_from_name(name):
    """Inverse of ``str(Var)``; accepts Maple-style ``t[1]`` as well."""
    name = name.replace(" ", "")
    if "[" in name:
        head, rest = name.split("[", 1)
        idx = tuple(int(s) for s in rest.rstrip("]").split(","))
        if head == "t" and len(idx) == 1 and idx[0] in (1, 2):
            return t1 if idx[0] == 1 else t2
        if head == "u" and len(idx) == 2:
            return u(*idx)
        if head == "x" and len(idx) == 2:
            return x(*idx)
        if head == "z" and len(idx) == 1:
            return z(*idx)
        raise DomainError("unknown indexed variable %r" % name)
    return sym(name)


def exps_from_json(d):
    return exps_from_dict({var_from_name(k): Fraction(v) for k, v in d.items()})
