"""Formal sums of monomials times products of theta/pochhammer symbols.

Three factor kinds are understood:

``THETA``  theta(x) = (x^(1/2) - x^(-1/2)) phi(q x) phi(q / x)
``PHI``    phi(x)   = prod_{i >= 0} (1 - x q^i)
``HAT``    hat(x)   = x^(1/2) - x^(-1/2)   (the q -> 0 shadow of theta)

A term is keyed by ``(prefactor exponents, factors)`` where ``factors`` is a
sorted tuple of ``(kind, argument exponents, power)``; the value stored under
the key is the exact rational coefficient.  Every expression is immutable.
"""

import math
import random
from fractions import Fraction

from . import kernels
from .errors import DivergenceError, DomainError, NotQuasiPeriodicError, PoleError
from .monomial import (
    Monomial,
    Q_RANK,
    exps_from_json,
    exps_to_json,
    format_exps,
    format_monomial,
    format_power,
    mul_exps,
    q as Q,
    scale_exps,
)

THETA, PHI, HAT = 0, 1, 2
KIND_NAMES = {THETA: "theta", PHI: "phi", HAT: "hat"}
KIND_CODES = {v: k for k, v in KIND_NAMES.items()}

_HALF = Fraction(1, 2)


def _split_q(exps):
    """Return (q exponent, remaining exponents)."""
    if exps and exps[0][0].rank == Q_RANK:
        return exps[0][1], exps[1:]
    return Fraction(0), exps


def _with_q(beta, rest):
    if beta:
        return ((Q, Fraction(beta)),) + rest
    return rest


def _orient(kind, arg):
    """Canonical orientation; returns (flipped, arg).

    theta: the first non-q variable gets a positive exponent (pure q-powers:
    the q exponent).  hat: the first variable of all.  phi is never flipped.
    """
    if kind == PHI or not arg:
        return False, arg
    if kind == THETA:
        beta, rest = _split_q(arg)
        lead = rest[0][1] if rest else beta
    else:
        lead = arg[0][1]
    if lead < 0:
        return True, scale_exps(arg, -1)
    return False, arg


def _merge_factor_lists(a, b):
    if not a:
        return b
    if not b:
        return a
    d = {}
    for kind, arg, p in a:
        d[(kind, arg)] = p
    for kind, arg, p in b:
        s = d.get((kind, arg), 0) + p
        if s:
            d[(kind, arg)] = s
        else:
            del d[(kind, arg)]
    return tuple(sorted((k, a_, p) for (k, a_), p in d.items()))


class ThetaExpr:
    """Immutable sparse sum ``sum coeff * monomial * prod factor^power``."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        self._terms = {}
        if terms:
            for key, c in terms.items():
                if c:
                    self._terms[key] = Fraction(c)

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls.constant(1)

    @classmethod
    def constant(cls, c):
        return cls({((), ()): Fraction(c)}) if c else cls()

    @classmethod
    def from_monomial(cls, m):
        if m.coeff == 0:
            return cls()
        return cls({(m.exps, ()): m.coeff})

    @classmethod
    def from_terms(cls, items):
        """Build from ``(coeff, exps, factors)`` triples, summing duplicates."""
        d = {}
        for c, exps, factors in items:
            if not c:
                continue
            key = (exps, factors)
            s = d.get(key, 0) + c
            if s:
                d[key] = s
            else:
                d.pop(key, None)
        e = cls()
        e._terms = d
        return e

    @classmethod
    def factor(cls, kind, arg, power=1):
        """A single raw factor ``kind(arg)^power`` with canonical orientation only.

        ``arg`` may be a Monomial (coefficient must be 1) or an exponent tuple.
        The unit argument is kept as a symbol; :func:`normal_form` resolves it.
        """
        if isinstance(kind, str):
            kind = KIND_CODES[kind]
        if isinstance(arg, Monomial):
            if arg.coeff != 1:
                raise DomainError("%s argument must have coefficient 1, got %s" % (KIND_NAMES[kind], arg))
            arg = arg.exps
        if power == 0:
            return cls.one()
        flipped, arg = _orient(kind, arg)
        sign = -1 if (flipped and power % 2) else 1
        return cls({((), ((kind, arg, int(power)),)): Fraction(sign)})

    # -- inspection --------------------------------------------------------
    def terms(self):
        """Canonically ordered ``(coeff, Monomial-exps, factors)`` triples."""
        return [(c, exps, factors) for (exps, factors), c in sorted(self._terms.items(), key=_term_sort_key)]

    def __len__(self):
        return len(self._terms)

    def is_zero(self):
        return not self._terms

    def is_single_term(self):
        return len(self._terms) == 1

    def is_laurent(self):
        """True when no term carries a theta/phi/hat factor."""
        return all(not f for (_, f) in self._terms)

    def variables(self):
        out = set()
        for (exps, factors) in self._terms:
            out.update(v for v, _ in exps)
            for _, arg, _ in factors:
                out.update(v for v, _ in arg)
        return out

    def monomials(self):
        """For a Laurent character: list of ``(coeff, Monomial)`` (coefficient 1 monomials)."""
        if not self.is_laurent():
            raise DomainError("expression carries theta factors")
        return [(c, Monomial(1, exps)) for c, exps, _ in self.terms()]

    def as_monomial(self):
        if len(self._terms) != 1:
            raise DomainError("expression is not a single monomial: %s" % self)
        ((exps, factors), c), = self._terms.items()
        if factors:
            raise DomainError("expression is not a single monomial: %s" % self)
        return Monomial(c, exps)

    # -- algebra -------------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        d = dict(self._terms)
        for key, c in other._terms.items():
            s = d.get(key, 0) + c
            if s:
                d[key] = s
            else:
                d.pop(key, None)
        e = ThetaExpr()
        e._terms = d
        return e

    __radd__ = __add__

    def __neg__(self):
        e = ThetaExpr()
        e._terms = {k: -c for k, c in self._terms.items()}
        return e

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        d = {}
        for (e1, f1), c1 in self._terms.items():
            for (e2, f2), c2 in other._terms.items():
                key = (mul_exps(e1, e2), _merge_factor_lists(f1, f2))
                s = d.get(key, 0) + c1 * c2
                if s:
                    d[key] = s
                else:
                    d.pop(key, None)
        e = ThetaExpr()
        e._terms = d
        return e

    __rmul__ = __mul__

    def inverse(self):
        if len(self._terms) != 1:
            raise DomainError("only single-term expressions can be inverted")
        ((exps, factors), c), = self._terms.items()
        inv = tuple((k, a, -p) for k, a, p in factors)
        return ThetaExpr({(scale_exps(exps, -1), inv): 1 / c})

    def __truediv__(self, other):
        other = _coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def __pow__(self, k):
        k = Fraction(k)
        if len(self._terms) == 1:
            ((exps, factors), c), = self._terms.items()
            if k.denominator != 1:
                if factors and any((p * k).denominator != 1 for _, _, p in factors):
                    raise DomainError("non-integral power of a theta factor")
                if c != 1:
                    raise DomainError("rational power of coefficient %s" % c)
                cc = Fraction(1)
            else:
                cc = c ** int(k)
            new_f = tuple((kd, a, int(p * k)) for kd, a, p in factors)
            return ThetaExpr({(scale_exps(exps, k), new_f): cc})
        if k.denominator != 1 or k < 0:
            raise DomainError("multi-term expressions only take non-negative integer powers")
        out = ThetaExpr.one()
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ThetaExpr.constant(other)
        if not isinstance(other, ThetaExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __str__(self):
        return format_expr(self)

    def __repr__(self):
        return "ThetaExpr(%s)" % format_expr(self)

    def to_json(self):
        return {
            "terms": [
                {
                    "coeff": str(c),
                    "monomial": exps_to_json(exps),
                    "factors": [
                        {"kind": KIND_NAMES[k], "arg": exps_to_json(a), "power": p} for k, a, p in factors
                    ],
                }
                for c, exps, factors in self.terms()
            ]
        }

    @classmethod
    def from_json(cls, data):
        items = []
        for t in data["terms"]:
            factors = tuple(
                sorted((KIND_CODES[f["kind"]], exps_from_json(f["arg"]), int(f["power"])) for f in t["factors"])
            )
            items.append((Fraction(t["coeff"]), exps_from_json(t["monomial"]), factors))
        return cls.from_terms(items)


def _term_sort_key(item):
    (exps, factors), _ = item
    return (factors, exps)


def _coerce(value):
    if isinstance(value, ThetaExpr):
        return value
    if isinstance(value, Monomial):
        return ThetaExpr.from_monomial(value)
    if isinstance(value, (int, Fraction)):
        return ThetaExpr.constant(value)
    raise TypeError("cannot combine ThetaExpr with %r" % (value,))


def as_expr(value):
    return _coerce(value)


# -- printing ----------------------------------------------------------------

def format_factor(kind, arg, power):
    body = format_exps(arg) or "1"
    return "%s(%s)%s" % (KIND_NAMES[kind], body, format_power(Fraction(power)))


def format_term(c, exps, factors):
    parts = [format_factor(*f) for f in factors]
    mono = format_monomial(c, exps)
    if not parts:
        return mono
    if mono == "1":
        return "*".join(parts)
    if mono == "-1":
        return "-" + "*".join(parts)
    return mono + "*" + "*".join(parts)


def format_expr(e):
    terms = e.terms()
    if not terms:
        return "0"
    out = ""
    for i, (c, exps, factors) in enumerate(terms):
        s = format_term(c, exps, factors)
        if i == 0:
            out = s
        elif s.startswith("-"):
            out += " - " + s[1:]
        else:
            out += " + " + s
    return out


# -- public operations ---------------------------------------------------------

def theta(arg):
    """theta(arg) in normal form; theta(1) is zero."""
    if isinstance(arg, Monomial):
        if arg.coeff == 0:
            raise DomainError("theta of zero")
        if arg.coeff != 1:
            raise DomainError("theta argument must have coefficient 1, got %s" % arg)
    return normal_form(ThetaExpr.factor(THETA, arg))


def phi(arg):
    """The one-argument pochhammer symbol, normal-formed."""
    if isinstance(arg, Monomial) and arg.coeff == 0:
        raise DomainError("phi of zero")
    return normal_form(ThetaExpr.factor(PHI, arg))


def phi2(xm, zm):
    """Two-argument phi(x, z) := theta(x z) / (theta(x) theta(z)), one term."""
    for label, m in (("x", xm), ("z", zm), ("x*z", xm * zm)):
        if m.coeff != 1:
            raise DomainError("phi2 argument %s must have coefficient 1: %s" % (label, m))
        if not m.exps:
            raise PoleError("phi2 argument %s equals 1" % label, argument=m)
    return (
        ThetaExpr.factor(THETA, (xm * zm).exps)
        * ThetaExpr.factor(THETA, xm.exps, -1)
        * ThetaExpr.factor(THETA, zm.exps, -1)
    )


def _one_minus(m_exps, power):
    """(1 - m)^power = (-1)^power m^(power/2) hat(m)^power as (sign, exps, factor)."""
    flipped, arg = _orient(HAT, m_exps)
    sign = -1 if power % 2 else 1
    if flipped and power % 2:
        sign = -sign
    return sign, scale_exps(m_exps, Fraction(power, 2)), (HAT, arg, power)


def _normal_term(c, exps, factors):
    """Normal form of one term; returns a list of (coeff, exps, factors)."""
    sign = 1
    pre = exps
    new_factors = []
    unit_power = 0
    for kind, arg, p in factors:
        if kind == HAT:
            flipped, arg = _orient(HAT, arg)
            if flipped and p % 2:
                sign = -sign
            if not arg:
                unit_power += p
                continue
            new_factors.append((HAT, arg, p))
            continue
        if kind == THETA:
            flipped, arg = _orient(THETA, arg)
            if flipped and p % 2:
                sign = -sign
            beta, rest = _split_q(arg)
            if not rest and beta - math.floor(beta) > _HALF:
                # pure q-powers land in (0, 1/2]: theta(q^b) = -theta(q^-b)
                if p % 2:
                    sign = -sign
                beta = -beta
            k = math.floor(beta)
            y = _with_q(beta - k, rest)
            if k:
                # theta(q^k y) = (-1)^k q^(-k^2/2) y^(-k) theta(y)
                if (k * p) % 2:
                    sign = -sign
                pre = mul_exps(pre, ((Q, Fraction(-k * k * p, 2)),))
                pre = mul_exps(pre, scale_exps(y, -k * p))
            if not y:
                unit_power += p
                continue
            new_factors.append((THETA, y, p))
            continue
        # PHI
        beta, rest = _split_q(arg)
        if not rest:
            if beta <= 0 and beta.denominator == 1:
                unit_power += p
                continue
            k = math.ceil(beta) - 1
        else:
            k = math.floor(beta)
        y = _with_q(beta - k, rest)
        if k > 0:
            # phi(q^k y) = phi(y) / prod_{i<k} (1 - q^i y)
            for i in range(k):
                s, e, f = _one_minus(mul_exps(y, ((Q, Fraction(i)),)) if i else y, -p)
                sign *= s
                pre = mul_exps(pre, e)
                new_factors.append(f)
        elif k < 0:
            # phi(q^-n y) = phi(y) * prod_{i=1..n} (1 - q^-i y)
            for i in range(1, -k + 1):
                s, e, f = _one_minus(mul_exps(y, ((Q, Fraction(-i)),)), p)
                sign *= s
                pre = mul_exps(pre, e)
                new_factors.append(f)
        new_factors.append((PHI, y, p))
    if unit_power > 0:
        return []
    if unit_power < 0:
        raise PoleError("theta/phi/hat of 1 in a denominator", argument=Monomial(1), term=format_term(c, exps, factors))
    d = {}
    for kind, arg, p in new_factors:
        d[(kind, arg)] = d.get((kind, arg), 0) + p
    merged = tuple(sorted((k, a, p) for (k, a), p in d.items() if p))
    return [(c * sign, pre, merged)]


def normal_form(e):
    """Reduce q-powers inside every argument and canonicalize.

    theta arguments end with q-exponent in [0, 1) (pure q-powers in (0, 1/2]);
    phi arguments have their integral q-part moved into hat factors.  Terms
    that become identical are summed.  Idempotent.
    """
    e = _coerce(e)
    items = []
    for (exps, factors), c in e._terms.items():
        items.extend(_normal_term(c, exps, factors))
    return ThetaExpr.from_terms(items)


def substitute(e, mapping):
    """Replace variables everywhere (``mapping``: Var -> Monomial).

    Arguments are re-oriented but not q-reduced.  A factor whose argument
    becomes exactly 1 zeroes its term when in the numerator and raises
    :class:`PoleError` when in the denominator.
    """
    e = _coerce(e)
    for v, img in mapping.items():
        if img.coeff == 0:
            raise DomainError("substitution image of %s is zero" % (v,))
    items = []
    cache = {}
    for (exps, factors), c in e._terms.items():
        m = Monomial(c, exps).subs(mapping)
        coeff, pre = m.coeff, m.exps
        new = []
        zero = False
        for kind, arg, p in factors:
            hit = cache.get(arg)
            if hit is None:
                am = Monomial(1, arg).subs(mapping)
                if am.coeff != 1:
                    raise DomainError("substitution left a coefficient inside %s(%s)" % (KIND_NAMES[kind], am))
                hit = am.exps
                cache[arg] = hit
            flipped, new_arg = _orient(kind, hit)
            if flipped and p % 2:
                coeff = -coeff
            if not new_arg:
                if p < 0:
                    raise PoleError(
                        "%s(1) in a denominator after substitution" % KIND_NAMES[kind],
                        argument=format_exps(arg),
                        term=format_term(c, exps, factors),
                    )
                zero = True
            new.append((kind, new_arg, p))
        if zero:
            continue
        d = {}
        for kind, arg, p in new:
            d[(kind, arg)] = d.get((kind, arg), 0) + p
        merged = tuple(sorted((k, a, p) for (k, a), p in d.items() if p))
        items.append((coeff, pre, merged))
    return ThetaExpr.from_terms(items)


def quasi_period_factor(e, v):
    """Monomial m with e(v -> q v) = m * e, or NotQuasiPeriodicError."""
    e = normal_form(e)
    if e.is_zero():
        raise DomainError("quasi-period of the zero expression")
    shift = {v: Monomial(1, ((Q, Fraction(1)), (v, Fraction(1))))}
    factor = None
    for (exps, factors), c in e._terms.items():
        single = ThetaExpr({(exps, factors): c})
        shifted = normal_form(substitute(single, shift))
        if len(shifted) != 1:
            raise NotQuasiPeriodicError("shift in %s split a term" % (v,))
        ((e2, f2), c2), = shifted._terms.items()
        if f2 != factors:
            raise NotQuasiPeriodicError("not quasi-periodic in %s: factors changed" % (v,))
        ratio = Monomial(c2, e2) / Monomial(c, exps)
        if factor is None:
            factor = ratio
        elif ratio != factor:
            raise NotQuasiPeriodicError(
                "not quasi-periodic in %s: terms disagree (%s vs %s)" % (v, factor, ratio)
            )
    return factor


def q_limit(e):
    """Leading q -> 0 behaviour of a normal-formed expression.

    theta(c q^b)^p becomes hat(c)^p when b = 0 and (-c^(-1/2) q^(-b/2))^p when
    0 < b < 1; phi(c q^b) -> 1 for b > 0.  Terms with a positive total q
    exponent vanish; a negative one raises :class:`DivergenceError`.
    """
    e = _coerce(e)
    items = []
    for (exps, factors), c in e._terms.items():
        sign = 1
        pre = exps
        new = []
        for kind, arg, p in factors:
            beta, rest = _split_q(arg)
            if kind == THETA:
                if not 0 <= beta < 1:
                    raise DomainError("q_limit needs normal-formed input; got theta(%s)" % format_exps(arg))
                if beta == 0:
                    new.append((HAT, rest, p))
                else:
                    if p % 2:
                        sign = -sign
                    pre = mul_exps(pre, scale_exps(rest, Fraction(-p, 2)))
                    pre = mul_exps(pre, ((Q, -beta * p / 2),))
            elif kind == PHI:
                if beta <= 0:
                    raise DomainError("q_limit of phi(%s) is not supported" % format_exps(arg))
            else:
                if beta == 0:
                    new.append((HAT, rest, p))
                elif beta > 0:
                    if p % 2:
                        sign = -sign
                    pre = mul_exps(pre, scale_exps(rest, Fraction(-p, 2)))
                    pre = mul_exps(pre, ((Q, -beta * p / 2),))
                else:
                    pre = mul_exps(pre, scale_exps(rest, Fraction(p, 2)))
                    pre = mul_exps(pre, ((Q, beta * p / 2),))
        qexp, rest_pre = _split_q(pre)
        if qexp > 0:
            continue
        if qexp < 0:
            raise DivergenceError("term diverges like q^(%s) as q -> 0" % qexp)
        d = {}
        for kind, arg, p in new:
            flipped, arg = _orient(HAT, arg)
            if flipped and p % 2:
                sign = -sign
            if not arg:
                if p < 0:
                    raise PoleError("hat(1) in a denominator of the limit", argument=Monomial(1))
                d = None
                break
            d[(kind, arg)] = d.get((kind, arg), 0) + p
        if d is None:
            continue
        merged = tuple(sorted((k, a, p) for (k, a), p in d.items() if p))
        items.append((c * sign, rest_pre, merged))
    return ThetaExpr.from_terms(items)


# -- numerics ------------------------------------------------------------------

def _exps_value(exps, values):
    val = 1 + 0j
    for v, e in exps:
        try:
            base = values[v]
        except KeyError:
            raise DomainError("no value assigned to variable %s" % (v,)) from None
        if e.denominator == 1:
            val *= complex(base) ** int(e)
        else:
            val *= complex(base) ** float(e)
    return val


def eval_numeric(e, values, q_val, trunc=40, backend=None):
    """Evaluate with truncated products (``trunc + 1`` factors per phi).

    ``values`` maps Var -> number; ``q_val`` is the value of q, |q| < 1.
    """
    if abs(q_val) >= 1:
        raise DomainError("|q| must be < 1")
    if trunc < 1:
        raise DomainError("trunc must be positive")
    e = _coerce(e)
    values = dict(values)
    values[Q] = q_val
    term_list = list(e._terms.items())
    if not term_list:
        return 0j
    term_index, kinds, xs, sqrts, powers = [], [], [], [], []
    for t, ((exps, factors), c) in enumerate(term_list):
        for kind, arg, p in factors:
            term_index.append(t)
            kinds.append(kind)
            xs.append(_exps_value(arg, values))
            sqrts.append(_exps_value(scale_exps(arg, _HALF), values))
            powers.append(p)
    num, den = kernels.term_products(term_index, kinds, xs, sqrts, powers, len(term_list), q_val, trunc, backend)
    total = 0j
    for t, ((exps, factors), c) in enumerate(term_list):
        if den[t] == 0:
            raise ZeroDivisionError("factor in a denominator evaluates to 0")
        total += complex(c) * _exps_value(exps, values) * complex(num[t]) / complex(den[t])
    return total


def random_point(variables, rng):
    """Random positive rational values (as floats) for the given variables."""
    return {v: float(Fraction(rng.randint(2, 19), rng.randint(2, 19))) for v in sorted(variables) if v.rank != Q_RANK}


def equivalent(a, b, samples=5, q_val=0.1, trunc=40, tol=1e-9, seed=0):
    """Decide equality: canonical forms first, then numeric sampling."""
    a, b = normal_form(a), normal_form(b)
    if a == b:
        return True
    rng = random.Random(seed)
    variables = a.variables() | b.variables()
    for _ in range(samples):
        point = random_point(variables, rng)
        va, vb = eval_numeric(a, point, q_val, trunc), eval_numeric(b, point, q_val, trunc)
        if abs(va - vb) > tol * (1 + max(abs(va), abs(vb))):
            return False
    return True
