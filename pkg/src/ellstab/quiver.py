"""Cyclic quiver data: tautological bundles, tangent characters, chambers,
polarizations and the box order used by the stable envelope formula.

Laurent characters are plain ``ThetaExpr`` values without theta factors.
"""

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import GenericityError, ValidationError
from .monomial import T1_RANK, T2_RANK, U_RANK, X_RANK, Monomial, hbar, mul_exps, scale_exps, t1, t2, u, x
from .partitions import FixedPoint, _check_dims, enumerate_fixed_points, residue
from .theta import ThetaExpr, format_exps, substitute


@dataclass(frozen=True)
class QuiverData:
    v: tuple
    w: tuple

    def __init__(self, v, w):
        v, w = _check_dims(v, w)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)

    @property
    def r(self):
        return len(self.v)

    def framing_slots(self):
        return [(i, j) for i in range(1, self.r + 1) for j in range(1, self.w[i - 1] + 1)]

    def succ(self, i):
        return i % self.r + 1

    def validate_point(self, p):
        slots = [(lp.vertex, lp.slot) for lp in p]
        if slots != self.framing_slots():
            raise ValidationError("fixed point %s does not match framing %s" % (p, list(self.w)))
        if p.residue_counts(self.r) != list(self.v):
            raise ValidationError("fixed point %s does not have dimension vector %s" % (p, list(self.v)))


def linear_quiver(v, w):
    """Affine data for a linear quiver: one extra vertex with v = w = 0."""
    return QuiverData(tuple(v) + (0,), tuple(w) + (0,))


# -- chambers and polarizations -------------------------------------------------

@dataclass(frozen=True)
class Chamber:
    """``t_order[0]`` is repelling; later framing variables dominate earlier ones."""

    t_order: tuple
    u_order: tuple

    @property
    def t_minus(self):
        return self.t_order[0]

    @property
    def t_plus(self):
        return self.t_order[1]

    @property
    def sigma_a(self):
        return 1 if self.t_minus == t2 else -1

    def position(self, slot):
        return self.u_order.index(slot)

    def to_text(self):
        return "[%s]" % ",".join([str(self.t_order[0]), str(self.t_order[1])] + ["u[%d,%d]" % s for s in self.u_order])

    def to_json(self):
        return [str(self.t_order[0]), str(self.t_order[1])] + ["u[%d,%d]" % s for s in self.u_order]


_CHAMBER_ITEM = re.compile(r"t\[?([12])\]?|u\[(\d+),(\d+)\]")


def parse_chamber(text, d=None):
    """Parse ``[t2,t1,u[1,1],...]`` (Maple ``t[2]`` spelling also accepted)."""
    if isinstance(text, Chamber):
        chamber = text
    else:
        body = text.replace(" ", "")
        items = []
        pos = 0
        while pos < len(body):
            if body[pos] in ",[]":
                pos += 1
                continue
            m = _CHAMBER_ITEM.match(body, pos)
            if not m:
                raise ValidationError("cannot parse chamber %r near %r" % (text, body[pos:]))
            if m.group(1):
                items.append(t1 if m.group(1) == "1" else t2)
            else:
                items.append((int(m.group(2)), int(m.group(3))))
            pos = m.end()
        ts = [a for a in items if a in (t1, t2)]
        if len(ts) != 2 or set(ts) != {t1, t2} or items[:2] != ts:
            raise ValidationError("chamber must start with t1,t2 in some order: %r" % text)
        chamber = Chamber(tuple(ts), tuple(items[2:]))
    if d is not None:
        if sorted(chamber.u_order) != d.framing_slots() or len(set(chamber.u_order)) != len(chamber.u_order):
            raise ValidationError(
                "chamber must list every framing variable exactly once; expected %s"
                % ", ".join("u[%d,%d]" % s for s in d.framing_slots())
            )
    return chamber


def chamber_example(d):
    return Chamber((t2, t1), tuple(d.framing_slots()))


def parse_arrows(text, d=None):
    """Parse ``[[1,-1,1],[-1,1,1],[-1,-1,1]]``."""
    if isinstance(text, str):
        try:
            data = json.loads(text)
        except ValueError:
            raise ValidationError("cannot parse arrows %r" % text) from None
    else:
        data = text
    if not isinstance(data, (list, tuple)) or len(data) != 3 or not all(isinstance(row, (list, tuple)) for row in data):
        raise ValidationError("arrows must be three lists: %r" % (text,))
    rows = tuple(tuple(row) for row in data)
    for row in rows:
        for a in row:
            if a not in (1, -1) or isinstance(a, bool):
                raise ValidationError("arrows entries must be 1 or -1: %r" % (text,))
    if len({len(row) for row in rows}) != 1:
        raise ValidationError("arrows rows have different lengths: %r" % (text,))
    if d is not None and len(rows[0]) != d.r:
        raise ValidationError("arrows rows must have length %d" % d.r)
    return rows


def pol_example(d):
    return tuple(tuple([1] * d.r) for _ in range(3))


def format_arrows(arrows):
    return "[%s]" % ",".join("[%s]" % ",".join(str(a) for a in row) for row in arrows)


# -- bundles and characters -----------------------------------------------------

def tautological_bundle(d, i):
    """Chern roots of V_i as a list of exponent tuples."""
    if not 1 <= i <= d.r:
        raise ValidationError("vertex %d out of range 1..%d" % (i, d.r))
    return [((x(i, k), Fraction(1)),) for k in range(1, d.v[i - 1] + 1)]


def framing_bundle(d, i):
    return [((u(i, j), Fraction(1)),) for j in range(1, d.w[i - 1] + 1)]


def _hom(a, b, weight=(), coeff=1):
    """Terms of weight * Hom(A, B) = weight * sum b / a."""
    return [(coeff, mul_exps(weight, mul_exps(bb, scale_exps(aa, -1)))) for aa in a for bb in b]


_T2 = ((t2, Fraction(1)),)
_T1 = ((t1, Fraction(1)),)
_H = ((t1, Fraction(1)), (t2, Fraction(1)))


def virtual_tangent_terms(d):
    """Uncancelled ``(coeff, exps)`` terms of the virtual tangent space."""
    terms = []
    for i in range(1, d.r + 1):
        vi, vn = tautological_bundle(d, i), tautological_bundle(d, d.succ(i))
        terms += _hom(vi, vn, _T2) + _hom(vn, vi, _T1)
    for i in range(1, d.r + 1):
        vi, wi = tautological_bundle(d, i), framing_bundle(d, i)
        terms += _hom(wi, vi) + _hom(vi, wi, _H)
    for i in range(1, d.r + 1):
        vi = tautological_bundle(d, i)
        terms += _hom(vi, vi, (), -1) + _hom(vi, vi, _H, -1)
    return terms


def character(terms):
    return ThetaExpr.from_terms((Fraction(c), exps, ()) for c, exps in terms)


def virtual_tangent_space(d):
    return character(virtual_tangent_terms(d))


def polarization_terms(d, arrows):
    """Uncancelled terms of T^(1/2) selected by ``arrows``."""
    arrows = parse_arrows(arrows, d)
    terms = []
    for i in range(1, d.r + 1):
        vi, vn = tautological_bundle(d, i), tautological_bundle(d, d.succ(i))
        terms += _hom(vi, vn, _T2) if arrows[0][i - 1] == 1 else _hom(vn, vi, _T1)
    for i in range(1, d.r + 1):
        vi, wi = tautological_bundle(d, i), framing_bundle(d, i)
        terms += _hom(wi, vi) if arrows[1][i - 1] == 1 else _hom(vi, wi, _H)
    for i in range(1, d.r + 1):
        vi = tautological_bundle(d, i)
        terms += _hom(vi, vi, (), -1) if arrows[2][i - 1] == 1 else _hom(vi, vi, _H, -1)
    return terms


def polarization(d, arrows):
    return character(polarization_terms(d, arrows))


def dual_times_hbar(ch):
    """hbar * (character)^dual."""
    return ThetaExpr.from_terms((c, mul_exps(_H, scale_exps(exps, -1)), ()) for c, exps, _ in ch.terms())


# -- fixed points -----------------------------------------------------------------

def box_weight(lp, box):
    bx, by = box
    return Monomial(1, {t1: 1 - by, t2: 1 - bx, u(lp.vertex, lp.slot): 1})


def root_assignment(d, p):
    """Map (part index, box) -> Chern root, boxes of each residue sorted by (part, x, y)."""
    d.validate_point(p)
    counters = [0] * d.r
    out = {}
    for k, b in p.all_boxes():
        i = residue(p[k].content(b), d.r)
        counters[i - 1] += 1
        out[(k, b)] = x(i, counters[i - 1])
    return out


def restrict_map(d, p):
    """Chern root -> box weight at the fixed point ``p``."""
    roots = root_assignment(d, p)
    return {root: box_weight(p[k], b) for (k, b), root in roots.items()}


def format_restrict_map(mapping):
    return "{%s}" % ", ".join("%s = %s" % (v, mapping[v]) for v in sorted(mapping))


def restrict_terms(terms, mapping):
    """Restrict ``(coeff, exps)`` terms and cancel equal monomials."""
    acc = {}
    for c, exps in terms:
        m = Monomial(1, exps).subs(mapping)
        acc[m.exps] = acc.get(m.exps, 0) + c * m.coeff
    return {e: c for e, c in acc.items() if c}


def tangent_space_at(d, p):
    """T-character of the tangent space at ``p``.

    Coefficients are positive; they can exceed 1 when r = 1, e.g. t1 and t2
    both occur twice at the partition (2, 1) of the Hilbert scheme of 3 points.
    """
    acc = restrict_terms(virtual_tangent_terms(d), restrict_map(d, p))
    bad = {e: c for e, c in acc.items() if c < 0}
    if bad:
        raise AssertionError(
            "tangent character at %s has coefficients %s" % (p, {format_exps(e): str(c) for e, c in bad.items()})
        )
    return ThetaExpr.from_terms((Fraction(c), e, ()) for e, c in acc.items())


# -- chamber pairing --------------------------------------------------------------

def pairing_sign(exps, chamber):
    """Sign of <sigma, weight> for a weight in t1, t2, u (and nothing else).

    Framing components dominate in ``u_order`` (the latest variable wins);
    the a-component decides only for framing-free weights.  hbar-only weights
    pair to zero.
    """
    best = None
    a1 = a2 = Fraction(0)
    for v, e in exps:
        if v.rank == U_RANK:
            pos = chamber.position(v.idx)
            if best is None or pos > best[0]:
                best = (pos, e)
        elif v.rank == T1_RANK:
            a1 = e
        elif v.rank == T2_RANK:
            a2 = e
        else:
            raise ValidationError("weight %s contains %s" % (format_exps(exps), v))
    if best is not None:
        return 1 if best[1] > 0 else -1
    m = chamber.sigma_a * (a1 - a2)
    return (m > 0) - (m < 0)


def split_attracting(ch, chamber):
    """``(attracting, repelling)`` parts of a Laurent character."""
    att, rep = [], []
    for c, exps, factors in ch.terms():
        s = pairing_sign(exps, chamber)
        if s == 0:
            raise GenericityError("weight %s pairs to zero with the chamber" % format_exps(exps), weight=exps)
        (att if s > 0 else rep).append((c, exps, factors))
    return ThetaExpr.from_terms(att), ThetaExpr.from_terms(rep)


@dataclass(frozen=True, order=True)
class RhoKey:
    """Exact lexicographic realization of the box order."""

    f: int
    m: int
    h: Fraction

    def plus_one(self):
        return RhoKey(self.f, self.m + 1, self.h)


def rho_key(weight, chamber):
    f = None
    for v, e in weight.exps:
        if v.rank == U_RANK:
            f = chamber.position(v.idx)
    a1, a2 = weight.degree(t1), weight.degree(t2)
    return RhoKey(f, int(chamber.sigma_a * (a1 - a2)), (a1 + a2) / 2)


def orientation(chamber, r):
    """``(t_plus, t_minus, tail, head)``; tail/head act on the pair (i, i+1)."""
    forward = chamber.t_minus == t2

    def tail(i):
        return (i - 1) % r + 1 if forward else i % r + 1

    def head(i):
        return i % r + 1 if forward else (i - 1) % r + 1

    return chamber.t_plus, chamber.t_minus, tail, head


def index_exponents(d, p, arrows, chamber):
    """Exponent d_a of x_a in det of the attracting part of T^(1/2), per box.

    Keys are ``(part index, box)``.  Terms restricting to weights that pair
    to zero are stationary and contribute nothing.
    """
    roots = root_assignment(d, p)
    mapping = {root: box_weight(p[k], b) for (k, b), root in roots.items()}
    total = {}
    for c, exps in polarization_terms(d, arrows):
        w = Monomial(1, exps).subs(mapping)
        s = pairing_sign(w.exps, chamber)
        if s == 0:
            # same epsilon tie-break as the box order: positive hbar-degree attracts
            s = w.degree(t1) + w.degree(t2)
        if s > 0:
            for v, e in exps:
                if v.rank == X_RANK:
                    total[v] = total.get(v, 0) + c * e
    return {key: int(total.get(root, 0)) for key, root in roots.items()}


def det_polarization_at(d, p, arrows):
    """det of T^(1/2) restricted to ``p``, a monomial."""
    acc = restrict_terms(polarization_terms(d, arrows), restrict_map(d, p))
    exps = ()
    for e, c in acc.items():
        exps = mul_exps(exps, scale_exps(e, c))
    return Monomial(1, exps)


def box_keys(d, p, chamber):
    return {(k, b): rho_key(box_weight(p[k], b), chamber) for k, b in p.all_boxes()}


def fixed_point_key(d, p, chamber):
    """Pairing of the chamber with det V at ``p``, slot by slot.

    Framing variables are weighted by their position in ``u_order``; this is
    one generic cocharacter of the chamber, so the key refines the attraction
    order.  Ties are broken by the a-pairing, then by the hbar-degree.
    """
    keys = box_keys(d, p, chamber).values()
    return (sum(k.f for k in keys), sum(k.m for k in keys), sum(k.h for k in keys))


def order_fixed_points(points, d, chamber):
    """Sort fixed points so the restriction matrix is upper triangular."""
    def key(p):
        f, m, h = fixed_point_key(d, p, chamber)
        return (-f, -m, -h, p.to_text())

    return sorted(points, key=key)


def fixed_points(d, chamber=None):
    points = enumerate_fixed_points(d.v, d.w)
    if chamber is None:
        return points
    return order_fixed_points(points, d, chamber)


def parse_fixed_point(text, d):
    """A fixed point from its text/JSON form, e.g. ``[[[],1,1],[[1,1],2,1]]``."""
    try:
        data = json.loads(text) if isinstance(text, str) else text
        p = FixedPoint.from_json(data)
    except (ValueError, TypeError):
        raise ValidationError("cannot parse fixed point %r" % (text,)) from None
    d.validate_point(p)
    return p


def linear_specialization():
    """Substitution t2 -> 1, t1 -> hbar used for linear quivers."""
    return {t2: Monomial(1), t1: Monomial.var(hbar)}


def specialize_linear(e):
    return substitute(e, linear_specialization())
