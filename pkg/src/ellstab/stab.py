"""The elliptic stable envelope formula, restriction matrices and the
K-theoretic limit."""

from fractions import Fraction
from itertools import permutations, product

from .errors import GenericityError, PoleError, ValidationError
from .monomial import Monomial, q, t1, t2, u, x, z
from .partitions import kappa, residue, subtree_boxes, tree_tuples
from .quiver import (
    RhoKey,
    box_keys,
    box_weight,
    det_polarization_at,
    fixed_points,
    index_exponents,
    orientation,
    parse_arrows,
    parse_chamber,
    restrict_map,
    root_assignment,
    specialize_linear,
)
from .theta import THETA, ThetaExpr, normal_form, phi2, q_limit, quasi_period_factor, substitute

_HBAR = Monomial(1, {t1: 1, t2: 1})


def _theta(m):
    return ThetaExpr.factor(THETA, m)


class StabContext:
    """Everything the formula needs about one fixed point."""

    def __init__(self, d, p, chamber, arrows):
        self.d = d
        self.p = p
        self.chamber = parse_chamber(chamber, d)
        self.arrows = parse_arrows(arrows, d)
        d.validate_point(p)
        self.roots = root_assignment(d, p)
        self.boxes = list(self.roots)
        self.weights = {a: box_weight(p[a[0]], a[1]) for a in self.boxes}
        self.keys = box_keys(d, p, self.chamber)
        self.residues = {a: residue(p[a[0]].content(a[1]), d.r) for a in self.boxes}
        self.t_plus, self.t_minus, self.tail, self.head = orientation(self.chamber, d.r)
        self.index = index_exponents(d, p, self.arrows, self.chamber)

    def xa(self, a):
        return Monomial.var(self.roots[a])

    def root_key(self, k):
        """Key of the corner box of part ``k`` (of the bare framing weight if empty)."""
        lp = self.p[k]
        if lp.size:
            return self.keys[(k, (1, 1))]
        return RhoKey(self.chamber.position((lp.vertex, lp.slot)), 0, Fraction(0))


def s1(ctx):
    out = ThetaExpr.one()
    tp, tm = Monomial.var(ctx.t_plus), Monomial.var(ctx.t_minus)
    for i in range(1, ctx.d.r + 1):
        ti, hi = ctx.tail(i), ctx.head(i)
        for a in ctx.boxes:
            if ctx.residues[a] != ti:
                continue
            ka1 = ctx.keys[a].plus_one()
            for b in ctx.boxes:
                if ctx.residues[b] != hi:
                    continue
                kb = ctx.keys[b]
                if ka1 < kb:
                    out = out * _theta(tp * ctx.xa(a) / ctx.xa(b))
                elif kb < ka1:
                    out = out * _theta(tm * ctx.xa(b) / ctx.xa(a))
                else:
                    raise GenericityError("boxes %s and %s are not separated by the chamber" % (a, b))
    return out


def s2(ctx):
    out = ThetaExpr.one()
    for k, lp in enumerate(ctx.p):
        uij = Monomial.var(u(lp.vertex, lp.slot))
        rk = ctx.root_key(k)
        for a in ctx.boxes:
            if ctx.residues[a] != lp.vertex:
                continue
            if ctx.keys[a] <= rk:
                out = out * _theta(ctx.xa(a) / uij)
            else:
                out = out * _theta(_HBAR * uij / ctx.xa(a))
    return out


def s3(ctx):
    out = ThetaExpr.one()
    for a in ctx.boxes:
        for b in ctx.boxes:
            if a != b and ctx.residues[a] == ctx.residues[b] and ctx.keys[a] < ctx.keys[b]:
                ratio = ctx.xa(a) / ctx.xa(b)
                out = out * _theta(ratio) * _theta(_HBAR * ratio)
    return out


def _kahler(ctx, k, tree, box):
    m = Monomial(1)
    for b in subtree_boxes(tree, box):
        a = (k, b)
        m = m * Monomial.var(z(ctx.residues[a])) * _HBAR ** ctx.index[a]
    return m


def w_tree(ctx, k, tree):
    """Tree weight of part ``k`` for the admissible tree ``tree``."""
    if not ctx.p[k].size:
        return ThetaExpr.one()
    root = (k, (1, 1))
    try:
        out = phi2(ctx.xa(root) / ctx.weights[root], _kahler(ctx, k, tree, (1, 1)))
        for tb, hb in tree.sorted_edges():
            ta, ha = (k, tb), (k, hb)
            arg = ctx.xa(ha) * ctx.weights[ta] / (ctx.xa(ta) * ctx.weights[ha])
            out = out * phi2(arg, _kahler(ctx, k, tree, hb))
    except PoleError as exc:
        raise PoleError("tree weight of part %d: %s" % (k + 1, exc), argument=exc.argument) from None
    if kappa(tree) % 2:
        out = -out
    return out


def unsymmetrized(ctx):
    """S1 * S2 / S3 * sum over tree tuples of the product of tree weights."""
    trees = ThetaExpr.zero()
    for tt in tree_tuples(ctx.p):
        term = ThetaExpr.one()
        for k, tree in enumerate(tt):
            term = term * w_tree(ctx, k, tree)
        trees = trees + term
    return s1(ctx) * s2(ctx) / s3(ctx) * trees


def root_permutations(d):
    """Substitutions x[i,k] -> x[i,pi(k)], one per tuple of permutations."""
    per_vertex = [list(permutations(range(1, d.v[i] + 1))) for i in range(d.r)]
    for choice in product(*per_vertex):
        yield {
            x(i + 1, k): Monomial.var(x(i + 1, pk))
            for i, perm in enumerate(choice)
            for k, pk in enumerate(perm, 1)
            if k != pk
        }


def stab(d, p, arrows, chamber):
    """Off-shell elliptic stable envelope of ``p``, normal-formed."""
    ctx = StabContext(d, p, chamber, arrows)
    base = unsymmetrized(ctx)
    total = ThetaExpr.zero()
    for sigma in root_permutations(d):
        total = total + (substitute(base, sigma) if sigma else base)
    return normal_form(total)


def _compose(sigma, mapping):
    return {v: mapping[sigma[v].variables[0]] if v in sigma else mapping[v] for v in mapping}


def restrict_unsymmetrized(d, base, point):
    """Restriction of the symmetrized ``base`` to the fixed point ``point``."""
    mapping = restrict_map(d, point)
    total = ThetaExpr.zero()
    for sigma in root_permutations(d):
        total = total + substitute(base, _compose(sigma, mapping))
    return normal_form(total)


def stab_restricted(d, p, arrows, chamber, point):
    ctx = StabContext(d, p, chamber, arrows)
    return restrict_unsymmetrized(d, unsymmetrized(ctx), point)


def stab_matrix(d, arrows, chamber, entries=None):
    """``(order, rows)`` of restrictions; ``entries`` limits to given (i, j) (0-based)."""
    order = fixed_points(d, parse_chamber(chamber, d))
    rows = [[None] * len(order) for _ in order]
    for i, j, e in iter_stab_matrix(d, arrows, chamber, entries):
        rows[i][j] = e
    return order, rows


def iter_stab_matrix(d, arrows, chamber, entries=None):
    """Yield ``(i, j, entry)`` as entries are computed, row by row."""
    chamber = parse_chamber(chamber, d)
    order = fixed_points(d, chamber)
    wanted = set(entries) if entries is not None else None
    for i, p in enumerate(order):
        cols = [j for j in range(len(order)) if wanted is None or (i, j) in wanted]
        if not cols:
            continue
        base = unsymmetrized(StabContext(d, p, chamber, arrows))
        for j in cols:
            yield i, j, restrict_unsymmetrized(d, base, order[j])


def thom_class(ch):
    """prod theta(m)^c over the terms c*m of a Laurent character."""
    out = ThetaExpr.one()
    for c, exps, factors in ch.terms():
        if factors:
            raise ValidationError("thom_class needs a Laurent character")
        if c.denominator != 1:
            raise ValidationError("thom_class needs integer coefficients, got %s" % c)
        out = out * ThetaExpr.factor(THETA, exps, int(c))
    return normal_form(out)


def quasiperiods_of_stab(d, p, arrows, chamber):
    """Quasi-period factor of the stable envelope in every x, u and z variable.

    Chern roots are measured on the identity summand of the symmetrization
    (other summands are its images under relabeling); framing and Kahler
    variables on the full off-shell envelope.
    """
    ctx = StabContext(d, p, chamber, arrows)
    base = normal_form(unsymmetrized(ctx))
    full = stab(d, p, arrows, chamber)
    out = {}
    for i in range(1, d.r + 1):
        for k in range(1, d.v[i - 1] + 1):
            out[x(i, k)] = quasi_period_factor(base, x(i, k))
    for i, j in d.framing_slots():
        out[u(i, j)] = quasi_period_factor(full, u(i, j))
    for i in range(1, d.r + 1):
        out[z(i)] = quasi_period_factor(full, z(i))
    return out


# -- K-theory limit ---------------------------------------------------------------

def slope_shift(slope):
    """z_i -> z_i q^(s_i).

    This sign reproduces the reference K-theoretic matrices at both a generic
    slope and the wall s = 1/2; the opposite sign agrees only at generic slopes.
    """
    return {
        z(i): Monomial(1, {z(i): 1, q: Fraction(s)})
        for i, s in enumerate(slope, 1)
        if Fraction(s)
    }


def _k_limit(e, det, slope, linear):
    shifted = substitute(e, slope_shift(slope)) if any(Fraction(s) for s in slope) else e
    scaled = normal_form(shifted * ThetaExpr.from_monomial(det ** Fraction(-1, 2)))
    out = q_limit(scaled)
    return specialize_linear(out) if linear else out


def _check_slope(d, slope):
    slope = [Fraction(s) for s in slope]
    if len(slope) != d.r:
        raise ValidationError("slope must have %d entries" % d.r)
    return slope


def k_stab(d, p, arrows, chamber, slope, linear=False):
    """Off-shell K-theoretic stable envelope for the slope ``slope``."""
    slope = _check_slope(d, slope)
    det = det_polarization_at(d, p, arrows)
    return _k_limit(stab(d, p, arrows, chamber), det, slope, linear)


def iter_k_stab_matrix(d, arrows, chamber, slope, linear=False, entries=None):
    slope = _check_slope(d, slope)
    chamber = parse_chamber(chamber, d)
    order = fixed_points(d, chamber)
    dets = {}
    for i, j, e in iter_stab_matrix(d, arrows, chamber, entries):
        if i not in dets:
            dets[i] = det_polarization_at(d, order[i], arrows)
        yield i, j, _k_limit(e, dets[i], slope, linear)


def k_stab_matrix(d, arrows, chamber, slope, linear=False, entries=None):
    chamber = parse_chamber(chamber, d)
    order = fixed_points(d, chamber)
    n = len(order)
    rows = [[None] * n for _ in range(n)]
    for i, j, e in iter_k_stab_matrix(d, arrows, chamber, slope, linear, entries):
        rows[i][j] = e
    return order, rows
