import random
from fractions import Fraction

import pytest

from ellstab.errors import GenericityError, ValidationError
from ellstab.monomial import Monomial, t1, t2, u, x
from ellstab.parse import parse_expr
from ellstab.partitions import enumerate_fixed_points
from ellstab.quiver import (
    QuiverData,
    RhoKey,
    box_weight,
    chamber_example,
    dual_times_hbar,
    fixed_points,
    index_exponents,
    orientation,
    parse_arrows,
    parse_chamber,
    parse_fixed_point,
    pol_example,
    polarization,
    restrict_map,
    rho_key,
    split_attracting,
    tangent_space_at,
    virtual_tangent_space,
    virtual_tangent_terms,
)
from ellstab.theta import ThetaExpr

import oracles

D223 = QuiverData([2, 2, 3], [2, 1, 0])
CH223 = "[t[2],t[1],u[1,1],u[1,2],u[2,1]]"

TANGENT_FIRST = oracles.golden("tangent_223_first.txt")[0]
ATTRACTING_FIRST = oracles.golden("attracting_223_first.txt")[0]
REPELLING_FIRST = oracles.golden("repelling_223_first.txt")[0]
TANGENT_11 = oracles.golden("tangent_11_first.txt")[0]

SUITE = [([1], [1]), ([2], [1]), ([3], [1]), ([1, 1], [1, 1]), ([2, 1], [1, 1]), ([1, 1], [2, 0])]


def _dim(d):
    v, w, r = d.v, d.w, d.r
    return 2 * (sum(a * b for a, b in zip(v, w)) + sum(v[i] * v[(i + 1) % r] for i in range(r)) - sum(a * a for a in v))


def _size(ch):
    """Number of weights counted with multiplicity."""
    return sum(c for c, _, _ in ch.terms())


def test_tangent_multiplicity_hilbert_scheme():
    d = QuiverData([3], [1])
    p = parse_fixed_point("[[[2,1],1,1]]", d)
    assert tangent_space_at(d, p) == parse_expr("2*t1 + 2*t2 + t1^2/t2 + t2^2/t1")


def test_chamber_parsing():
    c = parse_chamber(CH223, D223)
    assert c.t_minus == t2 and c.t_plus == t1
    assert c.to_text() == "[t2,t1,u[1,1],u[1,2],u[2,1]]"
    assert parse_chamber("t2,t1,u[1,1],u[1,2],u[2,1]", D223) == c


@pytest.mark.parametrize("bad", ["[t2,u[1,1],t1,u[1,2],u[2,1]]", "[t2,t1,u[1,1],u[1,2]]", "[t2,t1,u[1,1],u[1,1],u[2,1]]", "[t2,t1,w]"])
def test_chamber_rejects(bad):
    with pytest.raises(ValidationError):
        parse_chamber(bad, D223)


def test_chamber_and_pol_examples():
    assert chamber_example(D223).to_text() == "[t2,t1,u[1,1],u[1,2],u[2,1]]"
    assert pol_example(D223) == ((1, 1, 1), (1, 1, 1), (1, 1, 1))


@pytest.mark.parametrize("bad", ["[[1,1],[1,1]]", "[[1,2,1],[1,1,1],[1,1,1]]", "[[1,1],[1,1],[1,1]]", "nope"])
def test_arrows_rejects(bad):
    with pytest.raises(ValidationError):
        parse_arrows(bad, D223)


def test_virtual_tangent_term_count():
    for v, w in SUITE + [([2, 2, 3], [2, 1, 0])]:
        d = QuiverData(v, w)
        r = d.r
        expected = 2 * sum(d.v[i] * d.v[(i + 1) % r] for i in range(r)) + 2 * sum(a * b for a, b in zip(d.v, d.w)) + 2 * sum(a * a for a in d.v)
        assert len(virtual_tangent_terms(d)) == expected


def test_virtual_tangent_of_empty():
    assert virtual_tangent_space(QuiverData([0, 0], [1, 1])).is_zero()


def test_tangent_first_point():
    p = fixed_points(D223, parse_chamber(CH223, D223))[0]
    assert tangent_space_at(D223, p) == parse_expr(TANGENT_FIRST)


def test_attracting_repelling_first_point():
    c = parse_chamber(CH223, D223)
    p = fixed_points(D223, c)[0]
    att, rep = split_attracting(tangent_space_at(D223, p), c)
    assert att == parse_expr(ATTRACTING_FIRST)
    assert rep == parse_expr(REPELLING_FIRST)


def test_restrict_map_11():
    d = QuiverData([1, 1], [1, 1])
    p = fixed_points(d, parse_chamber("[t[2],t[1],u[1,1],u[2,1]]", d))[0]
    assert p.to_text() == "[[[],1,1],[[1,1],2,1]]"
    mapping = restrict_map(d, p)
    assert mapping == {x(1, 1): parse_expr("u[2,1]/t2").as_monomial(), x(2, 1): Monomial.var(u(2, 1))}
    assert tangent_space_at(d, p) == parse_expr(TANGENT_11)


def test_tangent_single_box():
    d = QuiverData([1], [1])
    (p,) = fixed_points(d)
    assert tangent_space_at(d, p) == parse_expr("t1 + t2")


def test_single_box_restrict():
    d = QuiverData([0, 1], [0, 1])
    (p,) = fixed_points(d)
    assert restrict_map(d, p) == {x(2, 1): Monomial.var(u(2, 1))}


def test_tangent_counts_and_splits_on_suite():
    cases = SUITE + [([2, 2, 3], [2, 1, 0])]
    for v, w in cases:
        d = QuiverData(v, w)
        c = chamber_example(d)
        for p in fixed_points(d, c):
            ch = tangent_space_at(d, p)
            assert _size(ch) == _dim(d)
            att, rep = split_attracting(ch, c)
            assert _size(att) == _size(rep) == _dim(d) // 2
            assert att + rep == ch


def test_restrict_images_distinct():
    for p in enumerate_fixed_points(D223.v, D223.w):
        mapping = restrict_map(D223, p)
        for i in range(1, 4):
            imgs = [mapping[x(i, k)] for k in range(1, D223.v[i - 1] + 1)]
            assert len(set(imgs)) == len(imgs)


def test_split_genericity_error():
    c = chamber_example(QuiverData([1], [1]))
    with pytest.raises(GenericityError):
        split_attracting(parse_expr("t1*t2"), c)


def test_split_a_component():
    c = parse_chamber("[t2,t1,u[1,1]]")
    att, rep = split_attracting(parse_expr("t1/t2"), c)
    assert att == parse_expr("t1/t2") and rep.is_zero()


def _hom(a, b, weight="1"):
    return " + ".join("(%s)*%s/%s" % (weight, bb, aa) for aa in a for bb in b) or "0"


def test_polarization_example():
    V = {1: ["x[1,1]", "x[1,2]"], 2: ["x[2,1]", "x[2,2]"], 3: ["x[3,1]", "x[3,2]", "x[3,3]"]}
    W = {1: ["u[1,1]", "u[1,2]"], 2: ["u[2,1]"], 3: []}
    pieces = [
        _hom(V[1], V[2], "t2"), _hom(V[3], V[2], "t1"), _hom(V[3], V[1], "t2"),
        _hom(V[1], W[1], "t1*t2"), _hom(W[2], V[2]), _hom(W[3], V[3]),
        "-(%s)" % _hom(V[1], V[1], "t1*t2"), "-(%s)" % _hom(V[2], V[2], "t1*t2"), "-(%s)" % _hom(V[3], V[3]),
    ]
    expected = parse_expr(" + ".join(pieces))
    assert polarization(D223, "[[1,-1,1],[-1,1,1],[-1,-1,1]]") == expected


def test_polarization_one_box():
    d = QuiverData([1], [1])
    assert polarization(d, "[[1],[1],[1]]") == parse_expr("x[1,1]/u[1,1] + t2 - 1")


def test_polarization_identity_random():
    rng = random.Random(7)
    t = virtual_tangent_space(D223)
    for _ in range(10):
        arrows = [[rng.choice([1, -1]) for _ in range(3)] for _ in range(3)]
        half = polarization(D223, arrows)
        assert half + dual_times_hbar(half) == t


def test_rho_key_examples():
    c = parse_chamber("[t2,t1,u[1,1]]")
    corner = rho_key(Monomial.var(u(1, 1)), c)
    assert corner == RhoKey(0, 0, Fraction(0))
    from ellstab.partitions import LabeledPartition

    lp = LabeledPartition((2,), 1, 1)
    a, b = rho_key(box_weight(lp, (1, 1)), c), rho_key(box_weight(lp, (1, 2)), c)
    assert a > b
    assert a.plus_one() == RhoKey(a.f, a.m + 1, a.h)


def test_orientation():
    c = parse_chamber("[t2,t1,u[1,1]]")
    tp, tm, tail, head = orientation(c, 3)
    assert (tp, tm) == (t1, t2)
    assert (tail(1), head(1)) == (1, 2) and (tail(3), head(3)) == (3, 1)
    c2 = parse_chamber("[t1,t2,u[1,1]]")
    tp, tm, tail, head = orientation(c2, 3)
    assert (tp, tm) == (t2, t1)
    assert (tail(1), head(1)) == (2, 1)
    _, _, tail, head = orientation(c, 1)
    assert tail(1) == head(1) == 1


def test_order_anchors():
    order = fixed_points(D223, parse_chamber(CH223, D223))
    assert order[0].to_text() == "[[[],1,1],[[],1,2],[[3,1,1,1,1],2,1]]"
    assert order[34].to_text() == "[[[3],1,1],[[2],1,2],[[1,1],2,1]]"


def test_order_hilbert_scheme():
    d = QuiverData([2], [1])
    order = fixed_points(d, parse_chamber("[t2,t1,u[1,1]]", d))
    assert [p[0].parts for p in order] == [(1, 1), (2,)]


def test_parse_fixed_point_validates():
    d = QuiverData([1, 1], [1, 1])
    assert parse_fixed_point("[[[],1,1],[[1,1],2,1]]", d).to_text() == "[[[],1,1],[[1,1],2,1]]"
    with pytest.raises(ValidationError):
        parse_fixed_point("[[[1],1,1],[[1,1],2,1]]", d)
    with pytest.raises(ValidationError):
        parse_fixed_point("[[[],1,1]", d)


def test_index_column_point():
    d = QuiverData([2], [1])
    c = parse_chamber("[t2,t1,u[1,1]]", d)
    p = fixed_points(d, c)[0]
    assert sum(index_exponents(d, p, "[[1],[1],[1]]", c).values()) == 1


def test_index_empty():
    d = QuiverData([0], [1])
    (p,) = fixed_points(d)
    assert index_exponents(d, p, pol_example(d), chamber_example(d)) == {}


def _brute_index(d, p, arrows, c):
    """Expand T^(1/2) root by root, classify restricted weights, sum x-exponents."""
    V = {i: [x(i, k) for k in range(1, d.v[i - 1] + 1)] for i in range(1, d.r + 1)}
    W = {i: [u(i, j) for j in range(1, d.w[i - 1] + 1)] for i in range(1, d.r + 1)}
    terms = []  # (coeff, {var: exp})

    def hom(a, b, tw, coeff=1):
        for aa in a:
            for bb in b:
                e = dict(tw)
                e[bb] = e.get(bb, 0) + 1
                e[aa] = e.get(aa, 0) - 1
                terms.append((coeff, {k: v for k, v in e.items() if v}))

    for i in range(1, d.r + 1):
        j = i % d.r + 1
        if arrows[0][i - 1] == 1:
            hom(V[i], V[j], {t2: 1})
        else:
            hom(V[j], V[i], {t1: 1})
        if arrows[1][i - 1] == 1:
            hom(W[i], V[i], {})
        else:
            hom(V[i], W[i], {t1: 1, t2: 1})
        hom(V[i], V[i], {} if arrows[2][i - 1] == 1 else {t1: 1, t2: 1}, -1)
    mapping = restrict_map(d, p)
    total = {}
    for coeff, e in terms:
        wt = {}
        for var, k in e.items():
            img = mapping[var].exps if var in mapping else ((var, 1),)
            for vv, kk in img:
                wt[vv] = wt.get(vv, 0) + k * kk
        wt = {k: v for k, v in wt.items() if v}
        us = [(c.u_order.index(k.idx), v) for k, v in wt.items() if k.rank == u(1, 1).rank]
        if us:
            sign = 1 if max(us)[1] > 0 else -1
        else:
            a = c.sigma_a * (wt.get(t1, 0) - wt.get(t2, 0))
            sign = (a > 0) - (a < 0) or ((wt.get(t1, 0) + wt.get(t2, 0)) > 0) - ((wt.get(t1, 0) + wt.get(t2, 0)) < 0)
        if sign > 0:
            for var, k in e.items():
                if var in mapping:
                    total[var] = total.get(var, 0) + coeff * k
    return total


@pytest.mark.parametrize("v, w", [([2], [1]), ([1, 1], [1, 1])])
def test_index_brute_force(v, w):
    d = QuiverData(v, w)
    for c in (chamber_example(d), parse_chamber("[t1,t2,%s]" % ",".join("u[%d,%d]" % s for s in reversed(d.framing_slots())), d)):
        for arrows in (pol_example(d), tuple(tuple([-1] * d.r) for _ in range(3))):
            for p in fixed_points(d, c):
                from ellstab.quiver import root_assignment

                roots = root_assignment(d, p)
                got = index_exponents(d, p, arrows, c)
                brute = _brute_index(d, p, arrows, c)
                assert {roots[k]: val for k, val in got.items()} == {r: brute.get(r, 0) for r in roots.values()}


def test_tangent_character_is_laurent():
    d = QuiverData([1, 1], [1, 1])
    p = fixed_points(d)[0]
    assert isinstance(tangent_space_at(d, p), ThetaExpr)
    assert tangent_space_at(d, p).is_laurent()
