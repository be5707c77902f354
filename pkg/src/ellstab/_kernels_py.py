"""Pure-Python twin of the compiled ``_kernels`` module."""


def _phi(x, q, trunc):
    acc = 1.0 + 0j
    qi = 1.0 + 0j
    for _ in range(trunc + 1):
        acc *= 1.0 - x * qi
        qi *= q
    return acc


def term_products(term_index, kinds, xs, sqrts, powers, nterms, q, trunc):
    num = [1.0 + 0j] * nterms
    den = [1.0 + 0j] * nterms
    for k in range(len(xs)):
        x, s = complex(xs[k]), complex(sqrts[k])
        kind = kinds[k]
        if kind == 0:
            val = (s - 1.0 / s) * _phi(q * x, q, trunc) * _phi(q / x, q, trunc)
        elif kind == 1:
            val = _phi(x, q, trunc)
        else:
            val = s - 1.0 / s
        p = int(powers[k])
        t = int(term_index[k])
        if p > 0:
            num[t] *= val ** p
        else:
            den[t] *= val ** (-p)
    return num, den
