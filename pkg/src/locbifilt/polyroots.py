"""Exact univariate polynomials over Q with Sturm-sequence root isolation.

Polynomials are lists of mpq coefficients, lowest degree first.
"""
from __future__ import annotations

import gmpy2
from gmpy2 import mpq

from .kernel import RInterval, rat, sign

ZERO = mpq(0)


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def deg(p) -> int:
    return len(p) - 1


def peval(p, x):
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def padd(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO) for i in range(n)])


def pscale(a, k):
    return trim([c * k for c in a])


def pmul(a, b):
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return trim(out)


def deriv(p):
    return trim([c * i for i, c in enumerate(p)][1:])


def pdivmod(a, b):
    a = trim(a)
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [ZERO] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    lb = b[-1]
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        c = r[-1] / lb
        q[k] = c
        for i, bc in enumerate(b):
            r[i + k] -= c * bc
        r = trim(r)
    return trim(q), r


def monic(p):
    p = trim(p)
    return [c / p[-1] for c in p] if p else p


def pgcd(a, b):
    a, b = trim(a), trim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return monic(a)


def squarefree(p):
    p = trim(p)
    if deg(p) <= 0:
        return p
    g = pgcd(p, deriv(p))
    if deg(g) <= 0:
        return monic(p)
    return monic(pdivmod(p, g)[0])


def sturm(p):
    chain = [trim(p), deriv(p)]
    while chain[-1] and deg(chain[-1]) > 0:
        r = pdivmod(chain[-2], chain[-1])[1]
        if not r:
            break
        chain.append([-c for c in r])
    return [c for c in chain if c]


def _sign_at(p, x) -> int:
    if x is None:
        raise ValueError
    return sign(peval(p, x))


def _sign_inf(p, positive: bool) -> int:
    s = sign(p[-1])
    if not positive and deg(p) % 2 == 1:
        s = -s
    return s


def variations(chain, x=None, pos_inf=None) -> int:
    if x is None:
        signs = [_sign_inf(p, pos_inf) for p in chain]
    else:
        signs = [_sign_at(p, x) for p in chain]
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(chain, a, b) -> int:
    """Number of distinct roots in (a, b] (a, b rational, a < b)."""
    return variations(chain, a) - variations(chain, b)


def root_bound(p):
    """All real roots lie in (-M, M)."""
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=ZERO)


def _small_rational_roots(p):
    """All roots of a square-free p of degree <= 2 when they are all rational, else None."""
    if deg(p) == 1:
        return [-p[0] / p[1]]
    if deg(p) == 2:
        c, b, a = p
        disc = b * b - 4 * a * c
        if disc < 0:
            return []
        num, den = disc.numerator, disc.denominator
        if gmpy2.is_square(num) and gmpy2.is_square(den):
            sq = mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))
            return [(-b - sq) / (2 * a), (-b + sq) / (2 * a)]
    return None


def isolate(p, lo=None, hi=None):
    """Isolate the real roots of p in the closed interval [lo, hi] (None = infinite).

    Returns a sorted list of RInterval; exact rational roots have lo == hi,
    otherwise the interval is open-isolating for the square-free part of p.
    """
    p = squarefree(p)
    if deg(p) <= 0:
        return []
    rr = _small_rational_roots(p)
    if rr is not None:
        return [RInterval(r, r) for r in sorted(rr)
                if (lo is None or r >= lo) and (hi is None or r <= hi)]
    M = root_bound(p)
    a = -M if lo is None else rat(lo)
    b = M if hi is None else rat(hi)
    if a > b:
        return []
    out = []
    if peval(p, a) == 0:
        out.append(RInterval(a, a))
    if b != a and peval(p, b) == 0:
        out.append(RInterval(b, b))
    if a == b:
        return out
    chain = sturm(p)
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        n = variations(chain, x) - variations(chain, y)
        if peval(p, y) == 0:
            n -= 1
        if n <= 0:
            continue
        if n == 1:
            out.append(RInterval(x, y))
            continue
        m = (x + y) / 2
        if peval(p, m) == 0:
            out.append(RInterval(m, m))
        stack.append((x, m))
        stack.append((m, y))
    out.sort(key=lambda iv: iv.lo)
    return out


def refine(p, iv: RInterval, width) -> RInterval:
    """Bisect an isolating interval of square-free p down to the given width."""
    if iv.exact:
        return iv
    x, y = iv.lo, iv.hi
    sx = sign(peval(p, x))
    while y - x > width:
        m = (x + y) / 2
        sm = sign(peval(p, m))
        if sm == 0:
            return RInterval(m, m)
        if sm == sx:
            x = m
        else:
            y = m
    return RInterval(x, y)


def sign_at_root(p, iv: RInterval, h) -> tuple:
    """Exact sign of polynomial h at the unique root of square-free p in iv.

    Returns (sign, refined interval).
    """
    h = trim(h)
    if not h:
        return 0, iv
    if iv.exact:
        return sign(peval(h, iv.lo)), iv
    g = pgcd(p, h)
    if deg(g) >= 1:
        gc = sturm(g)
        if count_roots(gc, iv.lo, iv.hi) - (1 if peval(g, iv.hi) == 0 else 0) > 0:
            return 0, iv
    hs = squarefree(h)
    hc = sturm(hs) if deg(hs) >= 1 else None
    x, y = iv.lo, iv.hi
    sx = sign(peval(p, x))
    while True:
        hx = peval(h, x)
        if hx != 0 and (hc is None or count_roots(hc, x, y) == 0):
            return sign(hx), RInterval(x, y)
        m = (x + y) / 2
        sm = sign(peval(p, m))
        if sm == 0:
            return sign(peval(h, m)), RInterval(m, m)
        if sm == sx:
            x = m
        else:
            y = m
