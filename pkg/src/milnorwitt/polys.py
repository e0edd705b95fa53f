"""Dense univariate polynomials over F_p.

A polynomial is a tuple of residues in ``range(p)``, lowest degree first,
with no trailing zeros; the zero polynomial is ``()``.
"""

from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor, gf_irreducible_p


def trim(c, p):
    c = [x % p for x in c]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def degree(f):
    return len(f) - 1


def add(f, g, p):
    n = max(len(f), len(g))
    return trim([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)], p)


def neg(f, p):
    return tuple((-x) % p for x in f)


def sub(f, g, p):
    return add(f, neg(g, p), p)


def scale(f, c, p):
    return trim([c * x for x in f], p)


def mul(f, g, p):
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return trim(out, p)


def divmod_(f, g, p):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(g[-1], -1, p)
    r = list(f)
    q = [0] * max(len(f) - len(g) + 1, 0)
    dg = len(g) - 1
    for k in range(len(f) - len(g), -1, -1):
        c = r[k + dg] * inv % p
        q[k] = c
        if c:
            for j, b in enumerate(g):
                r[k + j] = (r[k + j] - c * b) % p
    return trim(q, p), trim(r[:dg] if dg > 0 else [], p)


def rem(f, g, p):
    return divmod_(f, g, p)[1]


def monic(f, p):
    if not f:
        return f
    return scale(f, pow(f[-1], -1, p), p)


def gcd(f, g, p):
    while g:
        f, g = g, rem(f, g, p)
    return monic(f, p)


def powmod(f, e, m, p):
    result = (1,)
    base = rem(f, m, p)
    while e:
        if e & 1:
            result = rem(mul(result, base, p), m, p)
        base = rem(mul(base, base, p), m, p)
        e >>= 1
    return result


def inverse_mod(f, m, p):
    """Inverse of ``f`` modulo ``m`` via the extended Euclidean algorithm."""
    r0, r1 = m, rem(f, m, p)
    s0, s1 = (), (1,)
    while r1:
        q, r = divmod_(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1, p), p)
    if len(r0) != 1:
        raise ZeroDivisionError("not invertible modulo m")
    return scale(s0, pow(r0[0], -1, p), p)


def evaluate(f, x, p):
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def _to_sympy(f):
    return [ZZ(int(c)) for c in reversed(f)]


def _from_sympy(f, p):
    return trim([int(c) for c in reversed(f)], p)


def is_irreducible(f, p):
    if len(f) < 2:
        return False
    return bool(gf_irreducible_p(_to_sympy(f), p, ZZ))


def factor(f, p):
    """Return ``(lead, {monic irreducible: exponent})`` with f = lead * prod."""
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    lead, parts = gf_factor(_to_sympy(f), p, ZZ)
    return int(lead) % p, {_from_sympy(g, p): e for g, e in parts}


def to_str(f, var="t"):
    if not f:
        return "0"
    terms = []
    for i in range(len(f) - 1, -1, -1):
        c = f[i]
        if not c:
            continue
        if i == 0:
            mono = str(c)
        else:
            x = var if i == 1 else f"{var}^{i}"
            mono = x if c == 1 else f"{c}*{x}"
        terms.append(mono)
    return "+".join(terms)


def monic_polys(deg, p):
    """All monic polynomials of exact degree ``deg``, in index order."""
    for idx in range(p ** deg):
        c = []
        for _ in range(deg):
            c.append(idx % p)
            idx //= p
        yield tuple(c) + (1,)
