"""Diagonal quadratic forms over exact fields.

Conventions: a Gram matrix ``G`` defines ``q(x) = x^T G x`` and the polar
form ``b(x, y) = q(x+y) - q(x) - q(y) = 2 x^T G y``.  A diagonal form
``<a_1, ..., a_n>`` is ``q(x) = sum a_i x_i^2``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from . import fields as fl
from .errors import (
    Degenerate,
    DimensionMismatch,
    FieldMismatch,
    IsotropicVector,
    NotRepresented,
    UnsupportedField,
    ZeroElement,
)
from .fields import FieldDesc, FieldElem, Place, square_class


@dataclass(frozen=True)
class QuadForm:
    field: FieldDesc
    entries: tuple

    def __post_init__(self):
        ents = tuple(self.field(a) for a in self.entries)
        for a in ents:
            if a.is_zero():
                raise Degenerate("diagonal entries must be units")
        object.__setattr__(self, "entries", ents)

    @classmethod
    def diag(cls, field, *entries):
        return cls(field, tuple(entries))

    @property
    def rank(self):
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __call__(self, x):
        x = [self.field(c) for c in x]
        if len(x) != self.rank:
            raise DimensionMismatch(f"vector of length {len(x)} for a rank {self.rank} form")
        acc = self.field.zero
        for a, c in zip(self.entries, x):
            acc = acc + a * c * c
        return acc

    def det(self):
        d = self.field.one
        for a in self.entries:
            d = d * a
        return d

    def signed_disc(self):
        """(-1)^(n(n-1)/2) * det, trivial on hyperbolic forms."""
        n = self.rank
        d = self.det()
        return -d if (n * (n - 1) // 2) % 2 else d

    def gram(self):
        F = self.field
        n = self.rank
        return GramMatrix(F, tuple(tuple(self.entries[i] if i == j else F.zero for j in range(n))
                                   for i in range(n)))

    def scaled(self, c):
        c = self.field(c)
        return QuadForm(self.field, tuple(c * a for a in self.entries))

    def __neg__(self):
        return self.scaled(-1)

    def __add__(self, other):
        return orth_sum(self, other)

    def __mul__(self, other):
        return tensor(self, other)

    def __str__(self):
        return "<" + ",".join(str(a) for a in self.entries) + ">"

    def tag(self):
        return f"diag({','.join(str(a) for a in self.entries)})@{self.field.tag}"


def hyperbolic(field, copies=1):
    return QuadForm(field, (1, -1) * copies)


@dataclass(frozen=True)
class GramMatrix:
    field: FieldDesc
    m: tuple

    def __post_init__(self):
        F = self.field
        rows = tuple(tuple(F(c) for c in row) for row in self.m)
        n = len(rows)
        for row in rows:
            if len(row) != n:
                raise DimensionMismatch("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise Degenerate("Gram matrix must be symmetric")
        object.__setattr__(self, "m", rows)

    @property
    def rank(self):
        return len(self.m)

    def value(self, x):
        return self.bilinear(x, x)

    def bilinear(self, x, y):
        """x^T G y (half the polar form)."""
        F = self.field
        acc = F.zero
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    if yj:
                        acc = acc + F(xi) * self.m[i][j] * F(yj)
        return acc

    def det(self):
        rows = [list(r) for r in self.m]
        n = len(rows)
        F = self.field
        d = F.one
        for c in range(n):
            piv = next((r for r in range(c, n) if rows[r][c]), None)
            if piv is None:
                return F.zero
            if piv != c:
                rows[c], rows[piv] = rows[piv], rows[c]
                d = -d
            d = d * rows[c][c]
            inv = rows[c][c].inverse()
            for r in range(c + 1, n):
                if rows[r][c]:
                    f = rows[r][c] * inv
                    rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
        return d


def _as_gram(g):
    return g.gram() if isinstance(g, QuadForm) else g


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def orth_sum(q1: QuadForm, q2: QuadForm) -> QuadForm:
    if q1.field != q2.field:
        raise FieldMismatch(f"{q1.field.tag} vs {q2.field.tag}")
    return QuadForm(q1.field, q1.entries + q2.entries)


def tensor(q1: QuadForm, q2: QuadForm) -> QuadForm:
    if q1.field != q2.field:
        raise FieldMismatch(f"{q1.field.tag} vs {q2.field.tag}")
    return QuadForm(q1.field, tuple(a * b for a in q1.entries for b in q2.entries))


def diagonalize(g, with_transform=False):
    """Diagonalize a symmetric Gram matrix by congruence.

    With ``with_transform`` the rows of the returned matrix ``T`` are the new
    orthogonal basis, so ``T G T^T`` is the diagonal of the result.
    """
    g = _as_gram(g)
    F = g.field
    n = g.rank
    if g.det().is_zero():
        raise Degenerate("Gram matrix is singular")
    G = [list(r) for r in g.m]
    T = [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]

    def add_row_col(dst, src, f):
        # basis change e_dst += f * e_src
        G[dst] = [a + f * b for a, b in zip(G[dst], G[src])]
        for row in G:
            row[dst] = row[dst] + f * row[src]
        T[dst] = [a + f * b for a, b in zip(T[dst], T[src])]

    def swap(i, j):
        G[i], G[j] = G[j], G[i]
        for row in G:
            row[i], row[j] = row[j], row[i]
        T[i], T[j] = T[j], T[i]

    for k in range(n):
        piv = next((i for i in range(k, n) if G[i][i]), None)
        if piv is None:
            # all remaining diagonal entries vanish: use e_i + e_j
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if G[i][j]), None)
            if pair is None:
                raise Degenerate("Gram matrix is singular")
            i, j = pair
            add_row_col(i, j, F.one)
            piv = i
        if piv != k:
            swap(k, piv)
        inv = G[k][k].inverse()
        for i in range(k + 1, n):
            if G[i][k]:
                add_row_col(i, k, -(G[i][k] * inv))
    q = QuadForm(F, tuple(G[i][i] for i in range(n)))
    if with_transform:
        return q, tuple(tuple(r) for r in T)
    return q


def reflect(g, v, x):
    """tau_v(x) = x - (b(v, x) / q(v)) v."""
    g = _as_gram(g)
    F = g.field
    v = [F(c) for c in v]
    x = [F(c) for c in x]
    if len(v) != g.rank or len(x) != g.rank:
        raise DimensionMismatch("vector length does not match the form")
    qv = g.value(v)
    if qv.is_zero():
        raise IsotropicVector("reflection needs q(v) to be a unit")
    c = (g.bilinear(v, x) * 2) / qv
    return tuple(xi - c * vi for xi, vi in zip(x, v))


# ---------------------------------------------------------------------------
# Finite fields
# ---------------------------------------------------------------------------

def _vectors(F, n):
    """All vectors of F^n in lexicographic index order."""
    return itertools.product(F.elements(), repeat=n)


def _finite_isotropic(q):
    n = q.rank
    if n <= 1:
        return False
    if n == 2:
        return fl.is_square(-(q.entries[0] * q.entries[1]))
    return True


def _finite_witness(q, c=None):
    """Lexicographically least x != 0 with q(x) = c (c = None means 0)."""
    F = q.field
    target = F.zero if c is None else c
    for x in _vectors(F, q.rank):
        if c is None and all(t.is_zero() for t in x):
            continue
        if q(x) == target:
            return x
    return None


# ---------------------------------------------------------------------------
# Local theory over Q
# ---------------------------------------------------------------------------

def _q_is_local_square(x: Fraction, p):
    n = x.numerator * x.denominator
    if p == "real":
        return n > 0
    v = fl.valuation_int(n, p)
    if v % 2:
        return False
    u = n // p ** v
    if p == 2:
        return u % 8 == 1
    return fl.legendre(u, p) == 1


def _q_hilbert(a, b, p):
    Q = FieldDesc.rationals()
    place = Place.real() if p == "real" else Place.prime(p)
    return fl.hilbert_symbol(Q(a), Q(b), place)


def hasse_invariant(entries, p):
    """prod_{i<j} (a_i, a_j)_p for rational diagonal entries."""
    c = 1
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            c *= _q_hilbert(entries[i], entries[j], p)
    return c


def _q_local_isotropic_inv(n, d, c, p):
    if n <= 1:
        return False
    if n == 2:
        return _q_is_local_square(-d, p)
    if n == 3:
        return c == _q_hilbert(-1, -d, p)
    if n == 4:
        return (not _q_is_local_square(d, p)) or c == _q_hilbert(-1, -1, p)
    return True


def _q_local_aniso_dim(entries, p):
    """Dimension of the anisotropic part over Q_p (p prime or 'real')."""
    if p == "real":
        return abs(sum(1 if a > 0 else -1 for a in entries))
    n = len(entries)
    d = Fraction(1)
    for a in entries:
        d *= a
    c = hasse_invariant(entries, p)
    while n > 0 and _q_local_isotropic_inv(n, d, c, p):
        # split off a hyperbolic plane: q = H + q1
        d = -d
        c = c * _q_hilbert(-1, d, p)
        n -= 2
    return n


def q_local_isotropic(q: QuadForm, p):
    ents = [a.value for a in q.entries]
    if p == "real":
        return any(a > 0 for a in ents) and any(a < 0 for a in ents)
    d = Fraction(1)
    for a in ents:
        d *= a
    return _q_local_isotropic_inv(len(ents), d, hasse_invariant(ents, p), p)


def q_bad_primes(q: QuadForm):
    ps = {2}
    for a in q.entries:
        _, fac = fl.factor(a.value)
        ps.update(fac)
    return sorted(ps)


# ---------------------------------------------------------------------------
# Local theory over F_p(t)
# ---------------------------------------------------------------------------

def normalize_at(x: FieldElem, v: Place, pi: FieldElem | None = None):
    """Write x = u * pi^i with u a v-unit; returns (u, i)."""
    if x.is_zero():
        raise ZeroElement("cannot normalize 0")
    if pi is None:
        pi = v.default_uniformizer()
    i = fl.valuation(x, v)
    return x / pi ** i, i


def residue_forms(q: QuadForm, v: Place, pi=None):
    """First and second residue forms of q at a discrete place, as finite-field forms."""
    k = v.residue_field()
    first, second = [], []
    for a in q.entries:
        u, i = normalize_at(a, v, pi)
        (second if i % 2 else first).append(fl.reduce_unit(u, v))
    return QuadForm(k, tuple(first)), QuadForm(k, tuple(second))


def _finite_aniso_dim(q):
    n = q.rank
    if n % 2:
        return 1
    return 0 if fl.is_square(q.signed_disc()) else 2


def ratfun_support(q: QuadForm):
    """Finite places where some entry has odd valuation, plus infinity."""
    F = q.field
    places = set()
    for a in q.entries:
        _, fac = fl.factor(a)
        for g, e in fac.items():
            if e % 2:
                places.add(Place("poly", F.p, g))
    return sorted(places) + [Place.infinity(F.p)]


def _ratfun_aniso_dim(q):
    n = q.rank
    if n == 0:
        return 0
    best = 1 if n % 2 else (0 if fl.is_square(q.signed_disc()) else 2)
    for v in ratfun_support(q):
        f, s = residue_forms(q, v)
        loc = _finite_aniso_dim(f) + _finite_aniso_dim(s)
        best = max(best, loc)
    return best


# ---------------------------------------------------------------------------
# Decision procedures
# ---------------------------------------------------------------------------

def anisotropic_rank(q: QuadForm) -> int:
    F = q.field
    if q.rank == 0:
        return 0
    if F.is_finite:
        return _finite_aniso_dim(q)
    if F.kind == fl.RATIONALS:
        ents = [a.value for a in q.entries]
        return max(_q_local_aniso_dim(ents, p) for p in ["real"] + q_bad_primes(q))
    return _ratfun_aniso_dim(q)


def is_isotropic(q: QuadForm, witness=False):
    """Decide whether q has a nontrivial zero.

    With ``witness=True`` over a finite field, returns ``(flag, vector)``.
    """
    F = q.field
    if F.is_finite:
        flag = _finite_isotropic(q)
        if witness:
            return flag, (_finite_witness(q) if flag else None)
        return flag
    if q.rank <= 1:
        flag = False
    elif q.rank == 2:
        flag = fl.is_square(-(q.entries[0] * q.entries[1]))
    elif F.kind == fl.RATIONALS:
        flag = all(q_local_isotropic(q, p) for p in ["real"] + q_bad_primes(q))
    else:
        flag = anisotropic_rank(q) < q.rank
    return (flag, None) if witness else flag


def represents(q: QuadForm, c, witness=False):
    F = q.field
    c = F(c)
    if c.is_zero():
        raise ZeroElement("represents expects a unit")
    if F.is_finite:
        flag = q.rank >= 2 or (q.rank == 1 and fl.is_square(c / q.entries[0]))
        if witness:
            return flag, (_finite_witness(q, c) if flag else None)
        return flag
    flag = q.rank > 0 and is_isotropic(orth_sum(q, QuadForm(F, (-c,))))
    return (flag, None) if witness else flag


def is_isometric(q1: QuadForm, q2: QuadForm) -> bool:
    if q1.field != q2.field:
        raise FieldMismatch(f"{q1.field.tag} vs {q2.field.tag}")
    if q1.rank != q2.rank:
        return False
    from .wittring import witt_class

    return witt_class(q1) == witt_class(q2)


def witt_decompose(q: QuadForm):
    """Return (witt_index, anisotropic_rank, witt_class)."""
    from .wittring import witt_class

    a = anisotropic_rank(q)
    return (q.rank - a) // 2, a, witt_class(q)


def hyperbolic_split(q: QuadForm):
    """Over a finite field, explicitly split q into k*H + anisotropic part.

    Repeatedly finds an isotropic vector, completes it to a hyperbolic pair
    and diagonalizes the orthogonal complement.  Returns (k, anisotropic form).
    """
    F = q.field
    if not F.is_finite:
        raise UnsupportedField("explicit splitting needs a finite field")
    k = 0
    while True:
        flag, x = is_isotropic(q, witness=True)
        if not flag:
            return k, q
        g = q.gram()
        n = q.rank
        # y with b(x, y) != 0; such exists since q is nondegenerate
        y = next(tuple(F.one if i == j else F.zero for i in range(n))
                 for j in range(n) if not g.bilinear(x, [F.one if i == j else F.zero for i in range(n)]).is_zero())
        basis = _complement(g, [list(x), list(y)])
        m = [[g.bilinear(u, w) for w in basis] for u in basis]
        if basis:
            q = diagonalize(GramMatrix(F, tuple(tuple(r) for r in m)))
        else:
            q = QuadForm(F, ())
        k += 1


def _complement(g, vecs):
    """Basis of the orthogonal complement of span(vecs) under g."""
    F = g.field
    n = g.rank
    rows = [[sum((v[i] * g.m[i][j] for i in range(n)), F.zero) for j in range(n)] for v in vecs]
    # null space of rows
    rows = [r[:] for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [a * inv for a in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [F.zero] * n
        v[fc] = F.one
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# Unit-value decomposition
# ---------------------------------------------------------------------------

def _small_rationals(height):
    seen = {Fraction(0)}
    out = [Fraction(0)]
    for s in range(1, height + 1):
        for r in range(-height, height + 1):
            x = Fraction(r, s)
            if x not in seen:
                seen.add(x)
                out.append(x)
    return sorted(out, key=lambda x: (abs(x.numerator) + x.denominator, x))


def _rational_sqrt(x: Fraction):
    if x < 0:
        return None
    a, b = isqrt(x.numerator), isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


def decompose_value(phi: QuadForm, psi: QuadForm, a, height=50):
    """Find (v, w) with a = phi(v) + psi(w) and both summands units.

    Over finite fields the search is exhaustive and ``None`` means no such
    decomposition exists.  Over Q coordinates are drawn from rationals of
    bounded height and ``None`` only means none was found.
    """
    F = phi.field
    if psi.field != F:
        raise FieldMismatch(f"{phi.field.tag} vs {psi.field.tag}")
    a = F(a)
    if a.is_zero():
        raise ZeroElement("a must be a unit")
    if not represents(orth_sum(phi, psi), a):
        raise NotRepresented(f"{a} is not a value of {orth_sum(phi, psi)}")
    if F.is_finite:
        first = {}
        for w in _vectors(F, psi.rank):
            val = psi(w)
            if val and val not in first:
                first[val] = w
        for v in _vectors(F, phi.rank):
            x = phi(v)
            if x and (a - x) in first:
                return v, first[a - x]
        return None
    if F.kind != fl.RATIONALS:
        raise UnsupportedField("decompose_value supports finite fields and QQ")
    return _decompose_q(phi, psi, a, height)


def _decompose_q(phi, psi, a, height):
    F = phi.field
    budget = 20000

    def vectors(rank):
        h = height
        while h > 1 and len(_small_rationals(h)) ** rank > budget:
            h -= 1
        coords = _small_rationals(h)
        for v in itertools.product(coords, repeat=rank):
            if any(v):
                yield v

    psi_vals = {}
    if psi.rank > 1:
        for w in vectors(psi.rank):
            psi_vals.setdefault(psi(w).value, w)
    for v in vectors(phi.rank):
        x = phi(v).value
        if x == 0:
            continue
        rest = a.value - x
        if rest == 0:
            continue
        if psi.rank == 1:
            s = _rational_sqrt(rest / psi.entries[0].value)
            if s is not None:
                return tuple(F(c) for c in v), (F(s),)
        elif rest in psi_vals:
            return tuple(F(c) for c in v), tuple(F(c) for c in psi_vals[rest])
    return None


# ---------------------------------------------------------------------------
# Pfister forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PfisterForm:
    field: FieldDesc
    slots: tuple

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(square_class(self.field(a)).rep for a in self.slots))

    @property
    def n(self):
        return len(self.slots)

    def expand(self) -> QuadForm:
        q = QuadForm(self.field, (1,))
        for a in self.slots:
            q = tensor(q, QuadForm(self.field, (1, -a)))
        return q

    def pure_subform(self) -> QuadForm:
        return QuadForm(self.field, self.expand().entries[1:])

    def __str__(self):
        return "<<" + ",".join(str(a) for a in self.slots) + ">>"

    def tag(self):
        return f"pfister({','.join(str(a) for a in self.slots)})@{self.field.tag}"


def pfister(field, *slots) -> PfisterForm:
    for a in slots:
        if field(a).is_zero():
            raise ZeroElement("Pfister slots must be units")
    return PfisterForm(field, tuple(slots))


def pure_subform(pf: PfisterForm) -> QuadForm:
    return pf.pure_subform()
