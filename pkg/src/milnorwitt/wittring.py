"""Witt and Grothendieck-Witt classes with complete canonical invariants.

Finite fields: (rank parity, signed discriminant class).
Q: (signature, residues at odd primes, residue parity at 2).
F_p(t): (first residue at infinity, second residues at monic irreducibles).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

from . import fields as fl
from . import quadform as qf
from .errors import FieldMismatch, NotInPower, ParityMismatch, UnsupportedField
from .fields import FieldDesc, Place, square_class
from .quadform import QuadForm


@dataclass(frozen=True)
class WittClass:
    field: FieldDesc
    data: tuple
    rep: QuadForm = dc_field(compare=False, hash=False, repr=False)

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, WittClass) or other.field != self.field:
            raise FieldMismatch("Witt classes over different fields")

    def __add__(self, other):
        self._check(other)
        return witt_class(_cancel_hyperbolic(qf.orth_sum(self.rep, other.rep)))

    def __neg__(self):
        return witt_class(-self.rep)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            out = zero_class(self.field)
            for _ in range(abs(other)):
                out = out + self
            return out if other >= 0 else -out
        self._check(other)
        return witt_class(qf.tensor(self.rep, other.rep))

    __rmul__ = __mul__

    def is_zero(self):
        return self == zero_class(self.field)

    @property
    def e0(self):
        return self.rep.rank % 2

    def anisotropic_rank(self):
        return qf.anisotropic_rank(self.rep)

    def minimal_form(self):
        """An anisotropic representative (finite fields only)."""
        if not self.field.is_finite:
            raise UnsupportedField("minimal forms are produced over finite fields only")
        return _minimal_rep(self.field, self.data)

    def to_json(self):
        F = self.field
        if F.is_finite:
            return str(self.minimal_form())
        if F.kind == fl.RATIONALS:
            sig, res, par2 = self.data
            return {"sig": sig, "res": {str(p): w.to_json() for p, w in res}, "par2": par2}
        const, res = self.data
        return {"const": const.to_json(),
                "res": {fl.polys.to_str(g): w.to_json() for g, w in res}}

    def __str__(self):
        F = self.field
        if F.is_finite:
            return str(self.minimal_form())
        return str(self.to_json())


def _minimal_rep(F, data):
    e0, d = data
    if e0:
        return QuadForm(F, (d,))
    if d == F.one:
        return QuadForm(F, ())
    return QuadForm(F, (1, -d))


def zero_class(F: FieldDesc) -> WittClass:
    return witt_class(QuadForm(F, ()))


def _cancel_hyperbolic(q: QuadForm) -> QuadForm:
    """Drop pairs <a> + <-a>; keeps representatives short under repeated sums."""
    if q.field.is_finite:
        return q
    left = []
    for a in q.entries:
        na = square_class(-a).rep
        for j, b in enumerate(left):
            if square_class(b).rep == na:
                del left[j]
                break
        else:
            left.append(a)
    return QuadForm(q.field, tuple(left))


def _finite_data(q: QuadForm):
    return (q.rank % 2, square_class(q.signed_disc()).rep)


def residue_class(q: QuadForm, v: Place, pi=None) -> WittClass:
    """Second residue of q at a discrete place with odd residue characteristic."""
    _, second = qf.residue_forms(q, v, pi)
    return witt_class(second)


def first_residue_class(q: QuadForm, v: Place, pi=None) -> WittClass:
    first, _ = qf.residue_forms(q, v, pi)
    return witt_class(first)


def par2(q: QuadForm) -> int:
    """Residue at 2 into W(F_2) = Z/2: count of entries with odd 2-adic valuation."""
    return sum(fl.valuation(a, Place.two()) % 2 for a in q.entries) % 2


def witt_class(q: QuadForm) -> WittClass:
    F = q.field
    if F.is_finite:
        data = _finite_data(q)
        return WittClass(F, data, _minimal_rep(F, data))
    if F.kind == fl.RATIONALS:
        sig = sum(1 if a.value > 0 else -1 for a in q.entries)
        primes = set()
        for a in q.entries:
            _, fac = fl.factor(a.value)
            primes.update(p for p, e in fac.items() if e % 2 and p != 2)
        res = []
        for p in sorted(primes):
            w = residue_class(q, Place.prime(p))
            if not w.is_zero():
                res.append((p, w))
        return WittClass(F, (sig, tuple(res), par2(q)), q)
    places = []
    for a in q.entries:
        _, fac = fl.factor(a)
        places.extend(Place("poly", F.p, g) for g, e in fac.items() if e % 2)
    res = []
    for v in sorted(set(places)):
        w = residue_class(q, v)
        if not w.is_zero():
            res.append((v.poly, w))
    const = first_residue_class(q, Place.infinity(F.p))
    return WittClass(F, (const, tuple(res)), q)


def witt_class_from_invariants_q(sig, residues, par):
    """Build a rational form with prescribed signature, odd residues and parity at 2.

    Primes are handled from the largest down: the correction at p uses entries
    p*u with 0 < u < p, which only disturbs residues at smaller primes.
    """
    Q = FieldDesc.rationals()
    target = {p: w for p, w in residues.items() if not w.is_zero()}
    q = QuadForm(Q, ())
    primes = set(target)
    while True:
        cur = {p: w for p, w in witt_class(q).data[1]}
        bad = [p for p in primes | set(cur)
               if cur.get(p, zero_class(FieldDesc.prime(p))) != target.get(p, zero_class(FieldDesc.prime(p)))]
        if not bad:
            break
        p = max(bad)
        Fp = FieldDesc.prime(p)
        diff = target.get(p, zero_class(Fp)) - cur.get(p, zero_class(Fp))
        q = qf.orth_sum(q, QuadForm(Q, tuple(p * u.value for u in diff.minimal_form().entries)))
    extra = []
    if par2(q) != par % 2:
        extra.append(2)
    cur_sig = witt_class(q).data[0] + len(extra)
    step = 1 if sig > cur_sig else -1
    extra.extend([step] * abs(sig - cur_sig))
    return witt_class(QuadForm(Q, q.entries + tuple(extra)))


# ---------------------------------------------------------------------------
# Powers of the fundamental ideal
# ---------------------------------------------------------------------------

def in_I_n(w: WittClass, n: int) -> bool:
    if n <= 0:
        return True
    if w.e0:
        return False
    if n == 1:
        return True
    if not fl.is_square(w.rep.signed_disc()):
        return False
    if n == 2:
        return True
    F = w.field
    if F.kind != fl.RATIONALS:
        return w.is_zero()
    sig = w.data[0]
    if sig % (2 ** n):
        return False
    ents = [a.value for a in w.rep.entries]
    return all(qf._q_local_aniso_dim(ents, p) == 0 for p in qf.q_bad_primes(w.rep))


@dataclass(frozen=True)
class IotaClass:
    n: int
    rep: WittClass


def iota_class(w: WittClass, n: int) -> IotaClass:
    if not in_I_n(w, n):
        raise NotInPower(f"class is not in I^{n}")
    return IotaClass(n, w)


def iota_equal(x: IotaClass, y: IotaClass) -> bool:
    if x.n != y.n:
        return False
    return in_I_n(x.rep - y.rep, x.n + 1)


# ---------------------------------------------------------------------------
# Grothendieck-Witt classes as rank x Witt pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GWClass:
    rank: int
    witt: WittClass

    def __add__(self, other):
        return GWClass(self.rank + other.rank, self.witt + other.witt)

    def __mul__(self, other):
        return GWClass(self.rank * other.rank, self.witt * other.witt)


def gw_from_pullback(rank: int, w: WittClass) -> GWClass:
    if rank < 0:
        raise ParityMismatch("rank must be nonnegative")
    if rank % 2 != w.e0:
        raise ParityMismatch(f"rank {rank} and Witt class parity {w.e0} disagree")
    return GWClass(rank, w)


def gw_class(q: QuadForm) -> GWClass:
    return GWClass(q.rank, witt_class(q))


# ---------------------------------------------------------------------------
# Brute-force oracle for W of a finite field
# ---------------------------------------------------------------------------

def _brute_isometric(q1: QuadForm, q2: QuadForm) -> bool:
    """Search for an orthogonal basis of q1 realizing the diagonal of q2."""
    if q1.rank != q2.rank:
        return False
    F = q1.field
    g = q1.gram()
    n = q1.rank
    vecs = list(itertools.product(F.elements(), repeat=n))
    by_value = {}
    for x in vecs:
        by_value.setdefault(g.value(x), []).append(x)

    def extend(chosen):
        i = len(chosen)
        if i == n:
            return True
        for x in by_value.get(q2.entries[i], []):
            if all(g.bilinear(x, y).is_zero() for y in chosen):
                if extend(chosen + [x]):
                    return True
        return False

    return extend([])


def _brute_anisotropic(q: QuadForm) -> bool:
    F = q.field
    for x in itertools.product(F.elements(), repeat=q.rank):
        if any(not c.is_zero() for c in x) and q(x).is_zero():
            return False
    return True


@dataclass
class WittTable:
    field: FieldDesc
    reps: list
    add: dict

    @property
    def order(self):
        return len(self.reps)

    def group(self):
        from .fpgroup import FPAbGroup

        rels = [{0: 1}]
        for (i, j), k in self.add.items():
            row = {}
            for c, s in ((i, 1), (j, 1), (k, -1)):
                row[c] = row.get(c, 0) + s
            rels.append({c: s for c, s in row.items() if s})
        return FPAbGroup(self.order, rels)


def enumerate_witt_group(F: FieldDesc) -> WittTable:
    """Addition table of W(F) from exhaustively found anisotropic forms."""
    if not F.is_finite:
        raise UnsupportedField(f"{F.tag} is infinite")
    # rescaling a basis vector by c multiplies its entry by c^2, so entries
    # only need to range over units modulo squares, found here by squaring
    squares = {x * x for x in F.units()}
    units = []
    for u in F.units():
        if not any(u / v in squares for v in units):
            units.append(u)
    reps = [QuadForm(F, ())]
    for n in (1, 2, 3):
        for ents in itertools.combinations_with_replacement(units, n):
            q = QuadForm(F, ents)
            if not _brute_anisotropic(q):
                continue
            if any(_brute_isometric(q, r) for r in reps if r.rank == n):
                continue
            reps.append(q)

    def identify(q):
        _, an = qf.hyperbolic_split(q)
        for i, r in enumerate(reps):
            if r.rank == an.rank and _brute_isometric(an, r):
                return i
        raise AssertionError("anisotropic form missing from the table")

    add = {}
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            add[(i, j)] = identify(qf.orth_sum(a, b))
    return WittTable(F, reps, add)


# ---------------------------------------------------------------------------
# W, I^n and I^n / I^{n+1} of a finite field as presented groups
# ---------------------------------------------------------------------------

def witt_elements(F: FieldDesc):
    """The four Witt classes of a finite field, zero first."""
    one = F.one
    ns = F.least_nonsquare
    forms = [(), (one,), (ns,), (one, -ns)]
    return [witt_class(QuadForm(F, f)) for f in forms]


@dataclass
class ClassGroup:
    """A subquotient of W(F) realized as an FPAbGroup on class generators."""

    group: object
    elements: list
    index: dict

    def vector(self, w: WittClass):
        v = [0] * len(self.elements)
        if w in self.index:
            v[self.index[w]] = 1
            return v
        raise NotInPower(f"{w} is not in this group")


def ideal_group(F: FieldDesc, n: int, quotient=False) -> ClassGroup:
    """I^n(F), or I^n(F)/I^{n+1}(F) when ``quotient`` is set."""
    from .fpgroup import FPAbGroup

    elems = [w for w in witt_elements(F) if in_I_n(w, n)]
    index = {w: i for i, w in enumerate(elems)}
    rels = []
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            k = index[a + b]
            row = {}
            for c, s in ((i, 1), (j, 1), (k, -1)):
                row[c] = row.get(c, 0) + s
            rels.append({c: s for c, s in row.items() if s})
    rels.append({index[zero_class(F)]: 1})
    if quotient:
        for w in elems:
            if in_I_n(w, n + 1):
                rels.append({index[w]: 1})
    return ClassGroup(FPAbGroup(len(elems), rels), elems, index)
