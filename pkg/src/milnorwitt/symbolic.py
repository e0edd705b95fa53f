"""Graded symbol theories over finite fields.

Three theories share one word model ``eta^r * x_1 * ... * x_k`` (eta is
central, so it is folded into a single exponent; the letters are units and
do not commute):

* ``KM``  Milnor K-theory, no eta; bilinearity and Steinberg relators.
* ``WK``  Witt K-theory: ``[ab]-[a]-[b]+eta[a][b]``, ``[a][1-a]``, ``2-eta[-1]``.
* ``MWK`` Milnor-Witt K-theory: ``{ab}-{a}-{b}-eta{a}{b}``, ``{a}{1-a}``,
  ``eta(2+eta{-1})``.

A degree-n presentation is truncated at a bound on the eta exponent.  Words
with ``r >= 1`` and at least two letters are eliminated by the degree-one
relator applied to their first two letters, so the presented group lives on
the words with ``r = 0`` or at most one letter.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import lru_cache

from . import fpgroup as fp
from . import quadform as qf
from . import wittring as wr
from .errors import IllDefinedHom, MixedDegree, TruncationOverflow, UnsupportedField
from .fields import FieldDesc, FieldElem, square_class

THEORIES = ("KM", "WK", "MWK")
DEFAULT_ETA_MAX = 2
DEFAULT_CAP = 200_000
CAP_ENV = "MILNORWITT_GENERATOR_CAP"


def generator_cap():
    raw = os.environ.get(CAP_ENV)
    return int(raw) if raw else DEFAULT_CAP


def eta_bound(n: int, eta_max: int) -> int:
    """Largest eta exponent admitted in a degree-n truncation.

    ``eta_max`` counts eta factors beyond the fewest a degree-n word can
    carry.  Low degrees get extra headroom because the relators there only
    close up with additional eta factors: two levels in degrees <= 0, one
    in degree 1.
    """
    extra = 2 if n <= 0 else (1 if n == 1 else 0)
    return max(0, -n) + eta_max + extra


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradedWord:
    theory: str
    r: int
    letters: tuple

    @property
    def degree(self):
        return len(self.letters) - self.r

    def __str__(self):
        return _word_str(self.theory, self.r, self.letters)


def _word_str(theory, r, letters):
    parts = []
    if r:
        parts.append("eta" if r == 1 else f"eta^{r}")
    if letters:
        if theory == "MWK":
            parts.append("{" + ",".join(str(a) for a in letters) + "}")
        elif theory == "WK":
            parts.extend(f"[{a}]" for a in letters)
        else:
            parts.extend(f"l({a})" for a in letters)
    return "*".join(parts) if parts else "1"


class SymbolExpr:
    """An integer combination of graded words of one degree."""

    def __init__(self, theory, field: FieldDesc, terms=None):
        if theory not in THEORIES:
            raise ValueError(f"unknown theory {theory!r}")
        self.theory = theory
        self.field = field
        out = {}
        for (r, letters), c in (terms or {}).items():
            letters = tuple(field(a) for a in letters)
            if theory == "KM" and r:
                raise ValueError("Milnor K-theory words carry no eta")
            key = (r, letters)
            out[key] = out.get(key, 0) + c
        self.terms = {k: c for k, c in out.items() if c}
        degs = {len(l) - r for r, l in self.terms}
        if len(degs) > 1:
            raise MixedDegree(f"degrees {sorted(degs)} in one expression")
        self._degree = degs.pop() if degs else None

    @classmethod
    def word(cls, theory, field, letters=(), r=0, coeff=1):
        return cls(theory, field, {(r, tuple(letters)): coeff})

    @property
    def degree(self):
        return self._degree

    def is_zero_expr(self):
        return not self.terms

    def _check(self, other):
        if other.theory != self.theory or other.field != self.field:
            raise MixedDegree("expressions from different theories or fields")

    def __add__(self, other):
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return SymbolExpr(self.theory, self.field, terms)

    def __neg__(self):
        return SymbolExpr(self.theory, self.field, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        if isinstance(c, int):
            return SymbolExpr(self.theory, self.field, {k: c * v for k, v in self.terms.items()})
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, int):
            return other * self
        self._check(other)
        terms = {}
        for (r1, l1), c1 in self.terms.items():
            for (r2, l2), c2 in other.terms.items():
                k = (r1 + r2, l1 + l2)
                terms[k] = terms.get(k, 0) + c1 * c2
        return SymbolExpr(self.theory, self.field, terms)

    def __eq__(self, other):
        return (isinstance(other, SymbolExpr) and self.theory == other.theory
                and self.field == other.field and self.terms == other.terms)

    def __hash__(self):
        return hash((self.theory, self.field, frozenset(self.terms.items())))

    def words(self):
        return [GradedWord(self.theory, r, l) for r, l in self.terms]

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for (r, l), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0], [a.index if a.field.is_finite else 0 for a in kv[0][1]])):
            w = _word_str(self.theory, r, l)
            if c == 1:
                s = w
            elif c == -1:
                s = "-" + w
            else:
                s = f"{c}*{w}" if w != "1" else str(c)
            out.append(s)
        text = out[0]
        for s in out[1:]:
            text += s if s.startswith("-") else "+" + s
        return text

    def __repr__(self):
        return f"SymbolExpr({self}@{self.field.tag})"

    def tag(self):
        return f"{self}@{self.field.tag}"


def eta(theory, field, power=1):
    return SymbolExpr.word(theory, field, (), power)


def sym(theory, field, *letters):
    return SymbolExpr.word(theory, field, letters)


def one(theory, field):
    return SymbolExpr.word(theory, field, ())


def bracket_mw(field, a):
    """<a>_MW = 1 - eta[a] in Witt K-theory."""
    return one("WK", field) - eta("WK", field) * sym("WK", field, a)


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------

class _Units:
    """Index arithmetic on the unit group of a finite field."""

    def __init__(self, F: FieldDesc):
        self.field = F
        self.elems = list(F.units())
        self.index = {u: i for i, u in enumerate(self.elems)}
        m = len(self.elems)
        self.mul = [[self.index[a * b] for b in self.elems] for a in self.elems]
        self.one = self.index[F.one]
        self.minus_one = self.index[-F.one]
        self.one_minus = {i: self.index[F.one - a] for i, a in enumerate(self.elems) if a != F.one}
        self.sq_class = [0 if square_class(a).rep == F.one else 1 for a in self.elems]
        self.count = m


@dataclass
class _Instance:
    kind: str
    terms: list  # [(coeff, (r, letters))]


class Presentation:
    """The truncated degree-n group of a theory over a finite field."""

    def __init__(self, theory, F: FieldDesc, n: int, eta_max: int = DEFAULT_ETA_MAX,
                 literal_mw2: bool = False, cap: int | None = None):
        if theory not in THEORIES:
            raise ValueError(f"unknown theory {theory!r}")
        if not F.is_finite:
            raise UnsupportedField("presentations are built over finite fields only")
        if eta_max < 0:
            raise ValueError("eta_max must be nonnegative")
        self.theory = theory
        self.field = F
        self.n = n
        self.eta_max = eta_max
        self.literal_mw2 = literal_mw2
        self.units = _Units(F)
        self.R = 0 if theory == "KM" else eta_bound(n, eta_max)
        self.num_words = self._count_words()
        cap = generator_cap() if cap is None else cap
        if self.num_words > cap:
            raise TruncationOverflow(f"{self.num_words} generators exceed the cap {cap}")
        self._nf_cache = {}
        self.basis = self._basis_words()
        self.basis_index = {w: i for i, w in enumerate(self.basis)}
        self.num_relations = 0
        rows = {}
        for inst in self.instances():
            self.num_relations += 1
            row = self._row(inst.terms)
            if row:
                key = tuple(sorted(row.items()))
                if key[0][1] < 0:
                    key = tuple((i, -x) for i, x in key)
                rows[key] = None
        self.group = fp.FPAbGroup(len(self.basis), [dict(k) for k in rows])

    # -- words ----------------------------------------------------------------
    def _count_words(self):
        m = self.units.count
        if self.theory == "KM":
            return m ** self.n if self.n >= 0 else 0
        return sum(m ** (self.n + r) for r in range(max(0, -self.n), self.R + 1))

    def _basis_words(self):
        m = self.units.count
        n = self.n
        out = []
        if self.theory == "KM":
            if n >= 0:
                out = [(0, w) for w in itertools.product(range(m), repeat=n)]
            return out
        for r in range(max(0, -n), self.R + 1):
            k = n + r
            if r == 0 or k <= 1:
                out.extend((r, w) for w in itertools.product(range(m), repeat=k))
        return out

    def normal_form(self, word):
        """Rewrite an index word into a sparse combination of basis indices."""
        hit = self._nf_cache.get(word)
        if hit is not None:
            return hit
        r, letters = word
        if self.theory == "KM" or r == 0 or len(letters) <= 1:
            idx = self.basis_index.get(word)
            if idx is None:
                raise TruncationOverflow(f"word {word} lies outside the truncation")
            out = {idx: 1}
        else:
            a, b = letters[0], letters[1]
            rest = letters[2:]
            ab = self.units.mul[a][b]
            if self.theory == "MWK" and not self.literal_mw2:
                # eta{a}{b} = {ab} - {a} - {b}
                parts = [(1, (ab,)), (-1, (a,)), (-1, (b,))]
            else:
                # eta[a][b] = [a] + [b] - [ab]
                parts = [(1, (a,)), (1, (b,)), (-1, (ab,))]
            out = {}
            for c, head in parts:
                for i, x in self.normal_form((r - 1, head + rest)).items():
                    out[i] = out.get(i, 0) + c * x
            out = {i: x for i, x in out.items() if x}
        self._nf_cache[word] = out
        return out

    def _row(self, terms):
        row = {}
        for c, w in terms:
            for i, x in self.normal_form(w).items():
                row[i] = row.get(i, 0) + c * x
        return {i: x for i, x in row.items() if x}

    # -- relator instances ----------------------------------------------------
    def _contexts(self, length):
        m = self.units.count
        for total in [length]:
            if total < 0:
                return
            for xs in itertools.product(range(m), repeat=total):
                for cut in range(total + 1):
                    yield xs[:cut], xs[cut:]

    def instances(self):
        """Every two-sided relator instance eta^s * x * rho * y within the truncation."""
        U = self.units
        n, R = self.n, self.R
        m = U.count
        if self.theory == "KM":
            if n < 1:
                return
            for x, y in self._contexts(n - 1):
                for a in range(m):
                    for b in range(m):
                        yield _Instance("bilinear", [(1, (0, x + (U.mul[a][b],) + y)),
                                                     (-1, (0, x + (a,) + y)),
                                                     (-1, (0, x + (b,) + y))])
            if n >= 2:
                for x, y in self._contexts(n - 2):
                    for a, b in U.one_minus.items():
                        yield _Instance("steinberg", [(1, (0, x + (a, b) + y))])
            return
        mw = self.theory == "MWK"
        sign2 = -1 if (mw and not self.literal_mw2) else 1
        # degree-one relator: [ab] - [a] - [b] +- eta[a][b]
        for s in range(0, R):
            for x, y in self._contexts(n - 1 + s):
                for a in range(m):
                    for b in range(m):
                        yield _Instance("mult", [(1, (s, x + (U.mul[a][b],) + y)),
                                                 (-1, (s, x + (a,) + y)),
                                                 (-1, (s, x + (b,) + y)),
                                                 (sign2, (s + 1, x + (a, b) + y))])
        # Steinberg relator [a][1-a]
        for s in range(0, R + 1):
            for x, y in self._contexts(n - 2 + s):
                for a, b in U.one_minus.items():
                    yield _Instance("steinberg", [(1, (s, x + (a, b) + y))])
        mo = U.minus_one
        if mw:
            # eta * (2 + eta{-1})
            for s in range(0, R - 1):
                for x, y in self._contexts(n + 1 + s):
                    yield _Instance("hyperbolic", [(2, (s + 1, x + y)),
                                                   (1, (s + 2, x + (mo,) + y))])
        else:
            # 2 - eta[-1]
            for s in range(0, R):
                for x, y in self._contexts(n + s):
                    yield _Instance("hyperbolic", [(2, (s, x + y)),
                                                   (-1, (s + 1, x + (mo,) + y))])

    # -- conversion -----------------------------------------------------------
    def index_word(self, r, letters):
        return (r, tuple(self.units.index[self.field(a)] for a in letters))

    def vector(self, e: SymbolExpr):
        if e.theory != self.theory or e.field != self.field:
            raise MixedDegree("expression does not belong to this presentation")
        if e.terms and e.degree != self.n:
            raise MixedDegree(f"expression of degree {e.degree} in a degree-{self.n} group")
        out = {}
        for (r, letters), c in e.terms.items():
            w = self.index_word(r, letters)
            for i, x in self.normal_form(w).items():
                out[i] = out.get(i, 0) + c * x
        return {i: x for i, x in out.items() if x}

    def is_zero(self, e: SymbolExpr) -> bool:
        return self.group.element_is_zero(self.vector(e))

    def word_expr(self, w):
        r, letters = w
        return SymbolExpr.word(self.theory, self.field, [self.units.elems[i] for i in letters], r)

    def invariant_factors(self):
        return self.group.invariant_factors()

    def describe(self):
        free, tors = self.invariant_factors()
        return {"free": free, "torsion": tors, "eta_bound": self.R, "words": self.num_words,
                "basis": len(self.basis), "relations": self.num_relations}


_PRESENTATIONS = {}


def present_group(theory, F: FieldDesc, n: int, eta_max: int = DEFAULT_ETA_MAX,
                  literal_mw2: bool = False) -> Presentation:
    key = (theory, F, n, eta_max if theory != "KM" else 0, literal_mw2, generator_cap())
    if key not in _PRESENTATIONS:
        _PRESENTATIONS[key] = Presentation(theory, F, n, eta_max, literal_mw2)
    return _PRESENTATIONS[key]


def normal_form_zero(e: SymbolExpr, F: FieldDesc | None = None, eta_max: int = DEFAULT_ETA_MAX) -> bool:
    """True iff e vanishes in the truncated presentation of its degree.

    ``True`` is conclusive; ``False`` may reflect the truncation.
    """
    F = F or e.field
    if e.is_zero_expr():
        return True
    n = e.degree
    needed = max(r for r, _ in e.terms)
    em = eta_max
    while eta_bound(n, em) < needed:
        em += 1
    if e.theory == "KM" and n < 0:
        return True
    return present_group(e.theory, F, n, em).is_zero(e)


# ---------------------------------------------------------------------------
# Target groups and comparison maps
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _pfister_class(F: FieldDesc, classes: tuple):
    """Witt class of <<u_1..u_k>> from the square classes of the slots."""
    ns = F.least_nonsquare
    slots = [ns if c else F.one for c in classes]
    return wr.witt_class(qf.pfister(F, *slots).expand())


def pfister_class(pres: Presentation, letters) -> wr.WittClass:
    U = pres.units
    return _pfister_class(pres.field, tuple(U.sq_class[i] for i in letters))


@lru_cache(maxsize=None)
def ideal_group(F: FieldDesc, n: int, quotient: bool = False) -> wr.ClassGroup:
    return wr.ideal_group(F, n, quotient)


@lru_cache(maxsize=None)
def milnor_group(F: FieldDesc, n: int) -> Presentation | None:
    return None if n < 0 else present_group("KM", F, n)


@lru_cache(maxsize=None)
def _km_group(F, n):
    P = milnor_group(F, n)
    return fp.trivial_group() if P is None else P.group


class ComparisonMap:
    """A GroupHom between presentations together with a word-level certificate."""

    def __init__(self, name, source, hom: fp.GroupHom, word_certificate: bool):
        self.name = name
        self.source = source
        self.hom = hom
        self.word_certificate = word_certificate
        if not (hom.well_defined and word_certificate):
            raise IllDefinedHom(f"{name}: a relator does not map to zero")

    @property
    def well_defined(self):
        return bool(self.hom.well_defined and self.word_certificate)


def _word_certificate(pres: Presentation, word_image, target: fp.FPAbGroup):
    """Check every original relator instance maps to zero, word by word."""
    # coordinates are linear, so each distinct word is reduced only once
    cache = {}
    for inst in pres.instances():
        terms = []
        for c, w in inst.terms:
            img = cache.get(w)
            if img is None:
                img = target.canonical_coords(word_image(w))
                cache[w] = img
            terms.append((c, img))
        if any(target.combine_coords(terms)):
            return False
    return True


def _class_map(pres, n, sign_fn):
    target = ideal_group(pres.field, n)

    def image(w):
        r, letters = w
        v = target.vector(pfister_class(pres, letters))
        s = sign_fn(r, letters)
        return {i: s * x for i, x in enumerate(v) if x}

    return target, image


def theta_map(F: FieldDesc, n: int, eta_max: int = DEFAULT_ETA_MAX) -> ComparisonMap:
    """eta^r[u_1..u_k] -> <<u_1..u_k>> in I^n."""
    P = present_group("WK", F, n, eta_max)
    target, image = _class_map(P, n, lambda r, l: 1)
    hom = fp.GroupHom(P.group, target.group, [image(w) for w in P.basis])
    return ComparisonMap("theta", P, hom, _word_certificate(P, image, target.group))


def upsilon_map(F: FieldDesc, n: int, eta_max: int = DEFAULT_ETA_MAX) -> ComparisonMap:
    """eta^r{u_1..u_k} -> (-1)^k <<u_1..u_k>> in I^n."""
    P = present_group("MWK", F, n, eta_max)
    target, image = _class_map(P, n, lambda r, l: -1 if len(l) % 2 else 1)
    hom = fp.GroupHom(P.group, target.group, [image(w) for w in P.basis])
    return ComparisonMap("upsilon", P, hom, _word_certificate(P, image, target.group))


def varpi_map(F: FieldDesc, n: int, eta_max: int = DEFAULT_ETA_MAX) -> ComparisonMap:
    """Kill eta: {u_1..u_n} -> l(u_1)...l(u_n)."""
    P = present_group("MWK", F, n, eta_max)
    K = milnor_group(F, n)
    target = _km_group(F, n)

    def image(w):
        r, letters = w
        if r or K is None:
            return {}
        return dict(K.normal_form((0, letters)))

    hom = fp.GroupHom(P.group, target, [image(w) for w in P.basis])
    return ComparisonMap("varpi", P, hom, _word_certificate(P, image, target))


def epsilon_map(F: FieldDesc, n: int, eta_max: int = DEFAULT_ETA_MAX) -> ComparisonMap:
    """W-theory in degree n+1 to MWK_n: eta^r[u] -> (-1)^(n+r+1) eta^(r+1){u}."""
    P = present_group("WK", F, n + 1, eta_max)
    M = present_group("MWK", F, n, eta_max)

    def image(w):
        r, letters = w
        s = -1 if (n + r + 1) % 2 else 1
        return {i: s * x for i, x in M.normal_form((r + 1, letters)).items()}

    hom = fp.GroupHom(P.group, M.group, [image(w) for w in P.basis])
    return ComparisonMap("epsilon", P, hom, _word_certificate(P, image, M.group))


def e_map(F: FieldDesc, n: int) -> ComparisonMap:
    """l(u_1)..l(u_n) -> <<u_1..u_n>> + I^{n+1}."""
    K = milnor_group(F, n)
    target = ideal_group(F, n, quotient=True)
    if K is None:
        hom = fp.GroupHom(_km_group(F, n), target.group, [])
        return ComparisonMap("e", None, hom, True)

    def image(w):
        _, letters = w
        v = target.vector(pfister_class(K, letters))
        return {i: x for i, x in enumerate(v) if x}

    hom = fp.GroupHom(K.group, target.group, [image(w) for w in K.basis])
    return ComparisonMap("e", K, hom, _word_certificate(K, image, target.group))


def quotient_map(F: FieldDesc, n: int) -> fp.GroupHom:
    """I^n -> I^n / I^{n+1} on class generators."""
    A = ideal_group(F, n)
    C = ideal_group(F, n, quotient=True)
    return fp.GroupHom(A.group, C.group, [{i: 1} for i in range(len(A.elements))])


def upsilon_element(e: SymbolExpr) -> wr.WittClass:
    """Element-level Upsilon over any supported field: eta^r{u_1..u_k} -> (-1)^k <<u_1..u_k>>."""
    if e.theory != "MWK":
        raise MixedDegree("Upsilon is defined on Milnor-Witt expressions")
    F = e.field
    out = wr.zero_class(F)
    for (r, letters), c in e.terms.items():
        w = wr.witt_class(qf.pfister(F, *letters).expand())
        sign = -1 if len(letters) % 2 else 1
        out = out + (sign * c) * w
    return out


def varpi_element(e: SymbolExpr) -> SymbolExpr:
    """Element-level varpi: drop words carrying eta, keep the rest as Milnor symbols."""
    if e.theory != "MWK":
        raise MixedDegree("varpi is defined on Milnor-Witt expressions")
    return SymbolExpr("KM", e.field, {(0, l): c for (r, l), c in e.terms.items() if r == 0})


def _km_is_zero_finite(e: SymbolExpr) -> bool:
    """K^M over a finite field: Z in degree 0, the unit group in degree 1, 0 above."""
    n = e.degree
    if n is None or n < 0 or n >= 2:
        return True
    if n == 0:
        return sum(e.terms.values()) == 0
    prod = e.field.one
    for (_, (a,)), c in e.terms.items():
        prod = prod * a ** c
    return prod == e.field.one


def invariant_zero(e: SymbolExpr) -> bool:
    """Exact zero test over a finite field through the comparison maps.

    KM uses the closed forms of K^M; MWK vanishes iff its Upsilon and varpi
    images do; WK iff its image in W does.  Unlike :func:`normal_form_zero`
    this needs no truncation, so it copes with long eta powers.
    """
    F = e.field
    if not F.is_finite:
        raise UnsupportedField("invariant zero tests need a finite field")
    if e.is_zero_expr():
        return True
    if e.theory == "KM":
        return _km_is_zero_finite(e)
    if e.theory == "MWK":
        return upsilon_element(e).is_zero() and _km_is_zero_finite(varpi_element(e))
    out = wr.zero_class(F)
    for (r, letters), c in e.terms.items():
        out = out + c * wr.witt_class(qf.pfister(F, *letters).expand())
    return out.is_zero()


def symbol_is_zero(e: SymbolExpr, eta_max: int = DEFAULT_ETA_MAX) -> bool:
    """Zero test over a finite field: the truncated presentation, or the invariants if it is too big."""
    if e.is_zero_expr():
        return True
    try:
        return normal_form_zero(e, e.field, eta_max)
    except TruncationOverflow:
        return invariant_zero(e)


# ---------------------------------------------------------------------------
# Structure checks
# ---------------------------------------------------------------------------

def _factors(G):
    free, tors = G.invariant_factors()
    return {"free": free, "torsion": tors}


def verify_theta(F: FieldDesc, n: int, eta_max: int = DEFAULT_ETA_MAX) -> dict:
    th = theta_map(F, n, eta_max)
    iso = fp.is_isomorphism(th.hom)
    return {"field": F.tag, "degree": n, "eta_max": eta_max,
            "source": _factors(th.hom.source), "target": _factors(th.hom.target),
            "well_defined": th.well_defined, "isomorphism": iso, "ok": th.well_defined and iso}


def verify_pullback(F: FieldDesc, n: int, eta_max: int = DEFAULT_ETA_MAX) -> dict:
    ups = upsilon_map(F, n, eta_max)
    var = varpi_map(F, n, eta_max)
    e = e_map(F, n)
    q = quotient_map(F, n)
    commutes = fp.homs_equal(fp.compose(q, ups.hom), fp.compose(e.hom, var.hom))
    pb = fp.pullback(q, e.hom)
    inj, onto = fp.pullback_contains_image(pb, ups.hom, var.hom)
    ok = commutes and inj and onto and ups.well_defined and var.well_defined and e.well_defined
    return {
        "field": F.tag, "degree": n, "eta_max": eta_max,
        "corners": {
            "MWK": _factors(ups.hom.source),
            "I^n": _factors(q.source),
            "K^M": _factors(e.hom.source),
            "I^n/I^(n+1)": _factors(q.target),
            "pullback": _factors(pb.group),
        },
        "commutes": commutes, "injective": inj, "surjective": onto,
        "well_defined": {"upsilon": ups.well_defined, "varpi": var.well_defined, "e": e.well_defined},
        "ok": ok,
    }


def verify_exact_sequence(F: FieldDesc, n: int, eta_max: int = DEFAULT_ETA_MAX) -> dict:
    """0 -> W-theory_{n+1} -eps-> MWK_n -varpi-> K^M_n -> 0."""
    eps = epsilon_map(F, n, eta_max)
    var = varpi_map(F, n, eta_max)
    inj = fp.is_injective(eps.hom)
    middle = fp.kernel_equals_image(eps.hom, var.hom)
    onto = fp.is_surjective(var.hom)
    ok = inj and middle and onto and eps.well_defined and var.well_defined
    return {
        "field": F.tag, "degree": n, "eta_max": eta_max,
        "groups": {"W_(n+1)": _factors(eps.hom.source), "MWK_n": _factors(var.hom.source),
                   "K^M_n": _factors(var.hom.target)},
        "epsilon_injective": inj, "exact_middle": middle, "varpi_surjective": onto,
        "well_defined": {"epsilon": eps.well_defined, "varpi": var.well_defined},
        "ok": ok,
    }


# ---------------------------------------------------------------------------
# Presentations of W, I and I^n by generators and relations
# ---------------------------------------------------------------------------

def _witt_relation_terms(F, a, b):
    s = a + b
    return [(1, a), (1, b), (-1, s), (-1, a * b * s)]


def presentation_I_n(F: FieldDesc, n: int, literal: bool = False):
    """The group given by the listed generators and relators for W (n <= 0), I (n = 1), I^n.

    ``literal`` swaps the W relator [1] + [-1] for [1] - [-1]; that variant
    does not present W and is kept only so the difference can be checked.
    """
    if not F.is_finite:
        raise UnsupportedField("presentation checks need a finite field")
    units = list(F.units())
    if n <= 1:
        idx = {u: i for i, u in enumerate(units)}
        rels = []
        if n <= 0:
            sign = -1 if literal else 1
            rels.append({idx[F.one]: 1, idx[-F.one]: sign})
        else:
            rels.append({idx[F.one]: 1})
        for a in units:
            for b in units:
                row = {}
                for c, x in ((idx[a * b * b], 1), (idx[a], -1)):
                    row[c] = row.get(c, 0) + x
                rels.append(row)
                if not (a + b).is_zero():
                    row = {}
                    for c, x in _witt_relation_terms(F, a, b):
                        row[idx[x]] = row.get(idx[x], 0) + c
                    rels.append(row)
        return fp.FPAbGroup(len(units), rels)
    # generators: isometry classes of n-Pfister forms
    tuples = list(itertools.product(units, repeat=n))
    classes = []
    gen_of = {}
    for t in tuples:
        q = qf.pfister(F, *t).expand()
        for i, rep in enumerate(classes):
            if qf.is_isometric(q, rep):
                gen_of[t] = i
                break
        else:
            gen_of[t] = len(classes)
            classes.append(q)
    rels = [{gen_of[(F.one,) * n]: 1}]

    def add(row, t, c):
        g = gen_of[t]
        row[g] = row.get(g, 0) + c

    for a in units:
        for b in units:
            if (a + b).is_zero():
                continue
            for cs in itertools.product(units, repeat=n - 1):
                row = {}
                for c, x in _witt_relation_terms(F, a, b):
                    add(row, (x,) + cs, c)
                rels.append(row)
    for a, b, c in itertools.product(units, repeat=3):
        for ds in itertools.product(units, repeat=n - 2):
            row = {}
            add(row, (a, b) + ds, 1)
            add(row, (a * b, c) + ds, 1)
            add(row, (b, c) + ds, -1)
            add(row, (a, b * c) + ds, -1)
            rels.append(row)
    return fp.FPAbGroup(len(classes), rels)


def oracle_ideal_group(F: FieldDesc, n: int) -> fp.FPAbGroup:
    """I^n(F) from the brute-force Witt table: the subgroup generated by n-Pfister classes."""
    table = _oracle_table(F)
    W = table.group()
    if n <= 0:
        return W
    if n == 1:
        gens = [i for i, rep in enumerate(table.reps) if rep.rank % 2 == 0]
    else:
        gens = set()
        for t in itertools.product(F.units(), repeat=n):
            gens.add(_oracle_identify(table, qf.pfister(F, *t).expand()))
        gens = sorted(gens)
    # subgroup of the finite group W generated by gens, as its own presentation
    elems = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = table.add[(x, g)]
            if y not in elems:
                elems.add(y)
                frontier.append(y)
    elems = sorted(elems)
    idx = {e: i for i, e in enumerate(elems)}
    rels = [{idx[0]: 1}]
    for a in elems:
        for b in elems:
            row = {}
            for c, x in ((idx[a], 1), (idx[b], 1), (idx[table.add[(a, b)]], -1)):
                row[c] = row.get(c, 0) + x
            rels.append(row)
    return fp.FPAbGroup(len(elems), rels)


@lru_cache(maxsize=None)
def _oracle_table(F):
    return wr.enumerate_witt_group(F)


def _oracle_identify(table, q):
    _, an = qf.hyperbolic_split(q)
    for i, rep in enumerate(table.reps):
        if rep.rank == an.rank and wr._brute_isometric(an, rep):
            return i
    raise AssertionError("form missing from the Witt table")


def presentation_check_I_n(F: FieldDesc, n: int) -> dict:
    G = presentation_I_n(F, n)
    O = oracle_ideal_group(F, n)
    got, want = G.invariant_factors(), O.invariant_factors()
    return {"field": F.tag, "degree": n, "presented": {"free": got[0], "torsion": got[1]},
            "oracle": {"free": want[0], "torsion": want[1]}, "ok": got == want}
