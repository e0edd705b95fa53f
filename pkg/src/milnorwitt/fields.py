"""Exact fields of characteristic not 2 and their square-class machinery.

Supported fields are Q, F_p, F_q = F_p[x]/(m) and the rational function
field F_p(t).  Elements are immutable :class:`FieldElem` values wrapping a
canonical representation, so ``==`` and ``hash`` are structural.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import isqrt

from . import polys
from .errors import (
    DividesModulus,
    FactorizationError,
    FieldMismatch,
    NotIrreducible,
    UnsupportedField,
    UnsupportedPlace,
    ZeroElement,
)

RATIONALS = "QQ"
PRIME = "GF"
EXTENSION = "GFq"
RATFUN = "GF(t)"

DEFAULT_TRIAL_BOUND = 10**6


def _is_prime(n):
    if n < 2:
        return False
    for d in range(2, isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


@dataclass(frozen=True)
class FieldDesc:
    kind: str
    p: int = 0
    modulus: tuple = ()

    def __post_init__(self):
        if self.kind == RATIONALS:
            return
        if self.kind not in (PRIME, EXTENSION, RATFUN):
            raise UnsupportedField(f"unknown field kind {self.kind!r}")
        if self.p == 2 or not _is_prime(self.p):
            raise UnsupportedField(f"characteristic must be an odd prime, got {self.p}")
        if self.kind == EXTENSION:
            m = polys.trim(self.modulus, self.p)
            if len(m) < 3 or m[-1] != 1:
                raise NotIrreducible("extension modulus must be monic of degree >= 2")
            if not polys.is_irreducible(m, self.p):
                raise NotIrreducible(f"{polys.to_str(m, 'x')} is reducible over GF({self.p})")
            object.__setattr__(self, "modulus", m)

    # -- constructors -------------------------------------------------------
    @classmethod
    def rationals(cls):
        return cls(RATIONALS)

    @classmethod
    def prime(cls, p):
        return cls(PRIME, p)

    @classmethod
    def extension(cls, p, modulus):
        return cls(EXTENSION, p, tuple(modulus))

    @classmethod
    def ratfun(cls, p):
        return cls(RATFUN, p)

    # -- descriptive --------------------------------------------------------
    @property
    def is_finite(self):
        return self.kind in (PRIME, EXTENSION)

    @property
    def degree(self):
        return len(self.modulus) - 1 if self.kind == EXTENSION else 1

    @property
    def order(self):
        if not self.is_finite:
            raise UnsupportedField(f"{self.tag} is infinite")
        return self.p ** self.degree

    @property
    def tag(self):
        if self.kind == RATIONALS:
            return "QQ"
        if self.kind == PRIME:
            return f"GF({self.p})"
        if self.kind == EXTENSION:
            return f"GF({self.order};{polys.to_str(self.modulus, 'x')})"
        return f"GF({self.p})(t)"

    def __str__(self):
        return self.tag

    def __repr__(self):
        return f"FieldDesc({self.tag})"

    # -- element construction -----------------------------------------------
    def __call__(self, value) -> FieldElem:
        if isinstance(value, FieldElem):
            if value.field != self:
                raise FieldMismatch(f"{value} is not in {self.tag}")
            return value
        if self.kind == RATIONALS:
            return FieldElem(self, Fraction(value))
        if isinstance(value, Fraction):
            return self(value.numerator) / self(value.denominator)
        if self.kind == PRIME:
            return FieldElem(self, int(value) % self.p)
        if self.kind == EXTENSION:
            if isinstance(value, (tuple, list)):
                return FieldElem(self, polys.rem(polys.trim(value, self.p), self.modulus, self.p))
            return FieldElem(self, polys.trim([int(value)], self.p))
        # rational function field
        if isinstance(value, (tuple, list)):
            return self.ratfun_elem(value, (1,))
        return FieldElem(self, (polys.trim([int(value)], self.p), (1,)))

    def ratfun_elem(self, num, den):
        """Build ``num/den`` in F_p(t) from coefficient sequences."""
        p = self.p
        num, den = polys.trim(num, p), polys.trim(den, p)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return FieldElem(self, ((), (1,)))
        g = polys.gcd(num, den, p)
        num, den = polys.divmod_(num, g, p)[0], polys.divmod_(den, g, p)[0]
        lc = pow(den[-1], -1, p)
        return FieldElem(self, (polys.scale(num, lc, p), polys.scale(den, lc, p)))

    def gen(self):
        """The generator t of F_p(t), or x of F_p[x]/(m)."""
        if self.kind == RATFUN:
            return self.ratfun_elem((0, 1), (1,))
        if self.kind == EXTENSION:
            return FieldElem(self, (0, 1))
        raise UnsupportedField(f"{self.tag} has no polynomial generator")

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    # -- finite-field enumeration -------------------------------------------
    def element_from_index(self, idx):
        if self.kind == PRIME:
            return FieldElem(self, idx % self.p)
        c = []
        for _ in range(self.degree):
            c.append(idx % self.p)
            idx //= self.p
        return FieldElem(self, polys.trim(c, self.p))

    def elements(self):
        if not self.is_finite:
            raise UnsupportedField(f"{self.tag} is infinite")
        return _finite_elements(self)

    def units(self):
        return self.elements()[1:]

    @cached_property
    def least_nonsquare(self):
        for x in self.units():
            if not is_square(x):
                return x
        raise AssertionError("finite field without nonsquares")


@lru_cache(maxsize=None)
def _finite_elements(field):
    return tuple(field.element_from_index(i) for i in range(field.order))


@dataclass(frozen=True)
class FieldElem:
    field: FieldDesc
    value: object

    # -- predicates -----------------------------------------------------------
    def is_zero(self):
        v = self.value
        kind = self.field.kind
        if kind == RATIONALS:
            return v == 0
        if kind == PRIME:
            return v == 0
        if kind == EXTENSION:
            return v == ()
        return v[0] == ()

    def is_unit(self):
        return not self.is_zero()

    def __bool__(self):
        return not self.is_zero()

    # -- arithmetic -------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field.tag} vs {other.field.tag}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F, a, b = self.field, self.value, other.value
        if F.kind == RATIONALS:
            return FieldElem(F, a + b)
        if F.kind == PRIME:
            return FieldElem(F, (a + b) % F.p)
        if F.kind == EXTENSION:
            return FieldElem(F, polys.add(a, b, F.p))
        p = F.p
        return F.ratfun_elem(polys.add(polys.mul(a[0], b[1], p), polys.mul(b[0], a[1], p), p),
                             polys.mul(a[1], b[1], p))

    __radd__ = __add__

    def __neg__(self):
        F, a = self.field, self.value
        if F.kind == RATIONALS:
            return FieldElem(F, -a)
        if F.kind == PRIME:
            return FieldElem(F, (-a) % F.p)
        if F.kind == EXTENSION:
            return FieldElem(F, polys.neg(a, F.p))
        return FieldElem(F, (polys.neg(a[0], F.p), a[1]))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F, a, b = self.field, self.value, other.value
        if F.kind == RATIONALS:
            return FieldElem(F, a * b)
        if F.kind == PRIME:
            return FieldElem(F, (a * b) % F.p)
        if F.kind == EXTENSION:
            return FieldElem(F, polys.rem(polys.mul(a, b, F.p), F.modulus, F.p))
        p = F.p
        return F.ratfun_elem(polys.mul(a[0], b[0], p), polys.mul(a[1], b[1], p))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroElement("zero has no inverse")
        F, a = self.field, self.value
        if F.kind == RATIONALS:
            return FieldElem(F, 1 / a)
        if F.kind == PRIME:
            return FieldElem(F, pow(a, -1, F.p))
        if F.kind == EXTENSION:
            return FieldElem(F, polys.inverse_mod(a, F.modulus, F.p))
        return F.ratfun_elem(a[1], a[0])

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.field.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- finite fields ----------------------------------------------------------
    @property
    def index(self):
        """Position of the element in the canonical enumeration of a finite field."""
        F = self.field
        if F.kind == PRIME:
            return self.value
        if F.kind == EXTENSION:
            return sum(c * F.p ** i for i, c in enumerate(self.value))
        raise UnsupportedField(f"{F.tag} is infinite")

    # -- display ----------------------------------------------------------------
    def __str__(self):
        F, v = self.field, self.value
        if F.kind == RATIONALS:
            return str(v)
        if F.kind == PRIME:
            return str(v)
        if F.kind == EXTENSION:
            s = polys.to_str(v, "x")
            return s if len(v) <= 1 or "+" not in s else f"({s})"
        num, den = v
        ns = polys.to_str(num, "t")
        if den == (1,):
            return ns if "+" not in ns else f"({ns})"
        ds = polys.to_str(den, "t")
        ns = ns if "+" not in ns else f"({ns})"
        ds = ds if "+" not in ds and "*" not in ds else f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self):
        return f"FieldElem({self}@{self.field.tag})"


# ---------------------------------------------------------------------------
# Number theory on Z
# ---------------------------------------------------------------------------

def factor_int(n, bound=DEFAULT_TRIAL_BOUND):
    """Factor a nonzero integer by trial division.

    Returns ``(unit, {prime: exponent})``.  Raises :class:`FactorizationError`
    if a cofactor remains that trial division up to ``bound`` cannot certify
    as prime.
    """
    if n == 0:
        raise ZeroElement("cannot factor 0")
    unit = -1 if n < 0 else 1
    n = abs(n)
    out = {}
    d = 2
    while d * d <= n:
        if d > bound:
            raise FactorizationError(f"cofactor {n} exceeds trial bound {bound}")
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return unit, out


def squarefree_part(n, bound=DEFAULT_TRIAL_BOUND):
    unit, fac = factor_int(n, bound)
    out = unit
    for q, e in fac.items():
        if e % 2:
            out *= q
    return out


def valuation_int(n, q):
    if n == 0:
        raise ZeroElement("valuation of 0")
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v


def legendre(a, p):
    """Legendre symbol (a/p) for an odd prime p not dividing a."""
    if p == 2 or not _is_prime(p):
        raise UnsupportedField(f"{p} is not an odd prime")
    if a % p == 0:
        raise DividesModulus(f"{p} divides {a}")
    return 1 if pow(a % p, (p - 1) // 2, p) == 1 else -1


def factor(x, bound=DEFAULT_TRIAL_BOUND):
    """Factor an integer, a Fraction, or an element of Q / F_p(t).

    Returns ``(unit, {prime: exponent})``; exponents may be negative for
    fractions.  Polynomial primes are monic coefficient tuples.
    """
    if isinstance(x, FieldElem):
        F = x.field
        if x.is_zero():
            raise ZeroElement("cannot factor 0")
        if F.kind == RATIONALS:
            x = x.value
        elif F.kind == RATFUN:
            num, den = x.value
            lead, fac = polys.factor(num, F.p)
            _, dfac = polys.factor(den, F.p)
            for g, e in dfac.items():
                fac[g] = fac.get(g, 0) - e
            return F(lead), fac
        else:
            return x, {}
    if isinstance(x, Fraction):
        if x == 0:
            raise ZeroElement("cannot factor 0")
        u, fac = factor_int(x.numerator, bound)
        _, dfac = factor_int(x.denominator, bound)
        for q, e in dfac.items():
            fac[q] = fac.get(q, 0) - e
        return u, fac
    return factor_int(int(x), bound)


# ---------------------------------------------------------------------------
# Squares and square classes
# ---------------------------------------------------------------------------

def _is_int_square(n):
    return n >= 0 and isqrt(n) ** 2 == n


def is_square(x: FieldElem) -> bool:
    if x.is_zero():
        raise ZeroElement("is_square is undefined at 0")
    F = x.field
    if F.kind == RATIONALS:
        return _is_int_square(x.value.numerator) and _is_int_square(x.value.denominator)
    if F.kind == PRIME:
        return pow(x.value, (F.p - 1) // 2, F.p) == 1
    if F.kind == EXTENSION:
        return (x ** ((F.order - 1) // 2)) == F.one
    return square_class(x).rep == F.one


@dataclass(frozen=True)
class SquareClass:
    field: FieldDesc
    rep: FieldElem

    def __mul__(self, other):
        return square_class(self.rep * other.rep)

    def __str__(self):
        return str(self.rep)


def square_class(x: FieldElem) -> SquareClass:
    """Canonical representative of ``x`` modulo nonzero squares."""
    if x.is_zero():
        raise ZeroElement("zero has no square class")
    F = x.field
    if F.kind == RATIONALS:
        rep = F(squarefree_part(x.value.numerator * x.value.denominator))
    elif F.is_finite:
        rep = F.one if is_square(x) else F.least_nonsquare
    else:
        p = F.p
        num, den = x.value
        lead, fac = polys.factor(polys.mul(num, den, p), p)
        poly = (1,)
        for g, e in sorted(fac.items()):
            if e % 2:
                poly = polys.mul(poly, g, p)
        c = F.one if legendre(lead, p) == 1 else F(_least_nonsquare_mod(p))
        rep = c * F(poly)
    return SquareClass(F, rep)


@lru_cache(maxsize=None)
def _least_nonsquare_mod(p):
    for a in range(2, p):
        if pow(a, (p - 1) // 2, p) != 1:
            return a
    raise AssertionError


def square_class_reps(F: FieldDesc):
    """All square classes of a finite field, trivial class first."""
    if not F.is_finite:
        raise UnsupportedField(f"{F.tag} has infinitely many square classes")
    return (square_class(F.one), square_class(F.least_nonsquare))


# ---------------------------------------------------------------------------
# Places
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Place:
    """A place of Q (odd prime, 2, real) or of F_p(t) (monic irreducible, infinity)."""

    kind: str  # "prime", "two", "real", "poly", "inf"
    p: int = 0
    poly: tuple = ()

    @classmethod
    def prime(cls, p):
        if p == 2:
            return cls("two", 2)
        if not _is_prime(p):
            raise UnsupportedPlace(f"{p} is not prime")
        return cls("prime", p)

    @classmethod
    def two(cls):
        return cls("two", 2)

    @classmethod
    def real(cls):
        return cls("real")

    @classmethod
    def irreducible(cls, p, poly):
        poly = polys.monic(polys.trim(poly, p), p)
        if not polys.is_irreducible(poly, p):
            raise NotIrreducible(f"{polys.to_str(poly)} is reducible over GF({p})")
        return cls("poly", p, poly)

    @classmethod
    def infinity(cls, p):
        return cls("inf", p)

    @property
    def is_discrete(self):
        return self.kind != "real"

    def base_field(self):
        if self.kind in ("prime", "two", "real"):
            return FieldDesc.rationals()
        return FieldDesc.ratfun(self.p)

    def residue_field(self):
        if self.kind == "prime":
            return FieldDesc.prime(self.p)
        if self.kind == "two":
            raise UnsupportedPlace("residue field at 2 has characteristic 2")
        if self.kind == "real":
            raise UnsupportedPlace("the real place has no residue field")
        if self.kind == "inf" or len(self.poly) == 2:
            return FieldDesc.prime(self.p)
        return FieldDesc.extension(self.p, self.poly)

    def default_uniformizer(self):
        F = self.base_field()
        if self.kind in ("prime", "two"):
            return F(self.p)
        if self.kind == "poly":
            return F(self.poly)
        if self.kind == "inf":
            return F.gen().inverse()
        raise UnsupportedPlace("the real place has no uniformizer")

    def __str__(self):
        if self.kind in ("prime", "two"):
            return str(self.p)
        if self.kind == "real":
            return "real"
        if self.kind == "inf":
            return "inf"
        return f"poly({polys.to_str(self.poly)})"

    @property
    def tag(self):
        return f"{self}@{self.base_field().tag}"


def valuation(x: FieldElem, v: Place) -> int:
    if x.is_zero():
        raise ZeroElement("valuation of 0")
    if v.kind in ("prime", "two"):
        return valuation_int(x.value.numerator, v.p) - valuation_int(x.value.denominator, v.p)
    if v.kind == "poly":
        num, den = x.value
        return _poly_val(num, v.poly, v.p) - _poly_val(den, v.poly, v.p)
    if v.kind == "inf":
        num, den = x.value
        return polys.degree(den) - polys.degree(num)
    raise UnsupportedPlace("the real place is archimedean")


def _poly_val(f, g, p):
    k = 0
    while True:
        q, r = polys.divmod_(f, g, p)
        if r:
            return k
        f, k = q, k + 1


def reduce_unit(u: FieldElem, v: Place) -> FieldElem:
    """Image in the residue field of a v-unit ``u``."""
    k = v.residue_field()
    if v.kind in ("prime", "two"):
        return k(u.value.numerator) / k(u.value.denominator)
    p = v.p
    num, den = u.value
    if v.kind == "inf":
        # leading-coefficient ratio; valuation 0 forces equal degrees
        return k(num[-1]) / k(den[-1])
    if k.kind == PRIME:
        root = (-v.poly[0]) % p
        return k(polys.evaluate(num, root, p)) / k(polys.evaluate(den, root, p))
    return k(polys.rem(num, v.poly, p)) / k(polys.rem(den, v.poly, p))


def hilbert_symbol(a: FieldElem, b: FieldElem, v: Place) -> int:
    """Hilbert symbol (a, b)_v over Q at a prime (including 2) or the real place."""
    F = a.field
    if F.kind != RATIONALS or b.field != F:
        raise UnsupportedField("hilbert_symbol is implemented over QQ only")
    if a.is_zero() or b.is_zero():
        raise ZeroElement("hilbert symbol of zero")
    if v.kind == "real":
        return -1 if (a.value < 0 and b.value < 0) else 1
    if v.kind not in ("prime", "two"):
        raise UnsupportedPlace(f"{v} is not a place of QQ")
    p = v.p
    x = squarefree_part(a.value.numerator * a.value.denominator)
    y = squarefree_part(b.value.numerator * b.value.denominator)
    alpha, beta = valuation_int(x, p), valuation_int(y, p)
    u, w = x // p ** alpha, y // p ** beta
    if p != 2:
        sign = (-1) ** (alpha * beta * ((p - 1) // 2))
        lu = legendre(u, p) ** beta
        lw = legendre(w, p) ** alpha
        return sign * lu * lw
    eps = lambda n: ((n - 1) // 2) % 2
    omega = lambda n: ((n * n - 1) // 8) % 2
    e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u)
    return -1 if e % 2 else 1
