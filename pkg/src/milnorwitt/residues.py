"""Second residue maps at discrete places of Q and F_p(t).

For Witt classes, <u pi^i> goes to <u-bar> when i is odd and to 0 when i is
even.  For Milnor and Milnor-Witt symbols every letter ``u pi^i`` is first
expanded into letters ``{u}`` and ``{pi}`` by the degree-one relation, the
``{pi}`` letters are moved to the front (each swap costs the central factor
epsilon, which is -1 in K^M and -1 - eta{-1} in K^MW), repeated ``{pi}{pi}``
collapse to ``{pi}{-1}``, and finally ``d({pi}{u_2..u_n}) = {u_2-bar..u_n-bar}``,
``d`` of a word without ``{pi}`` being 0.  All rewriting steps are valid
relations, so the result is the residue of the element, not of a
representative.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

from . import fields as fl
from . import quadform as qf
from . import wittring as wr
from .errors import UnsupportedField, UnsupportedPlace, ZeroElement
from .fields import FieldDesc, FieldElem, Place
from .quadform import QuadForm
from .symbolic import SymbolExpr

PI = None  # marks the uniformizer letter inside expansions


def normalize_at(x: FieldElem, v: Place, pi: FieldElem | None = None, parity=False):
    """(u, i) with x = u * pi^i and u a v-unit.

    With ``parity`` the exponent is reduced mod 2, so x equals u * pi^i only up
    to a square, which is all a Witt computation sees.
    """
    _check_place(x.field, v)
    if x.is_zero():
        raise ZeroElement("cannot normalize 0")
    u, i = qf.normalize_at(x, v, _uniformizer(v, pi))
    return (u, i % 2) if parity else (u, i)


def _check_place(F: FieldDesc, v: Place):
    if v.kind == "real":
        raise UnsupportedPlace("the real place has no residue map")
    if v.base_field() != F:
        raise UnsupportedPlace(f"{v} is not a place of {F.tag}")


def _uniformizer(v: Place, pi):
    if pi is None:
        return v.default_uniformizer()
    pi = v.base_field()(pi)
    if fl.valuation(pi, v) != 1:
        raise UnsupportedPlace(f"{pi} is not a uniformizer at {v}")
    return pi


# ---------------------------------------------------------------------------
# Witt classes
# ---------------------------------------------------------------------------

def residue_witt(q, v: Place, pi=None) -> wr.WittClass:
    """Second residue of a form (or a Witt class) into W of the residue field."""
    if isinstance(q, wr.WittClass):
        q = q.rep
    _check_place(q.field, v)
    if v.kind == "two":
        raise UnsupportedPlace("the residue field at 2 has characteristic 2; use residue_parity_two")
    return wr.residue_class(q, v, _uniformizer(v, pi))


def residue_parity_two(q) -> int:
    """Nonstandard Z/2 surrogate at the place 2 of Q: entries of odd 2-adic valuation, mod 2."""
    if isinstance(q, wr.WittClass):
        q = q.rep
    if q.field.kind != fl.RATIONALS:
        raise UnsupportedField("the place 2 belongs to QQ")
    return wr.par2(q)


# ---------------------------------------------------------------------------
# Symbols
# ---------------------------------------------------------------------------

def _combine(x, y, theory):
    """Expansion of {ab} from expansions of {a} and {b}: {a}+{b}(+eta{a}{b})."""
    out = list(x) + list(y)
    if theory == "MWK":
        out += [(c1 * c2, r1 + r2 + 1, l1 + l2) for c1, r1, l1 in x for c2, r2, l2 in y]
    return out


@lru_cache(maxsize=None)
def _pi_power(i, theory):
    if i == 0:
        return ()
    if i == 1:
        return ((1, 0, (PI,)),)
    if i == -1:
        # {pi^-1} = -<pi>{pi} = -{pi} - eta{pi}{pi}
        out = [(-1, 0, (PI,))]
        if theory == "MWK":
            out.append((-1, 1, (PI, PI)))
        return tuple(out)
    step = 1 if i > 0 else -1
    return tuple(_combine(_pi_power(step, theory), _pi_power(i - step, theory), theory))


def _expand_letter(a: FieldElem, v: Place, pi, theory):
    u, i = qf.normalize_at(a, v, pi)
    unit = [] if u == a.field.one else [(1, 0, (u,))]
    return _combine(unit, _pi_power(i, theory), theory)


def _word_product(parts):
    out = [(1, 0, ())]
    for part in parts:
        out = [(c1 * c2, r1 + r2, l1 + l2) for c1, r1, l1 in out for c2, r2, l2 in part]
    return out


def _bring_pi_forward(letters, F: FieldDesc):
    """Rewrite a word in {pi} and unit letters as eps^s * {pi} * units, or None if no {pi}."""
    seq = list(letters)
    swaps = 0
    minus_one = F(-1)
    while True:
        pis = [j for j, x in enumerate(seq) if x is PI]
        if not pis:
            return None
        lead = 0
        while lead < len(seq) and seq[lead] is PI:
            lead += 1
        if lead == len(pis):
            if lead == 1:
                return swaps % 2, seq[1:]
            seq[1] = minus_one  # {pi}{pi} = {pi}{-1}
            continue
        j = next(j for j in pis if j > lead)
        seq[j - 1], seq[j] = seq[j], seq[j - 1]
        swaps += 1


def _residue_symbol(e: SymbolExpr, v: Place, pi, theory):
    F = e.field
    _check_place(F, v)
    if v.kind == "two":
        raise UnsupportedPlace("residues at 2 land in characteristic 2")
    pi = _uniformizer(v, pi)
    k = v.residue_field()
    out = {}

    def emit(c, r, units):
        key = (r, tuple(units))
        out[key] = out.get(key, 0) + c

    for (r, letters), c in e.terms.items():
        parts = [_expand_letter(a, v, pi, theory) for a in letters]
        for c2, r2, seq in _word_product(parts):
            got = _bring_pi_forward(seq, F)
            if got is None:
                continue
            eps, units = got
            bar = [fl.reduce_unit(u, v) for u in units]
            if any(b == k.one for b in bar):
                continue  # {1} = 0
            coeff = c * c2
            if not eps:
                emit(coeff, r + r2, bar)
            else:
                emit(-coeff, r + r2, bar)
                if theory == "MWK":
                    emit(-coeff, r + r2 + 1, [k(-1)] + bar)
    return SymbolExpr(theory, k, {key: c for key, c in out.items() if c})


def residue_milnor(e: SymbolExpr, v: Place, pi=None) -> SymbolExpr:
    if e.theory != "KM":
        raise UnsupportedField("residue_milnor expects a Milnor K-theory expression")
    return _residue_symbol(e, v, pi, "KM")


def residue_mw(e: SymbolExpr, v: Place, pi=None) -> SymbolExpr:
    if e.theory != "MWK":
        raise UnsupportedField("residue_mw expects a Milnor-Witt expression")
    return _residue_symbol(e, v, pi, "MWK")


def residue(e, v: Place, pi=None):
    """Dispatch on the kind of ``e``: forms and Witt classes, KM or MWK symbols."""
    if isinstance(e, SymbolExpr):
        if e.theory == "KM":
            return residue_milnor(e, v, pi)
        if e.theory == "MWK":
            return residue_mw(e, v, pi)
        raise UnsupportedField("residues are defined for KM and MWK symbols")
    return residue_witt(e, v, pi)


# ---------------------------------------------------------------------------
# Support and unramified checks
# ---------------------------------------------------------------------------

def _places_of(x: FieldElem, odd_only: bool):
    F = x.field
    if F.kind == fl.RATIONALS:
        _, fac = fl.factor(x.value)
        return [Place.prime(p) for p, e in fac.items() if (e % 2 if odd_only else e)]
    if F.kind == fl.RATFUN:
        _, fac = fl.factor(x)
        out = [Place("poly", F.p, g) for g, e in fac.items() if (e % 2 if odd_only else e)]
        d = fl.valuation(x, Place.infinity(F.p))
        if (d % 2 if odd_only else d):
            out.append(Place.infinity(F.p))
        return out
    raise UnsupportedField(f"{F.tag} has no discrete places")


def _place_key(v: Place):
    order = {"two": 0, "prime": 1, "poly": 2, "inf": 3}
    return (order[v.kind], v.p, len(v.poly), v.poly)


def support(e) -> list:
    """Places where a residue of ``e`` may be nonzero, sorted.

    The place 2 of Q is included when it qualifies; its residue is only
    available through the parity surrogate.
    """
    if isinstance(e, wr.WittClass):
        e = e.rep
    places = set()
    if isinstance(e, QuadForm):
        for a in e.entries:
            places.update(_places_of(a, odd_only=True))
    elif isinstance(e, SymbolExpr):
        for (_, letters) in e.terms:
            for a in letters:
                places.update(_places_of(a, odd_only=False))
    else:
        raise TypeError(f"no support for {type(e).__name__}")
    return sorted(places, key=_place_key)


def _serialize(x):
    if isinstance(x, wr.WittClass):
        return x.to_json()
    if isinstance(x, SymbolExpr):
        return x.tag()
    return x


def _is_zero(x):
    if isinstance(x, wr.WittClass):
        return x.is_zero()
    if isinstance(x, SymbolExpr):
        if x.is_zero_expr():
            return True
        from .symbolic import symbol_is_zero

        if x.field.is_finite:
            return symbol_is_zero(x)
        return False
    return not x


@dataclass
class UnramifiedReport:
    verdict: str  # "unramified", "ramified", "undetermined"
    residues: dict = dc_field(default_factory=dict)
    skipped: dict = dc_field(default_factory=dict)
    uniformizers: dict = dc_field(default_factory=dict)

    @property
    def unramified(self):
        return self.verdict == "unramified"

    def to_json(self):
        return {"verdict": self.verdict, "residues": self.residues,
                "skipped": self.skipped, "uniformizers": self.uniformizers}


def unramified_check(e, places=None) -> UnramifiedReport:
    """Residues at every support place (or the given places); nonzero ones are reported."""
    if isinstance(e, wr.WittClass):
        e = e.rep
    plist = support(e) if places is None else sorted(places, key=_place_key)
    report = UnramifiedReport("unramified")
    for v in plist:
        name = str(v)
        if v.kind == "two":
            if isinstance(e, QuadForm):
                par = residue_parity_two(e)
                report.uniformizers[name] = "2"
                if par:
                    report.residues[name] = {"parity_surrogate": par}
            else:
                report.skipped[name] = "residue field of characteristic 2"
            continue
        pi = v.default_uniformizer()
        report.uniformizers[name] = str(pi)
        r = residue(e, v, pi)
        if not _is_zero(r):
            report.residues[name] = _serialize(r)
    if report.residues:
        report.verdict = "ramified"
    elif report.skipped:
        report.verdict = "undetermined"
    return report
