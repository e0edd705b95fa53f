"""Text syntax for fields, elements, forms, symbols and places.

Every object is written ``<body>@<field tag>``::

    diag(1,-1,7)@QQ        pfister(3,5)@GF(7)      gram([[0,1],[1,0]])@QQ
    eta^2*{3,5}@GF(7)      [3]*[5]@GF(7)           l(3)*l(5)@GF(7)
    7@QQ   real@QQ   poly(t^2+1)@GF(3)(t)   inf@GF(3)(t)
    (t^2+1)/t@GF(3)(t)     x+1@GF(9;x^2+1)

The ``tag``/``str`` methods of the corresponding classes produce text that
parses back to an equal value.
"""

from __future__ import annotations

from functools import lru_cache

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from . import polys
from . import quadform as qf
from . import symbolic as sy
from .errors import MilnorWittError, ParseError
from .fields import FieldDesc, FieldElem, Place

GRAMMAR = r"""
field: "QQ"                          -> qq
     | "GF(" INT ")" "(t)"           -> ratfun
     | "GF(" INT ";" expr ")"        -> ext
     | "GF(" INT ")"                 -> prime

elements: expr ("," expr)*
element: expr

?expr: term
     | expr "+" term                 -> add
     | expr "-" term                 -> sub
?term: factor
     | term "*" factor               -> mul
     | term "/" factor               -> div
?factor: power
     | "-" factor                    -> neg
?power: atom
     | atom "^" INT                  -> pow
?atom: INT                           -> int
     | VAR                           -> var
     | "(" expr ")"

form: "diag(" [elements] ")"         -> diag
    | "pfister(" [elements] ")"      -> pfister
    | "gram(" matrix ")"             -> gram
    | matrix                         -> gram
matrix: "[" row ("," row)* "]"
row: "[" elements "]"

place: INT                           -> place_prime
     | "real"                        -> place_real
     | "inf"                         -> place_inf
     | "poly(" expr ")"              -> place_poly

symbol: sterm
      | "-" sterm                    -> sneg
      | symbol "+" sterm             -> sadd
      | symbol "-" sterm             -> ssub
sterm: INT                           -> sconst
     | sword
     | INT "*" sword                 -> scoeff
sword: sfac ("*" sfac)*
sfac: "eta"                          -> eta1
    | "eta^" INT                     -> etak
    | "{" elements "}"               -> mw
    | "[" element "]"                -> wk
    | "l(" element ")"               -> km

VAR: "t" | "x"
%import common.INT
%ignore " "
"""

_PARSER = Lark(GRAMMAR, start=["field", "element", "form", "place", "symbol"], parser="lalr",
               maybe_placeholders=False)

_LITERALS = {t.name: t.pattern.value for t in _PARSER.terminals
             if t.pattern.type == "str"}


def _expected(names):
    out = sorted({repr(_LITERALS[n]) if n in _LITERALS else n for n in names})
    return ", ".join(out)


def _run(start, text, offset, full, transformer):
    try:
        tree = _PARSER.parse(text, start=start)
    except UnexpectedEOF as exc:
        raise ParseError("unexpected end of input", full, offset + len(text),
                         _expected(exc.expected)) from None
    except UnexpectedCharacters as exc:
        raise ParseError(f"unexpected character {text[exc.pos_in_stream]!r}", full,
                         offset + exc.pos_in_stream, _expected(exc.allowed or ())) from None
    except UnexpectedInput as exc:
        tok = getattr(exc, "token", None)
        pos = getattr(tok, "start_pos", None)
        if pos is None or tok.type == "$END":
            pos = len(text)
        exp = getattr(exc, "expected", None) or getattr(exc, "accepts", None) or ()
        shown = "end of input" if tok is None or tok.type == "$END" else repr(str(tok))
        raise ParseError(f"unexpected {shown}", full, offset + pos, _expected(exp)) from None
    if transformer is None:
        return tree
    try:
        return transformer.transform(tree)
    except VisitError as exc:
        inner = exc.orig_exc
        if isinstance(inner, ParseError):
            msg = str(inner).split(" at position")[0]
            raise ParseError(msg, full, offset + (inner.position or 0), inner.expected) from None
        if isinstance(inner, (MilnorWittError, ZeroDivisionError, ValueError)):
            raise ParseError(str(inner) or type(inner).__name__, full, offset) from None
        raise


# ---------------------------------------------------------------------------
# Transformers
# ---------------------------------------------------------------------------

@v_args(inline=True)
class _Elements(Transformer):
    def __init__(self, field: FieldDesc):
        super().__init__()
        self.field = field

    def int(self, tok):
        return self.field(int(tok))

    def var(self, tok):
        F = self.field
        want = {"GF(t)": "t", "GFq": "x"}.get(F.kind)
        if str(tok) != want:
            raise ParseError(f"variable {tok} is not available in {F.tag}", "", tok.start_pos)
        return F.gen()

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a / b

    def neg(self, a):
        return -a

    def pow(self, a, k):
        return a ** int(k)

    def elements(self, *xs):
        return list(xs)

    def element(self, x):
        return x


class _Forms(_Elements):
    @v_args(inline=True)
    def diag(self, elems=None):
        return qf.QuadForm(self.field, tuple(elems or ()))

    @v_args(inline=True)
    def pfister(self, elems=None):
        return qf.pfister(self.field, *(elems or ()))

    @v_args(inline=True)
    def gram(self, m):
        return qf.GramMatrix(self.field, tuple(tuple(r) for r in m))

    def matrix(self, rows):
        return rows

    @v_args(inline=True)
    def row(self, elems):
        return elems


class _Places(_Elements):
    @v_args(inline=True)
    def place_prime(self, tok):
        if self.field.kind != "QQ":
            raise ParseError(f"integer places belong to QQ, not {self.field.tag}", "", tok.start_pos)
        return Place.prime(int(tok))

    def place_real(self, _):
        if self.field.kind != "QQ":
            raise ParseError("the real place belongs to QQ", "", 0)
        return Place.real()

    def place_inf(self, _):
        if self.field.kind != "GF(t)":
            raise ParseError("inf is a place of GF(p)(t)", "", 0)
        return Place.infinity(self.field.p)

    @v_args(inline=True)
    def place_poly(self, f):
        F = self.field
        if F.kind != "GF(t)":
            raise ParseError("poly(..) places belong to GF(p)(t)", "", 0)
        num, den = f.value
        if den != (1,):
            raise ParseError("place polynomial must be a polynomial", "", 0)
        return Place.irreducible(F.p, num)


class _Symbols(_Elements):
    """Words become (theory or None, r, letters); the expression is assembled at the end."""

    def eta1(self, _):
        return (None, 1, ())

    @v_args(inline=True)
    def etak(self, k):
        return (None, int(k), ())

    @v_args(inline=True)
    def mw(self, elems):
        return ("MWK", 0, tuple(elems))

    @v_args(inline=True)
    def wk(self, x):
        return ("WK", 0, (x,))

    @v_args(inline=True)
    def km(self, x):
        return ("KM", 0, (x,))

    def sword(self, facs):
        theory, r, letters = None, 0, ()
        for th, fr, fl in facs:
            if th and theory and th != theory:
                raise ParseError(f"{theory} and {th} letters mixed in one word", "", 0)
            theory = theory or th
            r += fr
            letters += fl
        return [(1, theory, r, letters)]

    @v_args(inline=True)
    def sconst(self, k):
        return [(int(k), None, 0, ())]

    @v_args(inline=True)
    def scoeff(self, k, word):
        return [(int(k) * c, th, r, l) for c, th, r, l in word]

    @v_args(inline=True)
    def sterm(self, word):
        return word

    @v_args(inline=True)
    def symbol(self, t):
        return t

    @v_args(inline=True)
    def sneg(self, t):
        return [(-c, th, r, l) for c, th, r, l in t]

    @v_args(inline=True)
    def sadd(self, a, b):
        return a + b

    @v_args(inline=True)
    def ssub(self, a, b):
        return a + [(-c, th, r, l) for c, th, r, l in b]


@v_args(inline=True)
class _Fields(Transformer):
    def qq(self):
        return FieldDesc.rationals()

    def prime(self, p):
        return FieldDesc.prime(int(p))

    def ratfun(self, p):
        return FieldDesc.ratfun(int(p))

    def ext(self, q, modulus_tree):
        q = int(q)
        p = _prime_base(q)
        if p is None:
            raise ParseError(f"{q} is not a prime power", "", 0)
        # evaluate the modulus as a polynomial in x over GF(p)
        R = FieldDesc.ratfun(p)
        tree = _rename_var(modulus_tree)
        f = _Elements(R).transform(tree)
        num, den = f.value
        if den != (1,):
            raise ParseError("modulus must be a polynomial", "", 0)
        F = FieldDesc.extension(p, num)
        if F.order != q:
            raise ParseError(f"modulus degree does not match order {q}", "", 0)
        return F


def _rename_var(tree):
    from lark import Token, Tree

    def walk(node):
        if isinstance(node, Token):
            return Token(node.type, "t", start_pos=node.start_pos) if node.type == "VAR" else node
        if node.data == "var" and str(node.children[0]) != "x":
            raise ParseError("the extension modulus is a polynomial in x", "", 0)
        return Tree(node.data, [walk(c) for c in node.children])

    return walk(tree)


def _prime_base(q):
    for p in range(2, q + 1):
        if q % p == 0:
            while q % p == 0:
                q //= p
            return p if q == 1 else None
    return None


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------

def _split(text):
    body, at, tag = text.rpartition("@")
    if not at:
        raise ParseError("missing field tag", text, len(text), "'@' followed by a field tag")
    return body.strip(), tag.strip(), len(body) + 1


def parse_field(text: str) -> FieldDesc:
    return _parse_field(text.strip(), 0, text)


@lru_cache(maxsize=256)
def _cached_field(text):
    return _run("field", text, 0, text, _Fields())


def _parse_field(tag, offset, full):
    try:
        return _cached_field(tag)
    except ParseError as exc:
        raise ParseError(str(exc).split(" at position")[0], full,
                         offset + (exc.position or 0), exc.expected) from None
    except MilnorWittError as exc:
        raise ParseError(str(exc), full, offset) from None


def parse_element(text: str, field: FieldDesc | None = None) -> FieldElem:
    """``-9/4@QQ``, or a bare element when ``field`` is supplied."""
    if field is None:
        body, tag, off = _split(text)
        field = _parse_field(tag, off, text)
    else:
        body = text.strip()
    return _run("element", body, 0, text, _Elements(field))


def parse_form(text: str):
    """A QuadForm, PfisterForm or GramMatrix."""
    body, tag, off = _split(text)
    F = _parse_field(tag, off, text)
    return _run("form", body, 0, text, _Forms(F))


def parse_place(text: str) -> Place:
    body, tag, off = _split(text)
    F = _parse_field(tag, off, text)
    return _run("place", body, 0, text, _Places(F))


def parse_symbol(text: str, theory: str | None = None) -> sy.SymbolExpr:
    """Parse a symbol expression; ``theory`` resolves words made of eta alone."""
    body, tag, off = _split(text)
    F = _parse_field(tag, off, text)
    terms = _run("symbol", body, 0, text, _Symbols(F))
    found = {th for _, th, _, _ in terms if th}
    if theory:
        found.add(theory)
    if len(found) > 1:
        raise ParseError(f"mixed theories {sorted(found)}", text, 0)
    th = found.pop() if found else "MWK"
    if th == "KM" and any(r for _, _, r, _ in terms):
        raise ParseError("Milnor K-theory has no eta", text, 0)
    out = {}
    for c, _, r, letters in terms:
        key = (r, letters)
        out[key] = out.get(key, 0) + c
    return sy.SymbolExpr(th, F, out)


def format_element(x: FieldElem) -> str:
    return f"{x}@{x.field.tag}"


def format_gram(g) -> str:
    rows = ",".join("[" + ",".join(str(a) for a in r) + "]" for r in g.m)
    return f"gram([{rows}])@{g.field.tag}"


def format_form(q) -> str:
    if isinstance(q, qf.GramMatrix):
        return format_gram(q)
    return q.tag()


def poly_tag(poly) -> str:
    return polys.to_str(poly)
