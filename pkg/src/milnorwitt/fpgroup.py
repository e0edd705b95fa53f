"""Finitely presented abelian groups over Z.

A group is ``Z^m / L`` where ``L`` is spanned by sparse relation rows
(``{column: coefficient}``).  Structure is computed in three stages:

1. sparse elimination with unit pivots (a Tietze reduction),
2. integer row echelon of the remaining rows on the surviving columns,
   reduced modulo the lattice determinant once it is full rank,
3. dense Smith normal form of the small echelon block with verified
   unimodular transforms.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import gcd

from .errors import DimensionMismatch, IllDefinedHom, TargetMismatch


# ---------------------------------------------------------------------------
# Dense integer matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple  # sparse: tuple of (row, col, value) with value != 0

    @classmethod
    def from_dense(cls, m, cols=None):
        m = [list(r) for r in m]
        ncols = cols if cols is not None else (len(m[0]) if m else 0)
        ents = tuple((i, j, int(v)) for i, r in enumerate(m) for j, v in enumerate(r) if v)
        return cls(len(m), ncols, ents)

    def dense(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for i, j, v in self.entries:
            out[i][j] = v
        return out

    def __str__(self):
        return str(self.dense())


def mat_mul(a, b):
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = [[0] * cols for _ in a]
    for i, row in enumerate(a):
        o = out[i]
        for k in range(inner):
            x = row[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        o[j] += x * bk[j]
    return out


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def det(m):
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _snf_core(a, track_u=True, track_v=True):
    """Return (U, D, V) with U*A*V = D in Smith form."""
    m = len(a)
    n = len(a[0]) if a else 0
    D = [list(r) for r in a]
    U = identity(m) if track_u else None
    V = identity(n) if track_v else None

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        if track_u:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        if track_v:
            for r in V:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, f):
        D[dst] = [x + f * y for x, y in zip(D[dst], D[src])]
        if track_u:
            U[dst] = [x + f * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        for r in D:
            r[dst] += f * r[src]
        if track_v:
            for r in V:
                r[dst] += f * r[src]

    def neg_row(i):
        D[i] = [-x for x in D[i]]
        if track_u:
            U[i] = [-x for x in U[i]]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return U, D, V
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            piv = D[t][t]
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // piv))
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // piv))
                    if D[t][j]:
                        done = False
            if not done:
                continue
            bad = next((i for i in range(t + 1, m)
                        if any(D[i][j] % piv for j in range(t + 1, n))), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            neg_row(t)
    return U, D, V


def smith_normal_form(A):
    """Smith normal form of an integer matrix (IntMatrix or list of lists).

    Returns dense ``(U, D, V)`` with ``U A V = D``; the identity and the
    unimodularity of U and V are re-verified before returning.
    """
    a = A.dense() if isinstance(A, IntMatrix) else [list(r) for r in A]
    U, D, V = _snf_core(a)
    m = len(a)
    n = len(a[0]) if a else 0
    if m and n:
        assert mat_mul(mat_mul(U, a), V) == D, "SNF transform check failed"
    assert abs(det(U)) == 1 and abs(det(V)) == 1, "SNF transforms are not unimodular"
    return U, D, V


def diagonal(D):
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


# ---------------------------------------------------------------------------
# Sparse reduction
# ---------------------------------------------------------------------------

class _UnitEliminator:
    """Incremental elimination of relation rows having a +-1 entry."""

    def __init__(self):
        self.pivots = {}  # col -> (order, row) with row[col] == 1
        self.order = 0

    def reduce(self, row):
        row = dict(row)
        heap = [(self.pivots[c][0], c) for c in row if c in self.pivots]
        heapq.heapify(heap)
        while heap:
            _, c = heapq.heappop(heap)
            f = row.get(c)
            if not f:
                continue
            for k, v in self.pivots[c][1].items():
                nv = row.get(k, 0) - f * v
                if nv:
                    if k not in row and k in self.pivots:
                        heapq.heappush(heap, (self.pivots[k][0], k))
                    row[k] = nv
                else:
                    row.pop(k, None)
        return row

    def insert(self, row):
        """Reduce ``row``; adopt it as a pivot if possible, else return the remainder."""
        row = self.reduce(row)
        if not row:
            return None
        unit = min((c for c, v in row.items() if v in (1, -1)), default=None)
        if unit is None:
            return row
        if row[unit] == -1:
            row = {c: -v for c, v in row.items()}
        self.pivots[unit] = (self.order, row)
        self.order += 1
        return None


def _echelon_insert(ech, row, ncols, modulus):
    """Insert a dense row into an upper-triangular integer echelon {col: row}."""
    for c in range(ncols):
        if modulus:
            row = [x % modulus for x in row]
        a = row[c]
        if a == 0:
            continue
        if c not in ech:
            if a < 0:
                row = [-x for x in row]
            ech[c] = row
            return
        prow = ech[c]
        b = prow[c]
        if a % b == 0:
            f = a // b
            row = [x - f * y for x, y in zip(row, prow)]
            continue
        g, s, t = _xgcd(b, a)
        # [s t; -a/g b/g] is unimodular
        new_p = [s * y + t * x for x, y in zip(row, prow)]
        row = [(b // g) * x - (a // g) * y for x, y in zip(row, prow)]
        if modulus:
            new_p = [x % modulus for x in new_p]
            if new_p[c] == 0:
                new_p[c] = modulus
        ech[c] = new_p


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# ---------------------------------------------------------------------------
# Finitely presented abelian groups
# ---------------------------------------------------------------------------

class FPAbGroup:
    """Z^num_gens modulo the span of sparse relation rows."""

    def __init__(self, num_gens, relations=()):
        self.num_gens = num_gens
        rels = []
        for r in relations:
            if isinstance(r, dict):
                row = {int(c): int(v) for c, v in r.items() if v}
            else:
                if len(r) != num_gens:
                    raise DimensionMismatch("relation length does not match generator count")
                row = {c: int(v) for c, v in enumerate(r) if v}
            for c in row:
                if not 0 <= c < num_gens:
                    raise DimensionMismatch(f"relation mentions generator {c}")
            rels.append(row)
        self.relations = rels
        self._built = False

    # -- structure ------------------------------------------------------------
    def _build(self):
        if self._built:
            return
        elim = _UnitEliminator()
        hard = []
        # short rows first keeps fill-in low
        for r in sorted(self.relations, key=len):
            rest = elim.insert(r)
            if rest:
                hard.append(rest)
        # later pivots may expose new unit entries in earlier remainders
        changed = True
        while changed:
            changed = False
            again = []
            for r in hard:
                before = len(elim.pivots)
                rest = elim.insert(r)
                if len(elim.pivots) != before:
                    changed = True
                if rest:
                    again.append(rest)
            hard = again
        self._elim = elim
        free_cols = [c for c in range(self.num_gens) if c not in elim.pivots]
        self._cols = free_cols
        col_index = {c: i for i, c in enumerate(free_cols)}
        k = len(free_cols)
        ech = {}
        modulus = 0
        for r in hard:
            r = elim.reduce(r)
            dense = [0] * k
            for c, v in r.items():
                dense[col_index[c]] = v
            _echelon_insert(ech, dense, k, modulus)
            if len(ech) == k and k:
                d = 1
                for c in range(k):
                    d *= ech[c][c]
                modulus = abs(d)
        block = [ech[c] for c in sorted(ech)]
        if modulus:
            block = [[x % modulus for x in r] for r in block]
            block += [[modulus if i == j else 0 for j in range(k)] for i in range(k)]
        self._col_index = col_index
        self._modulus = modulus
        if block:
            _, D, V = _snf_core(block, track_u=False)
            assert abs(det(V)) == 1, "column transform is not unimodular"
            diag = diagonal(D)
        else:
            V = identity(k)
            diag = []
        diag = diag + [0] * (k - len(diag))
        self._V = V
        self._diag = diag
        self._built = True

    def invariant_factors(self):
        """(free_rank, [d_1, d_2, ...]) with 1 < d_1 | d_2 | ..."""
        self._build()
        free = sum(1 for d in self._diag if d == 0)
        torsion = [d for d in self._diag if d > 1]
        return free, torsion

    def order(self):
        free, tors = self.invariant_factors()
        if free:
            return None
        out = 1
        for d in tors:
            out *= d
        return out

    def is_trivial(self):
        return self.invariant_factors() == (0, [])

    def describe(self):
        free, tors = self.invariant_factors()
        return {"free": free, "torsion": tors}

    def __str__(self):
        free, tors = self.invariant_factors()
        parts = (["Z"] * free) + [f"Z/{d}" for d in tors]
        return " + ".join(parts) if parts else "0"

    # -- coordinates ----------------------------------------------------------
    def _reduced(self, v):
        self._build()
        if isinstance(v, dict):
            row = {c: x for c, x in v.items() if x}
        else:
            if len(v) != self.num_gens:
                raise DimensionMismatch(f"vector of length {len(v)} for {self.num_gens} generators")
            row = {c: x for c, x in enumerate(v) if x}
        row = self._elim.reduce(row)
        dense = [0] * len(self._cols)
        for c, x in row.items():
            dense[self._col_index[c]] = x
        return dense

    def smith_coords(self, v):
        """Coordinates of v in the Smith basis: entry i lives in Z/d_i (Z if d_i = 0)."""
        w = self._reduced(v)
        if self._modulus:
            w = [x % self._modulus for x in w]
        c = mat_mul([w], self._V)[0] if w else []
        return [x % d if d else x for x, d in zip(c, self._diag)]

    def _generator_coords(self, i):
        cache = self.__dict__.setdefault("_gen_coords", {})
        hit = cache.get(i)
        if hit is None:
            c = self.smith_coords({i: 1})
            hit = cache[i] = [x for x, d in zip(c, self._diag) if d != 1]
        return hit

    def canonical_coords(self, v):
        """Coordinates in Z^free + sum Z/d_i, dropping trivial factors."""
        # linear in v, so it is assembled from cached generator coordinates
        if isinstance(v, dict):
            items = v.items()
        else:
            if len(v) != self.num_gens:
                raise DimensionMismatch(f"vector of length {len(v)} for {self.num_gens} generators")
            items = enumerate(v)
        self._build()
        terms = []
        for i, x in items:
            if x:
                if not 0 <= i < self.num_gens:
                    raise DimensionMismatch(f"generator {i} out of range")
                terms.append((x, self._generator_coords(i)))
        return self.combine_coords(terms)

    def canonical_moduli(self):
        self._build()
        return [d for d in self._diag if d != 1]

    def element_is_zero(self, v):
        return not any(self.canonical_coords(v))

    def combine_coords(self, terms):
        """Canonical coordinates of sum c * x for (c, coords) pairs, reduced."""
        mods = self.canonical_moduli()
        out = [0] * len(mods)
        for c, x in terms:
            for i, y in enumerate(x):
                if y:
                    out[i] += c * y
        return [v % d if d else v for v, d in zip(out, mods)]

    def canonical_generator(self, i):
        """A preimage, in the original generators, of the i-th canonical basis vector."""
        self._build()
        keep = [j for j, d in enumerate(self._diag) if d != 1]
        j = keep[i]
        Vinv = _inverse_unimodular(self._V)
        w = Vinv[j]
        out = {}
        for idx, x in enumerate(w):
            if x:
                out[self._cols[idx]] = x
        return out


def _inverse_unimodular(V):
    n = len(V)
    if n == 0:
        return []
    U, D, W = _snf_core(V)
    # U V W = D = diag(+-1), so V^{-1} = W D^{-1} U
    Dinv = [[D[i][i] if i == j else 0 for j in range(n)] for i in range(n)]
    return mat_mul(mat_mul(W, Dinv), U)


def cyclic(n):
    return FPAbGroup(1, [[n]] if n else [])


def free_group(n):
    return FPAbGroup(n, [])


def trivial_group():
    return FPAbGroup(0, [])


# ---------------------------------------------------------------------------
# Lattice helpers in canonical coordinates
# ---------------------------------------------------------------------------

def left_kernel(rows, ncols):
    """Integer basis of {x : x * M = 0} for M given by ``rows``."""
    m = len(rows)
    aug = [list(r) + [1 if i == j else 0 for j in range(m)] for i, r in enumerate(rows)]
    ech = []
    rest = aug
    for c in range(ncols):
        piv = [r for r in rest if r[c]]
        others = [r for r in rest if not r[c]]
        while len(piv) > 1:
            piv.sort(key=lambda r: abs(r[c]))
            p0 = piv[0]
            nxt = [p0]
            for r in piv[1:]:
                f = r[c] // p0[c]
                r = [x - f * y for x, y in zip(r, p0)]
                if r[c]:
                    nxt.append(r)
                else:
                    others.append(r)
            piv = nxt
        ech.extend(piv)
        rest = others
    return [r[ncols:] for r in rest]


class CanonicalForm:
    """Z^k / (0^free + d_i Z) together with maps to and from a presented group."""

    def __init__(self, group: FPAbGroup):
        self.group = group
        self.moduli = group.canonical_moduli()

    @property
    def dim(self):
        return len(self.moduli)

    def relation_rows(self):
        return [[d if i == j else 0 for j in range(self.dim)]
                for i, d in enumerate(self.moduli) if d]


# ---------------------------------------------------------------------------
# Homomorphisms
# ---------------------------------------------------------------------------

class GroupHom:
    """A homomorphism given by the images of source generators.

    ``images[i]`` is a vector (list or dict) in the target's generators.
    """

    def __init__(self, source: FPAbGroup, target: FPAbGroup, images, check=True):
        if len(images) != source.num_gens:
            raise DimensionMismatch("one image per source generator required")
        self.source = source
        self.target = target
        self.images = [_as_dict(v) for v in images]
        self._coords = None
        self.well_defined = self._certify() if check else None

    def apply(self, v):
        out = {}
        items = v.items() if isinstance(v, dict) else enumerate(v)
        for i, x in items:
            if x:
                for c, y in self.images[i].items():
                    out[c] = out.get(c, 0) + x * y
        return {c: y for c, y in out.items() if y}

    def image_coords(self):
        """Canonical target coordinates of each generator image (cached)."""
        if self._coords is None:
            self._coords = [self.target.canonical_coords(v) for v in self.images]
        return self._coords

    def _certify(self):
        coords = self.image_coords()
        for r in self.source.relations:
            if any(self.target.combine_coords((c, coords[i]) for i, c in r.items())):
                return False
        return True

    def require(self):
        if self.well_defined is False:
            raise IllDefinedHom("a relator does not map to zero")
        if self.well_defined is None:
            self.well_defined = self._certify()
            if not self.well_defined:
                raise IllDefinedHom("a relator does not map to zero")

    def canonical_matrix(self):
        """Rows: canonical source generators; columns: canonical target coordinates."""
        rows = []
        for i in range(len(self.source.canonical_moduli())):
            g = self.source.canonical_generator(i)
            coords = self.image_coords()
            rows.append(self.target.combine_coords((c, coords[j]) for j, c in g.items()))
        return rows


def _as_dict(v):
    if isinstance(v, dict):
        return {c: x for c, x in v.items() if x}
    return {c: x for c, x in enumerate(v) if x}


def _lattice_group(basis_rows, contained_rows, dim):
    """Present span(basis_rows) / span(contained_rows) on the basis rows."""
    k = len(basis_rows)
    rels = []
    for r in contained_rows:
        # solve x * B = r over Z using the left kernel of [B; -r]
        ker = left_kernel(basis_rows + [[-x for x in r]], dim)
        sol = next((x for x in ker if abs(x[-1]) == 1), None)
        if sol is None:
            sol = _solve_combination(basis_rows, r, dim)
        else:
            sol = [s * sol[-1] for s in sol[:-1]]
        rels.append(sol)
    return FPAbGroup(k, rels)


def _solve_combination(basis_rows, r, dim):
    ker = left_kernel(basis_rows + [[-x for x in r]], dim)
    # some integer combination of kernel vectors has last coordinate 1
    lasts = [x[-1] for x in ker]
    g = 0
    for a in lasts:
        g = gcd(g, a)
    if g != 1:
        raise AssertionError("vector is not in the lattice")
    coeffs = _bezout(lasts)
    sol = [0] * len(basis_rows)
    for c, x in zip(coeffs, ker):
        for i in range(len(sol)):
            sol[i] += c * x[i]
    return sol


def _bezout(vals):
    coeffs = [0] * len(vals)
    g = 0
    for i, a in enumerate(vals):
        if a == 0:
            continue
        if g == 0:
            g = a
            coeffs = [0] * len(vals)
            coeffs[i] = 1
            continue
        d, s, t = _xgcd(g, a)
        coeffs = [s * c for c in coeffs]
        coeffs[i] += t
        g = d
    if g < 0:
        coeffs = [-c for c in coeffs]
    return coeffs


def _lattice_basis(rows, dim):
    """Echelon basis (list of rows) of the integer span of ``rows``."""
    ech = {}
    for r in rows:
        _echelon_insert(ech, list(r), dim, 0)
    return [ech[c] for c in sorted(ech)]


def kernel_lattice(h: GroupHom):
    """Basis of the sublattice of Z^{canon(source)} mapping to zero."""
    h.require()
    src = CanonicalForm(h.source)
    tgt = CanonicalForm(h.target)
    M = h.canonical_matrix()
    stacked = M + tgt.relation_rows()
    ker = left_kernel(stacked, tgt.dim) if stacked else []
    vecs = [x[:src.dim] for x in ker]
    vecs = [v for v in vecs if any(v)] + src.relation_rows()
    return _lattice_basis(vecs, src.dim), src


def kernel(h: GroupHom) -> FPAbGroup:
    basis, src = kernel_lattice(h)
    return _lattice_group(basis, src.relation_rows(), src.dim)


def image(h: GroupHom) -> FPAbGroup:
    basis, src = kernel_lattice(h)
    return FPAbGroup(src.dim, basis)


def cokernel(h: GroupHom) -> FPAbGroup:
    h.require()
    tgt = CanonicalForm(h.target)
    M = h.canonical_matrix()
    return FPAbGroup(tgt.dim, M + tgt.relation_rows())


def is_injective(h: GroupHom) -> bool:
    return kernel(h).is_trivial()


def is_surjective(h: GroupHom) -> bool:
    return cokernel(h).is_trivial()


def is_isomorphism(h: GroupHom) -> bool:
    return is_injective(h) and is_surjective(h)


def image_lattice(h: GroupHom):
    """Basis of the image sublattice in canonical target coordinates (plus relations)."""
    h.require()
    tgt = CanonicalForm(h.target)
    return _lattice_basis(h.canonical_matrix() + tgt.relation_rows(), tgt.dim)


def same_lattice(a_rows, b_rows, dim) -> bool:
    A = FPAbGroup(dim, a_rows) if a_rows else FPAbGroup(dim, [])
    B = FPAbGroup(dim, b_rows) if b_rows else FPAbGroup(dim, [])
    return all(A.element_is_zero(r) for r in b_rows) and all(B.element_is_zero(r) for r in a_rows)


def kernel_equals_image(f: GroupHom, g: GroupHom) -> bool:
    """Exactness at the middle group: image(f) = kernel(g), with f: A -> B, g: B -> C."""
    if f.target is not g.source:
        raise TargetMismatch("maps are not composable")
    img = image_lattice(f)
    ker, _ = kernel_lattice(g)
    return same_lattice(img, ker, CanonicalForm(g.source).dim)


def compose(g: GroupHom, f: GroupHom) -> GroupHom:
    """g after f."""
    if f.target is not g.source:
        raise TargetMismatch("maps are not composable")
    return GroupHom(f.source, g.target, [g.apply(v) for v in f.images])


def homs_equal(f: GroupHom, g: GroupHom) -> bool:
    if f.source is not g.source or f.target is not g.target:
        return False
    for a, b in zip(f.images, g.images):
        diff = dict(a)
        for c, x in b.items():
            diff[c] = diff.get(c, 0) - x
        if not f.target.element_is_zero(diff):
            return False
    return True


# ---------------------------------------------------------------------------
# Direct sums and pullbacks
# ---------------------------------------------------------------------------

def direct_sum(A: FPAbGroup, B: FPAbGroup) -> FPAbGroup:
    m = A.num_gens
    rels = [dict(r) for r in A.relations] + [{c + m: x for c, x in r.items()} for r in B.relations]
    return FPAbGroup(A.num_gens + B.num_gens, rels)


@dataclass
class Pullback:
    group: FPAbGroup
    proj_a: GroupHom
    proj_b: GroupHom
    sum_group: FPAbGroup
    lattice: list  # basis of the pullback inside canonical coordinates of A + B
    a_dim: int


def pullback(f: GroupHom, g: GroupHom) -> Pullback:
    """Kernel of (a, b) -> f(a) - g(b) on A + B, with both projections."""
    if f.target is not g.target:
        raise TargetMismatch("pullback needs a common target")
    f.require()
    g.require()
    A, B, C = f.source, g.source, f.target
    ca, cb = CanonicalForm(A), CanonicalForm(B)
    # present A + B on canonical generators
    S = FPAbGroup(ca.dim + cb.dim,
                  [r + [0] * cb.dim for r in ca.relation_rows()]
                  + [[0] * ca.dim + r for r in cb.relation_rows()])
    images = []
    for i in range(ca.dim):
        images.append(f.apply(A.canonical_generator(i)))
    for i in range(cb.dim):
        v = g.apply(B.canonical_generator(i))
        images.append({c: -x for c, x in v.items()})
    diff = GroupHom(S, C, images)
    basis, _ = kernel_lattice(diff)
    # kernel_lattice works in canonical coordinates of S, which coincide with
    # the given ones only up to the Smith basis change; map back explicitly
    cs = CanonicalForm(S)
    gens = [S.canonical_generator(i) for i in range(cs.dim)]
    kvecs = []
    for row in basis:
        v = [0] * S.num_gens
        for coef, gvec in zip(row, gens):
            for c, x in gvec.items():
                v[c] += coef * x
        kvecs.append(v)
    P = _lattice_group(basis, cs.relation_rows(), cs.dim)
    pa = GroupHom(P, A, [_expand_canonical(A, v[:ca.dim]) for v in kvecs])
    pb = GroupHom(P, B, [_expand_canonical(B, v[ca.dim:]) for v in kvecs])
    return Pullback(P, pa, pb, S, kvecs, ca.dim)


def _expand_canonical(G: FPAbGroup, coords):
    out = {}
    for i, x in enumerate(coords):
        if x:
            for c, y in G.canonical_generator(i).items():
                out[c] = out.get(c, 0) + x * y
    return {c: y for c, y in out.items() if y}


def pullback_contains_image(pb: Pullback, fa: GroupHom, fb: GroupHom):
    """For maps X -> A, X -> B, test that (fa, fb): X -> pullback is an isomorphism.

    Returns (injective, surjective).
    """
    X = fa.source
    A, B = pb.proj_a.target, pb.proj_b.target
    S = pb.sum_group
    ca = CanonicalForm(A)
    images = []
    for i in range(X.num_gens):
        a = A.canonical_coords(fa.apply({i: 1}))
        b = B.canonical_coords(fb.apply({i: 1}))
        images.append(a + b)
    pair = GroupHom(X, S, images)
    inj = is_injective(pair)
    img = image_lattice(pair)
    cs = CanonicalForm(S)
    target_lat = _lattice_basis([S.canonical_coords(v) for v in pb.lattice] + cs.relation_rows(), cs.dim)
    return inj, same_lattice(img, target_lat, cs.dim)
