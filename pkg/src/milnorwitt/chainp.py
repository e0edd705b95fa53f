"""Chain p-equivalence of Pfister forms, with checkable certificates.

A simple move rewrites two slots ``(a_i, a_j)`` into ``(b_i, b_j)`` when the
2-fold forms <<a_i,a_j>> and <<b_i,b_j>> are isometric, leaving the other
slots alone.  Slots are square classes throughout.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from . import fields as fl
from . import quadform as qf
from .errors import FieldMismatch, IsometryFails, LengthMismatch, NotFoundWithinSupport, UnsupportedField
from .fields import FieldDesc, FieldElem, square_class


@dataclass(frozen=True)
class PfisterTuple:
    field: FieldDesc
    slots: tuple  # canonical square-class representatives

    def __post_init__(self):
        F = self.field
        object.__setattr__(self, "slots", tuple(square_class(F(a)).rep for a in self.slots))

    @classmethod
    def of(cls, field, *slots):
        return cls(field, tuple(slots))

    @property
    def n(self):
        return len(self.slots)

    def form(self) -> qf.PfisterForm:
        return qf.pfister(self.field, *self.slots)

    def expand(self) -> qf.QuadForm:
        return self.form().expand()

    def replace(self, i, j, bi, bj):
        s = list(self.slots)
        s[i], s[j] = bi, bj
        return PfisterTuple(self.field, tuple(s))

    def __str__(self):
        return "<<" + ",".join(str(a) for a in self.slots) + ">>"


@dataclass(frozen=True)
class ChainStep:
    """Replace slots i < j (0-based) by new_i, new_j."""

    i: int
    j: int
    new_i: FieldElem
    new_j: FieldElem

    def to_json(self):
        # serialized indices are 1-based
        return {"i": self.i + 1, "j": self.j + 1, "bi": str(self.new_i), "bj": str(self.new_j)}


@dataclass(frozen=True)
class ChainCertificate:
    steps: tuple = ()

    def __len__(self):
        return len(self.steps)

    def to_json(self):
        return [s.to_json() for s in self.steps]

    @classmethod
    def from_json(cls, field: FieldDesc, data):
        from .parsing import parse_element

        steps = []
        for d in data:
            steps.append(ChainStep(int(d["i"]) - 1, int(d["j"]) - 1,
                                   parse_element(str(d["bi"]), field),
                                   parse_element(str(d["bj"]), field)))
        return cls(tuple(steps))

    def apply(self, t: PfisterTuple) -> PfisterTuple:
        for s in self.steps:
            t = t.replace(s.i, s.j, s.new_i, s.new_j)
        return t


@lru_cache(maxsize=None)
def _two_fold_isometric(F, a, b, c, d):
    return qf.is_isometric(qf.pfister(F, a, b).expand(), qf.pfister(F, c, d).expand())


def _check_pair(t1: PfisterTuple, t2: PfisterTuple):
    if t1.field != t2.field:
        raise FieldMismatch(f"{t1.field.tag} vs {t2.field.tag}")
    if t1.n != t2.n:
        raise LengthMismatch(f"tuples of lengths {t1.n} and {t2.n}")
    if t1.n < 2:
        raise LengthMismatch("chain moves need at least two slots")


def simple_moves(t1: PfisterTuple, t2: PfisterTuple):
    """All (i, j) through which t2 is a simple move away from t1."""
    _check_pair(t1, t2)
    diff = [k for k in range(t1.n) if t1.slots[k] != t2.slots[k]]
    if len(diff) > 2:
        return []
    if len(diff) == 2:
        pairs = [tuple(diff)]
    else:
        pairs = [(i, j) for i, j in itertools.combinations(range(t1.n), 2)
                 if all(k in (i, j) for k in diff)]
    out = []
    for i, j in pairs:
        a, b = t1.slots[i], t1.slots[j]
        c, d = t2.slots[i], t2.slots[j]
        if _two_fold_isometric(t1.field, a, b, c, d):
            out.append((i, j))
    return out


def simply_equivalent(t1: PfisterTuple, t2: PfisterTuple) -> bool:
    return bool(simple_moves(t1, t2))


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

def _sort_key(x: FieldElem):
    F = x.field
    if F.is_finite:
        return (x.index,)
    if F.kind == fl.RATIONALS:
        return (abs(x.value), x.value)
    num, _ = x.value
    return (len(num), num)


def support_subgroup(F: FieldDesc, generators) -> list:
    """Square classes in the subgroup generated by ``generators``, sorted."""
    if F.is_finite:
        reps = [c.rep for c in fl.square_class_reps(F)]
        return sorted(reps, key=_sort_key)
    classes = {square_class(F.one).rep}
    for g in generators:
        g = square_class(F(g))
        classes |= {(square_class(c * g.rep)).rep for c in classes}
    return sorted(classes, key=_sort_key)


def default_support(t1: PfisterTuple, t2: PfisterTuple):
    F = t1.field
    if F.is_finite:
        return support_subgroup(F, ())
    if F.kind == fl.RATFUN:
        raise UnsupportedField("chain search over F_p(t) needs an explicit support")
    return support_subgroup(F, list(t1.slots) + list(t2.slots) + [F(-1)])


def _neighbors(t: PfisterTuple, support):
    F = t.field
    for i, j in itertools.combinations(range(t.n), 2):
        a, b = t.slots[i], t.slots[j]
        for c, d in itertools.product(support, repeat=2):
            if (c, d) == (a, b):
                continue
            if _two_fold_isometric(F, a, b, c, d):
                yield ChainStep(i, j, c, d), t.replace(i, j, c, d)


def find_chain(t1: PfisterTuple, t2: PfisterTuple, support=None) -> ChainCertificate:
    """Breadth-first search for a chain of simple moves from t1 to t2.

    ``support`` is a collection of generators of the square-class subgroup
    the slots may range over; ``None`` picks the default subgroup.
    """
    _check_pair(t1, t2)
    if not qf.is_isometric(t1.expand(), t2.expand()):
        raise IsometryFails(f"{t1} and {t2} are not isometric")
    F = t1.field
    if support is None:
        sup = default_support(t1, t2)
    else:
        sup = support_subgroup(F, list(support))
    sup_set = set(sup)
    if any(a not in sup_set for a in t1.slots + t2.slots):
        raise NotFoundWithinSupport("the support does not contain every slot")
    parent = {t1: None}
    queue = deque([t1])
    while queue:
        t = queue.popleft()
        if t == t2:
            steps = []
            while parent[t] is not None:
                prev, step = parent[t]
                steps.append(step)
                t = prev
            return ChainCertificate(tuple(reversed(steps)))
        for step, nxt in _neighbors(t, sup):
            if nxt not in parent:
                parent[nxt] = (t, step)
                queue.append(nxt)
    raise NotFoundWithinSupport(f"no chain from {t1} to {t2} inside {len(sup)} square classes")


@dataclass(frozen=True)
class ChainVerdict:
    ok: bool
    failed_step: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok

    def to_json(self):
        out = {"valid": self.ok}
        if not self.ok:
            out["failed_step"] = self.failed_step
            out["reason"] = self.reason
        return out


def verify_chain(t1: PfisterTuple, t2: PfisterTuple, cert: ChainCertificate) -> ChainVerdict:
    """Replay a certificate; report the first offending step (0-based)."""
    try:
        _check_pair(t1, t2)
    except (LengthMismatch, FieldMismatch) as exc:
        return ChainVerdict(False, 0, str(exc))
    t = t1
    for k, s in enumerate(cert.steps):
        if not (0 <= s.i < s.j < t.n):
            return ChainVerdict(False, k, f"bad slot indices ({s.i}, {s.j})")
        try:
            nxt = t.replace(s.i, s.j, s.new_i, s.new_j)
        except Exception as exc:  # noqa: BLE001 - a malformed slot is a failed step
            return ChainVerdict(False, k, str(exc))
        if (s.i, s.j) not in simple_moves(t, nxt):
            return ChainVerdict(False, k, "slots are not a simple move")
        t = nxt
    if t != t2:
        return ChainVerdict(False, len(cert.steps), "chain does not end at the target")
    return ChainVerdict(True)
