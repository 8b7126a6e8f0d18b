"""Crossed simplicial groups of planar type.

Every supported family has level groups of the form ``t^k w^e`` where ``t`` is
a rotation of order ``rotation_order(n)`` and ``w`` an optional reflection
(called ``b`` in the quaternionic case, where ``b^2 = t^(R/2)``).

Conventions
-----------
* ``act_on_index(g, i)``: ``t`` sends ``i`` to ``i+1 mod (n+1)``, ``w`` sends
  ``i`` to ``n-i``; ``g = t^k w^e`` acts as ``i -> w^e(i) + k``.
* A level-``n`` group element, viewed as an automorphism of ``[n]`` in the
  category, has ``act_on_index(g, .)`` as its underlying map.  So
  ``t o d_i = d_{i+1} o t`` for ``i < n`` and ``t o d_n = d_0``.
* Objects carry *left* actions ``g.x = X(g^-1)(x)``; with this choice the
  face relation reads ``d_i(g x) = d_i(g) (d_{g^-1(i)} x)``, and
  :func:`crossed_twist` returns exactly the pair ``(d_i(g), g^-1(i))``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

KINDS = ("trivial", "reflexive", "cyclic", "n-cyclic", "dihedral", "n-dihedral", "quaternionic")
_PARAMETRISED = ("n-cyclic", "n-dihedral", "quaternionic")


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class CrossedFamily:
    kind: str
    param: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FamilyError(f"unknown family kind {self.kind!r}")
        if self.param < 1:
            raise FamilyError("family parameter must be a positive integer")
        if self.kind not in _PARAMETRISED and self.param != 1:
            raise FamilyError(f"family {self.kind!r} takes no parameter")

    @property
    def compact(self) -> bool:
        return True

    @property
    def has_rotation(self) -> bool:
        return self.kind not in ("trivial", "reflexive")

    @property
    def has_reflection(self) -> bool:
        return self.kind in ("reflexive", "dihedral", "n-dihedral", "quaternionic")

    @property
    def generators(self) -> tuple[str, ...]:
        gens = []
        if self.has_rotation:
            gens.append("t")
        if self.has_reflection:
            gens.append("b" if self.kind == "quaternionic" else "w")
        return tuple(gens)

    def rotation_order(self, n: int) -> int:
        if not self.has_rotation:
            return 1
        if self.kind in ("cyclic", "dihedral"):
            return n + 1
        if self.kind == "quaternionic":
            return 2 * self.param * (n + 1)
        return self.param * (n + 1)

    def elements(self, n: int) -> list[GroupElement]:
        R = self.rotation_order(n)
        es = (0, 1) if self.has_reflection else (0,)
        return [GroupElement(self, n, k, e) for e in es for k in range(R)]

    def identity(self, n: int) -> GroupElement:
        return GroupElement(self, n, 0, 0)

    def generator(self, name: str, n: int) -> GroupElement:
        if name not in self.generators:
            raise FamilyError(f"family {self.kind!r} has no generator {name!r}")
        if name == "t":
            return GroupElement(self, n, 1 % self.rotation_order(n), 0)
        return GroupElement(self, n, 0, 1)

    def to_json(self) -> dict:
        return {"kind": self.kind, "param": self.param}

    @classmethod
    def from_json(cls, doc) -> CrossedFamily:
        if isinstance(doc, str):
            return cls(doc)
        return cls(doc["kind"], int(doc.get("param", 1) or 1))

    def __str__(self):
        return self.kind if self.kind not in _PARAMETRISED else f"{self.kind}({self.param})"


TRIVIAL = CrossedFamily("trivial")
CYCLIC = CrossedFamily("cyclic")
DIHEDRAL = CrossedFamily("dihedral")


def group_order(family: CrossedFamily, n: int) -> int:
    """Order of the level-``n`` group of ``family``."""
    if n < 0:
        raise ValueError("level must be non-negative")
    return family.rotation_order(n) * (2 if family.has_reflection else 1)


@dataclass(frozen=True, order=True)
class GroupElement:
    """Canonical word ``t^k w^e`` at level ``n``."""

    family: CrossedFamily
    n: int
    k: int = 0
    e: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("level must be non-negative")
        R = self.family.rotation_order(self.n)
        if not 0 <= self.k < R:
            raise ValueError(f"rotation exponent {self.k} outside 0..{R - 1}")
        if self.e not in (0, 1) or (self.e and not self.family.has_reflection):
            raise ValueError(f"invalid reflection flag {self.e} for {self.family}")

    @property
    def is_identity(self) -> bool:
        return self.k == 0 and self.e == 0

    def __mul__(self, other: GroupElement) -> GroupElement:
        return group_mul(self, other)

    def inverse(self) -> GroupElement:
        return group_inverse(self)

    def to_json(self) -> dict:
        return {"k": self.k, "e": self.e}

    def label(self) -> str:
        return f"k{self.k}e{self.e}"

    def __repr__(self):
        return f"<{self.family} n={self.n} t^{self.k} r^{self.e}>"


def _check_same(a: GroupElement, b: GroupElement):
    if a.family != b.family:
        raise FamilyError(f"family mismatch: {a.family} vs {b.family}")
    if a.n != b.n:
        raise ValueError(f"level mismatch: {a.n} vs {b.n}")


def group_mul(a: GroupElement, b: GroupElement) -> GroupElement:
    _check_same(a, b)
    fam = a.family
    R = fam.rotation_order(a.n)
    k = a.k + (-b.k if a.e else b.k)
    e = a.e ^ b.e
    if fam.kind == "quaternionic" and a.e and b.e:
        k += R // 2
    return GroupElement(fam, a.n, k % R, e)


def group_inverse(a: GroupElement) -> GroupElement:
    fam = a.family
    R = fam.rotation_order(a.n)
    if not a.e:
        return GroupElement(fam, a.n, (-a.k) % R, 0)
    if fam.kind == "quaternionic":
        return GroupElement(fam, a.n, (a.k + R // 2) % R, 1)
    return a


def group_power(a: GroupElement, p: int) -> GroupElement:
    out = a.family.identity(a.n)
    base = a if p >= 0 else a.inverse()
    for _ in range(abs(p)):
        out = out * base
    return out


def act_on_index(g: GroupElement, i: int) -> int:
    n = g.n
    if not 0 <= i <= n:
        raise IndexError(f"index {i} outside 0..{n}")
    j = n - i if g.e else i
    return (j + g.k) % (n + 1)


# ---------------------------------------------------------------------------
# simplicial operators


@dataclass(frozen=True)
class SimplicialOperator:
    """Monotone map ``[m] -> [n]`` stored by its image sequence."""

    image: tuple[int, ...]
    target: int

    def __post_init__(self):
        img = self.image
        if not img:
            raise ValueError("source must be non-empty")
        if any(a > b for a, b in zip(img, img[1:])):
            raise ValueError(f"image {img} is not weakly increasing")
        if img[0] < 0 or img[-1] > self.target:
            raise ValueError(f"image {img} leaves [0, {self.target}]")

    @property
    def source(self) -> int:
        return len(self.image) - 1

    @property
    def is_surjective(self) -> bool:
        return len(set(self.image)) == self.target + 1

    @property
    def is_injective(self) -> bool:
        return len(set(self.image)) == len(self.image)

    def __call__(self, x: int) -> int:
        return self.image[x]

    def compose(self, inner: SimplicialOperator) -> SimplicialOperator:
        if inner.target != self.source:
            raise ValueError("operators are not composable")
        return SimplicialOperator(tuple(self.image[x] for x in inner.image), self.target)

    def factor(self) -> tuple[SimplicialOperator, SimplicialOperator]:
        """Epi-mono factorisation ``self = mono o epi``."""
        values = sorted(set(self.image))
        pos = {v: j for j, v in enumerate(values)}
        epi = SimplicialOperator(tuple(pos[v] for v in self.image), len(values) - 1)
        mono = SimplicialOperator(tuple(values), self.target)
        return mono, epi

    def elementary(self) -> list[tuple[str, int, int]]:
        """Elementary factors, outermost first, as ``(kind, index, target_level)``.

        The composite of the list (left = outermost) reproduces ``self``.
        """
        mono, epi = self.factor()
        out = []
        missing = [v for v in range(self.target + 1) if v not in set(mono.image)]
        level = self.target
        for i in reversed(missing):
            out.append(("d", i, level))
            level -= 1
        repeats = [x for x in range(epi.source) if epi.image[x] == epi.image[x + 1]]
        for j in repeats:
            out.append(("s", j, level))
            level += 1
        return out

    def __repr__(self):
        return f"Op{self.image}->[{self.target}]"


def identity_op(n: int) -> SimplicialOperator:
    return SimplicialOperator(tuple(range(n + 1)), n)


@lru_cache(maxsize=None)
def coface(n: int, i: int) -> SimplicialOperator:
    """``d_i : [n-1] -> [n]`` skipping ``i``."""
    if not 0 <= i <= n or n < 1:
        raise IndexError(f"no coface {i} into [{n}]")
    return SimplicialOperator(tuple(x if x < i else x + 1 for x in range(n)), n)


@lru_cache(maxsize=None)
def codegeneracy(n: int, i: int) -> SimplicialOperator:
    """``s_i : [n+1] -> [n]`` hitting ``i`` twice."""
    if not 0 <= i <= n:
        raise IndexError(f"no codegeneracy {i} onto [{n}]")
    return SimplicialOperator(tuple(x if x <= i else x - 1 for x in range(n + 2)), n)


def elementary_op(kind: str, i: int, target: int) -> SimplicialOperator:
    return coface(target, i) if kind == "d" else codegeneracy(target, i)


def monotone_maps(m: int, n: int):
    for img in itertools.combinations_with_replacement(range(n + 1), m + 1):
        yield SimplicialOperator(img, n)


def surjections(n: int, k: int):
    for op in monotone_maps(n, k):
        if op.is_surjective:
            yield op


# ---------------------------------------------------------------------------
# rewriting group elements past operators


def _push_elementary(g: GroupElement, kind: str, i: int) -> tuple[int, GroupElement]:
    """Rewrite ``g o u = u' o g'`` for one elementary operator ``u`` into level ``g.n``."""
    fam, n = g.family, g.n
    j = n - i if g.e else i
    if kind == "d":
        wraps = (j + g.k) // (n + 1)
        new_level, k = n - 1, g.k - wraps
    else:
        wraps = (j + g.k) // (n + 1)
        new_level, k = n + 1, g.k + wraps
    idx = (j + g.k) % (n + 1)
    R = fam.rotation_order(new_level)
    return idx, GroupElement(fam, new_level, k % R, g.e)


def twist(g: GroupElement, op: SimplicialOperator) -> tuple[SimplicialOperator, GroupElement]:
    """Return ``(op', g')`` with ``g o op = op' o g'`` in the category."""
    if op.target != g.n:
        raise ValueError("operator target does not match group level")
    if g.is_identity:
        return op, g.family.identity(op.source)
    result = None
    for kind, i, _level in op.elementary():
        idx, g = _push_elementary(g, kind, i)
        target = g.n + 1 if kind == "d" else g.n - 1
        piece = elementary_op(kind, idx, target)
        result = piece if result is None else result.compose(piece)
    if result is None:
        result = op
    return result, g


def crossed_twist(g: GroupElement, kind: str, i: int) -> tuple[GroupElement, int]:
    """Twisted element and index for a face (``kind='face'``) or degeneracy.

    Returns ``(d_i(g), g^-1(i))`` resp. ``(s_i(g), g^-1(i))`` so that
    ``d_i(g x) = d_i(g) d_{g^-1(i)} x`` on any object.
    """
    n = g.n
    if kind in ("face", "d"):
        if n < 1 or not 0 <= i <= n:
            raise IndexError(f"face {i} undefined at level {n}")
        op = coface(n, i)
    elif kind in ("degeneracy", "s"):
        if not 0 <= i <= n:
            raise IndexError(f"degeneracy {i} undefined at level {n}")
        op = codegeneracy(n, i)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    h = g.inverse()
    new_op, h2 = twist(h, op)
    j = act_on_index(h, i)
    return h2.inverse(), j


@dataclass(frozen=True)
class CrossedMorphism:
    """Canonical pair ``op o g`` with ``g`` an automorphism of the source."""

    op: SimplicialOperator
    g: GroupElement

    def __post_init__(self):
        if self.g.n != self.op.source:
            raise ValueError("group element must live at the source level")

    @property
    def source(self) -> int:
        return self.op.source

    @property
    def target(self) -> int:
        return self.op.target

    @property
    def family(self) -> CrossedFamily:
        return self.g.family

    def label(self) -> str:
        return "".join(map(str, self.op.image)) + "|" + self.g.label()

    def __matmul__(self, other: CrossedMorphism) -> CrossedMorphism:
        return compose(self, other)


def morphism(family: CrossedFamily, image, target: int, k: int = 0, e: int = 0) -> CrossedMorphism:
    op = SimplicialOperator(tuple(image), target)
    return CrossedMorphism(op, GroupElement(family, op.source, k, e))


def from_operator(family: CrossedFamily, op: SimplicialOperator) -> CrossedMorphism:
    return CrossedMorphism(op, family.identity(op.source))


def from_group(g: GroupElement) -> CrossedMorphism:
    return CrossedMorphism(identity_op(g.n), g)


def identity_morphism(family: CrossedFamily, n: int) -> CrossedMorphism:
    return CrossedMorphism(identity_op(n), family.identity(n))


def compose(f2: CrossedMorphism, f1: CrossedMorphism) -> CrossedMorphism:
    """``f2 o f1`` re-canonicalised."""
    if f1.family != f2.family:
        raise FamilyError("family mismatch")
    if f1.target != f2.source:
        raise ValueError(f"cannot compose [{f1.source}]->[{f1.target}] with [{f2.source}]->[{f2.target}]")
    op1, g2 = twist(f2.g, f1.op)
    return CrossedMorphism(f2.op.compose(op1), g2 * f1.g)


def hom_count(family: CrossedFamily, m: int, n: int) -> int:
    return comb(n + m + 1, m + 1) * group_order(family, m)


def all_morphisms(family: CrossedFamily, m: int, n: int) -> list[CrossedMorphism]:
    gs = family.elements(m)
    return [CrossedMorphism(op, g) for op in monotone_maps(m, n) for g in gs]
