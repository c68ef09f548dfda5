"""Finite spaces, indexed set families, covers and the star calculus on them.

Every subset of points is an ``int`` bitmask over point ids ``0..n-1``.
A topology is given by a basis; opens are never enumerated.  Since the
space is finite, every point has a smallest basis neighbourhood, and all
"for every neighbourhood" quantifiers reduce to that one set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from ._bits import elements, full, subset, to_list, to_mask

Label = Hashable


class PreconditionError(ValueError):
    """A checked hypothesis does not hold; ``witness`` names where."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class FiniteSpace:
    n: int
    basis: tuple[int, ...]
    _nbhd: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a space needs at least one point")
        if not self.basis:
            raise ValueError("basis is empty")
        whole = full(self.n)
        union = 0
        for b in self.basis:
            if not subset(b, whole):
                raise ValueError(f"basis element {to_list(b)} has ids outside 0..{self.n - 1}")
            union |= b
        if union != whole:
            missing = to_list(whole & ~union)
            raise ValueError(f"basis does not cover points {missing}")
        nbhd = []
        for x in range(self.n):
            bit = 1 << x
            inter = whole
            for b in self.basis:
                if b & bit:
                    inter &= b
            # basis axiom: the intersection of all basic sets at x is itself basic
            if inter not in self.basis:
                raise ValueError(
                    f"not a basis: no basis element at {x} inside the intersection {to_list(inter)}"
                )
            nbhd.append(inter)
        object.__setattr__(self, "_nbhd", tuple(nbhd))

    @classmethod
    def discrete(cls, n: int) -> FiniteSpace:
        return cls(n, tuple(1 << x for x in range(n)))

    @classmethod
    def from_preorder(cls, n: int, leq: Iterable[tuple[int, int]]) -> FiniteSpace:
        """Alexandrov space of a preorder: the basic set at x is {y : x <= y}."""
        up = [1 << x for x in range(n)]
        for a, b in leq:
            up[a] |= 1 << b
        changed = True
        while changed:  # transitive closure
            changed = False
            for x in range(n):
                acc = up[x]
                for y in elements(up[x]):
                    acc |= up[y]
                if acc != up[x]:
                    up[x] = acc
                    changed = True
        return cls(n, tuple(dict.fromkeys(up)))

    @property
    def points(self) -> range:
        return range(self.n)

    @property
    def whole(self) -> int:
        return full(self.n)

    def nbhd(self, x: int) -> int:
        """Smallest open set containing x."""
        return self._nbhd[x]

    def is_open(self, a: int) -> bool:
        return all(subset(self._nbhd[x], a) for x in elements(a))

    def interior(self, a: int) -> int:
        return to_mask(x for x in elements(a) if subset(self._nbhd[x], a))

    def closure(self, a: int) -> int:
        outside = 0
        for b in self.basis:
            if not b & a:
                outside |= b
        return self.whole & ~outside

    def is_closed(self, a: int) -> bool:
        return self.closure(a) == a

    @property
    def is_t0(self) -> bool:
        nb = self._nbhd
        return len(set(nb)) == self.n

    @property
    def is_t1(self) -> bool:
        return all(nb == 1 << x for x, nb in enumerate(self._nbhd))

    @property
    def is_discrete(self) -> bool:
        return self.is_t1


def validate_space(points: int | Sequence[int], basis: Iterable[Iterable[int]]) -> FiniteSpace:
    if isinstance(points, int):
        n = points
    else:
        ids = list(points)
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate point ids {dup}")
        if sorted(ids) != list(range(len(ids))):
            raise ValueError("point ids must be exactly 0..n-1")
        n = len(ids)
    masks = tuple(to_mask(b) for b in basis)
    return FiniteSpace(n, masks)


def sierpinski() -> FiniteSpace:
    """Point 0 open, point 1 closed."""
    return FiniteSpace(2, (0b01, 0b11))


@dataclass(frozen=True)
class SetFamily:
    """Indexed family of subsets of ``range(n)``; repeated sets under distinct labels are allowed."""

    n: int
    index: tuple[Label, ...]
    members: tuple[int, ...]

    def __post_init__(self):
        if len(self.index) != len(self.members):
            raise ValueError("index and members differ in length")
        if len(set(self.index)) != len(self.index):
            raise ValueError("duplicate labels in index")
        whole = full(self.n)
        for label, m in zip(self.index, self.members):
            if not subset(m, whole):
                raise ValueError(f"member {label!r} has ids outside 0..{self.n - 1}")

    @classmethod
    def from_sets(cls, n: int, sets: Mapping[Label, Iterable[int]] | Sequence[Iterable[int]]):
        if isinstance(sets, Mapping):
            items = list(sets.items())
        else:
            items = list(enumerate(sets))
        return cls(n, tuple(k for k, _ in items), tuple(to_mask(v) for _, v in items))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def items(self):
        return zip(self.index, self.members)

    def __getitem__(self, label: Label) -> int:
        return self.members[self.index.index(label)]

    def union(self) -> int:
        u = 0
        for m in self.members:
            u |= m
        return u

    def nonempty(self) -> SetFamily:
        keep = [(k, m) for k, m in self.items() if m]
        return SetFamily(self.n, tuple(k for k, _ in keep), tuple(m for _, m in keep))

    def as_family(self) -> SetFamily:
        return SetFamily(self.n, self.index, self.members)

    def as_cover(self) -> Cover:
        return Cover(self.n, self.index, self.members)

    def sets(self) -> dict:
        return {k: to_list(m) for k, m in self.items()}


@dataclass(frozen=True)
class Cover(SetFamily):
    def __post_init__(self):
        super().__post_init__()
        missing = full(self.n) & ~self.union()
        if missing:
            raise ValueError(f"family does not cover points {to_list(missing)}")


def star(a: int, c: SetFamily) -> int:
    s = 0
    for m in c.members:
        if m & a:
            s |= m
    return s


def star_cover(c: Cover) -> Cover:
    return Cover(c.n, tuple(range(c.n)), tuple(star(1 << x, c) for x in range(c.n)))


def _inside_some(a: int, b: SetFamily) -> bool:
    return any(subset(a, m) for m in b.members)


def refines(a: SetFamily, b: SetFamily) -> bool:
    return all(_inside_some(m, b) for m in a.members)


def star_refines(a: Cover, b: SetFamily, mode: str = "point") -> bool:
    if mode == "point":
        return all(_inside_some(star(1 << x, a), b) for x in range(a.n))
    if mode == "set":
        return all(_inside_some(star(m, a), b) for m in a.members)
    raise ValueError(f"unknown mode {mode!r}")


def is_discrete_family(f: SetFamily, space: FiniteSpace) -> bool:
    return discreteness_witness(f, space) is None


def discreteness_witness(f: SetFamily, space: FiniteSpace) -> int | None:
    """First point whose smallest neighbourhood meets two members, or None."""
    for x in space.points:
        nb = space.nbhd(x)
        hits = 0
        for m in f.members:
            if m & nb:
                hits += 1
                if hits > 1:
                    return x
    return None


def meets_at_most_one(f: SetFamily, c: SetFamily) -> bool:
    """Every member of ``c`` meets at most one member of ``f``."""
    for u in c.members:
        if sum(1 for m in f.members if m & u) > 1:
            return False
    return True


def multiplicity(f: SetFamily) -> list[int]:
    counts = [0] * f.n
    for m in f.members:
        for x in elements(m):
            counts[x] += 1
    return counts


def max_multiplicity(f: SetFamily) -> int:
    return max(multiplicity(f), default=0)


def is_point_finite(f: SetFamily) -> bool:
    # finite families are point-finite; the multiplicity is the informative part
    return max_multiplicity(f) <= len(f)


def closure(a: int, space: FiniteSpace) -> int:
    return space.closure(a)


STAR_MODES = ("star", "starstar", "setstar")


def star_basis_witness(space: FiniteSpace, seq: Sequence[Cover], mode: str) -> int | None:
    """First point at which the sequence's stars fail to form a local basis."""
    if mode not in STAR_MODES:
        raise ValueError(f"unknown mode {mode!r}")
    for c in seq:
        for label, m in c.items():
            if not space.is_open(m):
                raise ValueError(f"cover member {label!r} is not open")
    for x in space.points:
        target = space.nbhd(x)
        ok = False
        for c in seq:
            if mode == "star":
                s = star(1 << x, c)
            elif mode == "starstar":
                s = star(star(1 << x, c), c)
            else:
                # st(V, U_n) is monotone in V, so the smallest neighbourhood is the best V
                s = star(target, c)
            if subset(s, target):
                ok = True
                break
        if not ok:
            return x
    return None


def star_basis_check(space: FiniteSpace, seq: Sequence[Cover], mode: str = "star") -> bool:
    return star_basis_witness(space, seq, mode) is None
