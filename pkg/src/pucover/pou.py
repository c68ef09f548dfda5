"""Partitions of unity on finite spaces, stored as exact point-by-label tables.

A partition of unity ``f`` is the map ``x -> f_x`` into the simplex of
``l1(S)``: row ``x`` holds ``f_s(x)`` for every label ``s`` of the index.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Hashable, Iterator, Sequence

from ._bits import elements, to_mask
from .metric import MetricTable
from .space import (
    Cover,
    FiniteSpace,
    Label,
    PreconditionError,
    SetFamily,
    refines,
    subset,
)

Row = tuple[Fraction, ...]


def _as_rows(rows) -> tuple[Row, ...]:
    return tuple(tuple(Fraction(v) for v in row) for row in rows)


@dataclass(frozen=True)
class FinitePartition:
    """Non-negative functions ``f_s`` whose row sums ``g`` need not be 1."""

    index: tuple[Label, ...]
    rows: tuple[Row, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", _as_rows(self.rows))
        if len(set(self.index)) != len(self.index):
            raise ValueError("duplicate labels in index")
        for x, row in enumerate(self.rows):
            if len(row) != len(self.index):
                raise ValueError(f"row {x} has {len(row)} entries for {len(self.index)} labels")
            if any(v < 0 for v in row):
                raise ValueError(f"negative value in row {x}")

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def row_sums(self) -> tuple[Fraction, ...]:
        return tuple(sum(row, Fraction(0)) for row in self.rows)

    @property
    def zero_rows(self) -> list[int]:
        return [x for x, g in enumerate(self.row_sums) if g == 0]

    def column(self, label: Label) -> tuple[Fraction, ...]:
        j = self.index.index(label)
        return tuple(row[j] for row in self.rows)


@dataclass(frozen=True)
class PartitionOfUnity(FinitePartition):
    def __post_init__(self):
        super().__post_init__()
        for x, g in enumerate(self.row_sums):
            if g != 1:
                raise ValueError(f"row {x} sums to {g}, not 1")

    @classmethod
    def indicator(cls, n: int, blocks: Sequence[Sequence[int]], index=None) -> PartitionOfUnity:
        """Indicator functions of a partition of ``range(n)`` into blocks."""
        index = tuple(index if index is not None else range(len(blocks)))
        rows = [[0] * len(blocks) for _ in range(n)]
        for j, block in enumerate(blocks):
            for x in block:
                rows[x][j] = 1
        return cls(index, rows)

    @classmethod
    def constant(cls, n: int, label: Label = "a") -> PartitionOfUnity:
        return cls((label,), [[1]] * n)

    def value(self, x: int, label: Label) -> Fraction:
        return self.rows[x][self.index.index(label)]

    def support(self, x: int) -> tuple[Label, ...]:
        return tuple(s for s, v in zip(self.index, self.rows[x]) if v)

    def support_sizes(self) -> list[int]:
        return [sum(1 for v in row if v) for row in self.rows]

    def row_dict(self, x: int) -> dict:
        return {s: v for s, v in zip(self.index, self.rows[x]) if v}


def normalize(p: FinitePartition) -> PartitionOfUnity:
    sums = p.row_sums
    for x, g in enumerate(sums):
        if g <= 0:
            raise PreconditionError(f"row sum at point {x} is zero; cannot normalize", witness=x)
    return PartitionOfUnity(p.index, [[v / g for v in row] for row, g in zip(p.rows, sums)])


def carriers(f: FinitePartition) -> SetFamily:
    """Per label, the points where that function is positive (possibly empty)."""
    members = tuple(
        to_mask(x for x, row in enumerate(f.rows) if row[j] > 0) for j in range(len(f.index))
    )
    return SetFamily(f.n, f.index, members)


def empty_carriers(f: FinitePartition) -> list[Label]:
    return [s for s, m in carriers(f).items() if not m]


def carrier_cover(f: FinitePartition) -> Cover:
    return carriers(f).nonempty().as_cover()


def is_small(f: FinitePartition, u: SetFamily) -> bool:
    return refines(carriers(f).nonempty(), u)


def combine(fs: Sequence[FinitePartition]) -> PartitionOfUnity:
    """Weight the n-th partition by 2**-n, take the disjoint union of labels, normalize.

    Output labels are ``(n, s)`` with ``n`` counted from 1.
    """
    if not fs:
        raise ValueError("combine needs at least one partition")
    n = fs[0].n
    if any(f.n != n for f in fs):
        raise ValueError("partitions live on different spaces")
    index = [(k, s) for k, f in enumerate(fs, start=1) for s in f.index]
    rows = []
    for x in range(n):
        row = []
        for k, f in enumerate(fs, start=1):
            w = Fraction(1, 2**k)
            row.extend(v * w for v in f.rows[x])
        rows.append(row)
    return normalize(FinitePartition(tuple(index), rows))


def merge_labels(f: FinitePartition, key: Callable[[Label], Hashable]) -> PartitionOfUnity:
    """Sum the columns whose labels share ``key(label)``."""
    new_index = list(dict.fromkeys(key(s) for s in f.index))
    pos = {k: i for i, k in enumerate(new_index)}
    rows = []
    for row in f.rows:
        acc = [Fraction(0)] * len(new_index)
        for s, v in zip(f.index, row):
            acc[pos[key(s)]] += v
        rows.append(acc)
    return PartitionOfUnity(tuple(new_index), rows)


def derivative_row(f: PartitionOfUnity, x: int) -> list[tuple[frozenset, Fraction]]:
    """The chain ``T_1 < ... < T_k`` at x with weights ``i * (v_i - v_{i+1})``, zeros kept."""
    order = {s: i for i, s in enumerate(f.index)}
    pos = [(s, v) for s, v in zip(f.index, f.rows[x]) if v > 0]
    pos.sort(key=lambda sv: (-sv[1], order[sv[0]]))
    out = []
    prefix: list = []
    for i, (s, v) in enumerate(pos, start=1):
        prefix.append(s)
        nxt = pos[i][1] if i < len(pos) else Fraction(0)
        out.append((frozenset(prefix), i * (v - nxt)))
    return out


def derivative(f: PartitionOfUnity) -> PartitionOfUnity:
    """Derivative indexed by finite label sets; labels never positive anywhere are dropped."""
    order = {s: i for i, s in enumerate(f.index)}
    chains = [derivative_row(f, x) for x in range(f.n)]
    seen = {t for chain in chains for t, w in chain if w}
    index = sorted(seen, key=lambda t: (len(t), sorted(order[s] for s in t)))
    pos = {t: i for i, t in enumerate(index)}
    rows = []
    for chain in chains:
        row = [Fraction(0)] * len(index)
        for t, w in chain:
            if w:
                row[pos[t]] = w
        rows.append(row)
    return PartitionOfUnity(tuple(index), rows)


def derivative_law_witness(f: PartitionOfUnity, df: PartitionOfUnity) -> tuple | None:
    """Check both defining laws of a derivative exactly; return the first violation."""
    for x in range(f.n):
        for s, v in zip(f.index, f.rows[x]):
            total = sum(
                (w / len(t) for t, w in zip(df.index, df.rows[x]) if s in t), Fraction(0)
            )
            if total != v:
                return ("sum", x, s)
        live = [t for t, w in zip(df.index, df.rows[x]) if w]
        for t, u in combinations(live, 2):
            if not (t <= u or u <= t):
                return ("chain", x, t, u)
    return None


@dataclass(frozen=True)
class SimplicialComplex:
    """Downward-closed face set, stored through its facets."""

    vertices: tuple[Label, ...]
    facets: tuple[frozenset, ...]

    @classmethod
    def from_faces(cls, vertices, faces) -> SimplicialComplex:
        faces = {frozenset(f) for f in faces if f}
        maximal = [f for f in faces if not any(f < g for g in faces)]
        order = {v: i for i, v in enumerate(vertices)}
        maximal.sort(key=lambda f: (len(f), sorted(order[v] for v in f)))
        return cls(tuple(vertices), tuple(maximal))

    def __contains__(self, face) -> bool:
        face = frozenset(face)
        return bool(face) and any(face <= f for f in self.facets)

    def faces(self) -> Iterator[frozenset]:
        order = {v: i for i, v in enumerate(self.vertices)}
        seen = set()
        for facet in self.facets:
            ordered = sorted(facet, key=order.__getitem__)
            for k in range(1, len(ordered) + 1):
                for c in combinations(ordered, k):
                    fs = frozenset(c)
                    if fs not in seen:
                        seen.add(fs)
        yield from sorted(seen, key=lambda f: (len(f), sorted(order[v] for v in f)))

    def edges(self) -> list[tuple[Label, Label]]:
        order = {v: i for i, v in enumerate(self.vertices)}
        out = set()
        for facet in self.facets:
            for a, b in combinations(sorted(facet, key=order.__getitem__), 2):
                out.add((a, b))
        return sorted(out, key=lambda e: (order[e[0]], order[e[1]]))

    @property
    def dimension(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1


def nerve(obj: SetFamily | FinitePartition) -> SimplicialComplex:
    """Faces are label sets whose members (or carriers) share a point."""
    fam = obj if isinstance(obj, SetFamily) else carriers(obj)
    vertices = tuple(s for s, m in fam.items() if m)
    faces = []
    for x in range(fam.n):
        bit = 1 << x
        faces.append([s for s, m in fam.items() if m & bit])
    return SimplicialComplex.from_faces(vertices, faces)


def l1_metric(f: FinitePartition) -> MetricTable:
    rows = f.rows
    table = [
        [sum((abs(a - b) for a, b in zip(rows[x], rows[y])), Fraction(0)) for y in range(f.n)]
        for x in range(f.n)
    ]
    return MetricTable.from_rows(table)


def is_continuous(f: FinitePartition, space: FiniteSpace) -> bool:
    """Real-valued maps on a finite space are continuous iff constant on each smallest neighbourhood."""
    for x in space.points:
        for y in elements(space.nbhd(x)):
            if f.rows[y] != f.rows[x]:
                return False
    return True


def carriers_basis_witness(f: PartitionOfUnity, space: FiniteSpace):
    """None if the carriers of a continuous ``f`` form a basis of ``space``."""
    if f.n != space.n:
        raise ValueError("partition and space differ in size")
    if not is_continuous(f, space):
        return ("discontinuous",)
    fam = carriers(f)
    for s, m in fam.items():
        if not space.is_open(m):
            return ("carrier-not-open", s)
    for x in space.points:
        nb = space.nbhd(x)
        bit = 1 << x
        if not any(m & bit and subset(m, nb) for m in fam.members):
            return ("no-carrier-inside", x)
    return None


def carriers_basis_check(f: PartitionOfUnity, space: FiniteSpace) -> bool:
    return carriers_basis_witness(f, space) is None


def metric_urysohn(d: int, u: int, m: MetricTable) -> tuple[Fraction, ...]:
    """``dist(x, X-U) / (dist(x, X-U) + dist(x, D))``: 1 on D, 0 off U."""
    if not subset(d, u):
        raise PreconditionError("D is not contained in U")
    outside = ((1 << m.n) - 1) & ~u
    if not outside:
        return tuple(Fraction(1) for _ in range(m.n))
    if not d:
        return tuple(Fraction(0) for _ in range(m.n))
    gap = m.set_distance(d, outside)
    if gap == 0:
        raise PreconditionError("D and X-U are at distance 0", witness=gap)
    vals = []
    for x in range(m.n):
        a = m.dist_to_set(x, outside)
        b = m.dist_to_set(x, d)
        vals.append(a / (a + b))
    return tuple(vals)


@dataclass(frozen=True)
class EmbeddingMap:
    """Point ``x`` goes to the finite sequence ``(f_1(x)/2, f_2(x)/4, ...)``."""

    coords: tuple[Row, ...]
    separating: bool

    def distance(self, x: int, y: int) -> Fraction:
        return sum((abs(a - b) for a, b in zip(self.coords[x], self.coords[y])), Fraction(0))

    @property
    def injective(self) -> bool:
        n = len(self.coords)
        return all(self.distance(x, y) > 0 for x in range(n) for y in range(x + 1, n))

    def metric(self) -> MetricTable:
        n = len(self.coords)
        return MetricTable.from_rows([[self.distance(x, y) for y in range(n)] for x in range(n)])


def carriers_separate(fns: Sequence[Sequence[Fraction]]) -> bool:
    """Each pair of points is told apart by some carrier containing exactly one of them."""
    n = len(fns[0])
    for x in range(n):
        for y in range(x + 1, n):
            if not any((fn[x] > 0) != (fn[y] > 0) for fn in fns):
                return False
    return True


def urysohn_embed(fns: Sequence[Sequence]) -> EmbeddingMap:
    if not fns:
        raise ValueError("urysohn_embed needs at least one function")
    fns = [tuple(Fraction(v) for v in fn) for fn in fns]
    n = len(fns[0])
    if any(len(fn) != n for fn in fns):
        raise ValueError("functions have different domains")
    for k, fn in enumerate(fns, start=1):
        if any(v < 0 or v > 1 for v in fn):
            raise ValueError(f"function {k} leaves [0, 1]")
    coords = tuple(
        tuple(fn[x] / 2**k for k, fn in enumerate(fns, start=1)) for x in range(n)
    )
    return EmbeddingMap(coords, carriers_separate(fns))
