"""From a star-refining cover sequence to a chain pseudometric and a small partition of unity."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ._bits import to_mask
from .metric import MetricTable
from .pou import FinitePartition, PartitionOfUnity, normalize
from .space import Cover, FiniteSpace, PreconditionError, star_refines


@dataclass(frozen=True)
class CoverSequence:
    covers: tuple[Cover, ...]
    modes: tuple[str, ...]  # refinement mode verified for each consecutive pair
    reduced: bool = False  # True when only the odd-numbered input covers were kept

    def __post_init__(self):
        if not self.covers:
            raise ValueError("empty cover sequence")
        if len({c.n for c in self.covers}) != 1:
            raise ValueError("covers live on different spaces")

    @property
    def n(self) -> int:
        return self.covers[0].n

    @property
    def depth(self) -> int:
        return len(self.covers)

    def __iter__(self):
        return iter(self.covers)

    def __len__(self) -> int:
        return len(self.covers)

    def __getitem__(self, i):
        return self.covers[i]


def covers_of(seq: CoverSequence | Iterable[Cover]) -> tuple[Cover, ...]:
    return seq.covers if isinstance(seq, CoverSequence) else tuple(seq)


def validate_sequence(covers: Sequence[Cover]) -> CoverSequence:
    covers = tuple(covers)
    if not covers:
        raise ValueError("empty cover sequence")
    pairs = list(zip(covers[1:], covers))
    if all(star_refines(fine, coarse, "set") for fine, coarse in pairs):
        return CoverSequence(covers, ("set",) * len(pairs))
    for k, (fine, coarse) in enumerate(pairs, start=1):
        if not star_refines(fine, coarse, "point"):
            raise PreconditionError(
                f"cover {k + 1} does not star refine cover {k}", witness=(k, k + 1)
            )
    odd = covers[::2]
    odd_pairs = list(zip(odd[1:], odd))
    for k, (fine, coarse) in enumerate(odd_pairs, start=1):
        if not star_refines(fine, coarse, "set"):
            raise PreconditionError(
                f"odd-numbered covers {2 * k - 1} and {2 * k + 1} fail set-mode star refinement",
                witness=(2 * k - 1, 2 * k + 1),
            )
    return CoverSequence(odd, ("set",) * len(odd_pairs), reduced=True)


@dataclass(frozen=True)
class RhoTable:
    table: tuple[tuple[Fraction, ...], ...]
    depth: int

    @property
    def n(self) -> int:
        return len(self.table)

    def __call__(self, x: int, y: int) -> Fraction:
        return self.table[x][y]


def rho(seq: CoverSequence) -> RhoTable:
    """``2**-k`` for the deepest level k whose cover has a member holding both points, else 1."""
    n, depth = seq.n, seq.depth
    table = [[Fraction(1)] * n for _ in range(n)]
    for k, cover in enumerate(seq.covers, start=1):
        w = Fraction(1, 2**k)
        for m in cover.members:
            pts = [x for x in range(n) if m >> x & 1]
            for x in pts:
                row = table[x]
                for y in pts:
                    if w < row[y]:
                        row[y] = w
    return RhoTable(tuple(tuple(r) for r in table), depth)


def chain_metric(r: RhoTable | Sequence[Sequence[Fraction]]) -> MetricTable:
    """Infimum over chains of summed link lengths (Floyd-Warshall; the diagonal is 0)."""
    t = r.table if isinstance(r, RhoTable) else r
    n = len(t)
    d = [list(row) for row in t]
    for x in range(n):
        if any(d[x][y] != d[y][x] for y in range(n)):
            raise ValueError("rho table is not symmetric")
        d[x][x] = Fraction(0)
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            di = d[i]
            for j in range(n):
                alt = dik + dk[j]
                if alt < di[j]:
                    di[j] = alt
    return MetricTable.from_rows(d)


@dataclass(frozen=True)
class Quotient:
    space: FiniteSpace
    projection: tuple[int, ...]  # point -> class id
    metric: MetricTable
    representatives: tuple[int, ...]


def quotient(m: MetricTable, space: FiniteSpace | None = None) -> Quotient:
    """Identify points at distance 0.  The quotient carries its (discrete) metric topology."""
    if space is not None and space.n != m.n:
        raise ValueError("metric and space differ in size")
    proj = [-1] * m.n
    reps = []
    for x in range(m.n):
        if proj[x] >= 0:
            continue
        proj[x] = len(reps)
        for y in range(x + 1, m.n):
            if m(x, y) == 0:
                proj[y] = len(reps)
        reps.append(x)
    qm = MetricTable.from_rows([[m(a, b) for b in reps] for a in reps])
    return Quotient(FiniteSpace.discrete(len(reps)), tuple(proj), qm, tuple(reps))


BUMP_RADIUS = Fraction(1, 4)


def small_pou_from_sequence(seq: CoverSequence) -> PartitionOfUnity:
    """Normalized bumps ``max(0, 1/4 - d(p, x))``, one per d-class p, labelled by its first point."""
    if seq.depth < 3:
        raise PreconditionError(f"sequence depth {seq.depth} < 3", witness=seq.depth)
    d = chain_metric(rho(seq))
    q = quotient(d)
    rows = [
        [max(Fraction(0), BUMP_RADIUS - d(p, x)) for p in q.representatives] for x in range(d.n)
    ]
    return normalize(FinitePartition(q.representatives, rows))


def ball_family(d: MetricTable, r: Fraction) -> Cover:
    return Cover(d.n, tuple(range(d.n)), tuple(d.ball(x, r) for x in range(d.n)))


def rho_bound_witness(r: RhoTable, d: MetricTable):
    """First (x, y, n) with d(x, y) < 2**-n but rho(x, y) > 2**-n, for n up to the depth."""
    for x in range(r.n):
        for y in range(r.n):
            if x == y:
                continue
            for k in range(1, r.depth + 1):
                w = Fraction(1, 2**k)
                if d(x, y) < w and r(x, y) > w:
                    return (x, y, k)
    return None


def _is_chain_member_pair(cover: Cover, x: int, y: int) -> bool:
    both = (1 << x) | (1 << y)
    return any(m & both == both for m in cover.members)


def equivalence_classes(seq: CoverSequence) -> list[int]:
    """Components of "shares a member at every level", as masks.

    At finite depth that relation need not be transitive, so classes are its
    connected components: chains whose every link has rho = 2**-depth.
    """
    n = seq.n
    linked = [
        to_mask(y for y in range(n) if all(_is_chain_member_pair(c, x, y) for c in seq))
        for x in range(n)
    ]
    seen = 0
    classes = []
    for x in range(n):
        if seen >> x & 1:
            continue
        cls, frontier = 0, 1 << x
        while frontier:
            cls |= frontier
            nxt = 0
            for y in range(n):
                if frontier >> y & 1:
                    nxt |= linked[y]
            frontier = nxt & ~cls
        seen |= cls
        classes.append(cls)
    return classes
