"""Discrete closed shrinkings of covers and the partitions of unity built from them.

Index order of a cover is its well-order.  ``INF`` sits above every label.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from ._bits import elements, full, subset, to_list, to_mask
from .chain import CoverSequence, covers_of, validate_sequence
from .metric import MetricTable
from .pou import FinitePartition, PartitionOfUnity, carriers, is_small, l1_metric, metric_urysohn, normalize
from .space import (
    Cover,
    FiniteSpace,
    Label,
    PreconditionError,
    SetFamily,
    discreteness_witness,
    meets_at_most_one,
    multiplicity,
    refines,
    star,
)


class _Infinity:
    def __repr__(self):
        return "∞"

    def __str__(self):
        return "inf"


INF = _Infinity()


def alpha(u: int, v: SetFamily) -> Label:
    """First label whose member contains ``u``; ``INF`` if none does."""
    for s, m in v.items():
        if subset(u, m):
            return s
    return INF


@dataclass(frozen=True)
class Discretization:
    alpha: tuple  # aligned with the index of the discretized cover U
    d: SetFamily  # indexed like the well-ordered cover V

    def law_witness(self, v: SetFamily, u: SetFamily):
        """First violation of ``D_s <= V_s`` or of ``U meets D_s => alpha(U) = s``."""
        for s, ds in self.d.items():
            if not subset(ds, v[s]):
                return ("outside", s)
            for lab, a, m in zip(u.index, self.alpha, u.members):
                if m & ds and a != s:
                    return ("alpha", lab, s)
        return None


def discretize(v: SetFamily, u: Cover) -> Discretization:
    if u.n != v.n:
        raise ValueError("covers live on different spaces")
    al = tuple(alpha(m, v) for m in u.members)
    whole = full(u.n)
    ds = []
    for s in v.index:
        removed = 0
        for a, m in zip(al, u.members):
            if a != s:
                removed |= m
        ds.append(whole & ~removed)
    out = Discretization(al, SetFamily(u.n, v.index, tuple(ds)))
    bad = out.law_witness(v, u)
    if bad is not None:
        raise AssertionError(f"discretization law violated: {bad}")
    return out


def _first_label_at(v: SetFamily, x: int) -> Label | None:
    bit = 1 << x
    for s, m in v.items():
        if m & bit:
            return s
    return None


@dataclass(frozen=True)
class SigmaDiscretization:
    levels: tuple[Discretization, ...]
    uncovered: int

    @property
    def covered(self) -> bool:
        return self.uncovered == 0

    def families(self) -> list[SetFamily]:
        return [lvl.d for lvl in self.levels]

    def union(self) -> int:
        u = 0
        for lvl in self.levels:
            u |= lvl.d.union()
        return u


def star_hypothesis_witness(v: SetFamily, seq, double: bool = False):
    """(x, s) where no level's star at x fits in ``V_s``, s the first label holding x."""
    covers = covers_of(seq)
    for x in range(v.n):
        s = _first_label_at(v, x)
        if s is None:
            return (x, None)
        target = v[s]
        ok = False
        for c in covers:
            st = star(1 << x, c)
            if double:
                st = star(st, c)
            if subset(st, target):
                ok = True
                break
        if not ok:
            return (x, s)
    return None


def sigma_discretize(v: SetFamily, seq) -> SigmaDiscretization:
    bad = star_hypothesis_witness(v, seq)
    if bad is not None:
        raise PreconditionError(f"no level has st({bad[0]}) inside V_{bad[1]}", witness=bad)
    levels = tuple(discretize(v, c) for c in covers_of(seq))
    out = SigmaDiscretization(levels, 0)
    uncovered = full(v.n) & ~out.union()
    if uncovered:
        raise AssertionError(f"discretizations miss points {to_list(uncovered)}")
    return out


@dataclass(frozen=True)
class SigmaRefinement:
    levels: tuple[SetFamily, ...]
    sequence: CoverSequence  # the pulled-back ball covers
    carrier_cover: Cover

    def union(self) -> int:
        u = 0
        for f in self.levels:
            u |= f.union()
        return u


def sigma_refinement_witness(levels: Sequence[SetFamily], u: SetFamily, space: FiniteSpace):
    """Check a claimed sigma-discrete closed refinement of ``u``; None if it is one."""
    for k, fam in enumerate(levels, start=1):
        x = discreteness_witness(fam, space)
        if x is not None:
            return ("not-discrete", k, x)
        for s, m in fam.items():
            if not space.is_closed(m):
                return ("not-closed", k, s)
        if not refines(fam.nonempty(), u):
            return ("not-refining", k)
    cov = 0
    for fam in levels:
        cov |= fam.union()
    if cov != full(u.n):
        return ("not-covering", to_list(full(u.n) & ~cov))
    return None


def _image_ball_sequence(f: PartitionOfUnity) -> CoverSequence:
    rows = list(dict.fromkeys(f.rows))
    img = FinitePartition(f.index, rows)
    dm = l1_metric(img)
    gaps = [dm(i, j) for i in range(dm.n) for j in range(i + 1, dm.n)]
    gap = min(gaps, default=None)
    depth = 1
    if gap is not None:
        while 2 * Fraction(1, 4**depth) >= gap:
            depth += 1
    where = {row: i for i, row in enumerate(rows)}
    point_image = [where[row] for row in f.rows]
    covers = []
    for k in range(1, depth + 1):
        r = Fraction(1, 4**k)
        members = []
        for c in range(dm.n):
            ball = dm.ball(c, r)
            members.append(to_mask(x for x in range(f.n) if ball >> point_image[x] & 1))
        covers.append(Cover(f.n, tuple(range(dm.n)), tuple(members)))
    return validate_sequence(covers)


def sigma_refinement_from_pou(f: PartitionOfUnity, u: SetFamily, space: FiniteSpace | None = None) -> SigmaRefinement:
    """Pull back l1 balls of radii ``4**-n`` from the image of f and discretize its carrier cover."""
    if not is_small(f, u):
        raise PreconditionError("partition is not small with respect to the cover")
    space = space or FiniteSpace.discrete(f.n)
    seq = _image_ball_sequence(f)
    cc = carriers(f).nonempty().as_cover()
    sd = sigma_discretize(cc, seq)
    levels = tuple(sd.families())
    bad = sigma_refinement_witness(levels, u, space)
    if bad is not None:
        raise AssertionError(f"sigma refinement check failed: {bad}")
    return SigmaRefinement(levels, seq, cc)


@dataclass(frozen=True)
class StarDiscretization:
    levels: tuple[Discretization, ...]
    stars: tuple[SetFamily, ...]  # coarsenings st(D_s, U_n)
    uncovered: int
    discrete: tuple[bool, ...]  # coarsening passes is_discrete_family at each level
    separated: tuple[bool, ...]  # no U_n member meets two coarsening members

    @property
    def covered(self) -> bool:
        return self.uncovered == 0


def star_discretize(u: SetFamily, seq, space: FiniteSpace | None = None) -> StarDiscretization:
    space = space or FiniteSpace.discrete(u.n)
    bad = star_hypothesis_witness(u, seq, double=True)
    if bad is not None:
        raise PreconditionError(f"no level has st({bad[0]}, st(U_n)) inside U_{bad[1]}", witness=bad)
    levels, stars, disc, sep = [], [], [], []
    cov = 0
    for c in covers_of(seq):
        vn = Cover(c.n, c.index, tuple(star(m, c) for m in c.members))
        dz = discretize(u, vn)
        co = SetFamily(c.n, u.index, tuple(star(ds, c) for ds in dz.d.members))
        levels.append(dz)
        stars.append(co)
        disc.append(discreteness_witness(co, space) is None)
        sep.append(meets_at_most_one(co, c))
        cov |= dz.d.union()
    return StarDiscretization(
        tuple(levels), tuple(stars), full(u.n) & ~cov, tuple(disc), tuple(sep)
    )


@dataclass(frozen=True)
class Enlargement:
    family: SetFamily  # the closed enlargements D*
    interiors: SetFamily
    margin: Fraction | None  # None when nothing constrains the enlargement


def enlarge(d: SetFamily, bounds: SetFamily, m: MetricTable, space: FiniteSpace | None = None) -> Enlargement:
    """Closed ``margin/3`` neighbourhoods of a discrete family, kept inside ``bounds``."""
    space = space or FiniteSpace.discrete(m.n)
    whole = full(m.n)
    gaps = []
    for ds, b in zip(d.members, bounds.members):
        if not subset(ds, b):
            raise PreconditionError("member leaves its bound")
        g = m.set_distance(ds, whole & ~b)
        if g is not None:
            gaps.append(g)
    for a, b in combinations(d.members, 2):
        g = m.set_distance(a, b)
        if g is not None:
            gaps.append(g)
    mu = min(gaps, default=None)
    if mu == 0:
        raise PreconditionError("enlargement margin is zero")
    if mu is None:
        stars = tuple(b if ds else 0 for ds, b in zip(d.members, bounds.members))
    else:
        stars = tuple(m.closed_neighbourhood(ds, mu / 3) for ds in d.members)
    fam = SetFamily(d.n, d.index, stars)
    ints = SetFamily(d.n, d.index, tuple(space.interior(s) for s in stars))
    return Enlargement(fam, ints, mu)


@dataclass(frozen=True)
class ShrinkingResult:
    levels: tuple[SetFamily, ...]  # D_k indexed by k-element label sets (frozensets)
    enlarged: tuple[Enlargement, ...]
    bounds: tuple[SetFamily, ...]
    multiplicity: tuple[int, ...]

    def union(self) -> int:
        u = 0
        for e in self.enlarged:
            u |= e.family.union()
        return u


def _membership(v: SetFamily) -> list[frozenset]:
    return [frozenset(s for s, m in v.items() if m >> x & 1) for x in range(v.n)]


def _level_sets(v: SetFamily, cands: Iterable[frozenset], removed: int) -> dict:
    out = {}
    for t in cands:
        inside = 0
        outside = removed
        for s, m in v.items():
            if s in t:
                inside |= m
            else:
                outside |= m
        out[t] = inside & ~outside
    return out


def point_finite_shrinking(v: SetFamily, m: MetricTable, space: FiniteSpace | None = None, seed=None) -> ShrinkingResult:
    """Level k: points lying in exactly the members of a k-set T, minus earlier interiors.

    Only the label sets realised as a point's membership set can give a
    nonempty level member, so only those are evaluated.  ``seed`` shuffles
    the evaluation order within a level; results must not depend on it.
    """
    space = space or FiniteSpace.discrete(v.n)
    if v.union() != full(v.n):
        raise ValueError("family does not cover the space")
    mult = multiplicity(v)
    member_of = _membership(v)
    order = {s: i for i, s in enumerate(v.index)}
    removed = 0
    levels, enlarged, bounds = [], [], []
    for k in range(1, max(mult) + 1):
        alive = [x for x in range(v.n) if not removed >> x & 1]
        if any(len(member_of[x]) < k for x in alive):
            raise AssertionError(f"a point of multiplicity < {k} survived to level {k}")
        cands = sorted({member_of[x] for x in alive if len(member_of[x]) == k},
                       key=lambda t: sorted(order[s] for s in t))
        shuffled = list(cands)
        if seed is not None:
            random.Random(seed).shuffle(shuffled)
        sets = _level_sets(v, shuffled, removed)
        dk = SetFamily(v.n, tuple(cands), tuple(sets[t] for t in cands))
        bk = SetFamily(
            v.n, tuple(cands),
            tuple(_intersection(v, t) for t in cands),
        )
        e = enlarge(dk, bk, m, space)
        for t, ds, inner in zip(cands, dk.members, e.interiors.members):
            if not subset(ds, inner):
                raise AssertionError(f"D_{set(t)} is not inside the interior of its enlargement")
        for inner in e.interiors.members:
            removed |= inner
        levels.append(dk)
        enlarged.append(e)
        bounds.append(bk)
    return ShrinkingResult(tuple(levels), tuple(enlarged), tuple(bounds), tuple(mult))


def _intersection(v: SetFamily, t: frozenset) -> int:
    acc = full(v.n)
    for s, m in v.items():
        if s in t:
            acc &= m
    return acc


def shrinking_witness(res: ShrinkingResult, v: SetFamily, space: FiniteSpace):
    """None if every level invariant and the coverage conditions hold."""
    for k, (dk, e, bk) in enumerate(zip(res.levels, res.enlarged, res.bounds), start=1):
        for fam in (dk, e.family):
            x = discreteness_witness(fam, space)
            if x is not None:
                return ("not-discrete", k, x)
        for t, ds, inner, st, b in zip(dk.index, dk.members, e.interiors.members, e.family.members, bk.members):
            if not (subset(ds, inner) and subset(inner, st) and subset(st, b)):
                return ("chain", k, sorted(map(str, t)))
            if not space.is_closed(ds) or not space.is_closed(st):
                return ("not-closed", k, sorted(map(str, t)))
    for x, mx in enumerate(res.multiplicity):
        hit = False
        for k, e in enumerate(res.enlarged[:mx], start=1):
            if e.family.union() >> x & 1:
                hit = True
                break
        if not hit:
            return ("uncovered", x, mx)
    return None


def pou_from_sigma_discrete(
    v: SetFamily,
    refinement: Sequence[SetFamily],
    m: MetricTable,
    open_levels: Sequence[SetFamily] | None = None,
    space: FiniteSpace | None = None,
) -> PartitionOfUnity:
    """Urysohn functions of closed refinement members, weighted ``2**-m`` then ``2**-n``.

    ``open_levels`` are the discrete open families ``U_n`` (indexed like ``v``,
    ``U_{n,s}`` inside ``V_s``) whose union is ``v``; by default ``v`` alone.
    Each refinement member is cut down to ``U_{n,s}`` and closed before use.
    Output labels are those of ``v``.
    """
    space = space or FiniteSpace.discrete(v.n)
    open_levels = list(open_levels) if open_levels is not None else [v]
    for k, fam in enumerate(refinement, start=1):
        if fam.index != v.index:
            raise ValueError(f"refinement family {k} is not indexed like the cover")
        for s, d in fam.items():
            if not subset(d, v[s]):
                raise PreconditionError(f"refinement member {s!r} of family {k} leaves V_{s}", witness=(k, s))
    h = [[Fraction(0)] * len(v.index) for _ in range(v.n)]
    for n, un in enumerate(open_levels, start=1):
        wn = Fraction(1, 2**n)
        for j, s in enumerate(v.index):
            u_ns = un[s]
            for mm, fam in enumerate(refinement, start=1):
                d = space.closure(fam[s] & u_ns)
                if not d:
                    continue
                fvals = metric_urysohn(d, u_ns, m)
                w = wn * Fraction(1, 2**mm)
                for x in range(v.n):
                    h[x][j] += w * fvals[x]
    return normalize(FinitePartition(v.index, h))
