"""Seeded instance generators: metric balls, group translates, maximal-element levels, random covers."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from ._bits import elements, full, subset, to_list, to_mask
from .chain import CoverSequence, validate_sequence
from .metric import MetricTable
from .pou import PartitionOfUnity
from .space import Cover, PreconditionError, SetFamily, multiplicity, star_refines


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def ball_cover_sequence(m: MetricTable, depth: int, ratio=4) -> CoverSequence:
    """Level n holds the open balls of radius ``diam * ratio**-n`` about every point."""
    ratio = Fraction(ratio)
    if ratio < 3:
        raise ValueError("ratio must be at least 3")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if not m.is_metric():
        raise PreconditionError("distinct points at distance 0")
    diam = m.diameter or Fraction(1)
    covers = []
    for k in range(1, depth + 1):
        r = diam / ratio**k
        covers.append(Cover(m.n, tuple(range(m.n)), tuple(m.ball(x, r) for x in range(m.n))))
    return validate_sequence(covers)


def singleton_depth(m: MetricTable, ratio=4) -> int:
    """Smallest depth at which every ball in ``ball_cover_sequence`` is a singleton."""
    ratio = Fraction(ratio)
    diam = m.diameter or Fraction(1)
    gap = min(
        (m(x, y) for x in range(m.n) for y in range(m.n) if x != y), default=diam
    )
    k = 1
    while diam / ratio**k > gap:
        k += 1
    return k


@dataclass(frozen=True)
class GroupTable:
    table: tuple[tuple[int, ...], ...]
    identity: int = field(init=False)
    inverse: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        n = len(self.table)
        t = self.table
        for row in t:
            if len(row) != n or sorted(row) != list(range(n)):
                raise ValueError("multiplication table rows must be permutations of 0..n-1")
        ids = [e for e in range(n) if all(t[e][g] == g and t[g][e] == g for g in range(n))]
        if not ids:
            raise ValueError("no identity element")
        e = ids[0]
        for a, b, c in product(range(n), repeat=3):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise ValueError(f"not associative at ({a}, {b}, {c})")
        inv = []
        for g in range(n):
            hs = [h for h in range(n) if t[g][h] == e and t[h][g] == e]
            if not hs:
                raise ValueError(f"{g} has no inverse")
            inv.append(hs[0])
        object.__setattr__(self, "identity", e)
        object.__setattr__(self, "inverse", tuple(inv))

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def translate(self, g: int, s: int) -> int:
        """``g * S`` for a subset mask S."""
        return to_mask(self.table[g][h] for h in elements(s))

    def product_set(self, a: int, b: int) -> int:
        return to_mask(self.table[x][y] for x in elements(a) for y in elements(b))

    def inverse_set(self, a: int) -> int:
        return to_mask(self.inverse[x] for x in elements(a))


def cyclic_group(n: int) -> GroupTable:
    return GroupTable(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)))


def dihedral_group(k: int) -> GroupTable:
    """Symmetries of the k-gon, order 2k; element ``r**i s**j`` is ``i + k*j``."""

    def mul(a, b):
        i, j = a % k, a // k
        p, q = b % k, b // k
        if j == 0:
            return (i + p) % k + k * q
        return (i - p) % k + k * (1 - q)

    n = 2 * k
    return GroupTable(tuple(tuple(mul(a, b) for b in range(n)) for a in range(n)))


def check_group_chain(g: GroupTable, chain: Sequence[int]) -> None:
    e = 1 << g.identity
    for k, u in enumerate(chain, start=1):
        if not u & e:
            raise PreconditionError(f"chain member {k} misses the identity", witness=k)
        if g.inverse_set(u) != u:
            raise PreconditionError(f"chain member {k} is not symmetric", witness=k)
    for k in range(1, len(chain)):
        if not subset(g.product_set(chain[k], chain[k]), chain[k - 1]):
            raise PreconditionError(
                f"chain condition U_{k + 1} * U_{k + 1} <= U_{k} fails at n={k}", witness=k
            )


def translate_cover(g: GroupTable, u: int) -> Cover:
    return Cover(g.order, tuple(range(g.order)), tuple(g.translate(x, u) for x in range(g.order)))


def group_cover_sequence(g: GroupTable, chain: Sequence) -> CoverSequence:
    """Translate covers of the chain, keeping every other one (the 1st, 3rd, 5th, ...)."""
    chain = [c if isinstance(c, int) else to_mask(c) for c in chain]
    if not chain:
        raise ValueError("empty chain")
    check_group_chain(g, chain)
    covers = [translate_cover(g, u) for u in chain]
    odd = covers[::2]
    seq = validate_sequence(odd)
    return CoverSequence(seq.covers, seq.modes, reduced=True)


def random_group_chain(g: GroupTable, length: int, seed, start=None) -> list[int]:
    """Random symmetric identity neighbourhoods with ``U_{k+1} * U_{k+1} <= U_k``."""
    rng = _rng(seed)
    e = 1 << g.identity
    first = full(g.order) if start is None else start
    chain = [first]
    for _ in range(length - 1):
        prev = chain[-1]
        pairs = sorted({(min(x, g.inverse[x]), max(x, g.inverse[x])) for x in range(g.order)})
        pairs = [p for p in pairs if p[0] != g.identity]
        rng.shuffle(pairs)
        cur = e
        for a, b in pairs:
            if rng.random() < 0.5:
                continue
            trial = cur | (1 << a) | (1 << b)
            if subset(g.product_set(trial, trial), prev):
                cur = trial
        chain.append(cur)
    return chain


@dataclass(frozen=True)
class MaximalLevels:
    levels: tuple[SetFamily, ...]
    covering: tuple[bool, ...]


def maximal_cover_sequence(b: SetFamily) -> MaximalLevels:
    """Peel off the inclusion-maximal members of ``b`` level by level."""
    if b.union() != full(b.n):
        raise ValueError("basis family does not cover the space")
    remaining = list(b.items())
    levels = []
    while remaining:
        top = [(s, m) for s, m in remaining if not any(subset(m, o) and m != o for _, o in remaining)]
        top_labels = {s for s, _ in top}
        remaining = [(s, m) for s, m in remaining if s not in top_labels]
        levels.append(SetFamily(b.n, tuple(s for s, _ in top), tuple(m for _, m in top)))
    covering = tuple(lvl.union() == full(b.n) for lvl in levels)
    return MaximalLevels(tuple(levels), covering)


def alexandroff_multiplicity_witness(b: SetFamily, levels: MaximalLevels):
    """Check the maximality bound on each level's multiplicity.

    Two members of one level that share x each meet the complement of the
    other, so at x the level multiplicity is at most the number of copies of
    U plus the number of members of ``b`` holding x and meeting ``X - U``.
    """
    whole = full(b.n)
    for k, lvl in enumerate(levels.levels, start=1):
        mult = multiplicity(lvl)
        for x in range(b.n):
            bit = 1 << x
            for u in lvl.members:
                if not u & bit:
                    continue
                copies = sum(1 for v in lvl.members if v == u)
                meeting = sum(1 for w in b.members if w & bit and w & (whole & ~u))
                if mult[x] > copies + meeting:
                    return (k, x, to_list(u))
    return None


def random_cover(seed, n_points: int, n_members: int, density: float = 0.5) -> Cover:
    if n_points < 1 or n_members < 1:
        raise ValueError("n_points and n_members must be positive")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    rng = _rng(seed)
    members = [
        to_mask(x for x in range(n_points) if rng.random() < density) for _ in range(n_members)
    ]
    covered = 0
    for m in members:
        covered |= m
    for x in range(n_points):
        if not covered >> x & 1:
            members[rng.randrange(n_members)] |= 1 << x
    return Cover(n_points, tuple(str(i) for i in range(n_members)), tuple(members))


def random_star_sequence(seed, n_points: int, depth: int, n_members: int = 4) -> CoverSequence:
    """Random covers repaired by splitting members until each level set-star refines the last."""
    rng = _rng(seed)
    covers = [random_cover(rng, n_points, n_members, 0.6)]
    while len(covers) < depth:
        prev = covers[-1]
        members = list(random_cover(rng, n_points, n_members, 0.4).members)
        while True:
            bad = [
                i
                for i, m in enumerate(members)
                if not any(subset(_star(m, members), p) for p in prev.members)
            ]
            if not bad:
                break
            i = rng.choice(bad)
            pts = to_list(members[i])
            if len(pts) == 1:
                # a singleton with a bad star: split its neighbours instead
                j = rng.choice([j for j, m in enumerate(members) if m & members[i] and m != members[i]])
                pts = to_list(members[j])
                i = j
            rng.shuffle(pts)
            cut = rng.randrange(1, len(pts))
            members[i] = to_mask(pts[:cut])
            members.append(to_mask(pts[cut:]))
        covers.append(Cover(n_points, tuple(str(i) for i in range(len(members))), tuple(members)))
    return validate_sequence(covers)


def _star(a: int, members) -> int:
    s = 0
    for m in members:
        if m & a:
            s |= m
    return s


def random_metric(seed, n_points: int, dim: int = 2, span: int = 12) -> MetricTable:
    """l1 metric on distinct random integer points of a small grid."""
    rng = _rng(seed)
    if span**dim < n_points:
        raise ValueError("grid too small for that many distinct points")
    pts = set()
    while len(pts) < n_points:
        pts.add(tuple(rng.randrange(span) for _ in range(dim)))
    return MetricTable.from_points(sorted(pts))


def clustered_metric(seed, n_points: int, scales: int = 3, base: int = 6) -> MetricTable:
    """Points built digit by digit in base ``base``, so distances cluster at several scales."""
    rng = _rng(seed)
    if 4**scales < n_points:
        raise ValueError("too few scales for that many distinct points")
    pts = set()
    while len(pts) < n_points:
        x = sum(rng.randrange(2) * base**j for j in range(scales))
        y = sum(rng.randrange(2) * base**j for j in range(scales))
        pts.add((x, y))
    return MetricTable.from_points(sorted(pts))


def random_partition(seed, n_points: int, n_labels: int, zero_prob: float = 0.4, scale: int = 10) -> PartitionOfUnity:
    """Rows of random integer weights, some zero, normalized; every row has positive mass."""
    rng = _rng(seed)
    rows = []
    for _ in range(n_points):
        row = [0 if rng.random() < zero_prob else rng.randint(1, scale) for _ in range(n_labels)]
        if not any(row):
            row[rng.randrange(n_labels)] = rng.randint(1, scale)
        g = sum(row)
        rows.append([Fraction(v, g) for v in row])
    return PartitionOfUnity(tuple(chr(ord("a") + j) if n_labels <= 26 else j for j in range(n_labels)), rows)


def random_rho_table(seed, n_points: int, depth: int) -> list[list[Fraction]]:
    """Symmetric table with entries in {2**-k : 1 <= k <= depth} or 1; diagonal ``2**-depth``."""
    rng = _rng(seed)
    vals = [Fraction(1)] + [Fraction(1, 2**k) for k in range(1, depth + 1)]
    t = [[Fraction(0)] * n_points for _ in range(n_points)]
    for x in range(n_points):
        t[x][x] = Fraction(1, 2**depth)
        for y in range(x + 1, n_points):
            t[x][y] = t[y][x] = rng.choice(vals)
    return t


def random_preorder_space(seed, n_points: int, edge_prob: float = 0.3):
    """Alexandrov space of a random preorder."""
    from .space import FiniteSpace

    rng = _rng(seed)
    leq = [(a, b) for a in range(n_points) for b in range(n_points) if a != b and rng.random() < edge_prob]
    return FiniteSpace.from_preorder(n_points, leq)
