"""Exact-rational (pseudo)metric tables on ``range(n)``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._bits import elements, to_mask


@dataclass(frozen=True)
class MetricTable:
    table: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.table)
        for i, row in enumerate(self.table):
            if len(row) != n:
                raise ValueError("metric table is not square")
            if row[i] != 0:
                raise ValueError(f"nonzero diagonal at {i}")
            for j, v in enumerate(row):
                if v < 0:
                    raise ValueError(f"negative distance at ({i}, {j})")
                if self.table[j][i] != v:
                    raise ValueError(f"asymmetric at ({i}, {j})")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> MetricTable:
        return cls(tuple(tuple(Fraction(v) for v in row) for row in rows))

    @classmethod
    def from_points(cls, coords: Sequence[Sequence[int]]) -> MetricTable:
        """l1 distances between integer (or rational) coordinate vectors."""
        rows = [
            [sum((abs(Fraction(a) - Fraction(b)) for a, b in zip(p, q)), Fraction(0)) for q in coords]
            for p in coords
        ]
        return cls.from_rows(rows)

    @classmethod
    def line(cls, n: int) -> MetricTable:
        return cls.from_points([(i,) for i in range(n)])

    @property
    def n(self) -> int:
        return len(self.table)

    def __call__(self, x: int, y: int) -> Fraction:
        return self.table[x][y]

    def dist_to_set(self, x: int, a: int) -> Fraction | None:
        """None stands for the distance to the empty set."""
        row = self.table[x]
        return min((row[y] for y in elements(a)), default=None)

    def set_distance(self, a: int, b: int) -> Fraction | None:
        return min((self.table[x][y] for x in elements(a) for y in elements(b)), default=None)

    def ball(self, x: int, r: Fraction) -> int:
        row = self.table[x]
        return to_mask(y for y in range(self.n) if row[y] < r)

    def closed_neighbourhood(self, a: int, r: Fraction) -> int:
        return to_mask(
            y for y in range(self.n) if any(self.table[y][x] <= r for x in elements(a))
        )

    @property
    def diameter(self) -> Fraction:
        return max((v for row in self.table for v in row), default=Fraction(0))

    def is_metric(self) -> bool:
        return all(self.table[i][j] > 0 for i in range(self.n) for j in range(self.n) if i != j)

    def triangle_witness(self) -> tuple[int, int, int] | None:
        t = self.table
        n = self.n
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if t[i][k] > t[i][j] + t[j][k]:
                        return (i, j, k)
        return None

    def is_pseudometric(self) -> bool:
        return self.triangle_witness() is None
