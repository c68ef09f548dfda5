"""Subsets of ``range(n)`` encoded as Python ints."""

from typing import Iterable, Iterator


def to_mask(ids: Iterable[int]) -> int:
    m = 0
    for i in ids:
        if i < 0:
            raise ValueError(f"negative point id {i}")
        m |= 1 << i
    return m


def elements(m: int) -> Iterator[int]:
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def to_list(m: int) -> list[int]:
    return list(elements(m))


def full(n: int) -> int:
    return (1 << n) - 1


def subset(a: int, b: int) -> bool:
    return a & ~b == 0


def first(m: int) -> int:
    return (m & -m).bit_length() - 1
