import random
from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pucover._bits import full
from pucover.metric import MetricTable
from pucover.pou import (
    FinitePartition,
    PartitionOfUnity,
    carrier_cover,
    carriers,
    carriers_basis_check,
    combine,
    derivative,
    empty_carriers,
    is_small,
    l1_metric,
    merge_labels,
    metric_urysohn,
    nerve,
    normalize,
    urysohn_embed,
)
from pucover.generators import random_partition
from pucover.space import Cover, FiniteSpace, PreconditionError, refines, sierpinski, star_refines

from conftest import mask, partitions, seeds


def pou(rows, index=None):
    index = index or tuple("abcdefgh"[: len(rows[0])])
    return PartitionOfUnity(index, [[F(v) for v in r] for r in rows])


def laws_hold(f, df):
    """Both derivative laws by direct summation over every label set in the index."""
    for x in range(f.n):
        for j, s in enumerate(f.index):
            acc = F(0)
            for t, w in zip(df.index, df.rows[x]):
                if s in t:
                    acc += w / len(t)
            if acc != f.rows[x][j]:
                return False
        live = [t for t, w in zip(df.index, df.rows[x]) if w != 0]
        for t, u in combinations(live, 2):
            if not (t.issubset(u) or u.issubset(t)):
                return False
    return True


class TestNormalize:
    def test_identity_on_constant(self):
        p = FinitePartition(("a",), [[1], [1]])
        assert normalize(p).rows == ((F(1),), (F(1),))

    def test_row(self):
        assert normalize(FinitePartition(("a", "b"), [[1, 3]])).rows == ((F(1, 4), F(3, 4)),)

    def test_zero_row_names_point(self):
        with pytest.raises(PreconditionError) as exc:
            normalize(FinitePartition(("a", "b"), [[1, 1], [0, 0]]))
        assert exc.value.witness == 1

    @given(partitions())
    def test_idempotent_and_carriers_fixed(self, f):
        assert normalize(f) == f
        scaled = FinitePartition(f.index, [[v * (x + 2) for v in row] for x, row in enumerate(f.rows)])
        assert carriers(normalize(scaled)) == carriers(scaled)


class TestCarriers:
    def test_constant(self):
        assert carriers(PartitionOfUnity.constant(3)).members == (full(3),)

    def test_indicator_blocks(self):
        f = PartitionOfUnity.indicator(3, [[0, 1], [2]])
        assert carriers(f).members == (mask(0, 1), mask(2))

    def test_dead_label(self):
        f = pou([[F(1, 2), F(1, 2), 0]] * 3)
        assert carriers(f).members[2] == 0
        assert empty_carriers(f) == ["c"]


class TestIsSmall:
    def test_whole(self):
        f = pou([[F(1, 2), F(1, 2)], [1, 0]])
        assert is_small(f, Cover(2, ("X",), (0b11,)))

    def test_too_big(self):
        f = PartitionOfUnity.constant(2)
        assert not is_small(f, Cover(2, ("p", "q"), (0b01, 0b10)))

    def test_blocks(self):
        f = PartitionOfUnity.indicator(4, [[0, 2], [1, 3]])
        assert is_small(f, Cover(4, ("A", "B"), (mask(0, 2), mask(1, 3))))

    @given(partitions(max_points=8), st.data())
    def test_equals_refinement_of_nonempty_carriers(self, f, data):
        members = data.draw(st.lists(st.integers(1, full(f.n)), min_size=1, max_size=4))
        members.append(full(f.n) if data.draw(st.booleans()) else members[0] | (full(f.n) & ~members[0]))
        u = Cover(f.n, tuple(range(len(members))), tuple(members))
        assert is_small(f, u) == refines(carriers(f).nonempty(), u)


class TestCombine:
    def test_single(self):
        f = pou([[F(1, 3), F(2, 3)], [1, 0]])
        g = combine([f])
        assert merge_labels(g, lambda t: t[1]) == f

    def test_two_copies_merge_back(self):
        f = pou([[F(1, 3), F(2, 3)], [F(1, 5), F(4, 5)]])
        g = combine([f, f])
        # per label: (v/2 + v/4) / (3/4) = v
        assert merge_labels(g, lambda t: t[1]) == f
        assert g.value(0, (1, "a")) == F(1, 3) * F(1, 2) / F(3, 4)

    def test_weights_halve(self):
        one = PartitionOfUnity.constant(1, "s")
        g = combine([one, one, one])
        # 1/2 : 1/4 : 1/8 normalized by 7/8
        assert g.rows[0] == (F(4, 7), F(2, 7), F(1, 7))

    def test_empty(self):
        with pytest.raises(ValueError):
            combine([])

    @given(seeds, st.integers(1, 4))
    def test_carriers_are_union_of_part_carriers(self, seed, k):
        rng = random.Random(seed)
        n = rng.randint(1, 8)
        fs = [random_partition(rng, n, rng.randint(1, 4)) for _ in range(k)]
        g = combine(fs)
        assert set(carriers(g).nonempty().members) == {
            m for f in fs for m in carriers(f).nonempty().members
        }
        u = carrier_cover(fs[0])
        if all(is_small(f, u) for f in fs):
            assert is_small(g, u)


class TestDerivative:
    def test_single_label(self):
        df = derivative(PartitionOfUnity.constant(2))
        assert df.index == (frozenset("a"),)
        assert df.rows == ((F(1),), (F(1),))

    def test_three_values(self):
        f = pou([[F(1, 2), F(3, 10), F(1, 5)]])
        df = derivative(f)
        assert df.row_dict(0) == {
            frozenset("a"): F(1, 5),
            frozenset("ab"): F(1, 5),
            frozenset("abc"): F(3, 5),
        }
        assert laws_hold(f, df)

    def test_tie_collapses(self):
        df = derivative(pou([[F(1, 2), F(1, 2)]]))
        assert df.row_dict(0) == {frozenset("ab"): F(1)}

    def test_tie_order_irrelevant(self):
        f = pou([[F(1, 4), F(1, 4), F(1, 2)]])
        g = PartitionOfUnity(("b", "a", "c"), [[F(1, 4), F(1, 4), F(1, 2)]])
        assert derivative(f).row_dict(0) == derivative(g).row_dict(0)

    @settings(max_examples=300)
    @given(partitions())
    def test_laws(self, f):
        df = derivative(f)
        assert all(sum(row) == 1 for row in df.rows)
        assert laws_hold(f, df)

    @settings(max_examples=300)
    @given(partitions())
    def test_point_mode_star_refinement(self, f):
        assert star_refines(carrier_cover(derivative(f)), carrier_cover(f), "point")

    def test_set_mode_counterexample(self):
        # x=(1/2,1/4,1/4), y=(1/4,1/2,1/4), z=(1,0,0), w=(0,1,0): the star of the
        # carrier of {a,b,c} is all four points, but no carrier of f holds z and w
        f = pou([
            [F(1, 2), F(1, 4), F(1, 4)],
            [F(1, 4), F(1, 2), F(1, 4)],
            [1, 0, 0],
            [0, 1, 0],
        ])
        a, b = carrier_cover(derivative(f)), carrier_cover(f)
        assert star_refines(a, b, "point")
        assert not star_refines(a, b, "set")

    @settings(max_examples=50)
    @given(partitions(max_points=8, max_labels=4))
    def test_iterated_derivatives_star_refine(self, f):
        prev = f
        for _ in range(2):
            nxt = derivative(prev)
            assert star_refines(carrier_cover(nxt), carrier_cover(prev), "point")
            prev = nxt


class TestNerve:
    def test_whole(self):
        k = nerve(Cover(3, ("X",), (0b111,)))
        assert list(k.faces()) == [frozenset({"X"})]

    def test_edge(self):
        k = nerve(Cover.from_sets(3, {"u": [0, 1], "v": [1, 2]}))
        assert k.edges() == [("u", "v")]
        assert k.dimension == 1

    def test_disjoint(self):
        k = nerve(Cover.from_sets(2, {"u": [0], "v": [1]}))
        assert k.edges() == [] and set(k.vertices) == {"u", "v"}

    @given(partitions(max_points=8, max_labels=5))
    def test_partition_faces_are_row_supports_downward_closed(self, f):
        k = nerve(f)
        supports = {frozenset(f.support(x)) for x in range(f.n)}
        expected = {frozenset(c) for s in supports for r in range(1, len(s) + 1) for c in combinations(s, r)}
        assert set(k.faces()) == expected


class TestL1Metric:
    def test_constant(self):
        d = l1_metric(PartitionOfUnity.constant(3))
        assert all(v == 0 for row in d.table for v in row)

    def test_blocks(self):
        d = l1_metric(PartitionOfUnity.indicator(3, [[0, 1], [2]]))
        assert d(0, 1) == 0 and d(0, 2) == 2

    def test_rows(self):
        assert l1_metric(pou([[F(1, 2), F(1, 2)], [F(1, 4), F(3, 4)]]))(0, 1) == F(1, 2)

    @given(partitions(max_points=8))
    def test_pseudometric(self, f):
        d = l1_metric(f)
        assert d.is_pseudometric()
        assert all(0 <= v <= 2 for row in d.table for v in row)


class TestCarriersBasis:
    def test_discrete_singletons(self):
        assert carriers_basis_check(PartitionOfUnity.indicator(3, [[0], [1], [2]]), FiniteSpace.discrete(3))

    def test_constant_on_two_points(self):
        assert not carriers_basis_check(PartitionOfUnity.constant(2), FiniteSpace.discrete(2))

    def test_sierpinski(self):
        # carriers {0,1} and {0}: only a discontinuous partition realises them
        f = pou([[F(1, 2), F(1, 2)], [1, 0]])
        assert not carriers_basis_check(f, sierpinski())
        assert not carriers_basis_check(PartitionOfUnity.constant(2), sierpinski())


class TestMetricUrysohn:
    def test_whole(self, line3):
        assert metric_urysohn(mask(0), full(3), line3) == (1, 1, 1)

    def test_outside_is_zero(self, line3):
        assert metric_urysohn(mask(0), mask(0, 1), line3)[2] == 0

    def test_line(self, line3):
        assert metric_urysohn(mask(0), mask(0, 1), line3) == (1, F(1, 2), 0)

    def test_not_contained(self, line3):
        with pytest.raises(PreconditionError):
            metric_urysohn(mask(2), mask(0, 1), line3)

    def test_zero_gap(self):
        m = MetricTable.from_rows([[0, 0, 1], [0, 0, 1], [1, 1, 0]])
        with pytest.raises(PreconditionError):
            metric_urysohn(mask(0), mask(0, 2), m)


class TestUrysohnEmbed:
    def test_two_points(self):
        e = urysohn_embed([[1, 0]])
        assert e.coords == ((F(1, 2),), (F(0),))
        assert e.distance(0, 1) == F(1, 2)
        assert e.injective and e.separating

    def test_constant(self):
        e = urysohn_embed([[F(1, 3)] * 3, [1, 1, 1]])
        assert not e.injective and not e.separating

    def test_weights(self):
        e = urysohn_embed([[1], [1], [1]])
        assert e.coords[0] == (F(1, 2), F(1, 4), F(1, 8))

    def test_empty(self):
        with pytest.raises(ValueError):
            urysohn_embed([])

    @given(st.lists(st.lists(st.fractions(0, 1), min_size=3, max_size=3), min_size=1, max_size=5))
    def test_separating_implies_injective(self, fns):
        e = urysohn_embed(fns)
        if e.separating:
            assert e.injective
