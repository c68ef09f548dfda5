import json
from fractions import Fraction as F

import pytest
from hypothesis import given

from pucover import serialize as ser
from pucover.discretize import INF
from pucover.pou import derivative

from conftest import covers, partitions


def roundtrip(obj):
    return json.loads(json.dumps(obj))


def test_frac_is_always_p_over_q():
    assert ser.frac(F(3)) == "3/1"
    assert ser.frac(F(-1, 4)) == "-1/4"
    assert ser.parse_frac("6/8") == F(3, 4)


def test_floats_rejected():
    with pytest.raises(ValueError):
        ser.parse_frac(0.5)


def test_labels():
    assert ser.label(frozenset({"b", "a"})) == "{a,b}"
    assert ser.label((2, "s")) == "2:s"
    assert ser.label(INF) == "inf"


@given(covers())
def test_family_roundtrip(c):
    assert ser.family_from_json(roundtrip(ser.family_to_json(c))) == c


@given(partitions())
def test_partition_roundtrip(f):
    assert ser.partition_from_json(roundtrip(ser.partition_to_json(f))) == f


@given(partitions(max_points=6, max_labels=4))
def test_derivative_labels_survive_as_strings(f):
    df = derivative(f)
    back = ser.partition_from_json(roundtrip(ser.partition_to_json(df)))
    assert back.rows == df.rows
    assert back.index == tuple(ser.label(t) for t in df.index)


def test_metric_triangular_and_points(line3):
    assert ser.metric_from_json(roundtrip(ser.metric_to_json(line3))) == line3
    assert ser.metric_from_json({"points": [[1], [2], [3]]}) == line3
    assert ser.metric_from_json([["0"], ["1", "0"], ["2", "1", "0"]]) == line3


def test_family_points_inferred():
    f = ser.family_from_json({"members": {"a": [0, 2]}}, covering=False)
    assert f.n == 3


def test_family_label_mismatch():
    with pytest.raises(ValueError):
        ser.family_from_json({"index": ["a", "b"], "members": {"a": [0]}})


def test_asymmetric_metric_rejected():
    with pytest.raises(ValueError):
        ser.metric_from_json([["0", "1"], ["2", "0"]])


def test_space_roundtrip():
    from pucover.space import sierpinski

    x = sierpinski()
    assert ser.space_from_json(roundtrip(ser.space_to_json(x))) == x
