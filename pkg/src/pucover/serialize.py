"""JSON and DOT encodings.  Rationals travel as "p/q" strings, never as floats."""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from ._bits import to_list, to_mask
from .chain import CoverSequence, Quotient, RhoTable
from .discretize import INF, Discretization, ShrinkingResult, SigmaRefinement, StarDiscretization
from .generators import GroupTable, MaximalLevels
from .metric import MetricTable
from .pou import EmbeddingMap, FinitePartition, PartitionOfUnity, SimplicialComplex
from .space import Cover, FiniteSpace, SetFamily


def frac(v) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def parse_frac(s) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise ValueError(f"rational must be a 'p/q' string, got {s!r}")
    return Fraction(s)


def label(s) -> str:
    if s is INF:
        return "inf"
    if isinstance(s, frozenset):
        return "{" + ",".join(sorted(label(e) for e in s)) + "}"
    if isinstance(s, tuple):
        return ":".join(label(e) for e in s)
    return str(s)


def space_to_json(x: FiniteSpace) -> dict:
    return {"points": x.n, "basis": [to_list(b) for b in x.basis]}


def space_from_json(data) -> FiniteSpace:
    from .space import validate_space

    points = data["points"]
    if not isinstance(points, (int, list)):
        raise ValueError("'points' must be a count or a list of ids")
    return validate_space(points, data["basis"])


def family_to_json(f: SetFamily) -> dict:
    return {
        "points": f.n,
        "index": [label(s) for s in f.index],
        "members": {label(s): to_list(m) for s, m in f.items()},
    }


def family_from_json(data, n: int | None = None, covering: bool = True) -> SetFamily:
    index = data.get("index")
    members = data["members"]
    if not isinstance(members, dict):
        raise ValueError("'members' must map labels to lists of point ids")
    if index is None:
        index = list(members)
    index = [str(s) for s in index]
    if set(index) != set(members):
        raise ValueError("'index' and 'members' name different labels")
    sets = []
    for s in index:
        ids = members[s]
        if not isinstance(ids, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in ids):
            raise ValueError(f"member {s!r} must be a list of integer point ids")
        sets.append(to_mask(ids))
    if n is None:
        n = data.get("points")
    if n is None:
        n = max((i for s in index for i in members[s]), default=-1) + 1
    cls = Cover if covering else SetFamily
    return cls(n, tuple(index), tuple(sets))


def partition_to_json(f: FinitePartition) -> dict:
    return {
        "index": [label(s) for s in f.index],
        "rows": {
            str(x): {label(s): frac(v) for s, v in zip(f.index, row) if v}
            for x, row in enumerate(f.rows)
        },
    }


def partition_from_json(data, unit: bool = True) -> FinitePartition:
    index = [str(s) for s in data["index"]]
    rows_in = data["rows"]
    if not isinstance(rows_in, dict):
        raise ValueError("'rows' must map point ids to {label: 'p/q'}")
    n = len(rows_in)
    if sorted(int(k) for k in rows_in) != list(range(n)):
        raise ValueError("'rows' must have keys 0..n-1")
    rows = []
    for x in range(n):
        row = rows_in[str(x)]
        unknown = set(row) - set(index)
        if unknown:
            raise ValueError(f"row {x} uses unknown labels {sorted(unknown)}")
        rows.append([parse_frac(row.get(s, "0")) for s in index])
    cls = PartitionOfUnity if unit else FinitePartition
    return cls(tuple(index), rows)


def table_to_json(t) -> list[list[str]]:
    """Lower-triangular rows, diagonal included."""
    return [[frac(t[i][j]) for j in range(i + 1)] for i in range(len(t))]


def table_from_json(rows) -> list[list[Fraction]]:
    n = len(rows)
    full_rows = all(len(r) == n for r in rows)
    tri = all(len(r) == i + 1 for i, r in enumerate(rows))
    if not (full_rows or tri):
        raise ValueError("table must be square or lower-triangular")
    t = [[Fraction(0)] * n for _ in range(n)]
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            t[i][j] = parse_frac(v)
            if tri:
                t[j][i] = t[i][j]
    return t


def metric_to_json(m: MetricTable) -> dict:
    return {"points": m.n, "table": table_to_json(m.table)}


def metric_from_json(data) -> MetricTable:
    """A distance table, or ``{"points": [[coords]]}`` for the l1 metric on integer/rational points."""
    if isinstance(data, dict) and "table" not in data and isinstance(data.get("points"), list):
        return MetricTable.from_points([[parse_frac(c) for c in p] for p in data["points"]])
    rows = data["table"] if isinstance(data, dict) else data
    return MetricTable.from_rows(table_from_json(rows))


def rho_to_json(r: RhoTable) -> dict:
    return {"points": r.n, "depth": r.depth, "table": table_to_json(r.table)}


def sequence_to_json(seq: CoverSequence) -> dict:
    return {
        "covers": [family_to_json(c) for c in seq.covers],
        "modes": list(seq.modes),
        "reduced": seq.reduced,
    }


def covers_from_json(data) -> list[Cover]:
    items = data["covers"] if isinstance(data, dict) else data
    if not isinstance(items, list) or not items:
        raise ValueError("expected a nonempty list of covers")
    covers = [family_from_json(c) for c in items]
    n = max(c.n for c in covers)
    return [Cover(n, c.index, c.members) for c in covers]


def group_from_json(data) -> GroupTable:
    table = data["table"] if isinstance(data, dict) else data
    return GroupTable(tuple(tuple(int(v) for v in row) for row in table))


def quotient_to_json(q: Quotient) -> dict:
    return {
        "classes": len(q.representatives),
        "projection": list(q.projection),
        "representatives": list(q.representatives),
        "metric": table_to_json(q.metric.table),
    }


def complex_to_json(k: SimplicialComplex) -> dict:
    return {
        "vertices": [label(v) for v in k.vertices],
        "faces": [sorted(label(v) for v in f) for f in k.faces()],
    }


def export_dot(k: SimplicialComplex, name: str = "nerve") -> str:
    lines = [f"graph {name} {{"]
    for v in k.vertices:
        lines.append(f'  "{label(v)}";')
    for a, b in k.edges():
        lines.append(f'  "{label(a)}" -- "{label(b)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def discretization_to_json(dz: Discretization, u: SetFamily) -> dict:
    return {
        "alpha": {label(s): label(a) for s, a in zip(u.index, dz.alpha)},
        "D": {label(s): to_list(m) for s, m in dz.d.items()},
    }


def star_discretization_to_json(sd: StarDiscretization, seq) -> dict:
    out = []
    for c, dz, co, disc, sep in zip(seq, sd.levels, sd.stars, sd.discrete, sd.separated):
        vn = [label(s) for s in c.index]
        lvl = {
            "alpha": {s: label(a) for s, a in zip(vn, dz.alpha)},
            "D": {label(s): to_list(m) for s, m in dz.d.items()},
            "stars": {label(s): to_list(m) for s, m in co.items()},
            "discrete": disc,
            "separated": sep,
        }
        out.append(lvl)
    return {"levels": out, "covered": sd.covered, "uncovered": to_list(sd.uncovered)}


def shrinking_to_json(res: ShrinkingResult) -> dict:
    levels = []
    for k, (dk, e) in enumerate(zip(res.levels, res.enlarged), start=1):
        levels.append(
            {
                "k": k,
                "margin": None if e.margin is None else frac(e.margin),
                "D": {label(t): to_list(m) for t, m in dk.items()},
                "D*": {label(t): to_list(m) for t, m in e.family.items()},
                "interior": {label(t): to_list(m) for t, m in e.interiors.items()},
            }
        )
    return {"multiplicity": list(res.multiplicity), "levels": levels}


def sigma_refinement_to_json(sr: SigmaRefinement) -> dict:
    return {
        "levels": [{label(s): to_list(m) for s, m in f.items()} for f in sr.levels],
        "depth": len(sr.levels),
    }


def embedding_to_json(e: EmbeddingMap) -> dict:
    n = len(e.coords)
    return {
        "coords": {str(x): [frac(v) for v in e.coords[x]] for x in range(n)},
        "injective": e.injective,
        "separating": e.separating,
        "distances": table_to_json([[e.distance(x, y) for y in range(n)] for x in range(n)]),
    }


def maximal_to_json(ml: MaximalLevels) -> dict:
    return {
        "levels": [
            {"members": {label(s): to_list(m) for s, m in lvl.items()}, "covering": cov}
            for lvl, cov in zip(ml.levels, ml.covering)
        ]
    }


def jsonable(obj: Any):
    """Best-effort conversion of witnesses to JSON values."""
    if isinstance(obj, Fraction):
        return frac(obj)
    if isinstance(obj, (frozenset, set)):
        return sorted(label(e) for e in obj)
    if isinstance(obj, (list, tuple)):
        return [jsonable(e) for e in obj]
    if obj is INF:
        return "inf"
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    return obj
