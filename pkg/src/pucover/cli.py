"""Command-line front end.

Exit status: 0 success, 1 a checked property failed (a witness is printed),
2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import serialize as ser
from ._bits import full, to_list
from .chain import (
    ball_family,
    chain_metric,
    rho_bound_witness,
    quotient,
    rho,
    small_pou_from_sequence,
    validate_sequence,
)
from .discretize import (
    discretize,
    point_finite_shrinking,
    shrinking_witness,
    sigma_discretize,
    star_discretize,
)
from .generators import (
    alexandroff_multiplicity_witness,
    ball_cover_sequence,
    check_group_chain,
    cyclic_group,
    dihedral_group,
    group_cover_sequence,
    maximal_cover_sequence,
    random_cover,
    random_group_chain,
    random_metric,
    random_partition,
)
from .pipelines import PIPELINES, run_named
from .pou import (
    carrier_cover,
    carriers_basis_witness,
    derivative,
    derivative_law_witness,
    is_small,
    nerve,
    normalize,
    urysohn_embed,
)
from .space import (
    FiniteSpace,
    PreconditionError,
    discreteness_witness,
    max_multiplicity,
    multiplicity,
    refines,
    star_basis_witness,
    star_refines,
)


class InputError(Exception):
    pass


def _load(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _result(name: str, witness) -> int:
    _emit({"check": name, "passed": witness is None, "witness": ser.jsonable(witness)})
    return 0 if witness is None else 1


def _space_or_discrete(args, n: int) -> FiniteSpace:
    if getattr(args, "space", None):
        return ser.space_from_json(_load(args.space))
    return FiniteSpace.discrete(n)


# ---------------------------------------------------------------- generate


def cmd_generate(args) -> int:
    kind = args.kind
    if kind == "random":
        c = random_cover(args.seed, args.points, args.members, args.density)
        _emit(ser.family_to_json(c))
    elif kind == "metric":
        _emit(ser.metric_to_json(random_metric(args.seed, args.points)))
    elif kind == "partition":
        _emit(ser.partition_to_json(random_partition(args.seed, args.points, args.labels)))
    elif kind == "balls":
        m = ser.metric_from_json(_load(args.metric)) if args.metric else random_metric(args.seed, args.points)
        seq = ball_cover_sequence(m, args.depth, Fraction(args.ratio))
        _emit(ser.sequence_to_json(seq))
    elif kind == "group":
        if args.group:
            g = ser.group_from_json(_load(args.group))
        elif args.dihedral:
            g = dihedral_group(args.dihedral)
        else:
            g = cyclic_group(args.cyclic or 4)
        if args.chain:
            data = _load(args.chain)
            chain = data["chain"] if isinstance(data, dict) else data
        else:
            chain = [to_list(u) for u in random_group_chain(g, args.depth, args.seed)]
        seq = group_cover_sequence(g, chain)
        out = ser.sequence_to_json(seq)
        out["chain"] = [sorted(c) for c in chain]
        _emit(out)
    elif kind == "maximal":
        b = ser.family_from_json(_load(args.cover))
        _emit(ser.maximal_to_json(maximal_cover_sequence(b)))
    return 0


# ------------------------------------------------------------------- check


def _check_refines(a):
    x, y = ser.family_from_json(_load(a.files[0])), ser.family_from_json(_load(a.files[1]))
    return None if refines(x, y) else "some member of A lies in no member of B"


def _check_star_refines(a):
    x, y = ser.family_from_json(_load(a.files[0])), ser.family_from_json(_load(a.files[1]))
    return None if star_refines(x, y, a.mode or "point") else f"{a.mode or 'point'}-mode star refinement fails"


def _check_small(a):
    f = ser.partition_from_json(_load(a.files[0]))
    u = ser.family_from_json(_load(a.files[1]))
    return None if is_small(f, u) else "some carrier lies in no member of the cover"


def _check_discrete(a):
    fam = ser.family_from_json(_load(a.files[0]), covering=False)
    x = discreteness_witness(fam, _space_or_discrete(a, fam.n))
    return None if x is None else {"point": x}


def _check_point_finite(a):
    fam = ser.family_from_json(_load(a.files[0]), covering=False)
    _emit({"multiplicity": multiplicity(fam), "max": max_multiplicity(fam)})
    return None


def _check_star_basis(a):
    space = ser.space_from_json(_load(a.files[0]))
    covers = ser.covers_from_json(_load(a.files[1]))
    x = star_basis_witness(space, covers, a.mode or "star")
    return None if x is None else {"point": x}


def _check_carriers_basis(a):
    f = ser.partition_from_json(_load(a.files[0]))
    return carriers_basis_witness(f, _space_or_discrete(a, f.n))


def _check_sequence(a):
    validate_sequence(ser.covers_from_json(_load(a.files[0])))
    return None


def _check_derivative(a):
    f = ser.partition_from_json(_load(a.files[0]))
    return derivative_law_witness(f, derivative(f))


def _check_derivative_star(a):
    f = ser.partition_from_json(_load(a.files[0]))
    mode = a.mode or "point"
    ok = star_refines(carrier_cover(derivative(f)), carrier_cover(f), mode)
    return None if ok else f"derivative carriers fail {mode}-mode star refinement"


def _check_chain_bounds(a):
    seq = validate_sequence(ser.covers_from_json(_load(a.files[0])))
    r = rho(seq)
    d = chain_metric(r)
    w = rho_bound_witness(r, d)
    if w is not None:
        return {"rho_bound": w}
    if not refines(ball_family(d, Fraction(1, 2)), seq.covers[0]):
        return {"half_balls_refine": "a radius-1/2 ball lies in no member of the first cover"}
    if seq.depth >= 3 and not is_small(small_pou_from_sequence(seq), seq.covers[0]):
        return {"small": "partition is not small"}
    return None


def _check_pseudometric(a):
    m = ser.metric_from_json(_load(a.files[0]))
    return m.triangle_witness()


def _check_discretization(a):
    v = ser.family_from_json(_load(a.files[0]))
    u = ser.family_from_json(_load(a.files[1]))
    dz = discretize(v, u)
    return dz.law_witness(v, u)


def _check_shrinking(a):
    v = ser.family_from_json(_load(a.files[0]))
    m = ser.metric_from_json(_load(a.files[1]))
    space = FiniteSpace.discrete(m.n)
    return shrinking_witness(point_finite_shrinking(v, m, space), v, space)


def _check_group_chain(a):
    g = ser.group_from_json(_load(a.files[0]))
    data = _load(a.files[1])
    chain = data["chain"] if isinstance(data, dict) else data
    from ._bits import to_mask

    check_group_chain(g, [to_mask(c) for c in chain])
    return None


def _check_alexandroff(a):
    b = ser.family_from_json(_load(a.files[0]))
    return alexandroff_multiplicity_witness(b, maximal_cover_sequence(b))


def _check_normalizable(a):
    p = ser.partition_from_json(_load(a.files[0]), unit=False)
    normalize(p)
    return None


CHECKS = {
    "refines": (_check_refines, "A.json B.json"),
    "star-refines": (_check_star_refines, "A.json B.json [--mode point|set]"),
    "small": (_check_small, "f.json U.json"),
    "discrete": (_check_discrete, "F.json [--space X.json]"),
    "point-finite": (_check_point_finite, "F.json"),
    "star-basis": (_check_star_basis, "X.json seq.json [--mode star|starstar|setstar]"),
    "carriers-basis": (_check_carriers_basis, "f.json [--space X.json]"),
    "sequence": (_check_sequence, "seq.json"),
    "derivative": (_check_derivative, "f.json"),
    "derivative-star": (_check_derivative_star, "f.json [--mode point|set]"),
    "chain-bounds": (_check_chain_bounds, "seq.json"),
    "pseudometric": (_check_pseudometric, "m.json"),
    "discretization": (_check_discretization, "V.json U.json"),
    "shrinking": (_check_shrinking, "V.json m.json"),
    "group-chain": (_check_group_chain, "G.json chain.json"),
    "alexandroff": (_check_alexandroff, "B.json"),
    "normalizable": (_check_normalizable, "P.json"),
}


def cmd_check(args) -> int:
    fn, usage = CHECKS[args.property]
    n_files = len([w for w in usage.split() if w.endswith(".json") and not w.startswith("[")])
    if len(args.files) < n_files:
        raise InputError(f"check {args.property} expects {usage}")
    return _result(args.property, fn(args))


# ---------------------------------------------------------------- the rest


def cmd_derive(args) -> int:
    f = ser.partition_from_json(_load(args.partition))
    _emit(ser.partition_to_json(derivative(f)))
    return 0


def cmd_chain_metric(args) -> int:
    seq = validate_sequence(ser.covers_from_json(_load(args.covers)))
    emit = [e.strip() for e in args.emit.split(",") if e.strip()]
    r = rho(seq)
    d = chain_metric(r)
    out = {}
    for e in emit:
        if e == "rho":
            out["rho"] = ser.rho_to_json(r)
        elif e == "d":
            out["d"] = ser.metric_to_json(d)
        elif e == "quotient":
            out["quotient"] = ser.quotient_to_json(quotient(d))
        elif e == "pou":
            out["pou"] = ser.partition_to_json(small_pou_from_sequence(seq))
        else:
            raise InputError(f"unknown --emit item {e!r}")
    _emit(out)
    return 0


def cmd_discretize(args) -> int:
    v = ser.family_from_json(_load(args.wellordered), covering=False)
    covers = ser.covers_from_json(_load(args.covers))
    if args.star:
        sd = star_discretize(v, covers)
        _emit(ser.star_discretization_to_json(sd, covers))
        return 0 if sd.covered and all(sd.discrete) else 1
    if len(covers) == 1:
        _emit(ser.discretization_to_json(discretize(v, covers[0]), covers[0]))
        return 0
    sd = sigma_discretize(v, covers)
    _emit({"levels": [ser.discretization_to_json(dz, c) for dz, c in zip(sd.levels, covers)],
           "covered": sd.covered})
    return 0


def cmd_shrink(args) -> int:
    v = ser.family_from_json(_load(args.cover))
    m = ser.metric_from_json(_load(args.metric))
    space = FiniteSpace.discrete(m.n)
    res = point_finite_shrinking(v, m, space)
    out = ser.shrinking_to_json(res)
    w = shrinking_witness(res, v, space)
    out["verified"] = w is None
    _emit(out)
    return 0 if w is None else 1


def cmd_embed(args) -> int:
    data = _load(args.functions)
    fns = data["functions"] if isinstance(data, dict) else data
    e = urysohn_embed([[ser.parse_frac(v) for v in fn] for fn in fns])
    _emit(ser.embedding_to_json(e))
    return 0


def cmd_nerve(args) -> int:
    data = _load(args.input)
    if "rows" in data:
        k = nerve(ser.partition_from_json(data))
    else:
        k = nerve(ser.family_from_json(data, covering=False))
    if args.format == "dot":
        sys.stdout.write(ser.export_dot(k))
    else:
        _emit(ser.complex_to_json(k))
    return 0


def cmd_pipeline(args) -> int:
    rep = run_named(args.name, seed=args.seed, depth=args.depth, ratio=Fraction(args.ratio),
                    timing=args.timing, points=args.points)
    _emit(rep.to_json())
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pucover", description="Covers and partitions of unity on finite spaces")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="emit a generated instance as JSON")
    g.add_argument("kind", choices=["balls", "group", "maximal", "random", "metric", "partition"])
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--depth", type=int, default=3)
    g.add_argument("--ratio", default="4")
    g.add_argument("--points", type=int, default=6)
    g.add_argument("--members", type=int, default=4)
    g.add_argument("--labels", type=int, default=3)
    g.add_argument("--density", type=float, default=0.5)
    g.add_argument("--metric")
    g.add_argument("--group")
    g.add_argument("--cyclic", type=int)
    g.add_argument("--dihedral", type=int)
    g.add_argument("--chain")
    g.add_argument("--cover")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("check", help="check one property; exit 1 with a witness if it fails")
    c.add_argument("property", choices=sorted(CHECKS))
    c.add_argument("files", nargs="*")
    c.add_argument("--mode")
    c.add_argument("--space")
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("derive", help="derivative of a partition of unity")
    d.add_argument("partition")
    d.set_defaults(func=cmd_derive)

    cm = sub.add_parser("chain-metric", help="rho, chain metric, quotient and small partition")
    cm.add_argument("--covers", required=True)
    cm.add_argument("--emit", default="rho,d,quotient,pou")
    cm.set_defaults(func=cmd_chain_metric)

    ds = sub.add_parser("discretize", help="discretize a well-ordered cover against covers")
    ds.add_argument("--wellordered", required=True)
    ds.add_argument("--covers", required=True)
    ds.add_argument("--star", action="store_true")
    ds.set_defaults(func=cmd_discretize)

    sh = sub.add_parser("shrink", help="point-finite shrinking of a cover over a metric")
    sh.add_argument("--cover", required=True)
    sh.add_argument("--metric", required=True)
    sh.set_defaults(func=cmd_shrink)

    e = sub.add_parser("embed", help="l1 embedding of a list of [0,1]-valued functions")
    e.add_argument("functions")
    e.set_defaults(func=cmd_embed)

    n = sub.add_parser("nerve", help="nerve of a cover or partition")
    n.add_argument("input")
    n.add_argument("--format", choices=["json", "dot"], default="json")
    n.set_defaults(func=cmd_nerve)

    pl = sub.add_parser("pipeline", help="run a named end-to-end composition")
    pl.add_argument("name", choices=sorted(PIPELINES))
    pl.add_argument("--seed", type=int, default=0)
    pl.add_argument("--depth", type=int)
    pl.add_argument("--ratio", default="4")
    pl.add_argument("--points", type=int)
    pl.add_argument("--timing", action="store_true", help="add wall-clock seconds (breaks byte-identical output)")
    pl.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        _emit({"passed": False, "error": str(exc), "witness": ser.jsonable(exc.witness)})
        return 1
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
