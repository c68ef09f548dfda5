"""End-to-end compositions of the library, each step recorded with pass/fail and a witness."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from ._bits import full, to_list
from .chain import ball_family, chain_metric, rho, rho_bound_witness, small_pou_from_sequence, validate_sequence
from .discretize import (
    pou_from_sigma_discrete,
    point_finite_shrinking,
    shrinking_witness,
    sigma_refinement_from_pou,
    sigma_refinement_witness,
    star_discretize,
)
from .generators import (
    alexandroff_multiplicity_witness,
    ball_cover_sequence,
    cyclic_group,
    dihedral_group,
    group_cover_sequence,
    maximal_cover_sequence,
    random_cover,
    random_group_chain,
    random_metric,
    singleton_depth,
)
from .metric import MetricTable
from .pou import (
    carriers_basis_witness,
    combine,
    is_small,
    metric_urysohn,
    urysohn_embed,
)
from .space import Cover, FiniteSpace, SetFamily, refines, star_basis_witness


@dataclass
class Step:
    name: str
    passed: bool
    witness: Any = None
    seconds: float | None = None


@dataclass
class PipelineReport:
    name: str
    steps: list[Step] = field(default_factory=list)
    timing: bool = False

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.steps)

    def run(self, name: str, fn: Callable[[], Any]):
        """Run ``fn``; it returns a witness (None means pass).  Exceptions fail the step."""
        t0 = time.perf_counter()
        try:
            witness = fn()
            ok = witness is None
        except ValueError as exc:
            witness = {"error": str(exc), "detail": getattr(exc, "witness", None)}
            ok = False
        self.steps.append(Step(name, ok, witness, time.perf_counter() - t0 if self.timing else None))
        return ok

    def to_json(self) -> dict:
        from .serialize import jsonable

        steps = []
        for s in self.steps:
            d = {"step": s.name, "passed": s.passed}
            if not s.passed:
                d["witness"] = jsonable(s.witness)
            if s.seconds is not None:
                d["seconds"] = round(s.seconds, 6)
            steps.append(d)
        return {"pipeline": self.name, "passed": self.passed, "steps": steps}


def _check(cond: bool, witness="failed"):
    return None if cond else witness


def birkhoff(group, chain=None, seed=0, length=7, timing=False) -> tuple[PipelineReport, Any]:
    """Translate-cover sequences of a finite group, small partitions per level, combined.

    Level n uses the chain's tail from ``U_n``; the tail is padded with ``{e}``
    so every level reaches the depth the star construction needs.
    """
    rep = PipelineReport("birkhoff", timing=timing)
    if chain is None:
        chain = random_group_chain(group, length, seed)
    chain = list(chain)
    e = 1 << group.identity
    out = {}

    def seqs():
        from .generators import check_group_chain

        check_group_chain(group, chain)
        tails = [chain[k:] + [e] * 5 for k in range(len(chain) + 1)]
        out["seqs"] = [group_cover_sequence(group, t) for t in tails]
        return None

    if not rep.run("group_cover_sequence", seqs):
        return rep, None

    def small():
        fs = []
        for k, seq in enumerate(out["seqs"]):
            f = small_pou_from_sequence(seq)
            if not is_small(f, seq.covers[0]):
                return {"level": k + 1}
            fs.append(f)
        out["fs"] = fs
        return None

    if not rep.run("small_pou_from_sequence", small):
        return rep, None

    def comb():
        out["f"] = combine(out["fs"])
        return None

    rep.run("combine", comb)
    space = FiniteSpace.discrete(group.order)
    rep.run("carriers_basis_check", lambda: carriers_basis_witness(out["f"], space))
    return rep, out.get("f")


def star_theorem(covers, timing=False) -> tuple[PipelineReport, Any]:
    rep = PipelineReport("star-theorem", timing=timing)
    out = {}

    def val():
        out["seq"] = validate_sequence(covers)
        return None

    if not rep.run("validate_sequence", val):
        return rep, None
    seq = out["seq"]

    def metric():
        out["rho"] = rho(seq)
        out["d"] = chain_metric(out["rho"])
        return out["d"].triangle_witness()

    rep.run("chain_metric", metric)
    rep.run("rho_bound", lambda: rho_bound_witness(out["rho"], out["d"]))
    rep.run("half_balls_refine", lambda: _check(refines(ball_family(out["d"], Fraction(1, 2)), seq.covers[0])))

    def pou():
        out["f"] = small_pou_from_sequence(seq)
        return _check(is_small(out["f"], seq.covers[0]))

    rep.run("small_pou_from_sequence", pou)
    return rep, out.get("f")


def bing(m: MetricTable, depth: int | None = None, ratio=4, timing=False) -> tuple[PipelineReport, Any]:
    """Ball covers whose stars form a basis; a small partition per level, combined."""
    rep = PipelineReport("bing", timing=timing)
    depth = depth or singleton_depth(m, ratio)
    space = FiniteSpace.discrete(m.n)
    out = {}

    def seq():
        out["seq"] = ball_cover_sequence(m, depth + 2, ratio)
        return None

    if not rep.run("ball_cover_sequence", seq):
        return rep, None
    covers = out["seq"].covers
    rep.run("star_basis_check", lambda: star_basis_witness(space, covers, "star"))

    def small():
        fs = []
        for k in range(depth):
            tail = validate_sequence(covers[k:])
            f = small_pou_from_sequence(tail)
            if not is_small(f, covers[k]):
                return {"level": k + 1}
            fs.append(f)
        out["f"] = combine(fs)
        return None

    if rep.run("small_pou_per_level", small):
        rep.run("carriers_basis_check", lambda: carriers_basis_witness(out["f"], space))
    return rep, out.get("f")


def star_discretization(m: MetricTable, u: Cover, depth: int | None = None, ratio=4, timing=False):
    rep = PipelineReport("star-discretization", timing=timing)
    depth = depth or singleton_depth(m, ratio)
    out = {}

    def run():
        seq = ball_cover_sequence(m, depth, ratio)
        out["sd"] = star_discretize(u, seq)
        return None

    if not rep.run("star_discretize", run):
        return rep, None
    sd = out["sd"]
    rep.run("discrete_coarsenings", lambda: _check(all(sd.discrete), list(sd.discrete)))
    rep.run("separated_coarsenings", lambda: _check(all(sd.separated), list(sd.separated)))
    rep.run("coverage", lambda: _check(sd.covered, to_list(sd.uncovered)))
    return rep, sd


def group_by_first_label(res, v: SetFamily) -> list[SetFamily]:
    """Re-index each shrinking level by the first label of T (``D*_T`` lies in that member)."""
    order = {s: i for i, s in enumerate(v.index)}
    fams = []
    for e in res.enlarged:
        acc = {s: 0 for s in v.index}
        for t, mm in e.family.items():
            acc[min(t, key=order.__getitem__)] |= mm
        fams.append(SetFamily(v.n, v.index, tuple(acc[s] for s in v.index)))
    return fams


def michael_nagami(m: MetricTable, v: Cover, timing=False, seed=None):
    """Point-finite cover -> discrete closed shrinkings -> small partition of unity."""
    rep = PipelineReport("michael-nagami", timing=timing)
    space = FiniteSpace.discrete(m.n)
    out = {}

    def shrink():
        out["res"] = point_finite_shrinking(v, m, space, seed=seed)
        return shrinking_witness(out["res"], v, space)

    if not rep.run("point_finite_shrinking", shrink):
        return rep, None
    fams = group_by_first_label(out["res"], v)
    rep.run("sigma_discrete_closed_refinement", lambda: sigma_refinement_witness(fams, v, space))

    def pou():
        out["f"] = pou_from_sigma_discrete(v, fams, m)
        return _check(is_small(out["f"], v))

    rep.run("pou_from_sigma_discrete", pou)
    return rep, out.get("f")


def sigma_roundtrip(m: MetricTable, v: Cover, timing=False):
    """Shrinking -> partition of unity -> sigma-discrete closed refinement again."""
    rep, f = michael_nagami(m, v, timing=timing)
    rep.name = "sigma-roundtrip"
    if f is None:
        return rep, None
    space = FiniteSpace.discrete(m.n)
    out = {}

    def back():
        out["sr"] = sigma_refinement_from_pou(f, v, space)
        return sigma_refinement_witness(out["sr"].levels, v, space)

    rep.run("sigma_refinement_from_pou", back)
    return rep, out.get("sr")


def urysohn(m: MetricTable, timing=False):
    """Urysohn functions of each point inside a small ball, embedded into l1."""
    rep = PipelineReport("urysohn", timing=timing)
    gap = min((m(x, y) for x in range(m.n) for y in range(m.n) if x != y), default=Fraction(1))
    out = {}

    def fns():
        out["fns"] = [metric_urysohn(1 << x, m.ball(x, gap), m) for x in range(m.n)]
        return None

    rep.run("metric_urysohn", fns)

    def emb():
        e = urysohn_embed(out["fns"])
        out["e"] = e
        for k, fn in enumerate(out["fns"], start=1):
            for x in range(m.n):
                if e.coords[x][k - 1] != fn[x] / 2**k:
                    return {"point": x, "coordinate": k}
        return None

    rep.run("urysohn_embed", emb)
    rep.run("separating", lambda: _check(out["e"].separating))
    rep.run("injective", lambda: _check(out["e"].injective))
    return rep, out.get("e")


def alexandroff(m: MetricTable, depth: int | None = None, ratio=4, timing=False):
    """Basis from ball covers, peeled into maximal levels, one small partition per covering level."""
    rep = PipelineReport("alexandroff", timing=timing)
    depth = depth or singleton_depth(m, ratio)
    space = FiniteSpace.discrete(m.n)
    out = {}

    def basis():
        seq = ball_cover_sequence(m, depth, ratio)
        idx, mem = [], []
        for k, c in enumerate(seq.covers, start=1):
            for s, mm in c.items():
                idx.append(f"{k}.{s}")
                mem.append(mm)
        out["B"] = SetFamily(m.n, tuple(idx), tuple(mem))
        out["levels"] = maximal_cover_sequence(out["B"])
        return alexandroff_multiplicity_witness(out["B"], out["levels"])

    if not rep.run("maximal_cover_sequence", basis):
        return rep, None
    # the basis conclusion needs every level to cover; finite peeling often leaves tail levels short
    cov = out["levels"].covering
    rep.run("levels_cover", lambda: _check(all(cov), [k for k, c in enumerate(cov, start=1) if not c]))

    def pous():
        fs = []
        for lvl, cov in zip(out["levels"].levels, out["levels"].covering):
            if not cov:
                continue
            c = lvl.as_cover()
            res = point_finite_shrinking(c, m, space)
            f = pou_from_sigma_discrete(c, group_by_first_label(res, c), m)
            if not is_small(f, c):
                return {"level": lvl.index}
            fs.append(f)
        out["f"] = combine(fs)
        return None

    if rep.run("small_pou_per_level", pous):
        rep.run("carriers_basis_check", lambda: carriers_basis_witness(out["f"], space))
    return rep, out.get("f")


def random_metric_instance(seed, n_points=None):
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    n = n_points or rng.randint(2, 9)
    return random_metric(rng, n)


PIPELINES = {
    "birkhoff": "cyclic/dihedral group translate covers -> combined partition with basis carriers",
    "star-theorem": "cover sequence -> rho -> chain metric -> small partition",
    "bing": "metric ball covers -> small partitions per level -> basis check",
    "star-discretization": "star coarsenings of discretizations are discrete and cover",
    "michael-nagami": "point-finite shrinking -> partition from sigma-discrete family",
    "sigma-roundtrip": "sigma-discrete partition -> sigma-discrete closed refinement",
    "urysohn": "Urysohn functions -> l1 embedding",
    "alexandroff": "maximal-element levels -> partitions -> basis check",
}


def run_named(name: str, seed=0, depth=None, ratio=4, timing=False, points=None) -> PipelineReport:
    rng = random.Random(seed)
    if name == "birkhoff":
        g = cyclic_group(rng.randint(2, 16)) if rng.random() < 0.5 else dihedral_group(rng.randint(2, 8))
        return birkhoff(g, seed=rng, length=depth or 5, timing=timing)[0]
    m = random_metric_instance(rng, points)
    if name == "star-theorem":
        seq = ball_cover_sequence(m, max(depth or 3, 3), ratio)
        return star_theorem(seq.covers, timing=timing)[0]
    if name == "bing":
        return bing(m, depth, ratio, timing=timing)[0]
    if name == "star-discretization":
        u = random_cover(rng, m.n, rng.randint(1, 4), 0.5)
        return star_discretization(m, u, depth, ratio, timing=timing)[0]
    if name == "michael-nagami":
        v = random_cover(rng, m.n, rng.randint(1, 5), 0.5)
        return michael_nagami(m, v, timing=timing)[0]
    if name == "sigma-roundtrip":
        v = random_cover(rng, m.n, rng.randint(1, 5), 0.5)
        return sigma_roundtrip(m, v, timing=timing)[0]
    if name == "urysohn":
        return urysohn(m, timing=timing)[0]
    if name == "alexandroff":
        return alexandroff(m, depth, ratio, timing=timing)[0]
    raise ValueError(f"unknown pipeline {name!r}; choose from {sorted(PIPELINES)}")
