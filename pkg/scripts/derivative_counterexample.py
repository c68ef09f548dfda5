"""Search random partitions for derivatives whose carriers fail set-mode star refinement.

Each failure is shrunk greedily (drop points, then labels) and the smallest
one found is printed with both carrier covers.
"""

import argparse
import json
import random

from pucover import serialize as ser
from pucover.generators import random_partition
from pucover.pou import FinitePartition, carrier_cover, derivative, normalize
from pucover.space import star_refines


def fails(f):
    a, b = carrier_cover(derivative(f)), carrier_cover(f)
    return star_refines(a, b, "point") and not star_refines(a, b, "set")


def drop_point(f, x):
    rows = [r for i, r in enumerate(f.rows) if i != x]
    return normalize(FinitePartition(f.index, rows))


def drop_label(f, j):
    index = f.index[:j] + f.index[j + 1:]
    rows = [r[:j] + r[j + 1:] for r in f.rows]
    if any(not any(r) for r in rows):
        return None
    return normalize(FinitePartition(index, rows))


def shrink(f):
    changed = True
    while changed:
        changed = False
        for x in range(f.n):
            if f.n > 1:
                g = drop_point(f, x)
                if fails(g):
                    f, changed = g, True
                    break
        else:
            for j in range(len(f.index)):
                g = drop_label(f, j) if len(f.index) > 1 else None
                if g is not None and fails(g):
                    f, changed = g, True
                    break
    return f


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--points", type=int, default=16)
    p.add_argument("--labels", type=int, default=8)
    args = p.parse_args()

    rng = random.Random(args.seed)
    hits, best = 0, None
    for _ in range(args.trials):
        f = random_partition(rng, rng.randint(1, args.points), rng.randint(1, args.labels))
        if not fails(f):
            continue
        hits += 1
        g = shrink(f)
        if best is None or (g.n, len(g.index)) < (best.n, len(best.index)):
            best = g

    print(f"set-mode failures: {hits}/{args.trials}")
    if best is not None:
        print(f"smallest: {best.n} points, {len(best.index)} labels")
        print(json.dumps({
            "f": ser.partition_to_json(best),
            "carriers_f": ser.family_to_json(carrier_cover(best)),
            "carriers_df": ser.family_to_json(carrier_cover(derivative(best))),
        }, indent=2))


if __name__ == "__main__":
    main()
