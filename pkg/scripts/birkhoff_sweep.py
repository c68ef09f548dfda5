"""Birkhoff pipeline over cyclic and dihedral groups: one row per (group, chain seed)."""

import argparse
import time

from pucover.generators import cyclic_group, dihedral_group, random_group_chain
from pucover.pipelines import birkhoff
from pucover.pou import carriers


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-order", type=int, default=16)
    p.add_argument("--chains", type=int, default=3)
    p.add_argument("--length", type=int, default=5)
    args = p.parse_args()

    groups = [(f"Z{n}", cyclic_group(n)) for n in range(2, args.max_order + 1)]
    groups += [(f"D{k}", dihedral_group(k)) for k in range(2, args.max_order // 2 + 1)]

    print(f"{'group':>6} {'seed':>4} {'chain sizes':<22} {'labels':>6} {'carriers':>8} {'ok':>3} {'secs':>6}")
    failed = 0
    for name, g in groups:
        for seed in range(args.chains):
            chain = random_group_chain(g, args.length, seed)
            t0 = time.perf_counter()
            rep, f = birkhoff(g, chain=chain)
            secs = time.perf_counter() - t0
            sizes = ",".join(str(bin(u).count("1")) for u in chain)
            n_carriers = len(set(carriers(f).nonempty().members)) if f is not None else 0
            n_labels = len(f.index) if f is not None else 0
            failed += not rep.passed
            print(f"{name:>6} {seed:>4} {sizes:<22} {n_labels:>6} {n_carriers:>8} {'y' if rep.passed else 'n':>3} {secs:>6.2f}")
    print(f"{failed} failures")


if __name__ == "__main__":
    main()
