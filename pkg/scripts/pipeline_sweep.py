"""Run every named pipeline over a range of seeds and tabulate pass counts per step."""

import argparse
from collections import Counter

from pucover.pipelines import PIPELINES, run_named


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--pipelines", nargs="*", default=sorted(PIPELINES))
    args = p.parse_args()

    for name in args.pipelines:
        passed = Counter()
        total = Counter()
        first_fail = None
        for seed in range(args.seeds):
            rep = run_named(name, seed=seed)
            for step in rep.steps:
                total[step.name] += 1
                passed[step.name] += step.passed
                if not step.passed and first_fail is None:
                    first_fail = (seed, step.name, step.witness)
        print(f"{name}: {PIPELINES[name]}")
        for step in total:
            print(f"  {step:<34} {passed[step]:>4}/{total[step]}")
        if first_fail:
            print(f"  first failure: seed {first_fail[0]} at {first_fail[1]}: {first_fail[2]}")


if __name__ == "__main__":
    main()
