#!/usr/bin/env python3
"""Run the path, star and unknown-W scaling experiments and print JSON."""

import argparse
import json

from flowsearch import experiments, families


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=5, help="seeds per size")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--path-sizes", default="8..128")
    p.add_argument("--star-sizes", default="2..16")
    p.add_argument("--out", help="write JSON here instead of stdout")
    args = p.parse_args(argv)

    seeds = range(args.seeds)
    report = {
        "path": experiments.path_scaling(experiments.parse_sizes(args.path_sizes), seeds, jobs=args.jobs),
        "star": experiments.star_growth(tuple(experiments.parse_sizes(args.star_sizes)), seeds, jobs=args.jobs),
        "unknown_w": [experiments.unknown_w_overhead(inst, seeds, jobs=args.jobs) for inst in families.fixtures()],
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


if __name__ == "__main__":
    main()
