#!/usr/bin/env python3
"""Run the invariant checks and write one JSON report; exits 1 on any failure."""

import argparse
import sys

from flowsearch.cli import main as cli_main


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="lemma_report.json")
    args = p.parse_args(argv)
    return cli_main(["verify", "--format", "json", "--out", args.out])


if __name__ == "__main__":
    sys.exit(main())
