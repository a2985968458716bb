#!/usr/bin/env python3
"""Build the invariant database for the small catalog and check it against the reference table.

Usage: python3 scripts/build_catalog.py [OUT_DIR] [--max-leaves N] [--jobs N]
"""

import argparse
import logging
import sys

from phylotoric.database import build_database, verify_reference
from phylotoric.models import MODEL_IDS


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", nargs="?", default="db")
    ap.add_argument("--max-leaves", type=int, default=4)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")

    manifest = build_database(args.out, args.max_leaves, MODEL_IDS, jobs=args.jobs)
    for e in manifest["entries"]:
        print(f"{e['tree_id']:>2}-{e['model_id']:<4} {e['status']}")
    report = verify_reference(args.out)
    print("verify:", dict(report.to_dict()["summary"]))
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())
