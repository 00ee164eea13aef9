"""Torify the orthant in Z^3 under a = (2, 1, -1) and print the pieces.

Usage: python scripts/example_3_2_11.py [--json]
"""

import argparse

from wfactor import io
from wfactor.action import OneParamAction
from wfactor.cones import Cone
from wfactor.torific import torify


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="print the full torification document")
    args = parser.parse_args()

    sigma = Cone.from_rays([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    r = torify(sigma, OneParamAction((2, 1, -1)), [2, 1, -1])
    if args.json:
        print(io.dumps(io.torification_to_json(r)), end="")
        return
    for alpha, ideal in sorted(r.ideals.items()):
        print(f"I_{alpha:>2} = {[list(e) for e in ideal.exponents]}")
    print("product   =", [list(e) for e in r.product.exponents])
    print("fan       =")
    for c in r.fan.cones:
        print("   ", [list(v) for v in c.rays])
    print("D^tor     =", [list(v) for v in r.dtor])
    for ch in r.heart.checks:
        print(f"heart j={ch.j}  u={list(ch.normal)}  on {[list(v) for v in ch.cone.rays]}")
    print("quasi-elementary:", bool(r.quasielementary), " defects:", list(r.defects) or "none")


if __name__ == "__main__":
    main()
