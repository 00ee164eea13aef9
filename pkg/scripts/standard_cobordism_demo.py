"""Factor a chain of star subdivisions of the quadrant through its cobordism.

Usage: python scripts/standard_cobordism_demo.py [--centers 1,1 2,1 1,2]
"""

import argparse

from wfactor.cli import parse_vec
from wfactor.cobordism import bubbles, quasielementary_decomposition
from wfactor.cones import Cone, Fan
from wfactor.pipeline import factor


def show(fan: Fan) -> str:
    return "  ".join(str([list(v) for v in c.rays]) for c in fan.cones)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--centers", nargs="*", type=parse_vec, default=[(1, 1), (2, 1), (1, 2)])
    args = parser.parse_args()

    sigma = Fan.from_cones([Cone.from_rays([(1, 0), (0, 1)])])
    cb, trace = factor(sigma, list(args.centers))
    print(f"{len(bubbles(cb))} bubbles in rank {cb.fan.rank}, a = {list(cb.act.a)}")
    for level, group in quasielementary_decomposition(cb):
        print(f"level {level}: " + ", ".join(str([list(v) for v in b.cone.rays]) for b in group))
    print("quotients, from the lower boundary to the upper one:")
    for k, q in enumerate(trace.quotients):
        print(f"  W_{k}: {show(q)}")


if __name__ == "__main__":
    main()
