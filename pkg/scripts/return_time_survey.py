"""Survey tower heights of first-return partitions over arcs [0, L].

For each rotation and arc length, prints K, the heights and whether they obey
the three-distance pattern (at most three values, largest = sum of the others).
Output is CSV on stdout.

    python3 scripts/return_time_survey.py --lengths 0.5 0.3 0.1 0.05 0.01
"""

import argparse
import csv
import sys
from fractions import Fraction

from orbitrsh.dynsys import Rotation
from orbitrsh.towers import first_return_partition

ROTATIONS = {
    "golden": "golden",
    "noble-3": [0, 3] + [1] * 80,
    "sqrt2-1": [0] + [2] * 80,
    "e-2": [0, 1, 2, 1, 1, 4, 1, 1, 6, 1, 1, 8, 1, 1, 10, 1, 1, 12, 1, 1, 14],
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lengths", nargs="+", default=["1/2", "1/3", "1/10", "1/20", "1/100"])
    args = parser.parse_args()
    out = csv.writer(sys.stdout)
    out.writerow(["rotation", "theta", "length", "K", "heights", "measures", "three_distance", "covering_residual"])
    for name, theta in ROTATIONS.items():
        system = Rotation.from_theta(theta)
        for raw in args.lengths:
            length = Fraction(raw)
            towers = first_return_partition(system, system.arc(0, length))
            values = sorted(set(towers.heights))
            pattern = len(values) < 3 or values[2] == values[0] + values[1]
            measures = " ".join(f"{float(level.base.measure()):.6f}" for level in towers.levels)
            out.writerow(
                [
                    name,
                    f"{system.theta:.15f}",
                    raw,
                    towers.K,
                    " ".join(map(str, towers.heights)),
                    measures,
                    pattern,
                    float(towers.covering_residual),
                ]
            )


if __name__ == "__main__":
    main()
