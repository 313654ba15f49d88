"""Run every check suite on one config and print a compact residual table.

    python3 scripts/golden_pipeline.py configs/golden_degree1.json --samples 500
"""

import argparse
import time

from orbitrsh import suites
from orbitrsh.config import load_config


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("config")
    parser.add_argument("--samples", type=int, default=300)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    model = load_config(args.config).build_model()
    towers = model.towers
    print(f"K = {towers.K}, heights = {towers.heights}, covering residual = {towers.covering_residual}")
    for k, level in enumerate(towers.levels, 1):
        print(f"  Y_{k}: {level.base!r}  closure {level.base_closure!r}")

    runs = {
        "towers": lambda: suites.tower_suite(model, args.samples, args.seed),
        "bundle": lambda: suites.bundle_suite(model, args.samples, args.seed),
        "covariance": lambda: suites.covariance_corpus_suite(model, args.samples, args.seed),
        "gauge": lambda: suites.gauge_suite(model, 16, args.seed),
        "psi": lambda: suites.psi_suite(model, args.samples, args.seed),
        "bdp": lambda: suites.bdp_suite(model, 50, args.seed),
        "lift": lambda: suites.lift_suite(model, 20, 32, args.seed),
        "rsh": lambda: suites.rsh_suite(model, 20, args.seed),
    }
    print(f"\n{'suite':<12}{'pass':<7}{'worst residual':>16}{'seconds':>10}")
    for name, run in runs.items():
        start = time.perf_counter()
        result = run()
        elapsed = time.perf_counter() - start
        print(f"{name:<12}{str(result['pass']):<7}{worst(result):>16.3g}{elapsed:>10.2f}")


def worst(result) -> float:
    """Largest float residual anywhere in a suite result."""
    found = [0.0]

    def walk(value):
        if isinstance(value, float):
            found.append(value)
        elif isinstance(value, dict):
            for v in value.values():
                walk(v)
        elif isinstance(value, (list, tuple)):
            for v in value:
                walk(v)
        elif hasattr(value, "max_pullback_residual"):
            found.append(value.max_pullback_residual)

    walk({k: v for k, v in result.items() if k != "pass"})
    return max(found)


if __name__ == "__main__":
    main()
