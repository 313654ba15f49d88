"""Command line: ``orbitrsh <subcommand> --config <path>``.

Exit codes: 0 all suites pass, 1 a suite failed, 2 configuration error,
3 boundary ambiguity or return-horizon error.  A JSON document is written to
standard output in every case.
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal, localcontext
from fractions import Fraction

from . import __version__, suites
from .config import SCHEMA_VERSION, ConfigError, RunConfig, load_config
from .dynsys import ArcRegion, CylinderRegion
from .errors import (
    BoundaryAmbiguous,
    BudgetExceeded,
    DepthExhausted,
    ItinerarySumMismatch,
    MaxReturnExceeded,
    PreconditionError,
)
from .model import Model
from .rep import RSHDecomposition

SUBCOMMANDS = ("towers", "check-bundle", "check-rep", "decompose", "report")
HORIZON_ERRORS = (BoundaryAmbiguous, MaxReturnExceeded, BudgetExceeded, ItinerarySumMismatch)
REP_SUITES = ("covariance", "gauge", "psi", "bdp", "lift")


# serialization -------------------------------------------------------------


def exact_number(value: Fraction) -> dict:
    """Exact ratio, a decimal string at working precision, and a double."""
    value = Fraction(value)
    den = value.denominator
    terminating = den & (den - 1) == 0
    with localcontext() as ctx:
        ctx.prec = max(50, den.bit_length() + 10) if terminating else 50
        decimal = Decimal(value.numerator) / Decimal(den)
    text = format(decimal, "f") if terminating else format(decimal, ".49e")
    return {"exact": str(value), "decimal": text, "value": float(value)}


def point_json(system, p: int) -> dict:
    if system.kind == "rotation":
        return exact_number(system.exact_coordinate(p))
    return {"digits": list(system.digits(p)), "value": system.coordinate(p)}


def region_json(system, region) -> dict | list:
    if isinstance(region, ArcRegion):
        arcs = []
        for arc in region.arcs():
            arcs.append(
                {
                    "a": exact_number(Fraction(arc.a, system.modulus)),
                    "b": exact_number(Fraction(arc.b, system.modulus)),
                    "left_closed": arc.left_closed,
                    "right_closed": arc.right_closed,
                }
            )
        return {"arcs": arcs, "measure": exact_number(region.measure())}
    if isinstance(region, CylinderRegion):
        return {
            "cylinders": [list(p) for p in region.prefixes()],
            "depth": region.depth,
            "measure": exact_number(region.measure()),
        }
    raise TypeError(f"cannot serialize {type(region).__name__}")


def _jsonable(value):
    if isinstance(value, Fraction):
        return exact_number(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def towers_json(model: Model, emit_intervals: bool = False) -> dict:
    system = model.system
    levels = []
    for level in model.towers.levels:
        entry = {
            "r": level.r,
            "base": region_json(system, level.base),
            "base_closure": region_json(system, level.base_closure),
            "glue_boundary": [point_json(system, p) for p in level.glue_boundary.boundary_points()]
            if system.kind == "rotation"
            else [],
        }
        if emit_intervals:
            entry["orbit"] = [
                region_json(system, system.region_map(level.base, i)) for i in range(level.r)
            ]
        levels.append(entry)
    return {
        "K": model.K,
        "levels": levels,
        "covering_residual": exact_number(model.towers.covering_residual),
        "horizon": model.towers.horizon,
    }


def rsh_json(model: Model, rsh: RSHDecomposition) -> dict:
    system = model.system
    return {
        "length": rsh.length,
        "matrix_sizes": list(rsh.matrix_sizes),
        "base_dimension": rsh.base_dimension,
        "words_checked": rsh.words_checked,
        "stages": [
            {
                "k": s.k,
                "r": s.size,
                "base": region_json(system, s.base),
                "glue_boundary": [point_json(system, p) for p in s.boundary_points],
                "pullback_residual": s.pullback_residual,
                "unresolved_points": s.unresolved,
            }
            for s in rsh.stages
        ],
    }


def system_json(model: Model) -> dict:
    system = model.system
    if system.kind == "rotation":
        return {
            "kind": "rotation",
            "theta": exact_number(Fraction(system.theta_ticks, system.modulus)),
            "precision_bits": system.bits,
            "eps_cmp": exact_number(system.eps_cmp),
        }
    return {"kind": "odometer", "radices": list(system.radices), "depth": system.depth}


# suites --------------------------------------------------------------------


def run_suite(name: str, model: Model, cfg: RunConfig, jobs: int) -> dict:
    b = cfg.budgets
    seed = b.seed
    if name == "towers":
        return suites.tower_suite(model, b.samples, seed, jobs)
    if name == "bundle":
        return suites.bundle_suite(model, max(b.samples, 200), seed, jobs)
    if name == "covariance":
        return suites.covariance_corpus_suite(model, b.samples, seed, jobs=jobs)
    if name == "gauge":
        return suites.gauge_suite(model, 16, seed, jobs)
    if name == "psi":
        return suites.psi_suite(model, b.samples, seed, jobs=jobs)
    if name == "bdp":
        return suites.bdp_suite(model, b.words, seed, jobs)
    if name == "lift":
        return suites.lift_suite(model, b.targets, 32, seed, jobs)
    if name == "rsh":
        result = suites.rsh_suite(model, 20, seed)
        return {"decomposition": rsh_json(model, result["decomposition"]), "pass": result["pass"]}
    raise ConfigError(f"unknown suite {name!r}")


def _requested(subcommand: str, cfg: RunConfig) -> tuple[str, ...]:
    if subcommand == "towers":
        return ("towers",)
    if subcommand == "check-bundle":
        return ("bundle",)
    if subcommand == "check-rep":
        return REP_SUITES
    if subcommand == "decompose":
        return ("covariance", "gauge", "bdp", "rsh")
    return cfg.suites


def execute(subcommand: str, cfg: RunConfig, jobs: int = 1, emit_intervals: bool = False) -> dict:
    model = cfg.build_model()
    results = {name: run_suite(name, model, cfg, jobs) for name in _requested(subcommand, cfg)}
    report = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": subcommand,
        "config": cfg.raw,
        "system": system_json(model),
    }
    decomposition = towers_json(model, emit_intervals)
    if subcommand == "towers":
        report.update(decomposition)
    else:
        report["towers"] = decomposition
    if subcommand == "decompose":
        rsh = results["rsh"]["decomposition"]
        report.update(
            {
                "length": rsh["length"],
                "matrix_sizes": rsh["matrix_sizes"],
                "base_spaces": [s["base"] for s in rsh["stages"]],
                "stages": rsh["stages"],
                "residuals": {
                    "covariance": results["covariance"]["deviation"]["max"],
                    "gauge": results["gauge"]["deviation"],
                    "bdp": max(results["bdp"]["block_residual"], results["bdp"]["offblock"]),
                    "pullback": max(s["pullback_residual"] for s in rsh["stages"]),
                },
                "horizon": model.towers.horizon,
            }
        )
    report["suites"] = _jsonable(results)
    report["thresholds"] = _jsonable(suites.THRESHOLDS)
    report["pass"] = all(r["pass"] for r in results.values())
    report["provenance"] = {"tool": "orbitrsh", "version": __version__, "seeds": {"seed": cfg.budgets.seed}}
    return report


# entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orbitrsh", description=__doc__.splitlines()[0])
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, help="path to the JSON run configuration")
    parser.add_argument("--jobs", type=int, default=1, help="threads for independent sample evaluations")
    parser.add_argument("--seed", type=int, default=None, help="override budgets.seed")
    parser.add_argument("--emit-intervals", action="store_true", help="include every orbit interval alpha^i(Y_k)")
    return parser


def _emit(doc: dict, out) -> None:
    out.write(json.dumps(doc, indent=2, sort_keys=False, allow_nan=True))
    out.write("\n")


def _error_doc(subcommand: str, kind: str, exc: Exception, code: int) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "subcommand": subcommand,
        "error": {"type": kind, "class": type(exc).__name__, "message": str(exc)},
        "exit_code": code,
        "pass": False,
        "provenance": {"tool": "orbitrsh", "version": __version__},
    }


def main(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        _emit(_error_doc(args.subcommand, "config", ValueError("--jobs must be positive"), 2), out)
        return 2
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        report = execute(args.subcommand, cfg, args.jobs, args.emit_intervals)
    except (ConfigError, PreconditionError, DepthExhausted) as exc:
        print(f"orbitrsh: {exc}", file=sys.stderr)
        _emit(_error_doc(args.subcommand, "config", exc, 2), out)
        return 2
    except HORIZON_ERRORS as exc:
        print(f"orbitrsh: {exc}", file=sys.stderr)
        _emit(_error_doc(args.subcommand, "horizon", exc, 3), out)
        return 3
    _emit(report, out)
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
