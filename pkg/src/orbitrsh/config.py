"""JSON run configuration: parsing, validation and model construction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .bundle import DEFAULT_CHARTS, LineBundle
from .dynsys import DEFAULT_MAX_RETURN, EPS_CMP, CylinderRegion, Odometer, Rotation, to_fraction
from .errors import OrbitError, PreconditionError
from .model import EPS_ALG, Model

SCHEMA_VERSION = 1
SUITES = ("towers", "bundle", "covariance", "gauge", "psi", "bdp", "lift", "rsh")


class ConfigError(OrbitError):
    """Unreadable or schema-invalid configuration."""


@dataclass(frozen=True)
class Budgets:
    max_return: int = DEFAULT_MAX_RETURN
    samples: int = 200
    seed: int = 0
    precision_bits: int = 128
    eps_alg: float = EPS_ALG
    eps_cmp: Fraction = EPS_CMP
    words: int = 50
    targets: int = 20

    def __post_init__(self):
        for name in ("max_return", "samples", "precision_bits", "words", "targets"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"budget {name} must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.precision_bits < 96:
            raise ConfigError("precision_bits must be at least 96")
        if not (self.eps_alg > 0 and self.eps_cmp > 0):
            raise ConfigError("tolerances must be positive")


@dataclass(frozen=True)
class RunConfig:
    system: dict
    bundle: dict
    Y: dict
    atlas: dict | None = None
    budgets: Budgets = field(default_factory=Budgets)
    suites: tuple[str, ...] = SUITES
    raw: dict = field(default_factory=dict, compare=False)

    def with_seed(self, seed: int) -> "RunConfig":
        budgets = Budgets(**{**self.budgets.__dict__, "seed": seed})
        return RunConfig(self.system, self.bundle, self.Y, self.atlas, budgets, self.suites, self.raw)

    def build_system(self):
        kind = self.system["kind"]
        b = self.budgets
        if kind == "rotation":
            bits = int(self.system.get("precision_bits", b.precision_bits))
            if bits < 96:
                raise ConfigError("precision_bits must be at least 96")
            theta = self.system.get("theta")
            if theta is None:
                raise ConfigError("rotation needs theta")
            try:
                system = Rotation.from_theta(theta, bits, b.max_return, eps_cmp=b.eps_cmp)
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"bad theta: {exc}") from exc
            period = system.shortest_period()
            if period is not None:
                raise ConfigError(f"theta has period {period} within eps_cmp, below max_return {b.max_return}")
            return system
        if kind == "odometer":
            radices = self.system.get("radices")
            if not radices or any(not isinstance(m, int) or m < 2 for m in radices):
                raise ConfigError("odometer radices must be integers >= 2")
            region_depth = self._cylinder_depth()
            depth = self.system.get("depth")
            if depth is None:
                return Odometer.for_region_depth(radices, region_depth, b.max_return, eps_cmp=b.eps_cmp)
            if not isinstance(depth, int) or depth < region_depth:
                raise ConfigError(f"odometer depth must be an integer >= {region_depth} for this Y")
            return Odometer(tuple(radices), depth, b.max_return, eps_cmp=b.eps_cmp)
        raise ConfigError(f"unknown system kind {kind!r}")

    def _cylinder_depth(self) -> int:
        return max((len(p) for p in self.Y.get("cylinders", [])), default=1) or 1

    def build_Y(self, system):
        if system.kind == "rotation":
            arcs = self.Y.get("arcs")
            if not arcs:
                raise ConfigError("Y needs a non-empty list of arcs")
            Y = system.empty()
            for arc in arcs:
                try:
                    a, b = to_fraction(arc["a"]), to_fraction(arc["b"])
                except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
                    raise ConfigError(f"bad arc {arc!r}") from exc
                if b < a or b - a > 1:
                    raise ConfigError(f"arc needs a <= b <= a + 1, got {arc!r}")
                piece = system.arc(a, b, bool(arc.get("left_closed", True)), bool(arc.get("right_closed", True)))
                Y = Y.union(piece)
        else:
            patterns = self.Y.get("cylinders")
            if not patterns:
                raise ConfigError("Y needs a non-empty list of cylinders")
            Y = system.empty()
            for prefix in patterns:
                try:
                    Y = Y.union(CylinderRegion.cylinder(system.radices, [int(d) for d in prefix]))
                except PreconditionError as exc:
                    raise ConfigError(str(exc)) from exc
        if Y.closure() != Y:
            raise ConfigError("Y must be closed")
        if Y.interior().is_empty():
            raise ConfigError("Y requires non-empty interior")
        return Y

    def build_bundle(self, system) -> LineBundle:
        trivial = bool(self.bundle.get("trivial", False))
        degree = self.bundle.get("degree", 0)
        if not isinstance(degree, int):
            raise ConfigError("bundle degree must be an integer")
        if system.kind == "odometer":
            if degree != 0:
                raise ConfigError("bundles over the odometer are trivial; degree must be 0")
            return LineBundle.trivial(system)
        if trivial:
            degree = 0
        arcs, twists = DEFAULT_CHARTS, None
        if self.atlas:
            charts = self.atlas.get("charts") or []
            try:
                arcs = tuple((to_fraction(c["a"]), to_fraction(c["b"])) for c in charts)
                if any("twist" in c for c in charts):
                    twists = tuple(int(c.get("twist", 0)) for c in charts)
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"bad atlas: {exc}") from exc
        try:
            bundle = LineBundle.circle(system, degree, arcs, twists)
        except PreconditionError as exc:
            raise ConfigError(str(exc)) from exc
        defect = self.bundle.get("defect")
        if defect:
            # negative control: scale one transition so the cocycle check must fail
            try:
                i, j = defect["charts"]
                bundle = bundle.with_scaled_transition(int(i), int(j), float(defect["factor"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"bad bundle defect: {exc}") from exc
        return bundle

    def build_model(self) -> Model:
        system = self.build_system()
        Y = self.build_Y(system)
        bundle = self.build_bundle(system)
        width = self.raw.get("cutoff_width")
        return Model.build(bundle, Y, self.budgets.eps_alg, width)


def _parse_eps(value) -> Fraction:
    if isinstance(value, str) and value.strip().startswith("2^"):
        return Fraction(1, 2 ** -int(value.strip()[2:]))
    return to_fraction(value)


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")
    system = data.get("system")
    if not isinstance(system, dict) or "kind" not in system:
        raise ConfigError("config needs a system with a kind")
    system = {**system, **system.get(system["kind"], {})}
    system.pop(system["kind"], None)
    Y = data.get("Y")
    if not isinstance(Y, dict):
        raise ConfigError("config needs a Y region")
    raw_budgets = dict(data.get("budgets", {}))
    try:
        if "eps_cmp" in raw_budgets:
            raw_budgets["eps_cmp"] = _parse_eps(raw_budgets["eps_cmp"])
        if "precision_bits" not in raw_budgets and "precision_bits" in system:
            raw_budgets["precision_bits"] = system["precision_bits"]
        budgets = Budgets(**raw_budgets)
    except TypeError as exc:
        raise ConfigError(f"bad budgets: {exc}") from exc
    suites = tuple(data.get("suites", SUITES))
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suites {unknown}")
    return RunConfig(system, dict(data.get("bundle", {"degree": 0})), Y, data.get("atlas"), budgets, suites, data)


def load_config(path: str | Path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(data)
