"""The orbit-breaking setup: a bundle over a system, a closed set Y, and its towers."""

from __future__ import annotations

from dataclasses import dataclass

from .bundle import ChartTuple, LineBundle
from .dynsys import Region, sample
from .errors import PreconditionError
from .sections import cutoff_width
from .towers import TowerDecomposition, first_return_partition

EPS_ALG = 1e-9


@dataclass(frozen=True)
class Model:
    bundle: LineBundle
    Y: Region
    towers: TowerDecomposition
    eps_alg: float = EPS_ALG
    width: float = 0.05

    @classmethod
    def build(cls, bundle: LineBundle, Y: Region, eps_alg: float = EPS_ALG, width: float | None = None) -> "Model":
        towers = first_return_partition(bundle.system, Y)
        return cls(bundle, Y, towers, eps_alg, cutoff_width(Y) if width is None else width)

    @property
    def system(self):
        return self.bundle.system

    @property
    def K(self) -> int:
        return self.towers.K

    def r(self, k: int) -> int:
        return self.towers.r(k)

    def tuple_for(self, x: int, k: int) -> ChartTuple:
        return self.bundle.select_tuple(x, self.r(k))

    def require_stage_point(self, x: int, k: int):
        if not self.towers.level(k).base_closure.contains(x):
            raise PreconditionError(f"point is not in the closure of Y_{k}")

    def boundary_points(self, k: int) -> list[int]:
        return self.towers.level(k).glue_boundary.boundary_points() if self.system.kind == "rotation" else []

    def stage_points(self, k: int, count: int, seed: int) -> list[int]:
        """Seeded interior samples of Y_k followed by every glue-boundary point."""
        level = self.towers.level(k)
        return list(sample(self.system, level.base_closure, count, seed)) + self.boundary_points(k)
