"""Matrix fields of the endomorphism bundles End(V^(0) + ... + V^(n-1)) in chart tuples.

In the frame basis of a chart tuple U, a section of the endomorphism bundle
is an n x n matrix.  Changing to a tuple V conjugates by the diagonal
unitary u_VU = diag(1, g^(1)_VU, ..., g^(n-1)_VU), so the diagonal is chart
independent and each subdiagonal stays a subdiagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bundle import ChartTuple, LineBundle, tensor_transition
from .dynsys import Region, sample
from .errors import DomainMismatch, LevelMismatch, PointOutsideDomain, SizeMismatch
from .expr import Expr

__all__ = [
    "MatrixField",
    "Structure",
    "band_offset_mass",
    "banded_field",
    "change_chart",
    "chart_change_report",
    "classify_structure",
    "field_algebra",
    "transition_unitary",
]


@dataclass(frozen=True)
class MatrixField:
    """n x n matrix-valued section evaluated in any chart tuple of length >= n."""

    bundle: LineBundle
    size: int
    domain: Region
    fn: Callable[[int, ChartTuple], np.ndarray]
    label: str = ""

    def __call__(self, x: int, U: ChartTuple) -> np.ndarray:
        if len(U) < self.size:
            raise LevelMismatch(f"tuple of length {len(U)} is too short for size {self.size}")
        if not self.bundle.tuple_contains(U, x):
            raise PointOutsideDomain("point outside the tuple domain")
        return np.asarray(self.fn(x, U), dtype=complex).reshape(self.size, self.size)

    def at(self, x: int) -> np.ndarray:
        return self(x, self.bundle.select_tuple(x, self.size))

    def points(self, count: int, seed: int) -> list[int]:
        system = self.bundle.system
        pts = list(sample(system, self.domain, count, seed)) if not self.domain.interior().is_empty() else []
        return pts + self.domain.boundary_points()


def transition_unitary(b: LineBundle, x: int, U: ChartTuple, V: ChartTuple, n: int) -> np.ndarray:
    """diag(tensor_transition(l, V, U, x) for l < n)."""
    return np.diag([tensor_transition(b, level, V, U, x) for level in range(n)])


def change_chart(M: np.ndarray, x: int, U: ChartTuple, V: ChartTuple, b: LineBundle) -> np.ndarray:
    """Matrix of the same endomorphism in tuple V: u_VU M u_VU^*."""
    M = np.asarray(M, dtype=complex)
    u = transition_unitary(b, x, U, V, M.shape[0])
    return u @ M @ u.conj().T


def band_offset_mass(M: np.ndarray, m: int) -> float:
    """Largest |entry| off the m-th subdiagonal (negative m: superdiagonal)."""
    n = M.shape[0]
    rows, cols = np.indices((n, n))
    off = np.abs(M[(rows - cols) != m])
    return float(off.max()) if off.size else 0.0


@dataclass(frozen=True)
class Structure:
    kind: str
    m: int | None
    max_offstructure: float
    chart_independent: bool = True

    def __str__(self):
        if self.kind == "subdiagonal":
            return f"Subdiagonal({self.m})"
        if self.kind == "superdiagonal":
            return f"Superdiagonal({-self.m})"
        return self.kind.capitalize()


def _classify(mats: Sequence[np.ndarray], eps: float) -> Structure:
    n = mats[0].shape[0]
    masses = {m: max(band_offset_mass(M, m) for M in mats) for m in range(-(n - 1), n)}
    passing = [m for m, v in masses.items() if v < eps]
    if 0 in passing:
        return Structure("diagonal", 0, masses[0])
    if len(passing) == 1:
        m = passing[0]
        return Structure("subdiagonal" if m > 0 else "superdiagonal", m, masses[m])
    return Structure("general", None, min(masses.values()))


def classify_structure(f: MatrixField, samples: int = 64, seed: int = 0, eps: float = 1e-9) -> Structure:
    """Band structure of a field over sampled points, with a chart-independence check."""
    b = f.bundle
    pts = f.points(samples, seed)
    base = _classify([f.at(x) for x in pts], eps)
    everywhere = _classify([f(x, U) for x in pts for U in b.tuples_at(x, f.size)], eps)
    independent = (everywhere.kind, everywhere.m) == (base.kind, base.m)
    return Structure(base.kind, base.m, base.max_offstructure, independent)


def chart_change_report(f: MatrixField, points: Sequence[int]) -> dict:
    """Worst chart-change and diagonal-invariance residuals where several tuples meet."""
    b = f.bundle
    law = diag = 0.0
    used = 0
    for x in points:
        tuples = b.tuples_at(x, f.size)
        if len(tuples) < 2:
            continue
        used += 1
        U = tuples[0]
        MU = f(x, U)
        for V in tuples[1:]:
            MV = f(x, V)
            law = max(law, float(np.abs(MV - change_chart(MU, x, U, V, b)).max()))
            diag = max(diag, float(np.abs(np.diag(MV) - np.diag(MU)).max()))
    return {"chart_change": law, "diagonal_invariance": diag, "overlap_points": used}


def field_algebra(a: MatrixField, b: MatrixField | None, op: str, samples: int = 256, seed: int = 0):
    """Pointwise add/mul/adjoint in a common chart, or the sampled sup of the operator norm."""
    if op == "adjoint":
        return MatrixField(a.bundle, a.size, a.domain, lambda x, U: a(x, U).conj().T, f"({a.label})*")
    if op == "supnorm":
        return max(float(np.linalg.norm(a.at(x), 2)) for x in a.points(samples, seed))
    if b is None:
        raise ValueError(f"{op} needs two fields")
    if a.size != b.size:
        raise SizeMismatch(f"sizes {a.size} and {b.size} differ")
    if a.domain != b.domain:
        raise DomainMismatch("fields live over different regions")
    if op == "add":
        return MatrixField(a.bundle, a.size, a.domain, lambda x, U: a(x, U) + b(x, U), f"{a.label}+{b.label}")
    if op == "mul":
        return MatrixField(a.bundle, a.size, a.domain, lambda x, U: a(x, U) @ b(x, U), f"{a.label}{b.label}")
    raise ValueError(f"unknown field operation {op!r}")


def banded_field(bundle: LineBundle, size: int, domain: Region, m: int, profiles: Sequence[Expr], label: str = "") -> MatrixField:
    """Field with entry (i+m, i) equal to profiles[i](y) in reference-frame terms.

    In tuple U the entry is profiles[i](y) divided by the level-m frame of
    alpha^i(U) at alpha^i(y), which makes the field chart covariant.
    """
    if len(profiles) != size - m:
        raise SizeMismatch(f"need {size - m} profiles for band {m} of a {size}x{size} field")
    system = bundle.system

    def fn(y: int, U: ChartTuple) -> np.ndarray:
        M = np.zeros((size, size), dtype=complex)
        z = y
        for i, profile in enumerate(profiles):
            if i:
                z = system.apply(z, 1)
            M[i + m, i] = profile(y) * bundle.frame_inverse(bundle.shifted(U, i, m), m, z)
        return M

    return MatrixField(bundle, size, domain, fn, label or f"band{m}")
