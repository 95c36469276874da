"""Density matrices and pure states on labeled multipartite layouts."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .linalg import (
    DimensionError,
    as_matrix,
    herm_eig,
    hermiticity_residual,
    partial_trace,
    projector,
)

LABELS = ("A", "S", "E", "O", "O_A", "O_B", "O_f", "O_W", "F")

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_FLOOR = -1e-9
NORM_TOL = 1e-10


class InvalidStateError(ValueError):
    pass


@dataclass(frozen=True)
class SystemLayout:
    """Ordered tensor factors, each a ``(label, dim)`` pair.

    Factor order is the tensor-product order; by convention ``A`` (when
    present) comes first, then ``S``, then ``E``, then the observers.
    """

    factors: tuple[tuple[str, int], ...]

    def __post_init__(self):
        factors = tuple((str(lab), int(dim)) for lab, dim in self.factors)
        labels = [lab for lab, _ in factors]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in layout: {labels}")
        for lab, dim in factors:
            if lab not in LABELS:
                raise ValueError(f"unknown subsystem label {lab!r}")
            if dim < 1:
                raise ValueError(f"factor {lab} has non-positive dimension {dim}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def of(cls, **dims: int) -> "SystemLayout":
        return cls(tuple(dims.items()))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @property
    def total_dim(self) -> int:
        return prod(self.dims)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"label {label!r} not in layout {self.labels}") from None

    def dim(self, label: str) -> int:
        return self.factors[self.index(label)][1]

    def indices(self, labels: Iterable[str]) -> list[int]:
        return [self.index(lab) for lab in labels]

    def restrict(self, labels: Iterable[str]) -> "SystemLayout":
        keep = set(self.indices(labels))
        return SystemLayout(tuple(f for k, f in enumerate(self.factors) if k in keep))


@dataclass(frozen=True)
class ValidationReport:
    hermitian: bool
    hermitian_residual: float
    unit_trace: bool
    trace_residual: float
    positive: bool
    min_eigenvalue: float

    @property
    def ok(self) -> bool:
        return self.hermitian and self.unit_trace and self.positive

    def lines(self) -> list[str]:
        def mark(flag):
            return "pass" if flag else "FAIL"

        return [
            f"hermitian  {mark(self.hermitian)}  residual={self.hermitian_residual:.3e}",
            f"trace      {mark(self.unit_trace)}  residual={self.trace_residual:.3e}",
            f"positive   {mark(self.positive)}  min_eig={self.min_eigenvalue:.3e}",
        ]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    layout: SystemLayout
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = as_matrix(self.mat)
        n = self.layout.total_dim
        if mat.shape != (n, n):
            raise DimensionError(
                f"matrix shape {mat.shape} does not match layout dimension {n}"
            )
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "mat", mat)

    @classmethod
    def checked(cls, layout: SystemLayout, mat) -> "DensityMatrix":
        rho = cls(layout, mat)
        rep = validate(rho)
        if not rep.ok:
            raise InvalidStateError("; ".join(rep.lines()))
        return rho

    @property
    def dims(self) -> tuple[int, ...]:
        return self.layout.dims

    def reduce(self, labels: Iterable[str]) -> "DensityMatrix":
        labels = list(labels)
        keep = self.layout.indices(labels)
        red = partial_trace(self.mat, self.layout.dims, keep)
        return DensityMatrix(self.layout.restrict(labels), red)

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    def to_dict(self) -> dict:
        return {
            "dims": list(self.layout.dims),
            "labels": list(self.layout.labels),
            "re": np.real(self.mat).ravel().tolist(),
            "im": np.imag(self.mat).ravel().tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "DensityMatrix":
        layout = SystemLayout(tuple(zip(data["labels"], data["dims"])))
        n = layout.total_dim
        mat = (np.asarray(data["re"]) + 1j * np.asarray(data["im"])).reshape(n, n)
        return cls(layout, mat)


@dataclass(frozen=True, eq=False)
class PureState:
    layout: SystemLayout
    vec: np.ndarray = field(repr=False)

    def __post_init__(self):
        vec = np.asarray(self.vec, dtype=complex).reshape(-1)
        if vec.shape[0] != self.layout.total_dim:
            raise DimensionError(
                f"vector length {vec.shape[0]} does not match layout dimension "
                f"{self.layout.total_dim}"
            )
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state vector has norm {norm:.12g}, expected 1")
        vec = vec.copy()
        vec.flags.writeable = False
        object.__setattr__(self, "vec", vec)

    def amplitudes(self) -> np.ndarray:
        return self.vec.reshape(self.layout.dims)

    def to_dict(self) -> dict:
        return {
            "dims": list(self.layout.dims),
            "labels": list(self.layout.labels),
            "re": np.real(self.vec).tolist(),
            "im": np.imag(self.vec).tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "PureState":
        layout = SystemLayout(tuple(zip(data["labels"], data["dims"])))
        return cls(layout, np.asarray(data["re"]) + 1j * np.asarray(data["im"]))


def validate(rho: DensityMatrix) -> ValidationReport:
    """Check Hermiticity, unit trace and positivity, reporting residuals."""
    m = rho.mat
    h_res = hermiticity_residual(m)
    tr_res = abs(complex(np.trace(m)) - 1.0)
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    min_eig = float(w[0])
    return ValidationReport(
        hermitian=h_res <= HERMITIAN_TOL,
        hermitian_residual=h_res,
        unit_trace=tr_res <= TRACE_TOL,
        trace_residual=tr_res,
        positive=min_eig >= PSD_FLOOR,
        min_eigenvalue=min_eig,
    )


def densify(p: PureState) -> DensityMatrix:
    return DensityMatrix(p.layout, projector(p.vec))


def pure(layout: SystemLayout, vec: Sequence[complex]) -> PureState:
    """Build a pure state, normalizing ``vec``."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return PureState(layout, v / np.linalg.norm(v))


def max_entangled(d: int, labels: tuple[str, str] = ("A", "S")) -> PureState:
    """``sum_k |k>|k> / sqrt(d)`` on two ``d``-dimensional factors."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * (d + 1)] = 1.0 / np.sqrt(d)
    return PureState(SystemLayout(((labels[0], d), (labels[1], d))), v)


def maximally_mixed(d: int, label: str = "S") -> DensityMatrix:
    return DensityMatrix(SystemLayout(((label, d),)), np.eye(d) / d)


def random_pure(d: int, seed: int, label: str = "S") -> PureState:
    """Haar-random pure state from a normalized complex Gaussian vector."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(SystemLayout(((label, d),)), v / np.linalg.norm(v))


def random_density(d: int, seed: int, label: str = "S") -> DensityMatrix:
    """Random mixed state: the marginal of a Haar-random pure state on ``d x d``."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    psi = random_pure(d * d, seed).vec
    red = partial_trace(projector(psi), [d, d], [0])
    return DensityMatrix(SystemLayout(((label, d),)), red)


def bloch_vector(rho: DensityMatrix) -> np.ndarray:
    m = rho.mat
    if m.shape != (2, 2):
        raise DimensionError("Bloch vector is defined for qubits only")
    return np.array(
        [2 * m[0, 1].real, -2 * m[0, 1].imag, (m[0, 0] - m[1, 1]).real]
    )


def eigenvalues(rho: DensityMatrix) -> np.ndarray:
    return herm_eig(rho.mat).eigenvalues
