"""Information gain, uncertainty and back-action of measurement gadgets.

All quantities are in bits. A reference ``A`` is maximally entangled with
the system before the gadget acts; uncertainty is the correlation between
``A`` and the memory that the gadget fails to create, back-action is the
correlation between ``A`` and the system that it destroys. Each starts at
``2 log2 d`` for a ``d``-level system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable

import numpy as np

from .linalg import entropy_bits, trace_distance
from .states import DensityMatrix

if TYPE_CHECKING:
    from .gadgets import MeasurementGadget

ZERO_TOL = 1e-9


@dataclass(frozen=True)
class MetricResult:
    value_bits: float
    components: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value_bits": self.value_bits, "components": dict(self.components)}


def _labels(x) -> list[str]:
    return [x] if isinstance(x, str) else list(x)


def mutual_information(rho: DensityMatrix, x: Iterable[str], y: Iterable[str]) -> MetricResult:
    """``S(X) + S(Y) - S(XY)`` for disjoint label groups of ``rho``."""
    x, y = _labels(x), _labels(y)
    if not x or not y:
        raise ValueError("both label groups must be non-empty")
    if set(x) & set(y):
        raise ValueError(f"label groups overlap: {sorted(set(x) & set(y))}")
    for lab in x + y:
        rho.layout.index(lab)
    # keep layout order inside the joint block
    xy = [lab for lab in rho.layout.labels if lab in x or lab in y]
    s_x = entropy_bits(rho.reduce(x).mat)
    s_y = entropy_bits(rho.reduce(y).mat)
    s_xy = entropy_bits(rho.reduce(xy).mat)
    value = max(s_x + s_y - s_xy, 0.0)
    return MetricResult(value, {"S_X": s_x, "S_Y": s_y, "S_XY": s_xy})


def is_product(rho: DensityMatrix, x: Iterable[str], y: Iterable[str], tol: float = ZERO_TOL) -> bool:
    """Whether the ``x``/``y`` marginal equals the product of its marginals."""
    x, y = _labels(x), _labels(y)
    xy = [lab for lab in rho.layout.labels if lab in x or lab in y]
    joint = rho.reduce(xy)
    first = [lab for lab in xy if lab in x]
    if xy[: len(first)] != first:
        raise ValueError("product test expects the x labels to precede the y labels")
    prod_state = np.kron(rho.reduce(x).mat, rho.reduce(y).mat)
    return trace_distance(joint.mat, prod_state) < tol


def heisenberg_limit(d: int) -> float:
    """Uncertainty (and back-action) of an ideal von Neumann measurement."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    return float(np.log2(d))


def _deficit(tau: DensityMatrix, out_label: str, d: int) -> MetricResult:
    mi = mutual_information(tau, ["A"], [out_label])
    value = max(2 * np.log2(d) - mi.value_bits, 0.0)
    comps = dict(mi.components)
    comps["I"] = mi.value_bits
    return MetricResult(float(value), comps)


def uncertainty(g: "MeasurementGadget") -> MetricResult:
    """``2 log2 d`` minus the reference/memory mutual information after ``g``."""
    return _deficit(g.choi("result"), "O", g.d_s)


def back_action(g: "MeasurementGadget") -> MetricResult:
    """``2 log2 d`` minus the reference/system mutual information after ``g``.

    Written ``D[M]`` or ``B[M]`` in the literature; both name this quantity.
    """
    return _deficit(g.choi("disturbance"), "S", g.d_s)


def is_maximally_informative(g: "MeasurementGadget") -> bool:
    return uncertainty(g).value_bits < ZERO_TOL


def is_maximally_disturbing(g: "MeasurementGadget") -> bool:
    from .gadgets import _all_equal, probe_states

    outputs = [g.disturbance_map(p) for p in probe_states(g.d_s)]
    return _all_equal(outputs)
