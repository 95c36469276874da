"""Worked multi-agent scenarios.

* Wigner's friend variants with von Neumann and swap observations.
* Two observers simultaneously swapping with one system, via the
  Hamiltonian ``SWAP(S, O_A) + SWAP(S, O_B)``. Matrix-exponential evolution
  is the ground truth; closed-form reduced states are checked against it.
* Remote state preparation through a maximally entangled reference, and
  the product-state criterion for measurements.

Phase convention for the closed forms: starting from ``|psi>|0>|0>`` with
``alpha = <0|psi>`` and ``beta = |(1 - |0><0|) psi|``, the exact evolution
is

    alpha e^{-2it} |000>
    + beta (e^{-2it} + 2 e^{it})/3 |psi' 0 0>
    + beta (e^{-2it} - e^{it})/3 (|0 psi' 0> + |0 0 psi'>)

because ``|000>`` and the symmetric combination both have eigenvalue 2
and the remaining combination has eigenvalue -1. Every reduced-state
weight depends on ``t`` only through ``cos 3t``.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .gadgets import MeasurementGadget, _layout, _ground, is_measurement, SWAP_FLAGS
from .linalg import (
    as_matrix,
    basis_vector,
    cyclic_shift,
    embed,
    herm_eig,
    is_hermitian,
    kron,
    permute_factors,
    projector,
    swap_operator,
)
from .metrics import is_product, mutual_information
from .states import DensityMatrix, PureState, SystemLayout, densify, max_entangled

PERIOD = 2 * np.pi / 3
DEGENERATE_TOL = 1e-12
CSV_HEADER = ("t", "uncertainty_bits", "info_gain_bits", "back_action_bits")


class WignerVariant(str, enum.Enum):
    FRIEND_VON_NEUMANN = "friend-von-neumann"
    WIGNER_ASKS_RESULT = "wigner-asks-result"
    MEMORY_HANDOFF = "memory-handoff"
    FRIEND_SWAPS = "friend-swaps"


def _cnot(d: int = 2) -> np.ndarray:
    return sum(kron(projector(basis_vector(d, k)), cyclic_shift(d, k)) for k in range(d))


def wigner_run(variant: WignerVariant | str) -> PureState:
    """Final dot/friend/Wigner state for one variant of the thought experiment.

    The dot starts in ``(|0> + |1>)/sqrt2`` and both memories in ``|0>``.

    * ``friend-von-neumann``: the friend records the position; Wigner idle.
    * ``wigner-asks-result``: then Wigner asks where the dot is (copies the
      friend's record).
    * ``memory-handoff``: after the friend's von Neumann record, Wigner
      asks what the friend observed (swaps memories).
    * ``friend-swaps``: the friend swaps with the dot, then hands the
      memory to Wigner.
    """
    variant = WignerVariant(variant)
    dims = [2, 2, 2]
    layout = SystemLayout((("S", 2), ("O_f", 2), ("O_W", 2)))
    psi = np.zeros(8, dtype=complex)
    psi[0b000] = psi[0b100] = 1 / np.sqrt(2)

    record = embed(_cnot(), dims, [0, 1])
    ask_where = embed(_cnot(), dims, [1, 2])
    friend_swap = embed(swap_operator(2), dims, [0, 1])
    handoff = embed(swap_operator(2), dims, [1, 2])

    steps = {
        WignerVariant.FRIEND_VON_NEUMANN: [record],
        WignerVariant.WIGNER_ASKS_RESULT: [record, ask_where],
        WignerVariant.MEMORY_HANDOFF: [record, handoff],
        WignerVariant.FRIEND_SWAPS: [friend_swap, handoff],
    }[variant]
    for op in steps:
        psi = op @ psi
    return PureState(layout, psi)


def simul_hamiltonian(d: int) -> np.ndarray:
    """``SWAP(S, O_A) + SWAP(S, O_B)`` on ``S x O_A x O_B``."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    dims = [d, d, d]
    sw = swap_operator(d)
    return embed(sw, dims, [0, 1]) + embed(sw, dims, [0, 2])


@lru_cache(maxsize=8)
def _spectrum(d: int, with_ancilla: bool):
    h = simul_hamiltonian(d)
    if with_ancilla:
        h = kron(np.eye(d), h)
    w, v = herm_eig(h)
    w.flags.writeable = False
    v.flags.writeable = False
    return w, v


def _propagator(d: int, t: float, with_ancilla: bool = False) -> np.ndarray:
    w, v = _spectrum(d, with_ancilla)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


@dataclass(frozen=True)
class SimulSwapState:
    t: float
    state: PureState
    with_ancilla: bool

    def density(self) -> DensityMatrix:
        return densify(self.state)


def simul_initial(psi: PureState | None, d: int = 2, with_ancilla: bool = False) -> PureState:
    """Starting state ``|psi>|0>|0>``, or ``|Phi+>_AS |0>|0>`` with the ancilla."""
    zero = basis_vector(d, 0)
    if with_ancilla:
        phi = max_entangled(d).vec
        layout = SystemLayout((("A", d), ("S", d), ("O_A", d), ("O_B", d)))
        return PureState(layout, np.kron(np.kron(phi, zero), zero))
    if psi is None:
        raise ValueError("a system state is required without the ancilla")
    d = psi.layout.total_dim
    zero = basis_vector(d, 0)
    layout = SystemLayout((("S", d), ("O_A", d), ("O_B", d)))
    return PureState(layout, np.kron(np.kron(psi.vec, zero), zero))


def simul_evolve(
    psi: PureState | None, t: float, with_ancilla: bool = False, d: int = 2
) -> SimulSwapState:
    """Evolve under the two-observer swap Hamiltonian for time ``t``.

    With ``with_ancilla`` the system starts maximally entangled with a
    reference ``A`` and ``psi`` is ignored; ``d`` sets the dimension.
    """
    if psi is not None:
        d = psi.layout.total_dim
    start = simul_initial(psi, d, with_ancilla)
    vec = _propagator(d, t, with_ancilla) @ start.vec
    vec = vec / np.linalg.norm(vec)
    return SimulSwapState(float(t), PureState(start.layout, vec), with_ancilla)


def make_simul_swap(d: int, t: float, observer: str = "O_A") -> MeasurementGadget:
    """The two-observer evolution seen as a gadget for one observer.

    The other observer plays the environment.
    """
    u = _propagator(d, t)  # factors S, O_A, O_B
    if observer == "O_A":
        u = permute_factors(u, [d, d, d], [0, 2, 1])
    elif observer != "O_B":
        raise ValueError(f"observer must be 'O_A' or 'O_B', got {observer!r}")
    return MeasurementGadget(_layout(d, d, d), u, _ground(d, d), f"simul_swap[{observer}]", SWAP_FLAGS)


def _split(psi: PureState):
    v = psi.vec
    alpha = v[0]
    rest = v.copy()
    rest[0] = 0.0
    beta = float(np.linalg.norm(rest))
    if abs(alpha) > 1 - DEGENERATE_TOL or beta < DEGENERATE_TOL:
        return alpha, 0.0, np.zeros_like(v)
    return alpha, beta, rest / beta


def _phases(t: float):
    slow = np.exp(-2j * t)
    fast = np.exp(1j * t)
    return slow, (slow + 2 * fast) / 3, (slow - fast) / 3


def simul_result_analytic(psi: PureState, t: float) -> DensityMatrix:
    """Closed-form state of ``O_A`` after the simultaneous swap."""
    alpha, beta, perp = _split(psi)
    d = psi.vec.shape[0]
    slow, _, cross = _phases(t)
    psi2 = slow * alpha * basis_vector(d, 0) + beta * cross * perp
    weight = beta**2 * (7 + 2 * np.cos(3 * t)) / 9
    rho = weight * projector(basis_vector(d, 0)) + projector(psi2)
    return DensityMatrix(SystemLayout((("O_A", d),)), rho)


def simul_disturbance_analytic(psi: PureState, t: float) -> DensityMatrix:
    """Closed-form state of ``S`` after the simultaneous swap."""
    alpha, beta, perp = _split(psi)
    d = psi.vec.shape[0]
    slow, stay, _ = _phases(t)
    psi3 = slow * alpha * basis_vector(d, 0) + beta * stay * perp
    weight = 2 * beta**2 * (2 - 2 * np.cos(3 * t)) / 9
    rho = weight * projector(basis_vector(d, 0)) + projector(psi3)
    return DensityMatrix(SystemLayout((("S", d),)), rho)


def _choi_analytic(d: int, t: float, label: str) -> DensityMatrix:
    slow, stay, cross = _phases(t)
    # amplitude on |k>_A|k>_out for k >= 1, and incoherent weight on |k>_A|0>_out
    if label == "O_A":
        diag_amp, leak = cross, abs(stay) ** 2 + abs(cross) ** 2
    else:
        diag_amp, leak = stay, 2 * abs(cross) ** 2
    coh = np.zeros(d * d, dtype=complex)
    coh[0] = slow
    for k in range(1, d):
        coh[k * d + k] = diag_amp
    rho = projector(coh) / d
    for k in range(1, d):
        rho[k * d, k * d] += leak / d
    return DensityMatrix(SystemLayout((("A", d), (label, d))), rho)


def simul_choi_result_analytic(t: float, d: int = 2) -> DensityMatrix:
    """Closed-form reference/``O_A`` state when ``S`` starts entangled with ``A``."""
    return _choi_analytic(d, t, "O_A")


def simul_choi_disturbance_analytic(t: float, d: int = 2) -> DensityMatrix:
    """Closed-form reference/``S`` state when ``S`` starts entangled with ``A``."""
    return _choi_analytic(d, t, "S")


@dataclass(frozen=True)
class SweepRecord:
    t: float
    uncertainty_bits: float
    info_gain_bits: float
    back_action_bits: float

    def row(self) -> list[str]:
        return [f"{v:.12g}" for v in (self.t, self.uncertainty_bits, self.info_gain_bits, self.back_action_bits)]


def sweep_point(t: float, d: int = 2, observer: str = "O_A") -> SweepRecord:
    rho = simul_evolve(None, t, with_ancilla=True, d=d).density()
    top = 2 * np.log2(d)
    gain = mutual_information(rho, ["A"], [observer]).value_bits
    kept = mutual_information(rho, ["A"], ["S"]).value_bits
    return SweepRecord(
        float(t),
        float(max(top - gain, 0.0)),
        float(gain),
        float(max(top - kept, 0.0)),
    )


def simul_sweep(
    t_min: float = 0.0,
    t_max: float = PERIOD,
    steps: int = 600,
    d: int = 2,
    observer: str = "O_A",
) -> list[SweepRecord]:
    """Uncertainty, information gain and back-action on a uniform time grid."""
    if steps < 2:
        raise ValueError(f"steps must be at least 2, got {steps}")
    if not t_min < t_max:
        raise ValueError(f"empty time range [{t_min}, {t_max}]")
    return [sweep_point(t, d, observer) for t in np.linspace(t_min, t_max, steps)]


def sweep_to_csv(records: Sequence[SweepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(rec.row())
    return buf.getvalue()


def sweep_from_csv(text: str) -> list[SweepRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    return [SweepRecord(*map(float, row)) for row in reader if row]


def rsp_state(pi, d: int | None = None) -> DensityMatrix:
    """State on S prepared remotely by projecting the reference onto ``pi``."""
    pi = as_matrix(pi)
    d = pi.shape[0] if d is None else d
    if pi.shape != (d, d):
        raise ValueError(f"projector shape {pi.shape} does not match d={d}")
    if not is_hermitian(pi) or np.linalg.norm(pi @ pi - pi) > 1e-10:
        raise ValueError("input is not a projector")
    if abs(np.trace(pi).real - 1) > 1e-10:
        raise ValueError("projector is not rank one")
    phi = densify(max_entangled(d)).mat
    conditioned = kron(pi, np.eye(d)) @ phi
    red = d * np.einsum("aiaj->ij", conditioned.reshape(d, d, d, d))
    return DensityMatrix(SystemLayout((("S", d),)), red)


def theorem1_check(g: MeasurementGadget) -> bool:
    """Agreement between "reference/memory state is a product" and "not a measurement"."""
    product = is_product(g.choi("result"), ["A"], ["O"])
    return product == (not is_measurement(g))
