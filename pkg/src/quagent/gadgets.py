"""Measurement gadgets: a unitary on S, E, O together with the initial E, O state.

A gadget defines the channel ``rho_S -> U (rho_S x chi_EO) U^dagger``.
Tracing that output down to the observer memory gives the *result
channel*; tracing it down to the system gives the *disturbance channel*.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.stats import unitary_group

from .linalg import (
    DimensionError,
    as_matrix,
    basis_vector,
    cyclic_shift,
    dagger,
    embed,
    evolve,
    is_hermitian,
    kron,
    partial_trace,
    permute_factors,
    projector,
    swap_operator,
    trace_distance,
    unitarity_residual,
)
from .metrics import mutual_information
from .states import DensityMatrix, InvalidStateError, SystemLayout, validate

UNITARY_TOL = 1e-10
EQUALITY_TOL = 1e-9
MI_THRESHOLD = 1e-9

S, E, O = 0, 1, 2

# Qualitative properties with no finite decision procedure; attached per builder.
VON_NEUMANN_FLAGS = {
    "broadcastable": "yes",
    "motility": "yes",
    "reversibility": "requires environment",
}
SWAP_FLAGS = {
    "broadcastable": "no",
    "motility": "no",
    "reversibility": "yes",
}
DEPHASED_SWAP_FLAGS = {
    "broadcastable": "yes",
    "motility": "yes",
    "reversibility": "requires environment",
}


class GadgetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MeasurementGadget:
    """Unitary ``u`` on S x E x O plus the initial state ``chi`` of E x O."""

    layout: SystemLayout
    u: np.ndarray = field(repr=False)
    chi: DensityMatrix = field(repr=False)
    name: str = "custom"
    flags: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.layout.labels != ("S", "E", "O"):
            raise GadgetError(
                f"gadget layout must be (S, E, O), got {self.layout.labels}"
            )
        u = as_matrix(self.u)
        n = self.layout.total_dim
        if u.shape != (n, n):
            raise DimensionError(f"unitary shape {u.shape} does not match dimension {n}")
        res = unitarity_residual(u)
        if res > UNITARY_TOL:
            raise GadgetError(f"u is not unitary (residual {res:.3e})")
        if self.chi.layout.dims != self.layout.dims[1:]:
            raise DimensionError(
                f"chi dims {self.chi.layout.dims} do not match E, O dims "
                f"{self.layout.dims[1:]}"
            )
        rep = validate(self.chi)
        if not rep.ok:
            raise InvalidStateError("chi is not a density matrix: " + "; ".join(rep.lines()))
        u = u.copy()
        u.flags.writeable = False
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "flags", dict(self.flags))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.layout.dims

    @property
    def d_s(self) -> int:
        return self.layout.dims[S]

    @property
    def d_o(self) -> int:
        return self.layout.dims[O]

    def _joint(self, x: np.ndarray) -> np.ndarray:
        # linear in x, so also valid for non-Hermitian operators (matrix units)
        return self.u @ kron(x, self.chi.mat) @ dagger(self.u)

    def _input(self, rho) -> np.ndarray:
        m = rho.mat if isinstance(rho, DensityMatrix) else as_matrix(rho)
        if m.shape != (self.d_s, self.d_s):
            raise DimensionError(
                f"input of shape {m.shape} does not match system dimension {self.d_s}"
            )
        return m

    def joint_map(self, x) -> np.ndarray:
        return self._joint(self._input(x))

    def result_map(self, x) -> np.ndarray:
        return partial_trace(self._joint(self._input(x)), self.dims, [O])

    def disturbance_map(self, x) -> np.ndarray:
        return partial_trace(self._joint(self._input(x)), self.dims, [S])

    def choi(self, channel: str = "result") -> DensityMatrix:
        """Reference-plus-output state ``(1_A x C)[|Phi+><Phi+|]``.

        ``channel`` selects the result channel (output on O) or the
        disturbance channel (output on S).
        """
        if channel == "result":
            cmap, label, d_out = self.result_map, "O", self.d_o
        elif channel == "disturbance":
            cmap, label, d_out = self.disturbance_map, "S", self.d_s
        else:
            raise ValueError(f"unknown channel {channel!r}")
        d = self.d_s
        tau = np.zeros((d * d_out, d * d_out), dtype=complex)
        for j in range(d):
            for k in range(d):
                unit = np.zeros((d, d), dtype=complex)
                unit[j, k] = 1.0
                tau += kron(unit, cmap(unit)) / d
        return DensityMatrix(SystemLayout((("A", d), (label, d_out))), tau)

    def with_phase(self, theta: float) -> "MeasurementGadget":
        return MeasurementGadget(
            self.layout, np.exp(1j * theta) * self.u, self.chi, self.name, self.flags
        )


@dataclass(frozen=True)
class GadgetReport:
    is_measurement: bool
    uncertainty_bits: float
    back_action_bits: float
    repeatable: bool | None
    documented_flags: dict = field(default_factory=dict)
    name: str = "custom"

    def to_dict(self) -> dict:
        return {
            "is_measurement": self.is_measurement,
            "uncertainty_bits": self.uncertainty_bits,
            "back_action_bits": self.back_action_bits,
            "repeatable": self.repeatable,
            "flags": dict(self.documented_flags),
        }


def _layout(d_s: int, d_e: int, d_o: int) -> SystemLayout:
    return SystemLayout((("S", d_s), ("E", d_e), ("O", d_o)))


def _ground(*dims: int, labels: Sequence[str] = ("E", "O")) -> DensityMatrix:
    n = int(np.prod(dims))
    return DensityMatrix(SystemLayout(tuple(zip(labels, dims))), projector(basis_vector(n, 0)))


def _as_density(m: np.ndarray, label: str) -> DensityMatrix:
    return DensityMatrix(SystemLayout(((label, m.shape[0]),)), m)


def apply(g: MeasurementGadget, rho_s) -> DensityMatrix:
    """Joint S, E, O state after the gadget acts on ``rho_s``."""
    return DensityMatrix(g.layout, g.joint_map(rho_s))


def result_channel(g: MeasurementGadget, rho_s) -> DensityMatrix:
    return _as_density(g.result_map(rho_s), "O")


def disturbance_channel(g: MeasurementGadget, rho_s) -> DensityMatrix:
    return _as_density(g.disturbance_map(rho_s), "S")


def probe_states(d: int) -> list[np.ndarray]:
    """``d**2`` pure states whose projectors span the operator space.

    Basis projectors ``|j><j|`` plus, for each pair ``j < k``, the states
    ``(|j> + |k>)/sqrt2`` and ``(|j> + i|k>)/sqrt2``.
    """
    probes = [projector(basis_vector(d, j)) for j in range(d)]
    for j, k in combinations(range(d), 2):
        for phase in (1.0, 1j):
            v = (basis_vector(d, j) + phase * basis_vector(d, k)) / np.sqrt(2)
            probes.append(projector(v))
    return probes


def _all_equal(outputs: Sequence[np.ndarray], tol: float = EQUALITY_TOL) -> bool:
    return all(trace_distance(a, b) <= tol for a, b in combinations(outputs, 2))


def _check_projectors(projectors: Sequence[np.ndarray], tol: float = 1e-10) -> None:
    d = projectors[0].shape[0]
    total = np.zeros((d, d), dtype=complex)
    for p in projectors:
        if p.shape != (d, d):
            raise GadgetError("projectors must share one dimension")
        if not is_hermitian(p, tol):
            raise GadgetError("projector is not Hermitian")
        if np.linalg.norm(p @ p - p) > tol:
            raise GadgetError("projector is not idempotent")
        total += p
    for a, b in combinations(projectors, 2):
        if np.linalg.norm(a @ b) > tol:
            raise GadgetError("projectors are not mutually orthogonal")
    if np.linalg.norm(total - np.eye(d)) > tol:
        raise GadgetError("projectors do not sum to the identity")


def make_von_neumann(projectors: Sequence) -> MeasurementGadget:
    """Two-stage von Neumann measurement of the projective measurement ``{A_k}``.

    The environment records ``k`` by a controlled cyclic shift from S,
    then the memory copies it from E. Both E and O have one level per
    projector and start in ``|0>``.
    """
    projectors = [as_matrix(p) for p in projectors]
    if not projectors:
        raise GadgetError("need at least one projector")
    _check_projectors(projectors)
    d = projectors[0].shape[0]
    n = len(projectors)
    w_se = sum(kron(a, cyclic_shift(n, k)) for k, a in enumerate(projectors))
    v_eo = sum(
        kron(projector(basis_vector(n, k)), cyclic_shift(n, k)) for k in range(n)
    )
    u = kron(np.eye(d), v_eo) @ kron(w_se, np.eye(n))
    return MeasurementGadget(
        _layout(d, n, n), u, _ground(n, n), "von_neumann", VON_NEUMANN_FLAGS
    )


def computational_projectors(d: int) -> list[np.ndarray]:
    return [projector(basis_vector(d, k)) for k in range(d)]


def make_swap(d: int) -> MeasurementGadget:
    """Full SWAP between system and memory; trivial environment."""
    if d < 2:
        raise GadgetError(f"dimension must be at least 2, got {d}")
    return MeasurementGadget(
        _layout(d, 1, d), swap_operator(d), _ground(1, d), "swap", SWAP_FLAGS
    )


def make_partial_swap(d: int, t: float) -> MeasurementGadget:
    """``exp(-i SWAP t)`` between system and memory; a full swap at ``t = pi/2``."""
    if d < 2:
        raise GadgetError(f"dimension must be at least 2, got {d}")
    u = evolve(swap_operator(d), t)
    return MeasurementGadget(_layout(d, 1, d), u, _ground(1, d), "partial_swap", SWAP_FLAGS)


def make_dephased_swap(d: int) -> MeasurementGadget:
    """SWAP into memory followed by a controlled shift that copies O into E."""
    if d < 2:
        raise GadgetError(f"dimension must be at least 2, got {d}")
    dims = [d, d, d]
    swap_so = embed(swap_operator(d), dims, [S, O])
    cshift = sum(
        kron(projector(basis_vector(d, k)), cyclic_shift(d, k)) for k in range(d)
    )
    # cshift is ordered (control O, target E)
    cshift_oe = embed(cshift, dims, [O, E])
    u = cshift_oe @ swap_so
    return MeasurementGadget(
        _layout(d, d, d), u, _ground(d, d), "dephased_swap", DEPHASED_SWAP_FLAGS
    )


def make_identity(d: int, d_o: int | None = None) -> MeasurementGadget:
    d_o = d if d_o is None else d_o
    return MeasurementGadget(
        _layout(d, 1, d_o), np.eye(d * d_o), _ground(1, d_o), "identity", {}
    )


def make_product(u_se, u_o, chi: DensityMatrix, d_s: int) -> MeasurementGadget:
    """Gadget with ``U = U_SE x U_O``; never a measurement."""
    u_se, u_o = as_matrix(u_se), as_matrix(u_o)
    d_e = u_se.shape[0] // d_s
    return MeasurementGadget(
        _layout(d_s, d_e, u_o.shape[0]), kron(u_se, u_o), chi, "product", {}
    )


BUILDERS = ("von_neumann", "swap", "dephased_swap", "identity")


def build(name: str, d: int) -> MeasurementGadget:
    """Named builder lookup used by the CLI and the estimator wrapper."""
    if name == "von_neumann":
        return make_von_neumann(computational_projectors(d))
    if name == "swap":
        return make_swap(d)
    if name == "dephased_swap":
        return make_dephased_swap(d)
    if name == "identity":
        return make_identity(d)
    raise KeyError(f"unknown gadget {name!r}; choose from {', '.join(BUILDERS)}")


def _kraus_dilation(kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Unitary ``W`` on ``X x F`` with ``W |x>|0> = sum_j K_j |x> |j>``."""
    kraus = [as_matrix(k) for k in kraus]
    d, r = kraus[0].shape[1], len(kraus)
    iso = np.zeros((d * r, d), dtype=complex)
    for j, k in enumerate(kraus):
        iso[j::r, :] = k
    if np.linalg.norm(dagger(iso) @ iso - np.eye(d)) > 1e-10:
        raise GadgetError("Kraus operators are not trace preserving")
    w = np.zeros((d * r, d * r), dtype=complex)
    fixed = [x * r for x in range(d)]
    w[:, fixed] = iso
    free = [c for c in range(d * r) if c not in fixed]
    if free:
        w[:, free] = null_space(dagger(iso))
    return w


def _compose(g: MeasurementGadget, kraus, target: int, name: str) -> MeasurementGadget:
    r = len(kraus)
    d_s, d_e, d_o = g.dims
    dims4 = [d_s, d_e, r, d_o]  # S, E, F, O
    u4 = embed(g.u, dims4, [0, 1, 3])
    w = embed(_kraus_dilation(kraus), dims4, [3 if target == O else 0, 2])
    chi = permute_factors(
        kron(g.chi.mat, projector(basis_vector(r, 0))), [d_e, d_o, r], [0, 2, 1]
    )
    # merge E and F into a single environment factor
    chi_dm = DensityMatrix(SystemLayout((("E", d_e * r), ("O", d_o))), chi)
    return MeasurementGadget(_layout(d_s, d_e * r, d_o), w @ u4, chi_dm, name, g.flags)


def compose_observer(g: MeasurementGadget, kraus: Sequence) -> MeasurementGadget:
    """Follow ``g`` with a local channel on the memory, given by Kraus operators."""
    return _compose(g, kraus, O, g.name + "+C_O")


def compose_system(g: MeasurementGadget, kraus: Sequence) -> MeasurementGadget:
    """Follow ``g`` with a local channel on the system, given by Kraus operators."""
    return _compose(g, kraus, S, g.name + "+C_S")


def random_channel(d: int, n_kraus: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Kraus operators of a channel from a Haar isometry followed by a trace-out."""
    v = unitary_group.rvs(d * n_kraus, random_state=rng)[:, :d]
    return [v[j::n_kraus, :] for j in range(n_kraus)]


def random_density_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    v = rng.standard_normal(n * n) + 1j * rng.standard_normal(n * n)
    v /= np.linalg.norm(v)
    return partial_trace(projector(v), [n, n], [0])


def random_gadget(
    d_s: int,
    d_e: int,
    d_o: int,
    rng: np.random.Generator,
    product: bool = False,
) -> MeasurementGadget:
    """Random gadget; ``product=True`` gives the ``U_SE x U_O`` non-measurement form."""
    chi = DensityMatrix(
        SystemLayout((("E", d_e), ("O", d_o))), random_density_matrix(d_e * d_o, rng)
    )
    if product:
        u_se = unitary_group.rvs(d_s * d_e, random_state=rng) if d_s * d_e > 1 else np.eye(1)
        u_o = unitary_group.rvs(d_o, random_state=rng)
        g = make_product(u_se, u_o, chi, d_s)
        return g
    u = unitary_group.rvs(d_s * d_e * d_o, random_state=rng)
    return MeasurementGadget(_layout(d_s, d_e, d_o), u, chi, "random", {})


def information_gain(g: MeasurementGadget) -> float:
    return mutual_information(g.choi("result"), ["A"], ["O"]).value_bits


def is_measurement(g: MeasurementGadget, method: str = "mutual_information") -> bool:
    """Whether the memory state depends on the system state.

    ``method="mutual_information"`` tests whether the reference and the
    memory end up correlated when the input is maximally entangled with a
    reference. ``method="probe"`` compares result-channel outputs on a
    spanning set of probe states.
    """
    if method == "mutual_information":
        return information_gain(g) > MI_THRESHOLD
    if method == "probe":
        outputs = [g.result_map(p) for p in probe_states(g.d_s)]
        return not _all_equal(outputs)
    raise ValueError(f"unknown method {method!r}")


def is_repeatable(g: MeasurementGadget) -> bool:
    """A second application of the same gadget reproduces the first result."""
    for p in probe_states(g.d_s):
        first = g.result_map(p)
        again = g.result_map(g.disturbance_map(p))
        if trace_distance(first, again) >= EQUALITY_TOL:
            return False
    return True


def report(g: MeasurementGadget) -> GadgetReport:
    from .metrics import back_action, uncertainty

    measured = is_measurement(g)
    return GadgetReport(
        is_measurement=measured,
        uncertainty_bits=uncertainty(g).value_bits,
        back_action_bits=back_action(g).value_bits,
        repeatable=is_repeatable(g) if measured else None,
        documented_flags=dict(g.flags),
        name=g.name,
    )
