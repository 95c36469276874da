"""scikit-learn style wrappers around measurement gadgets.

``MeasurementTransformer`` treats a gadget as a transformer over batches of
density matrices: ``fit`` builds the gadget and records its figures of
merit, ``transform`` pushes each input state through the result (or
disturbance) channel, and ``predict_proba`` reads off the memory's
populations in its computational basis.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import gadgets
from .metrics import back_action, uncertainty
from .states import HERMITIAN_TOL, PSD_FLOOR, TRACE_TOL


def check_density_batch(X, dim: int | None = None) -> np.ndarray:
    """Validate a batch of density matrices and return it as ``(n, d, d)`` complex.

    Accepts ``(n, d, d)`` stacks, a single ``(d, d)`` matrix, or flattened
    ``(n, d*d)`` rows.
    """
    X = np.asarray(X, dtype=complex)
    if X.ndim == 2 and X.shape[0] == X.shape[1] and (dim is None or X.shape[0] == dim):
        X = X[None]
    elif X.ndim == 2:
        d = int(round(np.sqrt(X.shape[1])))
        if d * d != X.shape[1]:
            raise ValueError(f"cannot reshape rows of length {X.shape[1]} into square matrices")
        X = X.reshape(X.shape[0], d, d)
    if X.ndim != 3 or X.shape[1] != X.shape[2]:
        raise ValueError(f"expected a batch of square matrices, got shape {X.shape}")
    if dim is not None and X.shape[1] != dim:
        raise ValueError(f"expected {dim}x{dim} matrices, got {X.shape[1]}x{X.shape[2]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("input contains NaN or Inf")
    herm = np.linalg.norm(X - np.conj(np.swapaxes(X, 1, 2)), axis=(1, 2))
    if np.any(herm > HERMITIAN_TOL):
        raise ValueError(f"non-Hermitian input (max residual {herm.max():.3e})")
    tr = np.abs(np.trace(X, axis1=1, axis2=2) - 1)
    if np.any(tr > TRACE_TOL):
        raise ValueError(f"input trace differs from 1 by up to {tr.max():.3e}")
    lows = np.linalg.eigvalsh(X)[:, 0]
    if np.any(lows < PSD_FLOOR):
        raise ValueError(f"input has negative eigenvalue {lows.min():.3e}")
    return X


class MeasurementTransformer(TransformerMixin, BaseEstimator):
    """Apply a named measurement gadget to batches of system states.

    Parameters
    ----------
    gadget : str
        One of ``von_neumann``, ``swap``, ``dephased_swap``, ``identity``
        or ``partial_swap``.
    dim : int
        System dimension.
    t : float
        Interaction time, only used by ``partial_swap``.
    channel : str
        ``"result"`` maps to memory states, ``"disturbance"`` to
        post-measurement system states.
    """

    def __init__(self, gadget="von_neumann", dim=2, t=np.pi / 2, channel="result"):
        self.gadget = gadget
        self.dim = dim
        self.t = t
        self.channel = channel

    def _build(self):
        if self.gadget == "partial_swap":
            return gadgets.make_partial_swap(self.dim, self.t)
        return gadgets.build(self.gadget, self.dim)

    def fit(self, X=None, y=None):
        if self.channel not in ("result", "disturbance"):
            raise ValueError(f"channel must be 'result' or 'disturbance', got {self.channel!r}")
        if X is not None:
            check_density_batch(X, self.dim)
        g = self._build()
        self.gadget_ = g
        self.uncertainty_bits_ = uncertainty(g).value_bits
        self.back_action_bits_ = back_action(g).value_bits
        self.is_measurement_ = gadgets.is_measurement(g)
        self.n_features_in_ = self.dim * self.dim
        return self

    def transform(self, X):
        check_is_fitted(self, "gadget_")
        X = check_density_batch(X, self.dim)
        cmap = self.gadget_.result_map if self.channel == "result" else self.gadget_.disturbance_map
        return np.stack([cmap(x) for x in X])

    def predict_proba(self, X):
        """Populations of the output in its computational basis."""
        out = self.transform(X)
        return np.real(np.diagonal(out, axis1=1, axis2=2)).copy()

    def report(self):
        check_is_fitted(self, "gadget_")
        return gadgets.report(self.gadget_)
