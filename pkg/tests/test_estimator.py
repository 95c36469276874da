import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from quagent.estimator import MeasurementTransformer, check_density_batch
from quagent.states import random_density


def batch(d, n, seed=0):
    return np.stack([random_density(d, seed + i).mat for i in range(n)])


def test_params_round_trip():
    est = MeasurementTransformer(gadget="swap", dim=3)
    assert est.get_params() == {"gadget": "swap", "dim": 3, "t": pytest.approx(np.pi / 2), "channel": "result"}
    twin = clone(est).set_params(channel="disturbance")
    assert twin.channel == "disturbance" and est.channel == "result"
    assert not hasattr(clone(est.fit()), "gadget_")


def test_fit_attributes():
    est = MeasurementTransformer(dim=3).fit()
    assert est.uncertainty_bits_ == pytest.approx(np.log2(3), abs=1e-9)
    assert est.back_action_bits_ == pytest.approx(np.log2(3), abs=1e-9)
    assert est.is_measurement_ and est.n_features_in_ == 9
    assert est.report().repeatable is True


def test_unfitted():
    with pytest.raises(NotFittedError):
        MeasurementTransformer().transform(batch(2, 1))


def test_born_rule_probabilities():
    X = batch(3, 5)
    p = MeasurementTransformer(dim=3).fit(X).predict_proba(X)
    np.testing.assert_allclose(p, np.real(np.diagonal(X, axis1=1, axis2=2)), atol=1e-12)
    np.testing.assert_allclose(p.sum(axis=1), 1, atol=1e-12)


def test_swap_transfers_state():
    X = batch(2, 4, seed=10)
    out = MeasurementTransformer(gadget="swap").fit_transform(X)
    np.testing.assert_allclose(out, X, atol=1e-12)
    dist = MeasurementTransformer(gadget="swap", channel="disturbance").fit_transform(X)
    np.testing.assert_allclose(dist, np.broadcast_to(np.diag([1, 0]), X.shape), atol=1e-12)


def test_partial_swap_uses_t():
    est = MeasurementTransformer(gadget="partial_swap", t=np.pi / 4).fit()
    assert est.uncertainty_bits_ == pytest.approx(1.0, abs=1e-9)


def test_identity_not_measurement():
    est = MeasurementTransformer(gadget="identity").fit()
    assert not est.is_measurement_ and est.report().repeatable is None


def test_pipeline_flattened_rows():
    X = batch(2, 3).reshape(3, 4)
    out = make_pipeline(MeasurementTransformer(gadget="dephased_swap")).fit_transform(X)
    assert out.shape == (3, 2, 2)


@pytest.mark.parametrize(
    "bad",
    [
        np.array([[[1, 1], [0, 0]]]),  # not Hermitian
        np.array([[[2, 0], [0, 0]]]),  # trace 2
        np.array([[[1.5, 0], [0, -0.5]]]),  # negative
        np.array([[[np.nan, 0], [0, 1]]]),
        np.zeros((2, 5)),
    ],
)
def test_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        check_density_batch(bad)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        MeasurementTransformer(dim=3).fit(batch(2, 2))


def test_bad_channel_and_gadget():
    with pytest.raises(ValueError):
        MeasurementTransformer(channel="both").fit()
    with pytest.raises(KeyError):
        MeasurementTransformer(gadget="abacus").fit()
