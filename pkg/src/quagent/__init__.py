"""Quantum observers as quantum systems: measurement gadgets and their information costs."""

from .gadgets import (
    GadgetReport,
    MeasurementGadget,
    apply,
    disturbance_channel,
    is_measurement,
    is_repeatable,
    make_dephased_swap,
    make_identity,
    make_partial_swap,
    make_swap,
    make_von_neumann,
    report,
    result_channel,
)
from .metrics import (
    MetricResult,
    back_action,
    heisenberg_limit,
    is_maximally_disturbing,
    is_maximally_informative,
    mutual_information,
    uncertainty,
)
from .states import (
    DensityMatrix,
    PureState,
    SystemLayout,
    densify,
    max_entangled,
    random_density,
    random_pure,
    validate,
)

__version__ = "0.1.0"
