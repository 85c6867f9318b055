"""Interval reachability of feedforward neural networks by mixed monotonicity."""

from .activations import (
    ActivationSpec,
    PiecewiseMonotoneDescriptor,
    builtin,
    get_activation,
    local_bounds,
    register,
)
from .errors import (
    DerivativeMismatch,
    DimensionMismatch,
    EmptyIntersection,
    MissingPairs,
    ReachError,
    SchemaError,
    ShapeMismatch,
    ShapeViolation,
    UnknownActivation,
)
from .interval import (
    Interval,
    IntervalMatrix,
    IntervalVector,
    iv_affine_image,
    iv_intersect,
    iv_matmul,
    iv_row_scale,
    iv_width_2norm,
)
from .network import (
    Layer,
    Network,
    RandomNetConfig,
    parse_network,
    random_input_box,
    random_network,
    serialize_network,
)
from .reach import ReachResult, jacobian_update, mm_bound, reach, reach_ibp, reach_mm

__version__ = "0.1.0"
