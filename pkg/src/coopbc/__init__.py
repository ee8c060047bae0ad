"""Rate regions of degraded state-dependent broadcast channels with cooperating decoders."""

from .channel import (
    AuxScheme,
    BinarySymmetricBC,
    ChannelSpec,
    assemble_joint,
    degrade_param,
    to_channel_spec,
    validate_degraded,
)
from .polyhedra import (
    HalfspaceSystem,
    LinExpr,
    RateRegion2D,
    contains,
    convex_union,
    fourier_motzkin,
    vertices_2d,
)
from .prob import (
    Alphabet,
    ConditionalPmf,
    JointPmf,
    Pmf,
    binary_convolve,
    binary_entropy,
    entropy,
    mutual_information,
    verify_markov,
)
from .regions import (
    RegionEvaluation,
    RegionKind,
    binary_symmetric_region,
    check_superposition_identity,
    evaluate_region,
)

__version__ = "0.1.0"
