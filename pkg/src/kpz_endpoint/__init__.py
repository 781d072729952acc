"""Endpoint distribution of 1+1 dimensional directed polymers.

Computes the joint density of the location and value of the maximum of the
Airy2 process minus a parabola from Fredholm determinants, the marginal
endpoint density, and a last passage percolation Monte-Carlo comparison.
"""

__version__ = "0.1.0"

from .density import (  # noqa: E402
    EndpointTable,
    JointDensityTable,
    NumericsConfig,
    cdf_max,
    endpoint_density,
    endpoint_table,
    f_goe,
    gamma,
    joint_density,
    joint_table,
    psi,
)
from .specfun import AiryValue, airy  # noqa: E402
from .stats import moments, tail_fit  # noqa: E402

__all__ = [
    "AiryValue",
    "EndpointTable",
    "JointDensityTable",
    "NumericsConfig",
    "airy",
    "cdf_max",
    "endpoint_density",
    "endpoint_table",
    "f_goe",
    "gamma",
    "joint_density",
    "joint_table",
    "moments",
    "psi",
    "tail_fit",
]
