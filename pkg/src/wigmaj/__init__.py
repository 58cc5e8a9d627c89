"""Continuous majorization of phase-space (Wigner) distributions."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapacityError,
    CertificationError,
    ContractError,
    DomainError,
    NormalizationError,
    RepresentationError,
    SamplingBudgetError,
    WigmajError,
)
from .states import (  # noqa: E402
    FockMixture,
    GaussianComponent,
    GridWigner,
    RadialWigner,
    vacuum_wigner,
    wigner_of_mixture,
)
from .rearrangement import ClosedForm, Sampled, cumulative_integral, radial_reduce  # noqa: E402
from .majorization import Outcome, compare, compare_plus, discrete_oracle  # noqa: E402
from .entropics import renyi_entropy, shannon_entropy, wigner_entropy  # noqa: E402
