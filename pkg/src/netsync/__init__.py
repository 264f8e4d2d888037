"""Performance limits for cooperative clock synchronization in wireless networks.

The package builds Fisher information matrices for two-way timing networks,
computes absolute and relative synchronization error bounds, evaluates the
cooperative dilution intensity (CDI) by exact linear algebra, truncated
series, and absorbing random walks, and ships an experiment harness that
reproduces the scaling-law and asymptotic-CDI trends of large random
networks.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    RsebResult,
    SkewBoundResult,
    aseb_direct,
    aseb_via_cdi,
    bound_report,
    check_node_equivalence,
    rseb_pseudo,
    rseb_via_relative_cdi,
    rseb_via_z,
    skewed_bound_expectation,
    uniform_skew_sampler,
)
from .cdi import (
    CdiReport,
    StochasticCdiResult,
    cdi_exact,
    cdi_random_walk,
    cdi_series,
    expected_cdi_stochastic,
    rel_cdi_abel,
    rel_cdi_exact,
)
from .errors import DegenerateNodeError, SynchronizabilityError
from .fim import (
    FimMatrix,
    SkewSpec,
    TransitionMatrix,
    apply_skew,
    build_absolute_fim,
    build_extended_fim,
    build_relative_fim,
    build_transition_matrix,
)
from .lattice import (
    LatticeCdiResult,
    LatticeKernel,
    infinite_lattice_cdi_asymptotic,
    infinite_lattice_cdi_numerical,
    lattice_return_probability,
)
from .simulate import (
    ClockState,
    MeasurementSet,
    draw_clock_state,
    map_estimate,
    map_mse_study,
    relative_estimate,
    relative_mse_study,
    simulate_measurements,
)
from .topology import (
    BernoulliPriors,
    LinkModel,
    PriorSpec,
    RegionPriors,
    Topology,
    UniformPriors,
    assign_priors,
    gauss_circle_degree,
    gen_lattice,
    gen_scaling_family,
    gen_stochastic,
    interior_mask,
    is_connected,
    read_topology_csv,
    write_topology_csv,
)
