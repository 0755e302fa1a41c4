"""Combinatorial agent-configuration engine with a seeded cafe simulator.

Subpackages: space (counting/enumeration), constraints (filtering),
coherence (cover/gluing checks), sim (Monte Carlo engine), stats
(descriptive/OLS/spline), io (CSV, manifests, plot data), cli.
"""

__version__ = "1.0.0"

from .space import (  # noqa: F401
    AgentConfig,
    Dimension,
    PartialAssignment,
    SparkSpace,
    build_space,
    enumerate_configs,
    load_space,
    multi_agent_count,
    possibility_count,
    subset_count,
)
from .constraints import (  # noqa: F401
    ConstraintSet,
    ValidationReport,
    count_valid,
    filter_space,
    parse_constraints,
    validate_config,
)
from .coherence import (  # noqa: F401
    Cover,
    LocalSection,
    SiteObject,
    TraitMap,
    check_compatibility,
    check_cover,
    glue,
    translate,
)
from .sim import (  # noqa: F401
    Scenario,
    SimRecord,
    TierSpec,
    default_scenario,
    load_scenario,
    run,
    simulate_iteration,
)
from .stats import (  # noqa: F401
    BasisMatrix,
    DescriptiveStats,
    Diagnostics,
    RegressionFit,
    bspline_basis,
    descriptive,
    diagnostics,
    ols,
    spline_fit,
)
