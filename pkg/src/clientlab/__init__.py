"""Village service networks, a clientelism election game, and workfare regressions."""

from .graph import (
    NetworkParseError,
    ServiceCategory,
    ServiceEdge,
    Sphere,
    UnknownEntityError,
    VillageNetwork,
    parse_village_file,
    read_villages,
    relation_between,
    validate_network,
    write_villages,
)
from .indices import (
    LinkClass,
    PatronReport,
    classify_clients,
    classify_household,
    compute_degrees,
    compute_indices,
    concentration,
    detect_patrons,
    zscore_pool,
)
from .game import (
    GameParams,
    StrategyProfile,
    brute_force_equilibria,
    check_restrictions,
    comparative_statics,
    construct_benchmark,
    construct_clientelism_equilibrium,
    equilibrium_to_network,
    partition_sets,
    verify_spne,
)
from .regression import (
    Dataset,
    ModelSpec,
    RankDeficiencyError,
    build_model_suite,
    ols_cluster_fit,
    truncate_days,
    within_demean,
)
from .survey import Effects, simulate_survey

__version__ = "0.1.0"
