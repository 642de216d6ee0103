"""Twin fringe subtrees in uniformly random rooted Cayley trees."""
from .errors import ConvergenceError, DomainError
from .profiles import (
    DegreeProfile,
    count_profiles,
    count_trees_with_profile,
    enumerate_profiles,
    expected_twin_pairs,
    host_pair_count,
    twin_profile_count_direct,
    twin_profile_count_series,
)

__version__ = "0.1.0"
