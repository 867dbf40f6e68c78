"""Border-peeling clustering.

Iteratively peels low-influence border points inward, associates each peeled
point with a nearby survivor, merges the remaining core points by mutual
reachability, and propagates labels back out along the association links.
Points whose chains never reach a surviving core are reported as noise (-1).
"""

from ._core import (
    NOISE,
    PeelParams,
    __version__,
    adjusted_mutual_information,
    adjusted_rand_index,
    cluster,
    estimate_lambda,
    gaussian_mixture,
    lemma1_expectation,
    load_csv,
    uniform_interval,
    validate_lemma,
)

__all__ = [
    "NOISE",
    "PeelParams",
    "__version__",
    "adjusted_mutual_information",
    "adjusted_rand_index",
    "cluster",
    "estimate_lambda",
    "gaussian_mixture",
    "lemma1_expectation",
    "load_csv",
    "uniform_interval",
    "validate_lemma",
]
