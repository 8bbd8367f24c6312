"""besovlab: discrete smoothness-space norms on dyadic grids and the
truncation/composition experiments they support."""

__version__ = "0.1.0"

from .grid import CorpusSpec, GridError, GridFunction, generate_corpus, lp_norm, sample
from .spaces import (
    CompositionVerdict,
    ScalerMeta,
    SpaceError,
    SpaceParams,
    TruncationVerdict,
    composition_verdict,
    norm_window_flags,
    sigma,
    sigma_pq,
    sigma_r,
    truncation_verdict,
)

__all__ = [
    "__version__",
    "CorpusSpec",
    "GridError",
    "GridFunction",
    "generate_corpus",
    "lp_norm",
    "sample",
    "CompositionVerdict",
    "ScalerMeta",
    "SpaceError",
    "SpaceParams",
    "TruncationVerdict",
    "composition_verdict",
    "norm_window_flags",
    "sigma",
    "sigma_pq",
    "sigma_r",
    "truncation_verdict",
]
