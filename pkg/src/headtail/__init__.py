"""Small-space estimation of degree distributions from edge streams."""

__version__ = "0.1.0"

from .histogram import Ccdh, DegreeHistogram, dh_to_ccdh, ccdh_to_dh, exact_dh
from .tgmath import TruncGeomParams, loss_correction, tg_cdf, tg_expectation, tg_pdf
from .sketch import EstimateConfig, EstimateResult, HeadTailSketch, ThresholdWarning
from .rh import delta_profile, is_close, ks_statistic, rh_distance
from .baselines import Frequent, LossyCounting, SpaceSaving, head_estimate, hybrid_estimate
from .stream import EdgeStream, SyntheticSpec, generate, parse_edgelist, reorder

__all__ = [
    "Ccdh",
    "DegreeHistogram",
    "dh_to_ccdh",
    "ccdh_to_dh",
    "exact_dh",
    "TruncGeomParams",
    "loss_correction",
    "tg_cdf",
    "tg_expectation",
    "tg_pdf",
    "EstimateConfig",
    "EstimateResult",
    "HeadTailSketch",
    "ThresholdWarning",
    "delta_profile",
    "is_close",
    "ks_statistic",
    "rh_distance",
    "Frequent",
    "LossyCounting",
    "SpaceSaving",
    "head_estimate",
    "hybrid_estimate",
    "EdgeStream",
    "SyntheticSpec",
    "generate",
    "parse_edgelist",
    "reorder",
]
