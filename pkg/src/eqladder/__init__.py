"""Bitrate ladders from rate-quality and energy-quality Pareto fronts."""

__version__ = "0.1.0"

from .estimator import AkimaInterpolator, LadderBuilder, ParetoFrontSelector
from .evaluation import (
    CorpusEval,
    MeanLadder,
    RelativeDiff,
    corpus_eval,
    mean_ladder,
    relative_diff,
)
from .ingest import Corpus, MeasurementPoint, corpus_summary, dump_corpus, load_corpus
from .interp import AkimaSpline, ResolutionCurve, SampledPoint, akima_spline, sample_curves
from .ladder import (
    Ladder,
    LadderConfig,
    LadderRung,
    Method,
    ladder_to_domain,
    quality_driven_ladder,
    rate_driven_ladder,
)
from .pareto import (
    CompositionHistogram,
    Domain,
    ParetoFront,
    extract_front,
    front_composition,
    project_front,
)
from .synth import SynthSpec, make_synthetic_corpus

__all__ = [
    "AkimaInterpolator",
    "AkimaSpline",
    "CompositionHistogram",
    "Corpus",
    "CorpusEval",
    "Domain",
    "Ladder",
    "LadderBuilder",
    "LadderConfig",
    "LadderRung",
    "MeanLadder",
    "MeasurementPoint",
    "Method",
    "ParetoFront",
    "ParetoFrontSelector",
    "RelativeDiff",
    "ResolutionCurve",
    "SampledPoint",
    "SynthSpec",
    "akima_spline",
    "corpus_eval",
    "corpus_summary",
    "dump_corpus",
    "extract_front",
    "front_composition",
    "ladder_to_domain",
    "load_corpus",
    "make_synthetic_corpus",
    "mean_ladder",
    "project_front",
    "quality_driven_ladder",
    "rate_driven_ladder",
    "relative_diff",
    "sample_curves",
]
