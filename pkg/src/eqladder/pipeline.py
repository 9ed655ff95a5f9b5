"""Per-sequence orchestration: interpolate, extract fronts, build ladders."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

from .ingest import Corpus
from .interp import DEFAULT_STEP, ResolutionCurve, sample_sequence
from .ladder import Ladder, LadderConfig, Method, build_ladder
from .pareto import CompositionHistogram, Domain, ParetoFront, extract_front, front_composition


@dataclass(frozen=True)
class SequenceResult:
    sequence_id: str
    curves: tuple[ResolutionCurve, ...]
    fronts: dict[Domain, ParetoFront]
    composition: dict[Domain, CompositionHistogram]
    ladders: dict[tuple[Method, Domain], Ladder]


def process_sequence(corpus: Corpus, sequence_id, step=DEFAULT_STEP, space="linear",
                     config: LadderConfig | None = None) -> SequenceResult:
    config = LadderConfig() if config is None else config
    curves = tuple(sample_sequence(corpus, sequence_id, step=step, space=space))
    fronts = {d: extract_front(curves, d) for d in Domain}
    return SequenceResult(
        sequence_id=sequence_id,
        curves=curves,
        fronts=fronts,
        composition={d: front_composition(f) for d, f in fronts.items()},
        ladders={(m, d): build_ladder(fronts[d], m, config) for m in Method for d in Domain},
    )


def run_pipeline(corpus: Corpus, step=DEFAULT_STEP, space="linear",
                 config: LadderConfig | None = None, jobs=1) -> list[SequenceResult]:
    """Process every sequence; results come back in sequence-id order."""
    work = partial(process_sequence, corpus, step=step, space=space, config=config)
    ids = list(corpus.sequences)
    if jobs is None or jobs <= 1 or len(ids) < 2:
        return [work(sid) for sid in ids]
    with ProcessPoolExecutor(max_workers=min(jobs, len(ids))) as pool:
        return list(pool.map(work, ids))


def group_ladders(results):
    """Ladders keyed by (method, domain) then sequence id."""
    out: dict = {}
    for res in results:
        for key, lad in res.ladders.items():
            out.setdefault(key, {})[res.sequence_id] = lad
    return out
