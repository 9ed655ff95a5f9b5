"""Rate-quality and energy-quality Pareto fronts over pooled resolutions."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import EmptyFront, EmptyInput, MixedSequences
from .interp import ResolutionCurve, SampledPoint


class Domain(str, enum.Enum):
    """Cost axis of a two-axis space; quality (VMAF) is always the other axis."""

    RQ = "RQ"
    EQ = "EQ"

    @property
    def cost_attr(self):
        return "bitrate" if self is Domain.RQ else "decode_energy"

    @property
    def cost_label(self):
        return "bitrate_kbps" if self is Domain.RQ else "decode_energy_j"

    def cost(self, point):
        return getattr(point, self.cost_attr)

    def pair(self, point):
        return (getattr(point, self.cost_attr), point.quality)

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown domain {value!r}; expected 'RQ' or 'EQ'") from None


@dataclass(frozen=True)
class ParetoFront:
    sequence_id: str
    domain: Domain
    points: tuple[SampledPoint, ...]

    def __len__(self):
        return len(self.points)

    def pairs(self, domain=None):
        dom = self.domain if domain is None else Domain.parse(domain)
        return [dom.pair(p) for p in self.points]


@dataclass(frozen=True)
class CompositionHistogram:
    domain: Domain
    share: dict[int, float]


def pareto_mask(cost, quality, resolution=None, crf=None):
    """Boolean mask of the non-dominated rows, minimising cost and maximising quality.

    Rows are swept in order of ascending cost, descending quality, then
    ascending resolution and CRF; a row survives only if its quality beats
    everything seen before it. Exact duplicates in (cost, quality) therefore
    keep the lowest resolution, then lowest CRF.
    """
    cost = np.asarray(cost, dtype=float)
    quality = np.asarray(quality, dtype=float)
    n = cost.size
    resolution = np.zeros(n) if resolution is None else np.asarray(resolution, dtype=float)
    crf = np.zeros(n) if crf is None else np.asarray(crf, dtype=float)
    if n == 0:
        return np.zeros(0, dtype=bool)
    order = np.lexsort((crf, resolution, -quality, cost))
    q = quality[order]
    best_before = np.empty(n)
    best_before[0] = -np.inf
    np.maximum.accumulate(q[:-1], out=best_before[1:])
    mask = np.zeros(n, dtype=bool)
    mask[order[q > best_before]] = True
    return mask


def _sort_key(domain):
    def key(p):
        return (domain.cost(p), -p.quality, p.resolution_height, p.crf)

    return key


def front_from_points(points: Sequence[SampledPoint], domain, sequence_id="") -> ParetoFront:
    """Pareto front of an arbitrary pool of sampled points."""
    domain = Domain.parse(domain)
    points = list(points)
    if not points:
        raise EmptyInput("no candidate points to build a front from")
    mask = pareto_mask(
        [domain.cost(p) for p in points],
        [p.quality for p in points],
        [p.resolution_height for p in points],
        [p.crf for p in points],
    )
    kept = sorted((p for p, m in zip(points, mask) if m), key=_sort_key(domain))
    return ParetoFront(sequence_id=sequence_id, domain=domain, points=tuple(kept))


def extract_front(curves: Iterable[ResolutionCurve], domain) -> ParetoFront:
    """Pool every curve's samples and keep the non-dominated ones for ``domain``."""
    curves = list(curves)
    ids = {c.sequence_id for c in curves}
    if len(ids) > 1:
        raise MixedSequences(f"curves span several sequences: {sorted(ids)}")
    pool = [s for c in curves for s in c.samples]
    if not pool:
        raise EmptyInput("no samples to build a front from")
    return front_from_points(pool, domain, sequence_id=ids.pop())


def front_composition(front: ParetoFront) -> CompositionHistogram:
    if not front.points:
        raise EmptyFront(f"front of {front.sequence_id!r} is empty")
    counts: dict[int, int] = {}
    for p in front.points:
        counts[p.resolution_height] = counts.get(p.resolution_height, 0) + 1
    total = len(front.points)
    share = {h: counts[h] / total for h in sorted(counts, reverse=True)}
    return CompositionHistogram(domain=front.domain, share=share)


def mean_composition(histograms: Iterable[CompositionHistogram], resolutions=None):
    """Average per-resolution share over many fronts (absent resolutions count as 0)."""
    histograms = list(histograms)
    if not histograms:
        raise EmptyInput("no histograms to average")
    heights = set(resolutions or ())
    for h in histograms:
        heights.update(h.share)
    return {
        r: float(np.mean([h.share.get(r, 0.0) for h in histograms]))
        for r in sorted(heights, reverse=True)
    }


def project_front(front: ParetoFront, target) -> list[SampledPoint]:
    """Front points in source order, to be read on ``target``'s axes.

    The points themselves carry every axis; what changes is which one is
    treated as cost. The result is usually not monotone in the target domain.
    """
    Domain.parse(target)
    return list(front.points)


def projected_pairs(front: ParetoFront, target):
    target = Domain.parse(target)
    return [target.pair(p) for p in project_front(front, target)]


def is_monotone(pairs):
    """True when cost and quality both increase strictly along ``pairs``."""
    return all(c1 > c0 and q1 > q0 for (c0, q0), (c1, q1) in zip(pairs, pairs[1:]))


def front_rows(front: ParetoFront):
    for p in front.points:
        yield {
            "sequence_id": front.sequence_id,
            "domain": front.domain.value,
            "resolution_height": p.resolution_height,
            "crf": p.crf,
            "bitrate_kbps": p.bitrate,
            "vmaf": p.quality,
            "decode_energy_j": p.decode_energy,
        }
