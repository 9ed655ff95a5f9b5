"""Ladder comparison: mean relative differences and mean ladders."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .exceptions import EmptyInput, EmptyIntersection, MethodMismatch, NoComparableRungs
from .ladder import Ladder, Method
from .pareto import Domain

_AXES = ("bitrate", "quality", "decode_energy")


@dataclass(frozen=True)
class RelativeDiff:
    """Mean of ``(ref - prop) / ref`` over paired rungs, per axis.

    Positive values mean the proposed ladder is lower on that axis: less
    bitrate, lower quality, less energy.
    """

    delta_rate: float
    delta_quality: float
    delta_energy: float
    rungs_compared: int
    paired_indices: tuple[int, ...] = ()

    def as_tuple(self):
        return (self.delta_rate, self.delta_quality, self.delta_energy)


@dataclass(frozen=True)
class CorpusEval:
    per_sequence: dict[str, RelativeDiff]
    mean: RelativeDiff
    stddev: RelativeDiff
    excluded: tuple[str, ...] = ()
    std_convention: str = "population"


@dataclass(frozen=True)
class MeanRung:
    index: int
    target: float
    count: int
    mean: tuple[float, float, float]
    stderr: tuple[float, float, float]


@dataclass(frozen=True)
class MeanLadder:
    method: Method
    source_domain: Domain
    rungs: tuple[MeanRung, ...] = field(default_factory=tuple)

    @property
    def name(self):
        label = "Rate-driven" if self.method is Method.RATE_DRIVEN else "Quality-driven"
        return f"{label} {self.source_domain.value}-PF"


def relative_diff(reference: Ladder, proposed: Ladder) -> RelativeDiff:
    """Mean relative difference of a proposed ladder against a reference.

    Rungs are paired by index; only indices filled in both ladders count.
    """
    if reference.method is not proposed.method:
        raise MethodMismatch(
            f"cannot compare {reference.method.value} with {proposed.method.value} ladders"
        )
    if reference.config != proposed.config:
        raise MethodMismatch("ladders were built with different configurations")
    prop = {r.index: r for r in proposed.rungs if r.filled}
    pairs = [(r.chosen, prop[r.index].chosen, r.index)
             for r in reference.rungs if r.filled and r.index in prop]
    if not pairs:
        raise NoComparableRungs(
            f"{reference.sequence_id}: no rung index is filled in both ladders"
        )
    deltas = []
    for axis in _AXES:
        ref = np.array([getattr(a, axis) for a, _, _ in pairs])
        new = np.array([getattr(b, axis) for _, b, _ in pairs])
        if np.any(ref == 0):
            raise NoComparableRungs(
                f"{reference.sequence_id}: reference {axis} is zero on a paired rung"
            )
        deltas.append(float(np.mean((ref - new) / ref)))
    return RelativeDiff(
        delta_rate=deltas[0],
        delta_quality=deltas[1],
        delta_energy=deltas[2],
        rungs_compared=len(pairs),
        paired_indices=tuple(i for _, _, i in pairs),
    )


def corpus_eval(
    reference_ladders: Mapping[str, Ladder], proposed_ladders: Mapping[str, Ladder]
) -> CorpusEval:
    """Per-sequence relative differences with their mean and population std."""
    common = sorted(set(reference_ladders) & set(proposed_ladders))
    if not common:
        raise EmptyIntersection("reference and proposed ladders share no sequence")
    per_seq = {}
    excluded = []
    for sid in common:
        try:
            per_seq[sid] = relative_diff(reference_ladders[sid], proposed_ladders[sid])
        except NoComparableRungs:
            excluded.append(sid)
    if not per_seq:
        raise EmptyIntersection("no sequence has a comparable rung in both ladder sets")
    table = np.array([d.as_tuple() for d in per_seq.values()])
    counts = np.array([d.rungs_compared for d in per_seq.values()])
    mean = table.mean(axis=0)
    std = table.std(axis=0, ddof=0)
    return CorpusEval(
        per_sequence=per_seq,
        mean=RelativeDiff(*map(float, mean), rungs_compared=int(counts.sum())),
        stddev=RelativeDiff(*map(float, std), rungs_compared=int(counts.sum())),
        excluded=tuple(excluded),
    )


def mean_ladder(ladders: Sequence[Ladder]) -> MeanLadder:
    """Per-rung mean and standard error (population std / sqrt(count))."""
    ladders = list(ladders)
    if not ladders:
        raise EmptyInput("no ladders to average")
    first = ladders[0]
    for lad in ladders[1:]:
        if (lad.method, lad.source_domain, lad.config) != (
            first.method, first.source_domain, first.config
        ):
            raise MethodMismatch("mean_ladder needs ladders of one method, domain and config")
    by_index: dict[int, list] = {}
    targets = {}
    for lad in ladders:
        for r in lad.rungs:
            targets.setdefault(r.index, r.target)
            if r.filled:
                by_index.setdefault(r.index, []).append(
                    [getattr(r.chosen, axis) for axis in _AXES]
                )
    rungs = []
    for idx in sorted(by_index):
        vals = np.array(by_index[idx], dtype=float)
        n = vals.shape[0]
        # shift by the first observation so identical inputs give exactly 0 spread
        dev = vals - vals[0]
        se = dev.std(axis=0, ddof=0) / math.sqrt(n)
        rungs.append(
            MeanRung(
                index=idx,
                target=targets[idx],
                count=n,
                mean=tuple(float(v) for v in vals[0] + dev.mean(axis=0)),
                stderr=tuple(float(v) for v in se),
            )
        )
    return MeanLadder(method=first.method, source_domain=first.source_domain, rungs=tuple(rungs))


def table_row(label, result: CorpusEval):
    return {
        "ladder": label,
        "delta_rate_mean": result.mean.delta_rate,
        "delta_rate_std": result.stddev.delta_rate,
        "delta_q_mean": result.mean.delta_quality,
        "delta_q_std": result.stddev.delta_quality,
        "delta_e_mean": result.mean.delta_energy,
        "delta_e_std": result.stddev.delta_energy,
    }


def mean_ladder_rows(ml: MeanLadder):
    for r in ml.rungs:
        yield {
            "ladder": ml.name,
            "method": ml.method.value,
            "source_domain": ml.source_domain.value,
            "index": r.index,
            "target": r.target,
            "count": r.count,
            "bitrate_mean": r.mean[0],
            "bitrate_se": r.stderr[0],
            "vmaf_mean": r.mean[1],
            "vmaf_se": r.stderr[1],
            "energy_mean": r.mean[2],
            "energy_se": r.stderr[2],
        }


# x axis, y axis for each plot panel; rate and energy are plotted on log10
PLOT_PANELS = {
    "RQ": ("bitrate", "quality"),
    "EQ": ("decode_energy", "quality"),
    "RE": ("bitrate", "decode_energy"),
}


def plot_rows(ml: MeanLadder, panel):
    x_axis, y_axis = PLOT_PANELS[panel]
    xi, yi = _AXES.index(x_axis), _AXES.index(y_axis)
    for r in ml.rungs:
        row = {
            "ladder": ml.name,
            "index": r.index,
            "count": r.count,
            "x": r.mean[xi],
            "x_se": r.stderr[xi],
            "y": r.mean[yi],
            "y_se": r.stderr[yi],
            "log10_x": math.log10(r.mean[xi]),
        }
        if y_axis != "quality":
            row["log10_y"] = math.log10(r.mean[yi])
        yield row
