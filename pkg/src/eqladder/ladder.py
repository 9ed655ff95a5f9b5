"""Rate-driven and quality-driven ladder construction on a Pareto front."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, fields

from .exceptions import InvalidConfig
from .interp import SampledPoint
from .pareto import Domain, ParetoFront


class Method(str, enum.Enum):
    RATE_DRIVEN = "rate_driven"
    QUALITY_DRIVEN = "quality_driven"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("-", "_"))
        except ValueError:
            raise ValueError(
                f"unknown method {value!r}; expected 'rate_driven' or 'quality_driven'"
            ) from None


class RungStatus(str, enum.Enum):
    FILLED = "filled"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class LadderConfig:
    """Rung grid and search bands.

    Rate targets start at ``rate_min`` kbps and double up to ``rate_max``;
    each rung searches ``target * (1 +/- rate_band)``. Quality targets run
    from ``quality_min`` to ``quality_max`` in ``quality_step`` VMAF, each
    searching ``target +/- quality_band``. ``fallback="nearest"`` fills a rung
    with an empty band using the closest remaining point instead of skipping it.
    """

    rate_min: float = 500.0
    rate_max: float = 128_000.0
    rate_band: float = 0.10
    quality_min: float = 50.0
    quality_max: float = 100.0
    quality_step: float = 10.0
    quality_band: float = 5.0
    fallback: str = "skip"

    def __post_init__(self):
        for f in fields(self):
            if f.name == "fallback":
                continue
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidConfig(f"{f.name} must be a number, got {value!r}")
            if not math.isfinite(value):
                raise InvalidConfig(f"{f.name} must be finite, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        if not 0 < self.rate_min < self.rate_max:
            raise InvalidConfig(
                f"need 0 < rate_min < rate_max, got {self.rate_min:g}, {self.rate_max:g}"
            )
        if not 0 < self.rate_band < 1:
            raise InvalidConfig(f"rate_band must lie in (0, 1), got {self.rate_band:g}")
        if not self.quality_min < self.quality_max:
            raise InvalidConfig(
                f"need quality_min < quality_max, got {self.quality_min:g}, {self.quality_max:g}"
            )
        if not self.quality_step > 0:
            raise InvalidConfig(f"quality_step must be > 0, got {self.quality_step:g}")
        if not self.quality_band > 0:
            raise InvalidConfig(f"quality_band must be > 0, got {self.quality_band:g}")
        if self.fallback not in ("skip", "nearest"):
            raise InvalidConfig(f"fallback must be 'skip' or 'nearest', got {self.fallback!r}")

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"unknown ladder option(s): {', '.join(sorted(unknown))}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise InvalidConfig(str(exc)) from None

    def to_dict(self):
        return asdict(self)

    def rate_targets(self):
        # rate_min * 2**k exactly; no running product
        count = int(math.floor(math.log2(self.rate_max / self.rate_min) + 1e-12)) + 1
        return [self.rate_min * 2.0**k for k in range(count)]

    def quality_targets(self):
        span = (self.quality_max - self.quality_min) / self.quality_step
        count = int(math.floor(span + 1e-9)) + 1
        return [self.quality_min + k * self.quality_step for k in range(count)]


@dataclass(frozen=True)
class LadderRung:
    index: int
    target: float
    status: RungStatus
    chosen: SampledPoint | None = None

    @property
    def filled(self):
        return self.status is RungStatus.FILLED


@dataclass(frozen=True)
class Ladder:
    sequence_id: str
    method: Method
    source_domain: Domain
    rungs: tuple[LadderRung, ...]
    config: LadderConfig

    @property
    def name(self):
        label = "Rate-driven" if self.method is Method.RATE_DRIVEN else "Quality-driven"
        return f"{label} {self.source_domain.value}-PF"

    def filled(self):
        return [r for r in self.rungs if r.filled]


def _select(front, targets, in_band, objective, distance, progress, fallback):
    """Fill rungs in order; each front point may serve at most one rung."""
    taken: set[int] = set()
    last = None
    rungs = []
    for i, target in enumerate(targets, start=1):
        free = [j for j in range(len(front.points)) if j not in taken]
        cands = [j for j in free if in_band(front.points[j], target)]
        pick = None
        if cands:
            pick = min(cands, key=lambda j: objective(front.points[j]))
        elif fallback == "nearest":
            ahead = [j for j in free if last is None or progress(front.points[j]) > last]
            if ahead:
                pick = min(ahead, key=lambda j: (distance(front.points[j], target),
                                                 objective(front.points[j])))
        if pick is None:
            rungs.append(LadderRung(index=i, target=target, status=RungStatus.SKIPPED))
            continue
        taken.add(pick)
        chosen = front.points[pick]
        last = progress(chosen)
        rungs.append(LadderRung(index=i, target=target, status=RungStatus.FILLED, chosen=chosen))
    return tuple(rungs)


def rate_driven_ladder(front: ParetoFront, config: LadderConfig | None = None) -> Ladder:
    """Doubling bitrate rungs; each takes the lowest-bitrate front point in its band."""
    config = LadderConfig() if config is None else config
    band = config.rate_band

    def in_band(p, target):
        return target * (1.0 - band) <= p.bitrate <= target * (1.0 + band)

    def objective(p):
        return (p.bitrate, p.resolution_height, p.crf)

    rungs = _select(
        front,
        config.rate_targets(),
        in_band,
        objective,
        distance=lambda p, t: abs(p.bitrate - t),
        progress=lambda p: p.bitrate,
        fallback=config.fallback,
    )
    return Ladder(front.sequence_id, Method.RATE_DRIVEN, front.domain, rungs, config)


def quality_driven_ladder(front: ParetoFront, config: LadderConfig | None = None) -> Ladder:
    """Fixed VMAF rungs; each takes the cheapest front point (on the front's own
    cost axis) whose quality is within the band."""
    config = LadderConfig() if config is None else config
    band = config.quality_band
    domain = front.domain

    def in_band(p, target):
        return target - band <= p.quality <= target + band

    def objective(p):
        return (domain.cost(p), p.resolution_height, p.crf)

    rungs = _select(
        front,
        config.quality_targets(),
        in_band,
        objective,
        distance=lambda p, t: abs(p.quality - t),
        progress=lambda p: p.quality,
        fallback=config.fallback,
    )
    return Ladder(front.sequence_id, Method.QUALITY_DRIVEN, front.domain, rungs, config)


def build_ladder(front: ParetoFront, method, config: LadderConfig | None = None) -> Ladder:
    if Method.parse(method) is Method.RATE_DRIVEN:
        return rate_driven_ladder(front, config)
    return quality_driven_ladder(front, config)


def build_all_ladders(fronts, config: LadderConfig | None = None):
    """The four method x domain ladders for one sequence.

    ``fronts`` maps each `Domain` to that sequence's front.
    """
    return {
        (method, dom): build_ladder(fronts[dom], method, config)
        for method in Method
        for dom in Domain
    }


def ladder_to_domain(ladder: Ladder, target) -> list[tuple[float, float]]:
    """(cost, quality) of the filled rungs on ``target``'s axes, rung order kept."""
    target = Domain.parse(target)
    return [target.pair(r.chosen) for r in ladder.rungs if r.filled]


def ladder_rows(ladder: Ladder):
    for r in ladder.rungs:
        p = r.chosen
        yield {
            "sequence_id": ladder.sequence_id,
            "method": ladder.method.value,
            "source_domain": ladder.source_domain.value,
            "index": r.index,
            "target": r.target,
            "status": r.status.value,
            "resolution_height": "" if p is None else p.resolution_height,
            "crf": "" if p is None else p.crf,
            "bitrate_kbps": "" if p is None else p.bitrate,
            "vmaf": "" if p is None else p.quality,
            "decode_energy_j": "" if p is None else p.decode_energy,
        }
