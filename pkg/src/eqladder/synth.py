"""Synthetic rate-quality-energy corpora.

Closed-form models per (sequence, resolution, CRF):

* bitrate  ``R = R0[res] * c_s * 2 ** (-crf / decay)``
* quality  ``Q = ceiling[res] / (1 + exp(-slope[res] * (log10(R / c_s) - midpoint[res])))``
* energy   ``E = base * offset[res] * (1 + growth * R / (R0[res] * c_s))``

``c_s`` is a per-sequence content-complexity factor, ``exp(content_spread * z)``
with ``z`` standard normal drawn from the seeded generator. Harder content needs
proportionally more bits for the same quality. Each sequence also scales the
gap ``100 - ceiling[res]`` by ``exp(ceiling_spread * z')``, so how much lower
resolutions lose to upscaling varies with content. Values are rounded to six
significant digits, then perturbed multiplicatively by ``1 + noise * u`` with
``u`` uniform in [-1, 1] when ``noise > 0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .exceptions import InvalidSpec, ParseError
from .ingest import Corpus, MeasurementPoint, build_corpus


@dataclass
class RateModel:
    base_rate: dict = field(
        default_factory=lambda: {2160: 400_000.0, 1080: 120_000.0, 720: 70_000.0}
    )
    decay: float = 6.25


@dataclass
class QualityModel:
    ceiling: dict = field(default_factory=lambda: {2160: 99.0, 1080: 93.0, 720: 85.0})
    slope: dict = field(default_factory=lambda: {2160: 2.6, 1080: 2.6, 720: 2.6})
    midpoint: dict = field(default_factory=lambda: {2160: 3.55, 1080: 3.45, 720: 3.35})


@dataclass
class EnergyModel:
    base: float = 20.0
    offset: dict = field(default_factory=lambda: {2160: 9.0, 1080: 3.0, 720: 1.0})
    growth: float = 0.5


@dataclass
class SynthSpec:
    sequence_count: int = 10
    resolutions: list = field(default_factory=lambda: [2160, 1080, 720])
    crf_grid: list = field(default_factory=lambda: [10, 20, 30, 40, 50])
    rate_model: RateModel = field(default_factory=RateModel)
    quality_model: QualityModel = field(default_factory=QualityModel)
    energy_model: EnergyModel = field(default_factory=EnergyModel)
    noise: float = 0.0
    content_spread: float = 0.3
    ceiling_spread: float = 0.3
    rng_seed: int = 0
    sequence_prefix: str = "synth"

    def validate(self):
        if not isinstance(self.sequence_count, int) or self.sequence_count < 1:
            raise InvalidSpec(f"sequence_count must be a positive integer, got {self.sequence_count!r}")
        if not self.resolutions or len(set(self.resolutions)) != len(self.resolutions):
            raise InvalidSpec("resolutions must be a non-empty list of distinct heights")
        if any(int(h) != h or h <= 0 for h in self.resolutions):
            raise InvalidSpec(f"resolutions must be positive integers, got {self.resolutions}")
        grid = list(self.crf_grid)
        if len(grid) < 5 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidSpec("crf_grid needs at least 5 strictly increasing values")
        for name, table in (
            ("rate_model.base_rate", self.rate_model.base_rate),
            ("quality_model.ceiling", self.quality_model.ceiling),
            ("quality_model.slope", self.quality_model.slope),
            ("quality_model.midpoint", self.quality_model.midpoint),
            ("energy_model.offset", self.energy_model.offset),
        ):
            missing = [h for h in self.resolutions if h not in table]
            if missing:
                raise InvalidSpec(f"{name} has no value for resolution(s) {missing}")
            bad = [h for h in self.resolutions if not table[h] > 0]
            if bad:
                raise InvalidSpec(f"{name} must be positive for resolution(s) {bad}")
        if any(self.quality_model.ceiling[h] > 100 for h in self.resolutions):
            raise InvalidSpec("quality_model.ceiling must not exceed 100")
        for name, value in (
            ("rate_model.decay", self.rate_model.decay),
            ("energy_model.base", self.energy_model.base),
        ):
            if not value > 0:
                raise InvalidSpec(f"{name} must be positive, got {value!r}")
        if self.energy_model.growth < 0:
            raise InvalidSpec("energy_model.growth must be >= 0")
        if not 0 <= self.noise < 1:
            raise InvalidSpec(f"noise must lie in [0, 1), got {self.noise!r}")
        if self.content_spread < 0 or self.ceiling_spread < 0:
            raise InvalidSpec("content_spread and ceiling_spread must be >= 0")
        return self

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise InvalidSpec("spec must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidSpec(f"unknown spec field(s): {', '.join(sorted(unknown))}")
        kwargs = dict(data)
        try:
            for key, model in (
                ("rate_model", RateModel),
                ("quality_model", QualityModel),
                ("energy_model", EnergyModel),
            ):
                if key in kwargs:
                    kwargs[key] = _model_from_dict(model, kwargs[key])
            spec = cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise InvalidSpec(str(exc)) from None
        return spec.validate()

    def to_dict(self):
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name.endswith("_model"):
                value = {
                    mf.name: (
                        {str(k): v for k, v in getattr(value, mf.name).items()}
                        if isinstance(getattr(value, mf.name), dict)
                        else getattr(value, mf.name)
                    )
                    for mf in fields(value)
                }
            out[f.name] = value
        return out


def _model_from_dict(model, data):
    if not isinstance(data, dict):
        raise InvalidSpec(f"{model.__name__} must be an object")
    default = model()
    kwargs = {}
    for mf in fields(model):
        if mf.name not in data:
            continue
        value = data[mf.name]
        if isinstance(getattr(default, mf.name), dict):
            if not isinstance(value, dict):
                raise InvalidSpec(f"{model.__name__}.{mf.name} must map resolution -> value")
            value = {int(k): float(v) for k, v in value.items()}
        kwargs[mf.name] = value
    unknown = set(data) - {mf.name for mf in fields(model)}
    if unknown:
        raise InvalidSpec(f"unknown {model.__name__} field(s): {', '.join(sorted(unknown))}")
    return model(**kwargs)


def load_spec(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ParseError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"{path}: invalid JSON: {exc}") from None
    return SynthSpec.from_dict(data)


def content_factors(spec: SynthSpec):
    """Per-sequence (complexity, ceiling-gap) factors and the generator used."""
    rng = np.random.default_rng(spec.rng_seed)
    z = rng.standard_normal((spec.sequence_count, 2))
    return np.exp(spec.content_spread * z[:, 0]), np.exp(spec.ceiling_spread * z[:, 1]), rng


def model_point(spec: SynthSpec, height, crf, complexity=1.0, gap=1.0):
    """Noise-free (bitrate, quality, energy) for one cell of the grid."""
    rm, qm, em = spec.rate_model, spec.quality_model, spec.energy_model
    r0 = rm.base_rate[height] * complexity
    rate = r0 * 2.0 ** (-crf / rm.decay)
    ceiling = 100.0 - (100.0 - qm.ceiling[height]) * gap
    x = math.log10(rate / complexity) - qm.midpoint[height]
    quality = max(0.0, ceiling) / (1.0 + math.exp(-qm.slope[height] * x))
    energy = em.base * em.offset[height] * (1.0 + em.growth * rate / r0)
    return rate, quality, energy


def _sig6(x):
    return float(f"{x:.6g}")


def make_synthetic_corpus(spec: SynthSpec | None = None) -> Corpus:
    spec = (spec or SynthSpec()).validate()
    complexity, gaps, rng = content_factors(spec)
    width = len(str(spec.sequence_count - 1))
    points = []
    for s, (c, g) in enumerate(zip(complexity, gaps)):
        sid = f"{spec.sequence_prefix}_{s:0{width}d}"
        for h in spec.resolutions:
            for crf in spec.crf_grid:
                rate, quality, energy = model_point(spec, h, crf, c, g)
                if spec.noise > 0:
                    u = rng.uniform(-1.0, 1.0, 3)
                    rate *= 1.0 + spec.noise * u[0]
                    quality = min(100.0, quality * (1.0 + spec.noise * u[1]))
                    energy *= 1.0 + spec.noise * u[2]
                points.append(
                    MeasurementPoint(
                        sequence_id=sid,
                        resolution_height=int(h),
                        crf=float(crf),
                        bitrate=_sig6(rate),
                        quality=_sig6(quality),
                        decode_energy=_sig6(energy),
                    )
                )
    return build_corpus(points)
