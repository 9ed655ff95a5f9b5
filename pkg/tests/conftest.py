import os

import numpy as np
import pytest

from eqladder.ingest import MeasurementPoint, build_corpus
from eqladder.interp import SampledPoint
from eqladder.pareto import Domain, ParetoFront
from eqladder.synth import QualityModel, SynthSpec, make_synthetic_corpus

DATA = os.path.join(os.path.dirname(__file__), "data")
GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def fixture_spec(sequence_count=6, **kw):
    """Zero-noise corpus, energy offsets 1x/3x/9x for 720/1080/2160."""
    return SynthSpec(sequence_count=sequence_count, noise=0.0, rng_seed=7, **kw)


def crossed_curve_spec(sequence_count=4):
    """1080p is flatter than 720p, so it wins at the lowest rates, loses in the
    middle, and wins again near the top: the RQ front steps 1080 -> 720 -> 1080."""
    return fixture_spec(
        sequence_count=sequence_count,
        quality_model=QualityModel(
            ceiling={2160: 99.0, 1080: 93.0, 720: 85.0},
            slope={2160: 2.6, 1080: 2.0, 720: 4.0},
            midpoint={2160: 3.55, 1080: 3.45, 720: 3.35},
        ),
        content_spread=0.0,
        ceiling_spread=0.0,
    )


@pytest.fixture(scope="session")
def fixture_corpus():
    return make_synthetic_corpus(fixture_spec())


@pytest.fixture(scope="session")
def crossed_corpus():
    return make_synthetic_corpus(crossed_curve_spec())


def grid_points(sequences=("seqA", "seqB", "seqC"), heights=(720, 1080, 2160),
                crfs=(10, 20, 30, 40, 50)):
    pts = []
    for s in sequences:
        for h in heights:
            for c in crfs:
                pts.append(
                    MeasurementPoint(
                        sequence_id=s,
                        resolution_height=h,
                        crf=float(c),
                        bitrate=h * 100.0 * 2 ** (-c / 10),
                        quality=min(100.0, 100.0 - c - 2000.0 / h),
                        decode_energy=h / 10.0 + 50.0 - c,
                    )
                )
    return pts


@pytest.fixture
def small_corpus():
    return build_corpus(grid_points())


def write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(str(v) for v in r) + "\n")
    return path


def point(cost=None, quality=0.0, *, bitrate=None, energy=None, res=1080, crf=30.0):
    """SampledPoint with whichever cost axes the test cares about."""
    b = bitrate if bitrate is not None else (cost if cost is not None else 1.0)
    e = energy if energy is not None else (cost if cost is not None else 1.0)
    return SampledPoint(crf=crf, bitrate=b, quality=quality, decode_energy=e,
                        resolution_height=res)


def make_front(points, domain=Domain.RQ, sequence_id="hand"):
    key = (lambda p: domain.cost(p))
    return ParetoFront(sequence_id, Domain.parse(domain), tuple(sorted(points, key=key)))


def brute_force_front(cost, quality, res, crf):
    """O(n^2) dominance filter with the documented tie-breaks.

    A row is dropped if another row is at least as good on both axes and
    strictly better on one, or if another row is identical on both axes and
    has a smaller (resolution, crf) key.
    """
    cost, quality, res, crf = map(np.asarray, (cost, quality, res, crf))
    le = cost[None, :] <= cost[:, None]
    ge = quality[None, :] >= quality[:, None]
    strict = (cost[None, :] < cost[:, None]) | (quality[None, :] > quality[:, None])
    dominated = (le & ge & strict).any(axis=1)
    same = (cost[None, :] == cost[:, None]) & (quality[None, :] == quality[:, None])
    earlier = (res[None, :] < res[:, None]) | (
        (res[None, :] == res[:, None]) & (crf[None, :] < crf[:, None])
    )
    shadowed = (same & earlier).any(axis=1)
    return ~(dominated | shadowed)


def random_candidates(rng, n, ties=True):
    """``n`` candidates in 3 resolution groups with unique (res, crf) keys."""
    res = rng.choice([720, 1080, 2160], size=n)
    crf = np.zeros(n)
    for h in (720, 1080, 2160):
        idx = np.flatnonzero(res == h)
        crf[idx] = np.arange(idx.size) * 0.1
    if ties:
        cost = rng.integers(1, 60, size=n).astype(float)
        quality = rng.integers(0, 40, size=n).astype(float)
    else:
        cost = rng.uniform(1, 1000, size=n)
        quality = rng.uniform(0, 100, size=n)
    return cost, quality, res, crf
