import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_front, point
from eqladder.exceptions import InvalidConfig
from eqladder.interp import sample_sequence
from eqladder.ladder import (
    LadderConfig,
    Method,
    RungStatus,
    build_ladder,
    ladder_to_domain,
    quality_driven_ladder,
    rate_driven_ladder,
)
from eqladder.pareto import Domain, extract_front, front_from_points


def _rate_front(rates):
    return make_front([point(bitrate=r, energy=r / 100, quality=10 + i, crf=float(i))
                       for i, r in enumerate(sorted(rates))])


def test_default_targets():
    cfg = LadderConfig()
    assert cfg.rate_targets() == [500.0 * 2**k for k in range(9)]
    assert cfg.rate_targets()[-1] == 128_000.0
    assert cfg.quality_targets() == [50.0, 60.0, 70.0, 80.0, 90.0, 100.0]
    assert LadderConfig(quality_min=0.5, quality_max=1.0, quality_step=0.1).quality_targets() == [
        0.5 + k * 0.1 for k in range(6)
    ]


@pytest.mark.parametrize(
    "kw",
    [
        {"rate_min": 0},
        {"rate_min": 1000, "rate_max": 500},
        {"rate_band": 1.0},
        {"rate_band": 0},
        {"quality_min": 100, "quality_max": 50},
        {"quality_step": 0},
        {"quality_band": -1},
        {"fallback": "closest"},
        {"rate_min": "500"},
    ],
)
def test_invalid_config(kw):
    with pytest.raises(InvalidConfig):
        LadderConfig(**kw)


def test_exact_hits():
    lad = rate_driven_ladder(_rate_front([500, 1000, 2000]))
    assert [r.chosen.bitrate for r in lad.rungs[:3]] == [500, 1000, 2000]
    assert all(r.status is RungStatus.SKIPPED for r in lad.rungs[3:])
    assert len(lad.rungs) == 9


def test_lowest_bitrate_in_band():
    lad = rate_driven_ladder(_rate_front([940, 1050]))
    assert lad.rungs[1].target == 1000
    assert lad.rungs[1].chosen.bitrate == 940


def test_out_of_band_skipped():
    lad = rate_driven_ladder(_rate_front([1200]))
    assert lad.rungs[1].status is RungStatus.SKIPPED
    assert all(not r.filled for r in lad.rungs)


def test_band_edges_inclusive():
    lad = rate_driven_ladder(_rate_front([900, 1100]))
    assert lad.rungs[1].chosen.bitrate == 900


def test_fallback_nearest():
    cfg = LadderConfig(fallback="nearest")
    lad = rate_driven_ladder(_rate_front([1200]), cfg)
    assert lad.rungs[0].chosen.bitrate == 1200
    assert not any(r.filled for r in lad.rungs[1:])
    lad = quality_driven_ladder(make_front([point(1.0, 44.0), point(2.0, 71.0, crf=1.0)]), cfg)
    assert [r.chosen.quality if r.filled else None for r in lad.rungs] == [44.0, 71.0, None, None, None, None]


def test_quality_single_candidate():
    front = make_front([point(1.0, 40.0), point(2.0, 58.0, crf=1.0), point(3.0, 99.9, crf=2.0)])
    lad = quality_driven_ladder(front)
    assert lad.rungs[1].target == 60 and lad.rungs[1].chosen.quality == 58.0
    assert lad.rungs[0].status is RungStatus.SKIPPED
    assert lad.rungs[5].chosen.quality == 99.9


def test_quality_min_cost_on_eq_front():
    a = point(energy=10.0, bitrate=900.0, quality=78.0)
    b = point(energy=14.0, bitrate=500.0, quality=82.0, crf=1.0)
    lad = quality_driven_ladder(make_front([a, b], Domain.EQ))
    rung80 = lad.rungs[3]
    assert rung80.target == 80 and rung80.chosen == a


def test_empty_band_at_100():
    lad = quality_driven_ladder(make_front([point(1.0, 50.0), point(2.0, 90.0, crf=1.0)]))
    assert lad.rungs[-1].target == 100 and lad.rungs[-1].status is RungStatus.SKIPPED


def test_one_point_per_rung_at_shared_boundary():
    lad = quality_driven_ladder(make_front([point(1.0, 65.0)]))
    filled = [r for r in lad.rungs if r.filled]
    assert len(filled) == 1 and filled[0].target == 60


def test_ladder_to_domain(fixture_corpus, crossed_corpus):
    empty = rate_driven_ladder(_rate_front([3]))
    assert ladder_to_domain(empty, "RQ") == []
    sid = next(iter(fixture_corpus.sequences))
    rq = extract_front(sample_sequence(fixture_corpus, sid), "RQ")
    pairs = ladder_to_domain(rate_driven_ladder(rq), "RQ")
    assert all(b[0] > a[0] for a, b in zip(pairs, pairs[1:]))

    sid = next(iter(crossed_corpus.sequences))
    rq = extract_front(sample_sequence(crossed_corpus, sid), "RQ")
    in_eq = ladder_to_domain(rate_driven_ladder(rq), "EQ")
    assert any(e1 < e0 and q1 > q0 for (e0, q0), (e1, q1) in zip(in_eq, in_eq[1:]))


def test_build_ladder_dispatch():
    front = _rate_front([500, 1000])
    assert build_ladder(front, "rate-driven").method is Method.RATE_DRIVEN
    assert build_ladder(front, Method.QUALITY_DRIVEN).method is Method.QUALITY_DRIVEN


def _random_front(seed, n, domain=Domain.RQ):
    rng = np.random.default_rng(seed)
    pts = [point(bitrate=float(b), energy=float(e), quality=float(q), res=int(h), crf=float(i))
           for i, (b, e, q, h) in enumerate(zip(
               np.exp(rng.uniform(np.log(300), np.log(200_000), n)),
               rng.uniform(10, 300, n),
               rng.uniform(0, 100, n),
               rng.choice([720, 1080, 2160], n)))]
    return front_from_points(pts, domain)


def check_ladder_invariants(front, ladder):
    members = set(front.points)
    filled = [r for r in ladder.rungs if r.filled]
    assert all(r.chosen in members for r in filled)
    keys = [(r.chosen.resolution_height, r.chosen.crf) for r in filled]
    assert len(set(keys)) == len(keys)
    cfg = ladder.config
    if ladder.method is Method.RATE_DRIVEN:
        for r in filled:
            assert abs(r.chosen.bitrate - r.target) <= cfg.rate_band * r.target * (1 + 1e-12)
        rates = [r.chosen.bitrate for r in filled]
        assert all(b > a for a, b in zip(rates, rates[1:]))
    else:
        for r in filled:
            assert abs(r.chosen.quality - r.target) <= cfg.quality_band
        quals = [r.chosen.quality for r in filled]
        assert all(b > a for a, b in zip(quals, quals[1:]))


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 400),
       domain=st.sampled_from(list(Domain)), method=st.sampled_from(list(Method)))
def test_band_membership_property(seed, n, domain, method):
    front = _random_front(seed, n, domain)
    lad = build_ladder(front, method)
    check_ladder_invariants(front, lad)
    assert build_ladder(front, method) == lad


def test_dense_front_fills_every_rung():
    rates = np.geomspace(400, 150_000, 4000)
    quals = np.linspace(40, 100, 4000)
    front = make_front([point(bitrate=float(r), energy=float(r), quality=float(q), crf=float(i))
                        for i, (r, q) in enumerate(zip(rates, quals))])
    assert all(r.filled for r in rate_driven_ladder(front).rungs)
    assert all(r.filled for r in quality_driven_ladder(front).rungs)
