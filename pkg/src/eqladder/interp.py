"""Akima interpolation of rate, quality and energy along the CRF axis."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import ClampWarning, NonIncreasingX, OutOfRange, TooFewKnots
from .ingest import Corpus

POSITIVE_FLOOR = 1e-6
DEFAULT_STEP = 0.1
_KNOT_SNAP = 1e-9


class AkimaSpline:
    """Piecewise cubic Akima interpolant through ``(xs, ys)``.

    Node slopes are weighted averages of neighbouring secant slopes, which
    keeps the curve from ringing around outliers. Two virtual secants are
    appended at each end by linear extrapolation of the secant sequence.
    Evaluation outside ``[xs[0], xs[-1]]`` raises `OutOfRange`.
    """

    def __init__(self, xs, ys):
        x = np.asarray(xs, dtype=float)
        y = np.asarray(ys, dtype=float)
        if x.ndim != 1 or x.shape != y.shape:
            raise ValueError("xs and ys must be 1-D sequences of equal length")
        if x.size < 5:
            raise TooFewKnots(f"Akima interpolation needs at least 5 knots, got {x.size}")
        dx = np.diff(x)
        if np.any(dx <= 0) or not np.all(np.isfinite(x)):
            raise NonIncreasingX("knot abscissae must be finite and strictly increasing")

        secant = np.diff(y) / dx
        m = np.empty(x.size + 3)
        m[2:-2] = secant
        m[1] = 2.0 * m[2] - m[3]
        m[0] = 2.0 * m[1] - m[2]
        m[-2] = 2.0 * m[-3] - m[-4]
        m[-1] = 2.0 * m[-2] - m[-3]

        dm = np.abs(np.diff(m))
        # node i sees secants m[i..i+3]; each inner secant is weighted by the
        # jump between the two secants on the opposite side
        w_prev = dm[2:]
        w_next = dm[:-2]
        w_sum = w_prev + w_next
        slope = 0.5 * (m[1:-2] + m[2:-1])
        defined = w_sum > 1e-9 * w_sum.max(initial=0.0)
        slope[defined] = (
            w_prev[defined] * m[1:-2][defined] + w_next[defined] * m[2:-1][defined]
        ) / w_sum[defined]

        # Hermite coefficients on each interval: y + b t + c t^2 + d t^3
        self.x = x
        self.y = y
        self.slopes = slope
        self._b = slope[:-1]
        self._c = (3.0 * secant - 2.0 * slope[:-1] - slope[1:]) / dx
        self._d = (slope[:-1] + slope[1:] - 2.0 * secant) / dx**2

    @property
    def domain(self):
        return float(self.x[0]), float(self.x[-1])

    def _locate(self, xq):
        lo, hi = self.x[0], self.x[-1]
        if np.any(xq < lo) or np.any(xq > hi) or np.any(np.isnan(xq)):
            raise OutOfRange(f"evaluation outside knot range [{lo:g}, {hi:g}]")
        idx = np.searchsorted(self.x, xq, side="right") - 1
        return np.clip(idx, 0, self.x.size - 2)

    def __call__(self, xq, nu=0):
        xq_arr = np.asarray(xq, dtype=float)
        idx = self._locate(xq_arr)
        t = xq_arr - self.x[idx]
        b, c, d = self._b[idx], self._c[idx], self._d[idx]
        if nu == 0:
            out = self.y[idx] + t * (b + t * (c + t * d))
            # exact knot values, no rounding drift from the polynomial
            out = np.where(t == 0, self.y[idx], out)
            out = np.where(xq_arr == self.x[idx + 1], self.y[idx + 1], out)
        elif nu == 1:
            out = b + t * (2.0 * c + 3.0 * t * d)
        else:
            raise ValueError("only nu=0 and nu=1 are supported")
        return out if out.ndim else float(out)

    def derivative(self, xq):
        return self(xq, nu=1)


def akima_spline(xs, ys) -> AkimaSpline:
    return AkimaSpline(xs, ys)


@dataclass(frozen=True)
class SampledPoint:
    crf: float
    bitrate: float
    quality: float
    decode_energy: float
    resolution_height: int
    is_knot: bool = False


@dataclass(frozen=True)
class ResolutionCurve:
    sequence_id: str
    resolution_height: int
    samples: tuple[SampledPoint, ...]

    def knots(self):
        return tuple(s for s in self.samples if s.is_knot)

    def column(self, name):
        return np.array([getattr(s, name) for s in self.samples], dtype=float)


def crf_grid(lo, hi, step, knots=()):
    """Uniform grid from ``lo`` to ``hi`` merged with the knots.

    Grid values within rounding distance of a knot are replaced by the knot
    itself so the measured points survive sampling bit-for-bit.
    """
    if not step > 0 or step > (hi - lo):
        raise ValueError(f"step must satisfy 0 < step <= {hi - lo:g}, got {step!r}")
    n = int(math.floor((hi - lo) / step + 1e-9))
    grid = lo + step * np.arange(n + 1)
    knots = np.asarray(sorted(knots), dtype=float)
    scale = max(1.0, abs(hi), abs(lo))
    merged = list(grid)
    for k in knots:
        j = int(np.argmin(np.abs(grid - k)))
        if abs(grid[j] - k) <= _KNOT_SNAP * scale:
            merged[j] = k
        else:
            merged.append(k)
    out = np.unique(np.asarray(merged, dtype=float))
    return out, np.isin(out, knots)


def _fit(xs, ys, space):
    if space == "log":
        return akima_spline(xs, np.log10(ys))
    return akima_spline(xs, ys)


def _eval(spline, grid, space, knot_mask, knot_values):
    vals = spline(grid)
    if space == "log":
        vals = np.power(10.0, vals)
        # restore measured values exactly where log/exp round-tripping drifts
        vals[knot_mask] = knot_values
    return vals


def sample_group(sequence_id, group, step=DEFAULT_STEP, space="linear"):
    """Sample one (sequence, resolution) group of measurement points."""
    if space not in ("linear", "log"):
        raise ValueError(f"space must be 'linear' or 'log', got {space!r}")
    crf = np.array([p.crf for p in group], dtype=float)
    rate = np.array([p.bitrate for p in group], dtype=float)
    qual = np.array([p.quality for p in group], dtype=float)
    energy = np.array([p.decode_energy for p in group], dtype=float)
    height = group[0].resolution_height

    grid, is_knot = crf_grid(crf[0], crf[-1], step, crf)
    r = _eval(_fit(crf, rate, space), grid, space, is_knot, rate)
    e = _eval(_fit(crf, energy, space), grid, space, is_knot, energy)
    q = akima_spline(crf, qual)(grid)

    where = f"{sequence_id}@{height}p"
    if np.any(q < 0) or np.any(q > 100):
        q = np.clip(q, 0.0, 100.0)
    for name, arr in (("bitrate", r), ("decode_energy", e)):
        low = arr < POSITIVE_FLOOR
        if np.any(low):
            warnings.warn(
                f"{where}: {int(low.sum())} interpolated {name} sample(s) below "
                f"{POSITIVE_FLOOR:g}, clamped",
                ClampWarning,
            )
            arr[low] = POSITIVE_FLOOR

    samples = tuple(
        SampledPoint(
            crf=float(c),
            bitrate=float(rv),
            quality=float(qv),
            decode_energy=float(ev),
            resolution_height=height,
            is_knot=bool(k),
        )
        for c, rv, qv, ev, k in zip(grid, r, q, e, is_knot)
    )
    return ResolutionCurve(sequence_id=sequence_id, resolution_height=height, samples=samples)


def sample_sequence(corpus: Corpus, sequence_id, step=DEFAULT_STEP, space="linear"):
    return [
        sample_group(sequence_id, grp, step=step, space=space)
        for grp in corpus.groups(sequence_id).values()
    ]


def sample_curves(corpus: Corpus, step=DEFAULT_STEP, space="linear"):
    """One densely sampled `ResolutionCurve` per (sequence, resolution).

    ``space="log"`` fits bitrate and energy in log10 space instead of linear;
    quality is always interpolated linearly and clamped to [0, 100].
    """
    lo, hi = corpus.crf_grid[0], corpus.crf_grid[-1]
    if not 0 < step <= hi - lo:
        raise ValueError(f"step must satisfy 0 < step <= {hi - lo:g}, got {step!r}")
    curves = []
    for sid in corpus.sequences:
        curves.extend(sample_sequence(corpus, sid, step=step, space=space))
    return curves


def curve_rows(curves):
    for curve in curves:
        for s in curve.samples:
            yield {
                "sequence_id": curve.sequence_id,
                "resolution_height": s.resolution_height,
                "crf": s.crf,
                "bitrate_kbps": s.bitrate,
                "vmaf": s.quality,
                "decode_energy_j": s.decode_energy,
                "is_knot": int(s.is_knot),
            }
