"""Measurement tables: parsing, validation, and the canonical corpus."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .exceptions import (
    DuplicateKey,
    EmptyCorpus,
    IncompleteGrid,
    MonotonicityWarning,
    NonPositiveValue,
    ParseError,
    SchemaWarning,
)

REQUIRED_COLUMNS = (
    "sequence_id",
    "resolution_height",
    "crf",
    "bitrate_kbps",
    "vmaf",
    "decode_energy_j",
)
OPTIONAL_COLUMNS = ("encode_energy_j",)
KNOWN_COLUMNS = REQUIRED_COLUMNS + OPTIONAL_COLUMNS


@dataclass(frozen=True)
class MeasurementPoint:
    """One encode/decode observation of a clip at a resolution and CRF.

    Bitrate is in kbps, quality is VMAF, energies are joules per clip.
    """

    sequence_id: str
    resolution_height: int
    crf: float
    bitrate: float
    quality: float
    decode_energy: float
    encode_energy: float | None = None

    @property
    def key(self):
        return (self.sequence_id, self.resolution_height, self.crf)


@dataclass(frozen=True)
class Corpus:
    sequences: dict[str, tuple[MeasurementPoint, ...]]
    resolutions: tuple[int, ...]
    crf_grid: tuple[float, ...]

    def __len__(self):
        return len(self.sequences)

    def points(self):
        for pts in self.sequences.values():
            yield from pts

    def group(self, sequence_id, resolution_height):
        """Points of one (sequence, resolution) pair, ordered by CRF."""
        return tuple(
            p for p in self.sequences[sequence_id] if p.resolution_height == resolution_height
        )

    def groups(self, sequence_id):
        heights = sorted({p.resolution_height for p in self.sequences[sequence_id]})
        return {h: self.group(sequence_id, h) for h in heights}


@dataclass(frozen=True)
class Range:
    min: float
    max: float
    mean: float

    @classmethod
    def of(cls, values):
        arr = np.asarray(values, dtype=float)
        return cls(float(arr.min()), float(arr.max()), float(arr.mean()))


@dataclass(frozen=True)
class ResolutionSummary:
    resolution_height: int
    count: int
    bitrate: Range
    quality: Range
    decode_energy: Range
    log10_bitrate: tuple[float, float]
    log10_energy: tuple[float, float]


@dataclass(frozen=True)
class SummaryStats:
    sequence_count: int
    point_count: int
    by_resolution: dict[int, ResolutionSummary] = field(default_factory=dict)


# --------------------------------------------------------------------------- parsing


def _coerce(row, column, cast, line):
    raw = row.get(column)
    if raw is None or (isinstance(raw, str) and raw.strip() == ""):
        raise ParseError(f"line {line}: missing field {column!r}")
    try:
        if cast is int:
            value = float(raw)
            if not value.is_integer():
                raise ValueError
            return int(value)
        value = float(raw)
    except (TypeError, ValueError):
        raise ParseError(f"line {line}: bad value {raw!r} for {column!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"line {line}: non-finite value {raw!r} for {column!r}")
    return value


def _row_to_point(row, line):
    sid = row.get("sequence_id")
    if sid is None or str(sid).strip() == "":
        raise ParseError(f"line {line}: missing field 'sequence_id'")
    enc = row.get("encode_energy_j")
    encode_energy = None
    if enc is not None and not (isinstance(enc, str) and enc.strip() == ""):
        encode_energy = _coerce(row, "encode_energy_j", float, line)
    point = MeasurementPoint(
        sequence_id=str(sid).strip(),
        resolution_height=_coerce(row, "resolution_height", int, line),
        crf=_coerce(row, "crf", float, line),
        bitrate=_coerce(row, "bitrate_kbps", float, line),
        quality=_coerce(row, "vmaf", float, line),
        decode_energy=_coerce(row, "decode_energy_j", float, line),
        encode_energy=encode_energy,
    )
    for name, value in (
        ("bitrate_kbps", point.bitrate),
        ("decode_energy_j", point.decode_energy),
        ("encode_energy_j", point.encode_energy),
    ):
        if value is not None and value <= 0:
            raise NonPositiveValue(f"line {line}: {name} must be > 0, got {value:g}")
    if point.resolution_height <= 0:
        raise NonPositiveValue(
            f"line {line}: resolution_height must be > 0, got {point.resolution_height}"
        )
    if not 0 <= point.quality <= 100:
        raise ParseError(f"line {line}: vmaf must lie in [0, 100], got {point.quality:g}")
    return point


def _check_columns(columns):
    columns = list(columns)
    missing = [c for c in REQUIRED_COLUMNS if c not in columns]
    if missing:
        raise ParseError(f"missing required column(s): {', '.join(missing)}")
    unknown = [c for c in columns if c not in KNOWN_COLUMNS]
    if unknown:
        warnings.warn(f"ignoring unknown column(s): {', '.join(unknown)}", SchemaWarning)


def parse_csv(text):
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ParseError("empty file: header row required")
    _check_columns(name.strip() for name in reader.fieldnames)
    points = []
    for line, row in enumerate(reader, start=2):
        if None in row:
            raise ParseError(f"line {line}: more fields than header columns")
        row = {k.strip(): v for k, v in row.items()}
        points.append(_row_to_point(row, line))
    return points


def parse_json(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(data, list):
        raise ParseError("JSON corpus must be a top-level array of objects")
    seen_unknown = set()
    points = []
    for i, obj in enumerate(data):
        if not isinstance(obj, dict):
            raise ParseError(f"record {i}: expected an object")
        missing = [c for c in REQUIRED_COLUMNS if c not in obj]
        if missing:
            raise ParseError(f"record {i}: missing field(s): {', '.join(missing)}")
        seen_unknown.update(k for k in obj if k not in KNOWN_COLUMNS)
        points.append(_row_to_point(obj, i))
    if seen_unknown:
        warnings.warn(
            f"ignoring unknown field(s): {', '.join(sorted(seen_unknown))}", SchemaWarning
        )
    return points


def _infer_schema(path):
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".json":
        return "json"
    if ext == ".csv":
        return "csv"
    raise ParseError(f"cannot infer schema from extension of {path}; pass schema='csv' or 'json'")


def load_corpus(path, schema=None, resolutions=None):
    """Read a CSV or JSON measurement table and return a validated `Corpus`.

    ``schema`` is ``"csv"`` or ``"json"``; when omitted it is taken from the
    file extension. ``resolutions`` optionally declares the admissible set of
    heights; rows outside it are rejected.
    """
    schema = schema or _infer_schema(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise ParseError(f"no such file: {path}") from None
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    if schema == "csv":
        points = parse_csv(text)
    elif schema == "json":
        points = parse_json(text)
    else:
        raise ParseError(f"unknown schema {schema!r}; expected 'csv' or 'json'")
    return build_corpus(points, resolutions=resolutions)


def build_corpus(points: Iterable[MeasurementPoint], resolutions=None) -> Corpus:
    """Validate loose points and assemble them into a `Corpus`."""
    points = list(points)
    if not points:
        raise EmptyCorpus("corpus contains no measurements")
    if resolutions is not None:
        allowed = set(int(r) for r in resolutions)
        for p in points:
            if p.resolution_height not in allowed:
                raise ParseError(
                    f"{p.sequence_id}: resolution {p.resolution_height} not in "
                    f"declared set {sorted(allowed)}"
                )

    seen = {}
    for p in points:
        if p.key in seen:
            raise DuplicateKey(
                f"duplicate measurement for ({p.sequence_id}, {p.resolution_height}, "
                f"crf={p.crf:g})"
            )
        seen[p.key] = p

    crf_grid = tuple(sorted({p.crf for p in points}))
    heights = tuple(sorted({p.resolution_height for p in points}))

    by_seq: dict[str, list[MeasurementPoint]] = {}
    for p in points:
        by_seq.setdefault(p.sequence_id, []).append(p)

    holes = []
    for sid in sorted(by_seq):
        for h in sorted({p.resolution_height for p in by_seq[sid]}):
            for c in crf_grid:
                if (sid, h, c) not in seen:
                    holes.append((sid, h, c))
    if holes:
        raise IncompleteGrid(holes)

    sequences = {}
    for sid in sorted(by_seq):
        ordered = tuple(sorted(by_seq[sid], key=lambda p: (p.resolution_height, p.crf)))
        sequences[sid] = ordered
        _warn_non_monotone(sid, ordered)
    return Corpus(sequences=sequences, resolutions=heights, crf_grid=crf_grid)


def _warn_non_monotone(sid, ordered):
    for h in sorted({p.resolution_height for p in ordered}):
        grp = [p for p in ordered if p.resolution_height == h]
        for a, b in zip(grp, grp[1:]):
            if b.bitrate >= a.bitrate or b.quality > a.quality:
                warnings.warn(
                    f"{sid}@{h}p: non-monotone between crf {a.crf:g} and {b.crf:g} "
                    f"(bitrate {a.bitrate:g}->{b.bitrate:g}, vmaf {a.quality:g}->{b.quality:g})",
                    MonotonicityWarning,
                )


# --------------------------------------------------------------------------- export


def corpus_rows(corpus: Corpus):
    include_enc = any(p.encode_energy is not None for p in corpus.points())
    header = list(REQUIRED_COLUMNS) + (["encode_energy_j"] if include_enc else [])
    rows = []
    for p in corpus.points():
        row = [p.sequence_id, p.resolution_height, p.crf, p.bitrate, p.quality, p.decode_energy]
        if include_enc:
            row.append(p.encode_energy)
        rows.append(row)
    return header, rows


def _lossless(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(int(value)) if value.is_integer() and abs(value) < 1e15 else repr(value)
    return str(value)


def dump_corpus(corpus: Corpus, schema="csv") -> str:
    """Serialize a corpus losslessly; `load_corpus` on the result gives it back."""
    header, rows = corpus_rows(corpus)
    if schema == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_lossless(v) for v in row])
        return buf.getvalue()
    if schema == "json":
        records = []
        for row in rows:
            rec = dict(zip(header, row))
            if rec.get("encode_energy_j", 0) is None:
                del rec["encode_energy_j"]
            records.append(rec)
        return json.dumps(records, indent=1) + "\n"
    raise ParseError(f"unknown schema {schema!r}; expected 'csv' or 'json'")


# --------------------------------------------------------------------------- summaries


def corpus_summary(corpus: Corpus) -> SummaryStats:
    """Per-resolution min/max/mean of bitrate, quality and decode energy."""
    pts = list(corpus.points()) if corpus is not None else []
    if not pts:
        raise EmptyCorpus("cannot summarise an empty corpus")
    by_res: dict[int, list[MeasurementPoint]] = {}
    for p in pts:
        by_res.setdefault(p.resolution_height, []).append(p)
    out = {}
    for h in sorted(by_res):
        grp = by_res[h]
        rate = Range.of([p.bitrate for p in grp])
        energy = Range.of([p.decode_energy for p in grp])
        out[h] = ResolutionSummary(
            resolution_height=h,
            count=len(grp),
            bitrate=rate,
            quality=Range.of([p.quality for p in grp]),
            decode_energy=energy,
            log10_bitrate=(math.log10(rate.min), math.log10(rate.max)),
            log10_energy=(math.log10(energy.min), math.log10(energy.max)),
        )
    return SummaryStats(sequence_count=len(corpus), point_count=len(pts), by_resolution=out)


def parameter_space_rows(corpus: Corpus):
    """Scatter data for the rate-quality and energy-quality parameter spaces."""
    for p in corpus.points():
        yield {
            "sequence_id": p.sequence_id,
            "resolution_height": p.resolution_height,
            "crf": p.crf,
            "bitrate_kbps": p.bitrate,
            "vmaf": p.quality,
            "decode_energy_j": p.decode_energy,
            "log10_bitrate": math.log10(p.bitrate),
            "log10_energy": math.log10(p.decode_energy),
        }


def subset(corpus: Corpus, sequence_ids: Iterable[str]) -> Corpus:
    keep = [s for s in corpus.sequences if s in set(sequence_ids)]
    return build_corpus([p for s in keep for p in corpus.sequences[s]])


def from_mapping_rows(rows: Iterable[Mapping]) -> Corpus:
    """Build a corpus from dict-like records using the schema field names."""
    return build_corpus(_row_to_point(dict(r), i) for i, r in enumerate(rows))
