"""Text output: stable float formatting, atomic writes, ladder JSON."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile

from .exceptions import ParseError
from .interp import SampledPoint
from .ladder import Ladder, LadderConfig, LadderRung, Method, RungStatus
from .pareto import Domain

SIG_DIGITS = 6


def fmt(value):
    """Six significant digits for floats; everything else via str()."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        if value == 0:
            return "0"
        return f"{value:.{SIG_DIGITS}g}"
    if value is None:
        return ""
    return str(value)


def round_sig(value):
    if isinstance(value, float):
        return float(fmt(value))
    if isinstance(value, dict):
        return {k: round_sig(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_sig(v) for v in value]
    return value


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temp file in the same directory + rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(rows, header=None):
    rows = list(rows)
    if header is None:
        header = list(rows[0]) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(row.get(col)) for col in header])
    return buf.getvalue()


def write_csv(path, rows, header=None):
    write_atomic(path, csv_text(rows, header))


def json_text(obj):
    return json.dumps(round_sig(obj), indent=2, sort_keys=False) + "\n"


def write_json(path, obj):
    write_atomic(path, json_text(obj))


# --------------------------------------------------------------------------- ladders


def _point_dict(p: SampledPoint):
    return {
        "resolution_height": p.resolution_height,
        "crf": p.crf,
        "bitrate_kbps": p.bitrate,
        "vmaf": p.quality,
        "decode_energy_j": p.decode_energy,
    }


def ladder_to_dict(ladder: Ladder):
    return {
        "sequence_id": ladder.sequence_id,
        "method": ladder.method.value,
        "source_domain": ladder.source_domain.value,
        "config": ladder.config.to_dict(),
        "rungs": [
            {
                "index": r.index,
                "target": r.target,
                "status": r.status.value,
                "point": None if r.chosen is None else _point_dict(r.chosen),
            }
            for r in ladder.rungs
        ],
    }


def ladder_from_dict(data) -> Ladder:
    try:
        rungs = []
        for r in data["rungs"]:
            p = r.get("point")
            chosen = None
            if p is not None:
                chosen = SampledPoint(
                    crf=float(p["crf"]),
                    bitrate=float(p["bitrate_kbps"]),
                    quality=float(p["vmaf"]),
                    decode_energy=float(p["decode_energy_j"]),
                    resolution_height=int(p["resolution_height"]),
                )
            rungs.append(
                LadderRung(
                    index=int(r["index"]),
                    target=float(r["target"]),
                    status=RungStatus(r["status"]),
                    chosen=chosen,
                )
            )
        return Ladder(
            sequence_id=str(data["sequence_id"]),
            method=Method.parse(data["method"]),
            source_domain=Domain.parse(data["source_domain"]),
            rungs=tuple(rungs),
            config=LadderConfig.from_dict(data["config"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed ladder record: {exc}") from None


def ladder_filename(ladder: Ladder):
    return f"{ladder.sequence_id}__{ladder.method.value}__{ladder.source_domain.value}.json"


def load_ladder(path) -> Ladder:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    return ladder_from_dict(data)


def load_ladder_dir(directory):
    """All ladder JSON files under ``directory``, keyed by (method, domain) then sequence."""
    if not os.path.isdir(directory):
        raise ParseError(f"no such directory: {directory}")
    sub = os.path.join(directory, "ladders")
    root = sub if os.path.isdir(sub) else directory
    out: dict = {}
    for name in sorted(os.listdir(root)):
        if not name.endswith(".json") or name.count("__") != 2:
            continue
        lad = load_ladder(os.path.join(root, name))
        out.setdefault((lad.method, lad.source_domain), {})[lad.sequence_id] = lad
    if not out:
        raise ParseError(f"no ladder files found in {directory}")
    return out
