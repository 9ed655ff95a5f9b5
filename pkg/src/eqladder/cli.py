"""Command-line front-end.

Every subcommand writes plain CSV/JSON; floats carry six significant digits
so outputs are byte-stable across runs. Errors print one line,
``eqladder: error: <Kind>: <message>``, on stderr and exit with the error's
code (see `eqladder.exceptions`).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import os
import sys
import warnings

from . import __version__
from .evaluation import (
    PLOT_PANELS,
    corpus_eval,
    mean_ladder,
    mean_ladder_rows,
    plot_rows,
    table_row,
)
from .exceptions import EmptyIntersection, InvalidConfig, LadderError, ParseError
from .ingest import corpus_summary, dump_corpus, load_corpus, parameter_space_rows
from .interp import curve_rows, sample_curves
from .ladder import LadderConfig, Method, ladder_rows
from .pareto import Domain, front_rows, mean_composition
from .pipeline import run_pipeline
from .serialize import (
    ladder_filename,
    ladder_to_dict,
    load_ladder_dir,
    write_atomic,
    write_csv,
    write_json,
)
from .synth import SynthSpec, load_spec, make_synthetic_corpus
from .validation import check_space, check_step

PROG = "eqladder"

# config-file key and argparse dest -> LadderConfig field (step, space, jobs are not ladder fields)
OPTIONS = {
    "step": "step",
    "space": "space",
    "rate_min": "rate_min",
    "rate_max": "rate_max",
    "rate_band": "rate_band",
    "q_min": "quality_min",
    "q_max": "quality_max",
    "q_step": "quality_step",
    "q_band": "quality_band",
    "fallback": "fallback",
    "jobs": "jobs",
}
DEFAULTS = {
    "step": 0.1,
    "space": "linear",
    "jobs": 1,
    **{k: getattr(LadderConfig(), v) for k, v in OPTIONS.items() if hasattr(LadderConfig, v)},
}


# --------------------------------------------------------------------------- config


def resolve_options(args):
    """Defaults, overridden by the JSON config file, overridden by flags."""
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise ParseError(f"no such file: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"{args.config}: invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise InvalidConfig(f"{args.config}: config must be a JSON object")
        for key, value in data.items():
            norm = key.replace("-", "_")
            if norm not in OPTIONS:
                raise InvalidConfig(f"{args.config}: unknown option {key!r}")
            opts[norm] = value
    for key in OPTIONS:
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    return opts


def ladder_config(opts):
    return LadderConfig.from_dict(
        {field: opts[key] for key, field in OPTIONS.items() if hasattr(LadderConfig, field)}
    )


def _jobs(opts):
    jobs = opts["jobs"]
    if not isinstance(jobs, int) or isinstance(jobs, bool) or jobs < 1:
        raise InvalidConfig(f"jobs must be a positive integer, got {jobs!r}")
    return jobs


def _created():
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is None:
        return None
    return _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc).isoformat()


def input_record(path):
    """Content digest (plus base name for files), so the manifest does not
    depend on where inputs or outputs live. Directories hash their ladder files."""
    digest = hashlib.sha256()
    if os.path.isdir(path):
        root = os.path.join(path, "ladders") if os.path.isdir(os.path.join(path, "ladders")) else path
        for name in sorted(os.listdir(root)):
            if name.endswith(".json") and name.count("__") == 2:
                digest.update(name.encode())
                with open(os.path.join(root, name), "rb") as fh:
                    digest.update(fh.read())
        return {"kind": "ladder_dir", "sha256": digest.hexdigest()}
    with open(path, "rb") as fh:
        digest.update(fh.read())
    return {"kind": "file", "name": os.path.basename(path), "sha256": digest.hexdigest()}


def write_manifest(out_dir, command, inputs, config, outputs, record_time=False):
    created = _created()
    if record_time and created is None:
        created = _dt.datetime.now(tz=_dt.timezone.utc).isoformat(timespec="seconds")
    manifest = {
        "tool": PROG,
        "version": __version__,
        "command": command,
        "inputs": [input_record(p) for p in inputs],
        "config": config,
        "output_dir": ".",
        "outputs": sorted(outputs),
        "created": created,
    }
    write_json(os.path.join(out_dir, "manifest.json"), manifest)
    return manifest


def load_manifest(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# --------------------------------------------------------------------------- commands


def cmd_synth(args):
    spec = load_spec(args.spec) if args.spec else SynthSpec()
    overrides = {"rng_seed": args.seed, "sequence_count": args.sequences, "noise": args.noise}
    for key, value in overrides.items():
        if value is not None:
            setattr(spec, key, value)
    corpus = make_synthetic_corpus(spec.validate())
    schema = args.format or ("json" if str(args.out).endswith(".json") else "csv")
    write_atomic(args.out, dump_corpus(corpus, schema))
    return 0


def cmd_ingest_check(args):
    corpus = load_corpus(args.corpus, schema=args.schema)
    summary = corpus_summary(corpus)
    rows = []
    for h, s in summary.by_resolution.items():
        rows.append(
            {
                "resolution_height": h,
                "count": s.count,
                "bitrate_min": s.bitrate.min,
                "bitrate_max": s.bitrate.max,
                "bitrate_mean": s.bitrate.mean,
                "vmaf_min": s.quality.min,
                "vmaf_max": s.quality.max,
                "vmaf_mean": s.quality.mean,
                "energy_min": s.decode_energy.min,
                "energy_max": s.decode_energy.max,
                "energy_mean": s.decode_energy.mean,
                "log10_bitrate_min": s.log10_bitrate[0],
                "log10_bitrate_max": s.log10_bitrate[1],
                "log10_energy_min": s.log10_energy[0],
                "log10_energy_max": s.log10_energy[1],
            }
        )
    print(
        f"ok: {summary.sequence_count} sequences, {summary.point_count} points, "
        f"resolutions {list(corpus.resolutions)}, crf grid {[float(c) for c in corpus.crf_grid]}"
    )
    if args.out:
        write_csv(os.path.join(args.out, "summary.csv"), rows)
        write_csv(os.path.join(args.out, "parameter_space.csv"), parameter_space_rows(corpus))
        write_manifest(args.out, "ingest-check", [args.corpus], {},
                       ["summary.csv", "parameter_space.csv"], args.record_time)
    return 0


def _load_for_pipeline(args):
    opts = resolve_options(args)
    corpus = load_corpus(args.corpus, schema=getattr(args, "schema", None))
    step = check_step(opts["step"], corpus.crf_grid)
    space = check_space(opts["space"])
    return opts, corpus, step, space


def cmd_curves(args):
    opts, corpus, step, space = _load_for_pipeline(args)
    curves = sample_curves(corpus, step=step, space=space)
    write_csv(args.out, curve_rows(curves))
    return 0


def _write_fronts(out_dir, results, resolutions):
    write_csv(
        os.path.join(out_dir, "fronts.csv"),
        (row for res in results for d in Domain for row in front_rows(res.fronts[d])),
        header=["sequence_id", "domain", "resolution_height", "crf", "bitrate_kbps", "vmaf",
                "decode_energy_j"],
    )
    comp_rows = []
    for res in results:
        for d in Domain:
            for h in sorted(resolutions, reverse=True):
                comp_rows.append({
                    "sequence_id": res.sequence_id,
                    "domain": d.value,
                    "resolution_height": h,
                    "share": res.composition[d].share.get(h, 0.0),
                })
    for d in Domain:
        for h, share in mean_composition((r.composition[d] for r in results), resolutions).items():
            comp_rows.append(
                {"sequence_id": "__mean__", "domain": d.value, "resolution_height": h,
                 "share": share}
            )
    write_csv(os.path.join(out_dir, "composition.csv"), comp_rows)
    return ["fronts.csv", "composition.csv"]


def _pipeline_config(opts, step, space, config):
    return {"step": step, "space": space, **config.to_dict()}


def cmd_fronts(args):
    opts, corpus, step, space = _load_for_pipeline(args)
    config = ladder_config(opts)
    results = run_pipeline(corpus, step=step, space=space, config=config, jobs=_jobs(opts))
    outputs = _write_fronts(args.out, results, corpus.resolutions)
    write_manifest(args.out, "fronts", [args.corpus], _pipeline_config(opts, step, space, config),
                   outputs, args.record_time)
    return 0


def run_ladders(corpus_path, out_dir, opts, schema=None, record_time=False):
    corpus = load_corpus(corpus_path, schema=schema)
    step = check_step(opts["step"], corpus.crf_grid)
    space = check_space(opts["space"])
    config = ladder_config(opts)
    results = run_pipeline(corpus, step=step, space=space, config=config, jobs=_jobs(opts))
    outputs = _write_fronts(out_dir, results, corpus.resolutions)
    flat = []
    for res in results:
        for (method, dom) in ((m, d) for m in Method for d in Domain):
            lad = res.ladders[(method, dom)]
            name = os.path.join("ladders", ladder_filename(lad))
            write_json(os.path.join(out_dir, name), ladder_to_dict(lad))
            outputs.append(name)
            flat.extend(ladder_rows(lad))
    write_csv(os.path.join(out_dir, "ladders.csv"), flat)
    outputs.append("ladders.csv")
    write_manifest(out_dir, "ladders", [corpus_path], _pipeline_config(opts, step, space, config),
                   outputs, record_time)
    return results


def cmd_ladders(args):
    run_ladders(args.corpus, args.out, resolve_options(args), args.schema, args.record_time)
    return 0


def _label(method, dom):
    head = "Rate-driven" if method is Method.RATE_DRIVEN else "Quality-driven"
    return f"{head} {dom.value}-PF"


def run_eval(ladder_dir, out_dir, reference_dir=None, record_time=False):
    proposed = load_ladder_dir(ladder_dir)
    if reference_dir is None:
        reference = proposed
        pairs = [((m, Domain.RQ), (m, Domain.EQ)) for m in Method]
    else:
        reference = load_ladder_dir(reference_dir)
        pairs = [(k, k) for k in sorted(proposed, key=lambda k: (k[0].value, k[1].value))]

    table, report = [], {"std_convention": "population", "pairing": "rung index, both filled",
                         "comparisons": []}
    for ref_key, prop_key in pairs:
        if ref_key not in reference or prop_key not in proposed:
            continue
        result = corpus_eval(reference[ref_key], proposed[prop_key])
        label = _label(*prop_key)
        table.append(table_row(label, result))
        report["comparisons"].append({
            "ladder": label,
            "reference": _label(*ref_key),
            "mean": _diff_dict(result.mean),
            "stddev": _diff_dict(result.stddev),
            "excluded": list(result.excluded),
            "per_sequence": {s: _diff_dict(d) for s, d in result.per_sequence.items()},
        })
    if not table:
        raise EmptyIntersection("no ladder set has a counterpart to compare with")
    if reference_dir is None:
        report["reference_dir"] = None
    any_config = next(iter(next(iter(proposed.values())).values())).config
    report["config"] = any_config.to_dict()

    outputs = ["table1.csv", "eval_report.json", "mean_ladders.csv"]
    write_csv(os.path.join(out_dir, "table1.csv"), table)
    write_json(os.path.join(out_dir, "eval_report.json"), report)

    means = [mean_ladder(list(proposed[k].values()))
             for k in sorted(proposed, key=lambda k: (k[0].value, k[1].value))]
    write_csv(os.path.join(out_dir, "mean_ladders.csv"),
              (row for ml in means for row in mean_ladder_rows(ml)))
    for panel in PLOT_PANELS:
        name = f"plot_{panel.lower()}.csv"
        write_csv(os.path.join(out_dir, name), (row for ml in means for row in plot_rows(ml, panel)))
        outputs.append(name)
    inputs = [ladder_dir] + ([reference_dir] if reference_dir else [])
    write_manifest(out_dir, "eval", inputs, {}, outputs, record_time)
    return table


def _diff_dict(d):
    return {
        "delta_rate": d.delta_rate,
        "delta_quality": d.delta_quality,
        "delta_energy": d.delta_energy,
        "rungs_compared": d.rungs_compared,
    }


def cmd_eval(args):
    run_eval(args.ladder_dir, args.out, args.reference_dir, args.record_time)
    return 0


def cmd_report(args):
    opts = resolve_options(args)
    run_ladders(args.corpus, args.out, opts, args.schema, args.record_time)
    eval_dir = os.path.join(args.out, "eval")
    table = run_eval(args.out, eval_dir, record_time=args.record_time)
    for row in table:
        print(
            f"{row['ladder']}: delta_rate {row['delta_rate_mean']:+.2%} +/- {row['delta_rate_std']:.2%}, "
            f"delta_q {row['delta_q_mean']:+.2%} +/- {row['delta_q_std']:.2%}, "
            f"delta_e {row['delta_e_mean']:+.2%} +/- {row['delta_e_std']:.2%}"
        )
    return 0


# --------------------------------------------------------------------------- parser


def _pipeline_flags(p):
    p.add_argument("--config", help="JSON file mirroring the flags; flags win")
    p.add_argument("--step", type=float, help="CRF sampling step (default 0.1)")
    p.add_argument("--space", choices=["linear", "log"],
                   help="interpolate bitrate/energy in linear or log10 space")
    p.add_argument("--rate-min", dest="rate_min", type=float)
    p.add_argument("--rate-max", dest="rate_max", type=float)
    p.add_argument("--rate-band", dest="rate_band", type=float)
    p.add_argument("--q-min", dest="q_min", type=float)
    p.add_argument("--q-max", dest="q_max", type=float)
    p.add_argument("--q-step", dest="q_step", type=float)
    p.add_argument("--q-band", dest="q_band", type=float)
    p.add_argument("--fallback", choices=["skip", "nearest"])
    p.add_argument("--jobs", type=int, help="sequences processed concurrently")
    p.add_argument("--schema", choices=["csv", "json"], help="input format (default: extension)")


def build_parser():
    parser = argparse.ArgumentParser(prog=PROG, description="Rate/energy-quality bitrate ladders.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic measurement corpus")
    p.add_argument("--spec", help="JSON synthetic corpus specification")
    p.add_argument("--seed", type=int)
    p.add_argument("--sequences", type=int)
    p.add_argument("--noise", type=float)
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest-check", help="validate a corpus and summarise it")
    p.add_argument("corpus")
    p.add_argument("--schema", choices=["csv", "json"])
    p.add_argument("--out", help="directory for summary and parameter-space CSVs")
    p.set_defaults(func=cmd_ingest_check)

    p = sub.add_parser("curves", help="dump Akima-sampled curves")
    p.add_argument("corpus")
    _pipeline_flags(p)
    p.add_argument("--out", required=True, help="output CSV file")
    p.set_defaults(func=cmd_curves)

    for name, func, helptext in (
        ("fronts", cmd_fronts, "RQ and EQ Pareto fronts with composition"),
        ("ladders", cmd_ladders, "fronts plus the four ladders per sequence"),
        ("report", cmd_report, "ladders followed by evaluation"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("corpus")
        _pipeline_flags(p)
        p.add_argument("--out", required=True, help="output directory")
        p.set_defaults(func=func)

    p = sub.add_parser("eval", help="compare ladders and aggregate mean ladders")
    p.add_argument("ladder_dir")
    p.add_argument("--reference-dir", dest="reference_dir",
                   help="compare each ladder set with the same set from this directory")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    for p in sub.choices.values():
        p.add_argument("--record-time", dest="record_time", action="store_true",
                       help="store the wall-clock time in manifest.json")
    return parser


def _warning_line(message, category, filename, lineno, line=None):
    return f"{PROG}: warning: {category.__name__}: {message}\n"


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    warnings.formatwarning = _warning_line
    try:
        return args.func(args)
    except LadderError as exc:
        print(f"{PROG}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"{PROG}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 11


if __name__ == "__main__":
    sys.exit(main())
