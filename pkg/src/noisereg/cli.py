"""Command-line surface: `noisereg anova|cv|synth`.

Every run writes a manifest (subcommand, flags, seed, input digests, package
version) next to its outputs so results can be reproduced byte for byte.

Exit codes: 0 success, 2 usage or input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cv import cvresult_to_json, curves_to_csv, make_folds, nested_kfold_cv
from .data_model import CsvSchema, IngestError, load_replicated_csv
from .synth import ModelConstraintError, ModelSpec, generate_dataset, toy_spec
from .variance import dataset_anova

USAGE_ERROR = 2
NUMERIC_ERROR = 3


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(outdir: Path, subcommand: str, flags: dict, seed, inputs):
    manifest = {
        "subcommand": subcommand,
        "flags": {k: v for k, v in sorted(flags.items())},
        "seed": seed,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "version": __version__,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


def _schema_from_args(args) -> CsvSchema:
    predictors = None
    if args.predictors:
        predictors = [c.strip() for c in args.predictors.split(",") if c.strip()]
    return CsvSchema(sample=args.sample_col, replicate=args.replicate_col,
                     response=args.response_col, predictors=predictors)


def _add_schema_flags(p):
    p.add_argument("--sample-col", default="sample")
    p.add_argument("--replicate-col", default="replicate")
    p.add_argument("--response-col", default="y")
    p.add_argument("--predictors", default=None,
                   help="comma-separated predictor columns (default: all others)")


def cmd_anova(args) -> int:
    try:
        ds = load_replicated_csv(args.input, _schema_from_args(args))
        if ds.r < 2:
            print("error: replicates < 2; ANOVA needs replication", file=sys.stderr)
            return USAGE_ERROR
        per_var, resp = dataset_anova(ds)
    except (IngestError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR

    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    names = _schema_from_args(args).resolve_predictors(_header(args.input))
    with open(outdir / "anova.csv", "w") as fh:
        fh.write("variable,s_delta_sq,s_nu_sq,snr\n")
        for name, est in zip(names, per_var):
            snr = est.s_nu_sq / est.s_delta_sq if est.s_delta_sq > 0 else float("inf")
            fh.write(f"{name},{_fmt(est.s_delta_sq)},{_fmt(est.s_nu_sq)},{_fmt(snr)}\n")
        if resp is not None:
            snr = resp.s_nu_sq / resp.s_delta_sq if resp.s_delta_sq > 0 else float("inf")
            fh.write(f"{args.response_col},{_fmt(resp.s_delta_sq)},"
                     f"{_fmt(resp.s_nu_sq)},{_fmt(snr)}\n")
    _write_manifest(outdir, "anova", _flags(args), None, [args.input])
    return 0


def _header(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return fh.readline().rstrip("\n").split(",")


def cmd_cv(args) -> int:
    try:
        ds = load_replicated_csv(args.input, _schema_from_args(args))
        if args.k < 2:
            print("error: --k must be >= 2", file=sys.stderr)
            return USAGE_ERROR
        plan = make_folds(ds, k=args.k, outer_loops=args.outer_loops, seed=args.seed)
    except (IngestError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR

    method = args.method.replace("-", "_")
    config = {}
    if args.sigma_eps is not None:
        config["sigma_eps"] = args.sigma_eps
    if args.n_lambda is not None:
        config["n_lambda"] = args.n_lambda
    try:
        res = nested_kfold_cv(ds, plan, method=method, scaled=args.scaled,
                              refit_ridge=args.refit_ridge, config=config)
    except (ValueError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except Exception as exc:  # solver breakdowns
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERIC_ERROR
    if res.unreliable:
        print(f"numerical failure: {res.failed_models} of {plan.n_models} "
              "folds failed (over the 10% threshold)", file=sys.stderr)
        return NUMERIC_ERROR

    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "curves.csv", "w") as fh:
        curves_to_csv(res, fh)
    (outdir / "result.json").write_text(cvresult_to_json(res))
    _write_manifest(outdir, "cv", _flags(args), args.seed, [args.input])
    return 0


def cmd_synth(args) -> int:
    try:
        if args.toy:
            spec = toy_spec(args.n, seed=args.seed)
        elif args.spec:
            doc = json.loads(Path(args.spec).read_text())
            spec = ModelSpec(
                n=int(doc["n"]), p=int(doc["p"]), r=int(doc["r"]),
                beta_true=np.asarray(doc["beta_true"], dtype=float),
                sigma_eps=float(doc["sigma_eps"]),
                sigma_delta=np.asarray(doc["sigma_delta"], dtype=float),
                v_covariance=np.asarray(doc["v_covariance"], dtype=float),
                seed=args.seed,
                r_y=doc.get("r_y"),
                require_unit_response=doc.get("require_unit_response", True),
            )
        else:
            print("error: pass --toy or --spec FILE", file=sys.stderr)
            return USAGE_ERROR
        if spec.r_y != spec.r:
            print("error: long-form CSV output needs equal design/response "
                  "replicate counts", file=sys.stderr)
            return USAGE_ERROR
        ds, truth = generate_dataset(spec)
    except ModelConstraintError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: bad spec: {exc}", file=sys.stderr)
        return USAGE_ERROR

    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    cols = [f"x{j + 1:03d}" for j in range(ds.p)]
    with open(out, "w", newline="\n") as fh:
        fh.write("sample,replicate," + ",".join(cols) + ",y\n")
        for i, sid in enumerate(ds.sample_ids):
            for rep in range(ds.r):
                row = [sid, str(rep + 1)]
                row += [_fmt(v) for v in ds.design_replicates[i, rep]]
                row.append(_fmt(ds.response_replicates[i, rep]))
                fh.write(",".join(row) + "\n")
    sidecar = {
        "beta_true": [float(v) for v in truth["beta_true"]],
        "sigma_delta": [float(v) for v in spec.sigma_delta],
        "sigma_eps": float(spec.sigma_eps),
        "n": spec.n, "p": spec.p, "r": spec.r, "seed": args.seed,
    }
    out.with_suffix(".truth.json").write_text(json.dumps(sidecar, indent=2, sort_keys=True))
    _write_manifest(out.parent, "synth", _flags(args), args.seed, [out])
    return 0


def _flags(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisereg",
        description="Sparse regression with uncertainty-scaled designs")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("anova", help="per-variable variance components")
    p.add_argument("--input", required=True)
    _add_schema_flags(p)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_anova)

    p = sub.add_parser("cv", help="nested k-fold cross validation")
    p.add_argument("--input", required=True)
    _add_schema_flags(p)
    p.add_argument("--method", required=True,
                   choices=["fs", "lars", "dantzig", "ridge-all"])
    p.add_argument("--scaled", action="store_true")
    p.add_argument("--refit-ridge", action="store_true")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--outer-loops", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma-eps", type=float, default=None)
    p.add_argument("--n-lambda", type=int, default=None)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("synth", help="generate a replicated synthetic dataset")
    p.add_argument("--toy", action="store_true",
                   help="the 3-predictor redundant-design example")
    p.add_argument("--spec", default=None, help="JSON model spec file")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
