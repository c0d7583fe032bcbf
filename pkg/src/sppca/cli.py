"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Machine-readable output goes to files or stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import datagen, evaluation
from . import io as sio
from .baseline_pca import PcaModel, fit_pca, pca_reconstruct, pca_transform
from .core import DataError, FitConfig, NumericalError
from .ppca import fit_ppca, reconstruct_latent, transform
from .rng import seeded_rng
from .sp_ppca import fit_sp_ppca

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _add_fit_flags(p):
    defaults = FitConfig(latent_dim=1)
    g = p.add_argument_group("fit configuration")
    g.add_argument("--latent-dim", type=int, required=True, help="latent dimension M")
    g.add_argument("--eta", type=float, help=f"threshold growth factor (default {defaults.eta})")
    g.add_argument("--inner-max-iters", type=int,
                   help=f"default {defaults.inner_max_iters}")
    g.add_argument("--outer-max-iters", type=int,
                   help=f"default {defaults.outer_max_iters}")
    g.add_argument("--em-iters-per-v-update", type=int,
                   help=f"default {defaults.em_iters_per_v_update}")
    g.add_argument("--rel-tol", type=float, help=f"default {defaults.rel_tol}")
    g.add_argument("--seed", type=int, help=f"default {defaults.seed}")
    g.add_argument("--loop-mode", choices=["nested", "outer_only"], help="default nested")
    g.add_argument("--sigma2-floor", type=float, help=f"default {defaults.sigma2_floor}")
    g.add_argument("--beta-init", type=float,
                   help="initial threshold (default: median loss after one EM pair)")
    g.add_argument("--no-stop-on-stable-selection", action="store_true",
                   help="keep growing the threshold after the selection stops changing")


def _fit_config(args) -> FitConfig:
    kw = {}
    for f in dataclasses.fields(FitConfig):
        val = getattr(args, f.name, None)
        if val is not None and f.name != "stop_on_stable_selection":
            kw[f.name] = val
    if getattr(args, "no_stop_on_stable_selection", False):
        kw["stop_on_stable_selection"] = False
    try:
        return FitConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sppca", description="Self-paced probabilistic PCA toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate synthetic data")
    p.add_argument("--gen", required=True, help="lowrank or line2d")
    p.add_argument("--n", type=int, default=100, help="samples (clean samples for line2d)")
    p.add_argument("--d", type=int, default=20, help="features (lowrank)")
    p.add_argument("--rank", type=int, default=3, help="rank (lowrank)")
    p.add_argument("--noise-scale", type=float, default=0.01, help="noise multiplier (lowrank)")
    p.add_argument("--outliers", type=int, default=0, help="appended gross outliers (line2d)")
    p.add_argument("--noise-std", type=float, default=3.0, help="vertical noise std (line2d)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--labels", help="write per-row outlier labels here")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("contaminate", help="inject outliers into a data CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--has-header", action="store_true")
    p.add_argument("--kind", required=True, choices=["gaussian", "uniform", "occlusion"])
    p.add_argument("--fraction", type=float, default=0.1, help="gaussian: fraction replaced")
    p.add_argument("--cov-scale", type=float, default=5.0, help="gaussian: covariance scale")
    p.add_argument("--mean", type=float, default=1.0, help="gaussian: mean of every feature")
    p.add_argument("--count", type=int, default=0, help="uniform/occlusion: rows affected")
    p.add_argument("--mode", choices=["replace", "append"],
                   help="default: replace for gaussian, append for uniform")
    p.add_argument("--image-side", type=int, help="occlusion: image side length")
    p.add_argument("--block-side", type=int, help="occlusion: block side length")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--labels")
    p.set_defaults(func=cmd_contaminate)

    p = sub.add_parser("fit", help="fit pca, ppca or sp-ppca")
    p.add_argument("--method", required=True, choices=["pca", "ppca", "sp-ppca"])
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--has-header", action="store_true")
    p.add_argument("--model", required=True, help="output model JSON")
    p.add_argument("--report", help="output fit report JSON")
    p.add_argument("--selection", help="output CSV of final inlier flags and losses (sp-ppca)")
    _add_fit_flags(p)
    p.set_defaults(func=cmd_fit)

    for name, func in (("transform", cmd_transform), ("reconstruct", cmd_reconstruct)):
        p = sub.add_parser(name, help=f"{name} data with a fitted model")
        p.add_argument("--model", required=True)
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--has-header", action="store_true")
        p.add_argument("--out", help="output CSV (default stdout)")
        if name == "reconstruct":
            p.add_argument("--from-latent", action="store_true",
                           help="input holds latent coordinates from `transform`")
        p.set_defaults(func=func)

    p = sub.add_parser("eval", help="relative Frobenius reconstruction error")
    p.add_argument("--test", required=True)
    p.add_argument("--recon", help="reconstruction CSV")
    p.add_argument("--model", help="model JSON (reconstructs --test itself)")
    p.add_argument("--has-header", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="run a multi-trial robustness experiment")
    p.add_argument("--spec", help="ExperimentSpec JSON file")
    p.add_argument("--gen", choices=["lowrank", "line2d"], help="inline spec: generator")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--rank", type=int)
    p.add_argument("--methods", help="comma-separated subset of pca,ppca,sp-ppca")
    p.add_argument("--latent-dim", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--fraction", type=float, help="inline spec: gaussian outlier fraction")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"], help="default: from --out suffix")
    p.add_argument("--timings", action="store_true", help="include wall-clock per fit")
    p.set_defaults(func=cmd_compare)
    return parser


def _load(path, has_header=False) -> np.ndarray:
    return sio.load_csv(path, has_header).values


def _write_matrix(x, out) -> None:
    if out:
        sio.save_csv(x, out)
    else:
        for row in np.atleast_2d(x):
            sys.stdout.write(",".join(repr(float(v)) for v in row) + "\n")


def cmd_synth(args) -> int:
    rng = seeded_rng(args.seed)
    if args.gen == "lowrank":
        x = datagen.gen_lowrank(args.n, args.d, args.rank, rng, noise_scale=args.noise_scale)
        labels = np.zeros(x.shape[0], dtype=bool)
    elif args.gen == "line2d":
        x, labels = datagen.gen_line2d(args.n, args.outliers, rng, noise_std=args.noise_std)
    else:
        raise UsageError(f"unknown generator {args.gen!r} (choose lowrank or line2d)")
    sio.save_csv(x, args.out)
    if args.labels:
        sio.save_labels(labels, args.labels)
    _note(f"synth: wrote {x.shape[0]}x{x.shape[1]} to {args.out} ({int(labels.sum())} outliers)")
    return EXIT_OK


def cmd_contaminate(args) -> int:
    x = _load(args.input, args.has_header)
    rng = seeded_rng(args.seed)
    if args.kind == "gaussian":
        x, labels = datagen.inject_gaussian_outliers(
            x, args.fraction, rng, cov_scale=args.cov_scale, mean=args.mean,
            mode=args.mode or "replace",
        )
    elif args.kind == "uniform":
        x, labels = datagen.inject_uniform_outliers(x, args.count, rng, mode=args.mode or "append")
    else:
        if args.image_side is None or args.block_side is None:
            raise UsageError("occlusion needs --image-side and --block-side")
        x, labels = datagen.occlude_blocks(x, args.image_side, args.block_side, args.count, rng)
    sio.save_csv(x, args.out)
    if args.labels:
        sio.save_labels(labels, args.labels)
    _note(f"contaminate: {int(labels.sum())} of {x.shape[0]} rows are outliers")
    return EXIT_OK


def cmd_fit(args) -> int:
    config = _fit_config(args)
    x = _load(args.input, args.has_header)
    rng = seeded_rng(config.seed)
    report = None
    if args.method == "pca":
        model = fit_pca(x, config.latent_dim)
        sio.save_model(model, args.model)
    elif args.method == "ppca":
        params, report = fit_ppca(x, config, rng)
        sio.save_model(params, args.model, method="ppca")
    else:
        result = fit_sp_ppca(x, config, rng)
        report = result.report
        sio.save_model(result.params, args.model, method="sp-ppca")
        if args.selection:
            sel = result.selection
            lines = ["v,loss"] + [f"{int(v)},{float(l)!r}" for v, l in zip(sel.v, sel.losses)]
            Path(args.selection).write_text("\n".join(lines) + "\n", encoding="utf-8")
        _note(
            f"fit: {result.selection.n_inliers}/{x.shape[0]} inliers, "
            f"beta={result.selection.beta:.6g}, stop={report.stop_reason}"
        )
    if args.report:
        payload = {"config": dataclasses.asdict(config)}
        payload["report"] = report.to_dict() if report else {"method": "pca"}
        sio.save_json(payload, args.report)
    _note(f"fit: wrote {args.method} model to {args.model}")
    return EXIT_OK


def _check_dim(model, d: int) -> None:
    expected = model.dim
    if expected != d:
        raise DataError(f"dimension mismatch: model expects D={expected}, data has D={d}")


def cmd_transform(args) -> int:
    model = sio.load_any_model(args.model)
    x = _load(args.input, args.has_header)
    _check_dim(model, x.shape[1])
    z = pca_transform(x, model) if isinstance(model, PcaModel) else transform(x, model)
    _write_matrix(z, args.out)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    model = sio.load_any_model(args.model)
    x = _load(args.input, args.has_header)
    if args.from_latent:
        if x.shape[1] != model.latent_dim:
            raise DataError(
                f"dimension mismatch: model expects M={model.latent_dim}, data has {x.shape[1]}"
            )
        if isinstance(model, PcaModel):
            xh = x @ model.components.T + model.mean
        else:
            xh = reconstruct_latent(x, model)
    else:
        _check_dim(model, x.shape[1])
        if isinstance(model, PcaModel):
            xh = pca_reconstruct(x, model)
        else:
            xh = reconstruct_latent(transform(x, model), model)
    _write_matrix(xh, args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    test = _load(args.test, args.has_header)
    if args.recon:
        xh = _load(args.recon, args.has_header)
    elif args.model:
        model = sio.load_any_model(args.model)
        _check_dim(model, test.shape[1])
        if isinstance(model, PcaModel):
            xh = pca_reconstruct(test, model)
        else:
            xh = reconstruct_latent(transform(test, model), model)
    else:
        raise UsageError("eval needs --recon or --model")
    print(f"{evaluation.reconstruction_error(test, xh):.10g}")
    return EXIT_OK


def _inline_spec(args) -> dict:
    d = {}
    if args.gen:
        d["generator"] = args.gen
    for key in ("n", "d", "rank", "latent_dim", "trials", "seed"):
        val = getattr(args, key)
        if val is not None:
            d[key] = val
    if args.methods:
        d["methods"] = [m.strip() for m in args.methods.split(",") if m.strip()]
    if args.fraction is not None:
        d["contamination"] = {"kind": "gaussian", "fraction": args.fraction}
    return d


def cmd_compare(args) -> int:
    spec_dict = {}
    if args.spec:
        try:
            spec_dict = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataError(f"{args.spec}: invalid JSON ({exc})") from exc
    spec_dict.update(_inline_spec(args))
    spec = evaluation.ExperimentSpec.from_dict(spec_dict)
    fmt = args.format or ("json" if args.out.endswith(".json") else "csv")
    result = evaluation.run_experiment(spec)
    evaluation.export_results(result, args.out, fmt, include_timings=args.timings)
    for name in spec.methods:
        _note(f"compare: {name}: mean error {result.mean(name):.6g} (std {result.std(name):.3g})")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        _note(f"sppca: error: {exc}")
        return EXIT_USAGE
    except NumericalError as exc:
        _note(f"sppca: numerical failure: {exc}")
        return EXIT_NUMERICAL
    except (DataError, OSError) as exc:
        _note(f"sppca: data error: {exc}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
