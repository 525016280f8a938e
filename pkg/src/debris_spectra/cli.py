"""Command-line front end wiring the modules into the full pipeline:

    debris-spectra simulate | indices | clean | explore | select-features
                   | cluster | report

Every subcommand is re-runnable from persisted intermediates. Exit codes:
0 success, 2 usage/config/schema error, 3 I/O error, 4 numeric failure.
Artifacts never embed absolute paths or timestamps, so identical configs
produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import indices as indices_mod
from . import kmeans as kmeans_mod
from . import prep, stats
from .bands import BAND_BY_NAME, CAMPAIGN_POLYMERS, FEATURE_NAMES
from .errors import ConfigError, DebrisSpectraError, FeatureSetMismatch
from .forest import FeatureSet, build_feature_sets, fit_forest, fixed_feature_sets
from .jsonio import canonical_json, dump_json, load_json
from .rasters import RESAMPLERS, write_raster
from .records import Dataset, read_pixel_table, write_pixel_table
from .scenes import COVERAGE_FRACTIONS, build_scene, campaign_dataset, default_campaign
from .spectra import builtin_default_library, load_library

THREADS_ENV = "DEBRIS_SPECTRA_THREADS"


@dataclass
class RunConfig:
    seed: int = 0
    library_path: str | None = None
    polymers: tuple[str, ...] = CAMPAIGN_POLYMERS
    coverages: tuple[float, ...] = COVERAGE_FRACTIONS
    noise_sigma: float = 0.0
    resampler: str = "bilinear"
    feature_sets: tuple[str, ...] = ("A", "B", "C", "D")
    k_values: tuple[int, ...] = (3, 4, 5)
    scaling: bool = False

    @classmethod
    def from_json_file(cls, path) -> "RunConfig":
        obj = load_json(path)
        if not isinstance(obj, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
        cfg = cls()
        for key, value in obj.items():
            if key in ("polymers", "feature_sets"):
                value = tuple(str(v) for v in value)
            elif key == "coverages":
                value = tuple(float(v) for v in value)
            elif key == "k_values":
                value = tuple(int(v) for v in value)
            setattr(cfg, key, value)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.resampler not in RESAMPLERS:
            raise ConfigError(f"resampler must be one of {RESAMPLERS}")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")
        bad = [c for c in self.coverages if c not in COVERAGE_FRACTIONS]
        if bad:
            raise ConfigError(f"coverages must be from {COVERAGE_FRACTIONS}, got {bad}")
        if not self.k_values:
            raise ConfigError("k_values must be nonempty")

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "library_path": self.library_path,
            "polymers": list(self.polymers),
            "coverages": list(self.coverages),
            "noise_sigma": self.noise_sigma,
            "resampler": self.resampler,
            "feature_sets": list(self.feature_sets),
            "k_values": list(self.k_values),
            "scaling": self.scaling,
        }

    def digest(self) -> str:
        return hashlib.sha256(canonical_json(self.to_json()).encode()).hexdigest()


def _thread_count(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return 1


def _load_library(cfg: RunConfig):
    if cfg.library_path:
        return load_library(cfg.library_path)
    return builtin_default_library()


def _write_labels_csv(path, labels, coverage_grid, polymer, scale):
    lines = ["row,col,label,polymer,coverage_pct"]
    n = labels.shape[0]
    for r in range(n):
        for c in range(n):
            label = labels[r, c]
            if label == "Plastic":
                cov = repr(float(100.0 * coverage_grid[r, c] * scale))
                lines.append(f"{r},{c},{label},{polymer},{cov}")
            else:
                lines.append(f"{r},{c},{label},,")
    lines.append("")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines))


def cmd_simulate(args) -> int:
    cfg = RunConfig.from_json_file(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.noise_sigma is not None:
        cfg.noise_sigma = args.noise_sigma
    if args.resampler is not None:
        cfg.resampler = args.resampler
    if args.library is not None:
        cfg.library_path = args.library
    if args.polymers:
        cfg.polymers = tuple(args.polymers)
    if args.coverages:
        cfg.coverages = tuple(args.coverages)
    cfg.validate()

    library = _load_library(cfg)
    specs = default_campaign(
        library,
        cfg.seed,
        polymers=cfg.polymers,
        coverages=cfg.coverages,
        noise_sigma=cfg.noise_sigma,
    )

    out = Path(args.out)
    rasters_dir = out / "rasters"
    labels_dir = out / "labels"
    rasters_dir.mkdir(parents=True, exist_ok=True)
    labels_dir.mkdir(parents=True, exist_ok=True)

    workers = _thread_count(args)
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            stacks = list(pool.map(build_scene, specs))
    else:
        stacks = [build_scene(spec) for spec in specs]

    raster_files = []
    for stack in stacks:
        for band_name in sorted(stack.rasters_10m) + sorted(stack.rasters_20m):
            raster = (
                stack.rasters_10m.get(band_name) or stack.rasters_20m[band_name]
            )
            code = BAND_BY_NAME[band_name].sentinel_code
            fname = f"{stack.scene_id}_{code}.bin"
            write_raster(raster, rasters_dir / fname)
            raster_files.append(f"rasters/{fname}")
        _write_labels_csv(
            labels_dir / f"{stack.scene_id}_labels_10m.csv",
            stack.labels_10m,
            stack.coverage_10m,
            stack.spec.polymer,
            1.0,
        )
        cov20 = np.zeros(stack.labels_20m.shape)
        plastic20 = stack.labels_20m == "Plastic"
        cov20[plastic20] = stack.spec.coverage_fraction / 4.0
        _write_labels_csv(
            labels_dir / f"{stack.scene_id}_labels_20m.csv",
            stack.labels_20m,
            cov20,
            stack.spec.polymer,
            1.0,
        )

    dataset = campaign_dataset(stacks, cfg.resampler)
    dataset.provenance["campaign_seed"] = str(cfg.seed)
    dataset.provenance["config_digest"] = cfg.digest()
    write_pixel_table(dataset, out / "dataset.csv")

    dump_json(
        {
            "config": cfg.to_json(),
            "config_digest": cfg.digest(),
            "scenes": [s.scene_id for s in specs],
            "raster_files": sorted(raster_files),
            "dataset": "dataset.csv",
            "records": len(dataset),
        },
        out / "manifest.json",
    )
    print(f"simulate: {len(specs)} scenes, {len(raster_files)} rasters, {len(dataset)} records")
    return 0


def cmd_indices(args) -> int:
    dataset = read_pixel_table(args.input)
    write_pixel_table(indices_mod.add_indices(dataset), args.out)
    print(f"indices: {len(dataset)} records augmented")
    return 0


def cmd_clean(args) -> int:
    dataset = read_pixel_table(args.input)
    cleaned, report = prep.clean(dataset)
    write_pixel_table(cleaned, args.out)
    if args.report:
        dump_json(report.to_json(), args.report)
    print(f"clean: dropped {report.dropped_total}, retained {report.retained}")
    return 0


def cmd_explore(args) -> int:
    dataset = read_pixel_table(args.input)
    features = list(FEATURE_NAMES) if dataset.indices is not None else list(FEATURE_NAMES[:10])
    report: dict = {"features": features}

    sources = sorted(set(np.asarray(dataset.sources).tolist()))
    report["sources"] = sources
    if len(sources) == 2:
        sim = dataset.subset(np.asarray(dataset.sources) == "simulated")
        obs = dataset.subset(np.asarray(dataset.sources) == "observed")
        report["ks"] = {
            "all_classes": _ks_table(sim, obs, features),
            "per_class": {
                label: _ks_table(
                    sim.subset(np.asarray(sim.labels) == label),
                    obs.subset(np.asarray(obs.labels) == label),
                    features,
                )
                for label in sorted(set(sim.labels) & set(obs.labels))
            },
        }

    report["correlation"] = {"all": stats.pearson_matrix(dataset, features).to_json()}
    report["correlation"]["per_class"] = {
        label: stats.pearson_matrix(dataset, features, class_filter=label).to_json()
        for label in sorted(set(np.asarray(dataset.labels).tolist()))
    }
    report["class_summary"] = stats.class_summary(dataset, features).to_json()
    signatures = {}
    for label in sorted(set(np.asarray(dataset.labels).tolist())):
        signatures[label] = stats.mean_signature(dataset, label)
    if "Plastic" in signatures:
        signatures["Plastic_min_coverage_50"] = stats.mean_signature(
            dataset, "Plastic", min_coverage_pct=50.0
        )
    report["mean_signatures"] = signatures
    dump_json(report, args.report)
    print(f"explore: report written for {len(dataset)} records")
    return 0


def _ks_table(a: Dataset, b: Dataset, features) -> dict:
    out = {}
    if len(a) == 0 or len(b) == 0:
        return out
    A = a.feature_matrix(features)
    B = b.feature_matrix(features)
    for j, f in enumerate(features):
        r = stats.ks_two_sample(A[:, j], B[:, j])
        out[f] = {"d": r.d_statistic, "p": r.p_value, "n": r.n, "m": r.m}
    return out


def cmd_select_features(args) -> int:
    dataset = read_pixel_table(args.input)
    features = list(FEATURE_NAMES)
    full = fit_forest(dataset, features, n_trees=args.n_trees, seed=args.seed)

    labels = np.asarray(dataset.labels)
    wp = dataset.subset((labels == "Water") | (labels == "Plastic"))
    water_plastic = fit_forest(wp, features, n_trees=args.n_trees, seed=args.seed)

    corr = stats.pearson_matrix(dataset, features)
    per_class = [
        stats.pearson_matrix(dataset, features, class_filter=label)
        for label in sorted(set(labels.tolist()))
    ]
    sets = build_feature_sets(full, corr, per_class)

    dump_json(
        {"full": full.to_json(), "water_plastic": water_plastic.to_json()},
        args.out_importances,
    )
    dump_json([s.to_json() for s in sets], args.out_sets)
    top = full.top_features(2)
    print(f"select-features: top features {top}, test accuracy {full.test_accuracy}")
    return 0


def _resolve_feature_set(set_id: str, sets_path) -> FeatureSet:
    fixed = fixed_feature_sets()
    if set_id in fixed:
        return fixed[set_id]
    if set_id == "D":
        if not sets_path:
            raise ConfigError("feature set D requires --sets (output of select-features)")
        for obj in load_json(sets_path):
            if obj["id"] == "D":
                return FeatureSet("D", tuple(obj["features"]), note=obj.get("note"))
        raise ConfigError(f"{sets_path}: no set D found")
    raise ConfigError(f"unknown feature set {set_id!r}")


def cmd_cluster(args) -> int:
    dataset = read_pixel_table(args.input)
    fset = _resolve_feature_set(args.feature_set, args.sets)
    X = dataset.feature_matrix(fset.features)
    scale_mean = scale_std = None
    if args.scale:
        scale_mean = X.mean(axis=0)
        scale_std = X.std(axis=0)
        scale_std[scale_std == 0.0] = 1.0
        X = (X - scale_mean) / scale_std
    model = kmeans_mod.kmeans_fit(X, args.k, seed=args.seed, feature_set=fset.id)
    if args.scale:
        model.scale_mean = scale_mean
        model.scale_std = scale_std
    report = kmeans_mod.compose_report(model, dataset, fset)
    dump_json({"model": model.to_json(), "report": report.to_json()}, args.out)
    print(
        f"cluster: set {fset.id} k={args.k} inertia={model.inertia:.6g} "
        f"iterations={model.iterations}"
    )
    return 0


def cmd_report(args) -> int:
    dataset = read_pixel_table(args.input)
    reports = []
    for path in args.models:
        obj = load_json(path)
        if "report" not in obj or "model" not in obj:
            raise FeatureSetMismatch(f"{path}: not a cluster output file")
        reports.append(kmeans_mod.ClusterReport.from_json(obj["report"]))
    for rep in reports:
        if rep.total != len(dataset):
            raise FeatureSetMismatch(
                f"report over {rep.total} records but dataset has {len(dataset)}"
            )
    flags = kmeans_mod.trend_checks(reports, dataset)
    dump_json(flags.to_json(), args.out)
    print(
        f"report: two_cluster_share={flags.two_cluster_share:.4f} "
        f"never_merged={flags.water_sand_never_merged}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="debris-spectra",
        description="Simulated MSI marine-debris campaign and spectral-analysis pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate the simulated campaign")
    p.add_argument("--config", help="campaign config JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--noise-sigma", type=float, dest="noise_sigma")
    p.add_argument("--resampler", choices=RESAMPLERS)
    p.add_argument("--library", help="signature CSV (defaults to the built-in library)")
    p.add_argument("--polymers", nargs="+")
    p.add_argument("--coverages", nargs="+", type=float)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("indices", help="append the nine radiometric indices")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_indices)

    p = sub.add_parser("clean", help="drop records with undefined indices")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="CleanReport JSON path")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("explore", help="exploratory statistics report")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("select-features", help="random-forest importances and feature sets")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-importances", required=True)
    p.add_argument("--out-sets", required=True)
    p.add_argument("--n-trees", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_select_features)

    p = sub.add_parser("cluster", help="fit K-Means and report cluster composition")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--feature-set", required=True, dest="feature_set")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sets", help="feature-sets JSON (needed for set D)")
    p.add_argument("--scale", action="store_true", help="z-score features before fitting")
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("report", help="aggregate cluster trends across runs")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--models", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DebrisSpectraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())
