"""Command-line surface: synthetic data, clustering, compression, and the
percolation / isometry / denoising / timing experiment harnesses.

All commands are deterministic given --seed (wall-clock timings excepted) and
write plot-ready CSV with a header row. Exit codes: 0 success, 2 usage or
feasibility errors, 3 I/O or file-format errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from .agglomeration import recursive_nn_cluster
from .compression import CompressionModel, batch_isometry_ratios
from .errors import InfeasibleK, InvalidK, VolumeFormatError, VoxCompressError
from .lattice import GridShape, ImageStack, build_lattice_topology
from .linkage import agglomerative, rand_single_linkage
from .projection import make_projection, project
from .synthetic import (SmoothFieldSpec, smooth_random_field,
                        subject_condition_stack, variance_ratio)
from .volumefile import read_volume, write_volume

CLUSTER_METHODS = ("fast", "rand-single", "single", "average", "complete", "ward")
ALL_METHODS = CLUSTER_METHODS + ("rp",)


class UsageError(VoxCompressError):
    """Bad flag combination or value; maps to exit code 2."""


def run_clusterer(method: str, stack: ImageStack, topology, k: int, seed: int
                  ) -> np.ndarray:
    if method == "fast":
        return recursive_nn_cluster(stack, topology, k).labels
    if method == "rand-single":
        return rand_single_linkage(stack, topology, k, seed)
    if method in ("single", "average", "complete", "ward"):
        return agglomerative(stack, topology, k, method)
    raise UsageError(f"unknown method {method!r}, expected one of {CLUSTER_METHODS}")


def _parse_shape(text: str) -> GridShape:
    try:
        dims = tuple(int(part) for part in text.split(","))
        return GridShape(dims)
    except ValueError as exc:
        raise UsageError(f"bad shape {text!r}: {exc}") from exc


def _parse_int_list(text: str, name: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad {name} {text!r}: expected comma-separated integers")


def _parse_methods(text: str, allowed) -> list[str]:
    methods = [part.strip() for part in text.split(",") if part.strip()]
    for m in methods:
        if m not in allowed:
            raise UsageError(f"unknown method {m!r}, expected one of {allowed}")
    if not methods:
        raise UsageError("no methods given")
    return methods


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_labels_csv(path, labels: np.ndarray) -> None:
    _write_csv(path, ["voxel_index", "label"],
               ((i, int(lab)) for i, lab in enumerate(labels)))


def read_labels_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["voxel_index", "label"]:
            raise UsageError(f"unexpected labels CSV header {header}")
        rows = [(int(a), int(b)) for a, b in reader]
    rows.sort()
    if [a for a, _ in rows] != list(range(len(rows))):
        raise UsageError("labels CSV voxel indices are not 0..p-1")
    return np.array([b for _, b in rows], dtype=np.int64)


def _emit(args, payload: dict):
    if not args.quiet:
        print(json.dumps(payload))


# ---------------------------------------------------------------- commands

def cmd_synth(args) -> int:
    spec = SmoothFieldSpec(
        shape=_parse_shape(args.shape), n_samples=args.n,
        fwhm=args.fwhm, noise_sigma=args.noise, seed=args.seed,
    )
    stacks = smooth_random_field(spec)
    paths = {}
    for name, stack in (("signal", stacks.signal), ("noise", stacks.noise),
                        ("combined", stacks.combined)):
        path = f"{args.out}_{name}.f32v"
        write_volume(path, stack)
        paths[name] = path
    _emit(args, {"command": "synth", "shape": list(spec.shape.dims),
                 "n_voxels": stacks.signal.n_voxels, "n_samples": spec.n_samples,
                 "fwhm": spec.fwhm, "noise_sigma": spec.noise_sigma,
                 "seed": spec.seed, "files": paths})
    return 0


def cmd_cluster(args) -> int:
    stack = read_volume(args.input)
    topology = build_lattice_topology(stack.mask)
    labels = run_clusterer(args.method, stack, topology, args.k, args.seed)
    write_labels_csv(args.out, labels)
    _emit(args, {"command": "cluster", "method": args.method, "k": args.k,
                 "n_voxels": stack.n_voxels, "out": args.out})
    return 0


def cmd_compress(args) -> int:
    stack = read_volume(args.input)
    labels = read_labels_csv(args.labels)
    if len(labels) != stack.n_voxels:
        raise UsageError(
            f"labels cover {len(labels)} voxels but volume has {stack.n_voxels}"
        )
    model = CompressionModel(labels, mode=args.mode)
    reduced = model.reduce(stack.data)
    write_volume(args.out, ImageStack(stack.mask, model.expand(reduced)))
    if args.reduced_out:
        header = ["cluster"] + [f"sample_{j}" for j in range(stack.n_samples)]
        _write_csv(args.reduced_out, header,
                   ([i] + [repr(v) for v in row] for i, row in enumerate(reduced)))
    _emit(args, {"command": "compress", "mode": args.mode,
                 "n_clusters": model.n_clusters, "out": args.out})
    return 0


def _percolation_metrics(labels: np.ndarray, k: int):
    sizes = np.bincount(labels, minlength=k)
    hist = {}
    for size, count in zip(*np.unique(sizes, return_counts=True)):
        hist[int(size)] = int(count)
    largest_fraction = sizes.max() / sizes.sum()
    singletons = int((sizes == 1).sum())
    max_median = sizes.max() / np.median(sizes)
    return hist, largest_fraction, singletons, max_median


def cmd_eval_percolation(args) -> int:
    stack = read_volume(args.input)
    topology = build_lattice_topology(stack.mask)
    methods = _parse_methods(args.methods, CLUSTER_METHODS)
    rows = []
    failures = {}
    for method in methods:
        reps = args.repeats if method == "rand-single" else 1
        hists, fracs, singles, ratios = [], [], [], []
        try:
            for rep in range(reps):
                labels = run_clusterer(method, stack, topology, args.k,
                                       args.seed + rep)
                h, frac, single, ratio = _percolation_metrics(labels, args.k)
                hists.append(h)
                fracs.append(frac)
                singles.append(single)
                ratios.append(ratio)
        except (InvalidK, InfeasibleK) as exc:
            failures[method] = str(exc)
            print(f"eval-percolation: {method}: {exc}", file=sys.stderr)
            continue
        all_sizes = sorted(set().union(*hists))
        frac = float(np.mean(fracs))
        single = float(np.mean(singles))
        ratio = float(np.mean(ratios))
        for size in all_sizes:
            count = float(np.mean([h.get(size, 0) for h in hists]))
            rows.append([method, args.k, size, count, frac, single, ratio])
    _write_csv(args.out, ["method", "k", "size", "count", "largest_fraction",
                          "singleton_count", "max_median_ratio"], rows)
    _emit(args, {"command": "eval-percolation", "k": args.k,
                 "methods_ok": [m for m in methods if m not in failures],
                 "methods_failed": failures, "out": args.out})
    return 2 if len(failures) == len(methods) else 0


def cmd_eval_isometry(args) -> int:
    stack = read_volume(args.input)
    topology = build_lattice_topology(stack.mask)
    methods = _parse_methods(args.methods, ALL_METHODS)
    k_grid = _parse_int_list(args.k_grid, "k-grid")
    rng = np.random.default_rng(args.seed)
    n = stack.n_samples
    perm = rng.permutation(n)
    n_train = int(round(args.train_frac * n))
    train_cols, test_cols = perm[:n_train], perm[n_train:]
    if len(test_cols) < 2:
        raise UsageError(
            f"train-frac {args.train_frac} leaves {len(test_cols)} test samples, need >= 2"
        )
    train = ImageStack(stack.mask, stack.data[:, train_cols])
    test_data = stack.data[:, test_cols]
    pairs = np.empty((args.pairs, 2), dtype=np.int64)
    pairs[:, 0] = rng.integers(0, len(test_cols), args.pairs)
    pairs[:, 1] = rng.integers(0, len(test_cols), args.pairs)
    clash = pairs[:, 0] == pairs[:, 1]
    while clash.any():
        pairs[clash, 1] = rng.integers(0, len(test_cols), int(clash.sum()))
        clash = pairs[:, 0] == pairs[:, 1]

    rows = []
    for method in methods:
        for k in k_grid:
            if method == "rp":
                proj = make_projection(stack.n_voxels, k, args.seed)
                reduced = project(proj, test_data)
            else:
                labels = run_clusterer(method, train, topology, k, args.seed)
                model = CompressionModel(labels, k, mode="scaled")
                reduced = model.reduce(test_data)
            etas, excluded = batch_isometry_ratios(test_data, reduced, pairs)
            rows.extend([method, k, "eta", i, repr(float(v))]
                        for i, v in enumerate(etas))
            q1, q3 = np.percentile(etas, [25, 75])
            rows.append([method, k, "mean", "", repr(float(etas.mean()))])
            rows.append([method, k, "std", "", repr(float(etas.std()))])
            rows.append([method, k, "iqr", "", repr(float(q3 - q1))])
            rows.append([method, k, "excluded_pairs", "", excluded])
    _write_csv(args.out, ["method", "k", "record", "index", "value"], rows)
    _emit(args, {"command": "eval-isometry", "k_grid": k_grid, "methods": methods,
                 "n_train": len(train_cols), "n_test": len(test_cols),
                 "pairs": args.pairs, "out": args.out})
    return 0


def cmd_eval_denoise(args) -> int:
    shape = _parse_shape(args.shape)
    sc = subject_condition_stack(shape, args.subjects, args.conditions,
                                 fwhm=args.fwhm, subject_sigma=args.subject_sigma,
                                 seed=args.seed)
    stack = sc.stack
    topology = build_lattice_topology(stack.mask)
    k_grid = _parse_int_list(args.k_grid, "k-grid")
    bc_raw, bs_raw = variance_ratio(sc)
    rows = []
    for k in k_grid:
        labels = recursive_nn_cluster(stack, topology, k).labels
        model = CompressionModel(labels, k, mode="mean")
        compressed = model.expand(model.reduce(stack.data))
        bc_c, bs_c = variance_ratio(sc, compressed)
        denom = bs_c * bc_raw
        numer = bc_c * bs_raw
        keep = (denom > 0) & (numer > 0)
        log_quotient = np.log(numer[keep] / denom[keep])
        excluded = int((~keep).sum())
        rows.extend([k, "log_quotient", i, repr(float(v))]
                    for i, v in enumerate(log_quotient))
        median = float(np.median(log_quotient)) if log_quotient.size else float("nan")
        rows.append([k, "median", "", repr(median)])
        rows.append([k, "excluded_voxels", "", excluded])
    _write_csv(args.out, ["k", "record", "index", "value"], rows)
    _emit(args, {"command": "eval-denoise", "k_grid": k_grid,
                 "subjects": args.subjects, "conditions": args.conditions,
                 "out": args.out})
    return 0


def cmd_bench(args) -> int:
    sizes = _parse_int_list(args.sizes, "sizes")
    methods = _parse_methods(args.methods, ALL_METHODS)
    rows = []
    for edge in sizes:
        spec = SmoothFieldSpec(shape=GridShape((edge, edge, edge)), n_samples=args.n,
                               fwhm=args.fwhm, noise_sigma=1.0, seed=args.seed)
        stack = smooth_random_field(spec).combined
        topology = build_lattice_topology(stack.mask)
        p = stack.n_voxels
        k = max(1, round(p / args.k_ratio))
        for method in methods:
            best = None
            for rep in range(args.repeats):
                start = time.perf_counter()
                if method == "rp":
                    make_projection(p, k, args.seed + rep)
                else:
                    run_clusterer(method, stack, topology, k, args.seed + rep)
                elapsed = time.perf_counter() - start
                best = elapsed if best is None else min(best, elapsed)
            rows.append([method, p, repr(best)])
            if not args.quiet:
                print(json.dumps({"method": method, "p": p, "k": k,
                                  "seconds": best}))
    _write_csv(args.out, ["method", "p", "seconds"], rows)
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="voxcompress",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--quiet", action="store_true", help="suppress summary JSON")

    p = sub.add_parser(
        "synth", parents=[common],
        help="write synthetic signal/noise/combined volumes",
        epilog="Writes <out>_signal.f32v, <out>_noise.f32v, <out>_combined.f32v.",
    )
    p.add_argument("--shape", required=True, help="grid dims, e.g. 50,50,50")
    p.add_argument("--n", type=int, default=100, help="sample count")
    p.add_argument("--fwhm", type=float, default=8.0, help="smoothing FWHM in voxels")
    p.add_argument("--noise", type=float, default=1.0, help="white-noise std")
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser(
        "cluster", parents=[common],
        help="cluster a volume and write a (voxel_index,label) CSV",
    )
    p.add_argument("--input", required=True, help="input .f32v volume")
    p.add_argument("--method", required=True, choices=CLUSTER_METHODS)
    p.add_argument("--k", type=int, required=True, help="number of clusters")
    p.add_argument("--out", required=True, help="output labels CSV")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser(
        "compress", parents=[common],
        help="apply a labeling as a compressor and write the voxel-space result",
    )
    p.add_argument("--input", required=True, help="input .f32v volume")
    p.add_argument("--labels", required=True, help="labels CSV from `cluster`")
    p.add_argument("--mode", choices=("mean", "scaled"), default="mean")
    p.add_argument("--out", required=True, help="output .f32v volume")
    p.add_argument("--reduced-out", default=None,
                   help="also write the k x n reduced matrix as CSV")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser(
        "eval-percolation", parents=[common],
        help="cluster-size histograms per method",
        epilog="CSV: method,k,size,count,largest_fraction,singleton_count,"
               "max_median_ratio (metrics repeated per histogram row; counts are "
               "averaged over --repeats for seed-dependent methods).",
    )
    p.add_argument("--input", required=True)
    p.add_argument("--methods", default="fast,rand-single,single,average,complete,ward")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval_percolation)

    p = sub.add_parser(
        "eval-isometry", parents=[common],
        help="distance-preservation ratios on held-out samples",
        epilog="CSV: method,k,record,index,value with record in "
               "{eta, mean, std, iqr, excluded_pairs}. Cluster methods are "
               "evaluated in scaled mode; models are learned on the train split "
               "only.",
    )
    p.add_argument("--input", required=True)
    p.add_argument("--methods", default="ward,fast,rp")
    p.add_argument("--k-grid", required=True, help="comma-separated k values")
    p.add_argument("--pairs", type=int, default=2000)
    p.add_argument("--train-frac", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval_isometry)

    p = sub.add_parser(
        "eval-denoise", parents=[common],
        help="log variance-ratio quotients of compressed vs raw maps",
        epilog="CSV: k,record,index,value with record in {log_quotient, median, "
               "excluded_voxels}. The per-voxel ratio is (across-condition "
               "variance averaged over subjects) / (across-subject variance "
               "averaged over conditions); the quotient compares compressed to "
               "raw maps, so values above 0 mean denoising.",
    )
    p.add_argument("--shape", default="20,20,20")
    p.add_argument("--subjects", type=int, default=10)
    p.add_argument("--conditions", type=int, default=5)
    p.add_argument("--fwhm", type=float, default=8.0)
    p.add_argument("--subject-sigma", type=float, default=1.0)
    p.add_argument("--k-grid", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval_denoise)

    p = sub.add_parser(
        "bench", parents=[common],
        help="wall-clock timing per method over cube sizes (best of repeats)",
        epilog="CSV: method,p,seconds.",
    )
    p.add_argument("--sizes", required=True, help="cube edge lengths, e.g. 8,16,32")
    p.add_argument("--n", type=int, default=25)
    p.add_argument("--k-ratio", type=float, default=10.0, help="p/k ratio")
    p.add_argument("--fwhm", type=float, default=8.0)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--methods", default="fast,rand-single,single,average,complete,ward")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InvalidK, InfeasibleK, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (VolumeFormatError, OSError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
