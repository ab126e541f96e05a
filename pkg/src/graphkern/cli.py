"""Command-line interface.

Subcommands: `info` (dataset statistics), `gram` (compute and save a
normalized kernel matrix), `classify` (nested cross-validation accuracy),
`noise-sweep` (accuracy as a function of injected structural noise), and
`paths` (dump the gappy shortest-path pool of one root, a debugging aid).

All outputs are deterministic for a fixed seed and independent of
--threads. Wall-clock time is printed to the console but written into
report files only with --stamp-runtime, so repeated runs produce
byte-identical files.
"""

import argparse
import json
import sys
import time

from .datasets import (
    NoiseConfig,
    data_dir,
    dataset_stats,
    ensure_node_labels,
    inject_noise,
    load_edge_list,
    load_tu_dataset,
)
from .errors import ComputeError, ConfigError, DataError
from .gram import GhConfig, WlConfig, gram, normalize, save_gram
from .hopper import NodeKernelSpec
from .spdag import DEFAULT_MAX_PATHS, build_spdag, enumerate_paths, extend_gappy
from .svm import CvProtocol, aggregate_accuracies, nested_cv
from .wl import DEFAULT_WL_ITERATIONS

DEFAULT_S_GRID = "0,1,2,3,4,5"
DEFAULT_X_GRID = "0,0.1,0.2,0.3,0.4,0.5"

REPORT_COLUMNS = (
    "dataset",
    "kernel",
    "param",
    "x",
    "rep",
    "mean_accuracy",
    "std_accuracy",
    "runtime_seconds",
)


def _fmt(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(REPORT_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(col)) for col in REPORT_COLUMNS) + "\n")


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_grid(text, cast, flag):
    try:
        values = [cast(part) for part in str(text).split(",") if part.strip() != ""]
    except ValueError:
        raise ConfigError(f"could not parse {flag} value {text!r}") from None
    if not values:
        raise ConfigError(f"{flag} must list at least one value")
    return values


def _load_dataset(args):
    return load_tu_dataset(data_dir(args.dataset), args.name)


def _resolve_node_kernel(choice, bandwidth, dataset) -> NodeKernelSpec:
    if choice == "auto":
        if dataset.has_attributes:
            choice = "product" if dataset.has_node_labels else "gaussian"
        else:
            choice = "dirac"
    if choice in ("gaussian", "product") and not dataset.has_attributes:
        raise ConfigError(
            f"node kernel {choice!r} needs attribute vectors, which "
            f"{dataset.meta.name} does not have"
        )
    return NodeKernelSpec(kind=choice, bandwidth=bandwidth)


def _prepare(dataset, kernel, node_kernel_choice):
    """Degree-label the dataset when the kernel needs labels it lacks."""
    if kernel == "wl" or node_kernel_choice in ("auto", "dirac", "product"):
        return ensure_node_labels(dataset)
    return dataset


def _kernel_configs(kernel, args, dataset):
    """Parameter grid as a {param: config} mapping, ascending params."""
    if kernel == "gh":
        spec = _resolve_node_kernel(args.node_kernel, args.bandwidth, dataset)
        s_values = _parse_grid(args.s, int, "--s")
        return {s: GhConfig(s=s, node_kernel=spec) for s in sorted(set(s_values))}
    return {args.h: WlConfig(h=args.h)}


def _grid_grams(dataset, configs, threads):
    return {
        param: normalize(gram(dataset, config, threads=threads))
        for param, config in configs.items()
    }


def cmd_info(args) -> int:
    stats = dataset_stats(_load_dataset(args))
    order = (
        "name",
        "graphs",
        "classes",
        "mean_nodes",
        "mean_edges",
        "mean_density",
        "node_labels",
        "attributes",
        "attribute_dim",
    )
    for key in order:
        value = stats[key]
        if isinstance(value, float):
            value = f"{value:.6g}"
        print(f"{key}: {value}")
    if args.out:
        _write_json(args.out, stats)
    return 0


def cmd_gram(args) -> int:
    dataset = _load_dataset(args)
    if args.noise_x > 0:
        dataset = inject_noise(dataset, NoiseConfig(x=args.noise_x, seed=args.seed))
    dataset = _prepare(dataset, args.kernel, args.node_kernel)
    if args.kernel == "gh":
        spec = _resolve_node_kernel(args.node_kernel, args.bandwidth, dataset)
        s_values = _parse_grid(args.s, int, "--s")
        if len(s_values) != 1:
            raise ConfigError("gram takes a single --s value")
        config = GhConfig(s=s_values[0], node_kernel=spec)
    else:
        config = WlConfig(h=args.h)
    started = time.perf_counter()
    matrix = normalize(gram(dataset, config, threads=args.threads))
    elapsed = time.perf_counter() - started
    save_gram(matrix, args.out)
    print(f"wrote {matrix.size}x{matrix.size} gram to {args.out} "
          f"({elapsed:.2f}s)")
    return 0


def _classification_run(dataset, kernel, args, seed, repetitions):
    """Grams over the parameter grid, then nested CV; returns (result, grid)."""
    configs = _kernel_configs(kernel, args, dataset)
    grams = _grid_grams(dataset, configs, args.threads)
    protocol = CvProtocol(seed=seed, repetitions=repetitions)
    result = nested_cv(grams, dataset.class_labels, protocol,
                       threads=args.threads)
    return result, sorted(configs)


def _param_text(kernel, params) -> str:
    # joined with | so the text stays a single CSV field
    name = "s" if kernel == "gh" else "h"
    return f"{name}=" + "|".join(str(p) for p in params)


def cmd_classify(args) -> int:
    raw = _load_dataset(args)
    if args.noise_x > 0:
        raw = inject_noise(raw, NoiseConfig(x=args.noise_x, seed=args.seed))
    dataset = _prepare(raw, args.kernel, args.node_kernel)
    started = time.perf_counter()
    result, params = _classification_run(
        dataset, args.kernel, args, args.seed, args.reps
    )
    elapsed = time.perf_counter() - started
    runtime = elapsed if args.stamp_runtime else None
    param_text = _param_text(args.kernel, params)
    print(
        f"{args.name} {args.kernel} {param_text} x={args.noise_x:g}: "
        f"accuracy {result.mean_accuracy:.4f} +- {result.std_accuracy:.4f} "
        f"({elapsed:.2f}s)"
    )
    if args.out:
        payload = {
            "dataset": args.name,
            "kernel": args.kernel,
            "param_grid": list(params),
            "x": args.noise_x,
            "seed": args.seed,
            "repetitions": args.reps,
            "mean_accuracy": result.mean_accuracy,
            "std_accuracy": result.std_accuracy,
            "rep_accuracies": list(result.rep_accuracies),
            "selections": [list(sel) for sel in result.selections],
            "convergence_failures": result.convergence_failures,
            "runtime_seconds": runtime,
        }
        _write_json(args.out, payload)
        _write_csv(
            str(args.out) + ".csv",
            [
                {
                    "dataset": args.name,
                    "kernel": args.kernel,
                    "param": param_text,
                    "x": args.noise_x,
                    "rep": "all",
                    "mean_accuracy": result.mean_accuracy,
                    "std_accuracy": result.std_accuracy,
                    "runtime_seconds": runtime,
                }
            ],
        )
    return 0


def cmd_noise_sweep(args) -> int:
    if args.reps < 1:
        raise ConfigError("need at least 1 repetition")
    raw = _load_dataset(args)
    kernels = _parse_grid(args.kernel, str, "--kernel")
    for kernel in kernels:
        if kernel not in ("gh", "wl"):
            raise ConfigError(f"unknown kernel {kernel!r}: expected gh or wl")
    x_values = _parse_grid(args.noise_x, float, "--noise-x")
    rows = []
    sweeps = []
    started = time.perf_counter()
    for kernel in kernels:
        for x in x_values:
            accuracies = []
            for rep in range(args.reps):
                seed = args.seed + rep
                noisy = inject_noise(raw, NoiseConfig(x=x, seed=seed))
                dataset = _prepare(noisy, kernel, args.node_kernel)
                result, params = _classification_run(
                    dataset, kernel, args, seed, 1
                )
                accuracies.append(result.rep_accuracies[0])
                rows.append(
                    {
                        "dataset": args.name,
                        "kernel": kernel,
                        "param": _param_text(kernel, params),
                        "x": x,
                        "rep": rep,
                        "mean_accuracy": result.rep_accuracies[0],
                        "std_accuracy": None,
                        "runtime_seconds": None,
                    }
                )
            mean, std = aggregate_accuracies(accuracies)
            rows.append(
                {
                    "dataset": args.name,
                    "kernel": kernel,
                    "param": _param_text(kernel, params),
                    "x": x,
                    "rep": "all",
                    "mean_accuracy": mean,
                    "std_accuracy": std,
                    "runtime_seconds": None,
                }
            )
            sweeps.append(
                {
                    "kernel": kernel,
                    "x": x,
                    "mean_accuracy": mean,
                    "std_accuracy": std,
                    "rep_accuracies": accuracies,
                }
            )
            print(
                f"{args.name} {kernel} x={x:g}: accuracy {mean:.4f} "
                f"+- {std:.4f}"
            )
    elapsed = time.perf_counter() - started
    if args.stamp_runtime:
        for row in rows:
            if row["rep"] == "all":
                row["runtime_seconds"] = elapsed
    if args.out:
        payload = {
            "dataset": args.name,
            "kernels": kernels,
            "x_grid": x_values,
            "seed": args.seed,
            "repetitions": args.reps,
            "results": sweeps,
            "runtime_seconds": elapsed if args.stamp_runtime else None,
        }
        _write_json(args.out, payload)
        _write_csv(str(args.out) + ".csv", rows)
    print(f"swept {len(kernels)} kernel(s) x {len(x_values)} noise levels "
          f"({elapsed:.2f}s)")
    return 0


def cmd_paths(args) -> int:
    g = load_edge_list(args.graph)
    s_values = _parse_grid(args.s, int, "--s")
    if len(s_values) != 1:
        raise ConfigError("paths takes a single --s value")
    dag = extend_gappy(build_spdag(g, args.root), s_values[0])
    listing = sorted(enumerate_paths(dag, max_paths=args.max_paths))
    lines = [" ".join(str(v) for v in path) for path in listing]
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _add_dataset_args(sub):
    sub.add_argument("--dataset", default=None,
                     help="dataset directory (default: $GRAPHKERN_DATA_DIR)")
    sub.add_argument("--name", required=True, help="dataset name, e.g. MUTAG")


def _add_kernel_args(sub, multi_kernel=False):
    if multi_kernel:
        sub.add_argument("--kernel", default="gh",
                         help="comma-separated kernels from {gh,wl}")
    else:
        sub.add_argument("--kernel", choices=("gh", "wl"), default="gh")
    sub.add_argument("--s", default=None,
                     help="gap size(s); comma-separated for a grid")
    sub.add_argument("--lambda", dest="bandwidth", type=float, default=None,
                     help="gaussian bandwidth (default: 1/attribute-dim)")
    sub.add_argument("--h", type=int, default=DEFAULT_WL_ITERATIONS,
                     help="refinement iterations for the wl kernel")
    sub.add_argument(
        "--node-kernel",
        choices=("auto", "dirac", "gaussian", "product"),
        default="auto",
        help="node kernel for gh (auto: pick from available node data)",
    )


def _add_run_args(sub):
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--threads", type=int, default=1)
    sub.add_argument("--reps", type=int, default=10,
                     help="protocol repetitions")
    sub.add_argument("--stamp-runtime", action="store_true",
                     help="write wall-clock runtime into report files "
                          "(off by default to keep outputs byte-stable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphkern",
        description="Graph kernels (gappy hop-count and Weisfeiler-Lehman) "
                    "with a precomputed-kernel SVM harness.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("info", help="dataset statistics")
    _add_dataset_args(p)
    p.add_argument("--out", default=None, help="optional JSON output path")
    p.set_defaults(func=cmd_info)

    p = subparsers.add_parser("gram", help="compute a normalized gram matrix")
    _add_dataset_args(p)
    _add_kernel_args(p)
    _add_run_args(p)
    p.add_argument("--noise-x", type=float, default=0.0,
                   help="inject this noise fraction before computing")
    p.add_argument("--out", required=True, help="output CSV path "
                   "(a JSON sidecar is written next to it)")
    p.set_defaults(func=cmd_gram)

    p = subparsers.add_parser("classify", help="nested-CV accuracy")
    _add_dataset_args(p)
    _add_kernel_args(p)
    _add_run_args(p)
    p.add_argument("--noise-x", type=float, default=0.0,
                   help="inject this noise fraction once before classifying")
    p.add_argument("--out", default=None,
                   help="JSON report path (plus '<out>.csv' row file)")
    p.set_defaults(func=cmd_classify)

    p = subparsers.add_parser(
        "noise-sweep",
        help="accuracy vs injected noise; noise is redrawn per repetition",
    )
    _add_dataset_args(p)
    _add_kernel_args(p, multi_kernel=True)
    _add_run_args(p)
    p.add_argument("--noise-x", default=DEFAULT_X_GRID,
                   help="comma-separated noise fractions")
    p.add_argument("--out", default=None,
                   help="JSON report path (plus '<out>.csv' row file)")
    p.set_defaults(func=cmd_noise_sweep)

    p = subparsers.add_parser("paths", help="dump one root's path pool")
    p.add_argument("graph", help="edge-list graph file")
    p.add_argument("--root", type=int, default=0)
    p.add_argument("--s", default="0", help="gap size")
    p.add_argument("--max-paths", type=int, default=DEFAULT_MAX_PATHS,
                   help="abort beyond this many paths")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.set_defaults(func=cmd_paths)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "s", None) is None:
        # gram wants one gap size, classification sweeps the default grid
        args.s = "0" if args.command == "gram" else DEFAULT_S_GRID
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ComputeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
