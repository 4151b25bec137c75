"""Command-line entry point: coarsen, distance, spectrum, sbm, recover."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .algorithms import METHODS, run_method
from .coarsening import coarsen, read_partition, write_partition
from .errors import CoarseningError, NoConvergence
from .evaluation import recovery_experiment, rows_to_csv, rows_to_json, table_grid
from .graph import normalized_laplacian, read_edge_list, write_edge_list
from .kmeans import KMeansConfig
from .sbm import KINDS, SBMConfig, sample_sbm
from .spectral import distance_report, distance_report_from_spectra, eigenvalues

log = logging.getLogger("spectral_coarsen")

EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for numerical failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_schema(name: str) -> dict:
    """Load a bundled JSON schema, e.g. ``"coarsen_report"``."""
    text = resources.files("spectral_coarsen").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return seed


def _target_size(args, N: int) -> int:
    if args.target_size is not None:
        if args.target_size < 1:
            raise UsageError(f"--target-size must be >= 1, got {args.target_size}")
        if args.target_size > N:
            raise UsageError(f"--target-size {args.target_size} exceeds node count {N}")
        return args.target_size
    if not 0 < args.ratio < 1:
        raise UsageError(f"--ratio must lie in (0, 1), got {args.ratio}")
    return max(1, int(round(args.ratio * N)))


def _report_dict(g, partition, verbose: bool) -> dict:
    lam = eigenvalues(normalized_laplacian(g))
    lam_c = eigenvalues(normalized_laplacian(coarsen(g, partition)))
    out = distance_report_from_spectra(lam, lam_c).to_dict()
    if verbose:
        out["eigenvalues"] = lam.tolist()
        out["coarse_eigenvalues"] = lam_c.tolist()
    return out


def cmd_coarsen(args) -> int:
    g = read_edge_list(args.graph)
    n = _target_size(args, g.node_count)
    cfg = KMeansConfig(seed=args.seed)
    result = run_method(args.method, g, n, cfg, mgc_self_loops=not args.mgc_drop_loops)
    report = result.to_dict()
    report["seed"] = args.seed
    report["distance"] = _report_dict(g, result.partition, args.verbose)
    prefix = args.out_prefix
    write_edge_list(result.coarse, f"{prefix}.edges")
    write_partition(result.partition, f"{prefix}.partition")
    Path(f"{prefix}.report.json").write_text(_dump(report))
    d = report["distance"]
    log.info("%s: %d -> %d nodes, full=%.6g partial=%.6g", args.method, g.node_count, n, d["full"], d["partial"])
    return 0


def cmd_distance(args) -> int:
    g = read_edge_list(args.graph)
    p = read_partition(args.partition, g.node_count)
    if args.verbose:
        report = _report_dict(g, p, True)
    else:
        report = distance_report(g, p).to_dict()
    keep = {
        "both": None,
        "full": {"full", "n", "N", "eigenvalues", "coarse_eigenvalues"},
        "partial": {"partial", "k1", "k2", "n", "N", "eigenvalues", "coarse_eigenvalues"},
    }[args.mode]
    if keep is not None:
        report = {k: v for k, v in report.items() if k in keep}
    sys.stdout.write(_dump(report))
    return 0


def cmd_spectrum(args) -> int:
    g = read_edge_list(args.graph)
    sys.stdout.write(_dump(eigenvalues(normalized_laplacian(g)).tolist()))
    return 0


def _parse_blocks(text: str) -> tuple[int, ...]:
    try:
        blocks = tuple(int(b) for b in text.split(",") if b.strip())
    except ValueError as exc:
        raise UsageError(f"--blocks must be a comma list of integers: {text!r}") from exc
    if not blocks:
        raise UsageError("--blocks is empty")
    return blocks


def cmd_sbm(args) -> int:
    cfg = SBMConfig(args.kind, args.p, args.q, _parse_blocks(args.blocks), args.seed)
    g, truth = sample_sbm(cfg)
    write_edge_list(g, f"{args.out_prefix}.edges")
    write_partition(truth, f"{args.out_prefix}.partition")
    return 0


def _jobs(args) -> int:
    if args.jobs is not None:
        return args.jobs
    env = os.environ.get("SPECTRAL_COARSEN_JOBS")
    if env is None:
        return 1
    try:
        return max(1, int(env))
    except ValueError as exc:
        raise UsageError(f"SPECTRAL_COARSEN_JOBS must be an integer, got {env!r}") from exc


def cmd_recover(args) -> int:
    methods = [m.strip().lower() for m in args.methods.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown or not methods:
        raise UsageError(f"unknown method(s) {unknown}; choose from {', '.join(METHODS)}")
    if args.quick:
        N, K, repeats = 60, 6, 3
    else:
        N, K, repeats = 200, 10, 10
    N = args.nodes or N
    K = args.blocks or K
    repeats = args.repeats or repeats
    if K < 1 or N % K:
        raise UsageError(f"{N} nodes cannot be split into {K} equal blocks")
    rows = recovery_experiment(
        table_grid(N, K), methods, repeats, args.seed, jobs=_jobs(args),
        mgc_self_loops=not args.mgc_drop_loops,
    )
    csv_text = rows_to_csv(rows)
    if args.out_prefix:
        Path(f"{args.out_prefix}.csv").write_text(csv_text)
        Path(f"{args.out_prefix}.json").write_text(_dump(rows_to_json(rows)))
    else:
        sys.stdout.write(csv_text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spectral-coarsen", description=__doc__)
    parser.add_argument("-q", "--quiet", action="store_true", help="only log warnings")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("coarsen", help="coarsen an edge-list graph")
    c.add_argument("graph", help="input edge list")
    c.add_argument("--method", choices=METHODS, default="mgc")
    size = c.add_mutually_exclusive_group(required=True)
    size.add_argument("--ratio", type=float, help="target size as a fraction of N")
    size.add_argument("--target-size", type=int, help="number of supernodes")
    c.add_argument("--seed", type=_seed, default=0)
    c.add_argument("--out-prefix", default="coarse")
    c.add_argument("--verbose", action="store_true", help="include eigenvalue arrays in the report")
    c.add_argument("--mgc-drop-loops", action="store_true",
                   help="MGC: ignore supernode self-loops when comparing rows")
    c.set_defaults(func=cmd_coarsen)

    d = sub.add_parser("distance", help="spectral distance of a graph and a partition")
    d.add_argument("graph")
    d.add_argument("partition")
    d.add_argument("--mode", choices=("full", "partial", "both"), default="both")
    d.add_argument("--verbose", action="store_true")
    d.set_defaults(func=cmd_distance)

    s = sub.add_parser("spectrum", help="normalized-Laplacian eigenvalues")
    s.add_argument("graph")
    s.set_defaults(func=cmd_spectrum)

    b = sub.add_parser("sbm", help="sample a stochastic block model graph")
    b.add_argument("--kind", choices=KINDS, required=True)
    b.add_argument("--p", type=float, required=True)
    b.add_argument("--q", type=float, required=True)
    b.add_argument("--blocks", required=True, help="comma-separated block sizes")
    b.add_argument("--seed", type=_seed, default=0)
    b.add_argument("--out-prefix", default="sbm")
    b.set_defaults(func=cmd_sbm)

    r = sub.add_parser("recover", help="SBM block-recovery grid (CSV)")
    r.add_argument("--methods", default=",".join(("em", "sc", "mgc", "sgc")))
    r.add_argument("--quick", action="store_true", help="N=60, K=6, 3 repeats")
    r.add_argument("--nodes", type=int, help="override node count")
    r.add_argument("--blocks", type=int, help="override block count")
    r.add_argument("--repeats", type=int)
    r.add_argument("--seed", type=_seed, default=0)
    r.add_argument("--jobs", type=int)
    r.add_argument("--out-prefix")
    r.add_argument("--mgc-drop-loops", action="store_true")
    r.set_defaults(func=cmd_recover)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (NoConvergence, np.linalg.LinAlgError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, CoarseningError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
