"""Command line harness: seeded experiment campaigns over degree sequences.

Every run writes a report that embeds its own config, seed, backend, and
library version.  CSV reports carry metadata and summaries on '#' lines and
pure data on the remaining lines; JSON reports keep everything under a
versioned schema with the reproducible payload in the "results" subtree.
Exit codes: 0 success, 2 invalid input, 3 enumeration cap exceeded,
4 value numerically undefined.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import _kernels
from .degseq import (
    BIPARTITE,
    DIRECTED,
    UNDIRECTED,
    DegreeSequence,
    compute_moments,
    fraction_jsonable,
    powerlaw_degrees,
    read_directed_degrees,
    read_undirected_degrees,
    regular_degrees,
    side_moment,
)
from .dist import EmpiricalDist, cramer_wold_check, ks_normal, tv_joint, tv_poisson
from .errors import (
    CapExceededError,
    CmloopsError,
    InvalidDegreeSequenceError,
    UndefinedValueError,
)
from .limits import (
    graph_count_estimate,
    lambda_bipartite,
    lambda_directed,
    lambda_pair,
    lambda_truncated,
    limit_report,
    standardized_score,
)
from .montecarlo import run_montecarlo
from .pairing import exact_joint_law
from .rng import RngStream

SCHEMA = "cmloops/1"
SEED_ENV = "CMLOOPS_SEED"

FLAVORS = {"cm": UNDIRECTED, "dcm": DIRECTED, "bcm": BIPARTITE}


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def _add_source_args(sp: argparse.ArgumentParser) -> None:
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument(
        "--degrees",
        nargs="+",
        metavar="FILE",
        help="degree file(s): cm one file (one degree per line); dcm one file "
        "('in,out' per line); bcm two files (left, right)",
    )
    src.add_argument(
        "--regular",
        nargs=2,
        type=int,
        metavar=("N", "R"),
        help="n vertices of degree r (per side for dcm/bcm)",
    )
    src.add_argument(
        "--powerlaw",
        nargs=3,
        metavar=("N", "TAU", "C"),
        help="deterministic power-law sequence with tail exponent tau and scale c",
    )
    sp.add_argument("--flavor", choices=sorted(FLAVORS), default="cm")


def _add_run_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--reps", type=int, default=1000, help="Monte Carlo replicates")
    sp.add_argument("--threads", type=int, default=1, help="worker threads")


def _add_common_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"master seed (default: ${SEED_ENV} if set, else 0)",
    )
    sp.add_argument("--out", metavar="PATH", help="output path (default: stdout)")
    sp.add_argument("--format", choices=("csv", "json"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmloops",
        description="Self-loop and multi-edge statistics of half-edge pairing models.",
    )
    parser.add_argument("--version", action="version", version=f"cmloops {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("moments", help="exact moments, rates, bounds, and estimates")
    _add_source_args(sp)
    _add_common_args(sp)

    sp = sub.add_parser("montecarlo", help="sampled statistics with Poisson distances")
    _add_source_args(sp)
    _add_run_args(sp)
    sp.add_argument("--mcut", type=int, default=None, help="degree cutoff for m_trunc")
    _add_common_args(sp)

    sp = sub.add_parser("enumerate", help="exact joint law by full enumeration")
    _add_source_args(sp)
    sp.add_argument("--cap", type=int, default=None, help="enumeration cap override")
    _add_common_args(sp)

    sp = sub.add_parser("clt", help="normal fit of standardized loop/multi-edge counts")
    _add_source_args(sp)
    _add_run_args(sp)
    sp.add_argument("--mcut", type=int, default=None, help="standardize truncated m instead")
    _add_common_args(sp)

    sp = sub.add_parser("cramer_wold", help="thinned-sum Poisson distance")
    _add_source_args(sp)
    _add_run_args(sp)
    sp.add_argument("--p", type=float, default=1.0, help="loop thinning probability")
    sp.add_argument("--q", type=float, default=1.0, help="multi-edge thinning probability")
    _add_common_args(sp)

    sp = sub.add_parser("erased", help="removed-edge count distribution")
    _add_source_args(sp)
    _add_run_args(sp)
    _add_common_args(sp)

    return parser


def resolve_seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise InvalidDegreeSequenceError(
                f"{SEED_ENV} must be an integer, got {env!r}"
            ) from None
    return 0


def resolve_sequence(args: argparse.Namespace) -> DegreeSequence:
    kind = FLAVORS[args.flavor]
    if args.regular is not None:
        n, r = args.regular
        degrees = regular_degrees(n, r)
        if kind == UNDIRECTED:
            return DegreeSequence.undirected(degrees)
        if kind == DIRECTED:
            return DegreeSequence.directed(degrees, degrees)
        return DegreeSequence.bipartite(degrees, degrees)
    if args.powerlaw is not None:
        raw_n, raw_tau, raw_c = args.powerlaw
        try:
            n, tau, c = int(raw_n), float(raw_tau), float(raw_c)
        except ValueError:
            raise InvalidDegreeSequenceError(
                f"--powerlaw needs integer N and numeric TAU, C; got {args.powerlaw}"
            ) from None
        degrees = powerlaw_degrees(n, tau, c)
        if kind == UNDIRECTED:
            return DegreeSequence.undirected(degrees)
        if kind == DIRECTED:
            return DegreeSequence.directed(degrees, degrees)
        return DegreeSequence.bipartite(degrees, degrees)
    paths = args.degrees
    if kind == UNDIRECTED:
        if len(paths) != 1:
            raise InvalidDegreeSequenceError("--flavor cm takes exactly one degree file")
        return DegreeSequence.undirected(read_undirected_degrees(paths[0]))
    if kind == DIRECTED:
        if len(paths) != 1:
            raise InvalidDegreeSequenceError(
                "--flavor dcm takes exactly one degree file with 'in,out' lines"
            )
        ins, outs = read_directed_degrees(paths[0])
        return DegreeSequence.directed(ins, outs)
    if len(paths) != 2:
        raise InvalidDegreeSequenceError("--flavor bcm takes two degree files: left right")
    return DegreeSequence.bipartite(
        read_undirected_degrees(paths[0]), read_undirected_degrees(paths[1])
    )


def _config_dict(args: argparse.Namespace, seed: int) -> dict:
    config = {"command": args.command, "flavor": args.flavor, "seed": seed}
    if args.degrees is not None:
        config["degrees"] = list(args.degrees)
    if args.regular is not None:
        config["regular"] = list(args.regular)
    if args.powerlaw is not None:
        config["powerlaw"] = list(args.powerlaw)
    for key in ("reps", "threads", "mcut", "cap", "p", "q"):
        if hasattr(args, key):
            config[key] = getattr(args, key)
    return config


# ---------------------------------------------------------------------------
# report rendering
# ---------------------------------------------------------------------------


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_json(config: dict, results: dict) -> str:
    doc = {
        "schema": SCHEMA,
        "version": __version__,
        "backend": _kernels.current_backend(),
        "config": config,
        "results": results,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_csv(
    config: dict,
    header: list[str],
    rows,
    summary: dict | None = None,
) -> str:
    lines = [
        f"# cmloops {__version__} schema={SCHEMA}",
        f"# backend: {_kernels.current_backend()}",
        f"# config: {json.dumps(config, sort_keys=True)}",
        ",".join(header),
    ]
    for row in rows:
        lines.append(",".join(_csv_value(v) for v in row))
    if summary is not None:
        lines.append(f"# summary: {json.dumps(summary, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _rates(seq: DegreeSequence) -> tuple[Fraction, Fraction | None]:
    if seq.kind == UNDIRECTED:
        return lambda_pair(seq)
    if seq.kind == DIRECTED:
        return lambda_directed(seq)
    return Fraction(0), lambda_bipartite(seq)


def cmd_moments(args: argparse.Namespace, seed: int) -> str:
    seq = resolve_sequence(args)
    results: dict = {"limits": limit_report(seq).to_jsonable()}
    if seq.kind == UNDIRECTED:
        results["moments"] = compute_moments(seq).to_jsonable()
    elif seq.kind == DIRECTED:
        results["moments"] = {
            "ell": seq.total,
            "mu3_in": fraction_jsonable(side_moment(seq.in_degrees, 3, seq.total)),
            "mu3_out": fraction_jsonable(side_moment(seq.out_degrees, 3, seq.total)),
            "d_max_in": int(seq.in_degrees.max()),
            "d_max_out": int(seq.out_degrees.max()),
        }
    else:
        results["moments"] = {
            "ell": seq.total,
            "mu3_left": fraction_jsonable(side_moment(seq.left, 3, seq.total)),
            "mu3_right": fraction_jsonable(side_moment(seq.right, 3, seq.total)),
            "d_max_left": int(seq.left.max()),
            "d_max_right": int(seq.right.max()),
        }
    config = _config_dict(args, seed)
    if args.format == "json":
        return render_json(config, results)
    rows = []
    for section, entries in sorted(results.items()):
        for key, value in sorted(entries.items()):
            if isinstance(value, dict):
                value = value["exact"]
            rows.append((f"{section}.{key}", value))
    return render_csv(config, ["key", "value"], rows)


def cmd_montecarlo(args: argparse.Namespace, seed: int) -> str:
    seq = resolve_sequence(args)
    res = run_montecarlo(
        seq, args.reps, seed, threads=args.threads, m_cut=args.mcut
    )
    lam_s, lam_m = _rates(seq)
    summary: dict = {f"mean_{name}": float(res.column(name).mean()) for name in res.columns}
    summary["p_simple_hat"] = res.simple_fraction()
    summary["p_simple_est"] = math.exp(-float(lam_s + (lam_m or Fraction(0))))
    if seq.kind != BIPARTITE:
        summary["lambda_s"] = float(lam_s)
        summary["tv_s"] = tv_poisson(res.dist("s"), float(lam_s))
    if lam_m is not None:
        summary["lambda_m"] = float(lam_m)
        summary["tv_m"] = tv_poisson(res.dist("m"), float(lam_m))
    if seq.kind == UNDIRECTED:
        nu = float(compute_moments(seq).nu)
        summary["tv_joint"] = tv_joint(res.joint(), nu / 2.0, nu * nu / 4.0)
        summary["joint_target"] = [nu / 2.0, nu * nu / 4.0]
        if args.mcut is not None:
            lam_t = lambda_truncated(seq, args.mcut)
            if lam_t is not None:
                summary["lambda_m_trunc"] = float(lam_t)
                summary["tv_m_trunc"] = tv_poisson(res.dist("m_trunc"), float(lam_t))
    elif seq.kind == DIRECTED and lam_m is not None:
        summary["tv_joint"] = tv_joint(res.joint(), float(lam_s), float(lam_m))
        summary["joint_target"] = [float(lam_s), float(lam_m)]
    config = _config_dict(args, seed)
    if args.format == "json":
        results = {
            "reps": res.reps,
            "columns": list(res.columns),
            "summary": summary,
            "hist": {name: res.dist(name).csv_rows() for name in res.columns},
            "hist_joint": res.joint().csv_rows(),
        }
        return render_json(config, results)
    header = ["rep", *res.columns]
    rows = ((r, *res.table[r]) for r in range(res.reps))
    return render_csv(config, header, rows, summary)


def cmd_enumerate(args: argparse.Namespace, seed: int) -> str:
    seq = resolve_sequence(args)
    law = exact_joint_law(seq, cap=args.cap)
    lam_s, lam_m = _rates(seq)
    results: dict = {
        "nm": law.nm,
        "p_simple": fraction_jsonable(law.p_simple),
        "mean_s": fraction_jsonable(law.mean_s),
        "mean_m": fraction_jsonable(law.mean_m),
        "lambda_s": fraction_jsonable(lam_s),
        "lambda_m": fraction_jsonable(lam_m),
        "mean_s_matches_lambda_s": law.mean_s == lam_s,
        "mean_m_matches_lambda_m": law.mean_m == (lam_m if lam_m is not None else Fraction(0)),
        "joint": [
            [s, m, c, f"{Fraction(c, law.nm)}"] for (s, m), c in sorted(law.joint_counts.items())
        ],
    }
    if seq.kind == UNDIRECTED:
        results["graph_count"] = graph_count_estimate(seq, cap=args.cap).to_jsonable()
    config = _config_dict(args, seed)
    if args.format == "json":
        return render_json(config, results)
    summary = {k: v for k, v in results.items() if k != "joint"}
    for key in ("p_simple", "mean_s", "mean_m", "lambda_s", "lambda_m"):
        if summary[key] is not None:
            summary[key] = summary[key]["exact"]
    rows = [(s, m, c, prob) for s, m, c, prob in results["joint"]]
    return render_csv(config, ["s", "m", "count", "prob"], rows, summary)


def cmd_clt(args: argparse.Namespace, seed: int) -> str:
    seq = resolve_sequence(args)
    if seq.kind != UNDIRECTED:
        raise InvalidDegreeSequenceError("clt applies to --flavor cm only")
    res = run_montecarlo(seq, args.reps, seed, threads=args.threads, m_cut=args.mcut)
    moments = compute_moments(seq)
    nu = float(moments.nu)
    ell = seq.total
    d_max = moments.d_max
    s_scores = standardized_score(res.column("s"), nu / 2.0, nu / 2.0)
    results: dict = {
        "reps": res.reps,
        "ell": ell,
        "d_max": d_max,
        "nu": fraction_jsonable(moments.nu),
        "nu_warning": bool(float(moments.nu) < 10.0),
        "center_s": nu / 2.0,
        "scale_s": nu / 2.0,
        "ks_s": ks_normal(s_scores),
    }
    # the truncated statistic only involves vertices of degree <= mcut, so the
    # emission rule is checked against the largest degree that participates
    eff_max = d_max if args.mcut is None else min(d_max, args.mcut)
    m_ok = eff_max * eff_max <= ell / 4.0
    results["m_emitted"] = bool(m_ok)
    if m_ok:
        if args.mcut is not None:
            lam = lambda_truncated(seq, args.mcut)
            column = "m_trunc"
        else:
            lam = lambda_pair(seq)[1]
            column = "m"
        if lam is None or lam == 0:
            raise UndefinedValueError(
                "multi-edge rate is undefined or zero; cannot standardize m"
            )
        m_scores = standardized_score(res.column(column), float(lam), float(lam))
        results["m_column"] = column
        results["center_m"] = float(lam)
        results["scale_m"] = float(lam)
        results["ks_m"] = ks_normal(m_scores)
    else:
        results["m_reason"] = "d_max^2 exceeds ell/4; normal fit for m not meaningful"
    config = _config_dict(args, seed)
    if args.format == "json":
        return render_json(config, results)
    rows = sorted((k, v if not isinstance(v, dict) else v["exact"]) for k, v in results.items())
    return render_csv(config, ["key", "value"], rows)


def cmd_cramer_wold(args: argparse.Namespace, seed: int) -> str:
    seq = resolve_sequence(args)
    res = run_montecarlo(seq, args.reps, seed, threads=args.threads)
    lam_s, lam_m = _rates(seq)
    lam_m = lam_m if lam_m is not None else Fraction(0)
    if seq.kind == BIPARTITE:
        s_col = np.zeros(res.reps, dtype=np.int64)
    else:
        s_col = res.column("s")
    samples = np.stack([s_col, res.column("m")], axis=1)
    # the thinning stream index `reps` never collides with replicate streams
    thin_rng = RngStream(seed, res.reps)
    tv = cramer_wold_check(samples, args.p, args.q, lam_s, lam_m, thin_rng)
    results = {
        "reps": res.reps,
        "p": args.p,
        "q": args.q,
        "lambda_s": fraction_jsonable(lam_s),
        "lambda_m": fraction_jsonable(lam_m),
        "rate": args.p * float(lam_s) + args.q * float(lam_m),
        "tv": tv,
    }
    config = _config_dict(args, seed)
    if args.format == "json":
        return render_json(config, results)
    rows = sorted((k, v if not isinstance(v, dict) else v["exact"]) for k, v in results.items())
    return render_csv(config, ["key", "value"], rows)


def cmd_erased(args: argparse.Namespace, seed: int) -> str:
    seq = resolve_sequence(args)
    if seq.kind != UNDIRECTED:
        raise InvalidDegreeSequenceError("erased applies to --flavor cm only")
    res = run_montecarlo(seq, args.reps, seed, threads=args.threads)
    removed = res.column("removed")
    edges = seq.total // 2
    hist = EmpiricalDist.from_samples(removed)
    summary = {
        "edges": edges,
        "mean_removed": float(removed.mean()),
        "mean_removed_fraction": float(removed.mean()) / edges,
        "p_all_kept": float((removed == 0).mean()),
    }
    config = _config_dict(args, seed)
    if args.format == "json":
        results = {"reps": res.reps, "summary": summary, "hist_removed": hist.csv_rows()}
        return render_json(config, results)
    return render_csv(config, ["removed", "count"], hist.csv_rows(), summary)


_COMMANDS = {
    "moments": cmd_moments,
    "montecarlo": cmd_montecarlo,
    "enumerate": cmd_enumerate,
    "clt": cmd_clt,
    "cramer_wold": cmd_cramer_wold,
    "erased": cmd_erased,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        seed = resolve_seed(args)
        text = _COMMANDS[args.command](args, seed)
        _emit(args, text)
    except CapExceededError as exc:
        print(f"cmloops: error: {exc}", file=sys.stderr)
        return 3
    except UndefinedValueError as exc:
        print(f"cmloops: error: {exc}", file=sys.stderr)
        return 4
    except (CmloopsError, ValueError, OSError) as exc:
        print(f"cmloops: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
