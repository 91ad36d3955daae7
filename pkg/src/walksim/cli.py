"""Command-line interface: ``walksim <command> [options]``.

Commands
--------
``brk-random``     brk over random Hermitian matrices or unitary embeddings
``brk-qft``        brk of embedded perturbed Fourier matrices
``spin-rotation``  entries of ``exp(-i pi J_x/2)`` and its cost parameters
``simulate``       simulate ``exp(-i H t)`` for a matrix file
``implement``      implement a unitary (file or builtin) through its embedding
``cost``           evaluate a closed-form query-count prediction

Every output starts with a header holding the tool version, the full
configuration and the seed, so reruns with the same arguments produce
byte-identical files.  The wall-clock duration goes to stderr (or into the
header with ``--timing``, at the price of reproducibility).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import __version__
from ._errors import ContractError, PreconditionError
from .cost import THEOREMS, cost_estimate
from .numerics import make_rng, read_matrix
from .oracle import OracleSet, read_pattern

COMMANDS = ("brk-random", "brk-qft", "spin-rotation", "simulate", "implement", "cost")


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return v


def render(header: dict, tables: dict[str, list[dict]], extra: dict | None, fmt: str) -> str:
    """Serialize a header, named row tables and a free-form ``extra`` section.

    JSON output is one sorted-key document.  CSV output prefixes ``#`` comment
    lines (header, then ``extra`` as JSON) and writes each table with its own
    header row, separated by a ``# table: <name>`` line; LF line endings.
    """
    if fmt == "json":
        doc = {"header": header, **tables}
        if extra:
            doc["result"] = extra
        return json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# walksim {header['version']}\n")
    buf.write(f"# command: {header['command']}\n")
    buf.write(f"# seed: {header['seed']}\n")
    buf.write(f"# config: {json.dumps(header['config'], sort_keys=True)}\n")
    if "duration_s" in header:
        buf.write(f"# duration_s: {header['duration_s']!r}\n")
    if extra:
        buf.write(f"# result: {json.dumps(extra, sort_keys=True)}\n")
    for name, rows in tables.items():
        buf.write(f"# table: {name}\n")
        if not rows:
            continue
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: _fmt(v) for k, v in r.items()})
    return buf.getvalue()


def _flatten(d: dict, prefix: str = "") -> list[dict]:
    rows = []
    for k in sorted(d):
        v = d[k]
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            rows.extend(_flatten(v, key + "."))
        else:
            rows.append({"key": key, "value": v})
    return rows


def _emit(args, tables: dict[str, list[dict]], extra: dict | None, started: float) -> None:
    header = {"tool": "walksim", "version": __version__, "command": args.command,
              "seed": args.seed, "config": _config(args)}
    duration = time.perf_counter() - started
    if args.timing:
        header["duration_s"] = duration
    if args.format == "csv" and extra and not tables:
        # reports become a flat key/value table
        tables, extra = {"result": _flatten(extra)}, None
    text = render(header, tables, extra, args.format)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise SystemExit(f"walksim: cannot write {args.out}: {exc.strerror}")
    print(f"walksim {args.command}: {duration:.3f} s", file=sys.stderr)


def _config(args) -> dict:
    skip = {"func", "out", "timing"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_brk_random(args) -> tuple[dict, dict | None]:
    from .experiments import brk_random

    res = brk_random(args.ensemble, args.dims, args.trials, args.seed, threads=args.threads,
                     method=args.brk_method)
    return {"trials": res.rows, "summary": res.summary}, None


def cmd_brk_qft(args) -> tuple[dict, dict | None]:
    from .experiments import qft_sweep

    res = qft_sweep(args.n)
    return {"qft": res.rows}, {"loglog_slope_vs_dim": res.slope}


def cmd_spin_rotation(args) -> tuple[dict, dict | None]:
    from .experiments import spin_rotation_data

    if args.J < 0 or abs(2 * args.J - round(2 * args.J)) > 1e-12:
        raise ContractError("2J must be a nonnegative integer")
    res = spin_rotation_data(args.J, eps=args.eps)
    return {"entries": res.rows}, res.summary


def _load_oracles(args, unitary: bool) -> OracleSet:
    A = read_matrix(args.matrix)
    pattern = read_pattern(args.pattern) if getattr(args, "pattern", None) else None
    return OracleSet.from_unitary(A, pattern) if unitary else OracleSet.from_dense(A, pattern)


def _input(args, dim: int):
    if args.input is None:
        return None
    if not (0 <= args.input < dim):
        raise ContractError(f"--input must lie in [0, {dim})")
    psi = np.zeros(dim, dtype=complex)
    psi[args.input] = 1.0
    return psi


def cmd_simulate(args) -> tuple[dict, dict | None]:
    from .decompose import brk, large_norm_schedule, simulate_decomposed, small_norm_schedule
    from .simulate import EstimatorModel, simulate_lemma6, simulate_theorem1

    oset = _load_oracles(args, unitary=False)
    est = EstimatorModel(args.estimator)
    psi = _input(args, oset.dim)
    extra = {}
    if args.method == "theorem1":
        rep = simulate_theorem1(oset, args.t, args.eps, estimator=est, psi=psi, seed=args.seed)
    elif args.method == "lemma6":
        rep = simulate_lemma6(oset, args.t, args.eps, estimator=est, psi=psi, seed=args.seed)
    else:
        if args.method == "small_norm":
            H = oset.dense()
            zeta = args.zeta if args.zeta is not None else (brk(H, "auto") if np.any(H) else 1.0)
            sched = small_norm_schedule(oset.bounds, oset.D, args.t, args.eps, zeta, L=args.L)
        else:
            sched = large_norm_schedule(oset.bounds, oset.D, args.t, args.eps)
        extra["schedule"] = sched.as_dict()
        extra["invariants"] = sched.check_invariants()
        rep = simulate_decomposed(oset, sched, estimator=est, psi=psi, seed=args.seed)
    out = rep.as_dict()
    out.update(extra)
    return {}, out


def _builtin_unitary(args) -> np.ndarray:
    from .simulate import permutation_unitary, qft_matrix, search_unitary, spin_rotation

    if args.builtin == "qft":
        return qft_matrix(args.N)
    if args.builtin == "permutation":
        return permutation_unitary(make_rng(args.seed).permutation(args.N))
    if args.builtin == "search":
        return search_unitary(args.N, args.marked)
    return spin_rotation(args.J)


def cmd_implement(args) -> tuple[dict, dict | None]:
    from .simulate import EstimatorModel, implement_unitary

    if (args.matrix is None) == (args.builtin is None):
        raise ContractError("give exactly one of --matrix or --builtin")
    if args.matrix is not None:
        uset = _load_oracles(args, unitary=True)
    else:
        uset = OracleSet.from_unitary(_builtin_unitary(args))
    N = uset.dim
    psi = _input(args, N)
    rep = implement_unitary(uset, args.method, args.eps, psi=psi, seed=args.seed,
                            estimator=EstimatorModel(args.estimator))
    w, Q = np.linalg.eigh(rep.output.matrix)
    top = Q[:, -1]
    upper = np.abs(top[:N]) ** 2
    out = rep.as_dict()
    out["dim"] = N
    out["output_upper_block_argmax"] = int(np.argmax(upper))
    out["output_upper_block_max_weight"] = float(upper.max() * w[-1])
    return {}, out


def _parse_params(items: list[str]) -> dict:
    p = {}
    for it in items:
        if "=" not in it:
            raise ContractError(f"parameters are key=value pairs, got {it!r}")
        k, v = it.split("=", 1)
        p[k] = [float(x) for x in v.split(",")] if "," in v else float(v)
    return p


def cmd_cost(args) -> tuple[dict, dict | None]:
    """Evaluate ``cost_estimate`` on the Cartesian product of comma-separated values."""
    import itertools

    p = _parse_params(args.params)
    keys = sorted(p)
    grids = [p[k] if isinstance(p[k], list) else [p[k]] for k in keys]
    rows = []
    for combo in itertools.product(*grids):
        params = dict(zip(keys, combo))
        est = cost_estimate(args.theorem, **params)
        rows.append({**params, "value": est.value, "violations": "; ".join(est.violations)})
    return {"cost": rows}, None


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base random seed (default 0)")
    common.add_argument("--out", default="-", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--threads", type=int, default=1, help="worker threads for ensembles")
    common.add_argument("--timing", action="store_true",
                        help="embed the wall-clock duration in the output header")

    p = argparse.ArgumentParser(prog="walksim", description="Quantum-walk simulation experiments.")
    p.add_argument("--version", action="version", version=f"walksim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("brk-random", parents=[common], help="brk of random matrix ensembles")
    s.add_argument("--ensemble", choices=("hermitian", "unitary_embedding"), default="hermitian")
    s.add_argument("--dims", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--brk-method", choices=("auto", "exact", "search"), default=None)
    s.set_defaults(func=cmd_brk_random)

    s = sub.add_parser("brk-qft", parents=[common], help="brk of perturbed Fourier matrices")
    s.add_argument("--n", type=int, nargs="+", default=[8, 16, 32, 64, 128, 256])
    s.set_defaults(func=cmd_brk_qft)

    s = sub.add_parser("spin-rotation", parents=[common], help="exp(-i pi J_x/2) data")
    s.add_argument("--J", type=float, default=100.0)
    s.add_argument("--eps", type=float, default=0.1)
    s.set_defaults(func=cmd_spin_rotation)

    est = argparse.ArgumentParser(add_help=False)
    est.add_argument("--estimator", choices=("gaussian", "exact_qpe"), default="gaussian")
    est.add_argument("--input", type=int, default=None,
                     help="basis-state input index (default: random state from --seed)")

    s = sub.add_parser("simulate", parents=[common, est], help="simulate exp(-iHt) for a matrix file")
    s.add_argument("--matrix", required=True, help="matrix JSON file")
    s.add_argument("--pattern", default=None, help="sparsity pattern JSON file")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--method", choices=("theorem1", "lemma6", "small_norm", "large_norm"),
                   default="theorem1")
    s.add_argument("--zeta", type=float, default=None, help="brk bound (default: measured)")
    s.add_argument("--L", type=int, default=None, help="small-norm band count")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("implement", parents=[common, est], help="implement a unitary")
    s.add_argument("--matrix", default=None, help="unitary matrix JSON file")
    s.add_argument("--pattern", default=None)
    s.add_argument("--builtin", choices=("qft", "permutation", "search", "spin"), default=None)
    s.add_argument("--N", type=int, default=8, help="dimension of builtin qft/permutation/search")
    s.add_argument("--marked", type=int, default=0, help="marked item of the search unitary")
    s.add_argument("--J", type=float, default=2.0, help="spin of the builtin rotation")
    s.add_argument("--method", choices=("exact_walk", "theorem1", "lemma6", "decomposed"),
                   default="exact_walk")
    s.add_argument("--eps", type=float, default=0.01)
    s.set_defaults(func=cmd_implement)

    s = sub.add_parser("cost", parents=[common], help="closed-form query-count predictions")
    s.add_argument("theorem", choices=THEOREMS)
    s.add_argument("params", nargs="*", help="key=value or key=v1,v2,... (swept)")
    s.set_defaults(func=cmd_cost)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        tables, extra = args.func(args)
    except (ContractError, PreconditionError) as exc:
        print(f"walksim {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"walksim {args.command}: cannot read {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 2
    _emit(args, tables, extra, started)
    return 0


if __name__ == "__main__":
    sys.exit(main())
