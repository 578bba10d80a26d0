"""Command-line harness.

Subcommands
-----------
gen-matrix     generate a matrix with a prescribed singular spectrum
approx         factorize a matrix file and write factors + quality metrics
verify-bounds  run the deterministic bound/identity suites over random trials
compare        quality table of several algorithms over spectrum profiles
growth         conditioned-elimination growth / orthogonal-minor tail
bench          wall-clock medians of the factorization across sizes

Exit codes: 0 success, 1 a verified bound failed, 2 usage error.  The
default seed comes from the SKETCHLU_SEED environment variable (0 when
unset); identical arguments and seeds produce byte-identical output files.
"""

import argparse
import os
import sys
import time

import numpy as np

from . import bounds as bd
from . import factor as fx
from . import growth as gw
from .generate import gen_matrix, parse_profile, resolve_dims
from .matio import read_matrix, write_matrix
from .sketch import make_sketch, rng_from_seed

_ALGOS = ("glu", "rlu", "rqr", "prr_rlu", "cw")
_SKETCHES = ("srht", "gaussian", "haar")


def _default_seed():
    try:
        return int(os.environ.get("SKETCHLU_SEED", "0"))
    except ValueError:
        return 0


def _fmt(x):
    return f"{x:.17g}"


def _build_parser():
    p = argparse.ArgumentParser(prog="sketchlu", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-matrix", help="generate a matrix with a prescribed spectrum")
    g.add_argument("--profile", required=True, help="kind:args, e.g. step:3:100 or exp:0.5")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=_default_seed())
    g.add_argument("--out", required=True, help=".mtx or .glum path")

    a = sub.add_parser("approx", help="factorize a matrix file")
    a.add_argument("--algo", choices=_ALGOS, required=True)
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--in", dest="infile", required=True)
    a.add_argument("--l", type=int)
    a.add_argument("--lp", type=int)
    a.add_argument("--eps", type=float, default=0.1)
    a.add_argument("--delta", type=float, default=0.1)
    a.add_argument("--sketch", choices=_SKETCHES, default="srht")
    a.add_argument("--seed", type=int, default=_default_seed())
    a.add_argument("--out-prefix", default="approx")

    v = sub.add_parser("verify-bounds", help="run the bound suites over random trials")
    v.add_argument("--m", type=int, required=True)
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--k", type=int, required=True)
    v.add_argument("--l", type=int, required=True)
    v.add_argument("--lp", type=int, required=True)
    v.add_argument("--trials", type=int, default=50)
    v.add_argument("--j", default="1,2,3", help="comma-separated residual indices")
    v.add_argument("--seed", type=int, default=_default_seed())
    v.add_argument("--out", default="bounds.csv")

    c = sub.add_parser("compare", help="gamma-metric table across algorithms and profiles")
    c.add_argument("--profiles", required=True, help="comma-separated, e.g. step:3:100,exp:0.3")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--l", type=int)
    c.add_argument("--lp", type=int)
    c.add_argument("--algos", default="glu,rlu,rqr,prr_rlu,cw")
    c.add_argument("--sketch", choices=_SKETCHES, default="gaussian")
    c.add_argument("--trials", type=int, default=5)
    c.add_argument("--seed", type=int, default=_default_seed())
    c.add_argument("--out", default="compare.csv")

    w = sub.add_parser("growth", help="conditioned-elimination growth experiments")
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--trials", type=int, default=20)
    w.add_argument("--ensemble", choices=("haar", "gaussian"), default="haar")
    w.add_argument("--matrix", choices=("identity", "haar"), default="identity")
    w.add_argument("--tail", action="store_true", help="run the orthogonal-minor tail check instead")
    w.add_argument("--k", type=int, help="minor size for --tail (default n // 2)")
    w.add_argument("--deltas", default="0.1,0.25,0.5,1.0")
    w.add_argument("--seed", type=int, default=_default_seed())
    w.add_argument("--out", default="growth.csv")

    b = sub.add_parser("bench", help="median factorization times across sizes")
    b.add_argument("--sizes", required=True, help="comma-separated MxN, e.g. 256x256,512x512")
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--algo", choices=_ALGOS, default="glu")
    b.add_argument("--sketch", choices=_SKETCHES, default="srht")
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--seed", type=int, default=_default_seed())
    b.add_argument("--out", default="bench.csv")
    return p


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _cmd_gen_matrix(args):
    profile = parse_profile(args.profile, args.m, args.n, args.seed)
    A = gen_matrix(profile)
    write_matrix(args.out, A)
    print(f"wrote {args.out} ({args.m} x {args.n}, profile {args.profile}, seed {args.seed})")
    return 0


def _make_pair(sketch, m, n, l, lp, seed):
    base = seed if isinstance(seed, tuple) else (seed,)
    U1 = make_sketch(sketch, m, lp, seed=(*base, 0))
    V1 = make_sketch(sketch, n, l, seed=(*base, 1))
    return U1, V1


def _cmd_approx(args):
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    A = read_matrix(args.infile)
    m, n = A.shape
    l, lp, fell_back = resolve_dims(args.k, m, n, eps=args.eps, delta=args.delta, l=args.l, lp=args.lp)
    if args.algo in ("rlu", "rqr", "prr_rlu"):
        lp = l
    U1, V1 = _make_pair(args.sketch, m, n, l, lp, args.seed)
    F = fx.factorize(A, args.algo, U1=U1, V1=V1, k=args.k)
    metrics = bd.gamma_metrics(A, F.reconstruct(), args.k)

    prefix = args.out_prefix
    write_matrix(f"{prefix}_T.mtx", F.T)
    write_matrix(f"{prefix}_S.mtx", F.S)
    if F.mid is not None:
        write_matrix(f"{prefix}_mid.mtx", F.mid)
    rows = [("gamma_lowrank", "", _fmt(metrics.gamma_lowrank))]
    rows += [("gamma_spectrum", str(j + 1), _fmt(v)) for j, v in enumerate(metrics.gamma_spectrum)]
    rows += [("gamma_kernel", str(j + 1), _fmt(v)) for j, v in enumerate(metrics.gamma_kernel)]
    rows.append(("exact_recovery", "", str(metrics.exact_recovery).lower()))
    _write_csv(f"{prefix}_gamma.csv", "metric,j,value", rows)
    note = " (desk-scale fallback dims)" if fell_back else ""
    print(f"{args.algo}: k={args.k} l={l} lp={lp}{note} seed={args.seed}")
    print(f"gamma_lowrank={metrics.gamma_lowrank:.6g} exact_recovery={metrics.exact_recovery}")
    print(f"wrote {prefix}_T.mtx {prefix}_S.mtx {prefix}_gamma.csv")
    return 0


def _cmd_verify_bounds(args):
    if not 1 <= args.k <= args.l <= args.lp <= args.m:
        raise UsageError("need 1 <= k <= l <= lp <= m")
    j_list = [int(j) for j in args.j.split(",") if j]
    reports = []
    for t in range(args.trials):
        rng = rng_from_seed((args.seed, t, 0))
        A = rng.standard_normal((args.m, args.n))
        U1 = make_sketch("gaussian", args.m, args.lp, seed=(args.seed, t, 1)).to_dense()
        V1 = make_sketch("gaussian", args.n, args.l, seed=(args.seed, t, 2)).to_dense().T
        batch = (
            bd.verify_lu_bounds(A, U1, V1, args.k, j_list)
            + bd.verify_qr_bounds(A, V1, args.k, j_list)
            + bd.verify_schur_identities(A, U1, V1)
            + bd.compare_cw_glu(A, U1, V1, k=args.k)
        )
        reports.extend(
            bd.BoundReport(f"t{t}:{r.name}", r.lhs, r.rhs, r.scale, r.tol) for r in batch
        )
    bd.write_reports(args.out, reports)
    asserted = [r for r in reports if not r.name.endswith(":recorded")]
    failed = [r for r in asserted if not r.holds]
    print(f"{len(reports)} reports over {args.trials} trials -> {args.out}")
    print(f"asserted {len(asserted)}, failed {len(failed)}")
    for r in failed[:10]:
        print(f"FAIL {r.name}: lhs={r.lhs:.6g} rhs={r.rhs:.6g} slack={r.slack:.3e}")
    return 1 if failed else 0


def _cmd_compare(args):
    algos = [a for a in args.algos.split(",") if a]
    for a in algos:
        if a not in _ALGOS:
            raise UsageError(f"unknown algorithm {a!r}")
    l, lp, _ = resolve_dims(args.k, args.m, args.n, l=args.l, lp=args.lp)
    rows = []
    for ptext in args.profiles.split(","):
        profile = parse_profile(ptext, args.m, args.n, args.seed)
        A = gen_matrix(profile)
        sigma = profile.sigma()
        opt2 = float(np.sum(sigma[args.k:] ** 2))
        for algo in algos:
            algo_lp = l if algo in ("rlu", "rqr", "prr_rlu") else lp
            for t in range(args.trials):
                U1, V1 = _make_pair(args.sketch, args.m, args.n, l, algo_lp, (args.seed, t))
                F = fx.factorize(A, algo, U1=U1, V1=V1, k=args.k)
                Ak = F.reconstruct()
                g = bd.gamma_metrics(A, Ak, args.k)
                kern = g.gamma_kernel[: min(4, g.gamma_kernel.size)]
                fro_ratio = float(np.linalg.norm(A - Ak) ** 2 / opt2) if opt2 > 0 else float("nan")
                rows.append((
                    ptext, algo, str(t), _fmt(g.gamma_lowrank),
                    _fmt(float(np.nanmax(g.gamma_spectrum)) if g.gamma_spectrum.size else float("nan")),
                    _fmt(float(np.nanmax(kern)) if kern.size else float("nan")),
                    _fmt(fro_ratio),
                ))
    _write_csv(args.out, "profile,algo,trial,gamma_lowrank,gamma_spectrum_max,gamma_kernel_max,fro_ratio", rows)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def _cmd_growth(args):
    if args.tail:
        k = args.k if args.k is not None else args.n // 2
        deltas = [float(d) for d in args.deltas.split(",") if d]
        curve = gw.haar_minor_tail(args.n, k, args.trials, args.seed, deltas=deltas)
        rows = [
            (_fmt(d), _fmt(e), _fmt(b), _fmt(s))
            for d, e, b, s in zip(curve.deltas, curve.empirical, curve.bound, curve.stderr)
        ]
        _write_csv(args.out, "delta,empirical,bound,stderr", rows)
        ok = curve.within_bound()
        print(f"minor tail n={args.n} k={k} trials={args.trials}: within bound = {ok}")
        print(f"wrote {args.out}")
        return 0 if ok else 1
    if args.matrix == "identity":
        A = np.eye(args.n)
    else:
        A = make_sketch("haar", args.n, args.n, seed=(args.seed, 999)).to_dense()
    stats = gw.precondition_experiment(A, args.trials, args.seed, ensemble=args.ensemble)
    rows = [(str(i), _fmt(v)) for i, v in enumerate(stats.log_growth)]
    _write_csv(args.out, "trial,log_n_growth", rows)
    print(
        f"growth n={args.n} matrix={args.matrix} ensemble={args.ensemble}: "
        f"median={stats.median:.4f} mean={stats.mean:.4f} max={stats.max:.4f} "
        f"failures={stats.failures}/{stats.trials}"
    )
    print(f"wrote {args.out}")
    return 0


def _cmd_bench(args):
    sizes = []
    for token in args.sizes.split(","):
        try:
            m_s, n_s = token.lower().split("x")
            sizes.append((int(m_s), int(n_s)))
        except ValueError as exc:
            raise UsageError(f"bad size token {token!r}, expected MxN") from exc
    rows = []
    for m, n in sizes:
        l, lp, _ = resolve_dims(args.k, m, n)
        algo_lp = l if args.algo in ("rlu", "rqr", "prr_rlu") else lp
        rng = rng_from_seed((args.seed, m, n))
        A = rng.standard_normal((m, n))
        times = []
        for rep in range(max(5, args.reps)):
            U1, V1 = _make_pair(args.sketch, m, n, l, algo_lp, (args.seed, rep))
            t0 = time.perf_counter()
            fx.factorize(A, args.algo, U1=U1, V1=V1, k=args.k)
            times.append(time.perf_counter() - t0)
        med = float(np.median(times))
        rows.append((str(m), str(n), str(args.k), str(l), str(algo_lp), f"{med:.6e}", str(len(times))))
        print(f"{args.algo} {m}x{n} l={l} lp={algo_lp}: median {med:.4e} s over {len(times)} reps")
    _write_csv(args.out, "m,n,k,l,lp,median_seconds,reps", rows)
    print(f"wrote {args.out}")
    return 0


class UsageError(Exception):
    pass


_COMMANDS = {
    "gen-matrix": _cmd_gen_matrix,
    "approx": _cmd_approx,
    "verify-bounds": _cmd_verify_bounds,
    "compare": _cmd_compare,
    "growth": _cmd_growth,
    "bench": _cmd_bench,
}


def cli_main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
