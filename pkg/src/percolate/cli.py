"""``perc``: run a study and write its table as CSV or a JSON summary."""
from __future__ import annotations

import argparse
import json
import math
import sys
import time

from . import __version__, harness


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="perc", description="Critical bond percolation studies.")
    sub = ap.add_subparsers(dest="study", required=True)

    def common(p, n=None, trials=1000):
        p.add_argument("--n", type=int, default=n)
        p.add_argument("--eps", type=float, default=None)
        p.add_argument("--trials", type=int, default=trials)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--p", type=float, default=0.5, help="edge density")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        return p

    s = common(sub.add_parser("sample", help="one configuration as an edge table"), n=4, trials=1)
    s.add_argument("--trial", type=int, default=0)

    a = common(sub.add_parser("arms", help="arm probability"), trials=10000)
    a.add_argument("--spec", default="ooc")
    a.add_argument("--inner", type=int, default=0)
    a.add_argument("--outer", type=int, default=None)
    a.add_argument("--half", action="store_true", help="arms confined to the upper half-plane")

    r = common(sub.add_parser("radial", help="E[S_B | A_n] and pi_3(n)"), n=32)
    r.add_argument("--pi-trials", type=int, default=None)

    c = common(sub.add_parser("crossing", help="S_n, L_n and shortcut ratios on H_n"), n=32)
    c.add_argument("--accepted", type=int, default=None)

    sc = common(sub.add_parser("shortcut", help="per-trial shortcut table on H_n"), n=64)
    sc.add_argument("--accepted", type=int, default=None)
    sc.add_argument("--budget", type=int, default=None)
    sc.add_argument("--alpha3", type=float, default=0.3)

    d = common(sub.add_parser("dtail", help="law of D_e1 against pi_4"), trials=100000)
    d.add_argument("--kmax", type=int, default=None, help="dyadic depth (default: log2 of --n, else 6)")
    d.add_argument("--pi-trials", type=int, default=None)

    q = common(sub.add_parser("pt2pt", help="point-to-point distance tail"), trials=10000)
    q.add_argument("--d", type=int, default=1)
    q.add_argument("--L", type=int, default=4)
    q.add_argument("--pi-trials", type=int, default=None)

    v = common(sub.add_parser("verify", help="oracle verification suite"), n=4)
    v.add_argument("--level", choices=("fast", "full"), default="fast")
    v.add_argument("--emit-geometry", action="store_true",
                   help="also print the geometry of the sampled configuration (--n, --seed) as JSON")
    return ap


def _run(args) -> harness.StudyResult | harness.VerifyReport:
    st = args.study
    if st == "sample":
        return harness.run_sample(args.n, args.seed, args.p, args.trial)
    if st == "arms":
        outer = args.outer if args.outer is not None else args.n
        if outer is None:
            raise SystemExit("arms needs --outer (or --n)")
        return harness.run_arms(args.spec, args.inner, outer, args.trials, args.seed, args.p, args.threads, args.half)
    if st == "radial":
        return harness.run_radial(args.n, args.trials, args.seed, args.p, args.threads, args.pi_trials)
    if st == "crossing":
        return harness.run_crossing(args.n, None if args.accepted else args.trials, args.seed, args.eps, args.p,
                                    args.threads, args.accepted)
    if st == "shortcut":
        eps = 0.5 if args.eps is None else args.eps
        return harness.run_shortcut(args.n, eps, None if args.accepted else args.trials, args.seed, args.p,
                                    args.threads, args.accepted, args.budget, args.alpha3)
    if st == "dtail":
        kmax = args.kmax
        if kmax is None:
            kmax = args.n.bit_length() - 1 if args.n else 6
        return harness.run_dtail(kmax, args.trials, args.seed, args.p, args.threads, args.pi_trials)
    if st == "pt2pt":
        return harness.run_pt2pt(args.d, args.L, args.trials, args.seed, args.p, args.threads, args.pi_trials)
    return harness.verify_suite(args.level, args.seed or 20240601)


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if hasattr(x, "item"):
        return _clean(x.item())
    return x


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    t0 = time.perf_counter()
    out = _run(args)
    failed = False
    if isinstance(out, harness.VerifyReport):
        failed = not out.passed
        out = out.result()
    elapsed = time.perf_counter() - t0
    if args.format == "csv":
        text = out.to_csv()
    else:
        rows = [dict(zip(out.columns, r)) for r in out.rows]
        text = json.dumps(_clean({"spec": out.spec.to_dict(), "result": {"summary": out.summary, "table": rows},
                                  "version": __version__, "elapsed_s": elapsed}), indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.study == "verify" and args.emit_geometry:
        from .geometry import geometry_json
        from .lattice import sample_config

        sys.stdout.write(json.dumps(geometry_json(sample_config(args.n, args.p, args.seed))) + "\n")
    return 2 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
