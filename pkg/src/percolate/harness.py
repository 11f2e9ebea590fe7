"""Seeded Monte Carlo studies, CSV/JSON emission and the oracle verification suite.

Trial i of a study under seed s draws its edges from key (s, i); trials are
run in fixed chunks and reduced in chunk order, so every table is a
deterministic function of its parameters whatever the thread count.
"""
from __future__ import annotations

import io
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import _core, _graph, _studies
from ._parallel import CHUNK, run_chunks
from .arms import PI3, PI4, AnnulusQuery, ArmSpec, edge_arm_event, edge_hole, estimate_pi
from .lattice import HORIZONTAL, EdgeId, sample_config
from .stats import EstimatorResult, mean_of, proportion, ratio

log = logging.getLogger(__name__)

E1 = EdgeId(HORIZONTAL, 0, 0)
# arm-probability normalisers use streams from here on, disjoint from study trials
PI_STREAM = 1 << 40
MAX_N = 4096


@dataclass(frozen=True)
class StudySpec:
    study: str
    n: int | None = None
    kmax: int | None = None
    eps: float | None = None
    trials: int | None = 1000
    seed: int = 0
    p: float = 0.5
    conditioning: str = "none"
    threads: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials is not None and self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.n is not None and not 1 <= self.n <= MAX_N:
            raise ValueError(f"n must lie in [1, {MAX_N}]")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class StudyResult:
    """A table (``columns`` x ``rows``) plus a JSON-ready summary."""

    spec: StudySpec
    columns: list[str]
    rows: list[list]
    summary: dict

    def to_csv(self) -> str:
        return to_csv(self.columns, self.rows)


def fmt(v) -> str:
    """CSV cell: integers verbatim, floats with 10 significant digits."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return format(v, ".10g")
    return str(v)


def to_csv(columns: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(fmt(v) for v in r) + "\n")
    return buf.getvalue()


def _thr(p: float):
    return _core.kernel_scalar(_core.threshold(p))


def _seed(seed: int):
    return _core.kernel_scalar(seed)


def _batched(kernel: Callable[[int, int], tuple], trials: int, threads: int) -> tuple:
    """Concatenate per-chunk output arrays of ``kernel(first, count)`` in trial order."""
    parts = run_chunks(lambda a, b: kernel(a, b - a), trials, threads)
    return tuple(np.concatenate(col) for col in zip(*parts))


def _until_accepted(kernel, accepted: int, ok, threads: int, limit: int) -> tuple:
    """Trials 0, 1, ... until ``accepted`` of them satisfy ``ok``; cut at exactly that many."""
    block = CHUNK * max(1, threads)
    cols, done, have = None, 0, 0
    while have < accepted:
        if done >= limit:
            raise RuntimeError(f"fewer than {accepted} accepted trials in {limit}")
        base = done
        part = run_chunks(lambda a, b: kernel(base + a, b - a), block, threads)
        part = tuple(np.concatenate(c) for c in zip(*part))
        cols = part if cols is None else tuple(np.concatenate([c, q]) for c, q in zip(cols, part))
        done += block
        have = int(ok(cols).sum())
    idx = np.flatnonzero(ok(cols))
    cut = int(idx[accepted - 1]) + 1
    return tuple(c[:cut] for c in cols)


def pi_estimate(spec: ArmSpec, radius: int, trials: int, seed: int, p: float = 0.5,
                threads: int = 1) -> EstimatorResult:
    """Arm probability around e1 = {(0,0),(1,0)} out to ``radius``."""
    return estimate_pi(spec, AnnulusQuery(0, radius, E1), trials, seed, p, threads, PI_STREAM)


# ------------------------------------------------------------------ radial

def run_radial(n: int, trials: int, seed: int, p: float = 0.5, threads: int = 1,
               pi_trials: int | None = None) -> StudyResult:
    """E[S_{B_n} | A_n] by rejection on A_n, with pi_3(n) and the ratio to n^2 pi_3(n)."""
    spec = StudySpec("radial", n=n, trials=trials, seed=seed, p=p, conditioning="A_n", threads=threads)
    thr, sd = _thr(p), _seed(seed)

    def kern(first, count):
        out = np.empty(count, np.int64)
        _studies.radial_batch(n, sd, first, count, thr, out)
        return (out,)

    (S,) = _batched(kern, trials, threads)
    acc = S[S >= 0]
    if acc.size == 0:
        raise RuntimeError("no trial satisfied A_n")
    est = mean_of(trials, acc, seed)
    pi3 = pi_estimate(PI3, n, pi_trials or trials, seed, p, threads)
    r, rse = ratio(est.value, est.stderr, n * n * pi3.value, n * n * pi3.stderr)
    cols = ["n", "trials", "accepted", "mean_S", "stderr_S", "pi3", "stderr_pi3", "ratio", "stderr_ratio", "seed"]
    row = [n, trials, est.accepted, est.value, est.stderr, pi3.value, pi3.stderr, r, rse, seed]
    summary = {"S": est.to_dict(), "pi3": pi3.to_dict(), "ratio": r, "stderr_ratio": rse,
               "acceptance": est.accepted / trials}
    return StudyResult(spec, cols, [row], summary)


# ---------------------------------------------------------------- crossing

@dataclass(frozen=True)
class CrossingRecord:
    trial: int
    S: int
    L: int
    sigma: int
    detours: int
    detoured_edges: int


def _shortcut_record(n: int, p: float, seed: int, trial: int, eps: float, budget, alpha3) -> tuple[int, int, int]:
    from .geometry import lowest_crossing
    from .shortcut import build_shortcut, find_all_detours

    cfg = sample_config(n, p, seed, trial)
    low = lowest_crossing(cfg)
    ds = find_all_detours(cfg, low, eps, budget, alpha3)
    plan = build_shortcut(cfg, low, list(ds.values()))
    for d in plan.Pi:
        if len(d.P) > eps * len(d.Q):
            raise AssertionError(f"trial {trial}: detour ratio exceeds eps")
    spans = sorted((low.vertices.index(d.w0), low.vertices.index(d.wM)) for d in plan.Pi)
    spans = [(min(a, b), max(a, b)) for a, b in spans]
    spans.sort()
    for (a0, b0), (a1, b1) in zip(spans, spans[1:]):
        if b0 >= a1:
            raise AssertionError(f"trial {trial}: chosen detoured segments overlap")
    return len(plan.sigma), len(plan.Pi), plan.detoured_edges


def crossing_records(n: int, seed: int, trials: int | None = None, accepted: int | None = None,
                     eps: float | None = None, p: float = 0.5, threads: int = 1,
                     budget: int | None = None, alpha3: float = 0.3) -> list[CrossingRecord]:
    """Per-trial (S_n, L_n) on H_n, with the shortcut length when ``eps`` is given.

    Give either ``trials`` (attempts) or ``accepted`` (first that many H_n trials).
    """
    if eps is not None and not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    thr, sd = _thr(p), _seed(seed)

    def kern(first, count):
        s = np.empty(count, np.int64)
        l = np.empty(count, np.int64)
        _studies.crossing_batch(n, sd, first, count, thr, s, l)
        return s, l

    if accepted is not None:
        S, L = _until_accepted(kern, accepted, lambda c: c[0] >= 0, threads, limit=1000 * accepted + CHUNK)
    else:
        S, L = _batched(kern, trials, threads)
    idx = np.flatnonzero(S >= 0)
    if np.any(S[idx] > L[idx]):
        raise AssertionError("a shortest crossing is longer than the lowest one")
    if eps is None:
        return [CrossingRecord(int(i), int(S[i]), int(L[i]), int(L[i]), 0, 0) for i in idx]

    def work(a, b):
        return [_shortcut_record(n, p, seed, int(i), eps, budget, alpha3) for i in idx[a:b]]

    extra = [r for part in run_chunks(work, len(idx), threads, chunk=64) for r in part]
    out = []
    for i, (sig, nd, de) in zip(idx, extra):
        if not S[i] <= sig <= L[i]:
            raise AssertionError(f"trial {i}: shortcut length {sig} outside [{S[i]}, {L[i]}]")
        out.append(CrossingRecord(int(i), int(S[i]), int(L[i]), sig, nd, de))
    return out


def _crossing_summary(recs: list[CrossingRecord], trials: int, seed: int) -> dict:
    S = np.array([r.S for r in recs], np.float64)
    L = np.array([r.L for r in recs], np.float64)
    sig = np.array([r.sigma for r in recs], np.float64)
    return {"S": mean_of(trials, S, seed), "L": mean_of(trials, L, seed),
            "S_over_L": mean_of(trials, S / L, seed), "sigma_over_L": mean_of(trials, sig / L, seed)}


def run_crossing(n: int, trials: int | None, seed: int, eps: float | None = None, p: float = 0.5,
                 threads: int = 1, accepted: int | None = None, budget: int | None = None,
                 alpha3: float = 0.3) -> StudyResult:
    """Shortest and lowest crossings on H_n, and the shortcut when ``eps`` is given."""
    spec = StudySpec("crossing", n=n, eps=eps, trials=trials, seed=seed, p=p, conditioning="H_n",
                     threads=threads, extra={"accepted": accepted})
    recs = crossing_records(n, seed, None if accepted else trials, accepted, eps, p, threads, budget, alpha3)
    if not recs:
        raise RuntimeError("no trial satisfied H_n")
    attempted = recs[-1].trial + 1 if accepted else trials
    sm = _crossing_summary(recs, attempted, seed)
    rate = len(recs) / attempted
    if 8 <= n <= 256 and not 0.3 <= rate <= 0.7:
        log.warning("H_%d acceptance %.3f lies outside [0.3, 0.7]", n, rate)
    cols = ["n", "eps", "trials", "accepted", "mean_S", "stderr_S", "mean_L", "stderr_L",
            "mean_S_over_L", "stderr_S_over_L", "mean_sigma_over_L", "stderr_sigma_over_L", "seed"]
    row = [n, "" if eps is None else float(eps), attempted, len(recs), sm["S"].value, sm["S"].stderr,
           sm["L"].value, sm["L"].stderr, sm["S_over_L"].value, sm["S_over_L"].stderr,
           sm["sigma_over_L"].value, sm["sigma_over_L"].stderr, seed]
    summary = {k: v.to_dict() for k, v in sm.items()}
    summary["acceptance"] = rate
    return StudyResult(spec, cols, [row], summary)


def run_shortcut(n: int, eps: float, trials: int | None, seed: int, p: float = 0.5, threads: int = 1,
                 accepted: int | None = None, budget: int | None = None, alpha3: float = 0.3) -> StudyResult:
    """Per-trial shortcut table on H_n."""
    spec = StudySpec("shortcut", n=n, eps=eps, trials=trials, seed=seed, p=p, conditioning="H_n",
                     threads=threads, extra={"accepted": accepted})
    recs = crossing_records(n, seed, None if accepted else trials, accepted, eps, p, threads, budget, alpha3)
    cols = ["trial", "Sn", "Ln", "sigma_len", "num_detours", "detoured_edges"]
    rows = [[r.trial, r.S, r.L, r.sigma, r.detours, r.detoured_edges] for r in recs]
    summary = {"accepted": len(recs), "with_detour": sum(1 for r in recs if r.detours),
               "mean_sigma_over_L": float(np.mean([r.sigma / r.L for r in recs])) if recs else math.nan}
    return StudyResult(spec, cols, rows, summary)


# ------------------------------------------------------------------- dtail

def run_dtail(kmax: int, trials: int, seed: int, p: float = 0.5, threads: int = 1,
              pi_trials: int | None = None, pi_kmax: int | None = None) -> StudyResult:
    """Law of D_{e1} on B_{2^kmax} against pi_4(2^{k-1}).

    Censored trials (no connection inside B_{2^kmax}) are counted apart.
    ``pi_kmax`` caps the scales at which pi_4 is estimated (default kmax).
    """
    if not 1 <= kmax <= 8:
        raise ValueError("kmax must lie in [1, 8]")
    spec = StudySpec("dtail", kmax=kmax, trials=trials, seed=seed, p=p, threads=threads)
    N = 1 << kmax
    thr, sd = _thr(p), _seed(seed)

    def kern(first, count):
        k = np.empty(count, np.int64)
        d = np.empty(count, np.int64)
        _graph.dyadic_batch(N, kmax, sd, first, count, thr, k, d)
        return k, d

    K, Dist = _batched(kern, trials, threads)
    hit = K >= 1
    if np.any(Dist[hit] < (1 << (K[hit] - 1))):
        raise AssertionError("a trial with D = k has chemical distance below 2^(k-1)")
    cens = int((K < 0).sum())
    pk = kmax if pi_kmax is None else min(pi_kmax, kmax)
    cols = ["k", "trials", "count", "phat", "stderr", "censored", "scaled", "pi4", "stderr_pi4",
            "ratio", "stderr_ratio", "seed"]
    rows, table = [], {}
    for k in range(1, kmax + 1):
        est = proportion(trials, int((K == k).sum()), seed)
        scaled = 4.0 ** (k - 1) * est.value
        if k <= pk:
            pi4 = pi_estimate(PI4, 1 << (k - 1), pi_trials or trials, seed, p, threads)
            r, rse = ratio(est.value, est.stderr, pi4.value, pi4.stderr)
            pv, ps = pi4.value, pi4.stderr
        else:
            pv = ps = r = rse = math.nan
        rows.append([k, trials, est.hits, est.value, est.stderr, cens / trials, scaled, pv, ps, r, rse, seed])
        table[k] = {"phat": est.value, "stderr": est.stderr, "scaled": scaled, "pi4": pv, "ratio": r}
    summary = {"censored": cens / trials, "by_k": table}
    return StudyResult(spec, cols, rows, summary)


# ------------------------------------------------------------------ pt2pt

LAMBDAS = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0)


def run_pt2pt(d: int, L: int, trials: int, seed: int, p: float = 0.5, threads: int = 1,
              pi_trials: int | None = None, lambdas=LAMBDAS) -> StudyResult:
    """Chemical distance between x and y = x + d e1 on B_{2^{L+1} d}, given x <-> y in the box.

    Also the dual-circuit scale K: the least k <= L with a closed dual
    circuit around B_{2^k d} inside B_{2^{k+1} d}; K = L + 1 when none.
    """
    if d < 1 or L < 1:
        raise ValueError("d and L must be positive")
    spec = StudySpec("pt2pt", n=(1 << (L + 1)) * d, trials=trials, seed=seed, p=p,
                     conditioning="x<->y", threads=threads, extra={"d": d, "L": L})
    N = (1 << (L + 1)) * d
    thr, sd = _thr(p), _seed(seed)

    def kern(first, count):
        dist = np.empty(count, np.int64)
        k = np.empty(count, np.int64)
        _studies.pt2pt_batch(N, d, L, sd, first, count, thr, dist, k)
        return dist, k

    Dist, K = _batched(kern, trials, threads)
    ok = Dist >= 0
    acc = int(ok.sum())
    if acc == 0:
        raise RuntimeError("x and y were never connected")
    pi3 = pi_estimate(PI3, d, pi_trials or trials, seed, p, threads)
    scale = d * d * pi3.value
    cols = ["kind", "d", "L", "x", "value", "stderr", "accepted", "trials", "seed"]
    rows = []
    for lam in lambdas:
        est = proportion(acc, int((Dist[ok] >= lam * scale).sum()), seed)
        rows.append(["tail", d, L, float(lam), est.value, est.stderr, acc, trials, seed])
    for l in range(1, L + 2):
        est = proportion(acc, int((K[ok] >= l).sum()), seed)
        rows.append(["K_at_least", d, L, l, est.value, est.stderr, acc, trials, seed])
    summary = {"accepted": acc, "pi3": pi3.to_dict(), "scale": scale,
               "tail": {str(r[3]): r[4] for r in rows if r[0] == "tail"},
               "K_at_least": {str(r[3]): r[4] for r in rows if r[0] == "K_at_least"}}
    return StudyResult(spec, cols, rows, summary)


# --------------------------------------------------------------- arms/sample

def run_arms(spec_word: str, inner: int, outer: int, trials: int, seed: int, p: float = 0.5,
             threads: int = 1, half: bool = False) -> StudyResult:
    """pi for the colour word around e1 (inner = 0) or across the annulus inner..outer."""
    from .arms import FULL_PLANE, UPPER_HALF

    aspec = ArmSpec.parse(spec_word, UPPER_HALF if half else FULL_PLANE)
    center = E1 if inner == 0 else (0, 0)
    est = estimate_pi(aspec, AnnulusQuery(inner, outer, center), trials, seed, p, threads)
    spec = StudySpec("arms", n=outer, trials=trials, seed=seed, p=p, threads=threads,
                     extra={"spec": aspec.word, "inner": inner, "region": aspec.region})
    cols = ["spec", "inner", "outer", "trials", "hits", "phat", "stderr", "seed"]
    row = [aspec.word, inner, outer, trials, est.hits, est.value, est.stderr, seed]
    return StudyResult(spec, cols, [row], est.to_dict())


def run_sample(n: int, seed: int, p: float = 0.5, trial: int = 0) -> StudyResult:
    """One configuration as an edge table."""
    from .lattice import all_edges

    cfg = sample_config(n, p, seed, trial)
    cols = ["index", "orientation", "x", "y", "open"]
    rows = [[i, e.orientation, e.x, e.y, int(cfg.bits[i])] for i, e in enumerate(all_edges(n))]
    spec = StudySpec("sample", n=n, trials=1, seed=seed, p=p, extra={"trial": trial})
    return StudyResult(spec, cols, rows, {"config": cfg.to_dict()})


# ------------------------------------------------------------ verification

@dataclass(frozen=True)
class Check:
    name: str
    agree: int
    total: int

    @property
    def passed(self) -> bool:
        return self.agree == self.total


@dataclass(frozen=True)
class VerifyReport:
    level: str
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def result(self) -> StudyResult:
        rows = [[c.name, int(c.passed), c.agree, c.total] for c in self.checks]
        spec = StudySpec("verify", trials=1, extra={"level": self.level})
        return StudyResult(spec, ["check", "passed", "agree", "total"], rows, {"passed": self.passed})


def n1_monte_carlo(trials: int, seed: int, threads: int = 1) -> dict[str, EstimatorResult]:
    """P(H_1), E[S_1 | H_1], P(A_1) and E[S_{B_1} | A_1] by simulation."""
    thr, sd = _thr(0.5), _seed(seed)

    def kern(first, count):
        s = np.empty(count, np.int64)
        l = np.empty(count, np.int64)
        r = np.empty(count, np.int64)
        _studies.crossing_batch(1, sd, first, count, thr, s, l)
        _studies.radial_batch(1, sd, first, count, thr, r)
        return s, r

    S, R = _batched(kern, trials, threads)
    return {"P_H": proportion(trials, int((S >= 0).sum()), seed),
            "E_S_given_H": mean_of(trials, S[S >= 0], seed),
            "P_A": proportion(trials, int((R >= 0).sum()), seed),
            "E_SB_given_A": mean_of(trials, R[R >= 0], seed)}


def _check_n1_exhaustive() -> list[Check]:
    from . import oracles
    from .distance import crossing_lengths, radial_distance
    from .lattice import BondConfig, enumeration_bits

    t = oracles.n1_table()
    agree_s = agree_r = 0
    bits = enumeration_bits(1)
    for mask, row in enumerate(bits):
        cfg = BondConfig(1, row)
        cl = crossing_lengths(cfg)
        agree_s += (cl is None and t["H"][mask] == 0) or (cl is not None and cl[0] == t["S"][mask])
        r = radial_distance(cfg)
        agree_r += (r is None and t["A"][mask] == 0) or (r is not None and r == t["SB"][mask])
    return [Check("n1 shortest crossing per config", int(agree_s), len(bits)),
            Check("n1 radial distance per config", int(agree_r), len(bits))]


def _check_n1_mc(trials: int, seed: int) -> Check:
    from .oracles import n1_exact

    ex = n1_exact()
    mc = n1_monte_carlo(trials, seed)
    ok = sum(abs(mc[k].value - ex[k]) <= 3 * mc[k].stderr for k in ex)
    return Check(f"n1 Monte Carlo within 3 stderr ({trials} trials)", int(ok), len(ex))


def _check_lowest(count: int, seed: int) -> Check:
    from .geometry import lowest_crossing
    from .oracles import lowest_crossing_oracle

    agree = total = s = 0
    while total < count:
        cfg = sample_config(2, 0.5, seed, s)
        s += 1
        o = lowest_crossing_oracle(cfg)
        if o is None:
            continue
        total += 1
        got = lowest_crossing(cfg)
        agree += got is not None and got.vertices == o
    return Check("n2 lowest crossing vs minimal region", agree, total)


def _check_arms(count: int, radii, seed: int) -> list[Check]:
    from .oracles import arm_packing_oracle

    out = []
    for word in ("ooc", "ococ", "oooo"):
        spec = ArmSpec.parse(word)
        for m in radii:
            agree = 0
            for s in range(count):
                cfg = sample_config(m, 0.5, seed, s)
                agree += edge_arm_event(cfg, E1, m, spec) == arm_packing_oracle(cfg, edge_hole(E1, m), spec.colors)
            out.append(Check(f"arm event {word} m={m} vs packing", agree, count))
    return out


def _check_fixture() -> Check:
    from .geometry import LatticePath, lowest_crossing
    from .oracles import fixture_7x7
    from .shortcut import ShieldedDetour, build_shortcut, find_detour, verify_shielded_detour
    from .geometry import DUAL

    f = fixture_7x7()
    cfg, eps = f["config"], f["eps"]
    low = lowest_crossing(cfg)
    cand = ShieldedDetour(LatticePath(tuple(f["P"])), LatticePath(tuple(f["Q"])),
                          LatticePath(tuple(f["R"]), DUAL), f["anchor"])
    R = f["R"]
    opened = cfg.with_edges(opened=[LatticePath((R[2], R[3]), DUAL).edges[0]])
    got = find_detour(cfg, low, f["anchor"], eps)
    plan = build_shortcut(cfg, low, [cand], eps)
    checks = [
        low is not None and list(low.vertices) == f["l_n"],
        verify_shielded_detour(cfg, low, cand, eps).failed == (),
        verify_shielded_detour(opened, low, cand, eps).failed == (4,),
        got is not None and list(got.P.vertices) == f["P"],
        len(low) - len(plan.sigma) == len(cand.Q) - len(cand.P),
    ]
    return Check("7x7 detour fixture", sum(checks), len(checks))


def verify_suite(level: str = "fast", seed: int = 20240601) -> VerifyReport:
    """Run the oracle comparisons; ``fast`` keeps to small samples, ``full`` uses the acceptance sizes."""
    if level not in ("fast", "full"):
        raise ValueError("level must be 'fast' or 'full'")
    full = level == "full"
    checks = _check_n1_exhaustive()
    checks.append(_check_n1_mc(10**6 if full else 10**5, seed))
    checks.append(_check_lowest(200 if full else 50, seed))
    checks.extend(_check_arms(500 if full else 40, (2, 3, 4) if full else (2, 3), seed))
    checks.append(_check_fixture())
    return VerifyReport(level, tuple(checks))


STUDIES = ("sample", "arms", "radial", "crossing", "shortcut", "dtail", "pt2pt", "verify")

__all__ = [
    "CrossingRecord", "StudyResult", "StudySpec", "VerifyReport", "crossing_records", "fmt",
    "n1_monte_carlo", "pi_estimate", "run_arms", "run_crossing", "run_dtail", "run_pt2pt",
    "run_radial", "run_sample", "run_shortcut", "to_csv", "verify_suite",
]
