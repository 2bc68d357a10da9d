"""Monte Carlo campaigns: hitting times, shadow growth, torsion scans.

Every trial is a pure function of (parameters, seed); campaigns assign
seeds seed_base + i and aggregate in seed order, so identical configs
produce byte-identical artifacts.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .complexes import (
    Complex,
    ProcessStream,
    face_edges,
    rank_edge,
    sample_binomial,
    sample_fixed_size,
    uncovered_edges,
)
from .exact_linalg import EchelonBasis, boundary_vector_dense, is_prime
from .homology import (
    HomologySummary,
    cycle_space_dim,
    homology_Z,
    shadow_size_deficit,
)
from .shady_partitions import Thresholds


@dataclass(frozen=True)
class ProcessTrace:
    """Milestones of one run of the triangle process."""

    n: int
    seed: int
    h_delta: int  # first step with every edge covered
    h_f2: int  # first step with H_1(.; F_2) = 0
    h_z: int  # first step with H_1(.; Z) = 0
    torsion_at_h_delta: tuple[int, ...]
    equal_flag: bool  # h_z == h_delta


def hitting_time_trial(n: int, seed: int) -> ProcessTrace:
    """Stream the process and locate the three hitting times exactly.

    Edge coverage is counted per step; the F_2 Betti number is maintained
    by incremental echelon insertion (one column per face), and the
    integer decision via Smith form runs only at steps where it is zero,
    since F_2-triviality is necessary for Z-triviality.
    """
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    stream = ProcessStream(n, seed, dim=2)
    Y = Complex(n, dim=2)
    basis = EchelonBasis(2, math.comb(n, 2))
    cycle_dim = cycle_space_dim(n, 2)
    uncovered = math.comb(n, 2)
    h_delta = h_f2 = h_z = None
    torsion_at_h_delta: tuple[int, ...] = ()
    step = 0
    for f in stream:
        step += 1
        assert Y.edge_cover_count is not None
        for e in face_edges(f):
            r = rank_edge(e)
            if Y.edge_cover_count[r] == 0:
                uncovered -= 1
        Y.add_face(f)
        basis.insert(boundary_vector_dense(f, n) % 2)
        f2_betti = cycle_dim - basis.rank
        if h_f2 is None and f2_betti == 0:
            h_f2 = step
        if h_delta is None and uncovered == 0:
            h_delta = step
            summary = homology_Z(Y)
            torsion_at_h_delta = summary.torsion
            if summary.trivial:
                h_z = step
        elif h_delta is not None and h_z is None and f2_betti == 0:
            if homology_Z(Y).trivial:
                h_z = step
        if h_z is not None:
            break
    if h_delta is None or h_f2 is None or h_z is None:
        raise AssertionError("process exhausted without reaching trivial homology")
    if not h_delta <= h_f2 <= h_z:
        raise AssertionError(
            f"hitting-time chain violated: {h_delta} <= {h_f2} <= {h_z} fails"
        )
    return ProcessTrace(
        n=n,
        seed=seed,
        h_delta=h_delta,
        h_f2=h_f2,
        h_z=h_z,
        torsion_at_h_delta=torsion_at_h_delta,
        equal_flag=h_z == h_delta,
    )


# ---------------------------------------------------------------------------
# shadow growth


def shadow_growth_trial(
    n: int, p: int, seed: int, force_full: bool = False
) -> dict:
    """Shadow deficit of one fixed-size sample at M = ceil((ln n / n) C(n,3))."""
    if n < 6:
        raise ValueError(f"need n >= 6, got {n}")
    M = math.ceil(math.log(n) / n * math.comb(n, 3))
    Y = Complex.full(n) if force_full else sample_fixed_size(n, M, seed)
    deficit = shadow_size_deficit(Y, p)
    budget = n**3 / math.log(math.log(n))
    return {
        "n": n,
        "p": p,
        "seed": seed,
        "M": M,
        "deficit": deficit,
        "exceeds_budget": int(deficit > budget),
    }


def shadow_growth_run(
    n: int, p: int, seeds, force_full: bool = False
) -> list[dict]:
    return [shadow_growth_trial(n, p, s, force_full=force_full) for s in seeds]


# ---------------------------------------------------------------------------
# torsion-free rank at the homology threshold


def uncovered_rank_trial(
    n: int, p_scale: float, seed: int, force_full: bool = False
) -> dict:
    """Compare H_1(Y;Z) of one binomial sample against its uncovered edges.

    The Betti number can never undercut the uncovered-edge count (each
    uncovered edge carries an independent nonbounding cycle); that bound is
    asserted, while torsion-freeness and exact rank equality are recorded.
    """
    p = p_scale * math.log(n) / n
    Y = Complex.full(n) if force_full else sample_binomial(n, p, seed)
    unc = len(uncovered_edges(Y))
    summary = homology_Z(Y)
    if summary.betti < unc:
        raise AssertionError(
            f"betti {summary.betti} below uncovered-edge count {unc} (n={n}, seed={seed})"
        )
    return {
        "n": n,
        "p": p,
        "seed": seed,
        "uncovered": unc,
        "betti": summary.betti,
        "torsion_free": int(not summary.torsion),
        "rank_equals_uncovered": int(summary.betti == unc),
    }


def uncovered_rank_check(
    n: int, p_scale: float, seeds, force_full: bool = False
) -> list[dict]:
    return [uncovered_rank_trial(n, p_scale, s, force_full=force_full) for s in seeds]


# ---------------------------------------------------------------------------
# torsion scan in dimension d


@dataclass
class TorsionTrace:
    """Sampled homology of one d-dimensional process run.

    samples holds (step, betti of H_{d-1}, ln of the torsion order); exact
    invariant factors are kept only when requested.
    """

    n: int
    d: int
    seed: int
    samples: list[tuple[int, int, float]] = field(default_factory=list)
    factors_at: dict[int, tuple[int, ...]] | None = None

    @property
    def max_ln_torsion(self) -> float:
        return max((s[2] for s in self.samples), default=0.0)

    @property
    def peak_step(self) -> int | None:
        best = None
        for step, _, ln_t in self.samples:
            if ln_t > 0 and (best is None or ln_t > best[1]):
                best = (step, ln_t)
        return best[0] if best else None

    @property
    def torsion_vanish_step(self) -> int | None:
        """First sampled step after the last torsion sighting; None without torsion."""
        last_seen = None
        for step, _, ln_t in self.samples:
            if ln_t > 0:
                last_seen = step
        if last_seen is None:
            return None
        for step, _, _ in self.samples:
            if step > last_seen:
                return step
        return None

    @property
    def torsion_seen(self) -> bool:
        return any(s[2] > 0 for s in self.samples)


_SCAN_MAX_ROWS = 500
_SCAN_MAX_FACES = 4_000


def torsion_scan(
    n: int, d: int, stride: int, seed: int, keep_factors: bool = False
) -> TorsionTrace:
    """Run the d-dimensional process, sampling H_{d-1}(.; Z) every stride steps.

    Step 0 and the final (full) complex are always sampled. Torsion orders
    are recorded in log scale; full invariant factors only if keep_factors.
    """
    if d < 2:
        raise ValueError(f"need d >= 2, got {d}")
    if stride < 1:
        raise ValueError("stride must be positive")
    rows, total = math.comb(n, d), math.comb(n, d + 1)
    if rows > _SCAN_MAX_ROWS or total > _SCAN_MAX_FACES:
        raise ValueError(
            f"scan at n={n}, d={d} needs Smith forms on {rows}x{total} matrices; "
            f"reduce n (guideline: n <= 14 for d = 2)"
        )
    trace = TorsionTrace(n=n, d=d, seed=seed, factors_at={} if keep_factors else None)

    def record(step: int, summary: HomologySummary) -> None:
        trace.samples.append((step, summary.betti, summary.ln_torsion_order()))
        if trace.factors_at is not None:
            trace.factors_at[step] = summary.torsion

    Y = Complex(n, dim=d)
    record(0, homology_Z(Y))
    stream = ProcessStream(n, seed, dim=d)
    for step, f in enumerate(stream, start=1):
        Y.add_face(f)
        if step % stride == 0 or step == total:
            record(step, homology_Z(Y))
    return trace


# ---------------------------------------------------------------------------
# campaigns


@dataclass(frozen=True)
class CampaignConfig:
    kind: str  # hitting_time | shadow_growth | uncovered_rank | torsion_scan
    n: int
    trials: int
    seed_base: int
    primes: tuple[int, ...] = (2,)
    thresholds: Thresholds | None = None
    d: int = 2
    stride: int = 5
    p_scale: float = 2.0
    jobs: int = 1
    out: str | None = None
    verbose_factors: bool = False

    def validate(self) -> None:
        if self.kind not in _CAMPAIGN_KINDS:
            raise ValueError(f"unknown campaign kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        for p in self.primes:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")

    def to_json_dict(self) -> dict:
        doc = {
            "kind": self.kind,
            "n": self.n,
            "trials": self.trials,
            "seed_base": self.seed_base,
            "primes": list(self.primes),
            "d": self.d,
            "stride": self.stride,
            "p_scale": self.p_scale,
        }
        if self.thresholds is not None:
            doc["thresholds"] = self.thresholds.to_dict()
        return doc


@dataclass
class CampaignReport:
    config: CampaignConfig
    rows: list[dict]
    summary: dict
    trace_rows: list[dict] = field(default_factory=list)

    def csv_text(self) -> str:
        return _rows_to_csv(self.rows)

    def trace_csv_text(self) -> str:
        return _rows_to_csv(self.trace_rows)

    def json_text(self) -> str:
        doc = {"config": self.config.to_json_dict(), "summary": self.summary}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def binomial_ci95(successes: int, trials: int) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion at 95% confidence."""
    if trials == 0:
        return (0.0, 1.0)
    z = 1.959963984540054
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials**2)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values) if values else 0.0


def _run_one(cfg: CampaignConfig, seed: int):
    if cfg.kind == "hitting_time":
        t = hitting_time_trial(cfg.n, seed)
        return {
            "n": t.n,
            "seed": t.seed,
            "h_delta": t.h_delta,
            "h_f2": t.h_f2,
            "h_z": t.h_z,
            "equal_flag": int(t.equal_flag),
            "torsion_at_h_delta": ";".join(map(str, t.torsion_at_h_delta)),
        }
    if cfg.kind == "shadow_growth":
        return shadow_growth_trial(cfg.n, cfg.primes[0], seed)
    if cfg.kind == "uncovered_rank":
        return uncovered_rank_trial(cfg.n, cfg.p_scale, seed)
    if cfg.kind == "torsion_scan":
        return torsion_scan(
            cfg.n, cfg.d, cfg.stride, seed, keep_factors=cfg.verbose_factors
        )
    raise ValueError(f"unknown campaign kind {cfg.kind!r}")


_CAMPAIGN_KINDS = ("hitting_time", "shadow_growth", "uncovered_rank", "torsion_scan")


def run_campaign(cfg: CampaignConfig) -> CampaignReport:
    """Execute trials with seeds seed_base + i, aggregate, and write artifacts.

    With cfg.out set, writes <out>.csv (one row per trial), <out>.json
    (config + aggregates) and, for torsion scans, <out>_trace.csv in long
    (seed, step, metric, value) format. CSV rows are flushed as trials
    finish so partial results survive interruption.
    """
    cfg.validate()
    seeds = [cfg.seed_base + i for i in range(cfg.trials)]
    rows: list[dict] = []
    trace_rows: list[dict] = []
    writer = _StreamingCsv(f"{cfg.out}.csv") if cfg.out else None
    trace_writer = (
        _StreamingCsv(f"{cfg.out}_trace.csv")
        if cfg.out and cfg.kind == "torsion_scan"
        else None
    )
    pool = ProcessPoolExecutor(max_workers=cfg.jobs) if cfg.jobs > 1 else None
    try:
        if pool is not None:
            result_iter = pool.map(_run_one, [cfg] * len(seeds), seeds)
        else:
            result_iter = (_run_one(cfg, s) for s in seeds)
        for res in result_iter:
            if cfg.kind == "torsion_scan":
                row, extra = _torsion_rows(res)
            else:
                row, extra = res, []
            rows.append(row)
            trace_rows.extend(extra)
            if writer:
                writer.write_row(row)
            if trace_writer:
                for tr in extra:
                    trace_writer.write_row(tr)
    finally:
        if pool is not None:
            pool.shutdown()
        if writer:
            writer.close()
        if trace_writer:
            trace_writer.close()

    summary = _summarize(cfg, rows)
    report = CampaignReport(cfg, rows, summary, trace_rows)
    if cfg.out:
        with open(f"{cfg.out}.json", "w", newline="\n") as fh:
            fh.write(report.json_text())
    return report


class _StreamingCsv:
    """Per-row flushed CSV so interrupted campaigns keep finished trials."""

    def __init__(self, path: str):
        self._fh = open(path, "w", newline="\n")
        self._writer: csv.DictWriter | None = None

    def write_row(self, row: dict) -> None:
        if self._writer is None:
            self._writer = csv.DictWriter(
                self._fh, fieldnames=list(row.keys()), lineterminator="\n"
            )
            self._writer.writeheader()
        self._writer.writerow(row)
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()


def _torsion_rows(t: TorsionTrace) -> tuple[dict, list[dict]]:
    row = {
        "n": t.n,
        "d": t.d,
        "seed": t.seed,
        "samples": len(t.samples),
        "max_ln_torsion": t.max_ln_torsion,
        "peak_step": t.peak_step if t.peak_step is not None else "",
        "vanish_step": (
            t.torsion_vanish_step if t.torsion_vanish_step is not None else ""
        ),
        "torsion_seen": int(t.torsion_seen),
    }
    trace_rows = []
    for step, betti, ln_t in t.samples:
        trace_rows.append(
            {"seed": t.seed, "step": step, "metric": "betti", "value": betti}
        )
        trace_rows.append(
            {"seed": t.seed, "step": step, "metric": "ln_torsion", "value": ln_t}
        )
        if t.factors_at is not None:
            factors = ";".join(map(str, t.factors_at.get(step, ())))
            trace_rows.append(
                {
                    "seed": t.seed,
                    "step": step,
                    "metric": "torsion_factors",
                    "value": factors,
                }
            )
    return row, trace_rows


def _summarize(cfg: CampaignConfig, rows: list[dict]) -> dict:
    t = len(rows)
    if cfg.kind == "hitting_time":
        eq = sum(r["equal_flag"] for r in rows)
        lo, hi = binomial_ci95(eq, t)
        return {
            "trials": t,
            "equal_fraction": eq / t,
            "equal_ci95": [lo, hi],
            "mean_h_delta": _mean(r["h_delta"] for r in rows),
            "mean_h_f2": _mean(r["h_f2"] for r in rows),
            "mean_h_z": _mean(r["h_z"] for r in rows),
            "torsion_at_h_delta_fraction": _mean(
                1.0 if r["torsion_at_h_delta"] else 0.0 for r in rows
            ),
        }
    if cfg.kind == "shadow_growth":
        return {
            "trials": t,
            "M": rows[0]["M"] if rows else 0,
            "mean_deficit": _mean(r["deficit"] for r in rows),
            "max_deficit": max((r["deficit"] for r in rows), default=0),
            "fraction_exceeding": _mean(r["exceeds_budget"] for r in rows),
        }
    if cfg.kind == "uncovered_rank":
        both = sum(r["torsion_free"] and r["rank_equals_uncovered"] for r in rows)
        lo, hi = binomial_ci95(both, t)
        return {
            "trials": t,
            "fraction_ok": both / t,
            "fraction_ok_ci95": [lo, hi],
            "fraction_torsion_free": _mean(r["torsion_free"] for r in rows),
            "fraction_rank_equals_uncovered": _mean(
                r["rank_equals_uncovered"] for r in rows
            ),
            "mean_uncovered": _mean(r["uncovered"] for r in rows),
        }
    if cfg.kind == "torsion_scan":
        return {
            "trials": t,
            "fraction_with_torsion": _mean(r["torsion_seen"] for r in rows),
            "max_ln_torsion": max((r["max_ln_torsion"] for r in rows), default=0.0),
            "max_ln_torsion_per_seed": {
                str(r["seed"]): r["max_ln_torsion"] for r in rows
            },
        }
    raise ValueError(f"unknown campaign kind {cfg.kind!r}")


