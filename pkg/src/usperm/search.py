"""Exhaustive scans over (modulus, perturbation) pairs and the statistics built on them."""

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from usperm.anf import component_stats, strong_threshold
from usperm.field import FieldCtx, neg_pow2k_tables
from usperm.permeng import composition_tables, zero_orbit_lengths
from usperm.poly2 import enumerate_irreducibles
from usperm.spectra import Histogram, ddt, lat

LOG_HEADER = "q_hex,b_hex,unicyclic,strong,min_degree,min_terms"
_BATCH_CELLS = 1 << 22


class ScanBudgetExceeded(RuntimeError):
    """Raised when a scan hits its pair budget; ``partial`` holds the finished work."""

    def __init__(self, partial, budget):
        super().__init__(f"pair budget {budget} exhausted after {partial.total_pairs} pairs")
        self.partial = partial
        self.budget = budget


def fixed_perturbation(n):
    """The fixed perturbation 1 + X^(n-1)."""
    return 1 | 1 << (n - 1)


@dataclass
class ScanRecord:
    q: int
    b: int
    unicyclic: bool
    strong: bool
    degrees: tuple
    term_counts: tuple

    def csv_line(self):
        return (f"{self.q:#x},{self.b:#x},{int(self.unicyclic)},{int(self.strong)},"
                f"{min(self.degrees)},{min(self.term_counts)}")

    @classmethod
    def from_csv_line(cls, line):
        q, b, uni, strong, min_deg, min_terms = line.strip().split(",")
        # the log keeps only the minima; they stand in for the per-component lists
        return cls(int(q, 16), int(b, 16), uni == "1", strong == "1",
                   (int(min_deg),), (int(min_terms),))


@dataclass
class ScanAggregate:
    n: int
    irreducible_count: int = 0
    total_pairs: int = 0
    unicyclic_count: int = 0
    strong_count: int = 0
    per_perturbation_counts: dict = field(default_factory=dict)
    fixed_b_count: int = 0
    strong_pairs: list = field(default_factory=list)
    ddt_hist: Histogram = field(default_factory=Histogram)
    lat_hist: Histogram = field(default_factory=Histogram)

    def add_record(self, rec):
        self.total_pairs += 1
        if rec.unicyclic:
            self.unicyclic_count += 1
            self.per_perturbation_counts[rec.b] = self.per_perturbation_counts.get(rec.b, 0) + 1
            if rec.b == fixed_perturbation(self.n):
                self.fixed_b_count += 1
        else:
            self.per_perturbation_counts.setdefault(rec.b, 0)
        if rec.strong:
            self.strong_count += 1
            self.strong_pairs.append((rec.q, rec.b))

    def merge(self, other):
        if other.n != self.n:
            raise ValueError("cannot merge scans of different degrees")
        out = ScanAggregate(self.n, max(self.irreducible_count, other.irreducible_count))
        out.total_pairs = self.total_pairs + other.total_pairs
        out.unicyclic_count = self.unicyclic_count + other.unicyclic_count
        out.strong_count = self.strong_count + other.strong_count
        out.fixed_b_count = self.fixed_b_count + other.fixed_b_count
        counts = dict(self.per_perturbation_counts)
        for b, c in other.per_perturbation_counts.items():
            counts[b] = counts.get(b, 0) + c
        out.per_perturbation_counts = counts
        out.strong_pairs = sorted(self.strong_pairs + other.strong_pairs)
        out.ddt_hist = self.ddt_hist.merge(other.ddt_hist)
        out.lat_hist = self.lat_hist.merge(other.lat_hist)
        return out

    def min_max(self):
        """(min over perturbations with at least one unicyclic sigma, max, min over all).

        Perturbations that never give a unicyclic composition (b = 0 among
        them) would pin the first entry at zero, so it skips them.
        """
        counts = list(self.per_perturbation_counts.values())
        if not counts:
            return None, None, None
        positive = [c for c in counts if c > 0]
        return (min(positive) if positive else None), max(counts), min(counts)

    def as_dict(self):
        lo, hi, lo_all = self.min_max()
        return {
            "n": self.n,
            "irreducible_count": self.irreducible_count,
            "total_pairs": self.total_pairs,
            "unicyclic_count": self.unicyclic_count,
            "strong_count": self.strong_count,
            "fixed_b": hex(fixed_perturbation(self.n)),
            "fixed_b_count": self.fixed_b_count,
            "per_perturbation_min": lo,
            "per_perturbation_max": hi,
            "per_perturbation_min_all": lo_all,
            "per_perturbation_counts": {hex(b): c for b, c in sorted(self.per_perturbation_counts.items())},
            "strong_pairs": [[hex(q), hex(b)] for q, b in self.strong_pairs],
            "ddt_hist": {str(v): c for v, c in self.ddt_hist.items()},
            "lat_hist": {str(v): c for v, c in self.lat_hist.items()},
        }

    def to_json(self, **kw):
        return json.dumps(self.as_dict(), **kw)


def _select(candidates, chosen):
    if chosen is None:
        return list(candidates)
    if callable(chosen):
        return [c for c in candidates if chosen(c)]
    wanted = set(chosen)
    return [c for c in candidates if c in wanted]


def _perturbations(n, b_filter):
    if isinstance(b_filter, str):
        if b_filter != "table2":
            raise ValueError(f"unknown perturbation filter {b_filter!r}")
        return [fixed_perturbation(n)]
    if isinstance(b_filter, int):
        return [b_filter]
    return _select(range(1 << n), b_filter)


def classify_batch(ctx, bs, strict=True, spectra=False):
    """Classify sigma for every perturbation in ``bs`` under one modulus.

    Returns (records, ddt_histogram, lat_histogram); the histograms cover
    the unicyclic members only and stay empty unless ``spectra`` is set.
    """
    n, size = ctx.n, ctx.order
    bs = np.asarray(bs, dtype=np.int64)
    threshold = strong_threshold(n, strict)
    records = []
    ddt_hist, lat_hist = Histogram(), Histogram()
    step = max(1, _BATCH_CELLS // size)
    for start in range(0, bs.size, step):
        part = bs[start:start + step]
        tables = composition_tables(ctx, part)
        uni = zero_orbit_lengths(tables) == size
        degrees, terms = component_stats(tables, n)
        strong = uni & (degrees == n - 1).all(axis=1) & (terms >= threshold).all(axis=1)
        for i, b in enumerate(part.tolist()):
            records.append(ScanRecord(ctx.modulus, b, bool(uni[i]), bool(strong[i]),
                                      tuple(degrees[i].tolist()), tuple(terms[i].tolist())))
            if spectra and uni[i]:
                ddt_hist = ddt_hist.merge(ddt(tables[i]).histogram)
                lat_hist = lat_hist.merge(lat(tables[i]).histogram)
    return records, ddt_hist, lat_hist


def _run_item(item):
    n, q, bs, strict, spectra = item
    records, dh, lh = classify_batch(FieldCtx(n, q), bs, strict, spectra)
    agg = ScanAggregate(n)
    for rec in records:
        agg.add_record(rec)
    agg.ddt_hist, agg.lat_hist = dh, lh
    return records, agg


def _read_log(path):
    done = {}
    if path and os.path.exists(path):
        with open(path) as fh:
            for line in fh:
                if line.startswith("q_hex") or not line.strip():
                    continue
                rec = ScanRecord.from_csv_line(line)
                done[(rec.q, rec.b)] = rec
    return done


def scan(n, b_filter=None, q_filter=None, collect_spectra=False, workers=1,
         partitions=None, max_pairs=None, record_log=None, strict=True):
    """Classify sigma for every irreducible modulus and perturbation of degree n.

    ``partitions`` splits each modulus' perturbations into that many work
    items; ``workers`` > 1 runs items in a process pool. Results do not
    depend on either. With ``record_log`` every pair is appended to a CSV as
    it finishes, and pairs already in the log are not recomputed.
    """
    irreducibles = enumerate_irreducibles(n)
    qs = _select(irreducibles, q_filter)
    bs = _perturbations(n, b_filter)
    done = _read_log(record_log)

    aggregate = ScanAggregate(n, len(irreducibles))
    items = []
    budget_left = max_pairs
    exhausted = False
    for q in qs:
        for rec_key in [(q, b) for b in bs if (q, b) in done]:
            aggregate.add_record(done[rec_key])
        todo = [b for b in bs if (q, b) not in done]
        if collect_spectra:
            # spectra are not logged; recompute them for logged unicyclic pairs
            redo = [b for b in bs if (q, b) in done and done[(q, b)].unicyclic]
            if redo:
                _, dh, lh = classify_batch(FieldCtx(n, q), redo, strict, True)
                aggregate.ddt_hist = aggregate.ddt_hist.merge(dh)
                aggregate.lat_hist = aggregate.lat_hist.merge(lh)
        if budget_left is not None:
            if len(todo) > budget_left:
                todo, exhausted = todo[:budget_left], True
            budget_left -= len(todo)
        if todo:
            parts = max(1, min(partitions or 1, len(todo)))
            for chunk in np.array_split(np.array(todo, dtype=np.int64), parts):
                items.append((n, q, chunk.tolist(), strict, collect_spectra))
        if exhausted:
            break

    log = None
    if record_log:
        fresh = not os.path.exists(record_log) or os.path.getsize(record_log) == 0
        log = open(record_log, "a")
        if fresh:
            log.write(LOG_HEADER + "\n")
    try:
        if workers and workers > 1 and len(items) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = pool.map(_run_item, items)
                aggregate = _absorb(aggregate, results, log)
        else:
            aggregate = _absorb(aggregate, map(_run_item, items), log)
    finally:
        if log:
            log.close()
    if exhausted:
        raise ScanBudgetExceeded(aggregate, max_pairs)
    return aggregate


def _absorb(aggregate, results, log):
    for records, part in results:
        if log:
            log.writelines(rec.csv_line() + "\n" for rec in records)
            log.flush()
        aggregate = aggregate.merge(part)
    return aggregate


def coefficient_ratios(d, long_run=False):
    """For each 1 <= i <= d-1, the fraction of degree-d irreducibles with an X^i term."""
    if d < 2:
        raise ValueError("degree must be at least 2")
    if d > 16 and not long_run:
        raise ValueError(f"degree {d} needs long_run=True")
    irreducibles = enumerate_irreducibles(d)
    total = len(irreducibles)
    return [(i, Fraction(sum(q >> i & 1 for q in irreducibles), total)) for i in range(1, d)]


def format_ratio(r):
    return f"{float(r):.6f}"


def conjecture_check_even(n):
    """Exhaustively look for a unicyclic composition at even n.

    Returns (True, None) when there is none, else (False, (q, b)).
    """
    if n % 2:
        raise ValueError("the even-degree check needs even n")
    for q in enumerate_irreducibles(n):
        ctx = FieldCtx(n, q)
        bs = np.arange(ctx.order, dtype=np.int64)
        step = max(1, _BATCH_CELLS // ctx.order)
        for start in range(0, bs.size, step):
            part = bs[start:start + step]
            uni = np.nonzero(zero_orbit_lengths(composition_tables(ctx, part)) == ctx.order)[0]
            if uni.size:
                return False, (q, int(part[uni[0]]))
    return True, None


def average_term_count(n, k):
    """Mean ANF term count of the components of x -> x^(2^n - 2^k - 1), over all moduli."""
    if not 0 <= k < n:
        raise ValueError(f"round index {k} outside [0, {n})")
    total = count = 0
    for q in enumerate_irreducibles(n):
        _, terms = component_stats(neg_pow2k_tables(FieldCtx(n, q))[k], n)
        total += int(terms.sum())
        count += terms.size
    return Fraction(total, count)


def term_count_report(ns, k=0):
    """Rows (n, mean term count, 2^(n-1), relative deviation) for the power map."""
    rows = []
    for n in ns:
        mean = average_term_count(n, k)
        half = 1 << (n - 1)
        rows.append((n, mean, half, float(abs(mean - half) / half)))
    return rows


def last_round_disagreements(n, strict=True):
    """Pairs whose degree/term verdicts differ between sigma and its last round alone."""
    out = []
    threshold = strong_threshold(n, strict)
    for q in enumerate_irreducibles(n):
        ctx = FieldCtx(n, q)
        bs = np.arange(ctx.order, dtype=np.int64)
        full = composition_tables(ctx, bs)
        idx = np.arange(ctx.order, dtype=np.int64)
        last = neg_pow2k_tables(ctx)[n - 1][idx[None, :] ^ bs[:, None]]
        verdicts = []
        for tables in (full, last):
            deg, terms = component_stats(tables, n)
            verdicts.append(((deg == n - 1).all(axis=1), (terms >= threshold).all(axis=1)))
        (p1f, p3f), (p1l, p3l) = verdicts
        for b in np.nonzero((p1f != p1l) | (p3f != p3l))[0].tolist():
            out.append((q, b, (bool(p1f[b]), bool(p3f[b])), (bool(p1l[b]), bool(p3l[b]))))
    return out
