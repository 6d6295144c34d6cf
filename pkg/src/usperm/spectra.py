"""Difference distribution tables and Walsh spectra, reported as value histograms.

Neither table is stored whole: rows are produced in chunks and only the
histogram of entries, plus the extremal statistic, is kept.
"""

import csv
from collections import Counter
from dataclasses import dataclass

import numpy as np

from usperm.anf import TruthTable

U64_MAX = (1 << 64) - 1
_CHUNK_CELLS = 1 << 22


class Histogram:
    """Sparse value -> count map; merging adds counts bin-wise."""

    def __init__(self, bins=None):
        self.bins = Counter()
        if bins:
            for value, count in dict(bins).items():
                self.add(value, count)

    def add(self, value, count=1):
        if count < 0:
            raise ValueError("negative count")
        if count:
            total = self.bins[int(value)] + int(count)
            if total > U64_MAX:
                raise OverflowError(f"count for bin {value} exceeds 64 bits")
            self.bins[int(value)] = total

    def add_array(self, values):
        values = np.asarray(values, dtype=np.int64).ravel()
        if values.size == 0:
            return
        lo = int(values.min())
        counts = np.bincount(values - lo)
        for offset in np.nonzero(counts)[0].tolist():
            self.add(lo + offset, int(counts[offset]))

    def merge(self, other):
        out = Histogram(self.bins)
        for value, count in other.bins.items():
            out.add(value, count)
        return out

    __add__ = merge

    def total(self):
        return sum(self.bins.values())

    def items(self):
        return sorted(self.bins.items())

    def as_dict(self):
        return dict(self.items())

    def __eq__(self, other):
        if isinstance(other, Histogram):
            return self.bins == other.bins
        if isinstance(other, dict):
            return self.bins == Counter({k: v for k, v in other.items() if v})
        return NotImplemented

    def __repr__(self):
        return f"Histogram({self.as_dict()})"

    def write_csv(self, path, n, q="all", b="all", kind="ddt"):
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text(n, q, b, kind))

    def csv_text(self, n, q="all", b="all", kind="ddt"):
        fmt = lambda v: v if isinstance(v, str) else f"{v:#x}"
        lines = [f"# n={n} q={fmt(q)} b={fmt(b)} kind={kind}", "value,count"]
        lines += [f"{v},{c}" for v, c in self.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def read_csv(cls, path):
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
        if rows and rows[0] == ["value", "count"]:
            rows = rows[1:]
        return cls({int(v): int(c) for v, c in rows})


@dataclass
class SpectrumSummary:
    histogram: Histogram
    extremal: int  # differential uniformity (DDT) or linearity (LAT)
    trivial: Histogram  # entries of the excluded row (c = 0 for DDT, d = 0 for LAT)
    kind: str

    @property
    def differential_uniformity(self):
        if self.kind != "ddt":
            raise AttributeError("differential uniformity belongs to a DDT")
        return self.extremal

    @property
    def linearity(self):
        if self.kind != "lat":
            raise AttributeError("linearity belongs to a LAT")
        return self.extremal


def _outputs(tt):
    return tt.outputs if isinstance(tt, TruthTable) else np.asarray(tt, dtype=np.int64)


def ddt(tt):
    """Histogram of D(c, d) = #{a : f(a ^ c) ^ f(a) = d} over all 2^(2n) cells.

    Differential uniformity is the maximum over c != 0; the c = 0 row (one
    cell equal to 2^n, the rest 0) stays in the histogram and is also
    reported separately as ``trivial``.
    """
    f = _outputs(tt)
    size = f.size
    idx = np.arange(size, dtype=np.int64)
    hist, trivial = Histogram(), Histogram()
    uniformity = 0
    chunk = max(1, _CHUNK_CELLS // size)
    for start in range(0, size, chunk):
        cs = idx[start:start + chunk]
        diffs = f[cs[:, None] ^ idx[None, :]] ^ f[None, :]
        keys = (np.arange(cs.size, dtype=np.int64)[:, None] * size + diffs).ravel()
        rows = np.bincount(keys, minlength=cs.size * size).reshape(cs.size, size)
        if not (rows.sum(axis=1) == size).all():
            raise AssertionError("DDT row does not sum to 2^n")
        if start == 0:
            trivial.add_array(rows[0])
            nontrivial = rows[1:]
        else:
            nontrivial = rows
        if nontrivial.size:
            if (nontrivial & 1).any():
                raise AssertionError("odd DDT entry in a row with c != 0")
            uniformity = max(uniformity, int(nontrivial.max()))
        hist.add_array(rows)
    return SpectrumSummary(hist, uniformity, trivial, "ddt")


def fwht(values):
    """Unnormalised Walsh-Hadamard transform along the last axis."""
    a = np.array(values, dtype=np.int64, copy=True)
    size = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < size:
        v = a.reshape(*lead, size // (2 * h), 2, h)
        x = v[..., 0, :].copy()
        y = v[..., 1, :]
        v[..., 0, :] += y
        v[..., 1, :] = x - y
        h *= 2
    return a


def lat(tt):
    """Histogram of W(c, d) = sum_a (-1)^(a.c + d.f(a)) over all 2^(2n) cells.

    Row d is the Walsh-Hadamard transform of the sign vector of the
    component d.f. Linearity is the largest |W| over d != 0; the d = 0 row
    is kept in the histogram and reported separately as ``trivial``.
    """
    f = _outputs(tt)
    size = f.size
    idx = np.arange(size, dtype=np.int64)
    hist, trivial = Histogram(), Histogram()
    linearity = 0
    chunk = max(1, _CHUNK_CELLS // size)
    for start in range(0, size, chunk):
        ds = idx[start:start + chunk]
        signs = 1 - 2 * (np.bitwise_count(ds[:, None] & f[None, :]) & 1).astype(np.int64)
        rows = fwht(signs)
        if not ((rows * rows).sum(axis=1) == size * size).all():
            raise AssertionError("Walsh row violates Parseval")
        if start == 0:
            trivial.add_array(rows[0])
            nontrivial = rows[1:]
        else:
            nontrivial = rows
        if nontrivial.size:
            linearity = max(linearity, int(np.abs(nontrivial).max()))
        hist.add_array(rows)
    return SpectrumSummary(hist, linearity, trivial, "lat")


def merge(h1, h2):
    return h1.merge(h2)
