"""Truth tables, algebraic normal forms and the unicyclic-strong classifier.

An ANF vector has one entry per monomial mask I (bit i of I selects a_i).
Because the binary Moebius transform is linear over XOR, transforming the
output words of a vectorial function handles all n components at once: bit j
of ``anf_words(tt)[I]`` is the coefficient of a_I in component j.
"""

from dataclasses import dataclass

import numpy as np

from usperm.permeng import composition_table, round_table, zero_orbit_lengths


@dataclass(frozen=True)
class TruthTable:
    n: int
    outputs: np.ndarray

    def __post_init__(self):
        if self.outputs.shape != (1 << self.n,):
            raise ValueError(f"truth table of length {self.outputs.shape} for n={self.n}")

    def component(self, j):
        return ((self.outputs >> j) & 1).astype(np.uint8)

    def is_permutation(self):
        return np.unique(self.outputs).size == self.outputs.size


def truth_table(evaluator, n):
    """Materialise a function on range(2^n), given as a callable or a sequence."""
    if callable(evaluator):
        out = np.fromiter((evaluator(a) for a in range(1 << n)), dtype=np.int64, count=1 << n)
    else:
        out = np.array(evaluator, dtype=np.int64)
    return TruthTable(n, out)


def moebius(values):
    """Binary Moebius transform along the last axis (an involution).

    Works on 0/1 arrays and on packed words alike since only XOR is used.
    """
    a = np.array(values, copy=True)
    size = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < size:
        v = a.reshape(*lead, size // (2 * h), 2, h)
        v[..., 1, :] ^= v[..., 0, :]
        h *= 2
    return a


def anf_words(tt):
    return moebius(tt.outputs)


def anf_transform(tt, j):
    """ANF coefficient vector of component j."""
    if not 0 <= j < tt.n:
        raise ValueError(f"component {j} outside [0, {tt.n})")
    return moebius(tt.component(j))


def _popcounts(size):
    return np.bitwise_count(np.arange(size, dtype=np.int64)).astype(np.int64)


def algebraic_degree(anf):
    """Largest monomial size with a nonzero coefficient; None for the zero function."""
    anf = np.asarray(anf)
    support = np.nonzero(anf)[0]
    if support.size == 0:
        return None
    return int(_popcounts(anf.size)[support].max())


def min_term_degree(anf):
    """Smallest monomial size with a nonzero coefficient; None for the zero function."""
    anf = np.asarray(anf)
    support = np.nonzero(anf)[0]
    if support.size == 0:
        return None
    return int(_popcounts(anf.size)[support].min())


def term_count(anf):
    return int(np.count_nonzero(anf))


def component_stats(tables, n):
    """Per-component degrees and term counts for a (rows, 2^n) stack of truth tables.

    Returns two int arrays of shape (rows, n); a degree of -1 marks a zero
    component.
    """
    words = moebius(np.atleast_2d(np.asarray(tables, dtype=np.int64)))
    pc = _popcounts(1 << n)
    degrees = np.empty((words.shape[0], n), dtype=np.int64)
    terms = np.empty((words.shape[0], n), dtype=np.int64)
    for j in range(n):
        bits = (words >> j) & 1
        terms[:, j] = bits.sum(axis=1)
        degrees[:, j] = np.where(terms[:, j] > 0, (bits * pc).max(axis=1), -1)
    return degrees, terms


def strong_threshold(n, strict=True):
    """Minimum term count accepted by the many-terms property.

    By default a component needs more than 2^(n-1) terms; ``strict=False``
    accepts exactly 2^(n-1) too.
    """
    half = 1 << (n - 1)
    return half + 1 if strict else half


@dataclass(frozen=True)
class Classification:
    unicyclic: bool
    p1: bool
    p3: bool
    strong: bool
    degrees: tuple
    terms: tuple
    min_degrees: tuple

    def as_dict(self):
        return {
            "unicyclic": self.unicyclic,
            "p1": self.p1,
            "p3": self.p3,
            "strong": self.strong,
            "degrees": list(self.degrees),
            "terms": list(self.terms),
            "min_degrees": list(self.min_degrees),
        }


def classify_table(table, n, strict=True):
    """Classify a permutation given by its lookup table."""
    tt = truth_table(table, n)
    words = anf_words(tt)
    degrees, terms, mins = [], [], []
    for j in range(n):
        coeffs = (words >> j) & 1
        degrees.append(algebraic_degree(coeffs))
        mins.append(min_term_degree(coeffs))
        terms.append(term_count(coeffs))
    unicyclic = bool(zero_orbit_lengths(tt.outputs)[0] == 1 << n) and tt.is_permutation()
    p1 = all(d == n - 1 for d in degrees)
    p3 = all(t >= strong_threshold(n, strict) for t in terms)
    return Classification(unicyclic, p1, p3, unicyclic and p1 and p3,
                          tuple(degrees), tuple(terms), tuple(mins))


def classify(spec, strict=True):
    """Unicyclic / degree / term-count verdict for the full composition of ``spec``."""
    return classify_table(composition_table(spec), spec.n, strict)


def classify_last_round(spec, strict=True):
    """Degree and term-count verdict using only the final round's truth table."""
    last = classify_table(round_table(spec, spec.rounds - 1), spec.n, strict)
    full = classify(spec, strict)
    return full, last


def format_anf(tt):
    """One line per component listing its monomial masks in ascending hex."""
    words = anf_words(tt)
    lines = []
    for j in range(tt.n):
        masks = np.nonzero((words >> j) & 1)[0]
        lines.append(" ".join(f"{int(m):x}" for m in masks))
    return "\n".join(lines) + "\n"
