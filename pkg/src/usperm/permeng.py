"""Round maps, their composition, and cycle-structure analysis.

Round k sends a to (a + b)^(t_k) in GF(2^n); by default t_k = 2^n - 2^k - 1,
which acts as x -> x^(-2^k) on nonzero elements and fixes 0. The full
permutation applies rounds 0, 1, ..., n-1 in that order.
"""

import struct
from collections import Counter
from dataclasses import dataclass, field
from math import gcd, lcm

import numpy as np

from usperm.field import (
    FieldCtx,
    fe_pow,
    frobenius,
    log_tables,
    neg_pow2k,
    neg_pow2k_exponent,
    neg_pow2k_tables,
    power_table,
)

TABLE_MAGIC = b"USP1"


@dataclass(frozen=True)
class PermSpec:
    """Recipe for sigma = sigma_{n-1} ... sigma_1 sigma_0 over ``ctx`` with perturbation ``b``.

    ``exponents`` lists the round exponents t_0, ..., t_{r-1}. Left unset it
    becomes the standard schedule t_k = 2^n - 2^k - 1 for k < n.
    """

    ctx: FieldCtx
    b: int
    exponents: tuple = field(default=None)

    def __post_init__(self):
        self.ctx.check(self.b)
        if self.exponents is None:
            n = self.ctx.n
            object.__setattr__(self, "exponents", tuple(neg_pow2k_exponent(n, k) for k in range(n)))
        else:
            object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        group = self.ctx.order - 1
        for e in self.exponents:
            if e < 1 or gcd(e % group, group) != 1:
                raise ValueError(f"round exponent {e} is not coprime to {group}")

    @classmethod
    def make(cls, modulus, b, exponents=None):
        return cls(FieldCtx.from_modulus(modulus), b, exponents)

    @property
    def n(self):
        return self.ctx.n

    @property
    def rounds(self):
        return len(self.exponents)

    @property
    def standard(self):
        n = self.ctx.n
        return self.exponents == tuple(neg_pow2k_exponent(n, k) for k in range(n))


def _check_round(spec, k):
    if not 0 <= k < spec.rounds:
        raise ValueError(f"round index {k} outside [0, {spec.rounds})")


def sigma_k(spec, k, a):
    """Round k applied to a single element."""
    _check_round(spec, k)
    a = spec.ctx.check(a)
    if spec.standard:
        return neg_pow2k(spec.ctx, a ^ spec.b, k)
    return fe_pow(spec.ctx, a ^ spec.b, spec.exponents[k])


def sigma_k_inv(spec, k, c):
    """The unique a with sigma_k(spec, k, a) == c."""
    _check_round(spec, k)
    c = spec.ctx.check(c)
    if spec.standard:
        return neg_pow2k(spec.ctx, c, (spec.n - k) % spec.n) ^ spec.b
    inverse = pow(spec.exponents[k], -1, spec.ctx.order - 1)
    return fe_pow(spec.ctx, c, inverse) ^ spec.b


def trace_rounds(spec, a):
    """[a, sigma_0(a), sigma_1 sigma_0(a), ..., sigma(a)]."""
    out = [spec.ctx.check(a)]
    for k in range(spec.rounds):
        out.append(sigma_k(spec, k, out[-1]))
    return out


def apply_composition(spec, a):
    return trace_rounds(spec, a)[-1]


def _round_lookup(spec, k):
    if spec.standard:
        return neg_pow2k_tables(spec.ctx)[k]
    return power_table(spec.ctx, spec.exponents[k])


def round_table(spec, k):
    """Lookup table of round k over all 2^n inputs."""
    _check_round(spec, k)
    idx = np.arange(spec.ctx.order, dtype=np.int64)
    return _round_lookup(spec, k)[idx ^ spec.b]


def composition_table(spec, rounds=None):
    """Lookup table of sigma_{r-1} ... sigma_0 (all rounds unless ``rounds`` is given)."""
    rounds = spec.rounds if rounds is None else rounds
    v = np.arange(spec.ctx.order, dtype=np.int64)
    for k in range(rounds):
        v = _round_lookup(spec, k)[v ^ spec.b]
    return v


def composition_tables(ctx, bs):
    """Standard-schedule composition tables for many perturbations at once.

    Returns an array of shape (len(bs), 2^n); row i is sigma for bs[i].
    """
    negs = neg_pow2k_tables(ctx)
    bs = np.asarray(bs, dtype=np.int64).reshape(-1, 1)
    v = np.broadcast_to(np.arange(ctx.order, dtype=np.int64), (bs.shape[0], ctx.order))
    for k in range(ctx.n):
        v = negs[k][v ^ bs]
    return v


def projective_round_table(spec, k):
    """Round k extended to the projective line, with index 2^n standing for infinity.

    The extension sends b to infinity and infinity to 0, i.e. it is the
    fractional linear map that the field convention 0 -> 0 short-circuits.
    """
    _check_round(spec, k)
    if not spec.standard:
        raise ValueError("projective extension is defined for the standard schedule only")
    inf = spec.ctx.order
    tab = np.append(round_table(spec, k), 0)
    tab[spec.b] = inf
    return tab


# -- cycle structure ---------------------------------------------------------


class NotAPermutation(ValueError):
    pass


@dataclass(frozen=True)
class CycleReport:
    cycle_lengths: tuple  # descending
    period: int
    unicyclic: bool

    @property
    def size(self):
        return sum(self.cycle_lengths)

    @property
    def uniform(self):
        return len(set(self.cycle_lengths)) <= 1

    def counts(self):
        return Counter(self.cycle_lengths)


def cycle_structure(perm, n=None):
    """Cycle lengths of a permutation given as a lookup table or a callable on range(2^n).

    Raises NotAPermutation if a walk re-enters a point already assigned to
    another cycle, or leaves the domain.
    """
    if callable(perm):
        if n is None:
            raise ValueError("a callable permutation needs its degree n")
        table = [perm(a) for a in range(1 << n)]
    else:
        table = perm.tolist() if isinstance(perm, np.ndarray) else list(perm)
    size = len(table)
    if n is not None and size != 1 << n:
        raise ValueError(f"table has {size} entries, expected {1 << n}")
    seen = bytearray(size)
    lengths = []
    for start in range(size):
        if seen[start]:
            continue
        x, length = start, 0
        while True:
            seen[x] = 1
            length += 1
            y = table[x]
            if not 0 <= y < size:
                raise NotAPermutation(f"image {y} of {x} lies outside the domain")
            if y == start:
                break
            if seen[y]:
                raise NotAPermutation(f"point {y} is the image of {x} and of another point")
            x = y
        lengths.append(length)
    lengths.sort(reverse=True)
    return CycleReport(tuple(lengths), lcm(*lengths) if lengths else 1, lengths == [size])


def zero_orbit_lengths(tables):
    """Length of the cycle through 0 for each row of a (rows, 2^n) stack of permutations.

    A row is unicyclic iff its entry equals 2^n.
    """
    tables = np.atleast_2d(np.asarray(tables, dtype=np.int64))
    rows, size = tables.shape
    if rows <= 4:
        out = []
        for row in tables.tolist():
            x, steps = row[0], 1
            while x != 0 and steps <= size:
                x = row[x]
                steps += 1
            out.append(steps)
        return np.array(out, dtype=np.int64)
    flat = tables.ravel()
    base = np.arange(rows, dtype=np.int64) * size
    x = np.zeros(rows, dtype=np.int64)
    length = np.zeros(rows, dtype=np.int64)
    live = np.arange(rows)
    for step in range(1, size + 1):
        x = flat[base[live] + x]
        hit = x == 0
        if hit.any():
            length[live[hit]] = step
            live = live[~hit]
            x = x[~hit]
            if live.size == 0:
                break
    return length


# -- period prediction from 2x2 matrix products ------------------------------


@dataclass(frozen=True)
class PeriodPrediction:
    valid_lengths: tuple
    bound_L: int
    block: int = 1
    matrix_order: int = None


def predict_period(spec, k, L=None):
    """Lengths l <= L where M_1 M_2 ... M_l is the identity and k*l = 0 (mod n).

    M_j = [[0, 1], [1, b^(2^(jk mod n))]] over GF(2^n). M_j only depends on
    j modulo n / gcd(n, k), and that block length is also the step of the
    congruence condition, so the running product is checked at block
    boundaries; the set of hits is then the multiples of the first one.
    """
    if not spec.standard:
        raise ValueError("period prediction needs the standard -2^k schedule")
    _check_round(spec, k)
    if spec.b == 0:
        raise ValueError("period prediction needs a nonzero perturbation")
    ctx, n = spec.ctx, spec.n
    L = ctx.order if L is None else L
    if L < 1:
        raise ValueError("bound L must be positive")
    log, exp = log_tables(ctx)

    def mul(x, y):
        return exp[log[x] + log[y]] if x and y else 0

    def matmul(p, q):
        return (
            mul(p[0], q[0]) ^ mul(p[1], q[2]),
            mul(p[0], q[1]) ^ mul(p[1], q[3]),
            mul(p[2], q[0]) ^ mul(p[3], q[2]),
            mul(p[2], q[1]) ^ mul(p[3], q[3]),
        )

    identity = (1, 0, 0, 1)
    block = n // gcd(n, k)
    B = identity
    for j in range(1, block + 1):
        B = matmul(B, (0, 1, 1, frobenius(ctx, spec.b, (j * k) % n)))
    P, first, m = identity, None, 0
    while (m + 1) * block <= L:
        m += 1
        P = matmul(P, B)
        if P == identity:
            first = m * block
            break
    valid = tuple(range(first, L + 1, first)) if first else ()
    return PeriodPrediction(valid, L, block, m if first else None)


# -- composition words --------------------------------------------------------


def reduce_composition_word(word, n):
    """Collapse sigma_{k_m} sigma_{k_{m-1}}^{-1} ... sigma_{k_1}^{-1} sigma_{k_0} to one round index.

    ``word`` lists k_0, k_1, ..., k_m; odd positions are the inverted rounds.
    """
    word = list(word)
    if len(word) % 2 == 0:
        raise ValueError("word must alternate forward/inverse and end on a forward round")
    for kk in word:
        if not 0 <= kk < n:
            raise ValueError(f"round index {kk} outside [0, {n})")
    return sum(kk if i % 2 == 0 else -kk for i, kk in enumerate(word)) % n


def apply_word(spec, word, a):
    """Evaluate the alternating word of rounds on a, starting with k_0."""
    for i, kk in enumerate(word):
        a = sigma_k(spec, kk, a) if i % 2 == 0 else sigma_k_inv(spec, kk, a)
    return a


# -- binary table export --------------------------------------------------------


def write_perm_table(path, table, n):
    """Write a permutation table: magic ``USP1``, one byte n, then 2^n little-endian u32 words."""
    table = np.asarray(table)
    if n > 32:
        raise ValueError("tables for n > 32 are not supported")
    if table.shape != (1 << n,):
        raise ValueError(f"table shape {table.shape} does not match n={n}")
    with open(path, "wb") as fh:
        fh.write(TABLE_MAGIC + struct.pack("<B", n))
        fh.write(table.astype("<u4").tobytes())


def read_perm_table(path):
    with open(path, "rb") as fh:
        header = fh.read(5)
        if len(header) != 5 or header[:4] != TABLE_MAGIC:
            raise ValueError(f"{path}: not a permutation table")
        n = header[4]
        data = np.frombuffer(fh.read(), dtype="<u4")
    if data.size != 1 << n:
        raise ValueError(f"{path}: expected {1 << n} words, found {data.size}")
    return n, data.astype(np.int64)
