"""GF(2^n) arithmetic under an arbitrary irreducible modulus.

Scalar operations work on Python ints; the ``*_table`` helpers materialise a
power map over the whole field as a numpy array for exhaustive work.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from usperm.poly2 import degree, is_irreducible, poly_str


@dataclass(frozen=True)
class FieldCtx:
    """The field F_2[X]/(modulus) of 2^n elements."""

    n: int
    modulus: int

    def __post_init__(self):
        if degree(self.modulus) != self.n:
            raise ValueError(
                f"modulus {self.modulus:#x} has degree {degree(self.modulus)}, expected {self.n}"
            )
        if not is_irreducible(self.modulus):
            raise ValueError(f"modulus {poly_str(self.modulus)} is reducible")

    @classmethod
    def from_modulus(cls, modulus):
        return cls(modulus.bit_length() - 1, modulus)

    @property
    def order(self):
        return 1 << self.n

    def check(self, x):
        if not 0 <= x < self.order:
            raise ValueError(f"{x} is not an element of GF(2^{self.n})")
        return x


def fe_mul(ctx, x, y):
    """Product of x and y, reduced modulo ctx.modulus."""
    n, m = ctx.n, ctx.modulus
    r = 0
    while y:
        if y & 1:
            r ^= x
        y >>= 1
        x <<= 1
        if x >> n & 1:
            x ^= m
    return r


def fe_pow(ctx, x, t):
    """x^t with 0^0 = 1 and 0^t = 0 for t >= 1."""
    if t < 0:
        raise ValueError("negative exponent")
    r = 1
    while t:
        if t & 1:
            r = fe_mul(ctx, r, x)
        x = fe_mul(ctx, x, x)
        t >>= 1
    return r


def frobenius(ctx, x, j):
    """x^(2^j); the Frobenius has order n so only j mod n squarings are done."""
    if j < 0:
        raise ValueError("negative Frobenius shift")
    for _ in range(j % ctx.n):
        x = fe_mul(ctx, x, x)
    return x


def fe_inv(ctx, x):
    """x^(2^n - 2): the field inverse for x != 0, and 0 for x = 0."""
    return fe_pow(ctx, x, ctx.order - 2)


def neg_pow2k(ctx, x, k):
    """x^(2^n - 2^k - 1), computed as the k-th Frobenius image of x^-1."""
    if not 0 <= k < ctx.n:
        raise ValueError(f"round index {k} outside [0, {ctx.n})")
    return frobenius(ctx, fe_inv(ctx, x), k)


def neg_pow2k_exponent(n, k):
    return (1 << n) - (1 << k) - 1


# -- vectorised forms -------------------------------------------------------


def mul_array(ctx, x, y):
    """Elementwise field product of two integer arrays."""
    n, m = ctx.n, ctx.modulus
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    r = np.zeros(np.broadcast(x, y).shape, dtype=np.int64)
    for i in range(n):
        r ^= np.where((y >> i) & 1, x << i, 0)
    for i in range(2 * n - 2, n - 1, -1):
        r ^= np.where((r >> i) & 1, m << (i - n), 0)
    return r


def pow_array(ctx, x, t):
    x = np.asarray(x, dtype=np.int64)
    r = np.ones_like(x)
    while t:
        if t & 1:
            r = mul_array(ctx, r, x)
        x = mul_array(ctx, x, x)
        t >>= 1
    return r


@lru_cache(maxsize=64)
def power_table(ctx, t):
    """Read-only lookup table of x -> x^t over the whole field."""
    tab = pow_array(ctx, np.arange(ctx.order, dtype=np.int64), t)
    tab.flags.writeable = False
    return tab


@lru_cache(maxsize=64)
def neg_pow2k_tables(ctx):
    """Array of shape (n, 2^n) whose row k tabulates x -> x^(2^n - 2^k - 1)."""
    inv = power_table(ctx, ctx.order - 2)
    sq = power_table(ctx, 2)
    rows = [np.array(inv)]
    for _ in range(1, ctx.n):
        rows.append(sq[rows[-1]])
    tabs = np.stack(rows)
    tabs.flags.writeable = False
    return tabs


@lru_cache(maxsize=64)
def log_tables(ctx):
    """(log, exp) lists for fast scalar products, built from a primitive element.

    ``exp`` has length 2*(2^n - 1) so that ``exp[log[x] + log[y]]`` needs no
    reduction.
    """
    size = ctx.order - 1
    for g in range(2, ctx.order):
        exp = [1] * (2 * size)
        x = 1
        for i in range(1, size):
            x = fe_mul(ctx, x, g)
            if x == 1:
                break
            exp[i] = x
        else:
            break
    else:
        raise ArithmeticError(f"no primitive element found modulo {ctx.modulus:#x}")
    for i in range(size, 2 * size):
        exp[i] = exp[i - size]
    log = [0] * ctx.order
    for i in range(size):
        log[exp[i]] = i
    return log, exp
