"""Arithmetic on polynomials over GF(2).

A polynomial is a nonnegative integer whose bit i is the coefficient of X^i,
so ``0b1011`` is X^3 + X + 1. The zero polynomial has degree ``-inf``.
"""

import math
from functools import lru_cache

NEG_INF = -math.inf


def degree(p):
    """Degree of p, or ``-inf`` for the zero polynomial."""
    if p < 0:
        raise ValueError("polynomials are encoded as nonnegative integers")
    return p.bit_length() - 1 if p else NEG_INF


def poly_mul(p, q):
    """Carry-less product of p and q."""
    if p < q:
        p, q = q, p
    r = 0
    while q:
        if q & 1:
            r ^= p
        p <<= 1
        q >>= 1
    return r


def poly_divmod(p, q):
    """Return (quotient, remainder) of p divided by q."""
    if q == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    dq = q.bit_length() - 1
    quot = 0
    while p and p.bit_length() - 1 >= dq:
        shift = p.bit_length() - 1 - dq
        quot |= 1 << shift
        p ^= q << shift
    return quot, p


def poly_mod(p, q):
    return poly_divmod(p, q)[1]


def poly_gcd(p, q):
    """Monic gcd of p and q (every nonzero polynomial over GF(2) is monic)."""
    if p == 0 and q == 0:
        raise ValueError("gcd(0, 0) is undefined")
    while q:
        p, q = q, poly_mod(p, q)
    return p


def poly_mulmod(p, q, m):
    return poly_mod(poly_mul(p, q), m)


def poly_powmod(p, e, m):
    """p^e mod m by square-and-multiply."""
    if e < 0:
        raise ValueError("negative exponent")
    r = poly_mod(1, m)
    p = poly_mod(p, m)
    while e:
        if e & 1:
            r = poly_mulmod(r, p, m)
        p = poly_mulmod(p, p, m)
        e >>= 1
    return r


def _frobenius_power_of_x(j, m):
    # X^(2^j) mod m via j squarings
    r = poly_mod(2, m)
    for _ in range(j):
        r = poly_mulmod(r, r, m)
    return r


def prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(q):
    """Rabin's irreducibility test over GF(2).

    q of degree n is irreducible iff X^(2^n) = X (mod q) and
    gcd(X^(2^(n/r)) - X, q) = 1 for every prime r dividing n.
    """
    n = degree(q)
    if n < 1:
        raise ValueError("irreducibility is defined for degree >= 1")
    if n == 1:
        return True
    if not q & 1:
        return False
    if _frobenius_power_of_x(n, q) != poly_mod(2, q):
        return False
    for r in prime_factors(n):
        h = _frobenius_power_of_x(n // r, q) ^ poly_mod(2, q)
        if h == 0 or poly_gcd(q, h) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def _irreducibles(n):
    top = 1 << n
    return tuple(q for q in range(top | 1, top << 1, 2) if is_irreducible(q))


def enumerate_irreducibles(n):
    """All irreducible polynomials of degree n, ascending by integer encoding."""
    if not 2 <= n <= 24:
        raise ValueError(f"degree {n} outside the supported range [2, 24]")
    return list(_irreducibles(n))


def from_exponents(exponents):
    """Build a polynomial from the exponents of its nonzero terms."""
    p = 0
    for e in exponents:
        p ^= 1 << e
    return p


def exponents(p):
    return [i for i in range(p.bit_length()) if p >> i & 1]


def poly_str(p, var="X"):
    """Human-readable form, lowest degree first: ``1 + X + X^4``."""
    if p == 0:
        return "0"
    terms = []
    for i in exponents(p):
        terms.append("1" if i == 0 else var if i == 1 else f"{var}^{i}")
    return " + ".join(terms)
