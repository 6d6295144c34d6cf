"""2-adic valuations and parities of binomial and multinomial coefficients."""

from dataclasses import dataclass


def nu2(t):
    """Exponent of the largest power of 2 dividing t."""
    if t <= 0:
        raise ValueError("nu2 is defined for positive integers")
    return (t & -t).bit_length() - 1


def nu2_factorial(t):
    """nu2(t!) by Legendre's formula: t minus the binary digit sum of t."""
    if t < 0:
        raise ValueError("factorial of a negative integer")
    return t - bin(t).count("1")


def binom_odd(m, j):
    """True iff C(m, j) is odd (Lucas: the bits of j are a subset of those of m)."""
    if not 0 <= j <= m:
        raise ValueError(f"binomial index {j} outside [0, {m}]")
    return j & (m - j) == 0


def multinomial_odd(parts):
    """Parity of (sum parts)! / prod(parts!): odd iff the parts add without carries."""
    parts = list(parts)
    if not parts:
        raise ValueError("empty multinomial")
    acc = 0
    for p in parts:
        if p < 0:
            raise ValueError("negative multinomial part")
        if acc & p:
            return False
        acc |= p
    return True


@dataclass(frozen=True)
class ParitySet:
    """Exponents j <= 2^n - 2^k - 1 whose binomial coefficient is odd."""

    n: int
    k: int
    members: tuple

    def cells(self):
        """Split members into the runs of 2^k consecutive integers starting at multiples of 2^(k+1)."""
        width = 1 << self.k
        return [self.members[i:i + width] for i in range(0, len(self.members), width)]


def r_k_set(n, k):
    """Surviving exponents in the binomial expansion of (x + y)^(2^n - 2^k - 1).

    Built twice, once from binomial parity and once from the residue
    description (j mod 2^(k+1) < 2^k); the two must agree.
    """
    if not 0 <= k < n:
        raise ValueError(f"round index {k} outside [0, {n})")
    m = (1 << n) - (1 << k) - 1
    by_parity = tuple(j for j in range(m + 1) if binom_odd(m, j))
    period = 1 << (k + 1)
    by_residue = tuple(j for j in range(m + 1) if j % period < (1 << k))
    if by_parity != by_residue:
        raise AssertionError(f"parity and residue constructions disagree for n={n}, k={k}")
    return ParitySet(n, k, by_parity)
