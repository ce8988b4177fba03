"""Exact rational moments of sphere monomials and Jacobi weights.

All values returned here are `fractions.Fraction` instances, so downstream
verifiers and solvers can compare against targets with no tolerance at all.
The two families of integrals are

    sphere moment   (1/|S^{d-1}|) * integral over S^{d-1} of x^alpha
    weight ratio    integral of ((1-t)/2)^a ((1+t)/2)^b w(t) dt / integral of w(t) dt

with w(t) = (1-t)^((m-2)/2) (1+t)^((n-2)/2) on [-1, 1].  Both reduce to
ratios of Gamma functions whose pi factors cancel, which is why exact
rational arithmetic is possible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator


@dataclass(frozen=True)
class MultiIndex:
    """Exponent vector of a multivariate monomial x_1^a_1 ... x_d^a_d."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps):
            raise ValueError(f"exponents must be non-negative, got {exps}")
        object.__setattr__(self, "exponents", exps)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def all_even(self) -> bool:
        return all(e % 2 == 0 for e in self.exponents)

    def half(self) -> "MultiIndex":
        """Halve every exponent; defined only when all exponents are even."""
        if not self.all_even:
            raise ValueError(f"half() requires all-even exponents, got {self.exponents}")
        return MultiIndex(tuple(e // 2 for e in self.exponents))

    def __len__(self) -> int:
        return len(self.exponents)

    def __iter__(self):
        return iter(self.exponents)

    def __getitem__(self, i):
        return self.exponents[i]


@dataclass(frozen=True)
class JacobiWeight:
    """The weight (1-x)^((m-2)/2) (1+x)^((n-2)/2) on [-1, 1].

    m and n are the dimensions of the two sphere factors whose join produces
    this weight; both must be >= 1, which keeps the exponents > -1 and the
    weight integrable.
    """

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError(f"sphere factor dimensions must be >= 1, got m={self.m}, n={self.n}")

    @property
    def alpha(self) -> Fraction:
        """Exponent of (1-x)."""
        return Fraction(self.m - 2, 2)

    @property
    def beta(self) -> Fraction:
        """Exponent of (1+x)."""
        return Fraction(self.n - 2, 2)

    @property
    def mass(self) -> float:
        """Total integral of the weight over [-1, 1].

        Equals 2^((m+n-2)/2) * B(m/2, n/2); not rational in general because
        of pi factors, so this one is a float.
        """
        log_beta = (
            math.lgamma(self.m / 2) + math.lgamma(self.n / 2) - math.lgamma((self.m + self.n) / 2)
        )
        return 2.0 ** ((self.m + self.n - 2) / 2) * math.exp(log_beta)

    def __call__(self, x: float) -> float:
        return (1.0 - x) ** float(self.alpha) * (1.0 + x) ** float(self.beta)


def _rising(x: Fraction, k: int) -> Fraction:
    """x (x+1) ... (x+k-1), exactly."""
    out = Fraction(1)
    for i in range(k):
        out *= x + i
    return out


def sphere_monomial_moment(dim: int, alpha: MultiIndex) -> Fraction:
    """Normalized moment of x^alpha over the unit sphere in R^dim.

    Returns (1/|S^{dim-1}|) * integral of x^alpha, which is 0 whenever any
    exponent is odd and otherwise the rational value

        prod_i (2b_i)! / (4^{b_i} b_i!)  /  [ (dim/2) (dim/2 + 1) ... (dim/2 + |b| - 1) ]

    with b_i = alpha_i / 2.  dim = 1 is the two-point sphere {-1, +1} with
    counting-average measure; the same formula covers it.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if len(alpha) != dim:
        raise ValueError(f"multi-index has {len(alpha)} entries, expected {dim}")
    if not alpha.all_even:
        return Fraction(0)
    beta = alpha.half()
    total = beta.degree
    out = Fraction(1) / _rising(Fraction(dim, 2), total)
    for b in beta:
        out *= Fraction(math.factorial(2 * b), 4**b * math.factorial(b))
    return out


def jacobi_moment_ratio(w: JacobiWeight, a: int, b: int) -> Fraction:
    """Normalized moment of ((1-t)/2)^a ((1+t)/2)^b against the weight w.

    Equals B(a + m/2, b + n/2) / B(m/2, n/2), a ratio of Beta functions whose
    arguments differ from the base case by the integers a and b, hence exact:

        rising(m/2, a) * rising(n/2, b) / rising((m+n)/2, a+b).
    """
    if a < 0 or b < 0:
        raise ValueError(f"powers must be non-negative, got a={a}, b={b}")
    num = _rising(Fraction(w.m, 2), a) * _rising(Fraction(w.n, 2), b)
    return num / _rising(Fraction(w.m + w.n, 2), a + b)


def power_moment(w: JacobiWeight, d: int) -> Fraction:
    """Normalized power moment mu_d = integral of t^d w(t) dt / integral of w(t) dt.

    Obtained from jacobi_moment_ratio via t = 2*(1+t)/2 - 1 and the binomial
    theorem; mu_0 = 1 always.
    """
    if d < 0:
        raise ValueError(f"power must be non-negative, got {d}")
    out = Fraction(0)
    for j in range(d + 1):
        sign = -1 if (d - j) % 2 else 1
        out += sign * math.comb(d, j) * Fraction(2) ** j * jacobi_moment_ratio(w, 0, j)
    return out


def iter_multi_indices(dim: int, max_degree: int) -> Iterator[MultiIndex]:
    """All multi-indices of length dim with total degree <= max_degree.

    Graded order: degree 0 first, then degree 1, ...; within a degree the
    first coordinate decreases.  The count is C(dim + max_degree, dim).
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")

    def compositions(total: int, parts: int):
        if parts == 1:
            yield (total,)
            return
        for head in range(total, -1, -1):
            for tail in compositions(total - head, parts - 1):
                yield (head,) + tail

    for degree in range(max_degree + 1):
        for exps in compositions(degree, dim):
            yield MultiIndex(exps)


def count_multi_indices(dim: int, max_degree: int) -> int:
    return math.comb(dim + max_degree, dim)
