"""Orthonormal polynomials for Jacobi weights via the three-term recurrence.

The recurrence coefficients for the weight (1-x)^alpha (1+x)^beta are the
classical ones (Gautschi, "Orthogonal Polynomials: Computation and
Approximation").  Since alpha and beta are half-integers here, every
coefficient is an exact rational; we keep them as Fractions and convert to
the requested float dtype only at evaluation time.  Polynomials are
orthonormal with respect to the weight normalized to unit mass, so P_0 = 1
and the exact average of P_d (d >= 1) is 0.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .moments import JacobiWeight


def recurrence_coefficients(w: JacobiWeight, count: int) -> tuple[list[Fraction], list[Fraction]]:
    """First `count` monic recurrence coefficients (a_k, b_k) for the weight w.

    p_{k+1}(x) = (x - a_k) p_k(x) - b_k p_{k-1}(x).  b_0 is reported as 1
    (the measure is treated as normalized; the true mass is w.mass).
    """
    alpha, beta = w.alpha, w.beta
    a: list[Fraction] = []
    b: list[Fraction] = []
    s = alpha + beta
    for k in range(count):
        if k == 0:
            a.append((beta - alpha) / (s + 2))
            b.append(Fraction(1))
        else:
            two_k = 2 * k
            a.append((beta * beta - alpha * alpha) / ((two_k + s) * (two_k + s + 2)))
            if k == 1:
                b.append(4 * (alpha + 1) * (beta + 1) / ((s + 2) ** 2 * (s + 3)))
            else:
                b.append(
                    4 * k * (k + alpha) * (k + beta) * (k + s)
                    / ((two_k + s) ** 2 * (two_k + s + 1) * (two_k + s - 1))
                )
    return a, b


def _to_dtype(values: list[Fraction], dtype) -> np.ndarray:
    return np.array([dtype(v.numerator) / dtype(v.denominator) for v in values], dtype=dtype)


def orthonormal_values(
    w: JacobiWeight,
    max_degree: int,
    x: np.ndarray,
    dtype=np.float64,
    with_derivative: bool = False,
):
    """Evaluate orthonormal polynomials P_0..P_max_degree at the points x.

    Returns an array of shape (max_degree + 1, len(x)); with_derivative=True
    returns a (values, derivatives) pair.  Evaluation runs entirely in
    `dtype`, so passing np.longdouble gives extended-precision residuals.
    """
    x = np.asarray(x, dtype=dtype)
    a_frac, b_frac = recurrence_coefficients(w, max_degree + 1)
    a = _to_dtype(a_frac, dtype)
    sqrt_b = np.sqrt(_to_dtype(b_frac, dtype))

    p = np.zeros((max_degree + 1, x.size), dtype=dtype)
    p[0] = 1
    dp = np.zeros_like(p) if with_derivative else None
    prev = np.zeros_like(x)
    prev_d = np.zeros_like(x)
    for k in range(max_degree):
        nxt = ((x - a[k]) * p[k] - (sqrt_b[k] * prev if k > 0 else 0)) / sqrt_b[k + 1]
        if with_derivative:
            nxt_d = (p[k] + (x - a[k]) * dp[k] - (sqrt_b[k] * prev_d if k > 0 else 0)) / sqrt_b[k + 1]
            prev_d = dp[k]
            dp[k + 1] = nxt_d
        prev = p[k]
        p[k + 1] = nxt
    if with_derivative:
        return p, dp
    return p


def gauss_rule(w: JacobiWeight, num_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian nodes and weights for the weight w (Golub-Welsch).

    The nodes are the eigenvalues of the symmetric tridiagonal matrix built
    from the recurrence coefficients; the weights are the squared first
    eigenvector components scaled by the total mass.  The rule integrates
    polynomials up to degree 2*num_nodes - 1 exactly against w.
    """
    if num_nodes < 1:
        raise ValueError(f"num_nodes must be >= 1, got {num_nodes}")
    a_frac, b_frac = recurrence_coefficients(w, num_nodes)
    diag = _to_dtype(a_frac, np.float64)
    if num_nodes == 1:
        return diag.copy(), np.array([w.mass])
    off = np.sqrt(_to_dtype(b_frac[1:], np.float64))
    try:
        from scipy.linalg import eigh_tridiagonal

        nodes, vectors = eigh_tridiagonal(diag, off)
    except Exception as exc:  # pragma: no cover - eigensolver failure is exotic
        raise RuntimeError(
            f"tridiagonal eigensolver failed for weight (m={w.m}, n={w.n}) "
            f"with {num_nodes} nodes"
        ) from exc
    weights = w.mass * vectors[0, :] ** 2
    return nodes, weights
