"""Equal-weight quadratures of prescribed polynomial degree for Jacobi weights.

A rule here is a multiset T = {t_1, ..., t_K} in [-1, 1] such that the plain
average (1/K) sum p(t_k) reproduces the normalized integral of every
polynomial p up to some degree t.  No closed-form construction is known, so
`solve_equal_weight` searches numerically:

  1. pick a trial K (starting at the Gaussian count ceil((t+1)/2), the
     smallest K any degree-t rule can have);
  2. initialize nodes from the Gaussian rule, replicating each Gaussian node
     with multiplicity proportional to its weight (largest-remainder
     rounding), plus fallback initializations (weight-quantile spacing,
     wider spreads, seeded jitter);
  3. run Levenberg-Marquardt on the residuals of the orthonormal-polynomial
     averages, parameterizing t_k = cos(theta_k) so nodes can never leave
     [-1, 1];
  4. on failure, grow K geometrically (x1.5, rounded up) and retry, up to
     max_K.

Residuals use the orthonormal basis rather than raw powers: the exact target
is then 0 for every degree >= 1, and the system stays well-conditioned.
Certification re-evaluates the residuals in extended precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jacobi import gauss_rule, orthonormal_values
from .moments import JacobiWeight


@dataclass
class SolverOptions:
    tolerance: float = 1e-12
    max_iterations: int = 300
    max_K: int = 512
    seed: int = 0

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_K < 1:
            raise ValueError("max_K must be >= 1")


@dataclass
class Quadrature:
    """Equal-weight node multiset for a Jacobi weight, claimed degree t.

    Nodes are kept sorted ascending (repetitions allowed); `certified` is set
    by `certify` and means the extended-precision residuals stayed within
    `tolerance` for all degrees 1..t.
    """

    weight: JacobiWeight
    degree: int
    nodes: np.ndarray
    certified: bool = False
    tolerance: float = math.nan
    max_abs_residual: float = math.nan

    def __post_init__(self):
        nodes = np.sort(np.asarray(self.nodes, dtype=np.float64))
        if nodes.size < 1:
            raise ValueError("a quadrature needs at least one node")
        if self.degree < 0:
            raise ValueError("degree must be >= 0")
        if nodes[0] < -1.0 or nodes[-1] > 1.0:
            raise ValueError("nodes must lie in [-1, 1]")
        self.nodes = nodes

    @property
    def K(self) -> int:
        return int(self.nodes.size)

    def to_json_dict(self) -> dict:
        return {
            "m": self.weight.m,
            "n": self.weight.n,
            "degree": self.degree,
            "K": self.K,
            "nodes": [format(float(x), ".17g") for x in self.nodes],
            "nodes_hex": [float(x).hex() for x in self.nodes],
            "max_abs_residual": float(self.max_abs_residual),
            "certified": bool(self.certified),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Quadrature":
        if "nodes_hex" in data:
            nodes = [float.fromhex(s) for s in data["nodes_hex"]]
        else:
            nodes = [float(s) for s in data["nodes"]]
        q = cls(
            weight=JacobiWeight(int(data["m"]), int(data["n"])),
            degree=int(data["degree"]),
            nodes=np.array(nodes),
        )
        q.certified = bool(data.get("certified", False))
        q.max_abs_residual = float(data.get("max_abs_residual", math.nan))
        if q.K != int(data["K"]):
            raise ValueError(f"node count {q.K} does not match recorded K={data['K']}")
        return q


@dataclass
class QuadratureReport:
    residuals: np.ndarray
    max_abs_residual: float
    K: int
    iterations: int

    def to_json_dict(self) -> dict:
        return {
            "K": self.K,
            "iterations": self.iterations,
            "max_abs_residual": float(self.max_abs_residual),
            "residuals": [format(float(r), ".17g") for r in self.residuals],
        }


class NoConvergenceError(RuntimeError):
    """Raised when no K <= max_K produced residuals within tolerance.

    Carries the best quadrature and report found so the caller can inspect
    the residual level or retry with a relaxed tolerance.
    """

    def __init__(self, message: str, best: Quadrature, report: QuadratureReport):
        super().__init__(message)
        self.best = best
        self.report = report


def gauss_jacobi_init(w: JacobiWeight, num_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian nodes and (positive) weights for w; see jacobi.gauss_rule."""
    return gauss_rule(w, num_nodes)


def _raw_residuals(nodes: np.ndarray, w: JacobiWeight, degree: int, dtype=np.float64) -> np.ndarray:
    """Averages of the orthonormal polynomials P_0..P_degree over the nodes.

    Entry 0 is forced to exactly 0: equal weights always reproduce constants.
    """
    p = orthonormal_values(w, degree, np.asarray(nodes, dtype=dtype), dtype=dtype)
    r = p.mean(axis=1)
    r[0] = 0
    return r


def residual_vector(q: Quadrature) -> np.ndarray:
    """Residuals r_0..r_t of the quadrature against its weight's orthonormal basis.

    All entries are exactly 0 for a rule of degree t; r_0 is 0 by construction.
    """
    return _raw_residuals(q.nodes, q.weight, q.degree).astype(np.float64)


def certify(q: Quadrature, tol: float) -> QuadratureReport:
    """Re-evaluate residuals in extended precision and set the certified flag.

    The exact targets are rational (zero for every orthonormal degree >= 1),
    and the recurrence coefficients are exact rationals converted straight to
    extended precision, so the only noise left is the extended-precision
    arithmetic itself.
    """
    residuals = _raw_residuals(q.nodes, q.weight, q.degree, dtype=np.longdouble)
    max_abs = float(np.max(np.abs(residuals[1:]))) if q.degree >= 1 else 0.0
    q.certified = max_abs <= tol
    q.tolerance = tol
    q.max_abs_residual = max_abs
    return QuadratureReport(
        residuals=residuals.astype(np.float64),
        max_abs_residual=max_abs,
        K=q.K,
        iterations=0,
    )


def _largest_remainder_multiplicities(weights: np.ndarray, K: int) -> np.ndarray:
    """Integer multiplicities summing to K, proportional to the weights."""
    quota = K * weights / weights.sum()
    mult = np.floor(quota).astype(int)
    short = K - mult.sum()
    if short > 0:
        remainders = quota - mult
        order = np.argsort(-remainders, kind="stable")
        mult[order[:short]] += 1
    return mult


def _init_gauss_multiplicity(w: JacobiWeight, degree: int, K: int, spread: float) -> np.ndarray:
    """Initial angles: Gaussian nodes replicated by weight, copies fanned out.

    Duplicated copies are offset symmetrically in theta so the Jacobian
    columns start distinct; a zero spread would leave duplicates moving in
    lockstep and waste the extra degrees of freedom.
    """
    num_gauss = max(1, math.ceil((degree + 1) / 2))
    nodes, weights = gauss_rule(w, num_gauss)
    mult = _largest_remainder_multiplicities(weights, K)
    theta0 = np.arccos(np.clip(nodes, -1.0, 1.0))
    delta = spread * math.pi / max(K, 2)
    thetas = []
    for th, q in zip(theta0, mult):
        for j in range(q):
            thetas.append(th + delta * (j - (q - 1) / 2))
    return np.clip(np.array(thetas), 1e-6, math.pi - 1e-6)


def _init_quantile(w: JacobiWeight, K: int) -> np.ndarray:
    """Initial angles at the (k - 1/2)/K quantiles of the normalized weight.

    In u = (1+t)/2 the weight is the Beta(n/2, m/2) density, so quantiles
    come from the inverse regularized incomplete Beta function.
    """
    from scipy.special import betaincinv

    probs = (np.arange(K) + 0.5) / K
    u = betaincinv(w.n / 2, w.m / 2, probs)
    t = np.clip(2.0 * u - 1.0, -1.0, 1.0)
    return np.arccos(t)[::-1].copy()


def _levenberg_marquardt(
    theta: np.ndarray,
    w: JacobiWeight,
    degree: int,
    tol: float,
    max_iterations: int,
) -> tuple[np.ndarray, float, int]:
    """Minimize the residual vector over node angles; returns (theta, max|r|, iters).

    Marquardt-scaled damping; the target is pushed below tol so the
    extended-precision re-certification has headroom.
    """
    target = 0.05 * tol
    K = theta.size

    def evaluate(th):
        x = np.cos(th)
        p, dp = orthonormal_values(w, degree, x, with_derivative=True)
        r = p[1:].mean(axis=1)
        jac = dp[1:] * (-np.sin(th)) / K
        return r, jac

    r, jac = evaluate(theta)
    lam = 1e-3
    iterations = 0
    best_theta, best_max = theta.copy(), float(np.max(np.abs(r)))
    for _ in range(max_iterations):
        max_r = float(np.max(np.abs(r)))
        if max_r < best_max:
            best_max, best_theta = max_r, theta.copy()
        if max_r <= target:
            break
        iterations += 1
        jtj = jac.T @ jac
        diag = np.diag(jtj).copy()
        floor = 1e-12 * max(diag.max(), 1e-30)
        diag[diag < floor] = floor
        rhs = jac.T @ r
        try:
            step = np.linalg.solve(jtj + lam * np.diag(diag), rhs)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        trial = theta - step
        r_trial, jac_trial = evaluate(trial)
        if np.linalg.norm(r_trial) < np.linalg.norm(r):
            theta, r, jac = trial, r_trial, jac_trial
            lam = max(lam / 3.0, 1e-14)
            if np.linalg.norm(step) < 1e-15:
                break
        else:
            lam *= 4.0
            if lam > 1e13:
                break
    max_r = float(np.max(np.abs(r)))
    if max_r < best_max:
        best_max, best_theta = max_r, theta.copy()
    return best_theta, best_max, iterations


def solve_equal_weight(
    w: JacobiWeight, t: int, opts: SolverOptions | None = None
) -> tuple[Quadrature, QuadratureReport]:
    """Find a certified equal-weight quadrature of degree t for the weight w.

    Raises NoConvergenceError (carrying the best attempt) if no K up to
    opts.max_K reaches opts.tolerance.
    """
    if t < 0:
        raise ValueError(f"degree must be >= 0, got {t}")
    opts = opts or SolverOptions()

    if t == 0:
        nodes, _ = gauss_rule(w, 1)
        q = Quadrature(weight=w, degree=0, nodes=nodes)
        report = certify(q, opts.tolerance)
        return q, report

    rng = np.random.default_rng(opts.seed)
    K = min(max(1, math.ceil((t + 1) / 2)), opts.max_K)
    total_iterations = 0
    best: tuple[float, Quadrature] | None = None
    while True:
        inits = [
            _init_gauss_multiplicity(w, t, K, spread=0.05),
            _init_quantile(w, K),
            _init_gauss_multiplicity(w, t, K, spread=0.4),
            _init_quantile(w, K) + rng.normal(scale=0.1 / K, size=K),
        ]
        for theta0 in inits:
            theta, max_r, iters = _levenberg_marquardt(
                theta0, w, t, opts.tolerance, opts.max_iterations
            )
            total_iterations += iters
            q = Quadrature(weight=w, degree=t, nodes=np.cos(theta))
            report = certify(q, opts.tolerance)
            report.iterations = total_iterations
            if best is None or report.max_abs_residual < best[0]:
                best = (report.max_abs_residual, q)
            if q.certified:
                return q, report
        if K >= opts.max_K:
            break
        K = min(max(K + 1, math.ceil(K * 1.5)), opts.max_K)

    assert best is not None
    best_q = best[1]
    best_report = certify(best_q, opts.tolerance)
    best_report.iterations = total_iterations
    raise NoConvergenceError(
        f"no equal-weight rule of degree {t} for weight (m={w.m}, n={w.n}) "
        f"within tolerance {opts.tolerance:g} up to K={opts.max_K}; "
        f"best residual {best[0]:.3e} at K={best_q.K}",
        best=best_q,
        report=best_report,
    )
