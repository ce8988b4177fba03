"""Spherical design construction by recursive products of lower spheres.

The engine is the product map: given point sets X on the unit sphere of R^m
and Y on the unit sphere of R^n, and an equal-weight quadrature T for the
weight (1-x)^((m-2)/2) (1+x)^((n-2)/2), the K*M*N vectors

    ( sqrt((1-t_k)/2) * x,  sqrt((1+t_k)/2) * y )

lie on the unit sphere of R^{m+n} and inherit the polynomial-averaging
degree of the inputs.  Iterating the map from the two trivial bases -- the
pair {-1, +1} in R^1 and regular polygons in R^2 -- reaches every dimension.

The split schedule halves the ambient dimension at each level: ambient 2q
splits into (q, q) and ambient 2q+1 into (q, q+1), except ambient 3 which
splits into (2, 1), i.e. a polygon times {-1, +1} (the quadrature there
needs O(t^2) nodes, so the three-dimensional sphere costs O(t^3) points).
`a_sequence` gives the resulting cardinality growth exponents.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cache

import numpy as np

from . import verify as _verify
from .moments import JacobiWeight
from .quadrature import Quadrature, SolverOptions, certify, solve_equal_weight

_PI = np.longdouble("3.14159265358979323846264338327950288")
_NORM_TOL = 1e-12


@dataclass
class Design:
    """Point multiset on the unit sphere of R^ambient_dim, claimed degree t.

    Points are stored in extended precision; every row must have unit norm
    within 1e-12.  Whether the multiset actually averages polynomials of
    degree <= t correctly is certified by the verify module, never assumed.
    """

    ambient_dim: int
    degree: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=np.longdouble))
        if self.ambient_dim < 1:
            raise ValueError(f"ambient_dim must be >= 1, got {self.ambient_dim}")
        if self.degree < 0:
            raise ValueError(f"degree must be >= 0, got {self.degree}")
        if pts.shape[0] < 1 or pts.shape[1] != self.ambient_dim:
            raise ValueError(
                f"points must be a non-empty (N, {self.ambient_dim}) array, got {pts.shape}"
            )
        norms = np.sqrt((pts.astype(np.float64) ** 2).sum(axis=1))
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > _NORM_TOL:
            raise ValueError(f"points must have unit norm within {_NORM_TOL:g}; worst |~1| = {worst:.3e}")
        self.points = pts

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    def to_json_dict(self) -> dict:
        rows = [[float(v) for v in row] for row in self.points]
        return {
            "ambient_dim": self.ambient_dim,
            "degree": self.degree,
            "count": self.count,
            "points": [[format(v, ".17g") for v in row] for row in rows],
            "points_hex": [[v.hex() for v in row] for row in rows],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Design":
        if "points_hex" in data:
            pts = [[float.fromhex(v) for v in row] for row in data["points_hex"]]
        else:
            pts = [[float(v) for v in row] for row in data["points"]]
        design = cls(
            ambient_dim=int(data["ambient_dim"]),
            degree=int(data["degree"]),
            points=np.array(pts, dtype=np.float64),
        )
        if design.count != int(data["count"]):
            raise ValueError(f"point count {design.count} does not match recorded count={data['count']}")
        return design


def base_s0(t: int) -> Design:
    """The two-point set {+1, -1} in R^1; averages every even power to 1 and
    every odd power to 0, hence a t-design for all t."""
    if t < 0:
        raise ValueError(f"degree must be >= 0, got {t}")
    return Design(ambient_dim=1, degree=t, points=np.array([[1.0], [-1.0]]))


def base_s1(t: int, phase: float = 0.0) -> Design:
    """The regular (t+1)-gon on the unit circle, rotated by `phase` radians.

    A (t+1)-gon kills every circular harmonic of order 1..t, so it is a
    t-design with the fewest possible points; the phase is free (rotations
    do not change the averaging property) but pinned for reproducibility.
    """
    if t < 0:
        raise ValueError(f"degree must be >= 0, got {t}")
    j = np.arange(t + 1, dtype=np.longdouble)
    theta = 2 * _PI * j / np.longdouble(t + 1) + np.longdouble(phase)
    return Design(ambient_dim=2, degree=t, points=np.column_stack([np.cos(theta), np.sin(theta)]))


def product(X: Design, Y: Design, T: Quadrature, allow_uncertified: bool = False) -> Design:
    """Combine designs on the spheres of R^m and R^n into one on R^{m+n}.

    Every (node, x, y) triple contributes one point, so the output has
    exactly K*M*N points; each has unit norm because the two scale factors
    are sqrt((1-t)/2) and sqrt((1+t)/2).  The output degree is the minimum
    of the three input degrees.  T must be certified unless
    allow_uncertified is set (useful for experiments only).
    """
    m, n = T.weight.m, T.weight.n
    if X.ambient_dim != m:
        raise ValueError(f"first factor lives in R^{X.ambient_dim}, quadrature expects R^{m}")
    if Y.ambient_dim != n:
        raise ValueError(f"second factor lives in R^{Y.ambient_dim}, quadrature expects R^{n}")
    if not T.certified and not allow_uncertified:
        raise ValueError("quadrature is not certified (pass allow_uncertified=True to override)")

    degree = min(X.degree, Y.degree, T.degree)
    xs = np.repeat(X.points, Y.count, axis=0)
    ys = np.tile(Y.points, (X.count, 1))
    blocks = []
    for tk in T.nodes:
        tk_l = np.longdouble(tk)
        scale_x = np.sqrt(np.maximum((1 - tk_l) / 2, np.longdouble(0)))
        scale_y = np.sqrt(np.maximum((1 + tk_l) / 2, np.longdouble(0)))
        blocks.append(np.hstack([scale_x * xs, scale_y * ys]))
    return Design(ambient_dim=m + n, degree=degree, points=np.vstack(blocks))


@cache
def a_sequence(n: int) -> int:
    """Cardinality growth exponent for designs on the n-sphere built here.

    a_1 = 1, a_2 = 3, a_{2q-1} = 2 a_{q-1} + q, a_{2q} = a_{q-1} + a_q + q + 1.
    Satisfies a_{2^k - 1} = k 2^{k-1} and a_n < (n/2) log2(2n) for n > 10.
    """
    if n < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {n}")
    if n == 1:
        return 1
    if n == 2:
        return 3
    if n % 2 == 1:
        q = (n + 1) // 2
        return 2 * a_sequence(q - 1) + q
    q = n // 2
    return a_sequence(q - 1) + a_sequence(q) + q + 1


def lower_bound(n: int, t: int) -> int:
    """Delsarte-Goethals-Seidel lower bound on the size of a t-design on S^n."""
    if n < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {n}")
    if t < 0:
        raise ValueError(f"degree must be >= 0, got {t}")
    k = t // 2
    if t % 2 == 0:
        return math.comb(n + k, n) + math.comb(n + k - 1, n)
    return 2 * math.comb(n + k, n)


@dataclass(frozen=True)
class PlanNode:
    """One node of a build plan: a base design or a binary product split."""

    ambient_dim: int
    kind: str  # "s0", "s1", or "product"
    left: "PlanNode | None" = None
    right: "PlanNode | None" = None

    @property
    def split(self) -> tuple[int, int]:
        if self.kind != "product":
            raise ValueError("leaf nodes have no split")
        return self.left.ambient_dim, self.right.ambient_dim


@dataclass(frozen=True)
class BuildPlan:
    """Recursion tree for building a t-design on S^sphere_dim."""

    sphere_dim: int
    degree: int
    root: PlanNode

    def describe(self) -> str:
        def walk(node: PlanNode) -> str:
            if node.kind == "s0":
                return "S0"
            if node.kind == "s1":
                return "S1"
            return f"(S{node.ambient_dim - 1} = {walk(node.left)} x {walk(node.right)})"

        return walk(self.root)


def plan(n: int, t: int, overrides: dict[int, tuple[int, int]] | None = None) -> BuildPlan:
    """Build plan for a t-design on S^n.

    The default split sends ambient dimension 2q to (q, q) and 2q+1 to
    (q, q+1), with ambient 3 handled as (2, 1).  `overrides` maps an ambient
    dimension to a custom (m, n) child pair with m + n = ambient, for
    experimenting with other trees.
    """
    if n < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {n}")
    if t < 0:
        raise ValueError(f"degree must be >= 0, got {t}")
    overrides = overrides or {}
    for dim, (dm, dn) in overrides.items():
        if dm < 1 or dn < 1 or dm + dn != dim:
            raise ValueError(f"override for ambient {dim} must split into positive dims summing to {dim}, got ({dm}, {dn})")

    def split_of(ambient: int) -> tuple[int, int]:
        if ambient in overrides:
            return overrides[ambient]
        if ambient == 3:
            return 2, 1
        if ambient % 2 == 0:
            return ambient // 2, ambient // 2
        return ambient // 2, ambient // 2 + 1

    def make(ambient: int) -> PlanNode:
        if ambient == 1:
            return PlanNode(ambient_dim=1, kind="s0")
        if ambient == 2:
            return PlanNode(ambient_dim=2, kind="s1")
        dm, dn = split_of(ambient)
        return PlanNode(ambient_dim=ambient, kind="product", left=make(dm), right=make(dn))

    return BuildPlan(sphere_dim=n, degree=t, root=make(n + 1))


class BuildError(RuntimeError):
    """A node of a build failed verification; `node_path` identifies it."""

    def __init__(self, message: str, node_path: str):
        super().__init__(message)
        self.node_path = node_path


@dataclass
class BuildNodeReport:
    path: str
    ambient_dim: int
    kind: str
    cardinality: int
    verify_method: str
    verify_residual: float
    m: int = 0
    n: int = 0
    K: int = 0
    M: int = 0
    N: int = 0
    quad_residual: float = 0.0
    children: list["BuildNodeReport"] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        out = {
            "path": self.path,
            "ambient_dim": self.ambient_dim,
            "kind": self.kind,
            "cardinality": self.cardinality,
            "verify_method": self.verify_method,
            "verify_residual": self.verify_residual,
        }
        if self.kind == "product":
            out.update(
                {
                    "m": self.m,
                    "n": self.n,
                    "K": self.K,
                    "M": self.M,
                    "N": self.N,
                    "quad_residual": self.quad_residual,
                }
            )
        out["children"] = [c.to_json_dict() for c in self.children]
        return out


@dataclass
class BuildReport:
    sphere_dim: int
    degree: int
    total_points: int
    exponent: int
    dgs_lower_bound: int
    max_residual: float
    passed: bool
    root: BuildNodeReport

    def to_json_dict(self) -> dict:
        return {
            "sphere_dim": self.sphere_dim,
            "degree": self.degree,
            "total_points": self.total_points,
            "exponent": self.exponent,
            "dgs_lower_bound": self.dgs_lower_bound,
            "max_residual": self.max_residual,
            "passed": self.passed,
            "tree": self.root.to_json_dict(),
        }


class InMemoryQuadratureCache:
    """Session-local quadrature store keyed by (m, n, degree, tol exponent)."""

    def __init__(self):
        self._store: dict[tuple, Quadrature] = {}

    @staticmethod
    def _key(m: int, n: int, t: int, tol: float) -> tuple:
        return m, n, t, round(math.log10(tol))

    def lookup(self, m: int, n: int, t: int, tol: float) -> Quadrature | None:
        return self._store.get(self._key(m, n, t, tol))

    def store(self, q: Quadrature) -> None:
        if q.certified:
            self._store[self._key(q.weight.m, q.weight.n, q.degree, q.tolerance)] = q


def solve_cached(
    m: int, n: int, t: int, opts: SolverOptions, cache_obj=None
) -> Quadrature:
    """Solve for an equal-weight rule, consulting a cache first."""
    if cache_obj is not None:
        hit = cache_obj.lookup(m, n, t, opts.tolerance)
        if hit is not None:
            return hit
    q, _ = solve_equal_weight(JacobiWeight(m, n), t, opts)
    if cache_obj is not None:
        cache_obj.store(q)
    return q


def _verify_node(design: Design, t: int, tol: float) -> tuple[str, float, bool]:
    """Run the applicable verifier(s) on a node and pool the results.

    Monomial verification is authoritative up to ambient dimension 6; the
    pairwise-polynomial check runs whenever the dimension and size make it
    feasible, and both must agree to pass.
    """
    methods = []
    if design.ambient_dim <= 6:
        methods.append(_verify.verify_monomials(design, t, tol))
    if design.ambient_dim >= 3 and (design.ambient_dim > 6 or design.count <= 20000):
        methods.append(_verify.verify_gegenbauer(design, t, tol))
    tag = "+".join(r.method for r in methods)
    residual = max(r.max_abs_residual for r in methods)
    passed = all(r.passed for r in methods)
    return tag, residual, passed


def build(
    bp: BuildPlan,
    t: int | None = None,
    solver_opts: SolverOptions | None = None,
    design_tol: float = 1e-9,
    cache_obj=None,
    phase: float = 0.0,
) -> tuple[Design, BuildReport]:
    """Execute a build plan bottom-up and certify every node.

    Leaf designs are exact by construction but still verified; each product
    node solves (or fetches from cache) its equal-weight quadrature and is
    re-verified.  Raises BuildError naming the offending node if any
    verification exceeds design_tol, and propagates NoConvergenceError from
    the quadrature solver.
    """
    t = bp.degree if t is None else min(t, bp.degree)
    solver_opts = solver_opts or SolverOptions()
    if cache_obj is None:
        cache_obj = InMemoryQuadratureCache()

    def execute(node: PlanNode, path: str) -> tuple[Design, BuildNodeReport]:
        if node.kind == "s0":
            design = base_s0(t)
            tag, residual, ok = _verify_node(design, t, design_tol)
        elif node.kind == "s1":
            design = base_s1(t, phase=phase)
            tag, residual, ok = _verify_node(design, t, design_tol)
        else:
            X, left_report = execute(node.left, path + "L")
            Y, right_report = execute(node.right, path + "R")
            m, n = node.split
            quad = solve_cached(m, n, t, solver_opts, cache_obj)
            design = product(X, Y, quad)
            tag, residual, ok = _verify_node(design, t, design_tol)
            report = BuildNodeReport(
                path=path,
                ambient_dim=node.ambient_dim,
                kind="product",
                cardinality=design.count,
                verify_method=tag,
                verify_residual=residual,
                m=m,
                n=n,
                K=quad.K,
                M=X.count,
                N=Y.count,
                quad_residual=quad.max_abs_residual,
                children=[left_report, right_report],
            )
            if not ok:
                raise BuildError(
                    f"verification failed at node {path or 'root'} "
                    f"(S^{node.ambient_dim - 1}, residual {residual:.3e} > {design_tol:g})",
                    node_path=path or "root",
                )
            return design, report

        report = BuildNodeReport(
            path=path,
            ambient_dim=node.ambient_dim,
            kind=node.kind,
            cardinality=design.count,
            verify_method=tag,
            verify_residual=residual,
        )
        if not ok:
            raise BuildError(
                f"verification failed at leaf {path or 'root'} (residual {residual:.3e})",
                node_path=path or "root",
            )
        return design, report

    design, root_report = execute(bp.root, "")
    report = BuildReport(
        sphere_dim=bp.sphere_dim,
        degree=t,
        total_points=design.count,
        exponent=a_sequence(bp.sphere_dim),
        dgs_lower_bound=lower_bound(bp.sphere_dim, t),
        max_residual=_max_residual(root_report),
        passed=True,
        root=root_report,
    )
    return design, report


def _max_residual(node: BuildNodeReport) -> float:
    return max([node.verify_residual] + [_max_residual(c) for c in node.children])
