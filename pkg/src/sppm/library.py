"""Model families and synthetic benchmarks.

Demand models negate Cobb-Douglas and CES utilities.  Utilities live on the
nonnegative orthant; components are extended to all of R^n as
``-mu(max(x, 0)) + ||min(x, 0)||^2``.  An optional budget turns the utility
branch into ``max(-mu(x+), slope * (p.x - w))`` so that the problem has
minimizers; a max of quasiconvex functions stays quasiconvex, which an
additive budget penalty would not.

Location models take, for each cluster of demand points, the max over
``j`` of a nondecreasing map applied to the vector of gauge distances.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import ConstructionError
from .problem import ComponentOracle, Problem, as_point

# ---------------------------------------------------------------------------
# Gauges


@dataclass(frozen=True)
class EuclideanBall:
    """Gauge of the ball of the given radius centred at 0."""

    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ConstructionError("ball radius must be positive")

    def value(self, u: np.ndarray) -> float:
        return math.sqrt(float(u @ u)) / self.radius

    def subgradient(self, u: np.ndarray) -> np.ndarray:
        nrm = math.sqrt(float(u @ u))
        if nrm == 0.0:
            return np.zeros_like(u)
        return u / (self.radius * nrm)


@dataclass(frozen=True)
class Ellipsoid:
    """Gauge of ``{u : sum((u_i / a_i)^2) <= 1}``."""

    axes: tuple[float, ...]

    def __post_init__(self):
        if len(self.axes) == 0 or not all(a > 0 for a in self.axes):
            raise ConstructionError("ellipsoid axes must be positive")
        object.__setattr__(self, "_inv", 1.0 / np.asarray(self.axes, dtype=float))

    def value(self, u: np.ndarray) -> float:
        v = u * self._inv
        return math.sqrt(float(v @ v))

    def subgradient(self, u: np.ndarray) -> np.ndarray:
        g = self.value(u)
        if g == 0.0:
            return np.zeros_like(u)
        return u * self._inv * self._inv / g


@dataclass(frozen=True)
class Polyhedron:
    """Gauge of ``{u : <a_j, u> <= b_j for all j}`` with every ``b_j > 0``.

    The gauge is ``max_j <a_j, u> / b_j``; the set must be bounded.
    """

    normals: tuple[tuple[float, ...], ...]
    offsets: tuple[float, ...]

    def __post_init__(self):
        A = np.asarray(self.normals, dtype=float)
        b = np.asarray(self.offsets, dtype=float)
        if A.ndim != 2 or A.shape[0] != b.size or b.size == 0:
            raise ConstructionError("polyhedron needs one offset per normal")
        if not np.all(b > 0):
            raise ConstructionError("polyhedron offsets must be positive (0 strictly inside)")
        # bounded iff the recession cone {u : A u <= 0} is trivial
        n = A.shape[1]
        for i in range(n):
            for sign in (1.0, -1.0):
                c = np.zeros(n)
                c[i] = -sign
                res = linprog(c, A_ub=A, b_ub=np.zeros(A.shape[0]), bounds=[(-1, 1)] * n)
                if res.status == 0 and -res.fun > 1e-12:
                    raise ConstructionError("polyhedron is unbounded")
        S = A / b[:, None]
        S.setflags(write=False)
        object.__setattr__(self, "_scaled", S)

    def value(self, u: np.ndarray) -> float:
        return float((self._scaled @ u).max())

    def subgradient(self, u: np.ndarray) -> np.ndarray:
        if not np.any(u):
            return np.zeros_like(u)
        S = self._scaled
        return S[int(np.argmax(S @ u))].copy()


Gauge = EuclideanBall | Ellipsoid | Polyhedron

# ---------------------------------------------------------------------------
# Nondecreasing maps R^p_+ -> R_+ ; each is evaluated for a fixed index j


@dataclass(frozen=True)
class Identity:
    """``y -> y_j``."""

    def value(self, y: np.ndarray, j: int) -> float:
        return float(y[j])

    def gradient(self, y: np.ndarray, j: int) -> np.ndarray:
        g = np.zeros_like(y)
        g[j] = 1.0
        return g


@dataclass(frozen=True)
class Power:
    """``y -> y_j ** q`` with ``q >= 1``."""

    q: float

    def __post_init__(self):
        if not self.q >= 1:
            raise ConstructionError("power composition needs q >= 1")

    def value(self, y: np.ndarray, j: int) -> float:
        return float(y[j] ** self.q)

    def gradient(self, y: np.ndarray, j: int) -> np.ndarray:
        g = np.zeros_like(y)
        g[j] = self.q * y[j] ** (self.q - 1.0)
        return g


@dataclass(frozen=True)
class Affine:
    """``y -> <w, y> + b`` with ``w >= 0`` and ``b >= 0``."""

    weights: tuple[float, ...]
    offset: float = 0.0

    def __post_init__(self):
        if not all(w >= 0 for w in self.weights) or not self.offset >= 0:
            raise ConstructionError("affine composition needs nonnegative weights and offset")

    def value(self, y: np.ndarray, j: int) -> float:
        return float(np.dot(self.weights, y)) + self.offset

    def gradient(self, y: np.ndarray, j: int) -> np.ndarray:
        return np.asarray(self.weights, dtype=float).copy()


Composition = Identity | Power | Affine


@dataclass(frozen=True)
class ClusterSpec:
    """Demand points of one cluster with one gauge and one map per point."""

    demand_points: tuple[tuple[float, ...], ...]
    gauges: tuple[Gauge, ...]
    compositions: tuple[Composition, ...] | None = None

    def __post_init__(self):
        p = len(self.demand_points)
        if p == 0:
            raise ConstructionError("cluster has no demand points")
        if len(self.gauges) != p:
            raise ConstructionError(f"cluster has {p} demand points but {len(self.gauges)} gauges")
        comps = self.compositions if self.compositions is not None else (Identity(),) * p
        if len(comps) != p:
            raise ConstructionError(f"cluster has {p} demand points but {len(comps)} compositions")
        for c in comps:
            if isinstance(c, Affine) and len(c.weights) != p:
                raise ConstructionError("affine composition needs one weight per demand point")
        object.__setattr__(self, "compositions", tuple(comps))
        object.__setattr__(self, "_points", tuple(np.asarray(d, dtype=float) for d in self.demand_points))

    def distances(self, x: np.ndarray) -> np.ndarray:
        return np.array([g.value(x - d) for g, d in zip(self.gauges, self._points)])


# ---------------------------------------------------------------------------
# Demand models


@dataclass(frozen=True)
class Budget:
    """Prices, income and slope of the affine budget branch."""

    prices: tuple[float, float]
    income: float
    slope: float = 10.0

    def __post_init__(self):
        if len(self.prices) != 2 or not all(p > 0 for p in self.prices):
            raise ConstructionError("budget prices must be two positive numbers")
        if not self.income > 0 or not self.slope > 0:
            raise ConstructionError("budget income and slope must be positive")


def _demand_component(utility, utility_grad, budget: Budget | None) -> ComponentOracle:
    prices = tuple(float(p) for p in budget.prices) if budget else None

    def branches(x):
        x1, x2 = float(x[0]), float(x[1])
        xp = (max(x1, 0.0), max(x2, 0.0))
        a = -utility(xp)
        b = budget.slope * (prices[0] * x1 + prices[1] * x2 - budget.income) if budget else -math.inf
        return xp, a, b

    def value(x):
        _, a, b = branches(x)
        x1, x2 = min(x[0], 0.0), min(x[1], 0.0)
        return max(a, b) + x1 * x1 + x2 * x2

    def subgradient(x):
        xp, a, b = branches(x)
        if b > a:
            g = budget.slope * np.asarray(prices)
        elif xp[0] > 0 and xp[1] > 0:
            g = -utility_grad(xp)
        else:
            # utility branch is identically 0 off the open orthant; the
            # Clarke set is unbounded on its boundary, 0 is the convention
            g = np.zeros(2)
        return g + 2.0 * np.minimum(x, 0.0)

    return ComponentOracle(value, subgradient)


def make_cobb_douglas(specs: Sequence[tuple[float, float, float]], budget: Budget | None = None,
                      name: str = "cobb-douglas") -> Problem:
    """Negated Cobb-Douglas utilities ``-k x1^a x2^b``, one component per spec."""
    comps = []
    for spec in specs:
        k, a, b = (float(s) for s in spec)
        if not (k > 0 and a > 0 and b > 0):
            raise ConstructionError(f"Cobb-Douglas needs k, alpha, beta > 0, got {spec}")

        def util(xp, k=k, a=a, b=b):
            return k * xp[0] ** a * xp[1] ** b

        def grad(xp, k=k, a=a, b=b):
            u = k * xp[0] ** a * xp[1] ** b
            return np.array([a * u / xp[0], b * u / xp[1]])

        comps.append(_demand_component(util, grad, budget))
    if not comps:
        raise ConstructionError("need at least one utility spec")
    return Problem(name=name, n=2, m=len(comps), components=tuple(comps), smooth=False,
                   claimed_quasiconvex=True, positive=False, convex=False)


def make_ces(specs: Sequence[tuple[float, float, float]], budget: Budget | None = None,
             name: str = "ces") -> Problem:
    """Negated CES utilities ``-(l1 x1^r + l2 x2^r)^(1/r)``.

    The extended components are quasiconvex on all of R^2 only for ``r < 0``
    with both weights positive; for ``0 < r <= 1`` quasiconvexity holds on
    the orthant but the extension breaks it near the axes, and for ``r > 1``
    the negated utility is not quasiconvex at all.  ``claimed_quasiconvex``
    records the global claim.
    """
    comps = []
    globally_qc = True
    for spec in specs:
        l1, l2, r = (float(s) for s in spec)
        if l1 < 0 or l2 < 0 or abs(l1 + l2 - 1.0) > 1e-12:
            raise ConstructionError(f"CES weights must be nonnegative and sum to 1, got {spec}")
        if r == 0:
            raise ConstructionError("CES exponent rho must be nonzero")
        globally_qc &= r < 0 and l1 > 0 and l2 > 0

        def util(xp, l1=l1, l2=l2, r=r):
            if r < 0 and ((l1 > 0 and xp[0] == 0) or (l2 > 0 and xp[1] == 0)):
                return 0.0
            s = (l1 * xp[0] ** r if l1 > 0 else 0.0) + (l2 * xp[1] ** r if l2 > 0 else 0.0)
            return s ** (1.0 / r) if s > 0 else 0.0

        def grad(xp, l1=l1, l2=l2, r=r, util=util):
            u = util(xp)
            return np.array([l1 * xp[0] ** (r - 1.0), l2 * xp[1] ** (r - 1.0)]) * u ** (1.0 - r)

        comps.append(_demand_component(util, grad, budget))
    if not comps:
        raise ConstructionError("need at least one utility spec")
    return Problem(name=name, n=2, m=len(comps), components=tuple(comps), smooth=False,
                   claimed_quasiconvex=globally_qc, positive=False, convex=False)


# ---------------------------------------------------------------------------
# Location models


def _location_component(cluster: ClusterSpec) -> ComponentOracle:
    points = [np.asarray(d, dtype=float) for d in cluster.demand_points]

    def terms(x):
        y = cluster.distances(x)
        vals = np.array([f.value(y, j) for j, f in enumerate(cluster.compositions)])
        return y, vals

    def value(x):
        return float(terms(x)[1].max())

    def subgradient(x):
        y, vals = terms(x)
        j = int(np.argmax(vals))  # lowest index on ties
        w = cluster.compositions[j].gradient(y, j)
        g = np.zeros_like(x)
        for l, (gauge, d) in enumerate(zip(cluster.gauges, points)):
            if w[l] != 0.0:
                g += w[l] * gauge.subgradient(x - d)
        return g

    return ComponentOracle(value, subgradient)


def _cluster_positive(cluster: ClusterSpec) -> bool:
    if any(isinstance(c, Affine) and c.offset > 0 for c in cluster.compositions):
        return True
    distinct = {tuple(d) for d in cluster.demand_points}
    return len(distinct) >= 2 and all(isinstance(c, (Identity, Power)) for c in cluster.compositions)


def make_location(clusters: Sequence[ClusterSpec], aggregation: str = "max",
                  name: str = "location") -> Problem:
    """One objective per cluster: ``max_j f_j(gauge distances to the cluster)``."""
    if aggregation != "max":
        raise ConstructionError(f"unsupported aggregation {aggregation!r}; only 'max'")
    if not clusters:
        raise ConstructionError("need at least one cluster")
    dims = {len(d) for c in clusters for d in c.demand_points}
    if len(dims) != 1:
        raise ConstructionError("all demand points must share one dimension")
    n = dims.pop()
    if n < 2:
        raise ConstructionError("location models need dimension n >= 2")
    for c in clusters:
        for g in c.gauges:
            gdim = len(g.axes) if isinstance(g, Ellipsoid) else (
                len(g.normals[0]) if isinstance(g, Polyhedron) else n)
            if gdim != n:
                raise ConstructionError(f"gauge dimension {gdim} does not match n={n}")
    comps = tuple(_location_component(c) for c in clusters)
    return Problem(name=name, n=n, m=len(comps), components=comps, smooth=False,
                   claimed_quasiconvex=True, positive=all(_cluster_positive(c) for c in clusters),
                   convex=True)


# ---------------------------------------------------------------------------
# Quadratics


def make_convex_quadratic(centers: Sequence[Sequence[float]], name: str = "quadratic") -> Problem:
    """Components ``||x - c_i||^2``; the weak Pareto set is the hull of the centers."""
    cs = [as_point(c) for c in centers]
    if not cs:
        raise ConstructionError("need at least one center")
    n = cs[0].size
    if any(c.size != n for c in cs):
        raise ConstructionError("centers must share one dimension")

    def comp(c):
        return ComponentOracle(lambda x, c=c: float((x - c) @ (x - c)), lambda x, c=c: 2.0 * (x - c))

    return Problem(name=name, n=n, m=len(cs), components=tuple(comp(c) for c in cs), smooth=True,
                   claimed_quasiconvex=True, positive=False, convex=True)


# ---------------------------------------------------------------------------
# Catalog

_DEFAULT_BUDGET = Budget(prices=(1.0, 1.0), income=4.0, slope=10.0)


def _loc_2cluster():
    c1 = ClusterSpec(((0.0, 0.0), (1.0, 0.0)), (EuclideanBall(), EuclideanBall()))
    c2 = ClusterSpec(((0.5, 1.0), (0.5, -1.0)), (Ellipsoid((2.0, 1.0)), Ellipsoid((2.0, 1.0))))
    return make_location([c1, c2], name="loc-2cluster")


def _loc_gauge():
    diamond = Polyhedron(((1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)), (1.0, 1.0, 1.0, 1.0))
    c1 = ClusterSpec(((0.0, 0.0), (2.0, 0.0)), (diamond, diamond), (Power(2.0), Power(2.0)))
    c2 = ClusterSpec(((1.0, 2.0), (3.0, 1.0)), (Ellipsoid((1.5, 1.0)), EuclideanBall()),
                     (Identity(), Affine((0.5, 1.0))))
    return make_location([c1, c2], name="loc-gauge")


@dataclass(frozen=True)
class CatalogEntry:
    factory: Callable[[], Problem]
    description: str


CATALOG: dict[str, CatalogEntry] = {
    "quad1": CatalogEntry(lambda: make_convex_quadratic([(0.0,)], name="quad1"),
                          "single objective x^2 on R"),
    "quad-seg": CatalogEntry(lambda: make_convex_quadratic([(1.0,), (-1.0,)], name="quad-seg"),
                             "(x-1)^2, (x+1)^2 on R; weak Pareto set [-1, 1]"),
    "quad-tri": CatalogEntry(
        lambda: make_convex_quadratic([(0.0, 0.0), (2.0, 0.0), (1.0, 2.0)], name="quad-tri"),
        "three squared distances on R^2; weak Pareto set is the triangle"),
    "cobb2": CatalogEntry(
        lambda: make_cobb_douglas([(1.0, 0.5, 0.5), (1.0, 0.2, 0.8)], budget=_DEFAULT_BUDGET, name="cobb2"),
        "two negated Cobb-Douglas utilities with budget p=(1,1), w=4"),
    "ces1": CatalogEntry(
        lambda: make_ces([(0.5, 0.5, -1.0), (0.3, 0.7, -0.5)], budget=_DEFAULT_BUDGET, name="ces1"),
        "two negated CES utilities (rho < 0) with budget p=(1,1), w=4"),
    "loc-2cluster": CatalogEntry(_loc_2cluster,
                                 "two max-distance clusters sharing the minimizer (0.5, 0)"),
    "loc-gauge": CatalogEntry(_loc_gauge,
                              "polyhedral/ellipsoidal gauges with power and affine maps"),
}


def load_problem(problem_id: str) -> Problem:
    """Build a catalog problem by id."""
    try:
        entry = CATALOG[problem_id]
    except KeyError:
        known = ", ".join(sorted(CATALOG))
        raise ConstructionError(f"unknown problem {problem_id!r}; known problems: {known}") from None
    return entry.factory()


def _gauge_from_spec(spec: dict) -> Gauge:
    kind = spec.get("kind", "euclidean-ball")
    if kind == "euclidean-ball":
        return EuclideanBall(float(spec.get("radius", 1.0)))
    if kind == "ellipsoid":
        return Ellipsoid(tuple(float(a) for a in spec["axes"]))
    if kind == "polyhedron":
        return Polyhedron(tuple(tuple(float(v) for v in a) for a in spec["normals"]),
                          tuple(float(b) for b in spec["offsets"]))
    raise ConstructionError(f"unknown gauge kind {kind!r}")


def _composition_from_spec(spec) -> Composition:
    if spec in (None, "identity") or (isinstance(spec, dict) and spec.get("kind") == "identity"):
        return Identity()
    if spec.get("kind") == "power":
        return Power(float(spec["q"]))
    if spec.get("kind") == "affine":
        return Affine(tuple(float(w) for w in spec["weights"]), float(spec.get("offset", 0.0)))
    raise ConstructionError(f"unknown composition {spec!r}")


def problem_from_spec(spec: dict | str) -> Problem:
    """Build a problem from an inline JSON description.

    Examples::

        {"kind": "quadratic", "centers": [[1], [-1]]}
        {"kind": "cobb-douglas", "specs": [[1, 0.5, 0.5]], "budget": {"prices": [1, 1], "income": 4}}
        {"kind": "location", "clusters": [{"points": [[0, 0], [1, 0]]}]}
    """
    try:
        if isinstance(spec, str):
            spec = json.loads(spec)
        return _problem_from_dict(spec)
    except json.JSONDecodeError as exc:
        raise ConstructionError(f"inline problem is not valid JSON: {exc}") from None
    except (KeyError, TypeError, AttributeError) as exc:
        raise ConstructionError(f"malformed inline problem: missing or invalid field {exc}") from None


def _problem_from_dict(spec: dict) -> Problem:
    kind = spec.get("kind")
    name = spec.get("name", kind or "inline")
    budget = None
    if spec.get("budget"):
        b = spec["budget"]
        budget = Budget(tuple(float(p) for p in b["prices"]), float(b["income"]), float(b.get("slope", 10.0)))
    if kind == "quadratic":
        return make_convex_quadratic(spec["centers"], name=name)
    if kind == "cobb-douglas":
        return make_cobb_douglas([tuple(s) for s in spec["specs"]], budget=budget, name=name)
    if kind == "ces":
        return make_ces([tuple(s) for s in spec["specs"]], budget=budget, name=name)
    if kind == "location":
        clusters = []
        for c in spec["clusters"]:
            pts = tuple(tuple(float(v) for v in p) for p in c["points"])
            gauges = c.get("gauges") or [{"kind": "euclidean-ball"}] * len(pts)
            comps = c.get("compositions") or [None] * len(pts)
            clusters.append(ClusterSpec(pts, tuple(_gauge_from_spec(g) for g in gauges),
                                        tuple(_composition_from_spec(f) for f in comps)))
        return make_location(clusters, name=name)
    raise ConstructionError(f"unknown inline problem kind {kind!r}")
