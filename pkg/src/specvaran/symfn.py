"""Pluggable symmetric functions on R^n with first/second-order hooks.

A symmetric function is invariant under coordinate permutations.  Each
instance exposes, in closed form: the value, the subderivative (lower
directional difference-quotient limit), a subdifferential membership test,
the second subderivative tilted by a subgradient, the parabolic
subderivative along a direction/second-order pair, a critical-cone test,
the Euclidean distance to the domain, and a proximal map where available.

Built-in instances:
  neg-orthant       indicator of {x <= 0}
  pos-orthant       indicator of {x >= 0}
  max               x -> max_i x_i
  spectahedron:k    indicator of {sum x_i^k = 1, x >= 0}  (convex iff k = 1)

Extended-real values are plain floats with math.inf for +infinity.
Membership equalities use a single default tolerance (1e-7), overridable
per call.
"""

from __future__ import annotations

import numpy as np
from scipy import optimize

from .errors import CapabilityError, DomainError, InputError

__all__ = [
    "DEFAULT_TOL",
    "SymmetricFunction",
    "NonpositiveOrthantIndicator",
    "NonnegativeOrthantIndicator",
    "MaxComponent",
    "SpectahedronIndicator",
    "by_name",
    "BUILTIN_NAMES",
    "project_simplex",
    "theta_eval",
    "theta_subderivative",
    "theta_subdifferential_contains",
    "theta_second_subderivative",
    "theta_parabolic_subderivative",
    "theta_critical_cone_contains",
    "theta_domain_distance",
]

INF = float("inf")
DEFAULT_TOL = 1e-7


def _vec(x) -> np.ndarray:
    v = np.asarray(x, dtype=float).ravel()
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise InputError("expected a nonempty finite vector")
    return v


def project_simplex(y, radius: float = 1.0) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = radius} (sort-based)."""
    v = _vec(y)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - radius
    ks = np.arange(1, v.size + 1)
    hit = u - css / ks > 0
    k = int(ks[hit][-1])
    tau = css[k - 1] / k
    return np.maximum(v - tau, 0.0)


class SymmetricFunction:
    """Base class; subclasses fill in the closed-form hooks."""

    name: str = ""
    is_convex: bool = False
    is_polyhedral: bool = False
    finite_everywhere: bool = False
    # Declared, not verified, for user-supplied instances.
    lipschitz_on_domain: bool = True

    def _tol(self, tol):
        return DEFAULT_TOL if tol is None else float(tol)

    # --- hooks ---------------------------------------------------------
    def value(self, x) -> float:
        raise NotImplementedError

    def subderivative(self, x, w, tol=None) -> float:
        raise NotImplementedError

    def subdifferential_contains(self, x, v, tol=None) -> bool:
        raise CapabilityError(f"{self.name}: no subdifferential test")

    def parabolic_subderivative(self, x, w, z, tol=None) -> float:
        raise NotImplementedError

    def second_subderivative(self, x, v, w, tol=None) -> float:
        # Polyhedral rule: the tilted second subderivative is the indicator
        # of the critical cone.
        if not self.is_polyhedral:
            raise CapabilityError(f"{self.name}: second subderivative needs a polyhedral instance")
        return 0.0 if self.critical_cone_contains(x, v, w, tol) else INF

    def critical_cone_contains(self, x, v, w, tol=None) -> bool:
        tol = self._tol(tol)
        d = self.subderivative(x, w, tol)
        if not np.isfinite(d):
            return False
        return abs(d - float(np.dot(_vec(v), _vec(w)))) <= tol

    def domain_distance(self, x) -> float:
        raise NotImplementedError

    def prox(self, x, step: float):
        raise CapabilityError(f"{self.name}: no proximal map")


class NonpositiveOrthantIndicator(SymmetricFunction):
    """Indicator of the nonpositive orthant {x : x_i <= 0}."""

    name = "neg-orthant"
    is_convex = True
    is_polyhedral = True
    finite_everywhere = False

    def value(self, x, tol=None) -> float:
        return 0.0 if np.all(_vec(x) <= self._tol(tol)) else INF

    def _active(self, x, tol):
        return _vec(x) >= -tol

    def subderivative(self, x, w, tol=None) -> float:
        tol = self._tol(tol)
        w = _vec(w)
        return 0.0 if np.all(w[self._active(x, tol)] <= tol) else INF

    def subdifferential_contains(self, x, v, tol=None) -> bool:
        tol = self._tol(tol)
        x, v = _vec(x), _vec(v)
        return bool(np.all(v >= -tol) and np.all(v[x < -tol] <= tol))

    def parabolic_subderivative(self, x, w, z, tol=None) -> float:
        tol = self._tol(tol)
        x, w, z = _vec(x), _vec(w), _vec(z)
        second_level = self._active(x, tol) & (np.abs(w) <= tol)
        return 0.0 if np.all(z[second_level] <= tol) else INF

    def domain_distance(self, x) -> float:
        return float(np.linalg.norm(np.maximum(_vec(x), 0.0)))

    def prox(self, x, step: float):
        return np.minimum(_vec(x), 0.0)


class NonnegativeOrthantIndicator(SymmetricFunction):
    """Indicator of the nonnegative orthant {x : x_i >= 0}."""

    name = "pos-orthant"
    is_convex = True
    is_polyhedral = True
    finite_everywhere = False

    def value(self, x, tol=None) -> float:
        return 0.0 if np.all(_vec(x) >= -self._tol(tol)) else INF

    def _active(self, x, tol):
        return _vec(x) <= tol

    def subderivative(self, x, w, tol=None) -> float:
        tol = self._tol(tol)
        w = _vec(w)
        return 0.0 if np.all(w[self._active(x, tol)] >= -tol) else INF

    def subdifferential_contains(self, x, v, tol=None) -> bool:
        tol = self._tol(tol)
        x, v = _vec(x), _vec(v)
        return bool(np.all(v <= tol) and np.all(v[x > tol] >= -tol))

    def parabolic_subderivative(self, x, w, z, tol=None) -> float:
        tol = self._tol(tol)
        x, w, z = _vec(x), _vec(w), _vec(z)
        second_level = self._active(x, tol) & (np.abs(w) <= tol)
        return 0.0 if np.all(z[second_level] >= -tol) else INF

    def domain_distance(self, x) -> float:
        return float(np.linalg.norm(np.minimum(_vec(x), 0.0)))

    def prox(self, x, step: float):
        return np.maximum(_vec(x), 0.0)


class MaxComponent(SymmetricFunction):
    """The finite polyhedral function x -> max_i x_i."""

    name = "max"
    is_convex = True
    is_polyhedral = True
    finite_everywhere = True

    def value(self, x, tol=None) -> float:
        return float(np.max(_vec(x)))

    def _active(self, x, tol):
        x = _vec(x)
        return x >= np.max(x) - tol

    def subderivative(self, x, w, tol=None) -> float:
        tol = self._tol(tol)
        return float(np.max(_vec(w)[self._active(x, tol)]))

    def subdifferential_contains(self, x, v, tol=None) -> bool:
        tol = self._tol(tol)
        v = _vec(v)
        active = self._active(x, tol)
        return bool(
            abs(float(np.sum(v)) - 1.0) <= tol
            and np.all(v >= -tol)
            and np.all(v[~active] <= tol)
        )

    def parabolic_subderivative(self, x, w, z, tol=None) -> float:
        tol = self._tol(tol)
        w, z = _vec(w), _vec(z)
        active = self._active(x, tol)
        top = float(np.max(w[active]))
        second_level = active & (w >= top - tol)
        return float(np.max(z[second_level]))

    def domain_distance(self, x) -> float:
        _vec(x)
        return 0.0

    def prox(self, x, step: float):
        # Moreau: prox of step*max is x minus the projection onto the
        # simplex scaled by step.
        x = _vec(x)
        return x - project_simplex(x / step) * step


class SpectahedronIndicator(SymmetricFunction):
    """Indicator of {x : sum_i x_i^k = 1, x_i >= 0}; the simplex for k = 1.

    Convex (and polyhedral) only for k = 1; for k >= 2 only the value,
    tangent and second-order tangent membership, and the domain distance
    are available.
    """

    finite_everywhere = False

    def __init__(self, k: int = 1):
        k = int(k)
        if k < 1:
            raise InputError("spectahedron power k must be >= 1")
        self.k = k
        self.name = f"spectahedron:{k}"
        self.is_convex = k == 1
        self.is_polyhedral = k == 1

    def value(self, x, tol=None) -> float:
        tol = self._tol(tol)
        x = _vec(x)
        feasible = abs(float(np.sum(x**self.k)) - 1.0) <= tol and np.all(x >= -tol)
        return 0.0 if feasible else INF

    def _active(self, x, tol):
        return _vec(x) <= tol

    def subderivative(self, x, w, tol=None) -> float:
        tol = self._tol(tol)
        x, w = _vec(x), _vec(w)
        coeff = np.power(np.maximum(x, 0.0), self.k - 1)
        tangent = abs(float(np.dot(coeff, w))) <= tol and np.all(w[self._active(x, tol)] >= -tol)
        return 0.0 if tangent else INF

    def subdifferential_contains(self, x, v, tol=None) -> bool:
        if self.k != 1:
            raise CapabilityError(f"{self.name}: not convex, no subdifferential")
        # Multiplier feasibility: v = a*1 + b with b <= 0 supported on the
        # active set, solved as a small LP with slack t minimized.
        tol = self._tol(tol)
        x, v = _vec(x), _vec(v)
        n = x.size
        active = self._active(x, tol)
        m = int(np.sum(active))
        # variables: [a, b_1..b_m, t]; minimize t
        c = np.zeros(2 + m)
        c[-1] = 1.0
        rows = []
        rhs = []
        for i in range(n):
            row = np.zeros(2 + m)
            row[0] = 1.0
            if active[i]:
                row[1 + int(np.sum(active[:i]))] = 1.0
            # v_i - a - b_i <= t   and   a + b_i - v_i <= t
            r1 = row.copy()
            r1[-1] = 1.0
            rows.append(-r1)
            rhs.append(-v[i])
            r2 = row.copy()
            r2[-1] = -1.0
            rows.append(r2)
            rhs.append(v[i])
        bounds = [(None, None)] + [(None, 0.0)] * m + [(0.0, None)]
        res = optimize.linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method="highs")
        return bool(res.success and res.fun <= tol)

    def parabolic_subderivative(self, x, w, z, tol=None) -> float:
        tol = self._tol(tol)
        x, w, z = _vec(x), _vec(w), _vec(z)
        xp = np.maximum(x, 0.0)
        second_level = self._active(x, tol) & (np.abs(w) <= tol)
        if not np.all(z[second_level] >= -tol):
            return INF
        total = float(np.dot(np.power(xp, self.k - 1), z))
        if self.k >= 2:
            total += (self.k - 1) * float(np.dot(np.power(xp, self.k - 2), w**2))
        return 0.0 if abs(total) <= tol else INF

    def second_subderivative(self, x, v, w, tol=None) -> float:
        if self.k != 1:
            raise CapabilityError(f"{self.name}: second subderivative only for k = 1")
        return super().second_subderivative(x, v, w, tol)

    def domain_distance(self, x) -> float:
        x = _vec(x)
        if self.k == 1:
            return float(np.linalg.norm(x - project_simplex(x)))
        return self._distance_multistart(x)

    def _distance_multistart(self, x: np.ndarray) -> float:
        # Local minimization of ||z - x||^2 on the constraint set from a few
        # deterministic starts; the set is compact so the best local value
        # is a reliable distance estimate at these sizes.
        n = x.size
        k = self.k
        cons = [
            {"type": "eq", "fun": lambda z: np.sum(np.maximum(z, 0.0) ** k) - 1.0},
        ]
        bounds = [(0.0, None)] * n
        starts = [np.full(n, (1.0 / n) ** (1.0 / k))]
        clipped = np.maximum(x, 0.0)
        norm = float(np.sum(clipped**k))
        if norm > 0:
            starts.append(clipped / norm ** (1.0 / k))
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            starts.append(e)
        best = INF
        for z0 in starts:
            res = optimize.minimize(
                lambda z: float(np.sum((z - x) ** 2)),
                z0,
                jac=lambda z: 2.0 * (z - x),
                bounds=bounds,
                constraints=cons,
                method="SLSQP",
                options={"maxiter": 200, "ftol": 1e-14},
            )
            if res.success or res.status == 0:
                cand = float(np.sqrt(max(res.fun, 0.0)))
                best = min(best, cand)
        if not np.isfinite(best):
            raise DomainError(f"{self.name}: distance minimization failed from all starts")
        return best

    def prox(self, x, step: float):
        if self.k != 1:
            raise CapabilityError(f"{self.name}: prox only for the convex case k = 1")
        return project_simplex(_vec(x))


BUILTIN_NAMES = ("neg-orthant", "pos-orthant", "max", "spectahedron:k")


def by_name(name: str) -> SymmetricFunction:
    """Instance registry used by scenario files and the CLI."""
    if name == "neg-orthant":
        return NonpositiveOrthantIndicator()
    if name == "pos-orthant":
        return NonnegativeOrthantIndicator()
    if name == "max":
        return MaxComponent()
    if name.startswith("spectahedron:"):
        return SpectahedronIndicator(int(name.split(":", 1)[1]))
    raise InputError(f"unknown symmetric function {name!r}; known: {', '.join(BUILTIN_NAMES)}")


# --- operation-level wrappers with the documented pre/error contracts ----


def theta_eval(f: SymmetricFunction, x) -> float:
    return f.value(x)


def theta_subderivative(f: SymmetricFunction, x, w) -> float:
    if not np.isfinite(f.value(x)):
        raise DomainError(f"{f.name}: point outside the domain")
    return f.subderivative(x, w)


def theta_subdifferential_contains(f: SymmetricFunction, x, v, tol=None) -> bool:
    if not f.is_convex:
        raise CapabilityError(f"{f.name}: subdifferential test needs convexity")
    if not np.isfinite(f.value(x)):
        raise DomainError(f"{f.name}: point outside the domain")
    return f.subdifferential_contains(x, v, tol)


def theta_second_subderivative(f: SymmetricFunction, x, v, w, tol=None) -> float:
    if not theta_subdifferential_contains(f, x, v, tol):
        raise DomainError(f"{f.name}: v is not a subgradient at x")
    return f.second_subderivative(x, v, w, tol)


def theta_parabolic_subderivative(f: SymmetricFunction, x, w, z) -> float:
    if not np.isfinite(theta_subderivative(f, x, w)):
        raise DomainError(f"{f.name}: direction outside the subderivative domain")
    return f.parabolic_subderivative(x, w, z)


def theta_critical_cone_contains(f: SymmetricFunction, x, v, w, tol=None) -> bool:
    return f.critical_cone_contains(x, v, w, tol)


def theta_domain_distance(f: SymmetricFunction, x) -> float:
    return f.domain_distance(x)
