"""Convex-set descriptors with exact metric projections.

Includes the constructed half-spaces used by the solver (the
subextragradient target half-space, the outer-approximation pair built
each iteration), the closed-form projection onto the intersection of two
half-spaces, and a Dykstra oracle used by the tests to cross-validate
the closed form.

All geometry is in the metric of the vector's space, so grid vectors are
projected in the weighted (trapezoid) norm.
"""
from __future__ import annotations

import numpy as np

from .spaces import Vec, combine, inner, norm

# Relative scale factor for degenerate-normal detection.
DEGENERACY_TOL = 1e-14
# Relative scale factor for membership tests.
MEMBERSHIP_TOL = 1e-9


class InfeasibleError(RuntimeError):
    """Projection onto an empty set was requested."""


class ConvexSet:
    def project(self, x: Vec) -> Vec:
        raise NotImplementedError

    def contains(self, x: Vec) -> bool:
        raise NotImplementedError


class WholeSpace(ConvexSet):
    """The whole space; projection is the identity."""

    def __init__(self, space):
        self.space = space

    def project(self, x):
        return x

    def contains(self, x):
        return True

    def __repr__(self):
        return "WholeSpace()"


class EmptySet(ConvexSet):
    """Degenerate half-space with no points; projecting is an error."""

    def __init__(self, space):
        self.space = space

    def project(self, x):
        raise InfeasibleError("projection onto an empty set")

    def contains(self, x):
        return False

    def __repr__(self):
        return "EmptySet()"


class HalfSpace(ConvexSet):
    """{v : <a, v> <= b} with a nondegenerate normal a.

    Use `halfspace` to construct one when the normal might vanish.
    """

    def __init__(self, normal: Vec, offset: float):
        self.a = normal
        self.b = float(offset)
        self._aa = inner(normal, normal)
        if self._aa <= 0.0:
            raise ValueError("degenerate normal; use halfspace()")
        self.space = normal.space

    def violation(self, x: Vec) -> float:
        return inner(self.a, x) - self.b

    def _tol(self, x: Vec) -> float:
        return MEMBERSHIP_TOL * (1.0 + abs(self.b) + norm(self.a) * norm(x))

    def contains(self, x):
        return self.violation(x) <= self._tol(x)

    def project(self, x):
        g = self.violation(x)
        if g <= 0.0:
            return x
        return combine(1.0, x, -g / self._aa, self.a)

    def __repr__(self):
        return f"HalfSpace(b={self.b:g})"


class Ball(ConvexSet):
    """{x : ||x - center|| <= radius} in the space's metric."""

    def __init__(self, center: Vec, radius: float):
        if radius <= 0.0:
            raise ValueError(f"radius must be positive, got {radius}")
        self.center = center
        self.radius = float(radius)
        self.space = center.space

    def contains(self, x):
        return norm(x - self.center) <= self.radius * (1.0 + MEMBERSHIP_TOL)

    def project(self, x):
        d = norm(x - self.center)
        if d <= self.radius:
            return x
        return combine(1.0, self.center, self.radius / d, x - self.center)

    def __repr__(self):
        return f"Ball(r={self.radius:g})"


class Box(ConvexSet):
    """Coordinatewise bounds; projection is the clamp.

    The clamp is the metric projection for the grid space too, because
    its inner product is diagonal.
    """

    def __init__(self, lower: Vec, upper: Vec):
        if lower.space != upper.space:
            raise ValueError("box bounds live in different spaces")
        if np.any(lower.a > upper.a):
            raise ValueError("lower bound exceeds upper bound")
        self.lower = lower
        self.upper = upper
        self.space = lower.space

    def contains(self, x):
        tol = MEMBERSHIP_TOL * (1.0 + float(np.max(np.abs(x.a))))
        return bool(
            np.all(x.a >= self.lower.a - tol) and np.all(x.a <= self.upper.a + tol)
        )

    def project(self, x):
        return Vec(x.space, np.clip(x.a, self.lower.a, self.upper.a), copy=False)

    def __repr__(self):
        return "Box()"


def halfspace(normal: Vec, offset: float, scale: float = 1.0) -> ConvexSet:
    """Half-space {v : <normal, v> <= offset}, degeneracy-aware.

    A normal of norm <= DEGENERACY_TOL * scale is treated as zero: the
    set is the whole space when offset >= 0 and empty otherwise.
    """
    if norm(normal) <= DEGENERACY_TOL * scale:
        if offset >= 0.0:
            return WholeSpace(normal.space)
        return EmptySet(normal.space)
    return HalfSpace(normal, offset)


def build_T(x: Vec, lam: float, Ax: Vec, y: Vec) -> ConvexSet:
    """Target half-space of the subextragradient step.

    Given y = P_K(x - lam*Ax), returns {v : <(x - lam*Ax) - y, v - y> <= 0};
    y lies on its boundary and K is contained in it.  Degenerates to the
    whole space exactly when x - lam*Ax already lay in K.
    """
    a = combine(1.0, x, -lam, Ax) - y
    scale = 1.0 + norm(x) + norm(y) + abs(lam) * norm(Ax)
    return halfspace(a, inner(a, y), scale=scale)


def build_C(x_n: Vec, u_bar: Vec, eps_n: float = 0.0) -> ConvexSet:
    """Half-space form of {v : ||u_bar - v||^2 <= ||x_n - v||^2 + eps_n}.

    Expanding the squares gives 2<v, x_n - u_bar> <= ||x_n||^2 -
    ||u_bar||^2 + eps_n.  When x_n = u_bar the set is the whole space
    (the inequality reduces to 0 <= eps_n).
    """
    if eps_n < 0.0:
        raise ValueError(f"eps_n must be nonnegative, got {eps_n}")
    a = combine(2.0, x_n, -2.0, u_bar)
    b = inner(x_n, x_n) - inner(u_bar, u_bar) + eps_n
    scale = 1.0 + norm(x_n) + norm(u_bar)
    return halfspace(a, b, scale=scale)


def build_Q(x_0: Vec, x_n: Vec) -> ConvexSet:
    """Half-space {v : <v - x_n, x_n - x_0> >= 0}, in <=-form.

    x_n lies on the boundary; the set is the whole space at iteration 0
    (x_n = x_0).
    """
    a = x_0 - x_n
    scale = 1.0 + norm(x_0) + norm(x_n)
    return halfspace(a, inner(a, x_n), scale=scale)


def project_two_halfspaces(x: Vec, h1: ConvexSet, h2: ConvexSet) -> Vec:
    """Exact projection of x onto the intersection of two half-spaces.

    Case analysis: x itself if feasible; otherwise the single-half-space
    projections when they land in the other set; otherwise the
    projection onto the intersection of the two boundary hyperplanes,
    obtained from the 2x2 Gram system in the normals.  Among feasible
    candidates the closest wins, ties broken toward the single
    projections.
    """
    for h in (h1, h2):
        if isinstance(h, EmptySet):
            raise InfeasibleError("empty half-space in intersection")
    if isinstance(h1, WholeSpace):
        return h2.project(x)
    if isinstance(h2, WholeSpace):
        return h1.project(x)

    if h1.contains(x) and h2.contains(x):
        return x

    candidates = []
    p1 = h1.project(x)
    if h2.contains(p1):
        candidates.append(p1)
    p2 = h2.project(x)
    if h1.contains(p2):
        candidates.append(p2)
    if candidates:
        best = candidates[0]
        for c in candidates[1:]:
            if norm(x - c) < norm(x - best):
                best = c
        return best

    # Both single projections infeasible: both constraints are active at
    # the solution.  Solve the Gram system for x + c1*a1 + c2*a2 on the
    # intersection of the boundary hyperplanes.
    a1, a2 = h1.a, h2.a
    gram = np.array(
        [
            [inner(a1, a1), inner(a1, a2)],
            [inner(a2, a1), inner(a2, a2)],
        ]
    )
    rhs = np.array([h1.b - inner(a1, x), h2.b - inner(a2, x)])
    try:
        coef = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        raise InfeasibleError("parallel half-spaces with empty intersection")
    p = combine(1.0, x, float(coef[0]), a1) + float(coef[1]) * a2
    if not (h1.contains(p) and h2.contains(p)):
        raise InfeasibleError("two-half-space projection found no feasible point")
    return p


def project_oracle(x: Vec, sets, sweeps: int = 500) -> Vec:
    """Dykstra's alternating-projection oracle for P over an intersection.

    Plain cyclic projections converge only to some point of the
    intersection; Dykstra's correction terms recover the metric
    projection, which is what the closed forms must be checked against.
    Test-only: cost is sweeps * len(sets) projections.
    """
    y = x
    zero = x.space.zeros()
    corrections = [zero] * len(sets)
    for _ in range(sweeps):
        shift = 0.0
        for k, s in enumerate(sets):
            w = y + corrections[k]
            y_new = s.project(w)
            corrections[k] = w - y_new
            shift = max(shift, norm(y_new - y))
            y = y_new
        if shift <= 1e-15 * (1.0 + norm(y)):
            break
    return y
