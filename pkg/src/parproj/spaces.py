"""Inner-product spaces and their vectors.

Two concrete spaces are provided: Euclidean R^d and grid functions on
[0, 1] with the composite-trapezoid inner product (endpoint weights
tau/2, interior weights tau).  Every geometric quantity downstream
(norms, projections, half-space constructions) goes through the space's
inner product, so the grid solver is exactly the Euclidean solver in the
weighted metric.

Vectors are value-like: the coordinate array is frozen on construction
and every operation returns a fresh vector, which makes them safe to
share across parallel workers.
"""
from __future__ import annotations

import math

import numpy as np


class SpaceMismatchError(ValueError):
    """Vectors from different spaces were combined."""


class Space:
    """Base class: a finite-dimensional real inner-product space."""

    dim: int

    def inner_arrays(self, xa: np.ndarray, ya: np.ndarray) -> float:
        raise NotImplementedError

    def vec(self, coords) -> "Vec":
        return Vec(self, coords)

    def zeros(self) -> "Vec":
        return Vec(self, np.zeros(self.dim))

    def __ne__(self, other):
        return not self.__eq__(other)


class EuclideanSpace(Space):
    """Plain R^d with the dot product."""

    def __init__(self, dim: int):
        dim = int(dim)
        if dim < 1:
            raise ValueError(f"dimension must be positive, got {dim}")
        self.dim = dim

    def inner_arrays(self, xa, ya):
        return float(xa @ ya)

    def __eq__(self, other):
        return isinstance(other, EuclideanSpace) and other.dim == self.dim

    def __hash__(self):
        return hash(("euclidean", self.dim))

    def __repr__(self):
        return f"EuclideanSpace({self.dim})"


class GridSpace(Space):
    """Functions on [0, 1] at `nodes` uniform points, trapezoid metric.

    With m = nodes - 1 intervals and step tau = 1/m the quadrature
    weights are w_0 = w_m = tau/2 and w_k = tau otherwise; the weights
    sum to the interval length 1.
    """

    def __init__(self, nodes: int):
        nodes = int(nodes)
        if nodes < 2:
            raise ValueError(f"grid needs at least 2 nodes, got {nodes}")
        m = nodes - 1
        self.dim = self.nodes = nodes
        self.tau = 1.0 / m
        self.t = np.linspace(0.0, 1.0, nodes)
        w = np.full(nodes, self.tau)
        w[0] = w[-1] = self.tau / 2.0
        w.setflags(write=False)
        self.t.setflags(write=False)
        self.weights = w

    @classmethod
    def from_step(cls, tau: float) -> "GridSpace":
        m = round(1.0 / tau)
        if m < 1 or abs(m * tau - 1.0) > 1e-9:
            raise ValueError(f"step {tau} does not divide [0, 1] evenly")
        return cls(m + 1)

    def inner_arrays(self, xa, ya):
        return float(np.dot(self.weights * xa, ya))

    def sample(self, fn) -> "Vec":
        """Vector of fn evaluated at the grid nodes."""
        return Vec(self, np.asarray(fn(self.t), dtype=np.float64))

    def __eq__(self, other):
        return isinstance(other, GridSpace) and other.nodes == self.nodes

    def __hash__(self):
        return hash(("grid", self.nodes))

    def __repr__(self):
        return f"GridSpace(nodes={self.nodes}, tau={self.tau:g})"


class Vec:
    """An element of a Space: a frozen coordinate array plus its space."""

    __slots__ = ("space", "a")

    def __init__(self, space: Space, coords, copy: bool = True):
        a = np.array(coords, dtype=np.float64, copy=copy)
        if a.ndim != 1 or a.shape[0] != space.dim:
            raise ValueError(
                f"expected {space.dim} coordinates, got shape {a.shape}"
            )
        if not np.all(np.isfinite(a)):
            raise ValueError("non-finite coordinates")
        a.setflags(write=False)
        self.space = space
        self.a = a

    def __add__(self, other):
        _check_same(self, other)
        return Vec(self.space, self.a + other.a, copy=False)

    def __sub__(self, other):
        _check_same(self, other)
        return Vec(self.space, self.a - other.a, copy=False)

    def __mul__(self, s):
        return Vec(self.space, self.a * float(s), copy=False)

    __rmul__ = __mul__

    def __neg__(self):
        return Vec(self.space, -self.a, copy=False)

    def __repr__(self):
        return f"Vec({self.a!r})"


def _check_same(x: Vec, y: Vec):
    if x.space != y.space:
        raise SpaceMismatchError(f"{x.space!r} vs {y.space!r}")


def inner(x: Vec, y: Vec) -> float:
    _check_same(x, y)
    return x.space.inner_arrays(x.a, y.a)


def norm(x: Vec) -> float:
    return math.sqrt(max(inner(x, x), 0.0))


def dist(x: Vec, y: Vec) -> float:
    return norm(x - y)


def combine(a: float, x: Vec, b: float, y: Vec) -> Vec:
    """Coordinatewise a*x + b*y."""
    _check_same(x, y)
    return Vec(x.space, a * x.a + b * y.a, copy=False)
