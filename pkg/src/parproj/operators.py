"""Monotone operators and fixed-point mappings.

Monotone operators drive the variational-inequality side; the
fixed-point mappings are (asymptotically) strict pseudocontractions in
the solver's sense.  The four Fredholm integral mappings of the
benchmark experiments live here, discretized by the grid space's
trapezoid quadrature.
"""
from __future__ import annotations

import math

import numpy as np

from .spaces import GridSpace, Space, Vec

# Node count at or above which a Fredholm map precomputes its dense
# kernel matrix instead of rebuilding it on every evaluation.
KERNEL_PRECOMPUTE_NODES = 2001


class MonotoneOperator:
    """Base: a monotone map with a Lipschitz upper bound `lipschitz`."""

    lipschitz: float

    def __call__(self, x: Vec) -> Vec:
        raise NotImplementedError


class ZeroOperator(MonotoneOperator):
    """A = 0; Lipschitz constant 0 by convention."""

    lipschitz = 0.0

    def __init__(self, space: Space):
        self.space = space
        self._zero = space.zeros()

    def __call__(self, x):
        return self._zero

    def __repr__(self):
        return "ZeroOperator()"


class AffineOperator(MonotoneOperator):
    """A(x) = M x + q.

    Monotone iff the symmetric part of M is positive semidefinite in
    the space's metric (asserted by tests, not here).  The Lipschitz
    bound is the operator norm of M in that metric, estimated by power
    iteration and rounded up by 1%; a caller-supplied bound overrides.
    """

    def __init__(self, space: Space, mat, shift: Vec | None = None,
                 lipschitz: float | None = None):
        mat = np.asarray(mat, dtype=np.float64)
        if mat.shape != (space.dim, space.dim):
            raise ValueError(f"matrix shape {mat.shape} != space dim {space.dim}")
        self.space = space
        self.mat = mat
        self.shift = shift if shift is not None else space.zeros()
        if self.shift.space != space:
            raise ValueError("shift lives in a different space")
        self.lipschitz = (
            float(lipschitz) if lipschitz is not None else operator_norm(space, mat)
        )

    def __call__(self, x):
        if x.space != self.space:
            raise ValueError("operator applied to a vector of another space")
        return Vec(self.space, self.mat @ x.a + self.shift.a, copy=False)

    def __repr__(self):
        return f"AffineOperator(L={self.lipschitz:g})"


def operator_norm(space: Space, mat, tol: float = 1e-8, max_iters: int = 5000) -> float:
    """Operator norm of mat in the space's metric, padded up by 1%.

    For a weighted metric W the norm equals the spectral norm of
    W^{1/2} M W^{-1/2}; estimated by power iteration on B^T B with a
    fixed seed so the bound is deterministic.
    """
    mat = np.asarray(mat, dtype=np.float64)
    if isinstance(space, GridSpace):
        sw = np.sqrt(space.weights)
        b = (sw[:, None] * mat) / sw[None, :]
    else:
        b = mat
    rng = np.random.default_rng(0)
    v = rng.standard_normal(mat.shape[0])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iters):
        w = b @ v
        sigma_new = np.linalg.norm(w)
        if sigma_new == 0.0:
            return 0.0
        v = b.T @ w
        v /= np.linalg.norm(v)
        if abs(sigma_new - sigma) <= tol * sigma_new:
            sigma = sigma_new
            break
        sigma = sigma_new
    return float(sigma) * 1.01


class FixedPointMap:
    """Base for the mappings whose common fixed point is sought."""

    def __call__(self, x: Vec) -> Vec:
        raise NotImplementedError

    def power(self, x: Vec, n: int) -> Vec:
        """n-fold composition; n = 0 is the identity by convention."""
        if n < 0:
            raise ValueError(f"power must be nonnegative, got {n}")
        for _ in range(n):
            x = self(x)
        return x


class IdentityMap(FixedPointMap):
    def __call__(self, x):
        return x

    def power(self, x, n):
        if n < 0:
            raise ValueError(f"power must be nonnegative, got {n}")
        return x

    def __repr__(self):
        return "IdentityMap()"


class FuncMap(FixedPointMap):
    """Wraps a user-supplied Vec -> Vec evaluation."""

    def __init__(self, fn):
        self.fn = fn

    def __call__(self, x):
        return self.fn(x)


class FredholmMap(FixedPointMap):
    """[S(x)](t) = int_0^1 kernel(t, s) f(x(s)) ds + g(t) on a grid.

    The integral is the grid's trapezoid quadrature.  Below
    KERNEL_PRECOMPUTE_NODES the kernel is evaluated lazily on each call;
    at or above, the dense kernel matrix is built once.
    """

    def __init__(self, space: GridSpace, kernel, f, g):
        if not isinstance(space, GridSpace):
            raise ValueError("Fredholm maps need a grid space")
        self.space = space
        self.kernel = kernel
        self.f = f
        self.g = np.asarray(g(space.t), dtype=np.float64)
        if space.nodes >= KERNEL_PRECOMPUTE_NODES:
            self._kmat = kernel(space.t[:, None], space.t[None, :])
        else:
            self._kmat = None

    def __call__(self, x):
        if x.space != self.space:
            raise ValueError("map applied to a vector of another space")
        weighted = self.space.weights * self.f(x.a)
        if self._kmat is not None:
            vals = self._kmat @ weighted
        else:
            t = self.space.t
            vals = self.kernel(t[:, None], t[None, :]) @ weighted
        return Vec(self.space, vals + self.g, copy=False)


_C1 = 2.0 / (math.e * math.sqrt(math.e ** 2 - 1.0))
_C34 = math.sqrt(21.0) / 7.0


def fredholm_family(space: GridSpace) -> list[FredholmMap]:
    """The four benchmark integral mappings on L^2[0, 1].

    Each is nonexpansive (0-strict pseudocontractive) and fixes the zero
    function: the offsets g cancel the integrals at x = 0.
    """
    return [
        FredholmMap(
            space,
            kernel=lambda t, s: _C1 * t * s * np.exp(t + s),
            f=np.cos,
            g=lambda t: -_C1 * t * np.exp(t),
        ),
        FredholmMap(
            space,
            kernel=lambda t, s: math.sqrt(3.0) * t * s,
            f=lambda u: 1.0 / (u ** 2 + 1.0),
            g=lambda t: -(math.sqrt(3.0) / 2.0) * t,
        ),
        FredholmMap(
            space,
            kernel=lambda t, s: _C34 * np.abs(t - s),
            f=np.sin,
            g=lambda t: np.zeros_like(t),
        ),
        FredholmMap(
            space,
            kernel=lambda t, s: _C34 * (t + s),
            f=lambda u: np.exp(-(u ** 2)),
            g=lambda t: -_C34 * (t + 0.5),
        ),
    ]
