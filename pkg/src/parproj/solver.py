"""The iteration engine.

Each iteration fans out a subextragradient step over the constraint
sets, keeps the result furthest from the current iterate, fans out a
Mann step over the fixed-point mappings, keeps the furthest again, and
projects the starting point onto the intersection of two constructed
half-spaces to get the next iterate.

Three modes:
  asymptotic  -- mappings are asymptotically strict pseudocontractive;
                 the Mann step applies the n-fold composition and the
                 outer half-space is relaxed by eps_n.
  plain       -- strict pseudocontractions (k_n == 1, eps_n == 0).
  csvip       -- no mappings at all; the Mann stage is skipped.

Fan-outs dispatch read-only work (the iterate plus immutable problem
data) to a thread pool in contiguous index chunks and gather results in
index order before any reduction, so traces are identical for every
worker count.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .operators import FixedPointMap, MonotoneOperator, ZeroOperator
from .sets import Ball, ConvexSet, build_C, build_Q, build_T, project_two_halfspaces
from .spaces import EuclideanSpace, Space, Vec, combine, inner, norm

MODES = ("asymptotic", "plain", "csvip")

# Abort threshold relative to the starting point; a violation signals a
# misconfigured problem (non-monotone operator, bad step size).
DIVERGENCE_FACTOR = 1e12


class SolverError(RuntimeError):
    """Fatal solver failure (infeasibility, divergence, bad parameters)."""


@dataclass
class Problem:
    """One solve instance: sets K_i, operators A_i, mappings S_j.

    `lipschitz` is a shared upper bound on every operator's constant;
    `k_seq` maps the composition power to its asymptotic factor (>= 1,
    -> 1) and is only consulted in asymptotic mode; `omega` bounds the
    norm of every solution and is required in asymptotic mode.
    """

    space: Space
    sets: list
    ops: list
    lipschitz: float
    maps: list = field(default_factory=list)
    kappa: float = 0.0
    k_seq: Optional[Callable[[int], float]] = None
    omega: Optional[float] = None

    def __post_init__(self):
        if len(self.sets) < 1:
            raise ValueError("need at least one constraint set")
        if len(self.ops) != len(self.sets):
            raise ValueError("one operator per constraint set")
        if not 0.0 <= self.kappa < 1.0:
            raise ValueError(f"kappa must be in [0, 1), got {self.kappa}")
        for op in self.ops:
            if op.lipschitz > self.lipschitz * (1.0 + 1e-12):
                raise ValueError(
                    f"operator bound {op.lipschitz} exceeds shared bound "
                    f"{self.lipschitz}"
                )

    @property
    def n_sets(self):
        return len(self.sets)

    @property
    def n_maps(self):
        return len(self.maps)


@dataclass
class Schedule:
    """Step size and relaxation sequences.

    lam must lie in (0, 1/L) whenever the shared Lipschitz bound L is
    positive; alpha(n) in [0, 1) with limsup < 1; beta(n) in
    [kappa, b] with b < 1.  alpha and beta are validated at each use.
    """

    lam: float
    alpha: Callable[[int], float] = lambda n: 0.0
    beta: Callable[[int], float] = lambda n: 0.0
    mode: str = "plain"

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass
class StopRule:
    """Stop on iteration budget, step residual, or distance to a target.

    A target without target_tol is recorded in the trace but never
    triggers a stop.
    """

    max_iters: int
    residual_tol: Optional[float] = None
    target: Optional[Vec] = None
    target_tol: Optional[float] = None

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.target_tol is not None and self.target is None:
            raise ValueError("target_tol needs a target")


@dataclass
class IterationRecord:
    """Diagnostics for one iteration n (producing x_{n+1}).

    dist_x0 and dist_to_target refer to the new iterate x_{n+1};
    dist_zbar / dist_ubar are distances from x_n.
    """

    n: int
    i_n: int
    j_n: Optional[int]
    dist_zbar: float
    dist_ubar: float
    eps_n: float
    residual: float
    dist_x0: float
    dist_to_target: Optional[float]
    wall_ms: float


def subextragradient_step(x_n: Vec, op: MonotoneOperator, K: ConvexSet,
                          lam: float):
    """One forward-project-forward-project pass for a single set.

    y = P_K(x - lam*A(x)); z is the projection of x - lam*A(y) onto the
    half-space through y that contains K, which is far cheaper than a
    second projection onto K itself.
    """
    Ax = op(x_n)
    y = K.project(combine(1.0, x_n, -lam, Ax))
    T = build_T(x_n, lam, Ax, y)
    z = T.project(combine(1.0, x_n, -lam, op(y)))
    return y, z


def select_furthest(points, x_n: Vec):
    """Smallest index attaining max ||p - x_n||, and that point."""
    if not points:
        raise ValueError("empty candidate list")
    best_i, best_d = 0, norm(points[0] - x_n)
    for k in range(1, len(points)):
        d = norm(points[k] - x_n)
        if d > best_d:
            best_i, best_d = k, d
    return best_i, points[best_i]


def mann_step(x_n: Vec, z_bar: Vec, S: FixedPointMap, n: int,
              alpha_n: float, beta_n: float, mode: str) -> Vec:
    """alpha*x + (1-alpha)*(beta*z + (1-beta)*S^p z).

    In asymptotic mode the composition power is p = n + 1 with n the
    0-based iteration index, so the first Mann step applies S once; the
    other modes always apply S once.
    """
    power = n + 1 if mode == "asymptotic" else 1
    Sz = S.power(z_bar, power)
    inner_pt = combine(beta_n, z_bar, 1.0 - beta_n, Sz)
    return combine(alpha_n, x_n, 1.0 - alpha_n, inner_pt)


def epsilon_n(k_n: float, x_n: Vec, omega: float) -> float:
    """Relaxation (k_n - 1) * (||x_n|| + omega)^2; zero iff k_n = 1."""
    if k_n < 1.0:
        raise ValueError(f"k_n must be >= 1, got {k_n}")
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    return (k_n - 1.0) * (norm(x_n) + omega) ** 2


def _chunks(count: int, parts: int):
    bounds = np.linspace(0, count, min(parts, count) + 1).astype(int)
    return [range(bounds[k], bounds[k + 1]) for k in range(len(bounds) - 1)]


class Solver:
    """Stateful runner for one solve; see module docstring for the modes."""

    def __init__(self, problem: Problem, schedule: Schedule, x0: Vec,
                 workers: int = 1, keep_iterates: bool = False):
        if workers < 1:
            raise ValueError("workers must be >= 1")
        if x0.space != problem.space:
            raise ValueError("x0 lives in a different space")
        mode = schedule.mode
        if problem.n_maps == 0 and mode != "csvip":
            raise ValueError("no mappings given; use csvip mode")
        if mode == "csvip" and problem.n_maps > 0:
            raise ValueError("csvip mode takes no mappings")
        if mode == "asymptotic":
            if problem.omega is None:
                raise ValueError("asymptotic mode requires omega")
            if problem.k_seq is None:
                raise ValueError("asymptotic mode requires k_seq")
        if problem.lipschitz > 0.0 and not schedule.lam < 1.0 / problem.lipschitz:
            raise ValueError(
                f"lambda {schedule.lam} violates lambda < 1/L = "
                f"{1.0 / problem.lipschitz}"
            )
        self.problem = problem
        self.schedule = schedule
        self.x0 = x0
        self.x = x0
        self.n = 0
        self.workers = workers
        self.trace: list[IterationRecord] = []
        self.keep_iterates = keep_iterates
        self.iterates = [x0] if keep_iterates else None
        self._pool = None
        self._divergence_bound = DIVERGENCE_FACTOR * (1.0 + norm(x0))
        self._ball_fast = self._make_ball_fast_path()

    # -- fan-out machinery -------------------------------------------------

    def _fanout(self, count, task):
        """[task(i) for i in range(count)], chunked over the pool.

        Each index is computed by the same code regardless of worker
        count and results are gathered in index order, so the output is
        bit-identical for any number of workers.
        """
        if self._pool is None or self.workers == 1 or count == 1:
            return [task(i) for i in range(count)]
        futures = [
            self._pool.submit(lambda ch=chunk: [task(i) for i in ch])
            for chunk in _chunks(count, self.workers)
        ]
        out = []
        for fut in futures:
            out.extend(fut.result())
        return out

    def _make_ball_fast_path(self):
        """Stacked centers/radii when every subproblem is P_ball(x).

        With zero operators the subextragradient step collapses to a
        single ball projection and the furthest distance is
        max(||x - a_i|| - r_i, 0), so the whole fan-out vectorizes.
        Results agree with the generic path; only the arithmetic is
        batched.
        """
        p = self.problem
        if not all(isinstance(op, ZeroOperator) for op in p.ops):
            return None
        if not all(isinstance(s, Ball) for s in p.sets):
            return None
        centers = np.stack([s.center.a for s in p.sets])
        radii = np.array([s.radius for s in p.sets])
        if isinstance(p.space, EuclideanSpace):
            w = None
        else:
            w = p.space.weights
        return centers, radii, w

    def _zbar(self):
        """Step 1-3: furthest subextragradient result and its distance."""
        x = self.x
        if self._ball_fast is not None:
            centers, radii, w = self._ball_fast
            diff = x.a[None, :] - centers
            if w is None:
                d = np.sqrt(np.einsum("ij,ij->i", diff, diff))
            else:
                d = np.sqrt((diff * diff) @ w)
            slack = np.maximum(d - radii, 0.0)
            i_n = int(np.argmax(slack))
            if slack[i_n] <= 0.0:
                return i_n, x, 0.0
            c = self.problem.sets[i_n].center
            zbar = combine(1.0, c, radii[i_n] / d[i_n], x - c)
            return i_n, zbar, float(slack[i_n])

        lam = self.schedule.lam

        def task(i):
            _, z = subextragradient_step(
                x, self.problem.ops[i], self.problem.sets[i], lam
            )
            return z

        zs = self._fanout(self.problem.n_sets, task)
        i_n, zbar = select_furthest(zs, x)
        return i_n, zbar, norm(zbar - x)

    def _ubar(self, zbar):
        """Step 4-5: furthest Mann-step result and its distance."""
        mode = self.schedule.mode
        if mode == "csvip":
            return None, zbar
        alpha = self.schedule.alpha(self.n)
        beta = self.schedule.beta(self.n)
        if not 0.0 <= alpha < 1.0:
            raise SolverError(f"alpha({self.n}) = {alpha} outside [0, 1)")
        if not self.problem.kappa <= beta < 1.0:
            raise SolverError(
                f"beta({self.n}) = {beta} outside [kappa, 1) = "
                f"[{self.problem.kappa}, 1)"
            )
        x, n = self.x, self.n

        def task(j):
            return mann_step(x, zbar, self.problem.maps[j], n, alpha, beta, mode)

        us = self._fanout(self.problem.n_maps, task)
        j_n, ubar = select_furthest(us, x)
        return j_n, ubar

    # -- iteration ---------------------------------------------------------

    def step(self, target: Vec = None) -> IterationRecord:
        """Run one full iteration and advance the state."""
        t0 = time.perf_counter()
        x = self.x
        i_n, zbar, dist_zbar = self._zbar()
        j_n, ubar = self._ubar(zbar)

        if self.schedule.mode == "asymptotic":
            # eps must pair with the composition power used in the Mann
            # step, so the asymptotic factor is taken at n + 1.
            eps = epsilon_n(self.problem.k_seq(self.n + 1), x, self.problem.omega)
        else:
            eps = 0.0

        C = build_C(x, ubar, eps)
        Q = build_Q(self.x0, x)
        x_next = project_two_halfspaces(self.x0, C, Q)

        if norm(x_next) > self._divergence_bound:
            raise SolverError(f"divergence detected at iteration {self.n}")
        if not (C.contains(x_next) and Q.contains(x_next)):
            raise SolverError(
                f"iterate left the constructed half-spaces at iteration {self.n}"
            )

        rec = IterationRecord(
            n=self.n,
            i_n=i_n,
            j_n=j_n,
            dist_zbar=dist_zbar,
            dist_ubar=norm(ubar - x),
            eps_n=eps,
            residual=norm(x_next - x),
            dist_x0=norm(x_next - self.x0),
            dist_to_target=None if target is None else norm(x_next - target),
            wall_ms=(time.perf_counter() - t0) * 1e3,
        )
        self.trace.append(rec)
        self.x = x_next
        self.n += 1
        if self.keep_iterates:
            self.iterates.append(x_next)
        return rec

    def solve(self, stop: StopRule):
        """Iterate until a stop criterion fires; returns (x, trace)."""
        try:
            if self.workers > 1:
                self._pool = ThreadPoolExecutor(max_workers=self.workers)
            for _ in range(stop.max_iters - self.n):
                rec = self.step(target=stop.target)
                if stop.residual_tol is not None and rec.residual <= stop.residual_tol:
                    break
                if (
                    stop.target_tol is not None
                    and rec.dist_to_target <= stop.target_tol
                ):
                    break
        finally:
            if self._pool is not None:
                self._pool.shutdown()
                self._pool = None
        return self.x, self.trace


def solve(problem: Problem, schedule: Schedule, stop: StopRule, x0: Vec,
          workers: int = 1):
    """One-shot convenience wrapper around Solver."""
    return Solver(problem, schedule, x0, workers=workers).solve(stop)
