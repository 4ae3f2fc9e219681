"""Parameter learning from partial interpretations.

Both learners maximize the log-likelihood of a set of partial
interpretations, where each interpretation's probability is the chosen
credal bound (lower or upper) of its interpretation query:

* :func:`learn_opt` — box-constrained maximization of the symbolic
  objective, with a projected-gradient backend (exact polynomial
  gradients, Armijo backtracking) and a derivative-free coordinate
  search backend, both multi-started.
* :func:`learn_em` — Expectation Maximization: expected counts are
  conditional bounds of each learnable fact given each interpretation,
  and the update is the closed-form ratio e1/(e0+e1).

All query bounds are extracted once as multilinear polynomials (one
world pass per program, cached), so iterations only evaluate
polynomials and never re-enumerate answer sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .credal import conditional_from_joints, world_models
from .errors import NoLearnableFacts, UndefinedConditional
from .model import Interpretation, Program, interpretation_query
from .rng import SplitMix64
from .sympoly import SymPoly, poly_eval, poly_from_world_flags, poly_grad

_TARGETS = ("lower", "upper")
_METHODS = ("opt", "em")
_BACKENDS = ("gradient", "derivativeFree")

#: Joint-bound evaluations below this magnitude are snapped to exact
#: zero before forming conditionals, so that boundary thetas hit the
#: degenerate clauses instead of dividing by collection noise.
_SNAP_EPS = 1e-15


@dataclass(frozen=True)
class LearnConfig:
    """Knobs shared by both learning methods."""

    target: str = "upper"
    method: str = "opt"
    eps_ll: float = 5e-4
    max_iters: int = 1000
    floor_prob: float = 1e-12
    restarts: int = 4
    seed: int = 0
    opt_backend: str = "gradient"
    skip_undefined: bool = False

    def __post_init__(self):
        if self.target not in _TARGETS:
            raise ValueError(f"target must be one of {_TARGETS}, got {self.target!r}")
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}, got {self.method!r}")
        if self.opt_backend not in _BACKENDS:
            raise ValueError(
                f"opt_backend must be one of {_BACKENDS}, got {self.opt_backend!r}"
            )
        if not self.eps_ll > 0:
            raise ValueError(f"eps_ll must be positive, got {self.eps_ll}")
        if not 0 < self.floor_prob < 1e-3:
            raise ValueError(f"floor_prob must be in (0, 1e-3), got {self.floor_prob}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")


@dataclass(frozen=True)
class LearnResult:
    params: tuple[float, ...]
    final_ll: float
    iterations: int
    converged: bool
    ll_trace: tuple[float, ...]


@dataclass(frozen=True)
class EMExpectations:
    e0: tuple[float, ...]
    e1: tuple[float, ...]


def ll_objective(polys, theta, floor_prob: float = 1e-12) -> float:
    """Σ_k log(max(polys[k](theta), floor_prob)); at most 0 when values ≤ 1."""
    return sum(math.log(max(poly_eval(p, theta), floor_prob)) for p in polys)


def ll_gradient(polys, theta, floor_prob: float = 1e-12) -> np.ndarray:
    """Gradient of :func:`ll_objective`; floored terms contribute zero."""
    grad = np.zeros(len(theta))
    for p in polys:
        v = poly_eval(p, theta)
        if v > floor_prob:
            grad += poly_grad(p, theta) / v
    return grad


def _interpretation_polys(
    program: Program, interps, target: str, cap: int | None
) -> list[SymPoly]:
    wm = world_models(program, cap)
    polys = []
    for interp in interps:
        all_sat, some_sat = wm.satisfaction(interpretation_query(interp))
        flags = all_sat if target == "lower" else some_sat
        polys.append(poly_from_world_flags(program, flags, cap))
    return polys


# -- constrained optimization ------------------------------------------


def _gradient_ascent(objective, gradient, x0, max_inner=500, tol=1e-6):
    """Projected gradient ascent with Armijo backtracking on [0,1]^L."""
    x = np.clip(np.asarray(x0, dtype=float), 0.0, 1.0)
    ll = objective(x)
    trace = [ll]
    converged = False
    iterations = 0
    for it in range(1, max_inner + 1):
        g = gradient(x)
        if np.linalg.norm(np.clip(x + g, 0.0, 1.0) - x) < tol:
            converged = True
            break
        iterations = it
        step = 1.0
        accepted = False
        while step > 1e-18:
            xn = np.clip(x + step * g, 0.0, 1.0)
            lln = objective(xn)
            if lln >= ll + 1e-4 * float(g @ (xn - x)):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        x, ll = xn, lln
        trace.append(ll)
    return x, ll, iterations, converged, trace


def _coordinate_search(objective, x0, max_sweeps=500, start_step=0.25, tol=1e-6):
    """Derivative-free coordinate descent (ascent) with shrinking step."""
    x = np.clip(np.asarray(x0, dtype=float), 0.0, 1.0)
    ll = objective(x)
    trace = [ll]
    converged = False
    iterations = 0
    step = start_step
    for sweep in range(1, max_sweeps + 1):
        if step < tol:
            converged = True
            break
        iterations = sweep
        improved = False
        for j in range(len(x)):
            for delta in (step, -step):
                xn = x.copy()
                xn[j] = min(1.0, max(0.0, x[j] + delta))
                if xn[j] == x[j]:
                    continue
                lln = objective(xn)
                if lln > ll:
                    x, ll = xn, lln
                    improved = True
                    break
        trace.append(ll)
        if not improved:
            step *= 0.5
    return x, ll, iterations, converged, trace


def learn_opt(
    program: Program,
    interps: list[Interpretation],
    cfg: LearnConfig,
    cap: int | None = None,
) -> LearnResult:
    """Maximize the log-likelihood over [0,1]^L by multi-start search.

    The first start is the program's declared initial probabilities;
    the remaining ``cfg.restarts - 1`` starts are drawn from
    ``cfg.seed``.  The best run wins (ties keep the earliest);
    ``iterations`` and ``converged`` describe the winning run.
    """
    nvars = len(program.learnable_indices())
    if nvars == 0:
        raise NoLearnableFacts("program declares no learnable facts")
    polys = _interpretation_polys(program, interps, cfg.target, cap)

    def objective(theta):
        return ll_objective(polys, theta, cfg.floor_prob)

    def gradient(theta):
        return ll_gradient(polys, theta, cfg.floor_prob)

    starts = [np.array(program.initial_theta())]
    root = SplitMix64(cfg.seed)
    for r in range(1, cfg.restarts):
        gen = root.split(r)
        starts.append(np.array([gen.random() for _ in range(nvars)]))

    best = None
    for x0 in starts:
        if cfg.opt_backend == "gradient":
            run = _gradient_ascent(objective, gradient, x0)
        else:
            run = _coordinate_search(objective, x0)
        if best is None or run[1] > best[1]:
            best = run
    x, ll, iterations, converged, trace = best
    return LearnResult(
        params=tuple(float(v) for v in x),
        final_ll=ll,
        iterations=iterations,
        converged=converged,
        ll_trace=tuple(trace),
    )


# -- expectation maximization ------------------------------------------


class _JointBounds:
    """Pre-extracted joint-bound polynomials for EM.

    For learnable fact j and interpretation k, the four joints are the
    lower/upper bounds of (a_j ∧ q_k) and (not a_j ∧ q_k).  A fact's
    truth in a world equals its inclusion bit, so all four come from
    the interpretation's world-satisfaction flags filtered on that bit.
    """

    def __init__(self, program: Program, interps, cap: int | None):
        wm = world_models(program, cap)
        n = program.n_prob_facts
        idx = np.arange(1 << n, dtype=np.int64)
        self.program = program
        self.learn_ids = program.learnable_indices()
        self.queries = [interpretation_query(i) for i in interps]
        self.joints: list[list[tuple[SymPoly, SymPoly, SymPoly, SymPoly]]] = []
        for q in self.queries:
            all_sat, some_sat = wm.satisfaction(q)
            all_np = np.asarray(all_sat, dtype=bool)
            some_np = np.asarray(some_sat, dtype=bool)
            per_fact = []
            for j in self.learn_ids:
                inc = ((idx >> (n - 1 - j)) & 1).astype(bool)
                per_fact.append(
                    (
                        poly_from_world_flags(program, all_np & inc, cap),
                        poly_from_world_flags(program, some_np & inc, cap),
                        poly_from_world_flags(program, all_np & ~inc, cap),
                        poly_from_world_flags(program, some_np & ~inc, cap),
                    )
                )
            self.joints.append(per_fact)

    def expectations(
        self, theta, target: str, skip_undefined: bool = False
    ) -> EMExpectations:
        L = len(self.learn_ids)
        e0 = [0.0] * L
        e1 = [0.0] * L
        for k, per_fact in enumerate(self.joints):
            for i, (low_a, up_a, low_na, up_na) in enumerate(per_fact):
                vals = [
                    _snap(poly_eval(p, theta)) for p in (low_a, up_a, low_na, up_na)
                ]
                try:
                    cond_a = conditional_from_joints(*vals)
                    cond_na = conditional_from_joints(vals[2], vals[3], vals[0], vals[1])
                except UndefinedConditional:
                    if skip_undefined:
                        continue
                    atom = self.program.prob_facts[self.learn_ids[i]].atom
                    raise UndefinedConditional(
                        f"fact {atom}, interpretation query {self.queries[k]}"
                    ) from None
                if target == "lower":
                    e1[i] += cond_a.lower
                    e0[i] += cond_na.lower
                else:
                    e1[i] += cond_a.upper
                    e0[i] += cond_na.upper
        return EMExpectations(tuple(e0), tuple(e1))


def _snap(v: float) -> float:
    """Clamp collection noise so boundary thetas give exact-zero bounds."""
    if abs(v) < _SNAP_EPS:
        return 0.0
    return min(max(v, 0.0), 1.0)


def em_expectation(
    program: Program,
    interps: list[Interpretation],
    theta,
    target: str = "upper",
    cap: int | None = None,
    skip_undefined: bool = False,
) -> EMExpectations:
    """Expected counts: e1_i = Σ_I P(a_i | I), e0_i = Σ_I P(not a_i | I).

    Conditionals are the chosen bound's conditional probabilities,
    evaluated from pre-extracted joint polynomials.
    """
    joints = _JointBounds(program, interps, cap)
    return joints.expectations(theta, target, skip_undefined)


def em_maximization(e: EMExpectations, prev_theta) -> tuple[float, ...]:
    """Closed-form update θ_i = e1_i/(e0_i+e1_i); 0/0 keeps the previous θ_i."""
    out = []
    for e0, e1, prev in zip(e.e0, e.e1, prev_theta):
        s = e0 + e1
        if s == 0.0:
            out.append(float(prev))
        else:
            out.append(min(max(e1 / s, 0.0), 1.0))
    return tuple(out)


def learn_em(
    program: Program,
    interps: list[Interpretation],
    cfg: LearnConfig,
    cap: int | None = None,
) -> LearnResult:
    """EM loop: expectations / update / log-likelihood until |ΔLL| < eps_ll.

    ``ll_trace[0]`` is the log-likelihood at the initial parameters; one
    entry is appended per EM iteration.
    """
    nvars = len(program.learnable_indices())
    if nvars == 0:
        raise NoLearnableFacts("program declares no learnable facts")
    polys = _interpretation_polys(program, interps, cfg.target, cap)
    joints = _JointBounds(program, interps, cap)

    theta = tuple(program.initial_theta())
    ll = ll_objective(polys, theta, cfg.floor_prob)
    trace = [ll]
    converged = False
    iterations = 0
    for it in range(1, cfg.max_iters + 1):
        exp = joints.expectations(theta, cfg.target, cfg.skip_undefined)
        theta = em_maximization(exp, theta)
        prev_ll, ll = ll, ll_objective(polys, theta, cfg.floor_prob)
        trace.append(ll)
        iterations = it
        if abs(ll - prev_ll) < cfg.eps_ll:
            converged = True
            break
    return LearnResult(
        params=theta,
        final_ll=ll,
        iterations=iterations,
        converged=converged,
        ll_trace=tuple(trace),
    )
