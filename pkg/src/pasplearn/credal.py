"""Exact credal inference by world enumeration.

Every total choice over the probabilistic facts is one world; a query's
lower probability sums the worlds where *all* answer sets satisfy it,
the upper probability the worlds where *some* answer set does.  The
semantics requires every world to have at least one answer set;
evaluation fails fast with :class:`InconsistentWorld` on the first
world violating this (eager checking is available via
:func:`check_consistency`).

The per-world answer sets depend only on the program structure, not on
the probability values, so they are computed once per program and
reused across queries, bounds, parameter values, and learning passes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CapExceeded, InconsistentWorld, UndefinedConditional
from .grounding import GroundProgram, ground
from .model import Program, Query, World, world_cap
from .stable import StableSolver


@dataclass(frozen=True)
class CredalBounds:
    lower: float
    upper: float

    def __iter__(self):
        return iter((self.lower, self.upper))


@dataclass(eq=False)
class WorldModels:
    """All answer sets of all worlds, in world-index order.

    ``model_masks[i]`` holds the stable-model bit masks of world ``i``
    (possibly empty — consistency is the caller's concern so that
    counting and fail-fast uses can share one pass).
    """

    program: Program
    gp: GroundProgram
    model_masks: tuple[tuple[int, ...], ...]
    _support: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def n_atoms(self) -> int:
        return self.gp.n_atoms

    def support_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Per world: learnable inclusion pattern and fixed-fact product.

        ``patterns[i]`` packs the learnable facts included in world ``i``
        (bit k = learnable k, declaration order); ``k_w[i]`` is the
        product of the fixed facts' probability factors.
        """
        if self._support is None:
            n = self.program.n_prob_facts
            idx = np.arange(1 << n, dtype=np.int64)
            patterns = np.zeros(1 << n, dtype=np.int64)
            k_w = np.ones(1 << n)
            k = 0
            for j, pf in enumerate(self.program.prob_facts):
                included = (idx >> (n - 1 - j)) & 1
                if pf.learnable:
                    patterns |= included << k
                    k += 1
                else:
                    k_w *= np.where(included, pf.prob, 1.0 - pf.prob)
            self._support = (patterns, k_w)
        return self._support

    def world(self, index: int) -> World:
        n = self.program.n_prob_facts
        return World(index, tuple(index >> (n - 1 - j) & 1 for j in range(n)))

    def query_masks(self, query: Query) -> tuple[int, int, bool]:
        """(positive mask, negative mask, satisfiable) for mask testing.

        Query atoms outside the relevant ground base are never true in
        any model: a positive occurrence makes the query unsatisfiable,
        a negative occurrence is vacuously satisfied and dropped.
        """
        n = self.n_atoms
        idx = self.gp.atom_index
        pos_mask = 0
        for atom in query.positives:
            i = idx.get(atom)
            if i is None:
                return 0, 0, False
            pos_mask |= 1 << (n - 1 - i)
        neg_mask = 0
        for atom in query.negatives:
            i = idx.get(atom)
            if i is not None:
                neg_mask |= 1 << (n - 1 - i)
        return pos_mask, neg_mask, True

    def satisfaction(self, query: Query) -> tuple[bytearray, bytearray]:
        """Per-world flags (all answer sets satisfy, some answer set satisfies).

        Raises :class:`InconsistentWorld` on the first world without
        answer sets.
        """
        pos_mask, neg_mask, possible = self.query_masks(query)
        n_worlds = len(self.model_masks)
        all_sat = bytearray(n_worlds)
        some_sat = bytearray(n_worlds)
        for i, masks in enumerate(self.model_masks):
            if not masks:
                raise InconsistentWorld(i, self.world(i).selection)
            if not possible:
                continue
            every, some = True, False
            for m in masks:
                if m & pos_mask == pos_mask and m & neg_mask == 0:
                    some = True
                else:
                    every = False
            all_sat[i] = every
            some_sat[i] = some
        return all_sat, some_sat


@lru_cache(maxsize=8)
def _world_models(program: Program, cap: int) -> WorldModels:
    n = program.n_prob_facts
    if n > cap:
        raise CapExceeded(n, cap)
    gp = ground(program)
    solver = StableSolver(gp)
    masks = []
    for i in range(1 << n):
        # World index reads the selection MSB-first; the solver mask is
        # indexed by fact id, i.e. bit-reversed.
        world_mask = 0
        for j in range(n):
            if i >> (n - 1 - j) & 1:
                world_mask |= 1 << j
        masks.append(solver.models_for_mask(world_mask))
    return WorldModels(program, gp, tuple(masks))


def world_models(program: Program, cap: int | None = None) -> WorldModels:
    """Cached all-worlds answer-set pass for a program."""
    return _world_models(program, world_cap(cap))


def _world_probs(program: Program, theta=None) -> list[float]:
    """P(w) for every world, in world-index order."""
    probs = [pf.prob for pf in program.prob_facts]
    if theta is not None:
        for t, j in zip(theta, program.learnable_indices()):
            probs[j] = float(t)
    n = len(probs)
    out = [1.0] * (1 << n)
    # Prefix-product sweep: bit j of the world index selects p_j vs 1-p_j.
    for j, pj in enumerate(probs):
        qj = 1.0 - pj
        bit = 1 << (n - 1 - j)
        for i in range(1 << n):
            out[i] *= pj if i & bit else qj
    return out


def credal_query(
    program: Program, q: Query, theta=None, cap: int | None = None
) -> CredalBounds:
    """Lower/upper probability of a conjunctive query."""
    wm = world_models(program, cap)
    all_sat, some_sat = wm.satisfaction(q)
    pw = _world_probs(program, theta)
    lower = 0.0
    upper = 0.0
    for i, p in enumerate(pw):
        if some_sat[i]:
            upper += p
            if all_sat[i]:
                lower += p
    return CredalBounds(lower, upper)


def conditional_flags(
    wm: WorldModels, q: Query, e: Query
) -> tuple[bytearray, bytearray, bytearray, bytearray]:
    """Per-world flags (all q∧e, some q∧e, all ¬q∧e, some ¬q∧e).

    ¬q of a conjunction is not itself a conjunction, so the complement
    flags are computed directly from per-model satisfaction.
    """
    q_pos, q_neg, q_possible = wm.query_masks(q)
    e_pos, e_neg, e_possible = wm.query_masks(e)
    n = len(wm.model_masks)
    flags = tuple(bytearray(n) for _ in range(4))
    all_qe_f, some_qe_f, all_nqe_f, some_nqe_f = flags
    for i, masks in enumerate(wm.model_masks):
        if not masks:
            raise InconsistentWorld(i, wm.world(i).selection)
        all_qe = all_nqe = True
        some_qe = some_nqe = False
        for m in masks:
            sat_e = e_possible and m & e_pos == e_pos and m & e_neg == 0
            sat_q = q_possible and m & q_pos == q_pos and m & q_neg == 0
            if sat_e and sat_q:
                some_qe = True
            else:
                all_qe = False
            if sat_e and not sat_q:
                some_nqe = True
            else:
                all_nqe = False
        all_qe_f[i] = all_qe and some_qe
        some_qe_f[i] = some_qe
        all_nqe_f[i] = all_nqe and some_nqe
        some_nqe_f[i] = some_nqe
    return flags


def _conditional_joints(
    program: Program, q: Query, e: Query, theta=None, cap: int | None = None
) -> tuple[float, float, float, float]:
    """(lowP(q,e), upP(q,e), lowP(¬q,e), upP(¬q,e))."""
    wm = world_models(program, cap)
    flags = conditional_flags(wm, q, e)
    pw = _world_probs(program, theta)
    return tuple(
        sum(p for i, p in enumerate(pw) if flag[i]) for flag in flags
    )


def conditional_from_joints(
    low_qe: float, up_qe: float, low_nqe: float, up_nqe: float, context: str = ""
) -> CredalBounds:
    """Conditional bounds from the four joint bounds, with the
    degenerate clauses: a zero lower denominator with positive joint
    upper forces the bound to 1 (resp. 0), and the conditional is
    undefined when both joint uppers vanish."""
    if up_qe == 0.0 and up_nqe == 0.0:
        raise UndefinedConditional(context)
    denom_low = low_qe + up_nqe
    if denom_low > 0.0:
        lower = low_qe / denom_low
    else:
        lower = 1.0  # up_qe > 0 here since the undefined case was excluded
    denom_up = up_qe + low_nqe
    if denom_up > 0.0:
        upper = up_qe / denom_up
    else:
        upper = 0.0  # up_nqe > 0 here
    return CredalBounds(lower, upper)


def credal_conditional(
    program: Program, q: Query, e: Query, theta=None, cap: int | None = None
) -> CredalBounds:
    """Conditional lower/upper probability of q given evidence e."""
    joints = _conditional_joints(program, q, e, theta, cap)
    return conditional_from_joints(*joints, context=f"{q} | {e}")


def check_consistency(program: Program, cap: int | None = None) -> int:
    """Number of worlds with no answer set (0 = semantics applies)."""
    wm = world_models(program, cap)
    return sum(1 for masks in wm.model_masks if not masks)
