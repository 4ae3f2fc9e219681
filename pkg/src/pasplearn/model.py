"""Core data model: atoms, rules, programs, worlds, interpretations.

A program is a set of probabilistic facts plus a normal logic program.
Each total choice over the probabilistic facts (a *world*) induces an
ordinary answer set program; credal bounds aggregate over worlds.

Conventions used throughout the package:

* Terms are strings or ints.  A string term starting with an uppercase
  letter or ``_`` is a variable; everything else is a constant.
* Worlds are numbered by reading the selection vector as a binary
  number, most-significant bit first: world ``i`` includes fact ``j``
  iff bit ``n-1-j`` of ``i`` is set.  World 0 is the empty selection,
  world ``2^n - 1`` includes every probabilistic fact.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterator, Union

from .errors import CapExceeded

Term = Union[str, int]

#: Default bound on the number of probabilistic facts for exhaustive
#: world enumeration; may be overridden via the PASP_WORLD_CAP
#: environment variable or an explicit ``cap=`` argument.
DEFAULT_WORLD_CAP = 24


def is_variable(term: Term) -> bool:
    return isinstance(term, str) and (term[:1].isupper() or term.startswith("_"))


def term_str(term: Term) -> str:
    return str(term)


@dataclass(frozen=True, order=True)
class Atom:
    functor: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.functor
        return f"{self.functor}({','.join(term_str(a) for a in self.args)})"

    @property
    def is_ground(self) -> bool:
        return not any(is_variable(a) for a in self.args)

    def variables(self) -> set[str]:
        return {a for a in self.args if is_variable(a)}

    def substitute(self, binding: dict[str, Term]) -> "Atom":
        if not self.args:
            return self
        return Atom(
            self.functor,
            tuple(binding.get(a, a) if is_variable(a) else a for a in self.args),
        )


@dataclass(frozen=True, order=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"not {self.atom}"

    def negate(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def substitute(self, binding: dict[str, Term]) -> "Literal":
        return Literal(self.atom.substitute(binding), self.positive)


@dataclass(frozen=True)
class Rule:
    """``head :- body``; ``head is None`` encodes an integrity constraint."""

    head: Atom | None
    body: tuple[Literal, ...] = ()

    def __str__(self) -> str:
        body = ", ".join(str(l) for l in self.body)
        if self.head is None:
            return f":- {body}."
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {body}."

    @property
    def is_fact(self) -> bool:
        return self.head is not None and not self.body

    def variables(self) -> set[str]:
        out: set[str] = set()
        if self.head is not None:
            out |= self.head.variables()
        for lit in self.body:
            out |= lit.atom.variables()
        return out


def format_prob(p: float) -> str:
    """Shortest fixed-point decimal that round-trips to ``p``.

    The program grammar has no scientific notation, so serialization
    must avoid ``repr`` styles like ``1e-05``.
    """
    for prec in range(1, 18):
        s = f"{p:.{prec}f}"
        if float(s) == p:
            return s
    # Tiny values need more places than any fixed precision; the exact
    # binary expansion always round-trips.
    return format(Decimal(p), "f")


@dataclass(frozen=True)
class ProbFact:
    """A ground probabilistic fact ``p::atom`` with optional learnable flag."""

    atom: Atom
    prob: float
    learnable: bool = False

    def __str__(self) -> str:
        if self.learnable:
            return f"learnable({format_prob(self.prob)})::{self.atom}."
        return f"{format_prob(self.prob)}::{self.atom}."


@dataclass(frozen=True)
class Program:
    """Probabilistic facts (declaration order) plus normal rules."""

    prob_facts: tuple[ProbFact, ...]
    rules: tuple[Rule, ...]

    def __str__(self) -> str:
        lines = [str(pf) for pf in self.prob_facts]
        lines += [str(r) for r in self.rules]
        return "\n".join(lines)

    @property
    def n_prob_facts(self) -> int:
        return len(self.prob_facts)

    def learnable_indices(self) -> tuple[int, ...]:
        """Indices into ``prob_facts`` of learnable facts, declaration order."""
        return tuple(j for j, pf in enumerate(self.prob_facts) if pf.learnable)

    def learnable_facts(self) -> tuple[ProbFact, ...]:
        return tuple(pf for pf in self.prob_facts if pf.learnable)

    def initial_theta(self) -> tuple[float, ...]:
        return tuple(pf.prob for pf in self.prob_facts if pf.learnable)

    def with_theta(self, theta) -> "Program":
        """Copy of the program with learnable probabilities replaced."""
        theta = tuple(float(t) for t in theta)
        idx = self.learnable_indices()
        if len(theta) != len(idx):
            raise ValueError(f"expected {len(idx)} parameters, got {len(theta)}")
        facts = list(self.prob_facts)
        for t, j in zip(theta, idx):
            facts[j] = ProbFact(facts[j].atom, t, learnable=True)
        return Program(tuple(facts), self.rules)


@dataclass(frozen=True)
class World:
    """One total choice: ``selection[j] = 1`` iff fact ``j`` is included."""

    index: int
    selection: tuple[int, ...]

    def included(self, j: int) -> bool:
        return self.selection[j] == 1


def world_cap(cap: int | None = None) -> int:
    """Effective world cap: explicit arg, else PASP_WORLD_CAP, else default."""
    if cap is not None:
        return cap
    env = os.environ.get("PASP_WORLD_CAP")
    if env is not None:
        return int(env)
    return DEFAULT_WORLD_CAP


def enumerate_worlds(program: Program, cap: int | None = None) -> Iterator[World]:
    """All 2^n total choices, ordered by index (binary counting, MSB first)."""
    n = program.n_prob_facts
    eff = world_cap(cap)
    if n > eff:
        raise CapExceeded(n, eff)
    for i in range(1 << n):
        sel = tuple((i >> (n - 1 - j)) & 1 for j in range(n))
        yield World(i, sel)


def world_probability(program: Program, world: World, theta=None) -> float:
    """Product measure of one world.

    ``theta`` optionally overrides the learnable probabilities (in
    declaration order of the learnable facts).
    """
    probs = [pf.prob for pf in program.prob_facts]
    if theta is not None:
        for t, j in zip(theta, program.learnable_indices()):
            probs[j] = float(t)
    p = 1.0
    for j, pj in enumerate(probs):
        p *= pj if world.selection[j] else 1.0 - pj
    return p


@dataclass(frozen=True)
class Interpretation:
    """A partial interpretation: a consistent set of ground literals."""

    literals: tuple[Literal, ...]

    def __str__(self) -> str:
        return ",".join(str(l) for l in self.literals) + "."

    def __len__(self) -> int:
        return len(self.literals)


@dataclass(frozen=True)
class Query:
    """A conjunction of ground literals, split by sign and sorted."""

    positives: tuple[Atom, ...] = ()
    negatives: tuple[Atom, ...] = ()

    def __str__(self) -> str:
        parts = [str(a) for a in self.positives]
        parts += [f"not {a}" for a in self.negatives]
        return ",".join(parts)

    @property
    def atoms(self) -> tuple[Atom, ...]:
        return self.positives + self.negatives

    def negated_atom(self) -> "Query":
        """Complement of a single-atom query (used for conditionals)."""
        if len(self.positives) == 1 and not self.negatives:
            return Query((), self.positives)
        if len(self.negatives) == 1 and not self.positives:
            return Query(self.negatives, ())
        raise ValueError("negation is only defined for single-literal queries")

    def conjoin(self, other: "Query") -> "Query":
        pos = set(self.positives) | set(other.positives)
        neg = set(self.negatives) | set(other.negatives)
        if pos & neg:
            raise ValueError(f"contradictory conjunction on {sorted(pos & neg)}")
        return Query(
            tuple(sorted(pos, key=str)),
            tuple(sorted(neg, key=str)),
        )


def query_from_literals(literals) -> Query:
    pos = sorted({l.atom for l in literals if l.positive}, key=str)
    neg = sorted({l.atom for l in literals if not l.positive}, key=str)
    return Query(tuple(pos), tuple(neg))


def interpretation_query(interp: Interpretation) -> Query:
    """The conjunctive query asserting every literal of the interpretation."""
    return query_from_literals(interp.literals)
