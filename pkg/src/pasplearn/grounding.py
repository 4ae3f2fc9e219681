"""Variable instantiation: from a program with variables to a ground one.

Grounding is relevance-filtered: variables only bind to atoms that are
bottom-up derivable (seeded by deterministic facts and probabilistic
atoms, iterated to fixpoint, treating negated literals as
always-possibly-true).  Atoms that can never be derived are false in
every stable model, so instances pruned this way cannot change the
answer sets; the property suite cross-checks this against a naive
full-instantiation grounder.

Body literals that are already ground are kept without a derivability
check, so grounding a ground program is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import HeadIsProbFact, UnsafeRule
from .model import Atom, Literal, Program, Rule, Term, is_variable


@dataclass(frozen=True, eq=False)
class GroundProgram:
    """Ground rules over a densely indexed relevant Herbrand base."""

    rules: tuple[Rule, ...]
    atoms: tuple[Atom, ...]
    atom_index: dict[Atom, int]
    prob_atom_ids: tuple[int, ...]

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)


def check_safety(rule: Rule) -> None:
    """Every head / negated-literal variable must occur in a positive literal."""
    bound: set[str] = set()
    for lit in rule.body:
        if lit.positive:
            bound |= lit.atom.variables()
    for var in sorted(rule.variables() - bound):
        raise UnsafeRule(rule, var)


def _match(pattern: Atom, fact: Atom, binding: dict[str, Term]) -> dict[str, Term] | None:
    """Extend ``binding`` to unify ``pattern`` with ground ``fact``, or None."""
    if pattern.functor != fact.functor or len(pattern.args) != len(fact.args):
        return None
    new = binding
    for p, f in zip(pattern.args, fact.args):
        if is_variable(p):
            seen = new.get(p)
            if seen is None:
                if new is binding:
                    new = dict(binding)
                new[p] = f
            elif seen != f:
                return None
        elif p != f:
            return None
    return new


def _instantiations(rule: Rule, derivable: tuple[Atom, ...]):
    """All bindings grounding ``rule`` by joining positive literals.

    Positive literals that are ground under the current partial binding
    are accepted unconditionally; only variable binding consults the
    derivable snapshot.
    """
    positive = [lit.atom for lit in rule.body if lit.positive]

    def walk(i: int, binding: dict[str, Term]):
        if i == len(positive):
            yield binding
            return
        pat = positive[i].substitute(binding)
        if pat.is_ground:
            yield from walk(i + 1, binding)
            return
        for fact in derivable:
            ext = _match(pat, fact, binding)
            if ext is not None:
                yield from walk(i + 1, ext)

    yield from walk(0, {})


def ground(program: Program) -> GroundProgram:
    """Instantiate all rules; deterministic output order.

    Raises :class:`UnsafeRule` for unsafe rules and
    :class:`HeadIsProbFact` if instantiation puts a probabilistic atom
    in a head position.
    """
    for rule in program.rules:
        check_safety(rule)

    prob_atoms = {pf.atom: None for pf in program.prob_facts}
    # Derivable overapproximation, insertion-ordered for determinism.
    derivable: dict[Atom, None] = dict(prob_atoms)
    for rule in program.rules:
        if rule.is_fact and rule.head.is_ground:
            derivable.setdefault(rule.head, None)

    ground_rules: dict[Rule, None] = {}
    changed = True
    while changed:
        changed = False
        # Snapshot: atoms discovered mid-pass join the next sweep.
        snapshot = tuple(derivable)
        for rule in program.rules:
            for binding in _instantiations(rule, snapshot):
                head = None if rule.head is None else rule.head.substitute(binding)
                body = tuple(lit.substitute(binding) for lit in rule.body)
                grule = Rule(head, body)
                if grule in ground_rules:
                    continue
                ground_rules[grule] = None
                changed = True
                if head is not None:
                    if head in prob_atoms:
                        raise HeadIsProbFact(
                            f"probabilistic atom {head} appears as a rule head"
                        )
                    if head not in derivable:
                        derivable[head] = None

    # Dense atom index: probabilistic atoms first (declaration order =
    # world bit order), then first appearance across the ground rules.
    atom_index: dict[Atom, int] = {}
    for atom in prob_atoms:
        atom_index[atom] = len(atom_index)
    for grule in ground_rules:
        if grule.head is not None and grule.head not in atom_index:
            atom_index[grule.head] = len(atom_index)
        for lit in grule.body:
            if lit.atom not in atom_index:
                atom_index[lit.atom] = len(atom_index)

    return GroundProgram(
        rules=tuple(ground_rules),
        atoms=tuple(atom_index),
        atom_index=atom_index,
        prob_atom_ids=tuple(range(len(prob_atoms))),
    )
