"""Shared oracles and formula generators for the test suite."""

import random

import pytest
from hypothesis import strategies as st

from symdel.language import (
    BOT,
    TOP,
    And,
    Atom,
    Bot,
    Box,
    Iff,
    Implies,
    Not,
    Or,
    Top,
)


def bf_truth(formula, true_set):
    """Independent truth evaluation of a belief-free formula.

    Recursive over the AST against a set of true atom names; used as
    the oracle for the boolean-function engine and the compiler.
    """
    match formula:
        case Top():
            return True
        case Bot():
            return False
        case Atom(name):
            return name in true_set
        case Not(body):
            return not bf_truth(body, true_set)
        case And(parts):
            return all(bf_truth(p, true_set) for p in parts)
        case Or(parts):
            return any(bf_truth(p, true_set) for p in parts)
        case Implies(a, b):
            return not bf_truth(a, true_set) or bf_truth(b, true_set)
        case Iff(a, b):
            return bf_truth(a, true_set) == bf_truth(b, true_set)
        case _:
            raise TypeError(f"not a boolean formula: {formula!r}")


def truth_table(formula, atoms):
    """Tuple of values over all assignments, in binary counting order."""
    atoms = list(atoms)
    rows = []
    for k in range(2 ** len(atoms)):
        row = {a for j, a in enumerate(atoms) if (k >> (len(atoms) - 1 - j)) & 1}
        rows.append(bf_truth(formula, row))
    return tuple(rows)


def random_boolean_formula(rng: random.Random, atoms, depth: int):
    if depth == 0 or rng.random() < 0.3:
        roll = rng.random()
        if roll < 0.1:
            return TOP
        if roll < 0.2:
            return BOT
        return Atom(rng.choice(atoms))
    k = rng.randrange(5)
    if k == 0:
        return Not(random_boolean_formula(rng, atoms, depth - 1))
    a = random_boolean_formula(rng, atoms, depth - 1)
    b = random_boolean_formula(rng, atoms, depth - 1)
    if k == 1:
        return And((a, b))
    if k == 2:
        return Or((a, b))
    if k == 3:
        return Implies(a, b)
    return Iff(a, b)


def boolean_formulas(atoms, max_depth=4):
    """Hypothesis strategy for belief-free formulas over the given atoms."""
    leaves = st.one_of(
        st.just(TOP),
        st.just(BOT),
        st.sampled_from([Atom(a) for a in atoms]),
    )

    def extend(children):
        return st.one_of(
            children.map(Not),
            st.tuples(children, children).map(And),
            st.tuples(children, children).map(Or),
            st.tuples(children, children).map(lambda ab: Implies(*ab)),
            st.tuples(children, children).map(lambda ab: Iff(*ab)),
        )

    return st.recursive(leaves, extend, max_leaves=2 ** max_depth)


def epistemic_formulas(atoms, agents, max_depth=4):
    """Hypothesis strategy for formulas with belief operators."""
    leaves = st.one_of(
        st.just(TOP),
        st.just(BOT),
        st.sampled_from([Atom(a) for a in atoms]),
    )

    def extend(children):
        return st.one_of(
            children.map(Not),
            st.tuples(children, children).map(And),
            st.tuples(children, children).map(Or),
            st.tuples(children, children).map(lambda ab: Implies(*ab)),
            st.tuples(children, children).map(lambda ab: Iff(*ab)),
            st.tuples(st.sampled_from(list(agents)), children).map(
                lambda pair: Box(*pair)
            ),
        )

    return st.recursive(leaves, extend, max_leaves=2 ** max_depth)


@pytest.fixture
def engine():
    from symdel.boolfun import Engine

    return Engine()
