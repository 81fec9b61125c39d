"""Shared builders for the test suite."""

import numpy as np

from bclearn import MISSING, Dataset, Variable


def make_dataset(cards, rows, names=None):
    """Dataset from explicit state-index rows; -1 marks a missing entry."""
    variables = tuple(
        Variable(
            names[i] if names else f"X{i + 1}",
            tuple(str(s + 1) for s in range(card)),
        )
        for i, card in enumerate(cards)
    )
    codes = np.asarray(rows, dtype=np.int16).reshape(len(rows), len(cards))
    return Dataset(variables, codes)


def five_case_db() -> Dataset:
    """The worked five-case binary example used across the suite.

    Case entries (1-based states, ? missing):
        (1,2,2) (2,?,1) (?,1,2) (?,?,1) (1,?,?)
    """
    return make_dataset(
        (2, 2, 2),
        [
            [0, 1, 1],
            [1, MISSING, 0],
            [MISSING, 0, 1],
            [MISSING, MISSING, 0],
            [0, MISSING, MISSING],
        ],
    )


FIVE_CASE_CSV = "X1,X2,X3\n1,2,2\n2,?,1\n?,1,2\n?,?,1\n1,?,?\n"


def random_complete(rng, max_vars=4, max_card=3, max_cases=50) -> Dataset:
    n_vars = int(rng.integers(1, max_vars + 1))
    cards = [int(rng.integers(2, max_card + 1)) for _ in range(n_vars)]
    n = int(rng.integers(0, max_cases + 1))
    rows = np.column_stack(
        [rng.integers(0, card, size=n) for card in cards]
    ).astype(np.int16) if n else np.zeros((0, n_vars), dtype=np.int16)
    return make_dataset(cards, rows)


def punch_holes(rng, dataset: Dataset, n_holes: int) -> Dataset:
    """Mask n distinct entries chosen uniformly."""
    codes = dataset.codes.copy()
    total = codes.size
    positions = rng.choice(total, size=min(n_holes, total), replace=False)
    codes.reshape(-1)[positions] = MISSING
    return Dataset(dataset.variables, codes)


def random_incomplete(rng, max_vars=3, max_card=3, max_cases=6, max_completions=1024):
    """Tiny dataset with a few holes, enumeration kept under the cap."""
    while True:
        base = random_complete(rng, max_vars, max_card, max_cases)
        if base.n_cases == 0:
            continue
        n_holes = int(rng.integers(1, min(7, base.codes.size + 1)))
        dataset = punch_holes(rng, base, n_holes)
        product = 1
        for row, col in zip(*np.nonzero(dataset.codes == MISSING)):
            product *= dataset.variables[col].cardinality
        if 1 < product <= max_completions:
            return dataset
