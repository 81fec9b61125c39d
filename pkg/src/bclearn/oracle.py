"""Brute-force enumeration over all completions of a tiny dataset.

These routines are desk-scale ground truth: they expand every assignment
of the missing entries, compute the exact complete-data quantities per
completion with naive per-case loops (independent of the aggregated
tally path used by the estimators), and mix the results under a chosen
weighting of completions.  Costs are exponential in the number of
missing entries, so enumeration is refused beyond a cap.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import lgamma

import numpy as np

from .counts import ParentContext
from .data import MISSING, Dataset
from .estimate import PriorSpec

DEFAULT_CAP = 4096


class OracleError(ValueError):
    """Raised when enumeration would exceed the cap or inputs are invalid."""


@dataclass(frozen=True)
class CompletionEnumeration:
    """All completions of a dataset with their mixture weights."""

    datasets: tuple[Dataset, ...]
    weights: tuple[float, ...]
    policy: str


def _missing_positions(dataset: Dataset):
    rows, cols = np.nonzero(dataset.codes == MISSING)
    return list(zip(rows.tolist(), cols.tolist()))


def enumerate_datasets(
    dataset: Dataset,
    policy: str = "uniform",
    phi: dict | None = None,
    cap: int = DEFAULT_CAP,
) -> CompletionEnumeration:
    """Expand every completion of the missing entries.

    ``policy`` is "uniform" (equal weight per completion) or "phi", where
    ``phi`` maps variable names to per-state probability vectors and a
    completion's weight is the product over its filled entries.
    """
    positions = _missing_positions(dataset)
    cards = [dataset.variables[i].cardinality for _, i in positions]
    n_completions = math.prod(cards)
    if n_completions > cap:
        raise OracleError(
            f"{n_completions} completions exceeds the enumeration cap {cap}"
        )
    if policy == "phi":
        if phi is None:
            raise OracleError("policy 'phi' needs per-variable probability vectors")
        tables = []
        for (_, i), card in zip(positions, cards):
            name = dataset.variables[i].name
            if name not in phi or len(phi[name]) != card:
                raise OracleError(f"phi vector missing or mis-sized for {name!r}")
            tables.append([float(p) for p in phi[name]])
    elif policy == "uniform":
        tables = [[1.0 / card] * card for card in cards]
    else:
        raise OracleError(f"unknown weight policy {policy!r}")

    datasets = []
    weights = []
    for assignment in itertools.product(*(range(card) for card in cards)):
        codes = dataset.codes.copy()
        weight = 1.0
        for (row, col), state, table in zip(positions, assignment, tables):
            codes[row, col] = state
            weight *= table[state]
        datasets.append(Dataset(dataset.variables, codes))
        weights.append(weight)
    total = math.fsum(weights)
    if total <= 0:
        raise OracleError("completion weights sum to zero")
    weights = [w / total for w in weights]
    return CompletionEnumeration(tuple(datasets), tuple(weights), policy)


def _family_counts(codes: np.ndarray, ctx: ParentContext) -> np.ndarray:
    """Naive per-case (configuration, state) counts over complete family
    columns of a code matrix."""
    counts = np.zeros((ctx.n_configs, ctx.child_cardinality), dtype=np.int64)
    for row in codes:
        j = ctx.config_index([int(row[p]) for p in ctx.parents])
        counts[j, int(row[ctx.child])] += 1
    return counts


def exact_expectation(
    dataset: Dataset,
    ctx: ParentContext,
    prior: PriorSpec,
    policy: str = "uniform",
    phi: dict | None = None,
    cap: int = DEFAULT_CAP,
) -> np.ndarray:
    """Completion-weighted mixture of the exact posterior means per cell.

    The mixture is accumulated in exact rational arithmetic and rounded
    to float once per cell, so the result is comparable against interval
    endpoints without accumulation slack.  Missing entries outside the
    family weight every family completion identically, so only family
    columns are expanded (the cap still applies to the full dataset).
    """
    positions = _missing_positions(dataset)
    cards = [dataset.variables[i].cardinality for _, i in positions]
    if math.prod(cards) > cap:
        raise OracleError(
            f"{math.prod(cards)} completions exceeds the enumeration cap {cap}"
        )
    family = {ctx.child, *ctx.parents}
    in_family = [(pos, card) for pos, card in zip(positions, cards)
                 if pos[1] in family]

    if policy == "uniform":
        tables = [[Fraction(1, card)] * card for _, card in in_family]
    elif policy == "phi":
        if phi is None:
            raise OracleError("policy 'phi' needs per-variable probability vectors")
        tables = []
        for (_, col), card in in_family:
            name = dataset.variables[col].name
            if name not in phi or len(phi[name]) != card:
                raise OracleError(f"phi vector missing or mis-sized for {name!r}")
            tables.append([Fraction(float(p)) for p in phi[name]])
    else:
        raise OracleError(f"unknown weight policy {policy!r}")

    q, c = ctx.n_configs, ctx.child_cardinality
    alpha = [[Fraction(float(a)) for a in row] for row in prior.child_alpha]
    alpha_sums = [sum(row) for row in alpha]
    mixture = [[Fraction(0)] * c for _ in range(q)]
    total_weight = Fraction(0)
    codes = dataset.codes.copy()
    for assignment in itertools.product(*(range(card) for _, card in in_family)):
        weight = Fraction(1)
        for ((row, col), _), state, table in zip(in_family, assignment, tables):
            codes[row, col] = state
            weight *= table[state]
        counts = _family_counts(codes, ctx)
        total_weight += weight
        for j in range(q):
            n_j = int(counts[j].sum())
            for k in range(c):
                mixture[j][k] += weight * (alpha[j][k] + int(counts[j, k])) / (
                    alpha_sums[j] + n_j
                )
    out = np.empty((q, c))
    for j in range(q):
        for k in range(c):
            out[j, k] = float(mixture[j][k] / total_weight)
    return out


def _log_marginal_complete(dataset: Dataset, model, alpha: float) -> float:
    """Closed-form log marginal likelihood of a complete dataset, computed
    with its own counting loop so it can vouch for the main scorer."""
    total = 0.0
    cards = tuple(v.cardinality for v in model.variables)
    for child, parents in enumerate(model.parent_sets):
        ctx = ParentContext(
            child=child,
            parents=tuple(parents),
            child_cardinality=cards[child],
            parent_cardinalities=tuple(cards[p] for p in parents),
        )
        counts = _family_counts(dataset.codes, ctx)
        alpha_sum = alpha * cards[child]
        for j in range(ctx.n_configs):
            n_j = int(counts[j].sum())
            total += lgamma(alpha_sum) - lgamma(alpha_sum + n_j)
            for k in range(cards[child]):
                total += lgamma(alpha + int(counts[j, k])) - lgamma(alpha)
    return total


def exact_marginal(
    dataset: Dataset,
    model,
    alpha: float = 1.0,
    policy: str = "uniform",
    phi: dict | None = None,
    cap: int = DEFAULT_CAP,
) -> float:
    """Completion-weighted mixture of the complete-data marginal likelihood.

    Returned on the probability scale; desk-scale inputs only.
    """
    enumeration = enumerate_datasets(dataset, policy=policy, phi=phi, cap=cap)
    terms = [
        weight * math.exp(_log_marginal_complete(completed, model, alpha))
        for completed, weight in zip(enumeration.datasets, enumeration.weights)
    ]
    return math.fsum(terms)
