"""Bound-and-collapse posterior estimation for one family.

For each parent configuration the observed counts pin down an interval
of posterior means consistent with the possible completions of the
incomplete cases: the upper bound assigns every consistent completion
to the cell itself, each lower extreme assigns them all to one rival
state.  The interval is then collapsed to a point by mixing the extremes
with the completion-probability vector phi, and the posterior precision
is estimated by distributing parent-incomplete cases according to a
bound-and-collapse estimate of the parent configuration probabilities.

All cell values are exact ratios of integers: hyperparameters are scaled
to a common integer grid (floats convert exactly), counts are integers,
and each output is produced by a single correctly rounded integer
division.  This keeps the algebraic identities of the method (rows
summing to one, exact reduction on complete data, the prior-mean limit
under total missingness, conservation of total precision) true up to one
rounding, so downstream checks can compare against closed forms without
tolerance for accumulation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .counts import CountTable, ParentContext

ROW_SUM_TOLERANCE = 1e-12


class EstimateError(ValueError):
    """Raised for invalid priors or completion distributions."""


@dataclass(frozen=True)
class PriorSpec:
    """Dirichlet hyperparameters for the child cells and parent configurations.

    ``child_alpha[j][k]`` weights imaginary cases per cell; ``parent_beta[j]``
    is a separate Dirichlet over parent configurations used only for the
    precision estimate.  All values must be strictly positive.
    """

    child_alpha: np.ndarray
    parent_beta: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.child_alpha, dtype=float)
        beta = np.asarray(self.parent_beta, dtype=float)
        if alpha.ndim != 2 or beta.ndim != 1 or alpha.shape[0] != beta.shape[0]:
            raise EstimateError("child_alpha must be (q, c) and parent_beta (q,)")
        if not (alpha > 0).all() or not (beta > 0).all():
            raise EstimateError("hyperparameters must be strictly positive")
        object.__setattr__(self, "child_alpha", alpha)
        object.__setattr__(self, "parent_beta", beta)

    @classmethod
    def uniform(
        cls, ctx: ParentContext, alpha: float = 1.0, beta: float = 1.0
    ) -> "PriorSpec":
        q, c = ctx.n_configs, ctx.child_cardinality
        return cls(np.full((q, c), alpha), np.full(q, beta))


@dataclass(frozen=True)
class CompletionDistribution:
    """Per-configuration probabilities that an incomplete case completes
    to each child state.  ``source`` is one of {"mar", "uniform", "user"}."""

    phi: np.ndarray
    source: str

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        if phi.ndim != 2:
            raise EstimateError("phi must be a (q, c) matrix")
        if (phi < 0).any() or (phi > 1).any():
            raise EstimateError("phi entries must lie in [0, 1]")
        sums = phi.sum(axis=1)
        if np.abs(sums - 1.0).max() > ROW_SUM_TOLERANCE:
            raise EstimateError("each phi row must sum to 1 within 1e-12")
        object.__setattr__(self, "phi", phi)


@dataclass(frozen=True)
class ProbabilityBounds:
    """Upper bounds and the full matrix of per-rival lower extremes.

    ``p_lmin[j, l, k]`` is the probability of state k when every completion
    consistent with configuration j is assigned to state l; the lower bound
    is the minimum over l.
    """

    p_max: np.ndarray
    p_lmin: np.ndarray

    @property
    def p_min(self) -> np.ndarray:
        return self.p_lmin.min(axis=1)


@dataclass(frozen=True)
class BcCellEstimate:
    """Collapsed estimates, bounds, precision and the matched Dirichlet."""

    p_hat: np.ndarray
    p_min: np.ndarray
    p_max: np.ndarray
    alpha_hat: np.ndarray
    dirichlet: np.ndarray
    renormalized_rows: int = 0


def _integer_grid(values) -> tuple[list[int], int]:
    """Represent floats exactly as integers over one common denominator."""
    out = []
    for v in values:
        f = float(v)
        if not f.is_integer():
            break
        out.append(int(f))
    else:
        return out, 1
    fractions = [Fraction(v) if not isinstance(v, Fraction) else v for v in values]
    scale = 1
    for f in fractions:
        scale = scale * f.denominator // math.gcd(scale, f.denominator)
    return [int(f * scale) for f in fractions], scale


class _FamilyInts:
    """Integer view of one family's priors and counts.

    Hyperparameters are brought onto the grid ``scale`` (1 for the default
    integer priors); counts are multiplied by the same grid so that every
    derived quantity is an exact integer ratio.
    """

    def __init__(self, table: CountTable, prior: PriorSpec):
        self.table = table
        ctx = table.context
        self.q, self.c = ctx.n_configs, ctx.child_cardinality
        flat, self.scale = _integer_grid(prior.child_alpha.reshape(-1))
        self.alpha = [
            flat[j * self.c:(j + 1) * self.c] for j in range(self.q)
        ]

    def row(self, j: int):
        """(a, nstar, b) where a[k] = alpha_k + n_k and b = alpha_j + n_j,
        all on the integer grid."""
        obs = self.table.obs_row(j)
        comp = self.table.comp_row(j)
        a = [self.alpha[j][k] + self.scale * int(obs[k]) for k in range(self.c)]
        nstar = [self.scale * int(v) for v in comp]
        return a, nstar, sum(a)


def _normalized_int_row(row) -> tuple[list[int], int]:
    """Exactly normalized probability row as integers over its own sum."""
    nums, _ = _integer_grid(row)
    total = sum(nums)
    if total <= 0 or any(n < 0 for n in nums):
        raise EstimateError("cannot normalize row to a probability vector")
    return nums, total


def _collapse_ints(a, nstar, b, phi_num, phi_den) -> tuple[list[int], int]:
    """Collapsed estimates for one configuration as (numerators, denominator).

    a[k] is the prior-plus-observed weight of state k, b their sum, nstar[k]
    the completion count, phi the exactly normalized mixing row.  The mixed
    lower extremes for state k factor as a_k * sum_{l != k} phi_l/(b+nstar_l),
    so one cofactor per state serves the whole row; the common denominator
    is phi_den * prod_l (b + nstar_l).
    """
    c = len(a)
    if not any(nstar):
        return list(a), b
    d = [b + nstar[l] for l in range(c)]
    product = 1
    for dl in d:
        product *= dl
    cofactor = [product // dl for dl in d]
    tails = sum(phi_num[l] * cofactor[l] for l in range(c))
    nums = [
        a[k] * (tails - phi_num[k] * cofactor[k])
        + phi_num[k] * (a[k] + nstar[k]) * cofactor[k]
        for k in range(c)
    ]
    return nums, phi_den * product


def _phi_int_rows(ints: _FamilyInts, policy):
    """Exactly normalized phi rows as (numerators, denominator) pairs."""
    if isinstance(policy, CompletionDistribution):
        return [_normalized_int_row(policy.phi[j]) for j in range(ints.q)]
    if policy == "mar":
        rows = []
        for j in range(ints.q):
            a, _, b = ints.row(j)
            rows.append((a, b))
        return rows
    if policy == "uniform":
        return [([1] * ints.c, ints.c) for _ in range(ints.q)]
    raise EstimateError(f"unknown phi policy {policy!r}")


def phi_mar(table: CountTable, prior: PriorSpec) -> CompletionDistribution:
    """Completion probabilities assuming the observed part is representative:
    the posterior mean of the child given only fully observed cases."""
    ints = _FamilyInts(table, prior)
    phi = np.empty((ints.q, ints.c))
    for j in range(ints.q):
        a, _, b = ints.row(j)
        phi[j] = [a_k / b for a_k in a]
    return CompletionDistribution(phi, source="mar")


def phi_uniform(ctx: ParentContext) -> CompletionDistribution:
    """Every completion equally likely: 1/c per state."""
    q, c = ctx.n_configs, ctx.child_cardinality
    return CompletionDistribution(np.full((q, c), 1.0 / c), source="uniform")


def phi_from_rows(ctx: ParentContext, rows: dict[str, list[float]],
                  variables=None) -> CompletionDistribution:
    """Build a user-supplied phi from {configuration label: probability row}."""
    q, c = ctx.n_configs, ctx.child_cardinality
    phi = np.empty((q, c))
    seen = set()
    for j in range(q):
        label = ctx.config_label(j, variables)
        if label not in rows:
            raise EstimateError(f"phi table is missing configuration {label!r}")
        row = rows[label]
        if len(row) != c:
            raise EstimateError(
                f"phi row for {label!r} has {len(row)} entries, expected {c}"
            )
        phi[j] = row
        seen.add(label)
    extra = set(rows) - seen
    if extra:
        raise EstimateError(f"phi table has unknown configurations: {sorted(extra)}")
    return CompletionDistribution(phi, source="user")


def bounds(table: CountTable, prior: PriorSpec) -> ProbabilityBounds:
    """Interval endpoints for every cell of the family."""
    ints = _FamilyInts(table, prior)
    p_max = np.empty((ints.q, ints.c))
    p_lmin = np.empty((ints.q, ints.c, ints.c))
    for j in range(ints.q):
        a, nstar, b = ints.row(j)
        for k in range(ints.c):
            p_max[j, k] = (a[k] + nstar[k]) / (b + nstar[k])
            for l in range(ints.c):
                p_lmin[j, l, k] = a[k] / (b + nstar[l])
    return ProbabilityBounds(p_max=p_max, p_lmin=p_lmin)


def collapse(table: CountTable, prior: PriorSpec, phi) -> np.ndarray:
    """Collapse the bounds to point estimates with completion weights phi
    (a CompletionDistribution, or "mar"/"uniform")."""
    ints = _FamilyInts(table, prior)
    phi_rows = _phi_int_rows(ints, phi)
    p_hat = np.empty((ints.q, ints.c))
    for j in range(ints.q):
        a, nstar, b = ints.row(j)
        nums, den = _collapse_ints(a, nstar, b, *phi_rows[j])
        p_hat[j] = [n / den for n in nums]
    return p_hat


def _parent_p_hat_ints(table: CountTable, prior: PriorSpec, parent_phi=None):
    """Collapsed parent-configuration probabilities as (numerators, den)."""
    q = table.context.n_configs
    beta, scale = _integer_grid(prior.parent_beta)
    a = [beta[j] + scale * table.parent_obs(j) for j in range(q)]
    nstar = [scale * table.parent_comp(j) for j in range(q)]
    b = sum(a)
    if parent_phi is None:
        phi_num, phi_den = a, b
    else:
        if len(parent_phi) != q:
            raise EstimateError("parent phi must have one entry per configuration")
        phi_num, phi_den = _normalized_int_row(parent_phi)
    return _collapse_ints(a, nstar, b, phi_num, phi_den)


def _precision_ints(
    table: CountTable, prior: PriorSpec, parent_phi=None, ints=None
):
    """Posterior precision per configuration as (numerators, denominator)."""
    q = table.context.n_configs
    p_num, p_den = _parent_p_hat_ints(table, prior, parent_phi)
    spare = table.parent_incomplete_cases
    if ints is None:
        ints = _FamilyInts(table, prior)
    scale = ints.scale
    nums = [
        (sum(ints.alpha[j]) + scale * table.parent_obs(j)) * p_den
        + scale * spare * p_num[j]
        for j in range(q)
    ]
    return nums, scale * p_den


def precision(table: CountTable, prior: PriorSpec, parent_phi=None) -> np.ndarray:
    """Estimated posterior precision per parent configuration.

    Fully parent-observed cases update their configuration exactly; the
    remainder is shared out in proportion to the collapsed estimate of the
    configuration probabilities, so the total precision gained is exactly
    the number of cases.
    """
    nums, den = _precision_ints(table, prior, parent_phi)
    return np.asarray([n / den for n in nums])


def bc_estimate(
    table: CountTable,
    prior: PriorSpec,
    phi="mar",
    parent_phi=None,
) -> BcCellEstimate:
    """Full per-family estimate: bounds, collapsed means, precision and the
    moment-matched Dirichlet hyperparameters alpha_hat * p_hat."""
    ints = _FamilyInts(table, prior)
    q, c = ints.q, ints.c
    phi_rows = _phi_int_rows(ints, phi)
    alpha_hat_num, alpha_hat_den = _precision_ints(table, prior, parent_phi, ints)

    p_hat = np.empty((q, c))
    p_max = np.empty((q, c))
    p_min = np.empty((q, c))
    dirichlet = np.empty((q, c))
    renormalized = 0
    for j in range(q):
        a, nstar, b = ints.row(j)
        nstar_top = max(nstar)
        nums, den = _collapse_ints(a, nstar, b, *phi_rows[j])
        dir_den = den * alpha_hat_den
        for k in range(c):
            p_hat[j, k] = nums[k] / den
            p_max[j, k] = (a[k] + nstar[k]) / (b + nstar[k])
            p_min[j, k] = a[k] / (b + nstar_top)
            dirichlet[j, k] = nums[k] * alpha_hat_num[j] / dir_den
        drift = abs(p_hat[j].sum() - 1.0)
        if drift > ROW_SUM_TOLERANCE:
            p_hat[j] /= p_hat[j].sum()
            renormalized += 1
    return BcCellEstimate(
        p_hat=p_hat,
        p_min=p_min,
        p_max=p_max,
        alpha_hat=np.asarray([n / alpha_hat_den for n in alpha_hat_num]),
        dirichlet=dirichlet,
        renormalized_rows=renormalized,
    )
