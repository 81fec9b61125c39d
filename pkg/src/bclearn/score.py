"""Log marginal-likelihood scores for families and whole models.

The local family score is the Gamma-function ratio of posterior to prior
Dirichlet normalizers.  With complete family data the posterior counts
are known and the score is exact; with incomplete data the posterior is
replaced by the moment-matched Dirichlet built from the bound-and-collapse
estimates, whose hyperparameters for a complete family reduce to the exact
posterior counts, so both paths agree there.

Scores are computed and kept in natural-log space throughout: the raw
products underflow by a thousand cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma

from .counts import CountTable, ParentContext, tally
from .data import Dataset
from .estimate import PriorSpec, bc_estimate


class ScoreError(ValueError):
    """Raised for scoring preconditions (incomplete family, cyclic model)."""


@dataclass(frozen=True)
class FamilyScore:
    child: int
    parents: tuple[int, ...]
    log_g: float
    exact: bool


@dataclass(frozen=True)
class ModelScore:
    families: tuple[FamilyScore, ...]

    @property
    def total(self) -> float:
        return sum(f.log_g for f in self.families)


def log_g_exact(table: CountTable, prior: PriorSpec) -> FamilyScore:
    """Closed-form family score; only defined when no incomplete case
    touches the family."""
    if not table.is_complete:
        raise ScoreError("exact score requires complete family data")
    ctx = table.context
    total = 0.0
    for j in range(ctx.n_configs):
        alpha_row = prior.child_alpha[j]
        alpha_sum = float(alpha_row.sum())
        obs = table.obs_row(j)
        n_j = int(obs.sum())
        total += lgamma(alpha_sum) - lgamma(alpha_sum + n_j)
        for k in range(ctx.child_cardinality):
            total += lgamma(float(alpha_row[k]) + int(obs[k])) - lgamma(
                float(alpha_row[k])
            )
    return FamilyScore(ctx.child, ctx.parents, total, exact=True)


def log_g_bc(
    table: CountTable, prior: PriorSpec, phi="mar", parent_phi=None
) -> FamilyScore:
    """Family score under the moment-matched posterior Dirichlet.

    Reduces to the exact score when the family data are complete.
    """
    ctx = table.context
    est = bc_estimate(table, prior, phi=phi, parent_phi=parent_phi)
    total = 0.0
    for j in range(ctx.n_configs):
        alpha_row = prior.child_alpha[j]
        total += lgamma(float(alpha_row.sum())) - lgamma(float(est.alpha_hat[j]))
        for k in range(ctx.child_cardinality):
            total += lgamma(float(est.dirichlet[j, k])) - lgamma(float(alpha_row[k]))
    return FamilyScore(ctx.child, ctx.parents, total, exact=table.is_complete)


def ensure_dag(parent_sets) -> list[int]:
    """Topological order of the variables, or ScoreError on a cycle."""
    n = len(parent_sets)
    remaining = {i: set(parent_sets[i]) for i in range(n)}
    order = []
    while remaining:
        roots = sorted(i for i, ps in remaining.items() if not ps)
        if not roots:
            raise ScoreError("model is not a DAG")
        for r in roots:
            del remaining[r]
            order.append(r)
        for ps in remaining.values():
            ps.difference_update(roots)
    return order


class FamilyScorer:
    """Scores (child, parent set) families over one dataset, with a memo
    cache keyed by the sorted parent set so identical queries are free."""

    def __init__(
        self,
        dataset: Dataset,
        alpha: float = 1.0,
        beta: float = 1.0,
        phi_policy: str = "mar",
    ):
        if phi_policy not in ("mar", "uniform"):
            raise ScoreError(f"unknown phi policy {phi_policy!r} for scoring")
        self.dataset = dataset
        self.alpha = alpha
        self.beta = beta
        self.phi_policy = phi_policy
        self._cache: dict[tuple[int, tuple[int, ...]], FamilyScore] = {}

    def _context(self, child: int, parents) -> ParentContext:
        return ParentContext.for_dataset(self.dataset, child, tuple(sorted(parents)))

    def prior_for(self, ctx: ParentContext) -> PriorSpec:
        return PriorSpec.uniform(ctx, alpha=self.alpha, beta=self.beta)

    def score(self, child: int, parents) -> FamilyScore:
        key = (child, tuple(sorted(parents)))
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        ctx = self._context(child, key[1])
        table = tally(self.dataset, ctx)
        result = log_g_bc(table, self.prior_for(ctx), phi=self.phi_policy)
        self._cache[key] = result
        return result

    def estimate(self, child: int, parents):
        """(ParentContext, CountTable, BcCellEstimate) for CPT extraction."""
        ctx = self._context(child, parents)
        table = tally(self.dataset, ctx)
        est = bc_estimate(table, self.prior_for(ctx), phi=self.phi_policy)
        return ctx, table, est


def log_marginal(
    model, dataset: Dataset, alpha: float = 1.0, beta: float = 1.0, phi: str = "mar"
) -> ModelScore:
    """Sum of family scores for a model; families with fully observed
    columns get the exact closed form automatically."""
    ensure_dag(model.parent_sets)
    scorer = FamilyScorer(dataset, alpha=alpha, beta=beta, phi_policy=phi)
    families = tuple(
        scorer.score(child, parents) for child, parents in enumerate(model.parent_sets)
    )
    return ModelScore(families)


def bayes_factor(
    model_1, model_2, dataset: Dataset,
    alpha: float = 1.0, beta: float = 1.0, phi: str = "mar",
) -> float:
    """Log Bayes factor of model_1 against model_2 under equal model priors."""
    s1 = log_marginal(model_1, dataset, alpha=alpha, beta=beta, phi=phi)
    s2 = log_marginal(model_2, dataset, alpha=alpha, beta=beta, phi=phi)
    return s1.total - s2.total
