"""Order-constrained greedy structure search and exhaustive enumeration.

The search requires a total order on the variables: a node's candidate
parents are exactly its predecessors in the order, which makes every
explored graph acyclic by construction.  Parents are added one at a time,
keeping the single candidate that most increases the family score, and a
node stops as soon as no candidate strictly improves it.  Ties between
equal-scoring candidates go to the candidate earliest in the order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, Variable
from .score import FamilyScorer, ModelScore, ensure_dag


class SearchError(ValueError):
    """Raised for invalid orders or enumeration beyond the cap."""


@dataclass(frozen=True)
class Model:
    """A DAG over the dataset's variables, with optional CPTs and score.

    ``parent_sets[i]`` lists the parent indices of variable i (sorted);
    ``cpts[i]`` is the (configurations x states) conditional table of
    variable i given its parents, rows in configuration-index order.
    """

    variables: tuple[Variable, ...]
    parent_sets: tuple[tuple[int, ...], ...]
    cpts: tuple[np.ndarray, ...] | None = None
    score: ModelScore | None = None

    def __post_init__(self):
        object.__setattr__(
            self,
            "parent_sets",
            tuple(tuple(sorted(ps)) for ps in self.parent_sets),
        )
        n = len(self.variables)
        if len(self.parent_sets) != n:
            raise SearchError("one parent set per variable required")
        for child, ps in enumerate(self.parent_sets):
            if child in ps:
                raise SearchError("a variable cannot be its own parent")
            if any(not 0 <= p < n for p in ps):
                raise SearchError("parent index out of range")
        ensure_dag(self.parent_sets)

    @property
    def arcs(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            (p, child)
            for child, ps in enumerate(self.parent_sets)
            for p in ps
        )

    def named_arcs(self) -> list[tuple[str, str]]:
        return [
            (self.variables[p].name, self.variables[c].name) for p, c in self.arcs
        ]


@dataclass(frozen=True)
class OrderConstraint:
    """A total order (ancestors first) plus an optional parent-count cap."""

    order: tuple[int, ...]
    max_parents: int | None = None

    def validate(self, n_variables: int) -> None:
        if sorted(self.order) != list(range(n_variables)):
            raise SearchError("order must be a permutation of all variables")
        if self.max_parents is not None and self.max_parents < 0:
            raise SearchError("max_parents must be nonnegative")

    @classmethod
    def from_names(
        cls, dataset: Dataset, names, max_parents: int | None = None
    ) -> "OrderConstraint":
        indices = tuple(dataset.variable_index(name) for name in names)
        constraint = cls(indices, max_parents)
        constraint.validate(dataset.n_variables)
        return constraint


@dataclass(frozen=True)
class EnumeratedModel:
    model: Model
    log_marginal: float
    posterior: float


def _finalize(dataset: Dataset, parent_sets, scorer: FamilyScorer) -> Model:
    """Attach CPTs (collapsed estimates) and the model score."""
    families = tuple(
        scorer.score(child, parents) for child, parents in enumerate(parent_sets)
    )
    cpts = []
    for child, parents in enumerate(parent_sets):
        _, _, est = scorer.estimate(child, parents)
        cpts.append(est.p_hat)
    return Model(
        variables=dataset.variables,
        parent_sets=tuple(parent_sets),
        cpts=tuple(cpts),
        score=ModelScore(families),
    )


def k2_bc(
    dataset: Dataset,
    order: OrderConstraint,
    alpha: float = 1.0,
    beta: float = 1.0,
    phi: str = "mar",
    scorer: FamilyScorer | None = None,
) -> Model:
    """Greedy parent selection per node, driven by the estimated family score."""
    order.validate(dataset.n_variables)
    if scorer is None:
        scorer = FamilyScorer(dataset, alpha=alpha, beta=beta, phi_policy=phi)
    parent_sets: list[tuple[int, ...]] = [()] * dataset.n_variables
    for position, child in enumerate(order.order):
        predecessors = order.order[:position]
        parents: list[int] = []
        current = scorer.score(child, parents).log_g
        while True:
            if order.max_parents is not None and len(parents) >= order.max_parents:
                break
            best_candidate = None
            best_score = -math.inf
            for candidate in predecessors:
                if candidate in parents:
                    continue
                trial = scorer.score(child, parents + [candidate]).log_g
                if trial > best_score:
                    best_candidate, best_score = candidate, trial
            if best_candidate is None or not best_score > current:
                break
            parents.append(best_candidate)
            current = best_score
        parent_sets[child] = tuple(sorted(parents))
    return _finalize(dataset, parent_sets, scorer)


def enumerate_models(
    dataset: Dataset,
    order: OrderConstraint,
    alpha: float = 1.0,
    beta: float = 1.0,
    phi: str = "mar",
    cap: int = 1024,
) -> list[EnumeratedModel]:
    """Score every model consistent with the order, best first, with
    posterior probabilities under a uniform prior over the enumerated set."""
    order.validate(dataset.n_variables)
    n_models = 1
    for position in range(len(order.order)):
        n_models *= 2 ** position
        if n_models > cap:
            raise SearchError(
                f"{n_models}+ models consistent with the order exceeds cap {cap}"
            )
    scorer = FamilyScorer(dataset, alpha=alpha, beta=beta, phi_policy=phi)

    choices_per_child: dict[int, list[tuple[int, ...]]] = {}
    for position, child in enumerate(order.order):
        predecessors = order.order[:position]
        subsets = []
        for r in range(len(predecessors) + 1):
            subsets.extend(
                tuple(sorted(combo))
                for combo in itertools.combinations(predecessors, r)
            )
        choices_per_child[child] = subsets

    children = sorted(choices_per_child)
    scored = []
    for combo in itertools.product(*(choices_per_child[c] for c in children)):
        parent_sets = [()] * dataset.n_variables
        for child, parents in zip(children, combo):
            parent_sets[child] = parents
        families = tuple(
            scorer.score(child, parents)
            for child, parents in enumerate(parent_sets)
        )
        score = ModelScore(families)
        model = Model(dataset.variables, tuple(parent_sets), score=score)
        scored.append((score.total, model))

    best = max(total for total, _ in scored)
    weights = [math.exp(total - best) for total, _ in scored]
    normalizer = sum(weights)
    results = [
        EnumeratedModel(model, total, weight / normalizer)
        for (total, model), weight in zip(scored, weights)
    ]
    results.sort(key=lambda em: (-em.log_marginal, em.model.arcs))
    return results


def model_from_arcs(variables, arcs) -> Model:
    """Structure-only model from (parent name, child name) pairs."""
    variables = tuple(variables)
    index = {v.name: i for i, v in enumerate(variables)}
    parent_sets = [set() for _ in variables]
    for parent, child in arcs:
        if parent not in index or child not in index:
            raise SearchError(f"arc ({parent!r}, {child!r}) names unknown variable")
        parent_sets[index[child]].add(index[parent])
    return Model(variables, tuple(tuple(sorted(ps)) for ps in parent_sets))


def model_to_json(model: Model) -> dict:
    """JSON form: variables, arcs, CPT rows keyed by parent-state labels,
    and the score breakdown when present."""
    data: dict = {
        "variables": [
            {"name": v.name, "states": list(v.states)} for v in model.variables
        ],
        "arcs": [[p, c] for p, c in model.named_arcs()],
    }
    if model.cpts is not None:
        cards = tuple(v.cardinality for v in model.variables)
        cpts = {}
        for child, parents in enumerate(model.parent_sets):
            rows = {}
            for j in range(model.cpts[child].shape[0]):
                states = []
                jj = j
                for card in reversed([cards[p] for p in parents]):
                    states.append(jj % card)
                    jj //= card
                states.reverse()
                label = ",".join(
                    model.variables[p].states[s] for p, s in zip(parents, states)
                )
                rows[label] = [float(x) for x in model.cpts[child][j]]
            cpts[model.variables[child].name] = rows
        data["cpts"] = cpts
    if model.score is not None:
        data["score"] = {
            "total_log_marginal": model.score.total,
            "families": [
                {
                    "child": model.variables[f.child].name,
                    "parents": [model.variables[p].name for p in f.parents],
                    "log_g": f.log_g,
                    "exact": f.exact,
                }
                for f in model.score.families
            ],
        }
    return data


def model_from_json(data: dict, variables=None) -> Model:
    """Rebuild a structure from its JSON form.  When ``variables`` is given
    (typically from the dataset being scored) the file's arcs are mapped
    onto them; otherwise the file must carry its own variable list."""
    if variables is None:
        try:
            variables = tuple(
                Variable(v["name"], tuple(str(s) for s in v["states"]))
                for v in data["variables"]
            )
        except (KeyError, TypeError) as exc:
            raise SearchError(f"model JSON lacks a variable list: {exc}") from exc
    arcs = [(str(p), str(c)) for p, c in data.get("arcs", [])]
    return model_from_arcs(variables, arcs)


def model_to_dot(model: Model) -> str:
    lines = ["digraph model {"]
    for v in model.variables:
        lines.append(f'  "{v.name}";')
    for parent, child in model.named_arcs():
        lines.append(f'  "{parent}" -> "{child}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def joint_distribution(model: Model) -> np.ndarray:
    """Exact joint probability table of a fully parameterized model."""
    if model.cpts is None:
        raise SearchError("model has no CPTs")
    cards = tuple(v.cardinality for v in model.variables)
    joint = np.zeros(cards)
    for states in itertools.product(*(range(c) for c in cards)):
        p = 1.0
        for child, parents in enumerate(model.parent_sets):
            j = 0
            for parent in parents:
                j = j * cards[parent] + states[parent]
            p *= model.cpts[child][j][states[child]]
        joint[states] = p
    return joint


def marginals(model: Model) -> dict[str, np.ndarray]:
    """Per-variable marginal distributions implied by the model's CPTs."""
    joint = joint_distribution(model)
    out = {}
    for i, variable in enumerate(model.variables):
        axes = tuple(a for a in range(len(model.variables)) if a != i)
        out[variable.name] = joint.sum(axis=axes)
    return out
