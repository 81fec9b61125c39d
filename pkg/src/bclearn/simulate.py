"""Forward sampling from a parameterized network and random entry deletion.

Sampling draws cases ancestrally (each node after its parents) with a
numpy PCG64 generator, so a (spec, seed) pair reproduces byte-identical
datasets.  Deletion derives a single random permutation of all entry
positions from the plan's seed and masks a prefix of it: the same seed
with a larger fraction deletes a superset of entries, which is exactly
the cumulative ladder used by the benchmark protocol.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .data import MISSING, Dataset, Variable
from .score import ensure_dag
from .search import Model, model_from_arcs

RNG_ALGORITHM = "numpy PCG64 (default_rng)"

CPT_ROW_TOLERANCE = 1e-9

BUILTIN_NAMES = ("M1", "M2", "M3", "M4")


class SimulateError(ValueError):
    """Raised for malformed generative specs or deletion plans."""


@dataclass(frozen=True)
class GenerativeSpec:
    """A fully parameterized model plus sample size and seed."""

    model: Model
    n: int
    seed: int | None = None
    name: str | None = None

    def __post_init__(self):
        if self.model.cpts is None:
            raise SimulateError("generative spec needs CPTs for every variable")
        if self.n < 0:
            raise SimulateError("sample size must be nonnegative")
        for child, cpt in enumerate(self.model.cpts):
            rows = np.asarray(cpt, dtype=float)
            if (rows < 0).any():
                raise SimulateError(f"negative CPT entry for variable {child}")
            if np.abs(rows.sum(axis=1) - 1.0).max() > CPT_ROW_TOLERANCE:
                raise SimulateError(
                    f"CPT rows of variable {child} must sum to 1 within 1e-9"
                )

    def with_overrides(self, n: int | None = None, seed: int | None = None):
        return GenerativeSpec(
            model=self.model,
            n=self.n if n is None else n,
            seed=self.seed if seed is None else seed,
            name=self.name,
        )


@dataclass(frozen=True)
class DeletionPlan:
    """Delete a fraction of all entries, uniformly without replacement."""

    fraction: float
    seed: int | None = None
    mode: str = "entrywise-uniform"

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise SimulateError("deletion fraction must lie in [0, 1]")
        if self.mode != "entrywise-uniform":
            raise SimulateError(f"unknown deletion mode {self.mode!r}")


def sample(spec: GenerativeSpec) -> Dataset:
    """Draw n independent cases from the network."""
    model = spec.model
    n = spec.n
    cards = tuple(v.cardinality for v in model.variables)
    rng = np.random.default_rng(spec.seed)
    codes = np.zeros((n, len(model.variables)), dtype=np.int16)
    for node in ensure_dag(model.parent_sets):
        parents = model.parent_sets[node]
        rows = np.zeros(n, dtype=np.int64)
        for parent in parents:
            rows = rows * cards[parent] + codes[:, parent]
        cumulative = np.cumsum(np.asarray(model.cpts[node], dtype=float), axis=1)
        draws = rng.random(n)
        states = (draws[:, None] >= cumulative[rows]).sum(axis=1)
        codes[:, node] = np.minimum(states, cards[node] - 1)
    return Dataset(model.variables, codes)


def delete_entries(dataset: Dataset, plan: DeletionPlan) -> Dataset:
    """Return a copy with round(fraction * entries) positions masked."""
    total = dataset.codes.size
    n_delete = int(round(plan.fraction * total))
    codes = dataset.codes.copy()
    if n_delete and total:
        rng = np.random.default_rng(plan.seed)
        positions = rng.permutation(total)[:n_delete]
        codes.reshape(-1)[positions] = MISSING
    return Dataset(dataset.variables, codes)


def spec_from_dict(data: dict) -> GenerativeSpec:
    """Build a generative spec from its JSON form."""
    try:
        variables = tuple(
            Variable(v["name"], tuple(str(s) for s in v["states"]))
            for v in data["variables"]
        )
        arcs = [(str(p), str(c)) for p, c in data["arcs"]]
        cpt_rows = data["cpts"]
        n = int(data["n"])
    except (KeyError, TypeError) as exc:
        raise SimulateError(f"malformed generative spec: {exc}") from exc
    skeleton = model_from_arcs(variables, arcs)

    cards = tuple(v.cardinality for v in variables)
    cpts = []
    for child, parents in enumerate(skeleton.parent_sets):
        name = variables[child].name
        if name not in cpt_rows:
            raise SimulateError(f"spec has no CPT for variable {name!r}")
        q = 1
        for p in parents:
            q *= cards[p]
        table = np.empty((q, cards[child]))
        for j in range(q):
            label = _config_label(variables, parents, cards, j)
            if label not in cpt_rows[name]:
                raise SimulateError(
                    f"CPT of {name!r} is missing configuration {label!r}"
                )
            row = cpt_rows[name][label]
            if len(row) != cards[child]:
                raise SimulateError(f"CPT row {name!r}[{label!r}] has wrong length")
            table[j] = row
        cpts.append(table)
    model = Model(variables, skeleton.parent_sets, cpts=tuple(cpts))
    return GenerativeSpec(
        model=model, n=n, seed=data.get("seed"), name=data.get("name")
    )


def _config_label(variables, parents, cards, j) -> str:
    states = []
    for card in reversed([cards[p] for p in parents]):
        states.append(j % card)
        j //= card
    states.reverse()
    return ",".join(
        variables[p].states[s] for p, s in zip(parents, states)
    )


def spec_to_dict(spec: GenerativeSpec) -> dict:
    model = spec.model
    cards = tuple(v.cardinality for v in model.variables)
    cpts = {}
    for child, parents in enumerate(model.parent_sets):
        rows = {}
        for j in range(model.cpts[child].shape[0]):
            label = _config_label(model.variables, parents, cards, j)
            rows[label] = [float(x) for x in model.cpts[child][j]]
        cpts[model.variables[child].name] = rows
    return {
        "name": spec.name,
        "variables": [
            {"name": v.name, "states": list(v.states)} for v in model.variables
        ],
        "arcs": [[p, c] for p, c in model.named_arcs()],
        "cpts": cpts,
        "n": spec.n,
        "seed": spec.seed,
    }


def load_spec(path) -> GenerativeSpec:
    with open(path, encoding="utf-8") as fh:
        return spec_from_dict(json.load(fh))


def builtin_spec(name: str, n: int | None = None, seed: int | None = None):
    """One of the shipped generating networks M1..M4."""
    if name not in BUILTIN_NAMES:
        raise SimulateError(
            f"unknown builtin spec {name!r}; choose from {', '.join(BUILTIN_NAMES)}"
        )
    text = (
        resources.files("bclearn")
        .joinpath(f"builtin/{name.lower()}.json")
        .read_text(encoding="utf-8")
    )
    return spec_from_dict(json.loads(text)).with_overrides(n=n, seed=seed)
