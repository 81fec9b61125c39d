"""Observed and possible-completion counts for one (child, parent-set) family.

Counting is family-local: entries of a case outside the child and its
parents are ignored entirely.  A case is *incomplete* for the family when
its child and/or at least one parent entry is missing; such a case
contributes one possible completion to every (parent configuration,
child state) cell its observed family entries are consistent with.

The tally runs in a single pass that first aggregates identical family
patterns, then expands each distinct pattern once.  Pattern expansion is
bounded by the family's joint cardinality, so the cost is essentially
independent of how many entries are missing.  Count rows are allocated
lazily per parent configuration actually touched by the data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import MISSING, Dataset


@dataclass(frozen=True)
class ParentContext:
    """A child variable together with an ordered parent set.

    Parent configurations are indexed mixed-radix in parent order with the
    last parent varying fastest, so ``config_index`` and ``config_states``
    form a bijection between joint parent states and ``range(n_configs)``.
    """

    child: int
    parents: tuple[int, ...]
    child_cardinality: int
    parent_cardinalities: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(
            self, "parent_cardinalities", tuple(self.parent_cardinalities)
        )
        if self.child in self.parents:
            raise ValueError("child cannot be its own parent")
        if len(set(self.parents)) != len(self.parents):
            raise ValueError("duplicate parent indices")
        if len(self.parents) != len(self.parent_cardinalities):
            raise ValueError("one cardinality per parent required")

    @classmethod
    def for_dataset(cls, dataset: Dataset, child: int, parents) -> "ParentContext":
        parents = tuple(parents)
        cards = dataset.cardinalities
        return cls(
            child=child,
            parents=parents,
            child_cardinality=cards[child],
            parent_cardinalities=tuple(cards[p] for p in parents),
        )

    @property
    def n_configs(self) -> int:
        q = 1
        for c in self.parent_cardinalities:
            q *= c
        return q

    def config_index(self, parent_states) -> int:
        j = 0
        for state, card in zip(parent_states, self.parent_cardinalities):
            if not 0 <= state < card:
                raise ValueError(f"parent state {state} out of range [0, {card})")
            j = j * card + state
        return j

    def config_states(self, j: int) -> tuple[int, ...]:
        if not 0 <= j < self.n_configs:
            raise ValueError(f"configuration index {j} out of range")
        states = []
        for card in reversed(self.parent_cardinalities):
            states.append(j % card)
            j //= card
        return tuple(reversed(states))

    def config_label(self, j: int, variables=None) -> str:
        """Comma-joined state labels (or indices) of configuration ``j``."""
        states = self.config_states(j)
        if variables is None:
            return ",".join(str(s) for s in states)
        return ",".join(
            variables[p].states[s] for p, s in zip(self.parents, states)
        )


@dataclass
class CountTable:
    """Per-family counts over parent configurations j and child states k.

    obs[j][k]      cases fully observed on child and parents
    comp[j][k]     incomplete cases consistent with completing to (k, j)
    parent_obs[j]  cases fully observed on all parents (child irrelevant)
    parent_comp[j] cases missing >= 1 parent entry, observed parents
                   consistent with configuration j
    """

    context: ParentContext
    n_total: int
    incomplete_cases: int = 0
    parent_incomplete_cases: int = 0
    _obs: dict[int, np.ndarray] = field(default_factory=dict)
    _comp: dict[int, np.ndarray] = field(default_factory=dict)
    _parent_obs: dict[int, int] = field(default_factory=dict)
    _parent_comp: dict[int, int] = field(default_factory=dict)

    def obs_row(self, j: int) -> np.ndarray:
        row = self._obs.get(j)
        if row is None:
            return np.zeros(self.context.child_cardinality, dtype=np.int64)
        return row

    def comp_row(self, j: int) -> np.ndarray:
        row = self._comp.get(j)
        if row is None:
            return np.zeros(self.context.child_cardinality, dtype=np.int64)
        return row

    def obs(self, j: int, k: int) -> int:
        return int(self.obs_row(j)[k])

    def comp(self, j: int, k: int) -> int:
        return int(self.comp_row(j)[k])

    def parent_obs(self, j: int) -> int:
        return self._parent_obs.get(j, 0)

    def parent_comp(self, j: int) -> int:
        return self._parent_comp.get(j, 0)

    @property
    def is_complete(self) -> bool:
        return self.incomplete_cases == 0

    def obs_matrix(self) -> np.ndarray:
        q, c = self.context.n_configs, self.context.child_cardinality
        out = np.zeros((q, c), dtype=np.int64)
        for j, row in self._obs.items():
            out[j] = row
        return out

    def comp_matrix(self) -> np.ndarray:
        q, c = self.context.n_configs, self.context.child_cardinality
        out = np.zeros((q, c), dtype=np.int64)
        for j, row in self._comp.items():
            out[j] = row
        return out

    def parent_obs_vector(self) -> np.ndarray:
        out = np.zeros(self.context.n_configs, dtype=np.int64)
        for j, m in self._parent_obs.items():
            out[j] = m
        return out

    def parent_comp_vector(self) -> np.ndarray:
        out = np.zeros(self.context.n_configs, dtype=np.int64)
        for j, m in self._parent_comp.items():
            out[j] = m
        return out


def _parent_strides(ctx: ParentContext) -> list[int]:
    strides = [1] * len(ctx.parent_cardinalities)
    for i in range(len(strides) - 2, -1, -1):
        strides[i] = strides[i + 1] * ctx.parent_cardinalities[i + 1]
    return strides


def _consistent_configs(ctx: ParentContext, parent_entries, strides=None) -> list[int]:
    """All configuration indices the (possibly missing) parent entries allow.

    Built arithmetically: observed entries fix a base index, every missing
    parent fans the running index list out across its states.
    """
    if strides is None:
        strides = _parent_strides(ctx)
    base = 0
    fans = []
    for entry, card, stride in zip(
        parent_entries, ctx.parent_cardinalities, strides
    ):
        if entry == MISSING:
            fans.append((card, stride))
        else:
            base += int(entry) * stride
    indices = [base]
    for card, stride in fans:
        indices = [i + s * stride for i in indices for s in range(card)]
    return indices


def enumerate_completions(case, ctx: ParentContext) -> list[tuple[int, int]]:
    """The (configuration, child state) cells a single case is consistent with.

    ``case`` is a full row of entries; only the family columns are read.
    A fully observed case yields its single cell.
    """
    child_entry = case[ctx.child]
    parent_entries = [case[p] for p in ctx.parents]
    ks = (
        range(ctx.child_cardinality)
        if child_entry == MISSING
        else (int(child_entry),)
    )
    return [(j, k) for j in _consistent_configs(ctx, parent_entries) for k in ks]


def tally(dataset: Dataset, ctx: ParentContext) -> CountTable:
    """Count observed cases and possible completions for one family."""
    family = (ctx.child,) + ctx.parents
    cards = (ctx.child_cardinality,) + ctx.parent_cardinalities
    c = ctx.child_cardinality
    table = CountTable(context=ctx, n_total=dataset.n_cases)
    if dataset.n_cases == 0:
        return table

    # Encode each case's family columns into one small integer; missing
    # maps to digit 0 so every pattern, complete or not, gets a code.
    sub = dataset.codes[:, family].astype(np.int64)
    codes = np.zeros(dataset.n_cases, dtype=np.int64)
    size = 1
    for col, card in zip(sub.T, cards):
        codes = codes * (card + 1) + (col + 1)
        size *= card + 1
    multiplicity = np.bincount(codes, minlength=size)

    obs: dict[int, list[int]] = {}
    comp: dict[int, list[int]] = {}
    strides = _parent_strides(ctx)
    for code in np.flatnonzero(multiplicity):
        m = int(multiplicity[code])
        digits = []
        rest = int(code)
        for card in reversed(cards):
            digits.append(rest % (card + 1) - 1)
            rest //= card + 1
        digits.reverse()
        child_entry, parent_entries = digits[0], digits[1:]

        parent_complete = MISSING not in parent_entries
        configs = _consistent_configs(ctx, parent_entries, strides)
        if parent_complete:
            j = configs[0]
            table._parent_obs[j] = table._parent_obs.get(j, 0) + m
        else:
            table.parent_incomplete_cases += m
            for j in configs:
                table._parent_comp[j] = table._parent_comp.get(j, 0) + m

        if parent_complete and child_entry != MISSING:
            row = obs.get(configs[0])
            if row is None:
                row = obs.setdefault(configs[0], [0] * c)
            row[child_entry] += m
        else:
            table.incomplete_cases += m
            ks = range(c) if child_entry == MISSING else (child_entry,)
            for j in configs:
                row = comp.get(j)
                if row is None:
                    row = comp.setdefault(j, [0] * c)
                for k in ks:
                    row[k] += m
    for j, row in obs.items():
        table._obs[j] = np.asarray(row, dtype=np.int64)
    for j, row in comp.items():
        table._comp[j] = np.asarray(row, dtype=np.int64)
    return table
