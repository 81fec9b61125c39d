import json

import numpy as np
import pytest

from bclearn import (
    MISSING,
    Model,
    OrderConstraint,
    ScoreError,
    SearchError,
    enumerate_models,
    joint_distribution,
    k2_bc,
    log_marginal,
    marginals,
    model_from_arcs,
    model_from_json,
    model_to_dot,
    model_to_json,
)
from helpers import make_dataset, punch_holes, random_complete


def order_for(db, max_parents=None):
    return OrderConstraint.from_names(
        db, [v.name for v in db.variables], max_parents=max_parents
    )


class TestK2:
    def test_single_variable_gives_empty_graph(self):
        db = make_dataset((2,), [[0], [1], [0]])
        model = k2_bc(db, order_for(db))
        assert model.arcs == ()

    def test_deterministic_copy_learns_the_arc(self):
        rng = np.random.default_rng(5)
        x = rng.integers(0, 2, size=20)
        db = make_dataset((2, 2), np.column_stack([x, x]))
        model = k2_bc(db, order_for(db))
        assert model.named_arcs() == [("X1", "X2")]

    def test_independent_uniform_pair_stays_unlinked(self):
        rng = np.random.default_rng(777)
        db = make_dataset((2, 2), rng.integers(0, 2, size=(200, 2)))
        model = k2_bc(db, order_for(db))
        assert model.arcs == ()

    def test_empty_database_gives_empty_graph_with_zero_score(self):
        db = make_dataset((2, 2, 2), np.zeros((0, 3), dtype=np.int16))
        model = k2_bc(db, order_for(db))
        assert model.arcs == ()
        assert model.score.total == 0.0

    def test_fully_deleted_database_gives_empty_graph(self):
        db = make_dataset((2, 2), np.full((6, 2), MISSING))
        model = k2_bc(db, order_for(db))
        assert model.arcs == ()

    def test_returns_cpts_and_score(self, worked_db):
        model = k2_bc(worked_db, order_for(worked_db))
        assert model.score is not None
        assert model.cpts is not None
        for child, cpt in enumerate(model.cpts):
            assert cpt.shape[1] == worked_db.variables[child].cardinality
            assert np.abs(cpt.sum(axis=1) - 1.0).max() <= 1e-12

    def test_deterministic_across_runs(self, worked_db):
        a = k2_bc(worked_db, order_for(worked_db))
        b = k2_bc(worked_db, order_for(worked_db))
        assert a.parent_sets == b.parent_sets
        assert a.score.total == b.score.total
        for x, y in zip(a.cpts, b.cpts):
            np.testing.assert_array_equal(x, y)

    def test_max_parents_cap(self):
        rng = np.random.default_rng(6)
        # majority of three parents: every parent is singly informative
        parents = rng.integers(0, 2, size=(300, 3))
        child = (parents.sum(axis=1) >= 2).astype(np.int16)
        db = make_dataset((2, 2, 2, 2), np.column_stack([parents, child]))
        unbounded = k2_bc(db, order_for(db))
        assert len(unbounded.parent_sets[3]) == 3
        capped = k2_bc(db, order_for(db, max_parents=1))
        assert all(len(ps) <= 1 for ps in capped.parent_sets)
        assert len(capped.parent_sets[3]) == 1

    def test_order_must_be_permutation(self, worked_db):
        with pytest.raises(SearchError):
            k2_bc(worked_db, OrderConstraint((0, 1), None))
        with pytest.raises(SearchError):
            k2_bc(worked_db, OrderConstraint((0, 1, 1), None))

    def test_removing_one_learned_arc_never_scores_higher(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            db = random_complete(rng, max_vars=4, max_card=3, max_cases=40)
            if db.codes.size == 0:
                continue
            db = punch_holes(rng, db, int(rng.integers(0, db.codes.size // 2 + 1)))
            model = k2_bc(db, order_for(db))
            total = model.score.total
            for parent, child in model.arcs:
                reduced = list(model.parent_sets)
                reduced[child] = tuple(p for p in reduced[child] if p != parent)
                weaker = Model(db.variables, tuple(reduced))
                assert log_marginal(weaker, db).total <= total


class TestEnumerateModels:
    def test_three_variables_give_eight_models(self, worked_db):
        results = enumerate_models(worked_db, order_for(worked_db))
        assert len(results) == 8
        structures = {em.model.parent_sets for em in results}
        assert len(structures) == 8

    def test_two_variables_give_two_models(self):
        db = make_dataset((2, 2), [[0, 0], [1, 1], [0, 1]])
        results = enumerate_models(db, order_for(db))
        assert len(results) == 2

    def test_posteriors_normalize_and_sort_descending(self, worked_db):
        results = enumerate_models(worked_db, order_for(worked_db))
        posteriors = [em.posterior for em in results]
        assert sum(posteriors) == pytest.approx(1.0, abs=1e-9)
        scores = [em.log_marginal for em in results]
        assert scores == sorted(scores, reverse=True)

    def test_greedy_result_is_listed_with_identical_score(self, worked_db):
        greedy = k2_bc(worked_db, order_for(worked_db))
        results = enumerate_models(worked_db, order_for(worked_db))
        match = [
            em for em in results if em.model.parent_sets == greedy.parent_sets
        ]
        assert len(match) == 1
        assert match[0].log_marginal == greedy.score.total

    def test_cap_is_enforced(self):
        rng = np.random.default_rng(8)
        db = random_complete(rng, max_vars=4, max_card=2, max_cases=5)
        while db.n_variables < 4:
            db = random_complete(rng, max_vars=4, max_card=2, max_cases=5)
        with pytest.raises(SearchError, match="cap"):
            enumerate_models(db, order_for(db), cap=7)


class TestModelPlumbing:
    def test_json_round_trip_preserves_structure(self, worked_db):
        model = k2_bc(worked_db, order_for(worked_db))
        data = model_to_json(model)
        rebuilt = model_from_json(data)
        assert rebuilt.parent_sets == model.parent_sets
        assert [v.name for v in rebuilt.variables] == ["X1", "X2", "X3"]
        rebuilt_on_dataset = model_from_json(
            {"arcs": data["arcs"]}, variables=worked_db.variables
        )
        assert rebuilt_on_dataset.parent_sets == model.parent_sets

    def test_json_is_serializable_and_carries_score(self, worked_db):
        model = k2_bc(worked_db, order_for(worked_db))
        data = model_to_json(model)
        text = json.dumps(data)
        assert "total_log_marginal" in text
        assert data["score"]["families"][0]["child"] == "X1"

    def test_dot_output_shape(self, worked_db):
        model = k2_bc(worked_db, order_for(worked_db))
        dot = model_to_dot(model)
        assert dot.startswith("digraph model {")
        assert dot.rstrip().endswith("}")
        for parent, child in model.named_arcs():
            assert f'"{parent}" -> "{child}";' in dot

    def test_cycles_rejected_at_construction(self, worked_db):
        with pytest.raises(ScoreError, match="not a DAG"):
            model_from_arcs(
                worked_db.variables,
                [("X1", "X2"), ("X2", "X3"), ("X3", "X1")],
            )

    def test_joint_distribution_and_marginals(self):
        variables = make_dataset((2, 2), [[0, 0]]).variables
        cpts = (
            np.array([[0.25, 0.75]]),
            np.array([[0.9, 0.1], [0.2, 0.8]]),
        )
        model = Model(variables, ((), (0,)), cpts=cpts)
        joint = joint_distribution(model)
        assert joint.sum() == pytest.approx(1.0, abs=1e-12)
        assert joint[0, 0] == pytest.approx(0.25 * 0.9)
        margs = marginals(model)
        assert margs["X1"].tolist() == pytest.approx([0.25, 0.75])
        assert margs["X2"][0] == pytest.approx(0.25 * 0.9 + 0.75 * 0.2)
