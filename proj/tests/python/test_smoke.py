import json

import pytest

import bddlearn

TABLE1_ROWS = [
    [1, 0, 1, 0],
    [1, 0, 0, 1],
    [0, 0, 1, 0],
    [1, 1, 0, 0],
    [0, 0, 0, 1],
    [1, 1, 1, 1],
    [0, 1, 1, 0],
    [0, 0, 1, 1],
]
TABLE1_LABELS = [0, 0, 1, 0, 1, 0, 0, 1]


@pytest.fixture
def table1():
    return bddlearn.Dataset(TABLE1_ROWS, TABLE1_LABELS)


def test_version():
    assert bddlearn.__version__ == "0.1.0"


def test_beads():
    assert bddlearn.beads("00010111") == {
        "00010111": 1,
        "0001": 2,
        "0111": 2,
        "01": 3,
        "0": 4,
        "1": 4,
    }


def test_gen_bdd():
    b = bddlearn.gen_bdd("00010111", [0, 1, 2])
    assert b.node_count == 6
    assert b.audit() == []
    assert b.classify([0, 1, 1]) == 1
    assert b.to_dot().startswith("digraph")


def test_learn_and_round_trip(table1):
    m = bddlearn.learn(table1, 2, mode="sat", bias="C")
    assert m.train_accuracy == 1.0
    assert m.table == "1000"
    assert [m.predict(r) for r in TABLE1_ROWS] == TABLE1_LABELS
    back = bddlearn.model_from_json(m.to_json())
    assert back.ordering == m.ordering
    assert json.loads(back.to_json()) == json.loads(m.to_json())
    assert bddlearn.evaluate(back, table1) == 1.0


def test_learn_errors(table1):
    with pytest.raises(bddlearn.LearnError):
        bddlearn.learn(table1, 1, mode="sat")
    with pytest.raises(ValueError):
        bddlearn.learn(table1, 2, mode="smt")
    with pytest.raises(bddlearn.DataError):
        bddlearn.learn(bddlearn.Dataset([[0], [0]], [0, 1]), 1, mode="sat")


def test_min_depth(table1):
    depth, witness = bddlearn.min_depth(table1, 4)
    assert depth == 2
    assert witness.train_accuracy == 1.0


def test_literal_counts(table1):
    assert bddlearn.literal_count(table1, 2, "bdd2") > 0
    assert bddlearn.literal_count(table1, 2, "maxsat") == bddlearn.literal_count(table1, 2, "bdd2")


def test_load_csv(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("c,y\na,0\nb,1\nc,0\n")
    d = bddlearn.load_csv(str(p), "y")
    assert len(d) == 3
    assert d.feature_names == ["c=a", "c=b", "c=c"]
    with pytest.raises(bddlearn.DataError):
        bddlearn.load_csv(str(p), "missing")
