"""Tests for Newick parsing and ultrametric vectors."""
import numpy as np
import pytest

from tropml.exceptions import (
    BadDimensionError,
    DuplicateLabelError,
    NotUltrametricError,
    ParseError,
    TooFewLeavesError,
)
from tropml.phylo import (
    UltrametricVector,
    default_labels,
    is_ultrametric,
    labels_from_pairs,
    pair_labels,
    parse_newick,
    parse_newick_many,
    subdominant_ultrametric,
    tree_to_vector,
    vector_to_tree,
    write_newick,
)


def test_parse_newick(balanced_newick):
    tree = parse_newick(balanced_newick)
    assert tree.labels == ["A", "B", "C", "D"]
    assert tree.is_equidistant()
    assert write_newick(tree) == balanced_newick


def test_parse_newick_with_spaces_and_internal_labels():
    tree = parse_newick(" ( A : 1.5 , B:1.5 ) root ; ")
    assert tree.labels == ["A", "B"]
    assert tree.root.label == "root"
    assert [leaf.length for leaf in tree.leaves()] == [1.5, 1.5]


@pytest.mark.parametrize(
    ("text", "offset"),
    [
        ("((A:1,B:1):2,(C:1,D:1):2)", 25),
        ("(A:1,B:x);", 7),
        ("(A:1,:1);", 5),
        ("(A:1,B:1;", 8),
        ("(A:1,B:1); junk", 11),
    ],
)
def test_parse_newick_errors_carry_offsets(text, offset):
    with pytest.raises(ParseError) as err:
        parse_newick(text)
    assert err.value.offset == offset
    assert f"offset {offset}" in str(err.value)


def test_parse_newick_rejects_duplicates_and_empty_text():
    with pytest.raises(DuplicateLabelError):
        parse_newick("(A:1,A:1);")
    with pytest.raises(ParseError):
        parse_newick("   ")


def test_parse_newick_many(balanced_newick):
    trees = parse_newick_many(balanced_newick + "\n(A:3,(B:1,C:1):2);\n")
    assert len(trees) == 2
    assert trees[1].labels == ["A", "B", "C"]


def test_tree_to_vector(balanced_newick):
    vector = tree_to_vector(parse_newick(balanced_newick))
    assert vector.values.tolist() == [2, 6, 6, 6, 6, 2]
    assert vector.leaf_labels == ("A", "B", "C", "D")
    assert vector.pair_labels == ["A|B", "A|C", "A|D", "B|C", "B|D", "C|D"]


def test_tree_to_vector_sorts_labels():
    vector = tree_to_vector(parse_newick("((D:1,C:1):2,(B:1,A:1):2);"))
    assert vector.leaf_labels == ("A", "B", "C", "D")
    assert vector.values.tolist() == [2, 6, 6, 6, 6, 2]


def test_tree_to_vector_normalized(balanced_newick):
    assert tree_to_vector(parse_newick(balanced_newick), normalize=True).values.tolist() == [
        0, 4, 4, 4, 4, 0
    ]


def test_tree_to_vector_needs_two_leaves():
    with pytest.raises(TooFewLeavesError):
        tree_to_vector(parse_newick("(A:1);"))


def test_tree_vectors_are_ultrametric(balanced_newick):
    assert is_ultrametric(tree_to_vector(parse_newick(balanced_newick)))
    assert not is_ultrametric([2, 6, 6, 6, 7, 2])
    assert is_ultrametric([1.0])


def test_vector_to_tree(balanced_newick):
    tree = vector_to_tree([2, 6, 6, 6, 6, 2])
    assert tree.is_equidistant()
    assert tree_to_vector(tree).values.tolist() == [2, 6, 6, 6, 6, 2]

    labelled = vector_to_tree(tree_to_vector(parse_newick(balanced_newick)))
    assert write_newick(labelled) == balanced_newick


def test_vector_to_tree_round_trips_random_ultrametrics(rng):
    for _ in range(20):
        m = int(rng.integers(3, 8))
        raw = rng.uniform(0, 10, size=m * (m - 1) // 2)
        u = subdominant_ultrametric(raw)
        assert np.allclose(tree_to_vector(vector_to_tree(u)).values, u.values, atol=1e-9)


def test_vector_to_tree_rejects_non_ultrametric():
    with pytest.raises(NotUltrametricError):
        vector_to_tree([2, 6, 6, 6, 7, 2])


def test_vector_to_tree_shifts_negative_values(caplog):
    tree = vector_to_tree([-2, 2, 2])
    assert tree.is_equidistant()
    assert tree_to_vector(tree).values.tolist() == [0, 4, 4]
    assert "Shifting" in caplog.text


def test_subdominant_ultrametric():
    u = subdominant_ultrametric([2, 6, 6, 6, 7, 2])
    assert u.values.tolist() == [2, 6, 6, 6, 6, 2]
    assert is_ultrametric(u)


def test_subdominant_is_below_and_idempotent(rng):
    raw = rng.uniform(-3, 10, size=15)
    u = subdominant_ultrametric(raw)
    assert np.all(u.values <= raw + 1e-12)
    assert np.allclose(subdominant_ultrametric(u).values, u.values)


def test_subdominant_keeps_labels():
    u = subdominant_ultrametric([1, 5, 3], labels=["x", "y", "z"])
    assert u.leaf_labels == ("x", "y", "z")
    assert u.values.tolist() == [1, 3, 3]


def test_ultrametric_vector_validation():
    with pytest.raises(BadDimensionError):
        UltrametricVector.coerce([1.0, 2.0])
    with pytest.raises(ValueError):
        UltrametricVector(np.array([1.0]), ("b", "a"))


def test_labels():
    assert default_labels(3) == ("1", "2", "3")
    assert default_labels(12)[0] == "01"
    assert pair_labels(["b", "a", "c"]) == ["a|b", "a|c", "b|c"]
    assert labels_from_pairs(["a|b", "a|c", "b|c"]) == ("a", "b", "c")
    with pytest.raises(ParseError):
        labels_from_pairs(["a|c", "a|b", "b|c"])
