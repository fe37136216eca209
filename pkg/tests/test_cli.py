"""Tests for the tropml command line."""
import json
import logging

import numpy as np
import pytest

from tropml.cli import build_parser, main
from tropml.const import DOMAIN
from tropml.helpers import make_rng
from tropml.synthetic import two_clusters

TRIANGLE = [[0, 0, 0], [0, 2, 5], [0, 3, 1]]


@pytest.fixture(autouse=True)
def drop_cli_handler():
    yield
    root = logging.getLogger()
    for handler in [h for h in root.handlers if h.get_name() == DOMAIN]:
        root.removeHandler(handler)


@pytest.fixture
def run(tmp_path, capsys):
    """Run the CLI against an empty configuration file."""
    config = tmp_path / "configuration.yaml"
    config.write_text("{}\n", encoding="utf-8")

    def _run(*argv):
        code = main([*map(str, argv), "--config", str(config)])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return _run


def test_dist(run, write_csv):
    code, out, _ = run("dist", write_csv([[0, 1, 2], [0, 4, 7]]))
    assert code == 0
    assert out == "5\n"


def test_dist_matrix(run, write_csv):
    code, out, _ = run("dist", write_csv(TRIANGLE))
    assert code == 0
    assert out.splitlines()[0] == "0,5,3"


def test_det(run, write_csv):
    code, out, _ = run("det", write_csv(TRIANGLE))
    assert code == 0
    assert out.splitlines() == ["8", "0,0,0", "0,3,1", "0,2,5"]


def test_segment(run, write_csv):
    _, out, _ = run("segment", write_csv([[0, 1, 2], [0, 4, 7]]))
    assert out.splitlines() == ["0,4,7", "0,1,4", "0,1,2"]


def test_project(run, write_csv):
    code, out, _ = run("project", write_csv(TRIANGLE), "--point", "0,6,2", "--point", "0,2,5")
    assert code == 0
    assert out.splitlines() == ["0,3,2", "0,2,5"]


def test_project_needs_points(run, write_csv):
    code, _, err = run("project", write_csv(TRIANGLE))
    assert code == 2
    assert err.startswith("error:")


@pytest.mark.parametrize(("algebra", "expected"), [("max", "3"), ("min", "6")])
def test_hyperdist(run, write_csv, algebra, expected):
    _, out, _ = run("hyperdist", write_csv([[0, -2, -8]]), "--normal", "0,-1,-1", "--algebra", algebra)
    assert out == expected + "\n"


def test_fwpoint_lp(run, write_csv):
    code, out, _ = run("fwpoint", write_csv([[0, 1, 2], [0, 4, 7]]))
    lines = out.splitlines()
    assert code == 0
    assert float(lines[1].split(",")[1]) == pytest.approx(5)
    assert lines[4] == "converged,true"


def test_fwpoint_regularized(run, write_csv):
    rows = [[2, 6, 6, 6, 6, 2], [2, 8, 8, 8, 8, 2], [2, 10, 10, 10, 10, 2]]
    code, out, _ = run("fwpoint", write_csv(rows), "--method", "reg", "--penalty", "1")
    assert code == 0
    assert out.splitlines() == [
        "0,6,6,6,6,0",
        "objective,4",
        "penalty,0",
        "iterations,0",
        "converged,true",
    ]


def test_fwpoint_regularized_needs_pair_dimension(run, write_csv):
    code, _, _ = run("fwpoint", write_csv([[0, 1, 2, 3], [0, 2, 1, 3]]), "--method", "reg")
    assert code == 3


def test_sample_segment_is_seeded(run, write_csv):
    path = write_csv([[0, 0], [0, 1]])
    first = run("sample", path, "--mode", "segment", "--n", "5", "--seed", "4")[1]
    second = run("sample", path, "--mode", "segment", "--n", "5", "--seed", "4")[1]
    other = run("sample", path, "--mode", "segment", "--n", "5", "--seed", "5")[1]
    assert first == second
    assert first != other
    assert len(first.splitlines()) == 5


def test_sample_polytope_chains(run, write_csv):
    code, out, _ = run(
        "sample", write_csv(TRIANGLE), "--n", "10", "--steps", "2", "--chains", "2", "--parallel", "2"
    )
    assert code == 0
    rows = np.array([[float(x) for x in line.split(",")] for line in out.splitlines()])
    assert rows.shape == (20, 3)


def test_sample_centered_segment(run, write_csv):
    code, out, _ = run(
        "sample", write_csv([[0, 0], [0, 10]]), "--mode", "segment",
        "--center", "0,5", "--sigma", "0.5", "--n", "20",
    )
    assert code == 0
    values = [float(line.split(",")[1]) for line in out.splitlines()]
    assert all(2 < v < 8 for v in values)


def test_sample_sigma_requires_center(run, write_csv):
    code, _, _ = run("sample", write_csv(TRIANGLE), "--sigma", "1")
    assert code == 2


def test_sample_start_outside_hull(run, write_csv):
    code, _, err = run("sample", write_csv(TRIANGLE), "--start", "0,6,2", "--n", "2")
    assert code == 5
    assert "error:" in err


@pytest.mark.parametrize(
    "options",
    [
        ["sample", "--center", "0,2,2", "--sigma", "0"],
        ["sample", "--steps", "0"],
        ["sample", "--n", "0"],
        ["sample", "--mode", "segment", "--n", "0"],
        ["sample", "--chains", "0"],
        ["volume", "--samples", "0"],
        ["volume", "--steps", "0"],
        ["fwpoint", "--method", "reg", "--penalty", "-1"],
        ["kde", "--multiplier", "0"],
        ["pca", "--steps", "0"],
    ],
)
def test_out_of_range_options_are_input_errors(run, write_csv, options):
    command, *rest = options
    rows = TRIANGLE[:2] if "segment" in rest else TRIANGLE
    code, _, err = run(command, write_csv(rows), *rest)
    assert code == 2
    assert "error:" in err


def test_sample_chains_do_not_depend_on_parallelism(run, write_csv):
    path = write_csv(TRIANGLE)
    outputs = [
        run("sample", path, "--n", "6", "--steps", "2", "--chains", "3", "--parallel", workers)[1]
        for workers in ("1", "3")
    ]
    assert outputs[0] == outputs[1]
    assert len(outputs[0].splitlines()) == 18


@pytest.mark.parametrize("step", ["extrapolation", "chord"])
def test_sample_step_option(run, write_csv, step):
    code, out, _ = run("sample", write_csv(TRIANGLE), "--n", "5", "--steps", "1", "--step", step)
    assert code == 0
    assert len(out.splitlines()) == 5


def test_ball(run, write_csv):
    code, out, _ = run("ball", write_csv([[0, 0, 0], [0, 3, 1], [0, 2, 5]]))
    document = json.loads(out)
    assert code == 0
    assert document["center"] == [0, 2, 2.5]
    assert document["radius"] == 2.5
    assert document["generators"] == [[0, -0.5, 0], [0, 4.5, 2.5], [0, 2, 5]]


def test_volume(run, write_csv):
    code, out, _ = run(
        "volume", write_csv(TRIANGLE), "--samples", "50", "--steps", "2", "--seed", "9"
    )
    document = json.loads(out)
    assert code == 0
    assert document["ball_volume"] == 18.75
    assert 0 <= document["proportion"] <= 1
    assert document["samples"] == 50
    assert document["seed"] == 9


def _labelled_files(write_csv):
    X, y = two_clusters(30, 30, 3, 20.0, 1.0, make_rng(1))
    return write_csv(np.column_stack([X, y]), "train.csv"), write_csv(X, "points.csv")


def test_logistic_negative_penalty(run, write_csv):
    train, _ = _labelled_files(write_csv)
    assert run("logistic", "train", train, "--penalty", "-1")[0] == 2


def test_logistic_train_predict_roc(run, write_csv, tmp_path):
    train, points = _labelled_files(write_csv)
    model = tmp_path / "model.json"
    code, out, _ = run("logistic", "train", train, "--model", model)
    assert code == 0
    assert json.loads(out)["type"] == "logistic"
    assert model.is_file()

    code, out, _ = run("logistic", "predict", points, "--model", model)
    assert code == 0
    probabilities = [float(line) for line in out.splitlines()]
    assert len(probabilities) == 60
    assert all(0 <= p <= 1 for p in probabilities)

    code, out, _ = run("logistic", "roc", train, "--model", model)
    lines = out.splitlines()
    assert code == 0
    assert float(lines[0].split(",")[1]) > 0.99
    assert lines[1] == "# fpr,tpr"


def test_logistic_evaluate(run, write_csv):
    train, _ = _labelled_files(write_csv)
    code, out, _ = run("logistic", "evaluate", train, "--seed", "2")
    assert code == 0
    assert out.startswith("auc,")


def test_logistic_single_class(run, write_csv):
    code, _, _ = run("logistic", "train", write_csv([[0, 1, 2, 0], [0, 2, 1, 0]]))
    assert code == 2


def test_logistic_predict_with_wrong_model(run, write_csv, tmp_path):
    model = tmp_path / "model.json"
    model.write_text("{}", encoding="utf-8")
    code, _, _ = run("logistic", "predict", write_csv(TRIANGLE), "--model", model)
    assert code == 2


def test_pca(run, write_csv, tmp_path):
    rows = make_rng(2).normal(size=(10, 3)).tolist()
    model = tmp_path / "pca.json"
    code, out, _ = run(
        "pca", write_csv(rows), "--iters", "5", "--steps", "2", "--init", "data", "--model", model
    )
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("objective,")
    assert lines[1] == "# vertices"
    assert lines[5] == "# coords"
    assert len(lines) == 16
    assert json.loads(model.read_text(encoding="utf-8"))["type"] == "pca"


def test_kde(run, write_csv):
    code, out, _ = run("kde", write_csv([[0, 0], [0, 2], [0, 6]]), "--multiplier", "1")
    assert code == 0
    assert [line.split(",")[0] for line in out.splitlines()] == ["2", "0", "1"]


def test_kde_against_reference(run, write_csv):
    reference = write_csv([[0, 0], [0, 1], [0, 2]], "reference.csv")
    code, out, _ = run("kde", write_csv([[0, 1.5], [0, 40]]), "--reference", reference)
    assert code == 0
    assert out.splitlines()[0].startswith("1,")


def test_tree_round_trip(run, tmp_path, balanced_newick):
    trees = tmp_path / "trees.nwk"
    trees.write_text(balanced_newick + "\n", encoding="utf-8")
    code, out, _ = run("tree", "to-vector", trees)
    assert code == 0
    assert out.splitlines() == ["A|B,A|C,A|D,B|C,B|D,C|D", "2,6,6,6,6,2"]

    vectors = tmp_path / "vectors.csv"
    vectors.write_text(out, encoding="utf-8")
    code, out, _ = run("tree", "from-vector", vectors)
    assert code == 0
    assert out == balanced_newick + "\n"

    assert run("tree", "check", vectors)[1] == "ultrametric\n"


def test_tree_check_and_reject(run, write_csv):
    path = write_csv([[2, 6, 6, 6, 7, 2]])
    assert run("tree", "check", path)[1] == "not ultrametric\n"
    assert run("tree", "from-vector", path)[0] == 5


def test_tree_parse_error_reports_offset(run, tmp_path):
    trees = tmp_path / "bad.nwk"
    trees.write_text("(A:1,B:x);\n", encoding="utf-8")
    code, _, err = run("tree", "to-vector", trees)
    assert code == 2
    assert "offset 7" in err


def test_synth(run):
    code, out, _ = run("synth", "two-clusters", "--n0", "3", "--n1", "2", "--dim", "3")
    rows = [line.split(",") for line in out.splitlines()]
    assert code == 0
    assert len(rows) == 5
    assert [row[-1] for row in rows] == ["0", "0", "0", "1", "1"]


def test_synth_ultrametric(run):
    code, out, _ = run("synth", "ultrametric", "--n0", "2", "--n1", "2", "--leaves", "4")
    assert code == 0
    assert all(len(line.split(",")) == 7 for line in out.splitlines())


@pytest.mark.parametrize(
    ("rows", "command", "code"),
    [
        ([[0, 1, 2]], "dist", 3),
        ([[0, 1, 2], [0, 1, 2]], "det", 3),
    ],
)
def test_dimension_errors(run, write_csv, rows, command, code):
    assert run(command, write_csv(rows))[0] == code


def test_parse_errors(run, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,1\n0,abc\n", encoding="utf-8")
    code, _, err = run("dist", bad)
    assert code == 2
    assert "offset 4" in err

    ragged = tmp_path / "ragged.csv"
    ragged.write_text("0,1,2\n0,1\n", encoding="utf-8")
    assert run("dist", ragged)[0] == 2


def test_missing_input_file(run, tmp_path):
    assert run("dist", tmp_path / "missing.csv")[0] == 1


def test_missing_config_file(write_csv, tmp_path, capsys):
    code = main(["dist", write_csv(TRIANGLE), "--config", str(tmp_path / "nope.yaml")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_config_file_sets_seed(tmp_path, write_csv, capsys):
    path = write_csv([[0, 0], [0, 1]])
    config = tmp_path / "seeded.yaml"
    config.write_text("tropml:\n  seed: 4\n", encoding="utf-8")
    main(["sample", path, "--mode", "segment", "--n", "3", "--config", str(config)])
    from_file = capsys.readouterr().out
    main(["sample", path, "--mode", "segment", "--n", "3", "--seed", "4", "--config", str(config)])
    assert capsys.readouterr().out == from_file


def test_output_option(run, write_csv, tmp_path):
    target = tmp_path / "out.csv"
    code, out, _ = run("dist", write_csv([[0, 1, 2], [0, 4, 7]]), "--output", target)
    assert code == 0
    assert out == ""
    assert target.read_text(encoding="utf-8") == "5\n"


def test_header_option(run, tmp_path):
    path = tmp_path / "points.csv"
    path.write_text("x0,x1,x2\n0,1,2\n0,4,7\n", encoding="utf-8")
    assert run("dist", path, "--header")[1] == "5\n"


def test_version():
    with pytest.raises(SystemExit) as err:
        build_parser().parse_args(["--version"])
    assert err.value.code == 0
