"""Command-line interface for tropml."""
from __future__ import annotations

import argparse
import json
import math
import sys
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .centroid import (
    RegularizedFWConfig,
    SubgradientConfig,
    fermat_weber_lp,
    fermat_weber_regularized,
    fermat_weber_subgradient,
)
from .config import (
    LOG_LEVELS,
    RunConfig,
    build_run_config,
    load_configuration,
    setup_logging,
)
from .const import (
    DEFAULT_CONFIG_PATH,
    DEFAULT_FW_MAX_ITERS,
    DEFAULT_INTERMEDIATE_STEPS,
    DEFAULT_KDE_MULTIPLIER,
    DEFAULT_PCA_ITERS,
    DEFAULT_PCA_STEPS,
    DEFAULT_TRAIN_FRACTION,
    DOMAIN,
    EXIT_FAILURE,
    EXIT_OK,
    LOGGER,
    SIGNIFICANT_DIGITS,
)
from .core import (
    Algebra,
    TropicalHyperplane,
    TropicalPolytope,
    hyperplane_distance,
    pairwise_distances,
    project_many,
    trop_det,
    trop_distance,
    trop_segment,
)
from .exceptions import (
    DimensionMismatchError,
    EmptyInputError,
    InputError,
    InvalidParameterError,
    ModelFormatError,
    TooFewPointsError,
    TropmlError,
)
from .geometry import ball_generators, estimate_volume, min_enclosing_ball
from .helpers import (
    format_number,
    format_row,
    format_rows,
    make_rng,
    parse_points_csv,
    read_text,
    spawn_rngs,
    split_labels,
    write_output,
)
from .learn import (
    LogisticModel,
    fit_logistic,
    fit_tropical_pca,
    kde_fit,
    kde_outlier_scores,
    kde_scores,
    pca_plot_coords,
    roc_auc,
)
from .model_io import dumps_model, load_model, save_model
from .phylo import (
    UltrametricVector,
    is_ultrametric,
    labels_from_pairs,
    pair_labels,
    parse_newick_many,
    tree_to_vector,
    vector_to_tree,
)
from .sampler import (
    CenterTarget,
    ChainConfig,
    HarMethod,
    run_chain,
    sample_segment_centered,
    sample_segment_uniform,
)
from .synthetic import two_clusters, ultrametric_clusters


def _json_number(value: float) -> float:
    return float(f"{float(value):.{SIGNIFICANT_DIGITS}g}")


def _json_row(values) -> list[float]:
    return [_json_number(v) for v in values]


def _read_matrix(path: str, run: RunConfig) -> np.ndarray:
    matrix, _ = parse_points_csv(read_text(path), run.header)
    if matrix.shape[0] == 0:
        raise EmptyInputError(f"no rows in {path}")
    return matrix


def _parse_point(text: str) -> np.ndarray:
    matrix, _ = parse_points_csv(text)
    if matrix.shape[0] != 1:
        raise InputError(f"expected one point, got {text!r}")
    return matrix[0]


def _two_rows(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if matrix.shape[0] != 2:
        raise TooFewPointsError(f"expected 2 rows, got {matrix.shape[0]}")
    return matrix[0], matrix[1]


def cmd_dist(args: argparse.Namespace, run: RunConfig) -> str:
    """Distance between two rows, or the pairwise matrix of more."""
    matrix = _read_matrix(args.input, run)
    if matrix.shape[0] == 2:
        return format_number(trop_distance(matrix[0], matrix[1]))
    if matrix.shape[0] < 2:
        raise TooFewPointsError("dist needs at least 2 rows")
    return format_rows(pairwise_distances(matrix))


def cmd_det(args: argparse.Namespace, run: RunConfig) -> str:
    """Tropical determinant and the reordered matrix."""
    value, reordered = trop_det(_read_matrix(args.input, run), tol=run.tol)
    return format_number(value) + "\n" + format_rows(reordered)


def cmd_segment(args: argparse.Namespace, run: RunConfig) -> str:
    """Bend points of the segment from the second row to the first."""
    u, v = _two_rows(_read_matrix(args.input, run))
    return format_rows(trop_segment(u, v).bends)


def cmd_project(args: argparse.Namespace, run: RunConfig) -> str:
    """Projections of points onto the polytope."""
    polytope = TropicalPolytope(_read_matrix(args.input, run))
    if args.points:
        points = _read_matrix(args.points, run)
    elif args.point:
        points = np.vstack([_parse_point(text) for text in args.point])
    else:
        raise InputError("give --point or --points")
    return format_rows(project_many(polytope, points))


def cmd_hyperdist(args: argparse.Namespace, run: RunConfig) -> str:
    """Distance from every row to a tropical hyperplane."""
    plane = TropicalHyperplane(_parse_point(args.normal), Algebra(args.algebra))
    matrix = _read_matrix(args.input, run)
    return "\n".join(format_number(hyperplane_distance(plane, row)) for row in matrix)


def cmd_fwpoint(args: argparse.Namespace, run: RunConfig) -> str:
    """Fermat-Weber point of the input rows."""
    matrix = _read_matrix(args.input, run)
    if args.method == "lp":
        result = fermat_weber_lp(matrix)
    elif args.method == "grad":
        result = fermat_weber_subgradient(
            matrix, SubgradientConfig(max_iters=args.max_iters, tol=run.tol)
        )
    else:
        result = fermat_weber_regularized(
            matrix,
            RegularizedFWConfig(max_iters=args.max_iters, tol=run.tol, lam=args.penalty),
        )
    lines = [
        format_row(result.point),
        f"objective,{format_number(result.objective)}",
        f"penalty,{format_number(result.penalty)}",
        f"iterations,{result.iterations}",
        f"converged,{str(result.converged).lower()}",
    ]
    return "\n".join(lines)


def _target(args: argparse.Namespace) -> CenterTarget | None:
    if args.center is None:
        if args.sigma is not None:
            raise InputError("--sigma requires --center")
        return None
    if args.sigma is None:
        raise InputError("--center requires --sigma")
    return CenterTarget(_parse_point(args.center), args.sigma)


def cmd_sample(args: argparse.Namespace, run: RunConfig) -> str:
    """Draws from a segment or hit-and-run chains in a polytope."""
    matrix = _read_matrix(args.input, run)
    target = _target(args)
    if target is not None and target.mu.size != matrix.shape[1]:
        raise DimensionMismatchError("centre and input differ in dimension")
    if args.n < 1 or args.chains < 1:
        raise InvalidParameterError("--n and --chains must be at least 1")
    chains = args.chains
    rngs = spawn_rngs(run.seed, chains) if chains > 1 else [make_rng(run.seed)]

    if args.mode == "segment":
        u, v = _two_rows(matrix)

        def draw(rng: np.random.Generator) -> np.ndarray:
            if target is None:
                return np.array([sample_segment_uniform(u, v, rng) for _ in range(args.n)])
            return np.array(
                [sample_segment_centered(u, v, target, rng) for _ in range(args.n)]
            )
    else:
        polytope = TropicalPolytope(matrix)
        start = _parse_point(args.start) if args.start else polytope.generators[0]
        burnin = run.burnin if args.burnin is None else args.burnin
        discard = math.ceil(burnin * args.n)
        config = ChainConfig(
            intermediate_steps=args.steps, seed=run.seed, tol=run.tol, method=args.step
        )

        def draw(rng: np.random.Generator) -> np.ndarray:
            return run_chain(polytope, start, args.n + discard, config, target, rng)[discard:]

    with ThreadPoolExecutor(max_workers=run.parallel) as pool:
        draws = list(pool.map(draw, rngs))
    LOGGER.info("Sampled %s chains of %s points", chains, args.n)
    return format_rows(np.vstack(draws))


def cmd_ball(args: argparse.Namespace, run: RunConfig) -> str:
    """Minimum enclosing tropical ball as JSON."""
    ball = min_enclosing_ball(_read_matrix(args.input, run), tol=run.tol)
    document = {
        "center": _json_row(ball.center),
        "radius": _json_number(ball.radius),
        "generators": [_json_row(row) for row in ball_generators(ball).generators],
    }
    return json.dumps(document)


def cmd_volume(args: argparse.Namespace, run: RunConfig) -> str:
    """Monte Carlo volume estimate as JSON."""
    polytope = TropicalPolytope(_read_matrix(args.input, run))
    ball = min_enclosing_ball(polytope)
    estimate = estimate_volume(
        ball_generators(ball),
        polytope,
        ball.center,
        samples=args.samples,
        chain_steps=args.steps,
        radius=ball.radius,
        seed=run.seed,
        tol=run.tol,
        burnin=run.burnin,
        method=HarMethod(args.step),
    )
    document = {
        "proportion": _json_number(estimate.proportion),
        "ball_volume": _json_number(estimate.ball_volume),
        "estimate": _json_number(estimate.estimate),
        "stderr_binomial": _json_number(estimate.stderr_binomial),
        "samples": estimate.samples,
        "chain_steps": estimate.chain_steps,
        "seed": estimate.seed,
    }
    return json.dumps(document)


def _read_labeled(args: argparse.Namespace, run: RunConfig) -> tuple[np.ndarray, np.ndarray]:
    return split_labels(_read_matrix(args.input, run), args.label_column)


def _load_logistic(path: str) -> LogisticModel:
    model = load_model(path)
    if not isinstance(model, LogisticModel):
        raise ModelFormatError(f"{path} does not hold a logistic model")
    return model


def _roc_text(scores: np.ndarray, labels: np.ndarray) -> str:
    area, curve = roc_auc(scores, labels)
    return f"auc,{format_number(area)}\n# fpr,tpr\n" + format_rows(curve)


def cmd_logistic(args: argparse.Namespace, run: RunConfig) -> str:
    """Train, apply or evaluate tropical logistic regression."""
    if args.action == "predict":
        model = _load_logistic(args.model)
        points = _read_matrix(args.input, run)
        return "\n".join(format_number(p) for p in model.predict_proba(points))
    X, y = _read_labeled(args, run)
    if args.action == "train":
        model = fit_logistic(X, y, penalty=args.penalty, seed=run.seed)
        if args.model:
            save_model(model, args.model)
        return dumps_model(model)
    if args.action == "roc":
        model = _load_logistic(args.model)
        return _roc_text(model.predict_proba(X), y)

    rng = make_rng(run.seed)
    order = rng.permutation(X.shape[0])
    cut = int(round(args.train_fraction * X.shape[0]))
    train, test = order[:cut], order[cut:]
    if test.size == 0:
        raise TooFewPointsError("no rows left for testing")
    model = fit_logistic(X[train], y[train], penalty=args.penalty, seed=run.seed)
    return _roc_text(model.predict_proba(X[test]), y[test])


def cmd_pca(args: argparse.Namespace, run: RunConfig) -> str:
    """Best-fit tropical triangle with plot coordinates."""
    X = _read_matrix(args.input, run)
    initial = X[:3] if args.init == "data" else None
    region = TropicalPolytope(_read_matrix(args.region, run)) if args.region else None
    triangle = fit_tropical_pca(
        X,
        initial=initial,
        outer_iters=args.iters,
        chain_steps=args.steps,
        seed=run.seed,
        region=region,
    )
    if args.model:
        save_model(triangle, args.model)
    lines = [
        f"objective,{format_number(triangle.objective)}",
        "# vertices",
        format_rows(triangle.vertices),
        "# coords",
        format_rows(pca_plot_coords(triangle, X)),
    ]
    return "\n".join(lines)


def cmd_kde(args: argparse.Namespace, run: RunConfig) -> str:
    """KDE scores sorted ascending, lowest (most outlying) first."""
    X = _read_matrix(args.input, run)
    if args.reference:
        scores = kde_outlier_scores(_read_matrix(args.reference, run), X, args.multiplier)
    else:
        scores = kde_scores(kde_fit(X, args.multiplier), X, holdout_self=True)
    order = np.argsort(scores, kind="stable")
    return "\n".join(f"{i},{format_number(scores[i])}" for i in order)


def _read_vectors(path: str) -> list[UltrametricVector]:
    text = read_text(path)
    first = next(
        (line for line in text.splitlines() if line.strip() and not line.startswith("#")),
        "",
    )
    has_header = "|" in first
    matrix, fields = parse_points_csv(text, header=has_header)
    if matrix.shape[0] == 0:
        raise EmptyInputError(f"no vectors in {path}")
    labels = labels_from_pairs(fields) if has_header else None
    return [UltrametricVector.coerce(row, labels) for row in matrix]


def cmd_tree(args: argparse.Namespace, run: RunConfig) -> str:
    """Convert between Newick trees and ultrametric vectors."""
    if args.action == "to-vector":
        vectors = [
            tree_to_vector(tree, normalize=args.normalize)
            for tree in parse_newick_many(read_text(args.input))
        ]
        labels = vectors[0].leaf_labels
        if any(vector.leaf_labels != labels for vector in vectors):
            raise DimensionMismatchError("trees have different leaf sets")
        return ",".join(pair_labels(labels)) + "\n" + format_rows(v.values for v in vectors)
    vectors = _read_vectors(args.input)
    if args.action == "from-vector":
        return "\n".join(vector_to_tree(v, tol=args.tol_tree).to_newick() for v in vectors)
    return "\n".join(
        "ultrametric" if is_ultrametric(v, args.tol_tree) else "not ultrametric"
        for v in vectors
    )


def cmd_synth(args: argparse.Namespace, run: RunConfig) -> str:
    """Synthetic labelled data, label in the last column."""
    rng = make_rng(run.seed)
    if args.kind == "two-clusters":
        X, y = two_clusters(args.n0, args.n1, args.dim, args.separation, args.noise, rng)
    else:
        X, y = ultrametric_clusters(args.n0, args.n1, args.leaves, args.noise, rng)
    return format_rows(np.column_stack([X, y]))


COMMANDS: dict[str, Callable[[argparse.Namespace, RunConfig], str]] = {
    "dist": cmd_dist,
    "det": cmd_det,
    "segment": cmd_segment,
    "project": cmd_project,
    "hyperdist": cmd_hyperdist,
    "fwpoint": cmd_fwpoint,
    "sample": cmd_sample,
    "ball": cmd_ball,
    "volume": cmd_volume,
    "logistic": cmd_logistic,
    "pca": cmd_pca,
    "kde": cmd_kde,
    "tree": cmd_tree,
    "synth": cmd_synth,
}


def _global_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("global options")
    group.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    group.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    group.add_argument(
        "--header", action="store_true", default=argparse.SUPPRESS,
        help="input CSV files start with a header row",
    )
    group.add_argument("--output", default=argparse.SUPPRESS, help="write here instead of stdout")
    group.add_argument("--parallel", type=int, default=argparse.SUPPRESS)
    group.add_argument("--config", default=argparse.SUPPRESS, help="YAML configuration file")
    group.add_argument("--log-level", choices=LOG_LEVELS, default=argparse.SUPPRESS)
    return common


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser with one subcommand per pipeline."""
    common = _global_options()
    parser = argparse.ArgumentParser(prog=DOMAIN, parents=[common], description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, parents=[common], help=help_text)
        cmd.set_defaults(handler=COMMANDS[name])
        return cmd

    for name, help_text in (
        ("dist", "tropical distance"),
        ("det", "tropical determinant"),
        ("segment", "tropical line segment"),
    ):
        add(name, help_text).add_argument("input")

    cmd = add("project", "project points onto a polytope")
    cmd.add_argument("input", help="polytope generators")
    cmd.add_argument("--point", action="append", help="comma-separated point")
    cmd.add_argument("--points", help="CSV of points")

    cmd = add("hyperdist", "distance to a tropical hyperplane")
    cmd.add_argument("input")
    cmd.add_argument("--normal", required=True)
    cmd.add_argument("--algebra", choices=[a.value for a in Algebra], default=Algebra.MAX.value)

    cmd = add("fwpoint", "Fermat-Weber point")
    cmd.add_argument("input")
    cmd.add_argument("--method", choices=["lp", "grad", "reg"], default="lp")
    cmd.add_argument("--penalty", type=float, default=0.0)
    cmd.add_argument("--max-iters", type=int, default=DEFAULT_FW_MAX_ITERS)

    cmd = add("sample", "hit-and-run sampling")
    cmd.add_argument("input")
    cmd.add_argument("--mode", choices=["segment", "polytope"], default="polytope")
    cmd.add_argument("--start")
    cmd.add_argument("--center")
    cmd.add_argument("--sigma", type=float)
    cmd.add_argument("--n", type=int, default=100)
    cmd.add_argument("--steps", type=int, default=DEFAULT_INTERMEDIATE_STEPS)
    cmd.add_argument("--burnin", type=float)
    cmd.add_argument("--chains", type=int, default=1)
    cmd.add_argument(
        "--step", choices=[m.value for m in HarMethod], default=HarMethod.EXTRAPOLATION.value
    )

    add("ball", "minimum enclosing tropical ball").add_argument("input")

    cmd = add("volume", "Monte Carlo volume estimate")
    cmd.add_argument("input")
    cmd.add_argument("--samples", type=int, default=1000)
    cmd.add_argument("--steps", type=int, default=DEFAULT_INTERMEDIATE_STEPS)
    cmd.add_argument(
        "--step", choices=[m.value for m in HarMethod], default=HarMethod.CHORD.value
    )

    cmd = add("logistic", "tropical logistic regression")
    cmd.add_argument("action", choices=["train", "predict", "roc", "evaluate"])
    cmd.add_argument("input")
    cmd.add_argument("--model", help="model file to write (train) or read")
    cmd.add_argument("--penalty", type=float, default=0.0)
    cmd.add_argument("--label-column", type=int, default=-1)
    cmd.add_argument("--train-fraction", type=float, default=DEFAULT_TRAIN_FRACTION)

    cmd = add("pca", "best-fit tropical triangle")
    cmd.add_argument("input")
    cmd.add_argument("--iters", type=int, default=DEFAULT_PCA_ITERS)
    cmd.add_argument("--steps", type=int, default=DEFAULT_PCA_STEPS)
    cmd.add_argument("--init", choices=["data", "random"], default="random")
    cmd.add_argument("--region", help="CSV of generators bounding the vertex search")
    cmd.add_argument("--model", help="also write the triangle as a model file")

    cmd = add("kde", "tropical kernel density scores")
    cmd.add_argument("input")
    cmd.add_argument("--multiplier", type=float, default=DEFAULT_KDE_MULTIPLIER)
    cmd.add_argument("--reference", help="score input rows against this set")

    cmd = add("tree", "tree and ultrametric conversions")
    cmd.add_argument("action", choices=["to-vector", "from-vector", "check"])
    cmd.add_argument("input")
    cmd.add_argument("--normalize", action="store_true")
    cmd.add_argument("--tol-tree", type=float, default=1e-6)

    cmd = add("synth", "synthetic labelled data")
    cmd.add_argument("kind", choices=["two-clusters", "ultrametric"])
    cmd.add_argument("--n0", type=int, default=100)
    cmd.add_argument("--n1", type=int, default=100)
    cmd.add_argument("--dim", type=int, default=4)
    cmd.add_argument("--leaves", type=int, default=5)
    cmd.add_argument("--separation", type=float, default=20.0)
    cmd.add_argument("--noise", type=float, default=1.0)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit code."""
    args = build_parser().parse_args(argv)
    config_path = getattr(args, "config", None)
    try:
        file_options = load_configuration(
            config_path or DEFAULT_CONFIG_PATH, required=config_path is not None
        )
        run = build_run_config(
            file_options,
            {
                key: getattr(args, key, None)
                for key in ("seed", "tol", "header", "output", "parallel", "log_level")
            },
        )
        explicit_level = getattr(args, "log_level", None) or (
            (file_options.get(DOMAIN) or {}).get("log_level")
        )
        setup_logging(explicit_level, file_options.get("logger"))
        write_output(args.handler(args, run), run.output)
    except TropmlError as err:
        LOGGER.debug("Command %s failed", args.command, exc_info=True)
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK
