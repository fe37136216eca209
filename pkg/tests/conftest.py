"""Shared fixtures for the tropml tests."""
import numpy as np
import pytest

from tropml.core import TropicalPolytope
from tropml.helpers import make_rng

BALANCED_NEWICK = "((A:1,B:1):2,(C:1,D:1):2);"


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng(12345)


@pytest.fixture
def triangle() -> TropicalPolytope:
    """Three-point polytope used throughout the worked examples."""
    return TropicalPolytope(np.array([[0.0, 0.0, 0.0], [0.0, 2.0, 5.0], [0.0, 3.0, 1.0]]))


@pytest.fixture
def ball_triangle() -> TropicalPolytope:
    """The same polytope with rows in the enclosing-ball example order."""
    return TropicalPolytope(np.array([[0.0, 0.0, 0.0], [0.0, 3.0, 1.0], [0.0, 2.0, 5.0]]))


@pytest.fixture
def unit_square() -> TropicalPolytope:
    """Polytrope whose canonical chart is the unit square."""
    return TropicalPolytope(
        np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
    )


@pytest.fixture
def balanced_newick() -> str:
    return BALANCED_NEWICK


@pytest.fixture
def write_csv(tmp_path):
    """Write rows to a CSV file and return its path."""

    def _write(rows, name: str = "input.csv", header: str | None = None) -> str:
        path = tmp_path / name
        lines = [header] if header else []
        lines += [",".join(repr(float(x)) for x in row) for row in rows]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return str(path)

    return _write
