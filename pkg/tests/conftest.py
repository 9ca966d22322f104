import pathlib
import pytest
from grensemble.graph import LabeledGraph, build_graph
from grensemble.penman_io import parse_penman

DATA_DIR = pathlib.Path(__file__).parent / "data"

# three predictions of one sentence; g1 and g3 only disagree on edge (1, 2)
TRIO_G1 = dict(
    nodes={"1": "A", "2": "D", "3": "B"},
    edges={("1", "2"): ":X", ("1", "3"): ":Y"},
    root="1",
)
TRIO_G2 = dict(
    nodes={"1": "C", "2": "D", "3": "A", "4": "E"},
    edges={("3", "2"): ":Z", ("3", "1"): ":Y", ("3", "4"): ":W"},
    root="3",
)
TRIO_G3 = dict(
    nodes={"1": "A", "2": "D", "3": "B"},
    edges={("1", "2"): ":Z", ("1", "3"): ":Y"},
    root="1",
)

CONTRAST_PIVOT = """
(z0 / and
    :op1 (z1 / want-01
             :ARG0 (z2 / they)
             :ARG1 (z3 / money))
    :op2 (z4 / want-01
             :ARG0 z2
             :ARG1 (z5 / face)
             :polarity -))
"""

CONTRAST_VOTERS = [
    """
(c / contrast-01
   :ARG1 (w / want-01
            :ARG0 (t / they)
            :ARG1 (m / money))
   :ARG2 (w2 / want-01
             :ARG0 t
             :ARG1 (f / face)
             :polarity -))
""",
    """
(x0 / contrast-01
    :ARG1 (x1 / want-01
              :ARG0 (x2 / they)
              :ARG1 (x3 / money))
    :ARG2 (x4 / want-01
              :ARG0 x2
              :ARG1 (x5 / face)
              :polarity -))
""",
    """
(k / contrast-01
   :ARG2 (k2 / want-01
             :polarity -
             :ARG0 (p / they)
             :ARG1 (q / face))
   :ARG1 (k1 / want-01
             :ARG0 p
             :ARG1 (r / money)))
""",
]


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="need --runslow option to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def trio() -> list[LabeledGraph]:
    return [build_graph(**spec) for spec in (TRIO_G1, TRIO_G2, TRIO_G3)]


@pytest.fixture
def contrast_case() -> tuple[LabeledGraph, list[LabeledGraph]]:
    return parse_penman(CONTRAST_PIVOT), [parse_penman(text) for text in CONTRAST_VOTERS]


@pytest.fixture
def data_dir() -> pathlib.Path:
    return DATA_DIR
