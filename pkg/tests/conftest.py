import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(ROOT, "src"))

from models.bounds import Bounds  # noqa: E402
from models.graph import Path  # noqa: E402
from models.presentation import MaterializedCategory  # noqa: E402
from utils.factorization import realize  # noqa: E402
from utils.paths import build_presentation  # noqa: E402
from utils.sketch_parser import parse_sketch  # noqa: E402
from utils.word_problem import materialize  # noqa: E402

FIXTURES = os.path.join(ROOT, "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def load_sketch(name: str):
    with open(fixture_path(name), "r", encoding="utf-8") as f:
        return parse_sketch(f.read()).sketch


def edge(p, name: str) -> Path:
    return Path(start=p.src(name), end=p.tgt(name), edges=(name,))


def presented(objects, edges, relations=()):
    p = build_presentation(objects, edges, relations)
    c = materialize(p, max_len=6, max_morphisms=64)
    assert isinstance(c, MaterializedCategory)
    return p, c


def category(objects, edges, relations=()) -> MaterializedCategory:
    return presented(objects, edges, relations)[1]


@pytest.fixture(scope="session")
def bounds():
    return Bounds()


@pytest.fixture(scope="session")
def term2():
    return load_sketch("term2.sk")


@pytest.fixture(scope="session")
def prod():
    return load_sketch("prod.sk")


@pytest.fixture(scope="session")
def sq():
    return load_sketch("sq.sk")


@pytest.fixture(scope="session")
def terminal_sketch():
    return load_sketch("terminal.sk")


@pytest.fixture(scope="session")
def term2_realized(term2):
    return realize(term2)


@pytest.fixture(scope="session")
def prod_realized(prod):
    return realize(prod)


@pytest.fixture(scope="session")
def sq_realized(sq):
    return realize(sq)


@pytest.fixture(scope="session")
def commuting_square():
    p = build_presentation(["a", "b", "c", "d"],
                           {"f": ("a", "b"), "g": ("b", "d"), "h": ("a", "c"), "k": ("c", "d")})
    gf = Path(start="a", end="d", edges=("f", "g"))
    kh = Path(start="a", end="d", edges=("h", "k"))
    return build_presentation(p.objects, {e: (p.src(e), p.tgt(e)) for e in p.edges}, [(gf, kh)])


@pytest.fixture(scope="session")
def loop():
    return build_presentation(["v"], {"e": ("v", "v")})


@pytest.fixture(scope="session")
def parallel_pair():
    return build_presentation(["a", "b"], {"f": ("a", "b"), "g": ("a", "b")})


@pytest.fixture(scope="session")
def target_pool():
    """Small finite categories, with their presentations, used as targets for universal-property checks."""
    idem = Path(start="v", end="v", edges=("e", "e"))
    return {
        "terminal": presented(["*"], {}),
        "discrete": presented(["0", "1"], {}),
        "arrow": presented(["0", "1"], {"u": ("0", "1")}),
        "idempotent": presented(["v"], {"e": ("v", "v")}, [(idem, Path(start="v", end="v", edges=("e",)))]),
        "span": presented(["0", "1", "2"], {"l": ("0", "1"), "r": ("0", "2")}),
        "two_arrows": presented(["0", "1"], {"u": ("0", "1"), "w": ("0", "1")}),
    }
