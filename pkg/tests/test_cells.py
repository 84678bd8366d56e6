import pytest

from models.graph import Path
from models.presentation import Relation
from utils.cells import (
    coinserter, filler_cell, generating_set, induced_from_cone, induced_from_filler, phi_set,
)
from utils.errors import ConeValidationError, PathTypingError, PreconditionError
from utils.functors import enumerate_functors, functor_to_map
from utils.gluing import compose_maps, identity_map, inclusion_map, make_map, to_terminal
from utils.paths import build_presentation, edges_spec
from utils.sketch_parser import parse_sketch
from utils.sketch_service import cone_families, cone_in, free_sketch, map_cone
from conftest import edge

EQUALIZER = """
object e; object a; object b;
edge m: e -> a;
edge f: a -> b;
edge g: e -> b;
relation g = f.m;
cone eq at e over { i => a, j => b, u: i -> j => f } legs { i: m, j: g };
"""

CASES = [
    ("term2", "a", "term"),
    ("term2", "a", "trivial(t)"),
    ("prod", "p", "prod"),
    ("prod", "a", "prod"),
]


@pytest.fixture(scope="module")
def equalizer():
    return parse_sketch(EQUALIZER).sketch


@pytest.fixture(scope="module")
def sketches(term2, prod):
    return {"term2": term2, "prod": prod}


def leg(co, i):
    return Path(start=co.y, end=co.cone.on_objects[i], edges=(co.legs[i],))


def maps_under(p_from, c, fixed):
    """Functors out of p_from into c that agree with a fixed functor on its domain."""
    return list(enumerate_functors(p_from, c, fixed.on_objects, fixed.on_edges))


def test_coinserter_over_the_empty_diagram_adds_nothing(term2):
    co = coinserter(term2, "a", "term")
    assert co.legs == {}
    assert co.result.objects == term2.base.objects
    assert co.result.edges == ()


def test_coinserter_adds_one_leg_per_index_object(term2, prod):
    co = coinserter(term2, "a", "trivial(t)")
    assert co.legs == {"0": "a:trivial(t):leg:0"}
    assert co.result.src("a:trivial(t):leg:0") == "a"
    assert co.result.tgt("a:trivial(t):leg:0") == "t"
    assert co.result.relations == ()

    co = coinserter(prod, "p", "prod")
    assert co.legs == {"i": "p:prod:leg:i", "j": "p:prod:leg:j"}
    assert co.result.relations == prod.base.relations


def test_coinserter_imposes_naturality(equalizer):
    co = coinserter(equalizer, "a", "eq")
    naturality = Relation.of(leg(co, "i").then(edge(equalizer.base, "f")), leg(co, "j"))
    assert naturality in co.result.relations
    assert len(co.result.relations) == len(equalizer.base.relations) + 1


def test_coinserter_errors(term2):
    with pytest.raises(PathTypingError):
        coinserter(term2, "z", "term")
    with pytest.raises(ConeValidationError):
        coinserter(term2, "a", "missing")


def test_filler_cell_relations(prod):
    fc = filler_cell(prod, "p", "prod")
    co = fc.coinserter
    assert fc.filler == "p:prod:fill"
    fill = Path(start="p", end="p", edges=("p:prod:fill",))
    expected = {
        Relation.of(fill.then(edge(prod.base, "p1")), leg(co, "i")),
        Relation.of(fill.then(edge(prod.base, "p2")), leg(co, "j")),
    }
    assert set(fc.result.relations) == expected
    assert fc.unit_composite == compose_maps(fc.retract_map, co.inclusion)


def test_suffixes_keep_minted_ids_apart(prod):
    fc = filler_cell(prod, "p", "prod", "#1")
    assert fc.filler == "p:prod:fill#1"
    assert fc.coinserter.legs["i"] == "p:prod:leg:i#1"


def test_induced_from_cone_identity_case(prod):
    co = coinserter(prod, "p", "prod")
    G = induced_from_cone(co, co.inclusion, {i: leg(co, i) for i in co.legs})
    assert G == identity_map(co.result)


def test_induced_from_cone_into_a_target(term2, target_pool):
    p, _ = target_pool["arrow"]
    co = coinserter(term2, "a", "trivial(t)")
    F = make_map(term2.base, p, {"a": "0", "t": "1"}, {})
    G = induced_from_cone(co, F, {"0": edge(p, "u")})
    assert G.on_edges["a:trivial(t):leg:0"] == edge(p, "u")
    assert G.on_objects == F.on_objects


def test_induced_from_cone_preconditions(term2, equalizer, target_pool):
    p, _ = target_pool["arrow"]
    co = coinserter(term2, "a", "trivial(t)")
    F = make_map(term2.base, p, {"a": "0", "t": "1"}, {})
    with pytest.raises(PreconditionError):
        induced_from_cone(co, F, {})
    with pytest.raises(PreconditionError):
        induced_from_cone(co, F, {"0": Path.identity("0")})

    E = equalizer.base
    D = build_presentation(E.objects, {**edges_spec(E), "k": ("a", "b")},
                           [(rel.lhs, rel.rhs) for rel in E.relations])
    co = coinserter(equalizer, "a", "eq")
    kappa = {"i": Path.identity("a"), "j": edge(D, "k")}
    with pytest.raises(PreconditionError, match="not natural"):
        induced_from_cone(co, inclusion_map(E, D), kappa)
    natural = {"i": Path.identity("a"), "j": edge(D, "f")}
    G = induced_from_cone(co, inclusion_map(E, D), natural)
    assert G.on_edges[co.legs["j"]] == edge(D, "f")


def test_induced_from_filler_identity_case(prod):
    fc = filler_cell(prod, "p", "prod")
    h = Path(start="p", end="p", edges=(fc.filler,))
    assert induced_from_filler(fc, fc.retract_map, h) == identity_map(fc.result)


def test_induced_from_filler_into_a_target(term2, target_pool):
    p, _ = target_pool["arrow"]
    fc = filler_cell(term2, "a", "term")
    F = make_map(fc.coinserter.result, p, {"a": "0", "t": "1"}, {})
    G = induced_from_filler(fc, F, edge(p, "u"))
    assert G.on_edges[fc.filler] == edge(p, "u")


def test_induced_from_filler_side_condition(prod):
    fc = filler_cell(prod, "p", "prod")
    F = identity_map(fc.coinserter.result)
    with pytest.raises(PreconditionError, match="index object i"):
        induced_from_filler(fc, F, Path.identity("p"))


def test_phi_set_examples(term2, target_pool):
    p, _ = target_pool["terminal"]
    assert len(phi_set(term2, to_terminal(term2.base, p), "a", "term")) == 1

    p, _ = target_pool["discrete"]
    assert phi_set(term2, make_map(term2.base, p, {"a": "0", "t": "1"}, {}), "a", "term") == []

    p, _ = target_pool["arrow"]
    pairs = phi_set(term2, make_map(term2.base, p, {"a": "0", "t": "1"}, {}), "a", "term")
    assert len(pairs) == 1
    assert pairs[0].filler == "u"
    assert pairs[0].legs == {}


def test_generating_set_sizes(term2, prod, loop):
    assert generating_set(free_sketch(loop)) == []
    assert [(c.y, c.alpha) for c in generating_set(term2)] == [("a", "term"), ("t", "term")]
    assert len(generating_set(prod)) == 3
    assert len(generating_set(term2, include_trivial=True)) == 6


@pytest.mark.parametrize("name,y,alpha", CASES)
def test_coinserter_classifies_cones(name, y, alpha, sketches, target_pool):
    s = sketches[name]
    co = coinserter(s, y, alpha)
    for p, c in target_pool.values():
        for F0 in enumerate_functors(s.base, c):
            F = functor_to_map(F0, s.base, c, p)
            targets, arrows, _ = cone_in(c, map_cone(F, co.cone))
            families = cone_families(c, co.cone.index_objects, targets, arrows, F0.on_objects[y])
            under = maps_under(co.result, c, F0)
            legs = {tuple(G.on_edges[co.legs[i]] for i in co.cone.index_objects) for G in under}
            assert len(under) == len(families)
            assert legs == set(families)


@pytest.mark.parametrize("name,y,alpha", CASES)
def test_filler_cell_classifies_phi(name, y, alpha, sketches, target_pool):
    s = sketches[name]
    fc = filler_cell(s, y, alpha)
    for p, c in target_pool.values():
        for F0 in enumerate_functors(s.base, c):
            F = functor_to_map(F0, s.base, c, p)
            extensions = maps_under(fc.result, c, F0)
            pairs = phi_set(s, F, y, alpha)
            assert len(extensions) == len(pairs)
            assert {G.on_edges[fc.filler] for G in extensions} == {pair.filler for pair in pairs}


def test_trivial_cone_cells_are_inert(term2, target_pool):
    fc = filler_cell(term2, "a", "trivial(t)")
    for p, c in target_pool.values():
        for F0 in enumerate_functors(term2.base, c):
            for G0 in maps_under(fc.coinserter.result, c, F0):
                assert len(maps_under(fc.result, c, G0)) == 1


def test_phi_is_functorial_in_the_target(term2, target_pool):
    p1, c1 = target_pool["arrow"]
    p2, c2 = target_pool["two_arrows"]
    H = make_map(p1, p2, {"0": "0", "1": "1"}, {"u": edge(p2, "u")})
    F = make_map(term2.base, p1, {"a": "0", "t": "1"}, {})
    image_pairs = phi_set(term2, compose_maps(H, F), "a", "trivial(t)")
    image_fillers = {pair.filler: pair for pair in image_pairs}
    assert len(image_pairs) == 2
    for pair in phi_set(term2, F, "a", "trivial(t)"):
        h = c2.evaluate(H.apply(c1.rep[pair.filler]))
        assert h in image_fillers
        moved = {i: c2.evaluate(H.apply(c1.rep[m])) for i, m in pair.legs.items()}
        assert image_fillers[h].legs == moved
