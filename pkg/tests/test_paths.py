import itertools

import pytest

from models.graph import Graph, Path
from utils.errors import DuplicateIdError, PathTypingError
from utils.functors import (
    category_graph, counit_evaluate, enumerate_functors, graph_maps, graph_unit,
)
from utils.paths import (
    build_presentation, free_category_homs, free_gwi, path_of, reduce_path, underlying_graph,
)
from conftest import category


def graph(vertices, edges):
    return Graph(vertices=tuple(vertices), edges=tuple(edges),
                 src={e: s for e, (s, _) in edges.items()}, tgt={e: t for e, (_, t) in edges.items()})


def small_graphs():
    """Every graph on one or two vertices with at most two edges."""
    graphs = []
    for vertices in (["x"], ["x", "y"]):
        ends = list(itertools.product(vertices, repeat=2))
        for n in range(3):
            for chosen in itertools.combinations_with_replacement(ends, n):
                graphs.append(graph(vertices, {f"e{k}": st for k, st in enumerate(chosen)}))
    return graphs


def test_free_gwi_adds_one_identity_per_vertex():
    g = graph(["a", "b"], {"f": ("a", "b")})
    gwi = free_gwi(g)
    assert gwi.ident == {"a": "1_a", "b": "1_b"}
    assert gwi.generating_edges == ("f",)
    assert gwi.src("1_b") == "b" and gwi.tgt("1_b") == "b"
    assert underlying_graph(gwi).edges == ("f", "1_a", "1_b")


def test_free_gwi_rejects_identity_name_collision():
    g = graph(["a"], {"1_a": ("a", "a")})
    with pytest.raises(DuplicateIdError):
        free_gwi(g)


def test_reduce_path_drops_identity_edges():
    gwi = free_gwi(graph(["a", "b"], {"f": ("a", "b")}))
    p = Path(start="a", end="b", edges=("1_a", "f", "1_b"))
    assert reduce_path(gwi, p) == Path(start="a", end="b", edges=("f",))
    assert reduce_path(gwi, Path(start="a", end="a", edges=("1_a", "1_a"))) == Path.identity("a")


def test_reduce_path_rejects_non_composable_path():
    gwi = free_gwi(graph(["a", "b"], {"f": ("a", "b")}))
    with pytest.raises(PathTypingError):
        reduce_path(gwi, Path(start="a", end="b", edges=("f", "f")))


def test_path_of_reads_right_to_left():
    p = build_presentation(["a", "b", "c"], {"f": ("a", "b"), "g": ("b", "c")})
    assert path_of(p, "g.f").edges == ("f", "g")
    assert str(path_of(p, "g.f")) == "g.f"
    assert path_of(p, "id(b)") == Path.identity("b")
    with pytest.raises(PathTypingError):
        path_of(p, "f.g")


def test_free_category_homs_on_a_chain():
    g = graph(["a", "b", "c"], {"f": ("a", "b"), "g": ("b", "c"), "h": ("a", "c")})
    homs = free_category_homs(g, "a", "c", 2)
    assert [str(p) for p in homs] == ["h", "g.f"]
    assert free_category_homs(g, "a", "a", 5) == [Path.identity("a")]
    assert free_category_homs(g, "c", "a", 5) == []


def test_free_category_homs_on_a_loop_is_truncated():
    g = graph(["v"], {"e": ("v", "v")})
    homs = free_category_homs(g, "v", "v", 3)
    assert [len(p) for p in homs] == [0, 1, 2, 3]


def test_free_category_homs_errors():
    g = graph(["v"], {"e": ("v", "v")})
    with pytest.raises(PathTypingError):
        free_category_homs(g, "v", "w", 2)
    with pytest.raises(ValueError):
        free_category_homs(g, "v", "v", -1)


@pytest.mark.parametrize("max_len", [0, 1, 3])
def test_truncated_homs_are_prefix_closed(max_len):
    g = graph(["x", "y"], {"u": ("x", "y"), "v": ("y", "x"), "w": ("y", "y")})
    for x, y in itertools.product(g.vertices, repeat=2):
        for p in free_category_homs(g, x, y, max_len):
            assert len(p) <= max_len
            for k in range(len(p.edges)):
                prefix = p.edges[:k]
                end = g.tgt[prefix[-1]] if prefix else x
                assert Path(start=x, end=end, edges=prefix) in free_category_homs(g, x, end, max_len)


def test_graph_maps_match_functors_out_of_free_categories(target_pool):
    for g in small_graphs():
        free = build_presentation(g.vertices, {e: (g.src[e], g.tgt[e]) for e in g.edges})
        for _, c in target_pool.values():
            as_graph = {(tuple(sorted(f.on_objects.items())), tuple(sorted(f.on_edges.items())))
                        for f in graph_maps(g, c)}
            as_functors = {(tuple(sorted(f.on_objects.items())), tuple(sorted(f.on_edges.items())))
                           for f in enumerate_functors(free, c)}
            assert as_graph == as_functors


def test_counit_after_unit_is_identity_on_categories(target_pool):
    for _, c in target_pool.values():
        units = graph_unit(category_graph(c))
        for m in c.morphisms:
            assert counit_evaluate(c, units[m]) == m


def test_unit_then_counit_is_identity_on_free_categories():
    c = category(["a", "b", "c"], {"f": ("a", "b"), "g": ("b", "c"), "h": ("a", "c")})
    assert c.size == 7
    for m in c.morphisms:
        rep = c.rep[m]
        images = Path(start=rep.start, end=rep.end, edges=tuple(c.generator_images[e] for e in rep.edges))
        assert counit_evaluate(c, images) == m
