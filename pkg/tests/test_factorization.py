import pytest

from models.graph import Path
from models.realization import LiftingProblem, OrthoStatus, RealizationStatus, SoaEventKind
from models.sketch import SketchMap
from utils.cells import filler_cell
from utils.errors import PreconditionError, RealizationError
from utils.functors import enumerate_functors
from utils.gluing import compose_maps, identity_map, make_map, maps_equal, to_terminal
from utils.paths import build_presentation
from utils.sketch_service import compose_sketch_maps, free_sketch, is_realized, validate_sketch_map
from utils.factorization import (
    extend_along_unit, fibrancy, find_lifts, initial_state, orthogonal, orthogonal_to_cells,
    realize, realize_morphism, soa_step,
)


def term_lifting_problem(term2, target):
    """Square with left r_{a,term} and right target -> *, top the identity on objects."""
    fc = filler_cell(term2, "a", "term")
    top = make_map(fc.coinserter.result, target, {"a": "a", "t": "t"}, {})
    return LiftingProblem(left=fc.retract_map, right=to_terminal(target), top=top,
                          bottom=to_terminal(fc.result)), fc


def test_find_lifts_in_the_realization(term2, term2_realized):
    lp, fc = term_lifting_problem(term2, term2_realized.realized.base)
    lifts = find_lifts(lp)
    assert len(lifts) == 1
    assert lifts[0].on_edges[fc.filler] == Path(start="a", end="t", edges=("a:term:fill",))


def test_find_lifts_without_a_map_to_the_apex(term2):
    lp, _ = term_lifting_problem(term2, build_presentation(["a", "t"], {}))
    assert find_lifts(lp) == []


def test_find_lifts_rejects_non_commuting_squares(term2, target_pool):
    p, _ = target_pool["arrow"]
    fc = filler_cell(term2, "a", "term")
    top = make_map(fc.coinserter.result, p, {"a": "0", "t": "1"}, {})
    bottom = make_map(fc.result, p, {"a": "1", "t": "1"}, {fc.filler: Path.identity("1")})
    lp = LiftingProblem(left=fc.retract_map, right=identity_map(p), top=top, bottom=bottom)
    with pytest.raises(PreconditionError):
        find_lifts(lp)


def test_identity_is_orthogonal_to_identity():
    x = identity_map(build_presentation(["x"], {}))
    assert orthogonal(x, x).is_orthogonal


def test_cells_against_the_realization_and_the_base(term2, term2_realized):
    verdicts = fibrancy(term2_realized)
    assert [(cell.y, cell.alpha) for cell, _ in verdicts] == [("a", "term"), ("t", "term")]
    assert all(verdict.is_orthogonal for _, verdict in verdicts)

    base = orthogonal_to_cells(term2, identity_map(term2.base))
    statuses = {cell.y: verdict.status for cell, verdict in base}
    assert statuses["a"] == OrthoStatus.NOT_ORTHOGONAL
    assert statuses["t"] == OrthoStatus.UNIQUELY_ORTHOGONAL
    failing = next(verdict for cell, verdict in base if cell.y == "a")
    assert failing.witness is not None
    assert failing.lifts == ()


def test_cell_against_a_discrete_target_is_not_orthogonal(term2):
    fc = filler_cell(term2, "a", "term")
    discrete = build_presentation(["a", "t"], {})
    verdict = orthogonal(fc.retract_map, to_terminal(discrete))
    assert verdict.status == OrthoStatus.NOT_ORTHOGONAL


def test_trivial_cells_are_orthogonal_to_anything(term2, target_pool):
    for p, _ in target_pool.values():
        fc = filler_cell(term2, "a", "trivial(t)")
        assert orthogonal(fc.retract_map, to_terminal(p)).is_orthogonal


def test_soa_step_without_cones_is_exact(loop):
    state, events = soa_step(initial_state(free_sketch(loop)))
    assert events == []
    assert state.exact
    assert state.iterations == 1


def test_soa_step_attaches_the_missing_map(term2):
    state, events = soa_step(initial_state(term2))
    assert [(e.kind, e.y, e.alpha, e.filler) for e in events] == [(SoaEventKind.ATTACH, "a", "term", "a:term:fill")]
    assert "a:term:fill" in state.sketch.base.edges

    again, events = soa_step(state)
    assert events == []
    assert again.exact


def test_realize_term2(term2_realized):
    r = term2_realized
    assert r.status == RealizationStatus.STABILIZED
    assert r.iterations == 2
    assert r.category.size == 3
    assert r.trace_lines() == "ATTACH y=a alpha=term legs=[] filler=a:term:fill\n"
    assert is_realized(r.realized) is True


def test_realize_prod_is_already_realized(prod_realized, prod):
    assert prod_realized.is_stabilized
    assert prod_realized.iterations == 1
    assert prod_realized.trace == ()
    assert prod_realized.realized == prod


def test_realize_terminal_sketch(terminal_sketch):
    r = realize(terminal_sketch)
    assert r.is_stabilized
    assert r.iterations == 1
    assert r.category.size == 1


def test_realize_square(sq_realized):
    r = sq_realized
    assert r.is_stabilized
    attaches = [e for e in r.trace if e.kind == SoaEventKind.ATTACH]
    assert [(e.y, e.filler) for e in attaches] == [
        ("p", "p:prod:fill"), ("p", "p:prod:fill#1"), ("p", "p:prod:fill#2"), ("a", "a:prod:fill"),
    ]
    assert [str(e.legs["i"]) + "," + str(e.legs["j"]) for e in attaches[:3]] == ["p1,p1", "p2,p1", "p2,p2"]
    assert all(e.iteration == 1 for e in attaches)
    assert any(e.kind == SoaEventKind.IDENTIFY for e in r.trace)
    sizes = r.category.hom_sizes()
    assert sizes[("a", "a")] == 1
    assert sizes[("a", "p")] == 1
    assert sizes[("p", "a")] == 2
    assert sizes[("p", "p")] == 4
    assert r.category.size == 8
    assert is_realized(r.realized) is True


def test_realization_is_deterministic(sq):
    assert realize(sq).trace == realize(sq).trace


def test_realizing_a_realized_sketch_changes_nothing(term2_realized):
    again = realize(term2_realized.realized)
    assert again.trace == ()
    assert again.realized == term2_realized.realized


def test_soa_step_is_idempotent_at_a_fixpoint(sq_realized):
    state = initial_state(sq_realized.realized)
    after, events = soa_step(state)
    assert events == []
    assert after.sketch == state.sketch


def test_budget_exhaustion(sq):
    r = realize(sq, max_iter=1)
    assert r.status == RealizationStatus.BUDGET_EXHAUSTED
    assert r.category is None
    with pytest.raises(RealizationError):
        extend_along_unit(r, identity_map(sq.base))
    with pytest.raises(ValueError):
        realize(sq, max_iter=-1)


def test_extend_along_the_unit_itself(term2_realized):
    r = term2_realized
    extended = extend_along_unit(r, r.unit.functor)
    assert maps_equal(extended, identity_map(r.realized.base), 8)


def test_extend_into_a_category_with_a_terminal_object(term2_realized, target_pool):
    p, c = target_pool["arrow"]
    F = make_map(term2_realized.original.base, p, {"a": "0", "t": "1"}, {})
    extended = extend_along_unit(term2_realized, F)
    assert extended.on_edges["a:term:fill"] == Path(start="0", end="1", edges=("u",))
    agreeing = list(enumerate_functors(term2_realized.realized.base, c, F.on_objects, {}))
    assert len(agreeing) == 1


def test_extend_requires_limit_cones(term2_realized, target_pool):
    p, _ = target_pool["discrete"]
    F = make_map(term2_realized.original.base, p, {"a": "0", "t": "1"}, {})
    with pytest.raises(PreconditionError):
        extend_along_unit(term2_realized, F)


def test_extensions_are_unique(sq_realized, target_pool):
    r = sq_realized
    for p, c in target_pool.values():
        for F0 in enumerate_functors(r.original.base, c):
            F = make_map(r.original.base, p, F0.on_objects, {e: c.rep[m] for e, m in F0.on_edges.items()})
            try:
                extended = extend_along_unit(r, F)
            except PreconditionError:
                continue
            fixed = {e: m for e, m in F0.on_edges.items()}
            agreeing = list(enumerate_functors(r.realized.base, c, F0.on_objects, fixed))
            assert len(agreeing) == 1
            assert {e: c.rep[m] for e, m in agreeing[0].on_edges.items()} == {
                e: c.rep[c.evaluate(path)] for e, path in extended.on_edges.items()}


def test_realize_identity_morphism(term2_realized):
    r = term2_realized
    m = SketchMap(functor=identity_map(term2_realized.original.base),
                  cone_map={name: name for name in r.original.cone_names})
    assert maps_equal(realize_morphism(m, r, r), identity_map(r.realized.base), 8)


def test_realize_a_point_of_term2(term2_realized):
    x = build_presentation(["x"], {})
    source = free_sketch(x)
    r_source = realize(source)
    m = SketchMap(functor=make_map(x, term2_realized.original.base, {"x": "t"}, {}),
                  cone_map={"trivial(x)": "trivial(t)"})
    free_m = realize_morphism(m, r_source, term2_realized)
    assert free_m.on_objects == {"x": "t"}
    assert free_m.target == term2_realized.realized.base


def test_realized_fixtures_are_fibrant(sq_realized, prod_realized):
    square = fibrancy(sq_realized)
    assert sorted((cell.y, cell.alpha) for cell, _ in square) == [("a", "prod"), ("p", "prod")]
    assert all(verdict.is_orthogonal for _, verdict in square)
    assert all(verdict.squares >= 1 for _, verdict in square)

    product = fibrancy(prod_realized)
    assert sorted((cell.y, cell.alpha) for cell, _ in product) == [("a", "prod"), ("b", "prod"), ("p", "prod")]
    assert all(verdict.status == OrthoStatus.UNIQUELY_ORTHOGONAL for _, verdict in product)


def collapse_to_apex(term2):
    """Endomorphism of TERM2 sending both objects to the apex t."""
    names = {"term": "term", "trivial(a)": "trivial(t)", "trivial(t)": "trivial(t)"}
    return SketchMap(functor=make_map(term2.base, term2.base, {"a": "t", "t": "t"}, {}), cone_map=names)


def test_realize_collapse_sends_the_filler_to_an_identity(term2, term2_realized):
    r = term2_realized
    free_m = realize_morphism(collapse_to_apex(term2), r, r)
    assert free_m.on_objects == {"a": "t", "t": "t"}
    assert free_m.on_edges["a:term:fill"] == Path.identity("t")


def test_realize_morphism_preserves_composites(term2, term2_realized):
    r = term2_realized
    x = build_presentation(["x"], {})
    r_point = realize(free_sketch(x))
    point = SketchMap(functor=make_map(x, term2.base, {"x": "a"}, {}), cone_map={"trivial(x)": "trivial(a)"})
    collapse = collapse_to_apex(term2)
    pairs = [(collapse, point, r_point), (collapse, collapse, r)]
    for m2, m1, r_source in pairs:
        assert validate_sketch_map(compose_sketch_maps(m2, m1), r_source.original, term2)
        whole = realize_morphism(compose_sketch_maps(m2, m1), r_source, r)
        parts = compose_maps(realize_morphism(m2, r, r), realize_morphism(m1, r_source, r))
        assert maps_equal(whole, parts, 8)
