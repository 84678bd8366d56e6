import logging
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

from models.graph import Graph, Path
from models.presentation import CategoryFunctor, MaterializedCategory, Presentation, PresentationMap
from utils.errors import PathTypingError


def _relation_schedule(p: Presentation) -> Dict[int, List[Tuple[Path, Path]]]:
    """Relations keyed by the position of the last edge they mention."""
    order = {e: k for k, e in enumerate(p.edges)}
    schedule: Dict[int, List[Tuple[Path, Path]]] = {}
    for rel in p.relations:
        last = max((order[e] for e in rel.lhs.edges + rel.rhs.edges), default=-1)
        schedule.setdefault(last, []).append((rel.lhs, rel.rhs))
    return schedule


def enumerate_functors(p: Presentation, c: MaterializedCategory,
                       fixed_objects: Optional[Mapping[str, str]] = None,
                       fixed_edges: Optional[Mapping[str, str]] = None) -> Iterator[CategoryFunctor]:
    """
    Enumerate every functor from the category presented by p into c.

    Args:
        p: Source presentation
        c: Finite target category
        fixed_objects: Objects whose image is prescribed
        fixed_edges: Generating edges whose image (a morphism id of c) is prescribed

    Yields:
        CategoryFunctor values in canonical order (objects, then edges, by c's order)
    """
    fixed_objects = dict(fixed_objects or {})
    fixed_edges = dict(fixed_edges or {})
    for e, m in fixed_edges.items():
        if m not in c.src:
            raise PathTypingError(f"{m} is not a morphism of the target")
        fixed_objects.setdefault(p.src(e), c.src[m])
        fixed_objects.setdefault(p.tgt(e), c.tgt[m])
        if fixed_objects[p.src(e)] != c.src[m] or fixed_objects[p.tgt(e)] != c.tgt[m]:
            return

    edges = list(p.edges)
    schedule = _relation_schedule(p)
    objects = list(p.objects)

    def assign_objects(k: int, on_objects: Dict[str, str]) -> Iterator[Dict[str, str]]:
        if k == len(objects):
            yield dict(on_objects)
            return
        x = objects[k]
        choices = [fixed_objects[x]] if x in fixed_objects else list(c.objects)
        for y in choices:
            on_objects[x] = y
            yield from assign_objects(k + 1, on_objects)
        on_objects.pop(x, None)

    def holds(functor: CategoryFunctor, pairs: List[Tuple[Path, Path]]) -> bool:
        return all(functor.evaluate(c, u) == functor.evaluate(c, v) for u, v in pairs)

    def assign_edges(k: int, on_objects: Dict[str, str], on_edges: Dict[str, str]) -> Iterator[CategoryFunctor]:
        if k == len(edges):
            yield CategoryFunctor(on_objects=dict(on_objects), on_edges=dict(on_edges))
            return
        e = edges[k]
        hom = c.hom(on_objects[p.src(e)], on_objects[p.tgt(e)])
        choices = [fixed_edges[e]] if e in fixed_edges else hom
        for m in choices:
            if m not in hom:
                continue
            on_edges[e] = m
            partial = CategoryFunctor(on_objects=on_objects, on_edges=on_edges)
            if holds(partial, schedule.get(k, [])):
                yield from assign_edges(k + 1, on_objects, on_edges)
        on_edges.pop(e, None)

    for on_objects in assign_objects(0, {}):
        partial = CategoryFunctor(on_objects=on_objects, on_edges={})
        if not holds(partial, schedule.get(-1, [])):
            continue
        yield from assign_edges(0, on_objects, {})


def functor_to_map(functor: CategoryFunctor, source: Presentation, c: MaterializedCategory,
                   target: Presentation) -> PresentationMap:
    """Presentation map sending each edge to the canonical path of its image."""
    return PresentationMap(
        source=source,
        target=target,
        on_objects=dict(functor.on_objects),
        on_edges={e: c.rep[functor.on_edges[e]] for e in source.edges},
    )


def map_to_functor(m: PresentationMap, c: MaterializedCategory) -> CategoryFunctor:
    """Evaluate a presentation map into the materialization of its target."""
    return CategoryFunctor(
        on_objects=dict(m.on_objects),
        on_edges={e: c.evaluate(m.on_edges[e]) for e in m.source.edges},
    )


def category_graph(c: MaterializedCategory) -> Graph:
    """Underlying graph of a finite category: one edge per morphism."""
    return Graph(vertices=c.objects, edges=c.morphisms, src=dict(c.src), tgt=dict(c.tgt))


def graph_maps(g: Graph, c: MaterializedCategory) -> Iterator[CategoryFunctor]:
    """Graph homomorphisms g -> category_graph(c), in canonical order."""
    objects = list(g.vertices)
    edges = list(g.edges)

    def extend(k: int, on_objects: Dict[str, str], on_edges: Dict[str, str]) -> Iterator[CategoryFunctor]:
        if k < len(objects):
            for y in c.objects:
                on_objects[objects[k]] = y
                yield from extend(k + 1, on_objects, on_edges)
            on_objects.pop(objects[k], None)
            return
        j = k - len(objects)
        if j == len(edges):
            yield CategoryFunctor(on_objects=dict(on_objects), on_edges=dict(on_edges))
            return
        e = edges[j]
        for m in c.hom(on_objects[g.src[e]], on_objects[g.tgt[e]]):
            on_edges[e] = m
            yield from extend(k + 1, on_objects, on_edges)
        on_edges.pop(e, None)

    yield from extend(0, {}, {})


def graph_unit(g: Graph) -> Dict[str, Path]:
    """Unit of the free/underlying adjunction: every edge as a length-one path."""
    return {e: Path(start=g.src[e], end=g.tgt[e], edges=(e,)) for e in g.edges}


def counit_evaluate(c: MaterializedCategory, path: Path) -> str:
    """Counit of the adjunction: compose a path of morphisms of c."""
    current = c.identities[path.start]
    for m in path.edges:
        current = c.compose(m, current)
    return current


def count_functors(p: Presentation, c: MaterializedCategory) -> int:
    count = sum(1 for _ in enumerate_functors(p, c))
    logging.debug(f"{count} functors into a {c.size}-morphism category")
    return count
