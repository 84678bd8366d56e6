import logging
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from models.graph import Graph, Gwi, Path
from models.presentation import Presentation, Relation
from utils.errors import DuplicateIdError, PathTypingError


def identity_edge_id(vertex: str) -> str:
    return f"1_{vertex}"


def free_gwi(g: Graph) -> Gwi:
    """
    Freely add one identity loop ``1_v`` per vertex.

    Args:
        g: A well-formed graph

    Returns:
        The graph with identities; original edges are unchanged
    """
    fresh = {v: identity_edge_id(v) for v in g.vertices}
    clashes = sorted(set(fresh.values()) & set(g.edges))
    if clashes:
        raise DuplicateIdError(f"identity edge ids collide with existing edges: {', '.join(clashes)}")
    src = dict(g.src)
    tgt = dict(g.tgt)
    for v, edge in fresh.items():
        src[edge] = v
        tgt[edge] = v
    graph = Graph(vertices=g.vertices, edges=g.edges + tuple(fresh[v] for v in g.vertices),
                  src=src, tgt=tgt)
    return Gwi(graph=graph, ident=fresh)


def underlying_graph(g: Gwi) -> Graph:
    """Forget the identity function of a gwi."""
    return g.graph


def check_path(g: Gwi, p: Path) -> None:
    """Raise PathTypingError unless p is a composable path in g."""
    vertices = set(g.vertices)
    if p.start not in vertices:
        raise PathTypingError(f"unknown vertex {p.start}")
    if p.end not in vertices:
        raise PathTypingError(f"unknown vertex {p.end}")
    current = p.start
    for edge in p.edges:
        if edge not in g.graph.src:
            raise PathTypingError(f"unknown edge {edge}")
        if g.src(edge) != current:
            raise PathTypingError(f"edge {edge} does not start at {current}")
        current = g.tgt(edge)
    if current != p.end:
        raise PathTypingError(f"path {p} ends at {current}, not {p.end}")


def reduce_path(g: Gwi, p: Path) -> Path:
    """
    Canonical representative of a composable path: identity edges are deleted.

    An all-identity path becomes the empty path at its vertex.
    """
    check_path(g, p)
    identities = g.identity_edges
    return Path(start=p.start, end=p.end, edges=tuple(e for e in p.edges if e not in identities))


def free_category_homs(g: Graph, x: str, y: str, max_len: int) -> List[Path]:
    """
    Enumerate the paths x -> y of length at most max_len in the free category on g.

    Args:
        g: Generating graph
        x: Source vertex
        y: Target vertex
        max_len: Length bound

    Returns:
        Paths ordered by length, then edge ids
    """
    if x not in g.vertices or y not in g.vertices:
        missing = x if x not in g.vertices else y
        raise PathTypingError(f"unknown vertex {missing}")
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    outgoing: Dict[str, List[str]] = {v: [] for v in g.vertices}
    for edge in sorted(g.edges):
        outgoing[g.src[edge]].append(edge)

    result: List[Path] = []
    layer: List[Tuple[str, Tuple[str, ...]]] = [(x, ())]
    for length in range(max_len + 1):
        for vertex, edges in layer:
            if vertex == y:
                result.append(Path(start=x, end=y, edges=edges))
        if length == max_len:
            break
        layer = [(g.tgt[e], edges + (e,)) for vertex, edges in layer for e in outgoing[vertex]]
        if not layer:
            break
    result.sort(key=Path.sort_key)
    logging.debug(f"free_category_homs({x}, {y}, {max_len}) -> {len(result)} paths")
    return result


def make_path(p: Presentation, start: str, edges: Sequence[str]) -> Path:
    """Build and type-check the reduced path through the given edges."""
    end = p.tgt(edges[-1]) if edges else start
    path = Path(start=start, end=end, edges=tuple(edges))
    return reduce_path(p.generators, path)


def path_of(p: Presentation, text: str) -> Path:
    """
    Read a path written right-to-left, e.g. ``"g.f"`` or ``"id(a)"``.
    """
    text = text.strip()
    if text.startswith("id(") and text.endswith(")"):
        vertex = text[3:-1].strip()
        if not p.has_object(vertex):
            raise PathTypingError(f"unknown object {vertex}")
        return Path.identity(vertex)
    names = [part.strip() for part in text.split(".")]
    for name in names:
        if name not in p.generators.graph.src:
            raise PathTypingError(f"unknown edge {name}")
    edges = list(reversed(names))
    return make_path(p, p.src(edges[0]), edges)


def canonical_relations(g: Gwi, pairs: Iterable[Tuple[Path, Path]]) -> Tuple[Relation, ...]:
    """Reduce, orient, deduplicate and sort relation pairs; trivial pairs are dropped."""
    seen = {}
    for u, v in pairs:
        u = reduce_path(g, u)
        v = reduce_path(g, v)
        if u.start != v.start or u.end != v.end:
            raise PathTypingError(f"relation {u} = {v} is not parallel")
        rel = Relation.of(u, v)
        if not rel.is_trivial:
            seen[(rel.lhs.sort_key(), rel.rhs.sort_key())] = rel
    return tuple(seen[key] for key in sorted(seen))


def build_presentation(objects: Sequence[str], edges: Mapping[str, Tuple[str, str]],
                       relations: Iterable[Tuple[Path, Path]] = ()) -> Presentation:
    """
    Build a presentation from objects, named edges and relation pairs.

    Args:
        objects: Object ids
        edges: Edge id -> (source, target)
        relations: Pairs of parallel paths

    Returns:
        Presentation with identities added by free_gwi
    """
    for edge, (s, t) in edges.items():
        if s not in objects or t not in objects:
            raise PathTypingError(f"edge {edge} references an unknown object")
    graph = Graph(
        vertices=tuple(objects),
        edges=tuple(edges),
        src={e: s for e, (s, _) in edges.items()},
        tgt={e: t for e, (_, t) in edges.items()},
    )
    gwi = free_gwi(graph)
    return Presentation(generators=gwi, relations=canonical_relations(gwi, relations))


def with_relations(p: Presentation, pairs: Iterable[Tuple[Path, Path]]) -> Presentation:
    """The same generators with the given relations added."""
    existing = [(rel.lhs, rel.rhs) for rel in p.relations]
    return Presentation(generators=p.generators,
                        relations=canonical_relations(p.generators, existing + list(pairs)))


def edges_spec(p: Presentation) -> Dict[str, Tuple[str, str]]:
    """Edge id -> (source, target) for the non-identity generators."""
    return {e: (p.src(e), p.tgt(e)) for e in p.edges}
