"""
Maps between presentations and the colimits built from them.

The only pushout shape supported is the one used when attaching cells:
``f: B -> A`` sends objects injectively and generating edges injectively to
generating edges, and ``g: B -> Q`` is the identity on objects.
"""

import logging
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from models.cell import PushoutResult
from models.graph import Path
from models.presentation import Presentation, PresentationMap, Relation
from utils.errors import PathTypingError, UnsupportedShapeError
from utils.paths import build_presentation, edges_spec, reduce_path, with_relations
from utils.word_problem import decide_equal


def make_map(source: Presentation, target: Presentation, on_objects: Mapping[str, str],
             on_edges: Mapping[str, Path]) -> PresentationMap:
    """
    Build a presentation map, checking that edge images are typed.

    Args:
        source: Domain presentation
        target: Codomain presentation
        on_objects: Object assignment (total on source objects)
        on_edges: Image path of every non-identity generating edge

    Returns:
        PresentationMap with reduced edge images
    """
    for x in source.objects:
        if x not in on_objects:
            raise PathTypingError(f"object {x} has no image")
        if not target.has_object(on_objects[x]):
            raise PathTypingError(f"image {on_objects[x]} of {x} is not an object of the target")
    images = {}
    for e in source.edges:
        if e not in on_edges:
            raise PathTypingError(f"edge {e} has no image")
        image = reduce_path(target.generators, on_edges[e])
        if image.start != on_objects[source.src(e)] or image.end != on_objects[source.tgt(e)]:
            raise PathTypingError(f"image {image} of {e} has the wrong endpoints")
        images[e] = image
    return PresentationMap(source=source, target=target,
                           on_objects={x: on_objects[x] for x in source.objects}, on_edges=images)


def identity_map(p: Presentation) -> PresentationMap:
    return PresentationMap(source=p, target=p, on_objects={x: x for x in p.objects},
                           on_edges={e: p.edge_path(e) for e in p.edges})


def inclusion_map(sub: Presentation, sup: Presentation) -> PresentationMap:
    """Identity-on-names map from a presentation into one that extends its generators."""
    for e in sub.edges:
        if e not in sup.generators.graph.src or sup.src(e) != sub.src(e) or sup.tgt(e) != sub.tgt(e):
            raise PathTypingError(f"edge {e} is not a generator of the target")
    return make_map(sub, sup, {x: x for x in sub.objects}, {e: sub.edge_path(e) for e in sub.edges})


def compose_maps(g: PresentationMap, f: PresentationMap) -> PresentationMap:
    """Return g∘f."""
    if f.target != g.source:
        raise PathTypingError("maps are not composable")
    return PresentationMap(
        source=f.source,
        target=g.target,
        on_objects={x: g.on_objects[y] for x, y in f.on_objects.items()},
        on_edges={e: g.apply(path) for e, path in f.on_edges.items()},
    )


def validate_map(m: PresentationMap, bound: int) -> List[str]:
    """
    Check that a map is a functor: typed edge images and relations preserved.

    Returns:
        Problems found; empty when the map is valid. Undecided relations are reported.
    """
    problems = []
    for e in m.source.edges:
        image = m.on_edges.get(e)
        if image is None:
            problems.append(f"edge {e} has no image")
            continue
        if image.start != m.on_objects[m.source.src(e)] or image.end != m.on_objects[m.source.tgt(e)]:
            problems.append(f"image {image} of {e} has the wrong endpoints")
    if problems:
        return problems
    for rel in m.source.relations:
        verdict = decide_equal(m.target, m.apply(rel.lhs), m.apply(rel.rhs), bound)
        if verdict.is_distinct:
            problems.append(f"relation {rel} is not preserved")
        elif verdict.is_unknown:
            problems.append(f"relation {rel} could not be checked: {verdict.detail}")
    return problems


def maps_equal(m1: PresentationMap, m2: PresentationMap, bound: int) -> bool:
    """Equality of parallel maps: same object map, Equal edge images."""
    if m1.source != m2.source or m1.target != m2.target or m1.on_objects != m2.on_objects:
        return False
    for e in m1.source.edges:
        if not decide_equal(m1.target, m1.on_edges[e], m2.on_edges[e], bound).is_equal:
            return False
    return True


def quotient(p: Presentation, rels: Iterable[Tuple[Path, Path]]) -> Presentation:
    """
    Add relations to a presentation.

    Args:
        p: Presentation
        rels: Pairs of parallel paths of p

    Returns:
        Presentation with the same generators and relations ∪ rels
    """
    rels = list(rels)
    if not rels:
        return p
    return with_relations(p, rels)


def quotient_map(p: Presentation, q: Presentation) -> PresentationMap:
    """The identity-on-generators map onto a quotient of p."""
    return make_map(p, q, {x: x for x in p.objects}, {e: p.edge_path(e) for e in p.edges})


def terminal_presentation(obj: str = "*") -> Presentation:
    return build_presentation([obj], {})


def to_terminal(p: Presentation, terminal: Optional[Presentation] = None) -> PresentationMap:
    """The unique map to the terminal category."""
    terminal = terminal or terminal_presentation()
    star = terminal.objects[0]
    return PresentationMap(source=p, target=terminal, on_objects={x: star for x in p.objects},
                           on_edges={e: Path.identity(star) for e in p.edges})


def fresh_id(base: str, taken: Iterable[str]) -> str:
    """``base`` if unused, otherwise ``base#k`` for the least free k >= 1."""
    taken = set(taken)
    if base not in taken:
        return base
    k = 1
    while f"{base}#{k}" in taken:
        k += 1
    return f"{base}#{k}"


def _check_shape(f: PresentationMap, g: PresentationMap) -> None:
    if f.source != g.source:
        raise UnsupportedShapeError("pushout legs must share their source")
    base = f.source
    if len(set(f.on_objects.values())) != len(base.objects):
        raise UnsupportedShapeError("left leg must be injective on objects")
    images = []
    for e in base.edges:
        image = f.on_edges[e]
        if len(image.edges) != 1:
            raise UnsupportedShapeError(f"left leg sends {e} to {image}, not to a generator")
        images.append(image.edges[0])
    if len(set(images)) != len(images):
        raise UnsupportedShapeError("left leg must be injective on generators")
    if any(g.on_objects[x] != x for x in base.objects) or set(g.target.objects) != set(base.objects):
        raise UnsupportedShapeError("right leg must be the identity on objects")


def pushout(f: PresentationMap, g: PresentationMap) -> PushoutResult:
    """
    Glue the part of f's target outside the image of f onto g's target.

    Args:
        f: Generator-injective inclusion B -> A
        g: Identity-on-objects map B -> Q

    Returns:
        PushoutResult with the glued presentation and the two injections
    """
    _check_shape(f, g)
    left, right = f.target, g.target
    base = f.source

    object_preimage = {y: x for x, y in f.on_objects.items()}
    edge_preimage = {f.on_edges[e].edges[0]: e for e in base.edges}

    objects = list(right.objects)
    renamed: Dict[str, str] = {}
    on_objects: Dict[str, str] = {}
    for y in left.objects:
        if y in object_preimage:
            on_objects[y] = g.on_objects[object_preimage[y]]
        else:
            fresh = fresh_id(y, objects)
            objects.append(fresh)
            on_objects[y] = fresh
            if fresh != y:
                renamed[y] = fresh

    edges = edges_spec(right)
    taken = set(right.generators.graph.edges) | set(left.generators.graph.edges) - set(edge_preimage)
    on_edges: Dict[str, Path] = {}
    for e in left.edges:
        if e in edge_preimage:
            on_edges[e] = g.on_edges[edge_preimage[e]]
            continue
        fresh = e if e not in right.generators.graph.edges else fresh_id(e, taken)
        taken.add(fresh)
        edges[fresh] = (on_objects[left.src(e)], on_objects[left.tgt(e)])
        on_edges[e] = Path(start=edges[fresh][0], end=edges[fresh][1], edges=(fresh,))
        if fresh != e:
            renamed[e] = fresh

    def translate(path: Path) -> Path:
        out: Tuple[str, ...] = ()
        for e in path.edges:
            if e in on_edges:
                out += on_edges[e].edges
        return Path(start=on_objects[path.start], end=on_objects[path.end], edges=out)

    glued = {Relation.of(f.apply(rel.lhs), f.apply(rel.rhs)) for rel in base.relations}
    pairs = [(rel.lhs, rel.rhs) for rel in right.relations]
    pairs += [(translate(rel.lhs), translate(rel.rhs)) for rel in left.relations if rel not in glued]

    result = build_presentation(objects, edges, pairs)
    inl = make_map(left, result, on_objects, on_edges)
    inr = make_map(right, result, {x: x for x in right.objects}, {e: right.edge_path(e) for e in right.edges})
    logging.debug(f"Pushout glued {len(edges) - len(right.edges)} new generators, {len(result.relations)} relations")
    return PushoutResult(result=result, left=inl, right=inr, renamed=renamed)
