import logging
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from models.bounds import Bounds
from models.graph import Path
from models.presentation import MaterializedCategory, Presentation, PresentationMap, Unknown
from models.sketch import Cone, LimitSketch, SketchMap, SketchMapCheck, trivial_cone_id
from utils.errors import ConeValidationError, DuplicateIdError, PathTypingError
from utils.gluing import compose_maps, identity_map, validate_map
from utils.paths import build_presentation, reduce_path
from utils.word_problem import decide_equal, materialize, materialize_within

TERMINAL_INDEX_OBJECT = "0"


def _is_acyclic(objects: Sequence[str], arrows: Mapping[str, Tuple[str, str]]) -> bool:
    indegree = {i: 0 for i in objects}
    for s, t in arrows.values():
        indegree[t] += 1
    ready = [i for i in objects if indegree[i] == 0]
    seen = 0
    while ready:
        i = ready.pop()
        seen += 1
        for s, t in arrows.values():
            if s == i:
                indegree[t] -= 1
                if indegree[t] == 0:
                    ready.append(t)
    return seen == len(objects)


def index_category(objects: Sequence[str], arrows: Mapping[str, Tuple[str, str]]) -> MaterializedCategory:
    """
    The finite category freely generated by an acyclic index graph.

    Args:
        objects: Index object names
        arrows: Arrow name -> (source, target)

    Returns:
        MaterializedCategory of all index paths
    """
    for name, (s, t) in arrows.items():
        if s not in objects or t not in objects:
            raise ConeValidationError(f"index arrow {name} references an unknown index object", name)
    if not _is_acyclic(objects, arrows):
        raise ConeValidationError("index graph has a cycle; the index category would be infinite")
    p = build_presentation(list(objects), dict(arrows))
    result = materialize(p, max_len=max(1, len(objects)), max_morphisms=Bounds().max_morphisms)
    if not isinstance(result, MaterializedCategory):
        raise ConeValidationError(f"index category is too large: {result.reason}")
    return result


def terminal_index() -> MaterializedCategory:
    return index_category([TERMINAL_INDEX_OBJECT], {})


def trivial_cone(p: Presentation, x: str) -> Cone:
    """The identity cone (x, 1, *_x, id) over the terminal diagram."""
    index = terminal_index()
    i = TERMINAL_INDEX_OBJECT
    return Cone(
        name=trivial_cone_id(x),
        apex=x,
        index=index,
        on_objects={i: x},
        diagram={index.identities[i]: Path.identity(x)},
        legs={i: Path.identity(x)},
    )


def make_cone(p: Presentation, name: str, apex: str, index: MaterializedCategory,
              on_objects: Mapping[str, str], arrow_images: Mapping[str, Path],
              legs: Mapping[str, Path]) -> Cone:
    """
    Build a cone from the images of the generating index arrows.

    The image of every index morphism is the composite of the images along
    its canonical path.
    """
    for i in index.objects:
        if i not in on_objects:
            raise ConeValidationError(f"index object {i} has no image")
        if i not in legs:
            raise ConeValidationError(f"index object {i} has no leg")
    images = {}
    for arrow, path in arrow_images.items():
        try:
            images[arrow] = reduce_path(p.generators, path)
        except PathTypingError as e:
            raise ConeValidationError(str(e), arrow) from e
    diagram = {}
    for m in index.morphisms:
        rep = index.rep[m]
        path = Path.identity(on_objects[rep.start])
        for arrow in rep.edges:
            if arrow not in images:
                raise ConeValidationError(f"index arrow {arrow} has no image", arrow)
            if path.end != images[arrow].start:
                raise ConeValidationError(f"diagram does not compose along {m}", m)
            path = path.then(images[arrow])
        diagram[m] = path
    reduced_legs = {}
    for i, path in legs.items():
        try:
            reduced_legs[i] = reduce_path(p.generators, path)
        except PathTypingError as e:
            raise ConeValidationError(str(e)) from e
    return Cone(name=name, apex=apex, index=index, on_objects=dict(on_objects),
                diagram=diagram, legs=reduced_legs)


def validate_cone(p: Presentation, cone: Cone, bound: int) -> None:
    """
    Check typing, functoriality of the diagram and naturality of the legs.

    Raises:
        ConeValidationError naming the offending index morphism
    """
    if not p.has_object(cone.apex):
        raise ConeValidationError(f"cone {cone.name}: unknown object {cone.apex}")
    for i in cone.index_objects:
        x = cone.on_objects.get(i)
        if x is None or not p.has_object(x):
            raise ConeValidationError(f"cone {cone.name}: unknown object {x}")
        leg = cone.legs.get(i)
        if leg is None or leg.start != cone.apex or leg.end != x:
            raise ConeValidationError(f"cone {cone.name}: leg at {i} must go from {cone.apex} to {x}")

    index = cone.index
    for m in index.morphisms:
        path = cone.diagram.get(m)
        if path is None:
            raise ConeValidationError(f"cone {cone.name}: index morphism {m} has no image", m)
        if path.start != cone.on_objects[index.src[m]] or path.end != cone.on_objects[index.tgt[m]]:
            raise ConeValidationError(f"cone {cone.name}: image of {m} has the wrong endpoints", m)

    checks: List[Tuple[str, Path, Path]] = []
    for i, m in index.identities.items():
        checks.append((m, cone.diagram[m], Path.identity(cone.on_objects[i])))
    for g in index.morphisms:
        for f in index.morphisms:
            if index.tgt[f] == index.src[g]:
                gf = index.compose(g, f)
                checks.append((gf, cone.diagram[f].then(cone.diagram[g]), cone.diagram[gf]))
    for m in cone.arrows:
        checks.append((m, cone.legs[index.src[m]].then(cone.diagram[m]), cone.legs[index.tgt[m]]))

    for m, u, v in checks:
        verdict = decide_equal(p, u, v, bound)
        if verdict.is_distinct:
            raise ConeValidationError(f"cone {cone.name} is not natural at index morphism {m}: {u} != {v}", m)
        if verdict.is_unknown:
            logging.warning(f"Cone {cone.name}: could not decide {u} = {v} ({verdict.detail})")


def make_sketch(p: Presentation, cones: Sequence[Cone], bounds: Optional[Bounds] = None) -> LimitSketch:
    """
    Build a limit sketch, inserting the trivial cone of every object not already covered.

    Args:
        p: Base presentation
        cones: User cones, validated against p
        bounds: Search budgets for naturality checks

    Returns:
        LimitSketch with trivial cones first (object order), then the user cones
    """
    bounds = bounds or Bounds()
    names = [c.name for c in cones]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise DuplicateIdError(f"duplicate cone names: {', '.join(duplicates)}")
    for cone in cones:
        validate_cone(p, cone, bounds.max_word_len)

    trivial_index: Dict[str, str] = {}
    for cone in cones:
        if cone.is_trivial and cone.apex not in trivial_index:
            trivial_index[cone.apex] = cone.name
    inserted = []
    for x in p.objects:
        if x in trivial_index:
            continue
        cone = trivial_cone(p, x)
        if cone.name in names:
            raise DuplicateIdError(f"cone name {cone.name} is reserved for the trivial cone of {x}")
        inserted.append(cone)
        trivial_index[x] = cone.name
    sketch = LimitSketch(base=p, cones=tuple(inserted) + tuple(cones), trivial_index=trivial_index)
    logging.debug(f"Sketch with {len(sketch.cones)} cones ({len(inserted)} trivial inserted)")
    return sketch


def free_sketch(p: Presentation) -> LimitSketch:
    return make_sketch(p, [])


def underlying_category(s: LimitSketch) -> Presentation:
    return s.base


def cone_families(c: MaterializedCategory, index_objects: Sequence[str], targets: Mapping[str, str],
                  arrows: Sequence[Tuple[str, str, str]], y: str) -> List[Tuple[str, ...]]:
    """
    All cones from y over a diagram in c.

    Args:
        c: Finite category
        index_objects: Index objects, in the order of the returned tuples
        targets: Index object -> object of c
        arrows: (source, target, morphism of c) for every non-identity index morphism
        y: Apex object

    Returns:
        Leg tuples κ with arrow∘κ_source = κ_target, in canonical order
    """
    families: List[Tuple[str, ...]] = []
    position = {i: k for k, i in enumerate(index_objects)}
    checks_at: Dict[int, List[Tuple[int, int, str]]] = {}
    for s, t, m in arrows:
        checks_at.setdefault(max(position[s], position[t]), []).append((position[s], position[t], m))

    def extend(k: int, legs: List[str]) -> None:
        if k == len(index_objects):
            families.append(tuple(legs))
            return
        for h in c.hom(y, targets[index_objects[k]]):
            legs.append(h)
            if all(c.compose(m, legs[s]) == legs[t] for s, t, m in checks_at.get(k, [])):
                extend(k + 1, legs)
            legs.pop()

    extend(0, [])
    return families


def cone_in(c: MaterializedCategory, cone: Cone) -> Tuple[Dict[str, str], List[Tuple[str, str, str]], Dict[str, str]]:
    """Evaluate a cone over c's originating presentation: (targets, arrows, legs)."""
    for x in [cone.apex] + list(cone.on_objects.values()):
        if x not in c.objects:
            raise ConeValidationError(f"cone {cone.name}: unknown object {x}")
    arrows = [(cone.arrow_src(m), cone.arrow_tgt(m), c.evaluate(cone.diagram[m])) for m in cone.arrows]
    legs = {i: c.evaluate(cone.legs[i]) for i in cone.index_objects}
    return dict(cone.on_objects), arrows, legs


def induced_family(c: MaterializedCategory, cone: Cone, legs: Mapping[str, str], h: str) -> Tuple[str, ...]:
    return tuple(c.compose(legs[i], h) for i in cone.index_objects)


def check_limit_cone(c: MaterializedCategory, cone: Cone) -> bool:
    """
    Decide whether a cone is a limit cone in a finite category.

    Every cone from every object y must factor through the apex by exactly
    one morphism.
    """
    targets, arrows, legs = cone_in(c, cone)
    for y in c.objects:
        induced = [induced_family(c, cone, legs, h) for h in c.hom(y, cone.apex)]
        if len(set(induced)) != len(induced):
            return False
        families = cone_families(c, cone.index_objects, targets, arrows, y)
        if set(families) != set(induced):
            return False
    return True


def map_cone(m: PresentationMap, cone: Cone) -> Cone:
    """Image of a cone under a presentation map."""
    return Cone(
        name=cone.name,
        apex=m.on_objects[cone.apex],
        index=cone.index,
        on_objects={i: m.on_objects[x] for i, x in cone.on_objects.items()},
        diagram={k: reduce_path(m.target.generators, m.apply(path)) for k, path in cone.diagram.items()},
        legs={i: reduce_path(m.target.generators, m.apply(path)) for i, path in cone.legs.items()},
    )


def is_realized(s: LimitSketch, bounds: Optional[Bounds] = None) -> Union[bool, Unknown]:
    """
    Whether every specified cone is a limit cone in the base category.

    Returns:
        True/False, or Unknown when the base does not materialize within bounds
    """
    bounds = bounds or Bounds()
    c = materialize_within(s.base, bounds)
    if not isinstance(c, MaterializedCategory):
        logging.warning(f"is_realized undecided: {c.reason}")
        return Unknown(reason=c.reason)
    for cone in s.cones:
        if not check_limit_cone(c, cone):
            logging.info(f"Cone {cone.name} is not a limit cone")
            return False
    return True


def _verdict_equal(p: Presentation, u: Path, v: Path, bound: int) -> bool:
    return decide_equal(p, u, v, bound).is_equal


def validate_sketch_map(m: SketchMap, source: LimitSketch, target: LimitSketch,
                        bounds: Optional[Bounds] = None) -> SketchMapCheck:
    """
    Check the conditions of a sketch map: functor, apex, index, diagram and legs.

    Returns:
        SketchMapCheck; on failure ``clause`` names the violated condition
    """
    bound = (bounds or Bounds()).max_word_len
    F = m.functor
    if F.source != source.base or F.target != target.base:
        return SketchMapCheck(ok=False, clause="functor", detail="functor is not typed between the bases")
    problems = validate_map(F, bound)
    if problems:
        return SketchMapCheck(ok=False, clause="functor", detail=problems[0])

    for cone in source.cones:
        image_name = m.cone_map.get(cone.name)
        image = target.cone(image_name) if image_name is not None else None
        if image is None:
            return SketchMapCheck(ok=False, clause="cone_map", detail=f"cone {cone.name} has no image cone")
        if F.on_objects[cone.apex] != image.apex:
            return SketchMapCheck(ok=False, clause="apex",
                                  detail=f"F({cone.apex}) != apex of {image.name}")
        if cone.index != image.index:
            return SketchMapCheck(ok=False, clause="index",
                                  detail=f"index categories of {cone.name} and {image.name} differ")
        for i, x in cone.on_objects.items():
            if F.on_objects[x] != image.on_objects[i]:
                return SketchMapCheck(ok=False, clause="diagram", detail=f"objects differ at index {i}")
        for k, path in cone.diagram.items():
            if not _verdict_equal(target.base, F.apply(path), image.diagram[k], bound):
                return SketchMapCheck(ok=False, clause="diagram", detail=f"diagrams differ at {k}")
        for i, path in cone.legs.items():
            if not _verdict_equal(target.base, F.apply(path), image.legs[i], bound):
                return SketchMapCheck(ok=False, clause="legs", detail=f"legs differ at {i}")
    return SketchMapCheck(ok=True)


def identity_sketch_map(s: LimitSketch) -> SketchMap:
    return SketchMap(functor=identity_map(s.base), cone_map={name: name for name in s.cone_names})


def compose_sketch_maps(m2: SketchMap, m1: SketchMap) -> SketchMap:
    """Return m2∘m1."""
    return SketchMap(
        functor=compose_maps(m2.functor, m1.functor),
        cone_map={a: m2.cone_map[b] for a, b in m1.cone_map.items()},
    )


def counit_map(s: LimitSketch) -> SketchMap:
    """Counit at a realized sketch: the identity."""
    return identity_sketch_map(s)
