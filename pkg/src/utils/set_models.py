"""
Finite-set models of limit sketches.

A model assigns a canonical finite set to every object and a function to
every generating edge, satisfies every relation and sends every specified
cone to a limit cone in finite sets.
"""

import itertools
import logging
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from models.bounds import Bounds
from models.graph import Path
from models.presentation import MaterializedCategory, Presentation, PresentationMap, Unknown
from models.realization import RealizationResult, SoaEventKind
from models.set_model import Model, ModelBijectionReport
from models.sketch import Cone, LimitSketch
from utils.errors import ModelTypeError, PathTypingError
from utils.factorization import require_stabilized
from utils.word_problem import materialize_within


def _check_typed(p: Presentation, m: Model) -> None:
    for x in p.objects:
        if x not in m.carrier or m.carrier[x] < 0:
            raise ModelTypeError(f"model has no carrier for {x}")
    for e in p.edges:
        values = m.action.get(e)
        if values is None:
            raise ModelTypeError(f"model has no function for {e}")
        if len(values) != m.carrier[p.src(e)]:
            raise ModelTypeError(f"function for {e} has {len(values)} values, expected {m.carrier[p.src(e)]}")
        if any(v < 0 or v >= m.carrier[p.tgt(e)] for v in values):
            raise ModelTypeError(f"function for {e} leaves the carrier of {p.tgt(e)}")


def path_function(m: Model, path: Path) -> np.ndarray:
    """The function carrier(start) -> carrier(end) denoted by a reduced path."""
    current = np.arange(m.carrier[path.start], dtype=np.int64)
    for e in path.edges:
        current = np.asarray(m.action[e], dtype=np.int64)[current]
    return current


def relations_hold(p: Presentation, m: Model) -> bool:
    return all(np.array_equal(path_function(m, rel.lhs), path_function(m, rel.rhs)) for rel in p.relations)


def limit_set(m: Model, cone: Cone) -> List[Tuple[int, ...]]:
    """Limit of the cone's diagram in finite sets: compatible tuples over the index objects."""
    index_objects = list(cone.index_objects)
    position = {i: k for k, i in enumerate(index_objects)}
    arrows = [(position[cone.arrow_src(a)], position[cone.arrow_tgt(a)], path_function(m, cone.diagram[a]))
              for a in cone.arrows]
    ranges = [range(m.carrier[cone.on_objects[i]]) for i in index_objects]
    return [t for t in itertools.product(*ranges) if all(f[t[s]] == t[u] for s, u, f in arrows)]


def cone_is_limit(m: Model, cone: Cone) -> bool:
    """Whether the comparison carrier(apex) -> limit_set is a bijection."""
    legs = [path_function(m, cone.legs[i]) for i in cone.index_objects]
    images = [tuple(int(leg[a]) for leg in legs) for a in range(m.carrier[cone.apex])]
    return len(set(images)) == len(images) and set(images) == set(limit_set(m, cone))


def is_model(s: LimitSketch, m: Model) -> bool:
    """
    Check relations and limit cones.

    Raises:
        ModelTypeError when m is not typed over the base of s
    """
    _check_typed(s.base, m)
    if not relations_hold(s.base, m):
        return False
    return all(cone_is_limit(m, cone) for cone in s.cones)


def enumerate_models(s: LimitSketch, max_size: int) -> List[Model]:
    """
    All models whose carriers have at most max_size elements.

    Args:
        s: Limit sketch
        max_size: Largest carrier size

    Returns:
        Models in canonical order: carrier sizes, then functions, lexicographically
    """
    if max_size < 0:
        raise ValueError("max_size must be non-negative")
    p = s.base
    objects = list(p.objects)
    edges = list(p.edges)
    order = {e: k for k, e in enumerate(edges)}
    schedule: Dict[int, List[Tuple[Path, Path]]] = {}
    for rel in p.relations:
        last = max((order[e] for e in rel.lhs.edges + rel.rhs.edges), default=-1)
        schedule.setdefault(last, []).append((rel.lhs, rel.rhs))

    models: List[Model] = []
    for sizes in itertools.product(range(max_size + 1), repeat=len(objects)):
        carrier = dict(zip(objects, sizes))

        def extend(k: int, action: Dict[str, Tuple[int, ...]]) -> None:
            partial = Model(carrier=carrier, action=action)
            if any(not np.array_equal(path_function(partial, u), path_function(partial, v))
                   for u, v in schedule.get(k - 1, [])):
                return
            if k == len(edges):
                if all(cone_is_limit(partial, cone) for cone in s.cones):
                    models.append(partial)
                return
            e = edges[k]
            for values in itertools.product(range(carrier[p.tgt(e)]), repeat=carrier[p.src(e)]):
                action[e] = values
                extend(k + 1, action)
            action.pop(e, None)

        extend(0, {})
    logging.info(f"Enumerated {len(models)} models with carriers of size <= {max_size}")
    return models


def restrict_model(m: Model, F: PresentationMap) -> Model:
    """Precompose a model of F's target with F."""
    carrier = {x: m.carrier[F.on_objects[x]] for x in F.source.objects}
    action = {e: tuple(int(v) for v in path_function(m, F.on_edges[e])) for e in F.source.edges}
    labels = {x: m.labels[F.on_objects[x]] for x in F.source.objects if F.on_objects[x] in m.labels}
    return Model(carrier=carrier, action=action, labels=labels)


def transport_model(r: RealizationResult, X: Model) -> Model:
    """Model of E obtained by restricting a model of free(E) along the unit."""
    require_stabilized(r)
    _check_typed(r.realized.base, X)
    return restrict_model(X, r.unit.functor)


def lift_model(r: RealizationResult, X: Model, bounds: Optional[Bounds] = None) -> Model:
    """
    Extend a model of E to free(E) by replaying the realization trace.

    Each attached filler acts by the unique element of the limit matching
    its cone legs.

    Raises:
        ModelTypeError when X is not a model of E
    """
    require_stabilized(r)
    if not is_model(r.original, X):
        raise ModelTypeError("lift_model needs a model of the original sketch")
    action = dict(X.action)
    for event in r.trace:
        current = Model(carrier=X.carrier, action=action)
        if event.kind == SoaEventKind.IDENTIFY:
            if not np.array_equal(path_function(current, event.left), path_function(current, event.right)):
                raise ModelTypeError(f"identification {event.left} = {event.right} fails: not a model")
            continue
        cone = r.original.cone(event.alpha)
        legs = [path_function(current, cone.legs[i]) for i in cone.index_objects]
        lookup: Dict[Tuple[int, ...], int] = {}
        for b in range(X.carrier[cone.apex]):
            lookup.setdefault(tuple(int(leg[b]) for leg in legs), b)
        kappa = [path_function(current, event.legs[i]) for i in cone.index_objects]
        values = []
        for a in range(X.carrier[event.y]):
            family = tuple(int(k[a]) for k in kappa)
            if family not in lookup:
                raise ModelTypeError(f"cone {cone.name} has no limit element for {family}: not a model")
            values.append(lookup[family])
        action[event.filler] = tuple(values)
    return Model(carrier=dict(X.carrier), action={e: action[e] for e in r.realized.base.edges},
                 labels=dict(X.labels))


def model_bijection(r: RealizationResult, max_size: int) -> ModelBijectionReport:
    """Pair every model of free(E) with its restriction along the unit among the models of E."""
    require_stabilized(r)
    models_e = enumerate_models(r.original, max_size)
    models_free = enumerate_models(r.realized, max_size)
    position = {m.key(): k for k, m in enumerate(models_e)}
    pairing = [position.get(transport_model(r, X).key(), -1) for X in models_free]
    report = ModelBijectionReport(models_e=models_e, models_free=models_free, pairing=pairing, max_size=max_size)
    logging.info(f"Model bijection at size {max_size}: {len(models_e)} vs {len(models_free)}, "
                 f"bijective={report.is_bijection}")
    return report


def yoneda_model(s: LimitSketch, l: str, bounds: Optional[Bounds] = None) -> Union[Model, Unknown]:
    """
    The hom-model Hom(l, -) with postcomposition.

    Returns:
        Model labelled by morphism ids, or Unknown when the base does not materialize
    """
    if not s.base.has_object(l):
        raise PathTypingError(f"unknown object {l}")
    c = materialize_within(s.base, bounds or Bounds())
    if not isinstance(c, MaterializedCategory):
        return Unknown(reason=c.reason)
    homs = {x: c.hom(l, x) for x in s.base.objects}
    action = {}
    for e in s.base.edges:
        image = homs[s.base.tgt(e)]
        action[e] = tuple(image.index(c.compose(c.generator_images[e], h)) for h in homs[s.base.src(e)])
    return Model(carrier={x: len(homs[x]) for x in s.base.objects}, action=action,
                 labels={x: tuple(homs[x]) for x in s.base.objects})
