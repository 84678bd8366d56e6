"""
Cell constructions attached by the saturation loop.

The coinserter E[y;α] adds a cone of fresh legs γ_i: y -> φ(i) to E, glued
on along the free category of E's underlying graph and then quotiented by
naturality. The filler cell E[y;α]' adds one more edge γ̄: y -> apex whose
composites with the cone legs are the γ_i.
"""

import logging
from typing import List, Mapping, Optional, Union

from models.bounds import Bounds
from models.cell import Coinserter, FillerCell, GeneratingCell, PhiPair
from models.graph import Path
from models.presentation import MaterializedCategory, PresentationMap, Unknown
from models.sketch import Cone, LimitSketch
from utils.errors import ConeValidationError, PathTypingError, PreconditionError
from utils.gluing import compose_maps, fresh_id, inclusion_map, make_map, pushout, quotient
from utils.paths import build_presentation, edges_spec, reduce_path
from utils.word_problem import decide_equal, materialize_within


def leg_edge_id(y: str, alpha: str, i: str, suffix: str = "") -> str:
    return f"{y}:{alpha}:leg:{i}{suffix}"


def filler_edge_id(y: str, alpha: str, suffix: str = "") -> str:
    return f"{y}:{alpha}:fill{suffix}"


def _lookup(s: LimitSketch, y: str, alpha: str) -> Cone:
    if not s.base.has_object(y):
        raise PathTypingError(f"unknown object {y}")
    cone = s.cone(alpha)
    if cone is None:
        raise ConeValidationError(f"unknown cone {alpha}")
    return cone


def coinserter(s: LimitSketch, y: str, alpha: str, suffix: str = "") -> Coinserter:
    """
    Freely add a cone from y over the diagram of cone alpha.

    Args:
        s: Limit sketch E
        y: Object of E
        alpha: Cone name
        suffix: Appended to minted edge ids

    Returns:
        Coinserter with E[y;α], the inclusion i_{y,α} and the fresh legs
    """
    cone = _lookup(s, y, alpha)
    E = s.base
    base_edges = edges_spec(E)
    taken = set(E.generators.graph.edges)
    fresh = {}
    for i in cone.index_objects:
        fresh[i] = fresh_id(leg_edge_id(y, alpha, i, suffix), taken)
        taken.add(fresh[i])

    enlarged = dict(base_edges)
    for i, edge in fresh.items():
        enlarged[edge] = (y, cone.on_objects[i])
    free_base = build_presentation(E.objects, base_edges)
    free_enlarged = build_presentation(E.objects, enlarged)
    counit = make_map(free_base, E, {x: x for x in E.objects}, {e: E.edge_path(e) for e in E.edges})
    glued = pushout(inclusion_map(free_base, free_enlarged), counit)

    legs = {i: glued.left.on_edges[edge].edges[0] for i, edge in fresh.items()}

    def leg_path(i: str) -> Path:
        return Path(start=y, end=cone.on_objects[i], edges=(legs[i],))

    naturality = [(leg_path(cone.arrow_src(m)).then(cone.diagram[m]), leg_path(cone.arrow_tgt(m)))
                  for m in cone.arrows]
    result = quotient(glued.result, naturality)
    inclusion = make_map(E, result, {x: x for x in E.objects}, {e: E.edge_path(e) for e in E.edges})
    logging.debug(f"Coinserter at ({y}, {alpha}): {len(legs)} legs, {len(naturality)} naturality relations")
    return Coinserter(y=y, cone=cone, result=result, inclusion=inclusion, legs=legs)


def filler_cell(s: LimitSketch, y: str, alpha: str, suffix: str = "") -> FillerCell:
    """
    Extend the coinserter by a filler γ̄: y -> apex with (δ_α)_i∘γ̄ ~ γ_i.

    Returns:
        FillerCell with r_{y,α} and j_{y,α} = r_{y,α}∘i_{y,α}
    """
    co = coinserter(s, y, alpha, suffix)
    cone = co.cone
    base = co.result
    filler = fresh_id(filler_edge_id(y, alpha, suffix), base.generators.graph.edges)
    edges = edges_spec(base)
    edges[filler] = (y, cone.apex)
    gamma_bar = Path(start=y, end=cone.apex, edges=(filler,))
    pairs = [(rel.lhs, rel.rhs) for rel in base.relations]
    for i in cone.index_objects:
        pairs.append((gamma_bar.then(cone.legs[i]),
                      Path(start=y, end=cone.on_objects[i], edges=(co.legs[i],))))
    result = build_presentation(base.objects, edges, pairs)
    retract = inclusion_map(base, result)
    return FillerCell(coinserter=co, result=result, retract_map=retract, filler=filler,
                      unit_composite=compose_maps(retract, co.inclusion))


def induced_from_cone(c: Coinserter, F: PresentationMap, kappa: Mapping[str, Path],
                      bounds: Optional[Bounds] = None, verify: bool = True) -> PresentationMap:
    """
    The unique map E[y;α] -> D restricting to F and sending γ_i to κ_i.

    Args:
        c: Coinserter
        F: Map E -> D
        kappa: Cone legs in D from F(y), keyed by index object
        verify: Check naturality of kappa with the word-problem engine

    Raises:
        PreconditionError when kappa is mistyped or not natural
    """
    bound = (bounds or Bounds()).max_word_len
    if F.source != c.inclusion.source:
        raise PreconditionError("F must start at the base of the coinserter")
    D = F.target
    cone = c.cone
    legs = {}
    for i in cone.index_objects:
        if i not in kappa:
            raise PreconditionError(f"kappa has no leg at {i}")
        leg = reduce_path(D.generators, kappa[i])
        if leg.start != F.on_objects[c.y] or leg.end != F.on_objects[cone.on_objects[i]]:
            raise PreconditionError(f"kappa leg at {i} has the wrong endpoints")
        legs[i] = leg
    for m in (cone.arrows if verify else []):
        s, t = cone.arrow_src(m), cone.arrow_tgt(m)
        verdict = decide_equal(D, legs[s].then(F.apply(cone.diagram[m])), legs[t], bound)
        if not verdict.is_equal:
            raise PreconditionError(f"kappa is not natural at index morphism {m} ({verdict.status.value})")
    on_edges = dict(F.on_edges)
    for i, edge in c.legs.items():
        on_edges[edge] = legs[i]
    return make_map(c.result, D, F.on_objects, on_edges)


def induced_from_filler(fc: FillerCell, F: PresentationMap, h: Path,
                        bounds: Optional[Bounds] = None) -> PresentationMap:
    """
    The unique map E[y;α]' -> D restricting to F along r_{y,α} and sending γ̄ to h.

    Raises:
        PreconditionError naming the index object whose side condition fails
    """
    bound = (bounds or Bounds()).max_word_len
    if F.source != fc.coinserter.result:
        raise PreconditionError("F must start at the coinserter")
    D = F.target
    cone = fc.coinserter.cone
    h = reduce_path(D.generators, h)
    if h.start != F.on_objects[fc.y] or h.end != F.on_objects[cone.apex]:
        raise PreconditionError(f"filler {h} must go from F({fc.y}) to F({cone.apex})")
    for i in cone.index_objects:
        u = h.then(F.apply(cone.legs[i]))
        v = F.edge_image(fc.coinserter.legs[i])
        verdict = decide_equal(D, u, v, bound)
        if not verdict.is_equal:
            raise PreconditionError(f"side condition fails at index object {i}: {u} vs {v} ({verdict.status.value})")
    on_edges = dict(F.on_edges)
    on_edges[fc.filler] = h
    return make_map(fc.result, D, F.on_objects, on_edges)


def phi_set(s: LimitSketch, F: PresentationMap, y: str, alpha: str,
            bounds: Optional[Bounds] = None) -> Union[List[PhiPair], Unknown]:
    """
    Enumerate the pairs (G, h) with G∘i_{y,α} = F and G((δ_α)_i)∘h = G(γ_i).

    The filler h determines G: κ_i = F((δ_α)_i)∘h.

    Returns:
        PhiPairs ordered by (κ legs, h), or Unknown when F's target does not materialize
    """
    bounds = bounds or Bounds()
    c = coinserter(s, y, alpha)
    target = materialize_within(F.target, bounds)
    if not isinstance(target, MaterializedCategory):
        return Unknown(reason=target.reason)
    cone = c.cone
    legs = {i: target.evaluate(F.apply(cone.legs[i])) for i in cone.index_objects}
    pairs = []
    for h in target.hom(F.on_objects[y], F.on_objects[cone.apex]):
        kappa = {i: target.compose(legs[i], h) for i in cone.index_objects}
        on_edges = dict(F.on_edges)
        for i, edge in c.legs.items():
            on_edges[edge] = target.rep[kappa[i]]
        G = make_map(c.result, F.target, F.on_objects, on_edges)
        key = (tuple(target.index(kappa[i]) for i in cone.index_objects), target.index(h))
        pairs.append((key, PhiPair(legs=kappa, filler=h, functor=G)))
    pairs.sort(key=lambda item: item[0])
    return [pair for _, pair in pairs]


def generating_set(s: LimitSketch, include_trivial: bool = False) -> List[GeneratingCell]:
    """
    One cell r_{y,α} per object y and cone α.

    Trivial cones are skipped unless include_trivial is set.
    """
    cells = []
    for y in s.base.objects:
        for cone in s.cones:
            if s.is_trivial(cone.name) and not include_trivial:
                continue
            cells.append(GeneratingCell(y=y, alpha=cone.name, cell=filler_cell(s, y, cone.name)))
    logging.debug(f"Generating set: {len(cells)} cells")
    return cells
