"""
Lifting, orthogonality and the saturation loop computing E -> fibr(E).

Each pass of the loop looks at every object y and every non-trivial cone α
of the current category. Cones from y with no filler get one attached by a
pushout along r_{y,α}; fillers inducing the same cone are identified. When
the current category does not close within the budgets, the pass works on
a shallow Cayley table instead; everything it adds holds in the universal
realization, and only an exact pass with no events stabilizes.
"""

import logging
from typing import Dict, Iterator, List, Optional, Tuple, Union

from models.bounds import Bounds
from models.cell import GeneratingCell
from models.graph import Path
from models.presentation import CategoryFunctor, MaterializedCategory, Presentation, PresentationMap, Unknown
from models.realization import (
    LiftingProblem, OrthoStatus, OrthoVerdict, RealizationResult, RealizationStatus,
    SoaEvent, SoaEventKind, SoaState,
)
from models.sketch import Cone, LimitSketch, SketchMap
from utils.cells import filler_cell, generating_set, induced_from_cone
from utils.errors import PreconditionError, RealizationError
from utils.functors import enumerate_functors, functor_to_map, map_to_functor
from utils.gluing import compose_maps, identity_map, inclusion_map, pushout, quotient, to_terminal
from utils.sketch_service import check_limit_cone, cone_families, cone_in, induced_family, map_cone
from utils.todd_coxeter import CayleyTable, enumerate_cosets
from utils.word_problem import materialize_within


def _materialize_pair(a: Presentation, b: Presentation, bounds: Bounds):
    ma = materialize_within(a, bounds)
    if not isinstance(ma, MaterializedCategory):
        return Unknown(reason=ma.reason), None
    mb = materialize_within(b, bounds)
    if not isinstance(mb, MaterializedCategory):
        return Unknown(reason=mb.reason), None
    return ma, mb


def _pin_along(m: PresentationMap, values: Dict[str, str], objects: Dict[str, str],
               fixed_edges: Dict[str, str], fixed_objects: Dict[str, str]) -> bool:
    """
    Prescribe a functor on the image of m: edge images that are single generators
    get the value of their preimage. Returns False on a conflicting prescription.
    """
    for x, y in m.on_objects.items():
        if fixed_objects.setdefault(y, objects[x]) != objects[x]:
            return False
    for e, image in m.on_edges.items():
        if len(image.edges) == 1:
            target = image.edges[0]
            if fixed_edges.setdefault(target, values[e]) != values[e]:
                return False
    return True


def _lifts(lp: LiftingProblem, a: MaterializedCategory, b: MaterializedCategory) -> List[PresentationMap]:
    i, g, top, bottom = lp.left, lp.right, lp.top, lp.bottom
    top_f = map_to_functor(top, a)
    bottom_f = map_to_functor(bottom, b)
    fixed_edges: Dict[str, str] = {}
    fixed_objects: Dict[str, str] = {}
    if not _pin_along(i, top_f.on_edges, top_f.on_objects, fixed_edges, fixed_objects):
        return []

    lifts = []
    for h in enumerate_functors(i.target, a, fixed_objects, fixed_edges):
        if any(h.evaluate(a, i.on_edges[e]) != top_f.on_edges[e] for e in i.source.edges):
            continue
        if any(g.on_objects[h.on_objects[y]] != bottom.on_objects[y] for y in i.target.objects):
            continue
        if any(b.evaluate(g.apply(a.rep[h.on_edges[e]])) != bottom_f.on_edges[e] for e in i.target.edges):
            continue
        lifts.append(functor_to_map(h, i.target, a, g.source))
    return lifts


def _commutes(lp: LiftingProblem, b: MaterializedCategory) -> bool:
    for x in lp.left.source.objects:
        if lp.right.on_objects[lp.top.on_objects[x]] != lp.bottom.on_objects[lp.left.on_objects[x]]:
            return False
    for e in lp.left.source.edges:
        u = lp.right.apply(lp.top.on_edges[e])
        v = lp.bottom.apply(lp.left.on_edges[e])
        if b.evaluate(u) != b.evaluate(v):
            return False
    return True


def find_lifts(lp: LiftingProblem, bounds: Optional[Bounds] = None) -> Union[List[PresentationMap], Unknown]:
    """
    All diagonal fillers h: Y -> A with h∘left = top and right∘h = bottom.

    Returns:
        Lifts as presentation maps, or Unknown when A or B does not materialize

    Raises:
        PreconditionError when the square does not commute
    """
    bounds = bounds or Bounds()
    a, b = _materialize_pair(lp.right.source, lp.right.target, bounds)
    if b is None:
        return a
    if not _commutes(lp, b):
        raise PreconditionError("lifting square does not commute")
    return _lifts(lp, a, b)


def _squares(f: PresentationMap, g: PresentationMap, a: MaterializedCategory, b: MaterializedCategory,
             under: Optional[Tuple[PresentationMap, PresentationMap]]) -> Iterator[LiftingProblem]:
    fixed_edges: Dict[str, str] = {}
    fixed_objects: Dict[str, str] = {}
    structure: Optional[CategoryFunctor] = None
    if under is not None:
        s_x, s_a = under
        structure = map_to_functor(s_a, a)
        if not _pin_along(s_x, structure.on_edges, structure.on_objects, fixed_edges, fixed_objects):
            return
    for top in enumerate_functors(f.source, a, fixed_objects, fixed_edges):
        if structure is not None:
            s_x = under[0]
            if any(top.evaluate(a, s_x.on_edges[e]) != structure.on_edges[e] for e in s_x.source.edges):
                continue
        top_map = functor_to_map(top, f.source, a, g.source)
        outer = map_to_functor(compose_maps(g, top_map), b)
        bottom_edges: Dict[str, str] = {}
        bottom_objects: Dict[str, str] = {}
        if not _pin_along(f, outer.on_edges, outer.on_objects, bottom_edges, bottom_objects):
            continue
        for bottom in enumerate_functors(f.target, b, bottom_objects, bottom_edges):
            lp = LiftingProblem(left=f, right=g, top=top_map,
                                bottom=functor_to_map(bottom, f.target, b, g.target))
            if _commutes(lp, b):
                yield lp


def orthogonal(f: PresentationMap, g: PresentationMap, bounds: Optional[Bounds] = None,
               under: Optional[Tuple[PresentationMap, PresentationMap]] = None) -> OrthoVerdict:
    """
    Decide unique orthogonality f ↓ g over every commuting square.

    Args:
        f: Left map X -> Y
        g: Right map A -> B
        bounds: Search budgets
        under: Structure maps (E -> X, E -> A); squares are then taken under E

    Returns:
        OrthoVerdict; NotOrthogonal carries a square with zero or several lifts
    """
    bounds = bounds or Bounds()
    a, b = _materialize_pair(g.source, g.target, bounds)
    if b is None:
        return OrthoVerdict(status=OrthoStatus.UNKNOWN, reason=a.reason)
    count = 0
    for lp in _squares(f, g, a, b, under):
        count += 1
        lifts = _lifts(lp, a, b)
        if len(lifts) != 1:
            logging.info(f"Square {count} has {len(lifts)} lifts")
            return OrthoVerdict(status=OrthoStatus.NOT_ORTHOGONAL, witness=lp, lifts=tuple(lifts),
                                squares=count, reason=f"{len(lifts)} lifts")
    return OrthoVerdict(status=OrthoStatus.UNIQUELY_ORTHOGONAL, squares=count)


def _checked_cones(s: LimitSketch) -> List[Cone]:
    return [cone for cone in s.cones if not s.is_trivial(cone.name)]


def _exact_events(c: MaterializedCategory, s: LimitSketch, iteration: int) -> List[SoaEvent]:
    events = []
    for y in c.objects:
        for cone in _checked_cones(s):
            targets, arrows, legs = cone_in(c, cone)
            by_family: Dict[Tuple[str, ...], List[str]] = {}
            for h in c.hom(y, cone.apex):
                by_family.setdefault(induced_family(c, cone, legs, h), []).append(h)
            for family in cone_families(c, cone.index_objects, targets, arrows, y):
                if family not in by_family:
                    events.append(SoaEvent(
                        kind=SoaEventKind.ATTACH, iteration=iteration, y=y, alpha=cone.name,
                        legs={i: c.rep[m] for i, m in zip(cone.index_objects, family)}))
            for fillers in by_family.values():
                for h in fillers[1:]:
                    events.append(SoaEvent(kind=SoaEventKind.IDENTIFY, iteration=iteration, y=y,
                                           alpha=cone.name, left=c.rep[h], right=c.rep[fillers[0]]))
    return events


class _Probe:
    """Morphisms of a truncated Cayley table with short canonical words."""

    def __init__(self, table: CayleyTable, word_len: int):
        self.table = table
        words = table.shortlex_words()
        self.nodes = sorted((c for c, w in words.items() if len(w) <= word_len),
                            key=lambda c: table.word_path(words[c], table.root[c]).sort_key())
        self.paths = {c: table.word_path(words[c], table.root[c]) for c in self.nodes}

    def hom(self, x: str, y: str) -> List[int]:
        return [c for c in self.nodes if self.table.root[c] == x and self.table.target[c] == y]

    def follow(self, c: int, path: Path) -> Optional[int]:
        word = [self.table.gen_index[e] for e in path.edges]
        return self.table.follow_path(c, word, define=False)


def _probe_headroom(s: LimitSketch) -> int:
    """Extra word length needed to trace relations and cone legs from a short morphism."""
    relations = max((max(len(rel.lhs), len(rel.rhs)) for rel in s.base.relations), default=0)
    cones = max((max((len(p) for p in cone.legs.values()), default=0)
                 + max((len(p) for p in cone.diagram.values()), default=0)
                 for cone in _checked_cones(s)), default=0)
    return relations + cones


def _probe_events(s: LimitSketch, bounds: Bounds, iteration: int) -> List[SoaEvent]:
    cones = _checked_cones(s)
    headroom = _probe_headroom(s)
    # room to trace every leg and diagram edge from a short word
    table = enumerate_cosets(s.base, max_len=bounds.probe_word_len + headroom, max_nodes=bounds.max_nodes)
    probe = _Probe(table, bounds.probe_word_len)
    logging.debug(f"Probe table: {len(probe.nodes)} short morphisms, overflow={table.overflow}")

    events = []
    for y in s.base.objects:
        for cone in cones:
            # group the short fillers by the cone they induce
            by_family: Dict[Tuple[int, ...], List[int]] = {}
            for h in probe.hom(y, cone.apex):
                family = tuple(probe.follow(h, cone.legs[i]) for i in cone.index_objects)
                if None not in family:
                    by_family.setdefault(family, []).append(h)

            # a natural family with no filler needs a new one
            for family in _probe_families(probe, cone, y):
                if family not in by_family:
                    events.append(SoaEvent(
                        kind=SoaEventKind.ATTACH, iteration=iteration, y=y, alpha=cone.name,
                        legs={i: probe.paths[c] for i, c in zip(cone.index_objects, family)}))
            # fillers inducing the same cone are identified with the first
            for fillers in by_family.values():
                for h in fillers[1:]:
                    events.append(SoaEvent(kind=SoaEventKind.IDENTIFY, iteration=iteration, y=y,
                                           alpha=cone.name, left=probe.paths[h], right=probe.paths[fillers[0]]))
    return events


def _probe_families(probe: _Probe, cone: Cone, y: str) -> List[Tuple[int, ...]]:
    """Cones from y over the diagram whose naturality is confirmed by the probe table."""
    families: List[Tuple[int, ...]] = []
    index_objects = list(cone.index_objects)
    position = {i: k for k, i in enumerate(index_objects)}
    checks_at: Dict[int, List[Tuple[int, int, Path]]] = {}
    for m in cone.arrows:
        s, t = position[cone.arrow_src(m)], position[cone.arrow_tgt(m)]
        checks_at.setdefault(max(s, t), []).append((s, t, cone.diagram[m]))

    def extend(k: int, legs: List[int]) -> None:
        if k == len(index_objects):
            families.append(tuple(legs))
            return
        for c in probe.hom(y, cone.on_objects[index_objects[k]]):
            legs.append(c)
            if all(probe.follow(legs[s], path) == probe.table.find(legs[t])
                   for s, t, path in checks_at.get(k, [])):
                extend(k + 1, legs)
            legs.pop()

    extend(0, [])
    return families


def _attach(state_sketch: LimitSketch, event: SoaEvent, suffix: str, bounds: Bounds) -> Tuple[LimitSketch, str]:
    """Pushout of r_{y,α} along the map E[y;α] -> C sending the fresh legs to κ."""
    fc = filler_cell(state_sketch, event.y, event.alpha, suffix)
    current = state_sketch.base
    along = induced_from_cone(fc.coinserter, identity_map(current), event.legs, bounds, verify=False)
    glued = pushout(fc.retract_map, along)
    filler = glued.left.on_edges[fc.filler].edges[0]
    return state_sketch.with_base(glued.result), filler


def initial_state(s: LimitSketch) -> SoaState:
    return SoaState(original=s, sketch=s)


def soa_step(state: SoaState, bounds: Optional[Bounds] = None) -> Tuple[SoaState, List[SoaEvent]]:
    """
    One saturation pass over the current category.

    Args:
        state: Current state
        bounds: Search budgets

    Returns:
        (new state, events of this pass). ``state.exact`` tells whether the
        pass ran on the exact materialization.
    """
    bounds = bounds or Bounds()
    iteration = state.iterations + 1
    sketch = state.sketch
    if not _checked_cones(sketch):
        return state.model_copy(update={"iterations": iteration, "exact": True}), []

    # decide events on the exact category when it closes, else on a shallow table
    category = materialize_within(sketch.base, bounds)
    exact = isinstance(category, MaterializedCategory)
    if exact:
        found = _exact_events(category, sketch, iteration)
    else:
        logging.info(f"Pass {iteration}: category does not close ({category.reason}); probing")
        found = _probe_events(sketch, bounds, iteration)

    # attach first; repeat cells over the same cone get a numbered suffix
    attachments = dict(state.attachments)
    events = []
    for event in found:
        if event.kind != SoaEventKind.ATTACH:
            continue
        key = f"{event.y}|{event.alpha}"
        count = attachments.get(key, 0)
        sketch, filler = _attach(sketch, event, "" if count == 0 else f"#{count}", bounds)
        attachments[key] = count + 1
        events.append(event.model_copy(update={"filler": filler}))
        logging.debug(events[-1].line())
    # identifications go in as one quotient after the attachments
    identifications = [e for e in found if e.kind == SoaEventKind.IDENTIFY]
    if identifications:
        sketch = sketch.with_base(quotient(sketch.base, [(e.left, e.right) for e in identifications]))
        for event in identifications:
            logging.debug(event.line())
    events.extend(identifications)

    new_state = SoaState(original=state.original, sketch=sketch, trace=state.trace + tuple(events),
                         iterations=iteration, attachments=attachments, exact=exact)
    return new_state, events


def realize(s: LimitSketch, max_iter: Optional[int] = None, bounds: Optional[Bounds] = None) -> RealizationResult:
    """
    Saturate a sketch until an exact pass produces no events.

    Args:
        s: Limit sketch E
        max_iter: Pass budget (defaults to bounds.max_iter)
        bounds: Search budgets

    Returns:
        RealizationResult with fibr(E), the unit λ!, the trace and the status
    """
    bounds = bounds or Bounds()
    max_iter = bounds.max_iter if max_iter is None else max_iter
    if max_iter < 0:
        raise ValueError("max_iter must be non-negative")

    state = initial_state(s)
    status = RealizationStatus.BUDGET_EXHAUSTED
    for _ in range(max_iter):
        state, events = soa_step(state, bounds)
        logging.info(f"Pass {state.iterations}: {len(events)} events ({'exact' if state.exact else 'probe'})")
        if not events:
            if state.exact:
                status = RealizationStatus.STABILIZED
            break

    realized = state.sketch
    unit = SketchMap(functor=inclusion_map(s.base, realized.base),
                     cone_map={name: name for name in s.cone_names})
    category = None
    if status == RealizationStatus.STABILIZED:
        materialized = materialize_within(realized.base, bounds)
        if isinstance(materialized, MaterializedCategory):
            category = materialized
    else:
        logging.warning(f"Realization stopped after {state.iterations} passes without stabilizing")
    logging.info(f"Realization {status.value}: {len(state.trace)} events, "
                 f"{category.size if category else '?'} morphisms")
    return RealizationResult(original=s, realized=realized, unit=unit, trace=state.trace,
                             iterations=state.iterations, status=status, category=category)


def require_stabilized(r: RealizationResult) -> None:
    """Raise RealizationError unless the loop stabilized."""
    if not r.is_stabilized:
        raise RealizationError(f"realization is {r.status.value}, not Stabilized")


def extend_along_unit(r: RealizationResult, F: PresentationMap,
                      bounds: Optional[Bounds] = None) -> Union[PresentationMap, Unknown]:
    """
    The unique F': fibr(E) -> D with F'∘λ! = F, by replaying the trace.

    Args:
        r: Stabilized realization of E
        F: Map E -> D sending every specified cone to a limit cone

    Returns:
        PresentationMap fibr(E) -> D, or Unknown when D does not materialize

    Raises:
        PreconditionError when a cone image is not a limit cone
    """
    bounds = bounds or Bounds()
    require_stabilized(r)
    if F.source != r.original.base:
        raise PreconditionError("F must start at the base of the realized sketch")
    d = materialize_within(F.target, bounds)
    if not isinstance(d, MaterializedCategory):
        return Unknown(reason=d.reason)
    for cone in r.original.cones:
        if not check_limit_cone(d, map_cone(F, cone)):
            raise PreconditionError(f"F does not send cone {cone.name} to a limit cone")

    on_edges = dict(F.on_edges)

    def image(path: Path) -> str:
        current = d.identities[F.on_objects[path.start]]
        for e in path.edges:
            current = d.compose(d.evaluate(on_edges[e]), current)
        return current

    for event in r.trace:
        if event.kind == SoaEventKind.ATTACH:
            cone = r.original.cone(event.alpha)
            legs = {i: d.evaluate(F.apply(cone.legs[i])) for i in cone.index_objects}
            kappa = {i: image(path) for i, path in event.legs.items()}
            fillers = [h for h in d.hom(F.on_objects[event.y], F.on_objects[cone.apex])
                       if all(d.compose(legs[i], h) == kappa[i] for i in cone.index_objects)]
            if len(fillers) != 1:
                raise PreconditionError(f"cone {cone.name} has {len(fillers)} fillers for {event.filler}")
            on_edges[event.filler] = d.rep[fillers[0]]
        elif image(event.left) != image(event.right):
            raise PreconditionError(f"identification {event.left} = {event.right} fails in the target")

    return PresentationMap(source=r.realized.base, target=F.target,
                           on_objects=dict(F.on_objects), on_edges=on_edges)


def realize_morphism(m: SketchMap, r_source: RealizationResult, r_target: RealizationResult,
                     bounds: Optional[Bounds] = None) -> Union[PresentationMap, Unknown]:
    """free(m) := extend_along_unit(r_source, λ!(E')∘m)."""
    require_stabilized(r_source)
    require_stabilized(r_target)
    return extend_along_unit(r_source, compose_maps(r_target.unit.functor, m.functor), bounds)


def fibrancy(r: RealizationResult, bounds: Optional[Bounds] = None,
             include_trivial: bool = False) -> List[Tuple[GeneratingCell, OrthoVerdict]]:
    """Orthogonality of every generating cell against fibr(E) -> *, under E."""
    return orthogonal_to_cells(r.original, r.unit.functor, bounds, include_trivial)


def orthogonal_to_cells(s: LimitSketch, structure: PresentationMap, bounds: Optional[Bounds] = None,
                        include_trivial: bool = False) -> List[Tuple[GeneratingCell, OrthoVerdict]]:
    """
    Check each r_{y,α} against the terminal map of a category under E.

    Args:
        s: Limit sketch E
        structure: Map E -> A
        include_trivial: Also check trivial-cone cells
    """
    bounds = bounds or Bounds()
    to_star = to_terminal(structure.target)
    results = []
    for cell in generating_set(s, include_trivial):
        verdict = orthogonal(cell.map, to_star, bounds, under=(cell.cell.coinserter.inclusion, structure))
        logging.info(f"Cell ({cell.y}, {cell.alpha}): {verdict.status.value}")
        results.append((cell, verdict))
    return results
