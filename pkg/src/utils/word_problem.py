import logging
from collections import deque
from typing import Dict, Iterator, List, Optional, Set, Tuple, Union

from models.bounds import Bounds
from models.graph import Path
from models.presentation import (
    Diverged, EqStatus, EqVerdict, MaterializedCategory, Presentation,
)
from utils.cache_manager import get_cache
from utils.errors import PathTypingError
from utils.paths import reduce_path
from utils.todd_coxeter import enumerate_cosets

# cap on paths visited by one rewrite search
MAX_REWRITE_VISITS = 50_000


def _check_presentation(p: Presentation) -> None:
    for rel in p.relations:
        for side in (rel.lhs, rel.rhs):
            for edge in side.edges:
                if edge not in p.generators.graph.src:
                    raise PathTypingError(f"relation {rel} uses unknown edge {edge}")


def materialize(p: Presentation, max_len: int, max_morphisms: int,
                max_nodes: int = Bounds().max_nodes) -> Union[MaterializedCategory, Diverged]:
    """
    Compute the finite category presented by p, if it closes within the bounds.

    Args:
        p: Presentation
        max_len: Longest defining word the enumeration may create
        max_morphisms: Largest accepted number of morphisms
        max_nodes: Budget of node definitions for coset enumeration

    Returns:
        MaterializedCategory, or Diverged with the composite that escaped
    """
    if max_len < 1 or max_morphisms < 1:
        raise ValueError("materialize bounds must be at least 1")
    _check_presentation(p)

    cache = get_cache()
    params = {"max_word_len": max_len, "max_morphisms": max_morphisms, "max_nodes": max_nodes}
    key = cache.get_cache_key("materialize", p.model_dump_json(), params)
    cached = cache.load_from_cache(key)
    if cached is not None:
        if cached["kind"] == "category":
            return MaterializedCategory.model_validate(cached["value"])
        return Diverged.model_validate(cached["value"])

    result = _materialize(p, max_len, max_morphisms, max_nodes)
    kind = "category" if isinstance(result, MaterializedCategory) else "diverged"
    cache.save_to_cache(key, params, {"kind": kind, "value": result.model_dump(mode="json")}, "materialize")
    return result


def materialize_within(p: Presentation, bounds: Bounds) -> Union[MaterializedCategory, Diverged]:
    return materialize(p, bounds.max_word_len, bounds.max_morphisms, bounds.max_nodes)


def _materialize(p: Presentation, max_len: int, max_morphisms: int,
                 max_nodes: int) -> Union[MaterializedCategory, Diverged]:
    # grow the Cayley graphs, then reject anything short of a complete table
    table = enumerate_cosets(p, max_len=max_len, max_nodes=max_nodes)
    if table.overflow:
        logging.info(f"Materialization diverged: node budget {max_nodes} exhausted")
        return Diverged(reason=f"node budget {max_nodes} exhausted", witness=table.first_gap())
    gap = table.first_gap()
    if gap is not None:
        logging.info(f"Materialization diverged: {gap} escapes length {max_len}")
        return Diverged(reason=f"composite {gap} escapes word length {max_len}", witness=gap)
    if not table.relations_hold():
        return Diverged(reason="relations do not close within the bounds")

    # one morphism per live node, named by its shortlex word
    words = table.shortlex_words()
    if len(words) > max_morphisms:
        return Diverged(reason=f"more than {max_morphisms} morphisms")

    nodes = sorted(words, key=lambda c: table.word_path(words[c], table.root[c]).sort_key())
    reps = {c: table.word_path(words[c], table.root[c]) for c in nodes}
    ids = {c: str(reps[c]) for c in nodes}
    position = {c: i for i, c in enumerate(nodes)}

    # row g, column f holds g∘f, -1 when not composable
    compose_rows = []
    for g in nodes:
        row = []
        g_word = [table.gen_index[e] for e in reps[g].edges]
        for f in nodes:
            if table.target[f] != table.root[g]:
                row.append(-1)
                continue
            row.append(position[table.follow_path(f, g_word, define=False)])
        compose_rows.append(tuple(row))

    identities = {x: ids[table.find(table.roots[x])] for x in p.objects}
    generator_images = {}
    for e in p.edges:
        node = table.follow_step(table.roots[p.src(e)], table.gen_index[e], define=False)
        generator_images[e] = ids[node]
    # identity edges map to the identity morphisms
    for x, edge in p.generators.ident.items():
        generator_images[edge] = identities[x]

    category = MaterializedCategory(
        objects=p.objects,
        morphisms=tuple(ids[c] for c in nodes),
        src={ids[c]: table.root[c] for c in nodes},
        tgt={ids[c]: table.target[c] for c in nodes},
        identities=identities,
        compose_table=tuple(compose_rows),
        generator_images=generator_images,
        rep={ids[c]: reps[c] for c in nodes},
    )
    logging.debug(f"Materialized {len(p.objects)} objects, {category.size} morphisms")
    return category


def _rewrite_rules(p: Presentation) -> List[Tuple[str, Tuple[str, ...], Tuple[str, ...]]]:
    rules = []
    for rel in p.relations:
        rules.append((rel.lhs.start, rel.lhs.edges, rel.rhs.edges))
        rules.append((rel.lhs.start, rel.rhs.edges, rel.lhs.edges))
    return rules


def _rewrites(p: Presentation, rules, start: str, word: Tuple[str, ...]) -> Iterator[Tuple[str, ...]]:
    """Every word obtained by replacing one occurrence of a relation side by the other."""
    vertices = [start] + [p.tgt(e) for e in word]
    n = len(word)
    for at, old, new in rules:
        k = len(old)
        if k == 0:
            for i in range(n + 1):
                if vertices[i] == at:
                    yield word[:i] + new + word[i:]
            continue
        for i in range(n - k + 1):
            if word[i:i + k] == old:
                yield word[:i] + new + word[i + k:]


class _Search:
    """One side of the bidirectional rewrite search."""

    def __init__(self, word: Tuple[str, ...]):
        self.seen: Set[Tuple[str, ...]] = {word}
        self.frontier = deque([word])
        self.escaped = False

    @property
    def closed(self) -> bool:
        return not self.frontier and not self.escaped


def decide_equal(p: Presentation, u: Path, v: Path, bound: int,
                 max_morphisms: Optional[int] = None) -> EqVerdict:
    """
    Decide whether two parallel paths are equal in the category presented by p.

    Args:
        p: Presentation
        u: First path
        v: Second path
        bound: Longest intermediate path the search may visit
        max_morphisms: Morphism budget of the Cayley-table fallback (default from the environment)

    Returns:
        Equal, Distinct (certified) or Unknown
    """
    u = reduce_path(p.generators, u)
    v = reduce_path(p.generators, v)
    if u.start != v.start or u.end != v.end:
        raise PathTypingError(f"{u} and {v} are not parallel")
    if u == v:
        return EqVerdict(status=EqStatus.EQUAL, detail="identical reduced paths")

    rules = _rewrite_rules(p)
    left, right = _Search(u.edges), _Search(v.edges)
    visits = 2
    while left.frontier or right.frontier:
        for side, other in ((left, right), (right, left)):
            if not side.frontier:
                continue
            word = side.frontier.popleft()
            for nxt in _rewrites(p, rules, u.start, word):
                if len(nxt) > bound:
                    side.escaped = True
                    continue
                if nxt in other.seen:
                    return EqVerdict(status=EqStatus.EQUAL, detail=f"rewrite search met at length {len(nxt)}")
                if nxt not in side.seen:
                    side.seen.add(nxt)
                    side.frontier.append(nxt)
                    visits += 1
            # out of budget counts as escaping on both sides
            if visits > MAX_REWRITE_VISITS:
                left.escaped = right.escaped = True
                left.frontier.clear()
                right.frontier.clear()
                break
        for side in (left, right):
            if side.closed:
                return EqVerdict(status=EqStatus.DISTINCT,
                                 detail=f"closed component of {len(side.seen)} paths")

    # both sides escaped: try to close the table at the same word length
    if bound >= 1:
        if max_morphisms is None:
            max_morphisms = Bounds.from_env().max_morphisms
        category = materialize(p, max_len=bound, max_morphisms=max_morphisms)
        if isinstance(category, MaterializedCategory):
            if category.evaluate(u) == category.evaluate(v):
                return EqVerdict(status=EqStatus.EQUAL, detail="equal in the closed Cayley table")
            return EqVerdict(status=EqStatus.DISTINCT, detail="separated by the closed Cayley table")
    logging.debug(f"decide_equal({u}, {v}) unknown at bound {bound}")
    return EqVerdict(status=EqStatus.UNKNOWN, detail=f"bound {bound} hit")


def component(p: Presentation, u: Path, bound: int) -> Tuple[Set[Tuple[str, ...]], bool]:
    """
    Exhaustive bounded component of a path in the rewrite graph.

    Returns:
        (edge words of the component, True if no rewrite escaped the bound)
    """
    u = reduce_path(p.generators, u)
    rules = _rewrite_rules(p)
    search = _Search(u.edges)
    while search.frontier:
        word = search.frontier.popleft()
        for nxt in _rewrites(p, rules, u.start, word):
            if len(nxt) > bound:
                search.escaped = True
            elif nxt not in search.seen:
                search.seen.add(nxt)
                search.frontier.append(nxt)
    return search.seen, not search.escaped
