"""
Coset enumeration for finitely presented categories.

One right Cayley graph is grown per object: its nodes are morphisms out of
that object, the neighbor in direction ``e`` is the composite with the
generating edge ``e``. Relations are traced from every node and the two
endpoints are identified (coincidence processing), as in the classical
Todd-Coxeter procedure for groups and monoids.

Node definitions are limited by the length of the defining word and by a
global node budget. A table is *complete* when every live node has every
applicable transition; a complete table in which every relation holds at
every node is exactly the quotient category.
"""

import logging
from collections import deque
from typing import Dict, List, Optional, Sequence, Tuple

from models.graph import Path
from models.presentation import Presentation

SENTINEL = -1


class CayleyTable:
    """
    Right Cayley graphs of a presentation, folded by coincidences.

    Labels form a union-find structure with ``labels[i] <= i``; the
    survivor of a coincidence is always the older node.
    """

    def __init__(self, presentation: Presentation, max_len: int, max_nodes: int):
        self.presentation = presentation
        self.max_len = max_len
        self.max_nodes = max_nodes
        self.gens: List[str] = sorted(presentation.edges)
        self.gen_index: Dict[str, int] = {e: i for i, e in enumerate(self.gens)}
        self.gen_src = [presentation.src(e) for e in self.gens]
        self.gen_tgt = [presentation.tgt(e) for e in self.gens]
        self.out_gens: Dict[str, List[int]] = {x: [] for x in presentation.objects}
        for d, e in enumerate(self.gens):
            self.out_gens[self.gen_src[d]].append(d)
        self.rels_at: Dict[str, List[Tuple[Tuple[int, ...], Tuple[int, ...]]]] = {
            x: [] for x in presentation.objects
        }
        for rel in presentation.relations:
            lhs = tuple(self.gen_index[e] for e in rel.lhs.edges)
            rhs = tuple(self.gen_index[e] for e in rel.rhs.edges)
            self.rels_at[rel.lhs.start].append((lhs, rhs))

        self.labels: List[int] = []
        self.neighbors: List[List[int]] = []
        self.root: List[str] = []
        self.target: List[str] = []
        self.word: List[Tuple[int, ...]] = []
        self.overflow = False
        self.roots: Dict[str, int] = {}
        for x in presentation.objects:
            self.roots[x] = self._add_node(x, x, ())

    def _add_node(self, root: str, target: str, word: Tuple[int, ...]) -> int:
        c = len(self.labels)
        self.labels.append(c)
        self.neighbors.append([SENTINEL] * len(self.gens))
        self.root.append(root)
        self.target.append(target)
        self.word.append(word)
        return c

    def find(self, c: int) -> int:
        labels = self.labels
        while labels[c] != c:
            labels[c] = labels[labels[c]]
            c = labels[c]
        return c

    def is_live(self, c: int) -> bool:
        return self.labels[c] == c

    def follow_step(self, c: int, d: int, define: bool = True) -> Optional[int]:
        """Neighbor of c in direction d; None when undefined and not definable."""
        c = self.find(c)
        n = self.neighbors[c][d]
        if n != SENTINEL:
            return self.find(n)
        if not define or len(self.word[c]) >= self.max_len:
            return None
        if len(self.labels) >= self.max_nodes:
            self.overflow = True
            return None
        n = self._add_node(self.root[c], self.gen_tgt[d], self.word[c] + (d,))
        self.neighbors[c][d] = n
        return n

    def follow_path(self, c: int, word: Sequence[int], define: bool = True) -> Optional[int]:
        for d in word:
            c = self.follow_step(c, d, define)
            if c is None:
                return None
        return self.find(c)

    def unify(self, c1: int, c2: int) -> bool:
        """Identify two nodes and propagate; returns True when anything merged."""
        merged = False
        to_unify = [(c1, c2)]
        while to_unify:
            c1, c2 = to_unify.pop()
            c1 = self.find(c1)
            c2 = self.find(c2)
            if c1 == c2:
                continue
            c1, c2 = min(c1, c2), max(c1, c2)
            self.labels[c2] = c1
            merged = True
            if len(self.word[c2]) < len(self.word[c1]):
                self.word[c1] = self.word[c2]
            for d in range(len(self.gens)):
                n1 = self.neighbors[c1][d]
                n2 = self.neighbors[c2][d]
                if n1 == SENTINEL:
                    self.neighbors[c1][d] = n2
                elif n2 != SENTINEL:
                    to_unify.append((n1, n2))
        return merged

    def build(self, max_passes: int = 64) -> "CayleyTable":
        """Define transitions and trace relations until nothing changes."""
        for _ in range(max_passes):
            changed = False
            to_visit = 0
            while to_visit < len(self.labels):
                if self.is_live(to_visit):
                    changed |= self._process(to_visit)
                to_visit += 1
                if self.overflow:
                    logging.debug(f"Cayley table overflow at {len(self.labels)} nodes")
                    return self
            if not changed:
                break
        return self

    def _process(self, c: int) -> bool:
        changed = False
        for d in self.out_gens[self.target[c]]:
            if self.neighbors[c][d] == SENTINEL and self.follow_step(c, d) is not None:
                changed = True
        for lhs, rhs in self.rels_at[self.target[c]]:
            if not self.is_live(c):
                break
            a = self.follow_path(c, lhs)
            b = self.follow_path(c, rhs)
            if a is not None and b is not None and a != b:
                self.unify(a, b)
                changed = True
        return changed

    def first_gap(self) -> Optional[Path]:
        """Shortest undefined composite (word followed by a generator), if any."""
        gaps = []
        for c in self.reachable():
            for d in self.out_gens[self.target[c]]:
                if self.neighbors[c][d] == SENTINEL:
                    gaps.append(self.word_path(self.word[c] + (d,), self.root[c]))
        if not gaps:
            return None
        return min(gaps, key=Path.sort_key)

    def relations_hold(self) -> bool:
        for c in self.reachable():
            for lhs, rhs in self.rels_at[self.target[c]]:
                a = self.follow_path(c, lhs, define=False)
                b = self.follow_path(c, rhs, define=False)
                if a is None or b is None or a != b:
                    return False
        return True

    def reachable(self) -> List[int]:
        """Live nodes reachable from the roots through defined transitions."""
        return list(self.shortlex_words())

    def shortlex_words(self, max_depth: Optional[int] = None) -> Dict[int, Tuple[int, ...]]:
        """
        Shortlex-minimal defining word of every reachable node.

        Breadth-first from each root with generators in edge-id order, so the
        first word reaching a node is minimal by (length, edge ids).
        """
        words: Dict[int, Tuple[int, ...]] = {}
        for x in self.presentation.objects:
            start = self.find(self.roots[x])
            if start in words:
                continue
            words[start] = ()
            queue = deque([start])
            while queue:
                c = queue.popleft()
                if max_depth is not None and len(words[c]) >= max_depth:
                    continue
                for d in self.out_gens[self.target[c]]:
                    n = self.neighbors[c][d]
                    if n == SENTINEL:
                        continue
                    n = self.find(n)
                    if n not in words:
                        words[n] = words[c] + (d,)
                        queue.append(n)
        return words

    def word_path(self, word: Sequence[int], root: str) -> Path:
        edges = tuple(self.gens[d] for d in word)
        end = self.gen_tgt[word[-1]] if word else root
        return Path(start=root, end=end, edges=edges)

    def live_count(self) -> int:
        return len(self.reachable())


def enumerate_cosets(presentation: Presentation, max_len: int, max_nodes: int) -> CayleyTable:
    """Run coset enumeration and return the (possibly incomplete) table."""
    table = CayleyTable(presentation, max_len=max_len, max_nodes=max_nodes)
    table.build()
    logging.debug(f"Coset enumeration: {len(table.labels)} nodes defined, "
                  f"{table.live_count()} live, overflow={table.overflow}")
    return table
