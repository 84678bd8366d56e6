from enum import Enum
from typing import Dict, List, Optional, Tuple
import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from models.graph import Gwi, Path


class Relation(BaseModel):
    """Model representing an unordered pair of parallel reduced paths."""
    model_config = ConfigDict(frozen=True)

    lhs: Path
    rhs: Path

    @model_validator(mode="after")
    def _check_parallel(self) -> "Relation":
        if self.lhs.start != self.rhs.start or self.lhs.end != self.rhs.end:
            raise ValueError(f"relation sides are not parallel: {self.lhs} vs {self.rhs}")
        return self

    @classmethod
    def of(cls, u: Path, v: Path) -> "Relation":
        """Build the relation with its sides in canonical order."""
        if v.sort_key() < u.sort_key():
            u, v = v, u
        return cls(lhs=u, rhs=v)

    @property
    def is_trivial(self) -> bool:
        return self.lhs == self.rhs

    def __str__(self) -> str:
        return f"{self.lhs} = {self.rhs}"


class Presentation(BaseModel):
    """Model representing a finitely presented category."""
    model_config = ConfigDict(frozen=True)

    generators: Gwi
    relations: Tuple[Relation, ...] = ()

    @property
    def objects(self) -> Tuple[str, ...]:
        return self.generators.vertices

    @property
    def edges(self) -> Tuple[str, ...]:
        """Non-identity generating edges."""
        return self.generators.generating_edges

    def src(self, edge: str) -> str:
        return self.generators.src(edge)

    def tgt(self, edge: str) -> str:
        return self.generators.tgt(edge)

    def has_object(self, x: str) -> bool:
        return x in self.generators.graph.vertices

    def edge_path(self, edge: str) -> Path:
        """The length-one path of a generating edge (identity edges give the empty path)."""
        if edge in self.generators.identity_edges:
            return Path.identity(self.src(edge))
        return Path(start=self.src(edge), end=self.tgt(edge), edges=(edge,))


class PresentationMap(BaseModel):
    """Model representing functor data between two presentations."""
    model_config = ConfigDict(frozen=True)

    source: Presentation
    target: Presentation
    on_objects: Dict[str, str]
    on_edges: Dict[str, Path]

    def apply(self, path: Path) -> Path:
        """Image of a path: concatenation of the edge images."""
        start = self.on_objects[path.start]
        identities = self.source.generators.identity_edges
        edges: Tuple[str, ...] = ()
        for edge in path.edges:
            if edge in identities:
                continue
            edges += self.on_edges[edge].edges
        return Path(start=start, end=self.on_objects[path.end], edges=edges)

    def edge_image(self, edge: str) -> Path:
        return self.apply(self.source.edge_path(edge))

    def __str__(self) -> str:
        parts = [f"{e} -> {self.on_edges[e]}" for e in self.source.edges]
        return "{" + ", ".join(parts) + "}"


class EqStatus(str, Enum):
    EQUAL = "Equal"
    DISTINCT = "Distinct"
    UNKNOWN = "Unknown"


class EqVerdict(BaseModel):
    """Three-valued answer of the word-problem engine."""
    model_config = ConfigDict(frozen=True)

    status: EqStatus
    detail: str = ""

    @property
    def is_equal(self) -> bool:
        return self.status == EqStatus.EQUAL

    @property
    def is_distinct(self) -> bool:
        return self.status == EqStatus.DISTINCT

    @property
    def is_unknown(self) -> bool:
        return self.status == EqStatus.UNKNOWN


class Unknown(BaseModel):
    """A question that could not be decided within the search bounds."""
    model_config = ConfigDict(frozen=True)

    reason: str

    def __bool__(self) -> bool:
        raise TypeError("Unknown has no truth value; test with isinstance")


class Diverged(BaseModel):
    """Materialization did not close within its bounds."""
    model_config = ConfigDict(frozen=True)

    reason: str
    witness: Optional[Path] = None


class MaterializedCategory(BaseModel):
    """
    Model representing a finite category given by explicit tables.

    Morphisms are identified by the printed form of their canonical path,
    listed in canonical order. ``compose_table[g][f]`` is the index of g∘f,
    or -1 when f and g are not composable.
    """
    model_config = ConfigDict(frozen=True)

    objects: Tuple[str, ...]
    morphisms: Tuple[str, ...]
    src: Dict[str, str]
    tgt: Dict[str, str]
    identities: Dict[str, str]
    compose_table: Tuple[Tuple[int, ...], ...]
    generator_images: Dict[str, str]
    rep: Dict[str, Path]

    @property
    def size(self) -> int:
        return len(self.morphisms)

    def index(self, morphism: str) -> int:
        return self.morphisms.index(morphism)

    def as_array(self) -> np.ndarray:
        return np.array(self.compose_table, dtype=np.int64).reshape(self.size, self.size)

    def compose(self, g: str, f: str) -> str:
        """Return g∘f."""
        k = self.compose_table[self.index(g)][self.index(f)]
        if k < 0:
            raise ValueError(f"{g} and {f} are not composable")
        return self.morphisms[k]

    def hom(self, x: str, y: str) -> List[str]:
        return [m for m in self.morphisms if self.src[m] == x and self.tgt[m] == y]

    def hom_sizes(self) -> Dict[Tuple[str, str], int]:
        return {(x, y): len(self.hom(x, y)) for x in self.objects for y in self.objects}

    def evaluate(self, path: Path) -> str:
        """Morphism denoted by a path over the originating presentation."""
        current = self.identities[path.start]
        for edge in path.edges:
            current = self.compose(self.generator_images[edge], current)
        return current

    def is_associative(self) -> bool:
        table = self.as_array()
        n = self.size
        for h in range(n):
            for g in range(n):
                hg = table[h, g]
                if hg < 0:
                    continue
                # (h∘g)∘f vs h∘(g∘f) over every f composable with g
                fs = np.nonzero(table[g] >= 0)[0]
                left = table[hg, fs]
                right = table[h, table[g, fs]]
                if not np.array_equal(left, right):
                    return False
        return True

    def is_unital(self) -> bool:
        for m in self.morphisms:
            if self.compose(self.identities[self.tgt[m]], m) != m:
                return False
            if self.compose(m, self.identities[self.src[m]]) != m:
                return False
        return True


class CategoryFunctor(BaseModel):
    """Functor from a presentation into a materialized category, by generator images."""
    model_config = ConfigDict(frozen=True)

    on_objects: Dict[str, str]
    on_edges: Dict[str, str]

    def evaluate(self, c: MaterializedCategory, path: Path) -> str:
        current = c.identities[self.on_objects[path.start]]
        for edge in path.edges:
            if edge in self.on_edges:
                current = c.compose(self.on_edges[edge], current)
        return current
