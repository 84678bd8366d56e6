from typing import Dict, Tuple
from pydantic import BaseModel, ConfigDict, model_validator


class Graph(BaseModel):
    """Model representing a finite directed multigraph."""
    model_config = ConfigDict(frozen=True)

    vertices: Tuple[str, ...] = ()
    edges: Tuple[str, ...] = ()
    src: Dict[str, str] = {}
    tgt: Dict[str, str] = {}

    @model_validator(mode="after")
    def _check_well_formed(self) -> "Graph":
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("vertex ids must be unique")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("edge ids must be unique")
        vertex_set = set(self.vertices)
        for edge in self.edges:
            if edge not in self.src or edge not in self.tgt:
                raise ValueError(f"edge {edge} has no source or target")
            if self.src[edge] not in vertex_set or self.tgt[edge] not in vertex_set:
                raise ValueError(f"edge {edge} references an unknown vertex")
        return self


class Gwi(BaseModel):
    """Model representing a graph with a chosen identity loop at every vertex."""
    model_config = ConfigDict(frozen=True)

    graph: Graph
    ident: Dict[str, str] = {}

    @model_validator(mode="after")
    def _check_identities(self) -> "Gwi":
        for vertex in self.graph.vertices:
            edge = self.ident.get(vertex)
            if edge is None:
                raise ValueError(f"vertex {vertex} has no identity edge")
            if self.graph.src.get(edge) != vertex or self.graph.tgt.get(edge) != vertex:
                raise ValueError(f"identity edge {edge} is not a loop at {vertex}")
        return self

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self.graph.vertices

    @property
    def identity_edges(self) -> frozenset:
        return frozenset(self.ident.values())

    @property
    def generating_edges(self) -> Tuple[str, ...]:
        """Non-identity edges, in declaration order."""
        identities = self.identity_edges
        return tuple(e for e in self.graph.edges if e not in identities)

    def src(self, edge: str) -> str:
        return self.graph.src[edge]

    def tgt(self, edge: str) -> str:
        return self.graph.tgt[edge]


class Path(BaseModel):
    """
    Model representing a composable list of edges.

    Edges are stored in application order: ``edges[0]`` is applied first.
    The empty path is the identity at ``start``.
    """
    model_config = ConfigDict(frozen=True)

    start: str
    end: str
    edges: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _check_identity(self) -> "Path":
        if not self.edges and self.start != self.end:
            raise ValueError("an empty path must start and end at the same vertex")
        return self

    @classmethod
    def identity(cls, vertex: str) -> "Path":
        return cls(start=vertex, end=vertex)

    @property
    def is_identity(self) -> bool:
        return not self.edges

    def __len__(self) -> int:
        return len(self.edges)

    def sort_key(self) -> Tuple:
        """Canonical order: length, then edge ids, then endpoints."""
        return (len(self.edges), self.edges, self.start, self.end)

    def then(self, other: "Path") -> "Path":
        """Return ``other ∘ self`` (self applied first)."""
        if self.end != other.start:
            raise ValueError(f"cannot compose {other} after {self}: {self.end} != {other.start}")
        return Path(start=self.start, end=other.end, edges=self.edges + other.edges)

    def __str__(self) -> str:
        if not self.edges:
            return f"id({self.start})"
        return ".".join(reversed(self.edges))
