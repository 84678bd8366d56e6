from typing import Dict, List, Optional, Tuple
from pydantic import BaseModel, ConfigDict

from models.graph import Path
from models.presentation import MaterializedCategory, PresentationMap, Presentation


def trivial_cone_id(obj: str) -> str:
    return f"trivial({obj})"


class Cone(BaseModel):
    """
    Model representing a cone over a finite diagram in a presentation.

    ``diagram`` gives the image path of every index morphism (identities
    included), keyed by the morphism id of the materialized index category.
    """
    model_config = ConfigDict(frozen=True)

    name: str
    apex: str
    index: MaterializedCategory
    on_objects: Dict[str, str]
    diagram: Dict[str, Path]
    legs: Dict[str, Path]

    @property
    def index_objects(self) -> Tuple[str, ...]:
        return self.index.objects

    @property
    def arrows(self) -> List[str]:
        """Non-identity index morphisms, in canonical order."""
        identities = set(self.index.identities.values())
        return [m for m in self.index.morphisms if m not in identities]

    @property
    def generating_arrows(self) -> List[str]:
        """Generating arrows of the index category."""
        identities = set(self.index.identities.values())
        return [e for e in self.index.generator_images
                if self.index.generator_images[e] not in identities]

    @property
    def is_trivial(self) -> bool:
        """True for the identity cone over the terminal diagram at the apex."""
        if len(self.index.objects) != 1 or self.index.size != 1:
            return False
        i = self.index.objects[0]
        return self.on_objects[i] == self.apex and self.legs[i].is_identity

    def leg(self, i: str) -> Path:
        return self.legs[i]

    def arrow_src(self, m: str) -> str:
        return self.index.src[m]

    def arrow_tgt(self, m: str) -> str:
        return self.index.tgt[m]


class LimitSketch(BaseModel):
    """
    Model representing a limit sketch: a presentation with a family of cones.

    ``trivial_index`` sends every object to the name of its trivial cone.
    """
    model_config = ConfigDict(frozen=True)

    base: Presentation
    cones: Tuple[Cone, ...] = ()
    trivial_index: Dict[str, str] = {}

    @property
    def cone_names(self) -> List[str]:
        return [c.name for c in self.cones]

    def cone(self, name: str) -> Optional[Cone]:
        for c in self.cones:
            if c.name == name:
                return c
        return None

    def is_trivial(self, name: str) -> bool:
        return name in self.trivial_index.values()

    @property
    def user_cones(self) -> List[Cone]:
        """Cones that are not the trivial cone of their apex."""
        trivial = set(self.trivial_index.values())
        return [c for c in self.cones if c.name not in trivial]

    def with_base(self, base: Presentation) -> "LimitSketch":
        """The same cones over a presentation extending the generators of the base."""
        return self.model_copy(update={"base": base})


class SketchMap(BaseModel):
    """Model representing a map of limit sketches: a functor and a cone-index function."""
    model_config = ConfigDict(frozen=True)

    functor: PresentationMap
    cone_map: Dict[str, str]


class SketchMapCheck(BaseModel):
    """Outcome of validating a sketch map; ``clause`` names the violated condition."""
    ok: bool
    clause: Optional[str] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok
