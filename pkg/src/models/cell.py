from typing import Dict
from pydantic import BaseModel, ConfigDict

from models.presentation import Presentation, PresentationMap
from models.sketch import Cone


class PushoutResult(BaseModel):
    """Model representing a glued presentation with its two injections."""
    model_config = ConfigDict(frozen=True)

    result: Presentation
    left: PresentationMap
    right: PresentationMap
    renamed: Dict[str, str] = {}


class Coinserter(BaseModel):
    """
    Model representing E[y;α]: E with a freely added cone of legs from y.

    ``legs`` maps each index object i to the fresh edge γ_i: y -> φ(i).
    """
    model_config = ConfigDict(frozen=True)

    y: str
    cone: Cone
    result: Presentation
    inclusion: PresentationMap
    legs: Dict[str, str]

    @property
    def alpha(self) -> str:
        return self.cone.name


class FillerCell(BaseModel):
    """Model representing E[y;α]': the coinserter with a filler γ̄: y -> apex added."""
    model_config = ConfigDict(frozen=True)

    coinserter: Coinserter
    result: Presentation
    retract_map: PresentationMap
    filler: str
    unit_composite: PresentationMap

    @property
    def y(self) -> str:
        return self.coinserter.y

    @property
    def alpha(self) -> str:
        return self.coinserter.alpha


class GeneratingCell(BaseModel):
    """One arrow r_{y,α} of the generating set."""
    model_config = ConfigDict(frozen=True)

    y: str
    alpha: str
    cell: FillerCell

    @property
    def map(self) -> PresentationMap:
        return self.cell.retract_map


class PhiPair(BaseModel):
    """
    A pair (G, h): a map out of the coinserter restricting to F and a filler h.

    ``legs`` holds the cone G(γ_i) as morphism ids of the materialized target.
    """
    model_config = ConfigDict(frozen=True)

    legs: Dict[str, str]
    filler: str
    functor: PresentationMap
