from typing import Dict, List, Tuple
from pydantic import BaseModel, ConfigDict


class Model(BaseModel):
    """
    Model representing a functor into finite sets.

    Carriers are the canonical sets {0, ..., k-1}; ``action[e][a]`` is the
    image of element a under edge e. ``labels`` optionally names elements.
    """
    model_config = ConfigDict(frozen=True)

    carrier: Dict[str, int]
    action: Dict[str, Tuple[int, ...]]
    labels: Dict[str, Tuple[str, ...]] = {}

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(self.carrier.values())

    def element(self, x: str, a: int) -> str:
        """Display name of element a of carrier(x)."""
        names = self.labels.get(x)
        return names[a] if names else str(a)

    def key(self) -> Tuple:
        """Comparison key independent of labels."""
        return (tuple(sorted(self.carrier.items())), tuple(sorted(self.action.items())))


class ModelBijectionReport(BaseModel):
    """Models of E and of free(E), paired by restriction along the unit."""
    models_e: List[Model]
    models_free: List[Model]
    pairing: List[int]
    max_size: int

    @property
    def is_bijection(self) -> bool:
        return (len(self.models_e) == len(self.models_free)
                and sorted(self.pairing) == list(range(len(self.models_e))))
