from enum import Enum
from typing import Any, Dict, Optional, Tuple
from pydantic import BaseModel, ConfigDict

from models.graph import Path
from models.presentation import MaterializedCategory, PresentationMap
from models.sketch import LimitSketch, SketchMap


class LiftingProblem(BaseModel):
    """
    Model representing a commutative square

        X --top--> A
        |          |
      left       right
        v          v
        Y -bottom-> B
    """
    model_config = ConfigDict(frozen=True)

    left: PresentationMap
    right: PresentationMap
    top: PresentationMap
    bottom: PresentationMap


class OrthoStatus(str, Enum):
    UNIQUELY_ORTHOGONAL = "UniquelyOrthogonal"
    NOT_ORTHOGONAL = "NotOrthogonal"
    UNKNOWN = "Unknown"


class OrthoVerdict(BaseModel):
    """Outcome of an orthogonality check; NotOrthogonal carries the offending square."""
    model_config = ConfigDict(frozen=True)

    status: OrthoStatus
    witness: Optional[LiftingProblem] = None
    lifts: Tuple[PresentationMap, ...] = ()
    squares: int = 0
    reason: str = ""

    @property
    def is_orthogonal(self) -> bool:
        return self.status == OrthoStatus.UNIQUELY_ORTHOGONAL


class SoaEventKind(str, Enum):
    ATTACH = "ATTACH"
    IDENTIFY = "IDENTIFY"


class SoaEvent(BaseModel):
    """
    One step of the saturation loop.

    ATTACH adds ``filler`` for the cone ``legs`` from y over cone alpha.
    IDENTIFY relates the filler ``left`` to the earlier filler ``right``.
    """
    model_config = ConfigDict(frozen=True)

    kind: SoaEventKind
    iteration: int
    y: str
    alpha: str
    legs: Dict[str, Path] = {}
    filler: Optional[str] = None
    left: Optional[Path] = None
    right: Optional[Path] = None

    def line(self) -> str:
        """Trace log line."""
        if self.kind == SoaEventKind.ATTACH:
            legs = ",".join(f"{i}:{path}" for i, path in self.legs.items())
            return f"ATTACH y={self.y} alpha={self.alpha} legs=[{legs}] filler={self.filler}"
        return f"IDENTIFY m1={self.left} m2={self.right} y={self.y} alpha={self.alpha}"

    def as_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value, "iteration": self.iteration,
                                "y": self.y, "alpha": self.alpha}
        if self.kind == SoaEventKind.ATTACH:
            data["legs"] = {i: str(path) for i, path in self.legs.items()}
            data["filler"] = self.filler
        else:
            data["m1"] = str(self.left)
            data["m2"] = str(self.right)
        return data


class SoaState(BaseModel):
    """Current sketch of the saturation loop with its history."""
    model_config = ConfigDict(frozen=True)

    original: LimitSketch
    sketch: LimitSketch
    trace: Tuple[SoaEvent, ...] = ()
    iterations: int = 0
    attachments: Dict[str, int] = {}
    exact: bool = False


class RealizationStatus(str, Enum):
    STABILIZED = "Stabilized"
    BUDGET_EXHAUSTED = "BudgetExhausted"


class RealizationResult(BaseModel):
    """Model representing the universal realization E -> fibr(E) of a sketch."""
    model_config = ConfigDict(frozen=True)

    original: LimitSketch
    realized: LimitSketch
    unit: SketchMap
    trace: Tuple[SoaEvent, ...] = ()
    iterations: int = 0
    status: RealizationStatus
    category: Optional[MaterializedCategory] = None

    @property
    def is_stabilized(self) -> bool:
        return self.status == RealizationStatus.STABILIZED

    def trace_lines(self) -> str:
        return "".join(event.line() + "\n" for event in self.trace)
