import os
from pydantic import BaseModel, Field


class Bounds(BaseModel):
    """Search budgets shared by every bounded procedure."""
    max_iter: int = Field(default=16, ge=0)
    max_word_len: int = Field(default=8, ge=0)
    max_morphisms: int = Field(default=512, ge=1)
    max_size: int = Field(default=2, ge=0)
    max_nodes: int = Field(default=4096, ge=1)
    probe_word_len: int = Field(default=2, ge=1)
    include_trivial: bool = False

    @classmethod
    def from_env(cls) -> "Bounds":
        """
        Read budgets from the environment.

        Variables: SKETCH_MAX_ITER, SKETCH_MAX_WORD_LEN, SKETCH_MAX_MORPHISMS,
        SKETCH_MAX_SIZE, SKETCH_MAX_NODES, SKETCH_PROBE_WORD_LEN.
        """
        values = {}
        for field, var in (
            ("max_iter", "SKETCH_MAX_ITER"),
            ("max_word_len", "SKETCH_MAX_WORD_LEN"),
            ("max_morphisms", "SKETCH_MAX_MORPHISMS"),
            ("max_size", "SKETCH_MAX_SIZE"),
            ("max_nodes", "SKETCH_MAX_NODES"),
            ("probe_word_len", "SKETCH_PROBE_WORD_LEN"),
        ):
            raw = os.getenv(var)
            if raw:
                values[field] = int(raw)
        return cls(**values)
