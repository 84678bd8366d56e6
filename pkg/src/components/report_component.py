import json
import pandas as pd
from typing import Any, Dict, List, Optional, Sequence

from models.graph import Path
from models.presentation import MaterializedCategory
from models.realization import OrthoVerdict, RealizationResult
from models.set_model import Model
from models.sketch import LimitSketch


def hom_size_table(c: MaterializedCategory) -> pd.DataFrame:
    """
    Create a table of hom-set sizes.

    Args:
        c: Materialized category

    Returns:
        DataFrame indexed by source object with one column per target object
    """
    sizes = c.hom_sizes()
    df = pd.DataFrame(
        [[sizes[(x, y)] for y in c.objects] for x in c.objects],
        index=list(c.objects),
        columns=list(c.objects),
    )
    df.index.name = "from \\ to"
    return df


def morphism_table(c: MaterializedCategory) -> pd.DataFrame:
    """List every morphism with its source, target and representative length."""
    return pd.DataFrame({
        "morphism": list(c.morphisms),
        "source": [c.src[m] for m in c.morphisms],
        "target": [c.tgt[m] for m in c.morphisms],
        "length": [len(c.rep[m]) for m in c.morphisms],
    })


def path_table(paths: Sequence[Path]) -> pd.DataFrame:
    return pd.DataFrame({
        "path": [str(p) for p in paths],
        "length": [len(p) for p in paths],
    })


def model_table(m: Model) -> pd.DataFrame:
    """
    Create a table of the functions of a model.

    Args:
        m: Finite-set model

    Returns:
        DataFrame with one row per (edge, element)
    """
    rows = []
    for edge, values in m.action.items():
        for a, b in enumerate(values):
            rows.append({"edge": edge, "element": a, "image": b})
    return pd.DataFrame(rows, columns=["edge", "element", "image"])


def model_summary_table(models: Sequence[Model]) -> pd.DataFrame:
    """Carrier sizes of each model, one row per model."""
    if not models:
        return pd.DataFrame()
    objects = list(models[0].carrier)
    return pd.DataFrame([[m.carrier[x] for x in objects] for m in models],
                        columns=objects).rename_axis("model")


def model_as_dict(m: Model) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "carrier": dict(m.carrier),
        "action": {e: list(values) for e, values in m.action.items()},
    }
    if m.labels:
        data["labels"] = {x: list(names) for x, names in m.labels.items()}
    return data


def category_as_dict(c: MaterializedCategory) -> Dict[str, Any]:
    return {
        "objects": list(c.objects),
        "morphisms": [{"id": m, "source": c.src[m], "target": c.tgt[m]} for m in c.morphisms],
        "hom_sizes": {f"{x},{y}": n for (x, y), n in c.hom_sizes().items()},
    }


def sketch_as_dict(s: LimitSketch) -> Dict[str, Any]:
    p = s.base
    return {
        "objects": list(p.objects),
        "edges": {e: [p.src(e), p.tgt(e)] for e in p.edges},
        "relations": [[str(rel.lhs), str(rel.rhs)] for rel in p.relations],
        "cones": [
            {
                "name": cone.name,
                "apex": cone.apex,
                "trivial": s.is_trivial(cone.name),
                "index": list(cone.index_objects),
                "legs": {i: str(cone.legs[i]) for i in cone.index_objects},
            }
            for cone in s.cones
        ],
    }


def realization_as_dict(r: RealizationResult) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "status": r.status.value,
        "iterations": r.iterations,
        "trace": [event.as_dict() for event in r.trace],
        "sketch": sketch_as_dict(r.realized),
    }
    if r.category is not None:
        data["category"] = category_as_dict(r.category)
    return data


def verdict_as_dict(label: str, verdict: OrthoVerdict) -> Dict[str, Any]:
    data: Dict[str, Any] = {"cell": label, "status": verdict.status.value, "squares": verdict.squares}
    if verdict.reason:
        data["reason"] = verdict.reason
    if verdict.witness is not None:
        data["witness_top"] = str(verdict.witness.top)
    return data


def structured(document: Dict[str, Any]) -> str:
    """Serialize a key-value tree deterministically."""
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def human(title: str, tables: Optional[List[pd.DataFrame]] = None, lines: Optional[List[str]] = None) -> str:
    """
    Render a title, plain lines and tables as text.

    Args:
        title: First line
        tables: DataFrames printed with to_string
        lines: Plain lines printed after the title

    Returns:
        Text ending with a newline
    """
    parts = [title]
    parts += lines or []
    for df in tables or []:
        parts.append(df.to_string() if not df.empty else "(empty)")
    return "\n".join(parts) + "\n"
