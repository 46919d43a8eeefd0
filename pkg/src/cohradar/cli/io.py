"""Scenario loading and result file I/O."""

import json
from importlib import resources
from pathlib import Path
from typing import Any, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError

from ..core.errors import ScenarioError
from ..core.logging import get_logger
from ..models import Scene, SweepPlan
from .schemas import ScenarioConfig

logger = get_logger(__name__)

FLOAT_FORMAT = "%.17g"
SWEEP_COLUMNS = ("l_m_meters", "c_norm_meters")


def validation_error(exc: ValidationError, source: str) -> ScenarioError:
    first = exc.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or "<root>"
    return ScenarioError(
        f"{source}: invalid key '{key}': {first['msg']}",
        details={
            "errors": [
                {"key": ".".join(str(p) for p in e["loc"]), "message": e["msg"]}
                for e in exc.errors()
            ]
        },
    )


def builtin_scenarios() -> list[str]:
    """Names of the scenario files shipped with the package."""
    root = resources.files("cohradar.scenarios")
    return sorted(
        entry.name.removesuffix(".json")
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    )


def load_scenario(source: Union[str, Path]) -> ScenarioConfig:
    """Parse a scenario file, or a built-in scenario given by name."""
    path = Path(source)
    if path.exists():
        text = path.read_text(encoding="utf-8")
    elif str(source) in builtin_scenarios():
        text = (
            resources.files("cohradar.scenarios")
            .joinpath(f"{source}.json")
            .read_text(encoding="utf-8")
        )
    else:
        raise ScenarioError(f"scenario not found: {source}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"{source}: malformed JSON at line {exc.lineno}: {exc.msg}"
        ) from exc
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        raise validation_error(exc, str(source)) from exc


def to_domain(
    config: ScenarioConfig, source: str = "scenario"
) -> tuple[SweepPlan, Scene]:
    """Plan and scene of a validated config; domain violations are schema errors."""
    try:
        return config.plan.to_plan(), config.scene.to_scene()
    except ValidationError as exc:
        raise validation_error(exc, source) from exc


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    """Header row, '.' decimal, full float precision, '\\n' line ends."""
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("Wrote table path=%s rows=%d", path, len(frame))
    return path


def write_json(report: Union[BaseModel, dict[str, Any]], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    data = report.model_dump(mode="json") if isinstance(report, BaseModel) else report
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info("Wrote report path=%s", path)
    return path


def read_sweep_csv(path: Union[str, Path]) -> pd.DataFrame:
    """Load a sweep or trials table, naming the first bad line on failure."""
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except FileNotFoundError as exc:
        raise ScenarioError(f"sweep file not found: {path}") from exc
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ScenarioError(f"{path}: malformed CSV: {exc}") from exc
    missing = [c for c in SWEEP_COLUMNS if c not in frame.columns]
    if missing:
        raise ScenarioError(
            f"{path}: missing columns {missing}",
            details={"columns": list(frame.columns)},
        )
    numeric = [c for c in (*SWEEP_COLUMNS, "trial") if c in frame.columns]
    for column in numeric:
        values = pd.to_numeric(frame[column], errors="coerce")
        bad = np.flatnonzero(values.isna().to_numpy())
        if bad.size:
            line = int(bad[0]) + 2  # header is line 1
            raise ScenarioError(
                f"{path}: line {line}: non-numeric value in column '{column}'",
                details={"line": line, "column": column},
            )
        frame[column] = values
    return frame
