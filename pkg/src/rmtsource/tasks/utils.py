"""Shared utilities for task modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Annotated, Any, Optional

from pydantic import BaseModel, BeforeValidator, ConfigDict

from rmtsource.config import Settings, get_settings


def split_list(value: Any) -> Any:
    """Accept ``"0.7,-0.7,0"`` (flag or config-file form) as well as a list.

    An empty string is the empty list; a bare number becomes a one-element list.
    """
    if isinstance(value, str):
        text = value.strip()
        if not text:
            return []
        return [item.strip() for item in text.split(",")]
    if isinstance(value, (int, float)):
        return [value]
    return value


FloatList = Annotated[list[float], BeforeValidator(split_list)]
IntList = Annotated[list[int], BeforeValidator(split_list)]
StrList = Annotated[list[str], BeforeValidator(split_list)]


class TaskParams(BaseModel):
    """Base for per-task parameter models: unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


@dataclass(frozen=True)
class TaskDefinition:
    """Name, one-line description and parameter model of a task."""

    name: str
    description: str
    params: type[TaskParams]

    @property
    def input_schema(self) -> dict[str, Any]:
        return self.params.model_json_schema(by_alias=True)


@dataclass(frozen=True)
class TaskContext:
    """What every handler receives besides its own parameters."""

    seed: int = 0
    workers: int = 1
    settings: Settings = field(default_factory=get_settings)


@dataclass
class TaskOutput:
    """JSON payload, optional CSV rendering, and the verdict of any check."""

    data: dict[str, Any]
    csv: Optional[str] = None
    passed: bool = True

