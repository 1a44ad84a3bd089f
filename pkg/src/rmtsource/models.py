"""Typed records exchanged between the library, the task layer and the CLI."""

from __future__ import annotations

import math
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SCHEMA_PREFIX = "rmtsource"


def schema_id(record: str) -> str:
    """Versioned schema string embedded in every output file."""
    return f"{SCHEMA_PREFIX}/{record}/v1"


class EigenSample(BaseModel):
    """One sorted eigenvalue realisation plus provenance."""

    model_config = ConfigDict(extra="forbid")

    values: list[float]
    seed: Optional[int] = None
    ensemble: str
    steps: int = 0

    @field_validator("values")
    @classmethod
    def _sorted(cls, values: list[float]) -> list[float]:
        if any(b < a for a, b in zip(values, values[1:])):
            raise ValueError("eigenvalues must be sorted ascending")
        return values


class GaussianSourceSpec(BaseModel):
    """Gaussian β-ensemble with source and weight e^{-c Σ y²}."""

    model_config = ConfigDict(extra="forbid")

    N: int = Field(ge=1)
    beta: float = Field(gt=0)
    source: list[float]
    weight_constant: float = Field(default=0.5, gt=0)

    @model_validator(mode="after")
    def _check_source(self) -> GaussianSourceSpec:
        if len(self.source) != self.N:
            raise ValueError(f"source must have length N={self.N}, got {len(self.source)}")
        if not all(math.isfinite(v) for v in self.source):
            raise ValueError("source entries must be finite")
        return self


class ChiralSourceSpec(BaseModel):
    """Wishart matrix (X + X0)†(X + X0) with X n×p and X0ᵀX0 = diag(mu)."""

    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=1)
    p: int = Field(ge=1)
    field: Literal["real", "complex"] = "real"
    mu: list[float]
    entry_variance: float = Field(default=1.0, gt=0, description="E|x|² of every entry of X")

    @model_validator(mode="after")
    def _check_shape(self) -> ChiralSourceSpec:
        if self.n < self.p:
            raise ValueError(f"need n >= p, got n={self.n}, p={self.p}")
        if len(self.mu) != self.p:
            raise ValueError(f"mu must have length p={self.p}, got {len(self.mu)}")
        if any(not math.isfinite(v) or v < 0 for v in self.mu):
            raise ValueError("mu entries must be finite and nonnegative")
        return self

    @property
    def a(self) -> int:
        return self.n - self.p


class MCEstimate(BaseModel):
    """Complex mean with standard errors, or an exact value (errors zero).

    ``se`` combines both components: sqrt(var_re + var_im)/sqrt(n). When the
    per-sample products leave double range ``overflow`` is set, ``re``/``im``
    are None and only ``log_abs_mean`` (mean of log|product|) is reported.
    """

    model_config = ConfigDict(extra="forbid")

    re: Optional[float]
    im: Optional[float]
    se: float = Field(ge=0)
    se_re: float = Field(default=0.0, ge=0)
    se_im: float = Field(default=0.0, ge=0)
    n_samples: int = Field(ge=0)
    exact: bool = False
    overflow: bool = False
    log_abs_mean: Optional[float] = None

    @classmethod
    def exact_value(cls, value: complex) -> MCEstimate:
        value = complex(value)
        return cls(re=value.real, im=value.imag, se=0.0, n_samples=0, exact=True)

    @property
    def mean(self) -> complex:
        if self.re is None or self.im is None:
            raise ValueError("estimate overflowed; only log_abs_mean is available")
        return complex(self.re, self.im)


class DualityReport(BaseModel):
    """Outcome of one two-sided identity check."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_name: str = Field(default=schema_id("duality"), alias="schema")
    check: str
    params: dict[str, Any]
    lhs: MCEstimate
    rhs: MCEstimate
    z: float
    passed: bool = Field(alias="pass")
    seed: int
    threshold: float
    real_expected: bool = False
    imag_z: Optional[float] = None

    def to_json_dict(self) -> dict:
        return self.model_dump(by_alias=True)


class ConvergenceRow(BaseModel):
    """One finite-size value against its scaling limit."""

    model_config = ConfigDict(extra="forbid")

    size: int
    X: float
    s: list[float] = Field(default_factory=list)
    finite_value: float
    limit_value: float
    abs_error: float
    rel_error: Optional[float] = None

    @classmethod
    def build(
        cls, size: int, x: float, s: list[float], finite_value: float, limit_value: float
    ) -> ConvergenceRow:
        abs_error = abs(finite_value - limit_value)
        rel_error = abs_error / abs(limit_value) if limit_value != 0 else None
        return cls(
            size=size,
            X=x,
            s=list(s),
            finite_value=finite_value,
            limit_value=limit_value,
            abs_error=abs_error,
            rel_error=rel_error,
        )


CommandName = Literal["specfun", "sample", "charpoly", "duality", "softedge", "selftest"]


class RunConfig(BaseModel):
    """Everything one CLI invocation needs; seed and workers fix all random output."""

    model_config = ConfigDict(extra="forbid")

    command: CommandName
    params: dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(default=0, ge=0, lt=2**64)
    workers: int = Field(default=1, ge=1)
    output: Optional[str] = None
    format: Literal["json", "csv"] = "json"


class RunResult(BaseModel):
    """Exit code plus the rendered artifact."""

    model_config = ConfigDict(extra="forbid")

    exit_code: int
    text: str = ""
    artifacts: list[str] = Field(default_factory=list)
    error: Optional[str] = None
    error_type: Optional[str] = None


class CheckVerdict(BaseModel):
    """Outcome of one self-test check."""

    model_config = ConfigDict(extra="forbid")

    module: str
    name: str
    passed: bool
    detail: str = ""


class SelftestReport(BaseModel):
    """Per-module verdicts of the fast invariant suite."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_name: str = Field(default=schema_id("selftest"), alias="schema")
    seed: int
    workers: int
    modules: dict[str, bool]
    checks: list[CheckVerdict]
    passed: bool = Field(alias="pass")

    def to_json_dict(self) -> dict:
        return self.model_dump(by_alias=True)
