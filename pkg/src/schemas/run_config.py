from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator


class LayerConfig(BaseModel):
    # inline rows, or a path to a matrix text file (resolved at load time)
    matrix: Union[List[List[float]], str]
    gamma: List[float] = Field(min_length=1)
    strength: float = Field(1.0, gt=0)

    @field_validator("gamma")
    @classmethod
    def gamma_positive(cls, value: List[float]) -> List[float]:
        if any(g <= 0 for g in value):
            raise ValueError(f"gamma entries must be positive, got {value}")
        return value


class CouplingConfig(BaseModel):
    mode: Literal["fixed", "adaptive"]
    c: Optional[float] = Field(None, gt=0)
    beta: Optional[float] = Field(None, gt=0)
    c0: float = Field(0.0, ge=0)

    @model_validator(mode="after")
    def validate_mode(self):
        if self.mode == "fixed" and self.c is None:
            raise ValueError("fixed coupling requires 'c'")
        if self.mode == "adaptive" and self.beta is None:
            raise ValueError("adaptive coupling requires 'beta'")
        return self


class ModelConfig(BaseModel):
    kind: Literal["lorenz", "linear_test"]
    params: Dict[str, Any] = Field(default_factory=dict)


class PinningConfig(BaseModel):
    # per layer: a scalar d^m pins the first node, a list gives every node's gain
    gains: List[Union[float, List[float]]] = Field(min_length=1)
    target_init: Union[Literal["random"], List[float]] = "random"


class IntegratorConfig(BaseModel):
    dt: float = Field(1e-3, gt=0)
    t_end: float = Field(10.0, gt=0)
    record_every: int = Field(10, ge=1)


class RunConfig(BaseModel):
    schema_version: Literal[1]
    layers: List[LayerConfig] = Field(min_length=1)
    coupling: CouplingConfig
    model: ModelConfig
    pinning: Optional[PinningConfig] = None
    theta: Union[Literal["auto"], List[float]] = "auto"
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    seed: int = 1
    init: Union[Literal["random"], List[List[float]]] = "random"
    L_h: Optional[float] = Field(None, gt=0)

    @model_validator(mode="after")
    def validate_pinning(self):
        if self.pinning is not None and len(self.pinning.gains) != len(self.layers):
            raise ValueError(
                f"pinning.gains has {len(self.pinning.gains)} entries "
                f"for {len(self.layers)} layers"
            )
        return self

    def with_layers(self, indices: List[int]) -> "RunConfig":
        """Copy of this config restricted to the given layers"""
        updates: Dict[str, Any] = {"layers": [self.layers[i] for i in indices]}
        if self.pinning is not None:
            updates["pinning"] = self.pinning.model_copy(
                update={"gains": [self.pinning.gains[i] for i in indices]}
            )
        return self.model_copy(update=updates)
