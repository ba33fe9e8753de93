"""Uncoupled node dynamics h(.)"""

from abc import ABC, abstractmethod
from typing import Any, Dict

import numpy as np

from src.errors import InvalidInput, NonFiniteState, ShapeMismatch
from src.numerics.linalg import as_dense_matrix, jacobi_eigen


class NodeModel(ABC):
    """Base class for node self-dynamics"""

    kind: str = ""

    def __init__(self, dim: int):
        self.dim = dim
        self.name = self.__class__.__name__

    @abstractmethod
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """
        Evaluate h on states stacked along leading axes
        Args:
            x: array whose last axis has length dim
        Returns:
            array of the same shape
        """
        pass

    @abstractmethod
    def params(self) -> Dict[str, Any]:
        pass


class LorenzModel(NodeModel):
    kind = "lorenz"

    def __init__(self, sigma: float = 10.0, rho: float = 28.0, beta_l: float = 8.0 / 3.0):
        super().__init__(dim=3)
        self.sigma = float(sigma)
        self.rho = float(rho)
        self.beta_l = float(beta_l)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
        out = np.empty_like(x)
        out[..., 0] = self.sigma * (x2 - x1)
        out[..., 1] = x1 * (self.rho - x3) - x2
        out[..., 2] = x1 * x2 - self.beta_l * x3
        return out

    def params(self) -> Dict[str, Any]:
        return {"sigma": self.sigma, "rho": self.rho, "beta_l": self.beta_l}


class LinearTestModel(NodeModel):
    """h(x) = A x, whose one-sided Lipschitz constant is lambda_max((A + A^T)/2)"""

    kind = "linear_test"

    def __init__(self, a):
        a = as_dense_matrix(a, square=True)
        super().__init__(dim=a.shape[0])
        self.a = a

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return x @ self.a.T

    def params(self) -> Dict[str, Any]:
        return {"A": self.a.tolist()}

    def quad_constant(self) -> float:
        return jacobi_eigen((self.a + self.a.T) / 2.0).lambda_max


def create_model(kind: str, params: Dict[str, Any] = None) -> NodeModel:
    """Build a node model from its kind and parameter mapping"""
    params = params or {}
    match kind:
        case "lorenz":
            try:
                return LorenzModel(**params)
            except TypeError as e:
                raise InvalidInput(f"Failed to build lorenz model: {str(e)}")
        case "linear_test":
            if "A" not in params:
                raise InvalidInput("linear_test model requires parameter 'A'")
            return LinearTestModel(params["A"])
    raise InvalidInput(f"Unknown node model kind: {kind}")


def model_rhs(model: NodeModel, x) -> np.ndarray:
    """Evaluate h at a single state vector"""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != model.dim:
        raise ShapeMismatch(f"State has length {x.shape[0]}, model expects {model.dim}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteState(f"Non-finite state {x.tolist()}")
    return model.evaluate(x)
