"""Structural validation of coupling matrices and their pinned variants.

A coupling matrix is a Metzler matrix (nonnegative off-diagonal) with zero
row sums. Node i listens to node j whenever m[i][j] > 0. Connectivity is
decided by an iterative Tarjan SCC pass over that digraph.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.errors import (
    AllGainsZero,
    InvalidInput,
    NonFiniteMatrix,
    NotMetzler,
    RowSumNonZero,
    ShapeMismatch,
)
from src.numerics.linalg import ArrayLike, as_dense_matrix, matrix_one_norm

logger = logging.getLogger(__name__)

ROW_SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CouplingMatrix:
    """Validated Metzler zero-row-sum matrix"""

    m: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return int(self.m.shape[0])

    def scaled(self, factor: float) -> "CouplingMatrix":
        return CouplingMatrix(m=self.m * float(factor))


@dataclass(frozen=True)
class PinnedMatrix:
    """Coupling matrix with diag(gains) subtracted"""

    base: CouplingMatrix
    gains: np.ndarray = field(repr=False)
    m: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def pinned_nodes(self) -> List[int]:
        return [int(i) for i in np.flatnonzero(self.gains > 0)]


def validate_coupling(data: ArrayLike) -> CouplingMatrix:
    """Check the Metzler and zero-row-sum structure"""
    m = as_dense_matrix(data, square=True)
    n = m.shape[0]

    off_diagonal = m.copy()
    np.fill_diagonal(off_diagonal, 0.0)
    negatives = np.argwhere(off_diagonal < 0.0)
    if negatives.size:
        i, j = (int(k) for k in negatives[0])
        raise NotMetzler(i, j, float(m[i, j]))

    tolerance = ROW_SUM_TOLERANCE * matrix_one_norm(m)
    row_sums = m.sum(axis=1)
    for i in range(n):
        if abs(row_sums[i]) > tolerance:
            raise RowSumNonZero(i, float(row_sums[i]))

    m = m.copy()
    m.setflags(write=False)
    return CouplingMatrix(m=m)


def adjacency_list(g: CouplingMatrix) -> List[List[int]]:
    """Successor lists of the digraph with an edge i->j when m[i][j] > 0"""
    n = g.n
    return [[j for j in range(n) if j != i and g.m[i, j] > 0.0] for i in range(n)]


class StronglyConnectedComponents:
    """Iterative Tarjan over successor lists (no recursion limit issues)"""

    BEGIN, CONTINUE, RETURN = 0, 1, 2

    def __init__(self, graph: Sequence[Sequence[int]]):
        self.graph = graph

    def get_result(self) -> List[List[int]]:
        self.indices = dict()
        self.lowlinks = defaultdict(lambda: -1)
        self.stack_indices = dict()
        self.current_index = 0
        self.stack: List[int] = []
        self.sccs: List[List[int]] = []

        for i in range(len(self.graph)):
            if i not in self.indices:
                self.visit(i)
        self.sccs.reverse()
        return self.sccs

    def visit(self, vertex: int) -> None:
        iter_stack = [(vertex, None, None, self.BEGIN)]
        while iter_stack:
            v, w, succ_index, state = iter_stack.pop()

            if state == self.BEGIN:
                self.current_index += 1
                self.indices[v] = self.current_index
                self.lowlinks[v] = self.current_index
                self.stack_indices[v] = len(self.stack)
                self.stack.append(v)
                iter_stack.append((v, None, 0, self.CONTINUE))
            elif state == self.CONTINUE:
                successors = self.graph[v]
                if succ_index == len(successors):
                    if self.lowlinks[v] == self.indices[v]:
                        stack_index = self.stack_indices[v]
                        scc = self.stack[stack_index:]
                        del self.stack[stack_index:]
                        for node in scc:
                            del self.stack_indices[node]
                        self.sccs.append(scc)
                else:
                    w = successors[succ_index]
                    if w not in self.indices:
                        iter_stack.append((v, w, succ_index, self.RETURN))
                        iter_stack.append((w, None, None, self.BEGIN))
                    else:
                        if w in self.stack_indices:
                            self.lowlinks[v] = min(self.lowlinks[v], self.indices[w])
                        iter_stack.append((v, None, succ_index + 1, self.CONTINUE))
            elif state == self.RETURN:
                self.lowlinks[v] = min(self.lowlinks[v], self.lowlinks[w])
                iter_stack.append((v, None, succ_index + 1, self.CONTINUE))


def strongly_connected_components(g: CouplingMatrix) -> List[List[int]]:
    return StronglyConnectedComponents(adjacency_list(g)).get_result()


def is_strongly_connected(g: CouplingMatrix) -> bool:
    components = strongly_connected_components(g)
    return len(components) == 1 and len(components[0]) == g.n


def build_pinned(g: CouplingMatrix, gains: ArrayLike) -> PinnedMatrix:
    """Subtract diag(gains) from the coupling matrix"""
    d = np.asarray(gains, dtype=np.float64).reshape(-1)
    if d.shape[0] != g.n:
        raise ShapeMismatch(f"Expected {g.n} pinning gains, got {d.shape[0]}")
    if not np.all(np.isfinite(d)):
        raise NonFiniteMatrix("Pinning gains must be finite")
    if np.any(d < 0.0):
        raise InvalidInput(f"Pinning gains must be nonnegative, got {d.tolist()}")
    if not np.any(d > 0.0):
        raise AllGainsZero("At least one pinning gain must be positive")

    m = g.m - np.diag(d)
    m.setflags(write=False)
    d = d.copy()
    d.setflags(write=False)
    return PinnedMatrix(base=g, gains=d, m=m)


def first_node_gains(n: int, d: float) -> np.ndarray:
    """Gain vector pinning only the first node, (d, 0, ..., 0)"""
    gains = np.zeros(n)
    gains[0] = d
    return gains


def kron_coupling(layers: Sequence[Tuple[CouplingMatrix, ArrayLike]]) -> np.ndarray:
    """Full linear coupling operator sum_m G^m (x) Gamma^m"""
    if not layers:
        raise InvalidInput("At least one layer is required")
    total = None
    for g, gamma in layers:
        term = np.kron(g.m, np.diag(np.asarray(gamma, dtype=np.float64)))
        total = term if total is None else total + term
    return total


def single_weight_equivalent(
    layers: Sequence[Tuple[CouplingMatrix, ArrayLike]],
) -> Optional[Tuple[CouplingMatrix, np.ndarray]]:
    """Collapse layers sharing one inner matrix into sum_m G^m with that Gamma.

    Returns None when the inner matrices differ, in which case the coupling
    operator is not of the form G (x) Gamma.
    """
    if not layers:
        raise InvalidInput("At least one layer is required")
    gamma0 = np.asarray(layers[0][1], dtype=np.float64)
    for _, gamma in layers[1:]:
        gamma = np.asarray(gamma, dtype=np.float64)
        if gamma.shape != gamma0.shape or not np.array_equal(gamma, gamma0):
            return None
    total = sum(g.m for g, _ in layers)
    return validate_coupling(total), gamma0.copy()


def rescale_layers(
    layers: Sequence[CouplingMatrix], strengths: Sequence[float]
) -> List[CouplingMatrix]:
    """Fold per-layer coupling strengths c_m into the matrices, sharing c = c_1"""
    if len(layers) != len(strengths):
        raise ShapeMismatch(
            f"Got {len(strengths)} strengths for {len(layers)} layers"
        )
    if any(not np.isfinite(c) or c <= 0.0 for c in strengths):
        raise InvalidInput(f"Layer strengths must be positive, got {list(strengths)}")
    c1 = float(strengths[0])
    return [g.scaled(float(c) / c1) for g, c in zip(layers, strengths)]
