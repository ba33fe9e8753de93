"""Spectral synchronization analysis of single- and multi-weighted networks.

Central objects:
    - the NLEVec xi of a coupling matrix G (xi^T G = 0, sum xi = 1, xi > 0);
    - G_theta = [(Theta - theta theta^T) G + G^T (Theta - theta theta^T)] / 2,
      whose largest eigenvalue on the transverse space certifies
      synchronization with the Lyapunov weights theta;
    - the allowable deviation bounds (ADSB for plain coupling, ADCB for
      pinned coupling): any normalized positive theta within that
      Chebyshev distance of xi still certifies synchronization/control.
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import (
    InvalidInput,
    NotInKernel,
    NotNegativeDefinite,
    NotNormalized,
    NotPositive,
    NotStronglyConnected,
    ShapeMismatch,
    SingularMatrix,
)
from src.network.graph import CouplingMatrix, PinnedMatrix, is_strongly_connected
from src.numerics.linalg import (
    jacobi_eigen,
    lu_factor,
    lu_solve,
    matrix_one_norm,
    spectral_norm_symmetric,
    transverse_basis,
)

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-12
USER_NORMALIZATION_TOLERANCE = 1e-9
KERNEL_TOLERANCE = 1e-9


class Provenance(str, Enum):
    NLEVEC = "nlevec"
    COMBINED = "combined"
    USER = "user"


@dataclass(frozen=True)
class WeightVector:
    """Strictly positive vector summing to one"""

    v: np.ndarray = field(repr=False)
    provenance: Provenance = Provenance.USER

    def __post_init__(self):
        v = np.asarray(self.v, dtype=np.float64).reshape(-1)
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise InvalidInput("Weight vector must be non-empty and finite")
        if np.any(v <= 0.0):
            raise NotPositive(f"Weight vector must be strictly positive, got {v.tolist()}")
        if abs(v.sum() - 1.0) > NORMALIZATION_TOLERANCE:
            raise NotNormalized(f"Weight vector sums to {v.sum()!r}, expected 1")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "provenance", Provenance(self.provenance))

    @classmethod
    def from_values(
        cls, values: Iterable[float], provenance: Provenance = Provenance.USER
    ) -> "WeightVector":
        """Accept values summing to one up to 1e-9 and renormalize them"""
        v = np.asarray(list(values), dtype=np.float64)
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise InvalidInput("Weight vector must be non-empty and finite")
        if np.any(v <= 0.0):
            raise NotPositive(f"Weight vector must be strictly positive, got {v.tolist()}")
        total = v.sum()
        if abs(total - 1.0) > USER_NORMALIZATION_TOLERANCE:
            raise NotNormalized(f"Weight vector sums to {total!r}, expected 1")
        return cls(v=v / total, provenance=provenance)

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls(v=np.full(n, 1.0 / n), provenance=Provenance.USER)

    @property
    def n(self) -> int:
        return int(self.v.shape[0])

    def tolist(self) -> List[float]:
        return [float(x) for x in self.v]


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def __contains__(self, x: float) -> bool:
        return self.lower <= x <= self.upper


@dataclass(frozen=True)
class SyncAnalysis:
    nlevec_per_layer: List[WeightVector]
    lambda2_per_layer: List[float]
    adsb_per_layer: List[float]
    admissible_per_layer: List[bool]
    theta: WeightVector
    chebyshev_gap: float
    mu_interval: Optional[Interval]
    spectral_norm: float
    weighted_lambda: float
    lambda_h: float
    critical_c: Optional[float]

    @property
    def feasible(self) -> bool:
        return self.critical_c is not None


@dataclass(frozen=True)
class ControlAnalysis:
    nlevec_per_layer: List[WeightVector]
    lambda_max_per_layer: List[float]
    adcb_per_layer: List[float]
    admissible_per_layer: List[bool]
    theta: WeightVector
    chebyshev_gap: float
    nu_interval: Optional[Interval]
    max_theta: float
    weighted_lambda: float
    lambda_h: float
    critical_c: Optional[float]
    notes: List[str] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.critical_c is not None


def _check_length(n: int, theta: WeightVector) -> None:
    if theta.n != n:
        raise ShapeMismatch(f"Weight vector has length {theta.n}, expected {n}")


def nlevec(g: CouplingMatrix) -> WeightVector:
    """Normalized left eigenvector for the zero eigenvalue.

    Rows of G^T sum to zero, so one of them is redundant; the row that
    lands on the smallest pivot of a trial factorization is replaced by the
    normalization row 1^T and the resulting square system is solved.
    """
    if not is_strongly_connected(g):
        raise NotStronglyConnected(
            f"Coupling matrix with {g.n} nodes is not strongly connected"
        )
    n = g.n
    if n == 1:
        return WeightVector(v=np.ones(1), provenance=Provenance.NLEVEC)

    a = g.m.T.copy()
    lu, perm = lu_factor(a)
    redundant = int(perm[int(np.argmin(np.abs(np.diag(lu))))])
    a[redundant, :] = 1.0
    rhs = np.zeros(n)
    rhs[redundant] = 1.0

    try:
        xi = lu_solve(a, rhs)
    except SingularMatrix as e:
        raise NotStronglyConnected(f"Zero eigenvalue is not simple: {str(e)}")

    if np.any(xi <= 0.0):
        raise NotStronglyConnected(f"Null vector has nonpositive entries: {xi.tolist()}")
    return WeightVector(v=xi / xi.sum(), provenance=Provenance.NLEVEC)


def build_g_theta(g: CouplingMatrix, theta: WeightVector) -> np.ndarray:
    """[(Theta - theta theta^T) G + G^T (Theta - theta theta^T)] / 2"""
    _check_length(g.n, theta)
    p = np.diag(theta.v) - np.outer(theta.v, theta.v)
    half = p @ g.m
    return (half + half.T) / 2.0


def lambda2_transverse(s: np.ndarray) -> float:
    """Largest eigenvalue of a symmetric s restricted to {x : x^T 1 = 0}"""
    s = np.asarray(s, dtype=np.float64)
    n = s.shape[0]
    residual = float(np.abs(s @ np.ones(n)).max())
    if residual > KERNEL_TOLERANCE * matrix_one_norm(s):
        raise NotInKernel(
            f"Matrix does not annihilate the all-ones vector (residual {residual:.3e})"
        )
    q = transverse_basis(n)
    projected = q @ s @ q.T
    projected = (projected + projected.T) / 2.0
    return jacobi_eigen(projected).lambda_max


def _require_multi_node(g: CouplingMatrix) -> None:
    if g.n < 2:
        raise InvalidInput("Deviation bounds need at least two nodes")


def adsb(g: CouplingMatrix) -> float:
    """Allowable deviation synchronization bound |lambda_2(G_xi)| / (2 sqrt(N) ||G||_1)"""
    _require_multi_node(g)
    xi = nlevec(g)
    lambda2 = lambda2_transverse(build_g_theta(g, xi))
    return abs(lambda2) / (2.0 * np.sqrt(g.n) * matrix_one_norm(g.m))


def build_control_g_theta(gt: PinnedMatrix, theta: WeightVector) -> np.ndarray:
    """(Theta G~ + G~^T Theta) / 2"""
    _check_length(gt.n, theta)
    half = np.diag(theta.v) @ gt.m
    return (half + half.T) / 2.0


def control_lambda_max(gt: PinnedMatrix, theta: WeightVector) -> float:
    return jacobi_eigen(build_control_g_theta(gt, theta)).lambda_max


def adcb(gt: PinnedMatrix, xi: WeightVector) -> float:
    """Allowable deviation control bound |lambda_max(xi G~)| / (sqrt(N) ||G~||_1)"""
    lambda_max = control_lambda_max(gt, xi)
    if lambda_max >= 0.0:
        raise NotNegativeDefinite(
            f"Pinned reference matrix has lambda_max = {lambda_max:.6g} >= 0"
        )
    return abs(lambda_max) / (np.sqrt(gt.n) * matrix_one_norm(gt.m))


def chebyshev_gap(a: WeightVector, b: WeightVector) -> float:
    if a.n != b.n:
        raise ShapeMismatch(f"Vectors have lengths {a.n} and {b.n}")
    return float(np.abs(a.v - b.v).max())


def feasible_mu_interval(adsb1: float, adsb2: float, gap: float) -> Optional[Interval]:
    """Range of mu^1 for which theta = mu^1 xi^1 + mu^2 xi^2 stays admissible
    for both layers; None when gap > adsb1 + adsb2.
    """
    if adsb1 <= 0.0 or adsb2 <= 0.0:
        raise InvalidInput(f"Bounds must be positive, got {adsb1}, {adsb2}")
    if gap < 0.0:
        raise InvalidInput(f"Chebyshev gap must be nonnegative, got {gap}")
    if gap == 0.0:
        return Interval(0.0, 1.0)
    if gap > adsb1 + adsb2:
        return None

    omega1 = adsb2 / gap
    omega2 = adsb1 / gap
    lower = max(0.0, 1.0 - omega2)
    upper = min(1.0, omega1)
    # equality case of gap == adsb1 + adsb2 can round either way
    lower = min(lower, upper)
    return Interval(lower, upper)


def combine_theta(mu1: float, xi1: WeightVector, xi2: WeightVector) -> WeightVector:
    """Convex combination mu^1 xi^1 + (1 - mu^1) xi^2"""
    if not 0.0 <= mu1 <= 1.0:
        raise InvalidInput(f"mu^1 must lie in [0, 1], got {mu1}")
    if xi1.n != xi2.n:
        raise ShapeMismatch(f"Vectors have lengths {xi1.n} and {xi2.n}")
    v = mu1 * xi1.v + (1.0 - mu1) * xi2.v
    return WeightVector(v=v / v.sum(), provenance=Provenance.COMBINED)


def combine_many(weights: Sequence[float], xis: Sequence[WeightVector]) -> WeightVector:
    v = sum(float(w) * xi.v for w, xi in zip(weights, xis))
    return WeightVector(v=v / v.sum(), provenance=Provenance.COMBINED)


@dataclass(frozen=True)
class Admissibility:
    gap: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.gap <= self.bound


def theta_admissibility(
    theta: WeightVector, xis: Sequence[WeightVector], bounds: Sequence[float]
) -> List[Admissibility]:
    """Gap of theta to each layer's NLEVec against that layer's bound"""
    if len(xis) != len(bounds):
        raise InvalidInput("Need one bound per NLEVec")
    return [Admissibility(chebyshev_gap(theta, xi), float(b)) for xi, b in zip(xis, bounds)]


def check_theta_admissible(
    layers: Sequence[CouplingMatrix], theta: WeightVector
) -> List[bool]:
    """Per layer: chebyshev_gap(theta, xi^m) <= ADSB(G^m)"""
    for g in layers:
        _check_length(g.n, theta)
    xis = [nlevec(g) for g in layers]
    bounds = [adsb(g) for g in layers]
    return [a.holds for a in theta_admissibility(theta, xis, bounds)]


def _simplex_grid(m: int, resolution: int) -> Iterable[Tuple[int, ...]]:
    for head in itertools.product(range(resolution + 1), repeat=m - 1):
        rest = resolution - sum(head)
        if rest >= 0:
            yield head + (rest,)


def select_theta(
    xis: Sequence[WeightVector], bounds: Sequence[float], grid: int = 20
) -> Optional[WeightVector]:
    """Pick a combination of NLEVecs admissible for every layer.

    One layer: its NLEVec. Two layers: midpoint of the feasible mu interval.
    More layers: best smallest slack over a simplex grid.
    """
    if not xis or len(xis) != len(bounds):
        raise InvalidInput("Need one bound per NLEVec")
    if len(xis) == 1:
        return xis[0]
    if len(xis) == 2:
        interval = feasible_mu_interval(bounds[0], bounds[1], chebyshev_gap(xis[0], xis[1]))
        if interval is None:
            return None
        return combine_theta(interval.midpoint, xis[0], xis[1])

    best, best_slack = None, -np.inf
    for point in _simplex_grid(len(xis), grid):
        weights = [k / grid for k in point]
        theta = combine_many(weights, xis)
        slack = min(b - chebyshev_gap(theta, xi) for xi, b in zip(xis, bounds))
        if slack >= 0.0 and slack > best_slack:
            best, best_slack = theta, slack
    if best is None:
        logger.warning(f"No admissible combination found on a grid of resolution {grid}")
    return best


def _min_gamma(gamma: Sequence[float]) -> float:
    gamma = np.asarray(gamma, dtype=np.float64)
    if gamma.size == 0 or np.any(gamma <= 0.0):
        raise InvalidInput(f"Inner matrix diagonal must be positive, got {gamma.tolist()}")
    return float(gamma.min())


def _pair_gap(xis: Sequence[WeightVector]) -> float:
    if len(xis) < 2:
        return 0.0
    return max(chebyshev_gap(a, b) for a, b in itertools.combinations(xis, 2))


def sync_critical_c(
    lambda_h: float,
    layers: Sequence[Tuple[CouplingMatrix, Sequence[float]]],
    theta: WeightVector,
) -> SyncAnalysis:
    """Coupling strength above which L_h + c sum_m lambda_2(G^m_theta) min_k gamma^m_k
    / ||Theta - theta theta^T||_2 < 0.
    """
    if lambda_h <= 0.0:
        raise InvalidInput(f"L_h must be positive, got {lambda_h}")
    if not layers:
        raise InvalidInput("At least one layer is required")

    xis, lambda2s, bounds = [], [], []
    weighted = 0.0
    for g, gamma in layers:
        _check_length(g.n, theta)
        xi = nlevec(g)
        bound = adsb(g)
        lambda2 = lambda2_transverse(build_g_theta(g, theta))
        xis.append(xi)
        bounds.append(bound)
        lambda2s.append(lambda2)
        weighted += lambda2 * _min_gamma(gamma)

    admissible = [a.holds for a in theta_admissibility(theta, xis, bounds)]
    norm = spectral_norm_symmetric(np.diag(theta.v) - np.outer(theta.v, theta.v))
    gap = _pair_gap(xis)
    interval = feasible_mu_interval(bounds[0], bounds[1], gap) if len(layers) == 2 else None
    critical = lambda_h * norm / abs(weighted) if weighted < 0.0 else None
    logger.debug(f"Sync analysis: weighted lambda {weighted:.6g}, critical c {critical}")

    return SyncAnalysis(
        nlevec_per_layer=xis,
        lambda2_per_layer=lambda2s,
        adsb_per_layer=bounds,
        admissible_per_layer=admissible,
        theta=theta,
        chebyshev_gap=gap,
        mu_interval=interval,
        spectral_norm=norm,
        weighted_lambda=weighted,
        lambda_h=lambda_h,
        critical_c=critical,
    )


PINNED_BOUND_NOTE = (
    "The two-layer control condition is stated with the unpinned bounds "
    "ADCB(G^1) + ADCB(G^2) while the nu constraints use the pinned matrices; "
    "every bound here is computed on the pinned matrices G~^m."
)


def control_critical_c(
    lambda_h: float,
    layers: Sequence[Tuple[PinnedMatrix, Sequence[float]]],
    theta: WeightVector,
) -> ControlAnalysis:
    """Coupling strength above which L_h + c sum_m lambda_max(theta G~^m) min_k gamma^m_k
    / max_i theta_i < 0.
    """
    if lambda_h <= 0.0:
        raise InvalidInput(f"L_h must be positive, got {lambda_h}")
    if not layers:
        raise InvalidInput("At least one layer is required")

    xis, lambda_maxes, bounds = [], [], []
    weighted = 0.0
    for gt, gamma in layers:
        _check_length(gt.n, theta)
        xi = nlevec(gt.base)
        bound = adcb(gt, xi)
        lambda_max = control_lambda_max(gt, theta)
        xis.append(xi)
        bounds.append(bound)
        lambda_maxes.append(lambda_max)
        weighted += lambda_max * _min_gamma(gamma)

    admissible = [a.holds for a in theta_admissibility(theta, xis, bounds)]
    max_theta = float(theta.v.max())
    gap = _pair_gap(xis)
    interval = feasible_mu_interval(bounds[0], bounds[1], gap) if len(layers) == 2 else None
    critical = lambda_h * max_theta / abs(weighted) if weighted < 0.0 else None
    notes = [PINNED_BOUND_NOTE] if len(layers) == 2 else []

    return ControlAnalysis(
        nlevec_per_layer=xis,
        lambda_max_per_layer=lambda_maxes,
        adcb_per_layer=bounds,
        admissible_per_layer=admissible,
        theta=theta,
        chebyshev_gap=gap,
        nu_interval=interval,
        max_theta=max_theta,
        weighted_lambda=weighted,
        lambda_h=lambda_h,
        critical_c=critical,
        notes=notes,
    )
