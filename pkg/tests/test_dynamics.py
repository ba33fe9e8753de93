import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.errors import InvalidInput, NonFiniteState, NotStronglyConnected, ShapeMismatch
from src.dynamics.integrator import integrate, rk4_step
from src.dynamics.models import LinearTestModel, LorenzModel, create_model, model_rhs
from src.dynamics.network import (
    AdaptiveCoupling,
    FixedCoupling,
    Layer,
    NetworkSpec,
    PinningSpec,
    adaptive_gain_rhs,
    dummy_target,
    lyapunov_V,
    lyapunov_W,
    network_rhs,
)
from src.network.graph import validate_coupling
from src.network.spectral import WeightVector, nlevec
from tests.conftest import DISCONNECTED


def two_layer_spec(g1, g2, pinning=None, coupling=None):
    return NetworkSpec(
        layers=[
            Layer(g=g1, gamma=np.array([1.0, 2.0, 1.0])),
            Layer(g=g2, gamma=np.ones(3)),
        ],
        coupling=coupling or FixedCoupling(c=1.0),
        model=LorenzModel(),
        pinning=pinning,
    )


def loop_rhs(spec, states, c, target=None):
    """Straightforward double-loop evaluation of the network equations"""
    n, dim = states.shape
    out = np.zeros_like(states)
    for i in range(n):
        out[i] = model_rhs(spec.model, states[i])
        for layer_index, layer in enumerate(spec.layers):
            for j in range(n):
                out[i] += c * layer.g.m[i, j] * layer.gamma * states[j]
            if target is not None:
                d = spec.pinning.gains[layer_index][i]
                out[i] -= c * d * layer.gamma * (states[i] - target)
    return out


# ---- node models ----


def test_lorenz_rhs():
    assert_allclose(model_rhs(LorenzModel(), [1.0, 1.0, 1.0]), [0.0, 26.0, 1.0 - 8.0 / 3.0])


def test_lorenz_vectorized_matches_rows(rng):
    model = LorenzModel()
    x = rng.uniform(-5.0, 5.0, size=(4, 3))
    assert_allclose(model.evaluate(x), np.array([model_rhs(model, row) for row in x]))


def test_linear_model_quad_constant():
    model = LinearTestModel([[-0.5, 1.0], [-1.0, -0.5]])
    assert model.quad_constant() == pytest.approx(-0.5)
    assert_allclose(model_rhs(model, [1.0, 0.0]), [-0.5, -1.0])


def test_create_model_errors():
    with pytest.raises(InvalidInput):
        create_model("duffing")
    with pytest.raises(InvalidInput):
        create_model("linear_test", {})
    with pytest.raises(InvalidInput):
        create_model("lorenz", {"sigma": 10.0, "omega": 1.0})


def test_model_rhs_rejects_bad_state():
    with pytest.raises(ShapeMismatch):
        model_rhs(LorenzModel(), [1.0, 2.0])
    with pytest.raises(NonFiniteState):
        model_rhs(LorenzModel(), [1.0, np.nan, 0.0])


# ---- network right-hand side ----


def test_network_rhs_matches_loops(g1, g2, rng):
    spec = two_layer_spec(g1, g2)
    states = rng.uniform(-5.0, 5.0, size=(3, 3))
    assert_allclose(network_rhs(spec, 0.0, states, 1.3), loop_rhs(spec, states, 1.3), atol=1e-12)


def test_pinned_network_rhs_matches_loops(g1, g2, rng):
    pinning = PinningSpec(gains=[[2.0, 0.0, 0.0], [1.0, 0.0, 0.5]], target_init=[1.0, 2.0, 3.0])
    spec = two_layer_spec(g1, g2, pinning=pinning)
    states = rng.uniform(-5.0, 5.0, size=(3, 3))
    target = rng.uniform(-5.0, 5.0, size=3)
    assert_allclose(
        network_rhs(spec, 0.0, states, 0.7, target),
        loop_rhs(spec, states, 0.7, target),
        atol=1e-12,
    )


def test_network_rhs_guard(g1, g2):
    spec = two_layer_spec(g1, g2)
    states = np.full((3, 3), 2e9)
    with pytest.raises(NonFiniteState):
        network_rhs(spec, 0.0, states, 1.0)


def test_network_spec_validation(g1, g2):
    with pytest.raises(ShapeMismatch):
        NetworkSpec(
            layers=[Layer(g=g1, gamma=np.ones(2))], coupling=FixedCoupling(1.0), model=LorenzModel()
        )
    with pytest.raises(NotStronglyConnected):
        NetworkSpec(
            layers=[Layer(g=validate_coupling(DISCONNECTED), gamma=np.ones(3))],
            coupling=FixedCoupling(1.0),
            model=LorenzModel(),
        )
    with pytest.raises(ShapeMismatch):
        two_layer_spec(g1, g2, pinning=PinningSpec(gains=[[1.0, 0.0, 0.0]], target_init=np.zeros(3)))
    with pytest.raises(InvalidInput):
        FixedCoupling(c=0.0)
    with pytest.raises(InvalidInput):
        AdaptiveCoupling(beta=1.0, c0=-1.0)


# ---- error functionals ----


def test_dummy_target_and_v(g1):
    theta = nlevec(g1)
    states = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]])
    assert_allclose(dummy_target(theta, states), [1.0, 0.0])
    assert lyapunov_V(theta, states) == 0.0

    states = np.array([[1.0], [0.0], [0.0]])
    zbar = 0.3
    expected = 0.5 * (0.3 * (1 - zbar) ** 2 + 0.2 * zbar**2 + 0.5 * zbar**2)
    assert lyapunov_V(theta, states) == pytest.approx(expected)


def test_lyapunov_w_and_gain_rule():
    theta = WeightVector.uniform(2)
    states = np.array([[1.0, 1.0], [3.0, 1.0]])
    target = np.array([1.0, 1.0])
    assert lyapunov_W(theta, states, target) == pytest.approx(0.5 * 0.5 * 4.0)
    assert adaptive_gain_rhs(2.0, theta, states, target) == pytest.approx(2.0)
    assert adaptive_gain_rhs(2.0, theta, states) == pytest.approx(2.0 * lyapunov_V(theta, states))
    with pytest.raises(InvalidInput):
        adaptive_gain_rhs(0.0, theta, states)


# ---- integrator ----


def test_rk4_constant_rhs():
    y = np.array([1.0, -2.0])
    assert_allclose(rk4_step(lambda t, y: np.zeros_like(y), 0.0, y, 0.1), y)


def test_rk4_single_step_accuracy():
    y = rk4_step(lambda t, y: -y, 0.0, np.array([1.0]), 0.01)
    assert abs(y[0] - math.exp(-0.01)) < 1e-11


def test_rk4_order_of_convergence():
    def error(n_steps):
        y = integrate(lambda t, y: -y, np.array([1.0]), 1.0 / n_steps, n_steps)
        return abs(y[0] - math.exp(-1.0))

    order = math.log2(error(10) / error(20))
    assert 3.8 <= order <= 4.2


def test_rk4_rejects_nonpositive_step():
    with pytest.raises(InvalidInput):
        rk4_step(lambda t, y: y, 0.0, np.array([1.0]), 0.0)
