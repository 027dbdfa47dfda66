import numpy as np
import pytest

from infoplane.network import Network, NetworkSpec, build_network


@pytest.fixture
def identity_2x2() -> Network:
    """Single layer, identity weights and activation: T(x) = x."""
    spec = NetworkSpec(layer_dims=(2, 2), activations=("identity",), seed=0)
    return Network(spec=spec, weights=(np.eye(2),), biases=(np.zeros(2),))


@pytest.fixture
def linear_1234() -> Network:
    """Single bias-free linear layer with W = [[1, 2], [3, 4]]."""
    spec = NetworkSpec(layer_dims=(2, 2), activations=("identity",), seed=0)
    w = np.array([[1.0, 2.0], [3.0, 4.0]])
    return Network(spec=spec, weights=(w,), biases=(np.zeros(2),))


@pytest.fixture
def tanh_net_seed7() -> Network:
    """Two tanh layers with seeded random weights."""
    spec = NetworkSpec(layer_dims=(3, 5, 4), activations=("tanh", "tanh"), seed=7)
    return build_network(spec)


@pytest.fixture
def scalar_tanh_net() -> Network:
    """1-d network computing T(x) = tanh(x)."""
    spec = NetworkSpec(layer_dims=(1, 1), activations=("tanh",), seed=0)
    return Network(spec=spec, weights=(np.array([[1.0]]),), biases=(np.zeros(1),))


def random_network(rng: np.random.Generator, activations=("tanh", "sigmoid", "identity"),
                   max_dim: int = 8, max_depth: int = 4) -> Network:
    """Random small MLP for property sweeps; architecture drawn from rng."""
    depth = int(rng.integers(1, max_depth + 1))
    dims = tuple(int(rng.integers(1, max_dim + 1)) for _ in range(depth + 1))
    acts = tuple(str(rng.choice(activations)) for _ in range(depth))
    spec = NetworkSpec(layer_dims=dims, activations=acts, seed=int(rng.integers(0, 2**31)))
    return build_network(spec)
