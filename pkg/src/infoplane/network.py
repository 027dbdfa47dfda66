"""Dense feed-forward networks with forward-mode differentiation.

The engine is deliberately small: fully-connected layers, a fixed menu of
activations, and three views of the same layer chain

* :func:`forward_collect` -- post-activation values of every layer,
* :func:`jvp` -- directional derivative J_l(x) @ v pushed forward through
  the chain alongside the values (forward-mode tangents),
* :func:`jacobian` -- the full d_l x d_0 input Jacobian assembled from one
  JVP per input basis vector, so the cost is O(d_0) forward passes.

All arithmetic is float64.  Weight initialisation draws from numpy's PCG64
generator, so a ``NetworkSpec`` seed pins the weights bit-for-bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError, ValidationError
from .validation import as_matrix, as_vector, check_finite

ACTIVATIONS = ("identity", "relu", "tanh", "sigmoid", "softmax")


@dataclass(frozen=True)
class NetworkSpec:
    """Architecture description: layer widths, activation per layer, init seed.

    ``layer_dims`` is [d_0, d_1, ..., d_L]; ``activations`` has one entry per
    weight layer.  Softmax is only legal as the final activation.
    """

    layer_dims: tuple[int, ...]
    activations: tuple[str, ...]
    seed: int = 0

    def __post_init__(self):
        dims = tuple(int(d) for d in self.layer_dims)
        acts = tuple(str(a) for a in self.activations)
        object.__setattr__(self, "layer_dims", dims)
        object.__setattr__(self, "activations", acts)
        if len(dims) < 2:
            raise ValidationError("layer_dims needs at least input and one layer")
        if any(d < 1 for d in dims):
            raise ValidationError(f"layer_dims must be positive, got {dims}")
        if len(acts) != len(dims) - 1:
            raise ValidationError(
                f"need {len(dims) - 1} activations for {len(dims)} dims, got {len(acts)}"
            )
        for pos, act in enumerate(acts):
            if act not in ACTIVATIONS:
                raise ValidationError(f"unknown activation {act!r}; choose from {ACTIVATIONS}")
            if act == "softmax" and pos != len(acts) - 1:
                raise ValidationError("softmax is only allowed as the final activation")

    @property
    def num_layers(self) -> int:
        return len(self.layer_dims) - 1


@dataclass(frozen=True)
class Network:
    """Immutable weights + biases matching a :class:`NetworkSpec`.

    Weight l has shape (d_l, d_{l-1}); bias l has shape (d_l,).  Arrays are
    frozen (writeable=False) so instances are safe to share across threads.
    """

    spec: NetworkSpec
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def __post_init__(self):
        dims = self.spec.layer_dims
        if len(self.weights) != self.spec.num_layers or len(self.biases) != self.spec.num_layers:
            raise DimensionError("weights/biases count must equal the number of layers")
        ws, bs = [], []
        for l, (w, b) in enumerate(zip(self.weights, self.biases), start=1):
            w = np.ascontiguousarray(np.asarray(w, dtype=np.float64))
            b = np.ascontiguousarray(np.asarray(b, dtype=np.float64)).reshape(-1)
            if w.shape != (dims[l], dims[l - 1]):
                raise DimensionError(
                    f"weight {l} has shape {w.shape}, expected {(dims[l], dims[l - 1])}"
                )
            if b.shape != (dims[l],):
                raise DimensionError(f"bias {l} has shape {b.shape}, expected {(dims[l],)}")
            check_finite(w, f"weight {l}")
            check_finite(b, f"bias {l}")
            w.flags.writeable = False
            b.flags.writeable = False
            ws.append(w)
            bs.append(b)
        object.__setattr__(self, "weights", tuple(ws))
        object.__setattr__(self, "biases", tuple(bs))

    @property
    def num_layers(self) -> int:
        return self.spec.num_layers

    @property
    def input_dim(self) -> int:
        return self.spec.layer_dims[0]

    def layer_name(self, layer: int) -> str:
        return f"fc{layer}"


@dataclass(frozen=True)
class LayerTrace:
    """Post-activation values of one layer for a batch; layer_index is 1-based."""

    layer_index: int
    layer_name: str
    activations: np.ndarray = field(repr=False)


def build_network(spec: NetworkSpec) -> Network:
    """Initialise weights uniformly in [-1/sqrt(fan_in), +1/sqrt(fan_in)].

    Draws come from numpy's PCG64 stream seeded with ``spec.seed``, which
    makes initialisation reproducible across platforms.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    weights, biases = [], []
    dims = spec.layer_dims
    for l in range(1, len(dims)):
        bound = 1.0 / np.sqrt(dims[l - 1])
        weights.append(rng.uniform(-bound, bound, size=(dims[l], dims[l - 1])))
        biases.append(rng.uniform(-bound, bound, size=dims[l]))
    return Network(spec=spec, weights=tuple(weights), biases=tuple(biases))


def _apply_activation(kind: str, z: np.ndarray) -> np.ndarray:
    if kind == "identity":
        return z
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "tanh":
        return np.tanh(z)
    if kind == "sigmoid":
        return 1.0 / (1.0 + np.exp(-z))
    if kind == "softmax":
        shifted = z - z.max(axis=-1, keepdims=True)
        e = np.exp(shifted)
        return e / e.sum(axis=-1, keepdims=True)
    raise ValidationError(f"unknown activation {kind!r}")


def _tangent_through_activation(kind: str, a: np.ndarray, tz: np.ndarray) -> np.ndarray:
    """Push a tangent through the activation, given post-activation values a.

    ReLU's derivative at exactly 0 is taken to be 0 (a == 0 there), which
    keeps results deterministic.  Softmax uses the diag(p) - p p^T form.
    """
    if kind == "identity":
        return tz
    if kind == "relu":
        return np.where(a > 0.0, tz, 0.0)
    if kind == "tanh":
        return (1.0 - a * a) * tz
    if kind == "sigmoid":
        return a * (1.0 - a) * tz
    if kind == "softmax":
        inner = np.sum(a * tz, axis=-1, keepdims=True)
        return a * (tz - inner)
    raise ValidationError(f"unknown activation {kind!r}")


def _check_layer(net: Network, layer: int) -> int:
    layer = int(layer)
    if not 1 <= layer <= net.num_layers:
        raise IndexError(f"layer {layer} out of range 1..{net.num_layers}")
    return layer


def forward_collect(net: Network, X) -> list[LayerTrace]:
    """Run the batch through the network, capturing every layer.

    Returns one :class:`LayerTrace` per layer, in depth order; the last
    trace holds the network output.  Deterministic for fixed inputs.
    """
    X = as_matrix(X, "X", allow_1d=True)
    if X.shape[1] != net.input_dim:
        raise DimensionError(f"X has {X.shape[1]} columns, network expects {net.input_dim}")
    a = X
    traces = []
    for l in range(net.num_layers):
        z = a @ net.weights[l].T + net.biases[l]
        a = _apply_activation(net.spec.activations[l], z)
        traces.append(LayerTrace(layer_index=l + 1, layer_name=net.layer_name(l + 1), activations=a))
    return traces


def forward(net: Network, X) -> np.ndarray:
    """Network output for a batch (the final trace of :func:`forward_collect`)."""
    return forward_collect(net, X)[-1].activations


def batch_jvp(net: Network, layer: int, X, V) -> np.ndarray:
    """Row-wise J_l(X[n]) @ V[n] for a batch of base points and directions."""
    layer = _check_layer(net, layer)
    X = as_matrix(X, "X", allow_1d=True)
    V = as_matrix(V, "V", allow_1d=True)
    if X.shape != V.shape:
        raise DimensionError(f"X {X.shape} and V {V.shape} must match")
    if X.shape[1] != net.input_dim:
        raise DimensionError(f"X has {X.shape[1]} columns, network expects {net.input_dim}")
    a, ta = X, V
    for l in range(layer):
        z = a @ net.weights[l].T + net.biases[l]
        tz = ta @ net.weights[l].T
        a = _apply_activation(net.spec.activations[l], z)
        ta = _tangent_through_activation(net.spec.activations[l], a, tz)
    return ta


def jvp(net: Network, layer: int, x, v) -> np.ndarray:
    """Jacobian-vector product J_l(x) @ v via forward-mode tangents.

    Args:
        net: the network.
        layer: 1-based layer index.
        x: base point, length d_0.
        v: tangent direction, length d_0.

    Returns:
        Vector of length d_l equal to the directional derivative of the
        layer-l activations at x along v.
    """
    x = as_vector(x, "x", length=net.input_dim)
    v = as_vector(v, "v", length=net.input_dim)
    return batch_jvp(net, layer, x.reshape(1, -1), v.reshape(1, -1))[0]


def jacobian(net: Network, layer: int, x) -> np.ndarray:
    """Full input Jacobian of layer ``layer`` at ``x``, shape (d_l, d_0).

    Assembled column by column from JVPs over the input basis vectors;
    costs d_0 forward passes, which is the right trade at small widths.
    """
    layer = _check_layer(net, layer)
    x = as_vector(x, "x", length=net.input_dim)
    d0 = net.input_dim
    basis = np.eye(d0)
    base = np.repeat(x.reshape(1, -1), d0, axis=0)
    cols = batch_jvp(net, layer, base, basis)  # row i = J @ e_i
    return np.ascontiguousarray(cols.T)


def finite_diff_jacobian(net: Network, layer: int, x, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian (T_l(x + h e_i) - T_l(x - h e_i)) / 2h.

    Test oracle for :func:`jacobian`; truncation error is O(h^2).
    """
    layer = _check_layer(net, layer)
    if not h > 0:
        raise ValidationError(f"step h must be > 0, got {h}")
    x = as_vector(x, "x", length=net.input_dim)
    d0 = net.input_dim
    eye = np.eye(d0)
    plus = np.stack([x + h * eye[i] for i in range(d0)])
    minus = np.stack([x - h * eye[i] for i in range(d0)])
    t_plus = forward_collect(net, plus)[layer - 1].activations
    t_minus = forward_collect(net, minus)[layer - 1].activations
    return np.ascontiguousarray((t_plus - t_minus).T / (2.0 * h))


def save_network(net: Network, path) -> None:
    """Serialise spec + parameters as JSON (float64 round-trip exact)."""
    payload = {
        "layer_dims": list(net.spec.layer_dims),
        "activations": list(net.spec.activations),
        "seed": net.spec.seed,
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_network(path) -> Network:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    spec = NetworkSpec(
        layer_dims=tuple(payload["layer_dims"]),
        activations=tuple(payload["activations"]),
        seed=int(payload.get("seed", 0)),
    )
    return Network(
        spec=spec,
        weights=tuple(np.asarray(w, dtype=np.float64) for w in payload["weights"]),
        biases=tuple(np.asarray(b, dtype=np.float64) for b in payload["biases"]),
    )
