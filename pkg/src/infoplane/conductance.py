"""Per-layer conductance: sensitivity-weighted input attribution.

Two routes to the same layer-level quantity:

* gradient conductance J_l(x) @ x -- one JVP with the input itself as the
  direction, i.e. the weighted sum over input features of dT_l/dX_i * X_i;
* integrated gradients (x - x') @ mean of J_l along the straight path from
  a baseline x' to x, approximated by an m-point Riemann rule.

For bias-free linear chains both collapse to the layer activations, which
the tests lean on heavily.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError, ValidationError
from .network import Network, batch_jvp, jvp
from .validation import as_matrix, as_vector, check_positive_int

METHODS = ("gradient", "integrated")
IG_RULES = ("midpoint", "left")


@dataclass(frozen=True)
class IGConfig:
    """Integrated-gradients settings: baseline point, step count, quadrature rule.

    ``baseline=None`` means the zero vector.  The midpoint rule evaluates at
    alpha = (k + 0.5)/m and halves the error constant of the left rule.
    """

    baseline: np.ndarray | None = None
    steps: int = 128
    rule: str = "midpoint"

    def __post_init__(self):
        check_positive_int(self.steps, "steps")
        if self.rule not in IG_RULES:
            raise ValidationError(f"rule must be one of {IG_RULES}, got {self.rule!r}")
        if self.baseline is not None:
            object.__setattr__(
                self, "baseline", as_vector(self.baseline, "baseline")
            )

    def resolve_baseline(self, d0: int) -> np.ndarray:
        if self.baseline is None:
            return np.zeros(d0)
        if self.baseline.size != d0:
            raise DimensionError(
                f"baseline has length {self.baseline.size}, expected {d0}"
            )
        return self.baseline

    def alphas(self) -> np.ndarray:
        k = np.arange(self.steps, dtype=np.float64)
        if self.rule == "midpoint":
            return (k + 0.5) / self.steps
        return k / self.steps


@dataclass(frozen=True)
class ConductanceRecord:
    """Batch of conductance vectors for one layer."""

    layer_index: int
    method: str
    values: np.ndarray = field(repr=False)
    config: IGConfig | None = None


def gradient_conductance(net: Network, layer: int, x) -> np.ndarray:
    """Conductance of layer ``layer`` at ``x``: the JVP with direction x."""
    x = as_vector(x, "x", length=net.input_dim)
    return jvp(net, layer, x, x)


def integrated_gradients_conductance(net: Network, layer: int, x, cfg: IGConfig | None = None) -> np.ndarray:
    """Path-integral conductance from cfg.baseline to x.

    Averages J_l(x' + alpha_k (x - x')) @ (x - x') over the rule's path
    points; the average equals the Riemann sum because the displacement is
    constant along the path.
    """
    cfg = cfg or IGConfig()
    x = as_vector(x, "x", length=net.input_dim)
    baseline = cfg.resolve_baseline(net.input_dim)
    delta = x - baseline
    alphas = cfg.alphas()
    points = baseline.reshape(1, -1) + alphas.reshape(-1, 1) * delta.reshape(1, -1)
    directions = np.repeat(delta.reshape(1, -1), alphas.size, axis=0)
    terms = batch_jvp(net, layer, points, directions)
    # reduce along a contiguous axis: pairwise summation keeps the step
    # average exact when the integrand is constant along the path
    return np.ascontiguousarray(terms.T).mean(axis=1)


def batch_conductance(net: Network, layer: int, X, method: str = "gradient", cfg: IGConfig | None = None) -> ConductanceRecord:
    """Apply the chosen single-sample conductance to every row of X.

    Row n of the result is exactly the single-sample value at X[n]; rows
    are computed and stored in input order.
    """
    if method not in METHODS:
        raise ValidationError(f"method must be one of {METHODS}, got {method!r}")
    X = as_matrix(X, "X", allow_1d=True)
    if method == "gradient":
        if cfg is not None:
            raise ValidationError("cfg only applies to the integrated method")
        values = batch_jvp(net, layer, X, X)
        return ConductanceRecord(layer_index=layer, method=method, values=values)
    cfg = cfg or IGConfig()
    rows = [integrated_gradients_conductance(net, layer, X[n], cfg) for n in range(X.shape[0])]
    return ConductanceRecord(layer_index=layer, method=method, values=np.stack(rows), config=cfg)
