"""Seeded data generators, a toy trainer, and exact Markov-chain oracles.

Normal variates come from Box-Muller over PCG64 uniforms rather than the
generator's native normal sampler, so the exact draw sequence is pinned
by this module and not by numpy's ziggurat implementation.  Golden
values derived from these samples still carry small tolerances because
transcendental rounding may differ across platforms.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, ValidationError
from .information import GaussianSpec, LabelSet
from .network import Network, forward_collect
from .validation import as_matrix, check_positive_int, check_same_rows

ACT_DERIV_FROM_OUTPUT = {
    "identity": lambda a: np.ones_like(a),
    "relu": lambda a: (a > 0.0).astype(np.float64),
    "tanh": lambda a: 1.0 - a * a,
    "sigmoid": lambda a: a * (1.0 - a),
}


def _box_muller(rng: np.random.Generator, count: int) -> np.ndarray:
    pairs = (count + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # (0, 1]: keeps the log finite
    u2 = rng.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2.0 * np.pi * u2), r * np.sin(2.0 * np.pi * u2)])
    return z[:count]


def _covariance_factor(cov: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        # PSD-singular: factor through the eigendecomposition instead
        w, v = np.linalg.eigh(cov)
        return v @ np.diag(np.sqrt(np.clip(w, 0.0, None)))


def gen_gaussian(spec: GaussianSpec, n: int, seed: int = 0) -> np.ndarray:
    """n seeded samples from N(mean, covariance)."""
    check_positive_int(n, "n")
    rng = np.random.Generator(np.random.PCG64(seed))
    z = _box_muller(rng, n * spec.dim).reshape(n, spec.dim)
    return spec.mean + z @ _covariance_factor(spec.covariance).T


def circle_centers(classes: int, radius: float = 4.0) -> np.ndarray:
    """Class centers evenly spaced on a circle around the origin."""
    angles = 2.0 * np.pi * np.arange(classes) / classes
    return radius * np.column_stack([np.cos(angles), np.sin(angles)])


@dataclass(frozen=True)
class BlobsSpec:
    """K isotropic Gaussian clusters in the plane, class-balanced."""

    classes: int = 3
    per_class: int = 100
    centers: np.ndarray | None = None
    spread: float = 1.0
    seed: int = 0

    def __post_init__(self):
        check_positive_int(self.classes, "classes", minimum=2)
        check_positive_int(self.per_class, "per_class")
        if not self.spread > 0:
            raise ValidationError("spread must be > 0")
        centers = self.centers if self.centers is not None else circle_centers(self.classes)
        centers = np.ascontiguousarray(centers, dtype=np.float64)
        if centers.shape != (self.classes, 2):
            raise DimensionError(f"centers must have shape ({self.classes}, 2)")
        centers.flags.writeable = False
        object.__setattr__(self, "centers", centers)


def gen_blobs(spec: BlobsSpec):
    """Sample the blobs dataset; rows are class-major, labels aligned."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    y = np.repeat(np.arange(spec.classes), spec.per_class)
    n = y.size
    noise = _box_muller(rng, 2 * n).reshape(n, 2)
    x = spec.centers[y] + spec.spread * noise
    return x, LabelSet(labels=y, class_count=spec.classes)


def _cross_entropy(probs: np.ndarray, labels: np.ndarray) -> float:
    picked = np.clip(probs[np.arange(labels.size), labels], 1e-300, None)
    return float(-np.mean(np.log(picked)))


def train_sgd(
    net: Network,
    X,
    Y: LabelSet,
    epochs: int = 200,
    lr: float = 0.1,
    batch_size: int = 32,
    seed: int = 0,
) -> Network:
    """Mini-batch SGD on cross-entropy; returns a trained copy of the net.

    The final activation must be softmax.  Shuffling is seeded; two runs
    with the same arguments produce bit-identical weights.  The mean loss
    over the final epoch is reported on standard error.
    """
    X = as_matrix(X, "X")
    check_same_rows(("X", X), ("Y", np.asarray(Y.labels).reshape(-1, 1)))
    if net.spec.activations[-1] != "softmax":
        raise ValidationError("train_sgd needs a softmax final activation")
    if Y.labels.max() >= net.spec.layer_dims[-1]:
        raise ValidationError("a label exceeds the output dimension")
    if epochs < 0 or lr < 0:
        raise ValidationError("epochs and lr must be >= 0")
    check_positive_int(batch_size, "batch_size")

    weights = [w.copy() for w in net.weights]
    biases = [b.copy() for b in net.biases]
    acts = net.spec.activations
    rng = np.random.Generator(np.random.PCG64(seed))
    n = X.shape[0]
    labels = np.asarray(Y.labels)
    final_loss = float("nan")

    for epoch in range(epochs):
        order = rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            xb, yb = X[batch], labels[batch]

            layer_out = [xb]
            for w, b, act in zip(weights, biases, acts):
                z = layer_out[-1] @ w.T + b
                if act == "softmax":
                    z = z - z.max(axis=1, keepdims=True)
                    e = np.exp(z)
                    layer_out.append(e / e.sum(axis=1, keepdims=True))
                else:
                    layer_out.append(
                        z if act == "identity" else
                        np.maximum(z, 0.0) if act == "relu" else
                        np.tanh(z) if act == "tanh" else
                        1.0 / (1.0 + np.exp(-z))
                    )
            probs = layer_out[-1]
            loss_sum += _cross_entropy(probs, yb) * yb.size

            onehot = np.eye(net.spec.layer_dims[-1])[yb]
            delta = (probs - onehot) / yb.size  # dL/dz of softmax + CE
            for l in range(len(weights) - 1, -1, -1):
                grad_w = delta.T @ layer_out[l]
                grad_b = delta.sum(axis=0)
                if l > 0:
                    delta = (delta @ weights[l]) * ACT_DERIV_FROM_OUTPUT[acts[l - 1]](layer_out[l])
                weights[l] -= lr * grad_w
                biases[l] -= lr * grad_b
        final_loss = loss_sum / n

    if epochs > 0:
        print(f"train_sgd: final epoch mean loss {final_loss:.6f}", file=sys.stderr)
    return Network(spec=net.spec, weights=weights, biases=biases)


def accuracy(net: Network, X, Y: LabelSet) -> float:
    """Fraction of samples whose argmax output matches the label."""
    out = forward_collect(net, X)[-1].activations
    return float(np.mean(out.argmax(axis=1) == np.asarray(Y.labels)))


def _check_stochastic(kernel: np.ndarray, name: str) -> np.ndarray:
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 2:
        raise ValidationError(f"{name} must be a matrix")
    if np.any(kernel < 0) or np.max(np.abs(kernel.sum(axis=1) - 1.0)) > 1e-12:
        raise ValidationError(f"{name} rows must be non-negative and sum to 1")
    return kernel


@dataclass(frozen=True)
class MarkovChainCase:
    """Exact chain Y <- X -> A_1 -> ... with a known joint distribution."""

    p_x: np.ndarray
    y_given_x: np.ndarray
    stage_kernels: tuple

    def __post_init__(self):
        p = np.asarray(self.p_x, dtype=np.float64).reshape(-1)
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValidationError("p_x must be a distribution")
        y_k = _check_stochastic(self.y_given_x, "y_given_x")
        if y_k.shape[0] != p.size:
            raise DimensionError("y_given_x rows must match the X support")
        kernels = []
        prev = p.size
        for i, k in enumerate(self.stage_kernels):
            k = _check_stochastic(k, f"stage_kernels[{i}]")
            if k.shape[0] != prev:
                raise DimensionError(f"stage_kernels[{i}] rows must match the previous support")
            prev = k.shape[1]
            kernels.append(k)
        object.__setattr__(self, "p_x", p)
        object.__setattr__(self, "y_given_x", y_k)
        object.__setattr__(self, "stage_kernels", tuple(kernels))


def _discrete_mi(joint: np.ndarray) -> float:
    pa = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    return float(np.sum(joint[mask] * np.log(joint[mask] / (pa * py)[mask])))


def markov_chain_exact_mi(case: MarkovChainCase) -> list:
    """Exact I(stage; Y) in nats along the chain, starting at I(X;Y).

    True Markov chains obey the data processing inequality, so the
    returned list is non-increasing; it is the positive control for
    dpi_check.
    """
    joint = case.p_x[:, None] * case.y_given_x  # q(x, y)
    values = [_discrete_mi(joint)]
    for kernel in case.stage_kernels:
        joint = kernel.T @ joint  # q(a', y) = sum_a K[a, a'] q(a, y)
        values.append(_discrete_mi(joint))
    return values


def mod2_floor2_case() -> MarkovChainCase:
    """X uniform on {0..3}, Y = X mod 2, A_1 = X, A_2 = floor(X/2)."""
    p_x = np.full(4, 0.25)
    y_given_x = np.zeros((4, 2))
    y_given_x[np.arange(4), np.arange(4) % 2] = 1.0
    floor2 = np.zeros((4, 2))
    floor2[np.arange(4), np.arange(4) // 2] = 1.0
    return MarkovChainCase(p_x=p_x, y_given_x=y_given_x, stage_kernels=(np.eye(4), floor2))


def markov_dataset(case: MarkovChainCase, copies: int = 64):
    """Expand a deterministic uniform chain into an exact empirical dataset.

    Every X support point is repeated ``copies`` times; stage values are
    the deterministic images.  Returns (X column, list of stage columns,
    labels).  Requires uniform p_x and one-hot kernels, which make the
    empirical joint match the analytic one exactly.
    """
    check_positive_int(copies, "copies")
    m = case.p_x.size
    if np.max(np.abs(case.p_x - 1.0 / m)) > 1e-12:
        raise ValidationError("markov_dataset needs a uniform source distribution")
    kernels = (case.y_given_x,) + case.stage_kernels
    if any(np.max(k, axis=1).min() < 1.0 for k in kernels):
        raise ValidationError("markov_dataset needs deterministic (one-hot) kernels")

    x_vals = np.repeat(np.arange(m), copies)
    y_vals = case.y_given_x.argmax(axis=1)[x_vals]
    stages = []
    cur = x_vals
    for kernel in case.stage_kernels:
        cur = kernel.argmax(axis=1)[cur]
        stages.append(cur.astype(np.float64).reshape(-1, 1))
    labels = LabelSet(labels=y_vals, class_count=case.y_given_x.shape[1])
    return x_vals.astype(np.float64).reshape(-1, 1), stages, labels
