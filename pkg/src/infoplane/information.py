"""Entropy and mutual-information estimators.

Everything returns nats inside an :class:`MIEstimate` that records which
estimator produced the number and with which hyperparameters, because the
same quantity (say I(X;C)) can be computed four different ways here:

* plug-in binning over equal-width quantisation,
* Kraskov-style k-NN (KSG, max-norm neighbourhoods),
* resubstitution KDE with a Gaussian product kernel,
* the closed-form Gaussian expression 0.5*log((2 pi e)^d det(J S J^T)).

Label-side quantities I(C;Y) go through a k-NN posterior with Laplace
smoothing rather than density estimation, since Y is discrete.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma, logsumexp

from .exceptions import DimensionError, SingularityError, ValidationError
from .validation import as_matrix, check_positive_int, check_same_rows

LN_2PI_E = float(np.log(2.0 * np.pi * np.e))

RANGE_MODES = ("observed", "fixed")
LABEL_ENTROPY_MODES = ("uniform-logK", "empirical")


@dataclass
class MIEstimate:
    """A nats-valued estimate plus the identity of the estimator behind it."""

    value_nats: float
    estimator: str
    params: dict = field(default_factory=dict)
    std_nats: float | None = None

    def __post_init__(self):
        if not np.isfinite(self.value_nats):
            raise ValidationError(f"estimate is not finite: {self.value_nats}")
        if self.std_nats is not None and self.std_nats < 0:
            raise ValidationError("std_nats must be >= 0")


@dataclass(frozen=True)
class GaussianSpec:
    """Mean and covariance of a multivariate Gaussian input distribution."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        cov = np.asarray(self.covariance, dtype=np.float64)
        if cov.shape != (mean.size, mean.size):
            raise DimensionError(f"covariance shape {cov.shape} does not match mean length {mean.size}")
        if np.max(np.abs(cov - cov.T)) > 1e-10:
            raise ValidationError("covariance must be symmetric")
        eigvals = np.linalg.eigvalsh(cov)
        if eigvals.min() < -1e-10 * max(1.0, eigvals.max()):
            raise ValidationError("covariance must be positive semi-definite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


@dataclass(frozen=True)
class LabelSet:
    """N class labels in [0, class_count)."""

    labels: np.ndarray
    class_count: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if labels.size == 0:
            raise ValidationError("labels are empty")
        k = int(self.class_count)
        if k < 1:
            raise ValidationError("class_count must be >= 1")
        if labels.min() < 0 or labels.max() >= k:
            raise ValidationError(f"labels must lie in [0, {k})")
        labels = np.ascontiguousarray(labels)
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_count", k)

    def __len__(self) -> int:
        return self.labels.size


@dataclass(frozen=True)
class BinningConfig:
    """Equal-width quantisation settings for the plug-in estimators.

    ``observed`` mode spans each dimension's own min/max; ``fixed`` mode
    clips into [fixed_min, fixed_max] on every dimension.
    """

    bins_per_dim: int = 16
    range_mode: str = "observed"
    fixed_min: float | None = None
    fixed_max: float | None = None

    def __post_init__(self):
        check_positive_int(self.bins_per_dim, "bins_per_dim", minimum=2)
        if self.range_mode not in RANGE_MODES:
            raise ValidationError(f"range_mode must be one of {RANGE_MODES}")
        if self.range_mode == "fixed":
            if self.fixed_min is None or self.fixed_max is None:
                raise ValidationError("fixed range_mode needs fixed_min and fixed_max")
            if not self.fixed_max > self.fixed_min:
                raise ValidationError("fixed_max must exceed fixed_min")

    def describe(self) -> dict:
        out = {"bins": self.bins_per_dim, "range_mode": self.range_mode}
        if self.range_mode == "fixed":
            out["fixed_range"] = (self.fixed_min, self.fixed_max)
        return out


def _entropy_from_counts(counts: np.ndarray) -> float:
    p = counts / counts.sum()
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def discrete_entropy(symbols) -> MIEstimate:
    """Plug-in entropy -sum p log p of the empirical symbol distribution."""
    sym = np.asarray(symbols)
    if sym.size == 0:
        raise ValidationError("symbols are empty")
    sym = sym.reshape(-1)
    _, counts = np.unique(sym, return_counts=True)
    return MIEstimate(
        value_nats=_entropy_from_counts(counts),
        estimator="discrete-exact",
        params={"n": int(sym.size), "support": int(counts.size)},
    )


def _bin_indices(samples: np.ndarray, cfg: BinningConfig) -> np.ndarray:
    n, d = samples.shape
    bins = cfg.bins_per_dim
    if cfg.range_mode == "fixed":
        lo = np.full(d, cfg.fixed_min)
        hi = np.full(d, cfg.fixed_max)
    else:
        lo = samples.min(axis=0)
        hi = samples.max(axis=0)
    width = hi - lo
    idx = np.zeros((n, d), dtype=np.int64)
    live = width > 0  # zero-width dimensions collapse into bin 0
    if np.any(live):
        scaled = (samples[:, live] - lo[live]) / width[live]
        idx[:, live] = np.clip((scaled * bins).astype(np.int64), 0, bins - 1)
    return idx


def quantize(samples, cfg: BinningConfig | None = None) -> np.ndarray:
    """Map each row to one integer symbol via per-dimension equal-width bins.

    The bin-index tuple is mapped injectively to an id (identical rows get
    identical symbols); ids are assigned from the lexicographic order of the
    distinct tuples, so they do not depend on row order.
    """
    cfg = cfg or BinningConfig()
    samples = as_matrix(samples, "samples", allow_1d=True)
    idx = _bin_indices(samples, cfg)
    _, inverse = np.unique(idx, axis=0, return_inverse=True)
    return inverse.reshape(-1).astype(np.int64)


def _joint_symbols(a_sym: np.ndarray, b_sym: np.ndarray) -> np.ndarray:
    # both inputs are compact non-negative ids, so mixed-radix packing is injective
    return a_sym * (int(b_sym.max()) + 1) + b_sym


def binned_mi(A, B, cfg: BinningConfig | None = None) -> MIEstimate:
    """Plug-in MI H(A*) + H(B*) - H(A*,B*) of the quantised joint.

    ``B`` may be a :class:`LabelSet`, in which case its labels are used as
    symbols directly.  Non-negative by construction and symmetric in its
    arguments.
    """
    cfg = cfg or BinningConfig()
    A = as_matrix(A, "A", allow_1d=True)
    params = {"estimator_side_A": "quantized", **cfg.describe()}
    if isinstance(B, LabelSet):
        b_sym = np.asarray(B.labels, dtype=np.int64)
        params["estimator_side_B"] = "labels"
    else:
        B = as_matrix(B, "B", allow_1d=True)
        b_sym = quantize(B, cfg)
        params["estimator_side_B"] = "quantized"
    check_same_rows(("A", A), ("B", b_sym.reshape(-1, 1)))
    a_sym = quantize(A, cfg)
    h_a = discrete_entropy(a_sym).value_nats
    h_b = discrete_entropy(b_sym).value_nats
    h_ab = discrete_entropy(_joint_symbols(a_sym, b_sym)).value_nats
    value = max(0.0, h_a + h_b - h_ab)
    return MIEstimate(value_nats=value, estimator="binning", params=params)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    # standard 64-bit finaliser; wraps modulo 2^64 on uint64 arrays
    z = x + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _value_keyed_jitter(arr: np.ndarray, seed: int) -> np.ndarray:
    """Deterministic tie-breaking noise, magnitude 1e-10 of each dim's range.

    The jitter is a hash of the coordinate *value* (plus dimension and
    seed), not of the row position, so jointly permuting samples leaves
    every jittered coordinate unchanged.
    """
    with np.errstate(over="ignore"):
        bits = np.ascontiguousarray(arr).view(np.uint64)
        dims = np.arange(arr.shape[1], dtype=np.uint64)
        key = _splitmix64(dims + np.uint64(seed & 0xFFFFFFFFFFFFFFFF) * np.uint64(0x9E37_79B9))
        u = _splitmix64(bits ^ key[None, :]).astype(np.float64) / 2.0**64
    span = arr.max(axis=0) - arr.min(axis=0)
    span[span == 0] = 1.0
    return (u - 0.5) * 2e-10 * span


def ksg_mi(A, B, k: int = 5, jitter_seed: int = 0) -> MIEstimate:
    """Kraskov k-NN mutual information (algorithm 1, max-norm balls).

    psi(k) + psi(N) - mean[psi(n_A + 1) + psi(n_B + 1)], where n_A / n_B
    count marginal neighbours strictly inside each point's k-th joint
    neighbour distance.  Ties are broken by value-keyed jitter so results
    are reproducible and permutation-invariant.
    """
    A = as_matrix(A, "A", allow_1d=True)
    B = as_matrix(B, "B", allow_1d=True)
    n = check_same_rows(("A", A), ("B", B))
    k = check_positive_int(k, "k")
    if k >= n:
        raise ValidationError(f"k={k} must be smaller than the sample count {n}")

    A = A + _value_keyed_jitter(A, jitter_seed)
    B = B + _value_keyed_jitter(B, jitter_seed + 1)
    joint = np.hstack([A, B])
    eps = cKDTree(joint).query(joint, k=[k + 1], p=np.inf)[0][:, 0]
    radius = np.nextafter(eps, 0.0)  # strict interior of the k-NN ball
    n_a = cKDTree(A).query_ball_point(A, radius, p=np.inf, return_length=True)
    n_b = cKDTree(B).query_ball_point(B, radius, p=np.inf, return_length=True)
    # counts include the point itself, i.e. they already equal n_* + 1;
    # sorting before the mean pins the reduction order, so jointly permuting
    # the samples reproduces the value bit for bit
    terms = np.sort(digamma(n_a) + digamma(n_b))
    value = float(digamma(k) + digamma(n) - np.mean(terms))
    return MIEstimate(
        value_nats=value,
        estimator="ksg",
        params={"k": k, "n": n, "metric": "chebyshev", "jitter_seed": jitter_seed},
    )


def _kde_log_density(samples: np.ndarray, h: np.ndarray, chunk: int = 512) -> np.ndarray:
    n, d = samples.shape
    log_norm = -np.sum(np.log(h)) - 0.5 * d * np.log(2.0 * np.pi) - np.log(n)
    out = np.empty(n)
    scaled = samples / h
    for start in range(0, n, chunk):
        block = scaled[start : start + chunk]
        diff = block[:, None, :] - scaled[None, :, :]
        log_kernel = -0.5 * np.einsum("ijk,ijk->ij", diff, diff)
        out[start : start + chunk] = logsumexp(log_kernel, axis=1) + log_norm
    return out


def silverman_bandwidth(samples: np.ndarray) -> np.ndarray:
    """Per-dimension rule-of-thumb bandwidth sigma * (4 / (N (d+2)))^(1/(d+4))."""
    n, d = samples.shape
    sigma = samples.std(axis=0, ddof=1)
    return sigma * (4.0 / (n * (d + 2))) ** (1.0 / (d + 4))


def kde_entropy(samples, bandwidth="silverman") -> MIEstimate:
    """Resubstitution entropy -(1/N) sum log p_hat(x_n), Gaussian product kernel."""
    samples = as_matrix(samples, "samples", allow_1d=True)
    n, d = samples.shape
    if n < 2:
        raise ValidationError("kde_entropy needs at least 2 samples")
    if isinstance(bandwidth, str):
        if bandwidth != "silverman":
            raise ValidationError(f"unknown bandwidth rule {bandwidth!r}")
        h = silverman_bandwidth(samples)
        if np.any(h <= 0):
            raise ValidationError(
                "a dimension has zero variance; the silverman rule degenerates, pass a fixed bandwidth"
            )
        params = {"bandwidth": "silverman", "h": [float(v) for v in h], "n": n}
    else:
        h_val = float(bandwidth)
        if h_val <= 0:
            raise ValidationError("fixed bandwidth must be > 0")
        h = np.full(d, h_val)
        params = {"bandwidth": h_val, "n": n}
    value = float(-np.mean(_kde_log_density(samples, h)))
    return MIEstimate(value_nats=value, estimator="kde", params=params)


def kde_mi(A, B, bandwidth="silverman") -> MIEstimate:
    """MI via the KDE entropy route H(A) + H(B) - H(A,B)."""
    A = as_matrix(A, "A", allow_1d=True)
    B = as_matrix(B, "B", allow_1d=True)
    check_same_rows(("A", A), ("B", B))
    h_a = kde_entropy(A, bandwidth)
    h_b = kde_entropy(B, bandwidth)
    h_ab = kde_entropy(np.hstack([A, B]), bandwidth)
    return MIEstimate(
        value_nats=h_a.value_nats + h_b.value_nats - h_ab.value_nats,
        estimator="kde",
        params={"route": "H(A)+H(B)-H(A,B)", "bandwidth": str(bandwidth)},
    )


def gaussian_conductance_entropy(J, spec: GaussianSpec, ridge: float = 1e-9) -> MIEstimate:
    """Closed-form conductance entropy 0.5 log((2 pi e)^dl det(J S J^T + ridge I)).

    Because the conductance is a deterministic map of a Gaussian input, this
    entropy doubles as I(X;C_l).  The ridge keeps J S J^T invertible when
    the layer is wider than the input; with ridge 0 a rank-deficient product
    raises :class:`SingularityError`.
    """
    J = as_matrix(J, "J")
    if ridge < 0:
        raise ValidationError("ridge must be >= 0")
    if J.shape[1] != spec.dim:
        raise DimensionError(f"J has {J.shape[1]} columns but the Gaussian has dimension {spec.dim}")
    dl = J.shape[0]
    m = J @ spec.covariance @ J.T + ridge * np.eye(dl)
    sign, logdet = np.linalg.slogdet(m)
    if sign <= 0 or not np.isfinite(logdet):
        raise SingularityError(
            "det(J S J^T + ridge I) is not positive; increase the ridge to regularise"
        )
    value = 0.5 * (dl * LN_2PI_E + logdet)
    return MIEstimate(
        value_nats=float(value),
        estimator="gaussian-closed-form",
        params={"dim": dl, "ridge": float(ridge)},
    )


def gaussian_sample_entropy(samples, ridge: float = 1e-9) -> MIEstimate:
    """Gaussian-assumption entropy from the empirical covariance of samples.

    Sample-space counterpart of :func:`gaussian_conductance_entropy`: for
    conductance C = J X the empirical covariance of C estimates J S J^T.
    """
    samples = as_matrix(samples, "samples", allow_1d=True)
    n, d = samples.shape
    if n < 2:
        raise ValidationError("need at least 2 samples for a covariance")
    cov = np.cov(samples, rowvar=False).reshape(d, d)
    sign, logdet = np.linalg.slogdet(cov + ridge * np.eye(d))
    if sign <= 0 or not np.isfinite(logdet):
        raise SingularityError("empirical covariance is singular; increase the ridge")
    return MIEstimate(
        value_nats=float(0.5 * (d * LN_2PI_E + logdet)),
        estimator="gaussian-closed-form",
        params={"dim": d, "ridge": float(ridge), "covariance": "empirical"},
    )


def _knn_class_counts(C: np.ndarray, labels: np.ndarray, k: int, class_count: int) -> np.ndarray:
    """Counts of each class among the k nearest neighbours (self excluded)."""
    n = C.shape[0]
    _, idx = cKDTree(C).query(C, k=k + 1)
    idx = np.atleast_2d(idx)
    counts = np.zeros((n, class_count), dtype=np.float64)
    for i in range(n):
        # drop self where present; under heavy ties self may not be returned,
        # in which case the k nearest of the k+1 candidates are kept
        neigh = idx[i][idx[i] != i][:k]
        counts[i] = np.bincount(labels[neigh], minlength=class_count)
    return counts


def conditional_label_entropy(C, Y: LabelSet, k: int = 10) -> MIEstimate:
    """H(Y|C) from a Laplace-smoothed k-NN posterior.

    P(Y=i | C_n) is estimated as (count of class i among the k nearest
    neighbours of C_n, self excluded, + 1) / (k + K); the result averages
    the posterior entropies -sum_i P log P over samples.
    """
    C = as_matrix(C, "C", allow_1d=True)
    n = check_same_rows(("C", C), ("Y", Y.labels.reshape(-1, 1)))
    k = check_positive_int(k, "k")
    if k >= n:
        raise ValidationError(f"k={k} must be smaller than the sample count {n}")
    kk = Y.class_count
    if kk == 1:
        return MIEstimate(value_nats=0.0, estimator="knn-posterior", params={"k": k, "classes": 1})
    if len(np.unique(C, axis=0)) == 1:
        # a constant feature matrix conditions on nothing: H(Y|C) = H(Y);
        # k-NN neighbourhoods are ill-defined under total ties
        return MIEstimate(
            value_nats=discrete_entropy(Y.labels).value_nats,
            estimator="knn-posterior",
            params={"k": k, "classes": kk, "mode": "constant-features"},
        )
    counts = _knn_class_counts(C, Y.labels, k, kk)
    post = (counts + 1.0) / (k + kk)
    value = float(-np.mean(np.sum(post * np.log(post), axis=1)))
    return MIEstimate(
        value_nats=value,
        estimator="knn-posterior",
        params={"k": k, "classes": kk, "smoothing": "laplace"},
    )


def mi_with_labels(
    C,
    Y: LabelSet,
    k: int = 10,
    label_entropy_mode: str = "uniform-logK",
) -> MIEstimate:
    """I(C;Y) = H(Y) - H(Y|C), clamped at zero.

    H(Y) is log K under ``uniform-logK`` (labels assumed uniform) or the
    empirical label entropy under ``empirical``.  When the difference dips
    below zero from estimator noise the value is clamped and the raw number
    kept in params.
    """
    if label_entropy_mode not in LABEL_ENTROPY_MODES:
        raise ValidationError(f"label_entropy_mode must be one of {LABEL_ENTROPY_MODES}")
    if label_entropy_mode == "uniform-logK":
        h_y = float(np.log(Y.class_count)) if Y.class_count > 1 else 0.0
    else:
        h_y = discrete_entropy(Y.labels).value_nats
    cond = conditional_label_entropy(C, Y, k=k)
    raw = h_y - cond.value_nats
    params = {
        "k": k,
        "label_entropy_mode": label_entropy_mode,
        "h_y_nats": h_y,
        "clamped": raw < 0.0,
    }
    if raw < 0.0:
        params["pre_clamp_nats"] = raw
    return MIEstimate(value_nats=max(0.0, raw), estimator="knn-posterior", params=params)
