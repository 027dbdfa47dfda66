"""Information-plane assembly and DPI diagnostics.

A plane row is one layer's coordinate pair: i_x (information the layer
keeps about the input) and i_y (information it carries about the labels).
Rows can be computed from activations or from conductance vectors; the
x-side estimator is configurable (binning / KSG / KDE / Gaussian-
assumption) while the y-side always goes through the k-NN label
posterior, labels being discrete.

`dpi_check` scans a depth-ordered list of such coordinates for data
processing inequality violations: any deeper layer whose value exceeds a
shallower one by more than the tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError
from .information import (
    BinningConfig,
    LABEL_ENTROPY_MODES,
    LabelSet,
    binned_mi,
    discrete_entropy,
    gaussian_sample_entropy,
    kde_mi,
    ksg_mi,
    mi_with_labels,
    quantize,
)
from .validation import as_matrix, check_positive_int, check_same_rows

ESTIMATORS = ("binning", "ksg", "kde", "gaussian")
BASES = ("activation", "conductance")
AXES = ("x-side", "y-side")


@dataclass(frozen=True)
class PlaneConfig:
    """Estimator selection and bootstrap settings for plane coordinates."""

    estimator: str = "binning"
    binning: BinningConfig = field(default_factory=BinningConfig)
    ksg_k: int = 5
    knn_k: int = 10
    bandwidth: object = "silverman"
    ridge: float = 1e-9
    bootstrap: int = 20
    seed: int = 0
    label_mode: str = "uniform-logK"

    def __post_init__(self):
        if self.estimator not in ESTIMATORS:
            raise ValidationError(f"estimator must be one of {ESTIMATORS}")
        if self.label_mode not in LABEL_ENTROPY_MODES:
            raise ValidationError(f"label_mode must be one of {LABEL_ENTROPY_MODES}")
        check_positive_int(self.ksg_k, "ksg_k")
        check_positive_int(self.knn_k, "knn_k")
        if self.bootstrap < 0:
            raise ValidationError("bootstrap must be >= 0")
        if self.ridge < 0:
            raise ValidationError("ridge must be >= 0")


@dataclass(frozen=True)
class PlaneRow:
    """One layer's information-plane coordinates with bootstrap spreads."""

    layer_index: int
    layer_name: str
    basis: str
    i_x: float
    i_y: float
    std_i_x: float = 0.0
    std_i_y: float = 0.0
    estimator_params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValidationError(f"basis must be one of {BASES}")
        for name in ("i_x", "i_y", "std_i_x", "std_i_y"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValidationError(f"{name} must be finite and >= 0")


@dataclass(frozen=True)
class DPIViolation:
    """A deeper layer (k) carrying more information than a shallower one (l)."""

    layer_l: int
    layer_k: int
    delta_nats: float


@dataclass(frozen=True)
class DPIReport:
    """All tolerance-exceeding inversions found in one coordinate chain."""

    basis: str
    axis: str
    violations: tuple
    tolerance: float

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValidationError(f"basis must be one of {BASES}")
        if self.axis not in AXES:
            raise ValidationError(f"axis must be one of {AXES}")
        for v in self.violations:
            if not (v.layer_l < v.layer_k and v.delta_nats > self.tolerance):
                raise ValidationError("violations must have l < k and delta > tolerance")

    @property
    def clean(self) -> bool:
        return not self.violations


def bootstrap_std(statistic, n: int, b: int = 20, seed: int = 0) -> float:
    """Population std of a statistic over b resamples-with-replacement.

    Args:
        statistic: callable taking an index array of length n.
        n: dataset size to resample from.
        b: number of bootstrap resamples (>= 2).
        seed: PRNG seed; fixed seed gives a fixed value.
    """
    if b < 2:
        raise ValidationError("bootstrap needs at least 2 resamples")
    if n < 2:
        raise ValidationError("bootstrap needs at least 2 samples")
    rng = np.random.Generator(np.random.PCG64(seed))
    vals = [float(statistic(rng.integers(0, n, size=n))) for _ in range(b)]
    return float(np.std(vals))


def _clamped(value: float, params: dict) -> float:
    # plane coordinates are reported non-negative; estimator noise and
    # negative differential entropies are clamped with the raw value kept
    if value < 0.0:
        params["pre_clamp_nats"] = value
        return 0.0
    return value


def _x_side(X: np.ndarray, T: np.ndarray, cfg: PlaneConfig, deterministic: bool, params: dict) -> float:
    if cfg.estimator == "binning":
        if deterministic:
            params["mode"] = "deterministic-entropy"
            return discrete_entropy(quantize(T, cfg.binning)).value_nats
        params["mode"] = "joint-mi"
        return binned_mi(X, T, cfg.binning).value_nats
    if cfg.estimator == "ksg":
        return ksg_mi(X, T, k=cfg.ksg_k, jitter_seed=cfg.seed).value_nats
    if cfg.estimator == "kde":
        return kde_mi(X, T, bandwidth=cfg.bandwidth).value_nats
    return gaussian_sample_entropy(T, ridge=cfg.ridge).value_nats


def _plane_rows(layers, X, Y: LabelSet, cfg: PlaneConfig, basis: str) -> list:
    X = as_matrix(X, "X", allow_1d=True)
    n = check_same_rows(
        ("X", X),
        ("Y", np.asarray(Y.labels).reshape(-1, 1)),
        *((name, mat) for _, name, mat in layers),
    )
    # every-input-row-unique makes T a deterministic relabeling of X, so
    # I(X;T) collapses to H(T*) under binning
    deterministic = len(np.unique(X, axis=0)) == n

    rows = []
    for index, name, mat in layers:
        params = {
            "estimator": cfg.estimator,
            "label_mode": cfg.label_mode,
            "knn_k": cfg.knn_k,
            "bootstrap": cfg.bootstrap,
            "seed": cfg.seed,
        }
        if cfg.estimator == "binning":
            params.update(cfg.binning.describe())
        elif cfg.estimator == "ksg":
            params["k"] = cfg.ksg_k
        elif cfg.estimator == "kde":
            params["bandwidth"] = str(cfg.bandwidth)
        else:
            params["ridge"] = cfg.ridge

        i_x = _clamped(_x_side(X, mat, cfg, deterministic, params), params)
        i_y = mi_with_labels(mat, Y, k=cfg.knn_k, label_entropy_mode=cfg.label_mode).value_nats

        std_x = std_y = 0.0
        if cfg.bootstrap >= 2:
            def stat_x(idx, mat=mat, params=params):
                p = dict(params)
                return max(0.0, _x_side(X[idx], mat[idx], cfg, deterministic, p))

            def stat_y(idx, mat=mat):
                ys = LabelSet(labels=Y.labels[idx], class_count=Y.class_count)
                return mi_with_labels(mat[idx], ys, k=cfg.knn_k, label_entropy_mode=cfg.label_mode).value_nats

            std_x = bootstrap_std(stat_x, n, cfg.bootstrap, seed=cfg.seed * 1000003 + 2 * index)
            std_y = bootstrap_std(stat_y, n, cfg.bootstrap, seed=cfg.seed * 1000003 + 2 * index + 1)

        rows.append(
            PlaneRow(
                layer_index=index,
                layer_name=name,
                basis=basis,
                i_x=i_x,
                i_y=i_y,
                std_i_x=std_x,
                std_i_y=std_y,
                estimator_params=params,
            )
        )
    return rows


def activation_plane(traces, X, Y: LabelSet, cfg: PlaneConfig | None = None) -> list:
    """Plane rows (I(X;T_l), I(T_l;Y)) for each captured layer."""
    cfg = cfg or PlaneConfig()
    if not traces:
        raise ValidationError("traces are empty")
    layers = [(t.layer_index, t.layer_name, t.activations) for t in traces]
    return _plane_rows(layers, X, Y, cfg, basis="activation")


def conductance_plane(records, X, Y: LabelSet, cfg: PlaneConfig | None = None, names: dict | None = None) -> list:
    """Plane rows (I(X;C_l), I(C_l;Y)) from conductance records.

    ``names`` optionally maps layer index to a display name; unnamed
    layers fall back to the fc<index> convention.
    """
    cfg = cfg or PlaneConfig()
    if not records:
        raise ValidationError("records are empty")
    indices = [r.layer_index for r in records]
    if len(set(indices)) != len(indices):
        raise ValidationError("records must cover distinct layers")
    names = names or {}
    layers = [
        (r.layer_index, names.get(r.layer_index, f"fc{r.layer_index}"), r.values)
        for r in records
    ]
    return _plane_rows(layers, X, Y, cfg, basis="conductance")


def dpi_check(
    values,
    prefix: float | None = None,
    tolerance: float = 0.02,
    basis: str = "activation",
    axis: str = "x-side",
) -> DPIReport:
    """Scan a depth-ordered information chain for DPI violations.

    ``values[i]`` belongs to layer i+1; ``prefix`` optionally supplies the
    layer-0 value (H(X*) on the x side, I(X;Y) on the y side).  Every pair
    l < k with value_k - value_l > tolerance is reported, earliest pair
    first.  An empty report means the chain is monotone within tolerance.
    """
    values = [float(v) for v in values]
    if not values:
        raise ValidationError("values are empty")
    if tolerance < 0:
        raise ValidationError("tolerance must be >= 0")
    chain = ([] if prefix is None else [(0, float(prefix))]) + [
        (i + 1, v) for i, v in enumerate(values)
    ]
    violations = []
    for a in range(len(chain)):
        for b in range(a + 1, len(chain)):
            delta = chain[b][1] - chain[a][1]
            if delta > tolerance:
                violations.append(
                    DPIViolation(layer_l=chain[a][0], layer_k=chain[b][0], delta_nats=float(delta))
                )
    return DPIReport(basis=basis, axis=axis, violations=tuple(violations), tolerance=float(tolerance))


def ib_objective(i_x: float, i_y: float, beta: float) -> float:
    """Information-bottleneck objective value I(X;T) - beta * I(T;Y)."""
    if beta < 0:
        raise ValidationError("beta must be >= 0")
    return float(i_x - beta * i_y)
