"""Information Transformation Efficiency metrics.

Per layer l the profile scores three things and blends them:

* compression  C_l = max(0, -(H_l - H_{l-1}) / H_{l-1}), clamped to [0,1]
* preservation P_l = I(T_l; T_{l+1}) / min(H_l, H_{l+1}), clamped to [0,1]
* usefulness   U_l = max(0, (I(T_l;Y) - I(T_{l-1};Y)) / (H(Y) - I(T_{l-1};Y)))

with E_l = alpha*C_l + beta*P_l + gamma*U_l after normalising the weights
to sum 1.  Entropies and the preservation MI come from the binning
pipeline; the label MI goes through the k-NN posterior.  Layer 0 is the
raw input X.
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
    mi_with_labels,
    quantize,
)
from .network import LayerTrace
from .validation import as_matrix, check_positive_int, check_same_rows

SATURATION_EPS = 1e-9


@dataclass(frozen=True)
class ITEConfig:
    """Weights and estimator settings for the efficiency profile."""

    alpha: float = 1.0 / 3.0
    beta: float = 1.0 / 3.0
    gamma: float = 1.0 / 3.0
    binning: BinningConfig = field(default_factory=BinningConfig)
    label_mode: str = "uniform-logK"
    knn_k: int = 10

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            w = getattr(self, name)
            if not np.isfinite(w) or w < 0:
                raise ValidationError(f"{name} must be finite and >= 0")
        if self.alpha + self.beta + self.gamma <= 0:
            raise ValidationError("at least one weight must be positive")
        if self.label_mode not in LABEL_ENTROPY_MODES:
            raise ValidationError(f"label_mode must be one of {LABEL_ENTROPY_MODES}")
        check_positive_int(self.knn_k, "knn_k")

    def normalized_weights(self) -> tuple[float, float, float]:
        total = self.alpha + self.beta + self.gamma
        return self.alpha / total, self.beta / total, self.gamma / total


@dataclass(frozen=True)
class ITERow:
    """Per-layer efficiency record; flags note degenerate denominators."""

    layer_index: int
    compression: float
    preservation: float
    usefulness: float
    efficiency: float
    entropy_nats: float
    flags: tuple = ()

    def __post_init__(self):
        for name in ("compression", "preservation", "usefulness", "efficiency", "entropy_nats"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        if not 0.0 <= self.compression <= 1.0:
            raise ValidationError("compression must lie in [0, 1]")
        if not 0.0 <= self.preservation <= 1.0:
            raise ValidationError("preservation must lie in [0, 1]")


def compression(h_prev: float, h_cur: float) -> float:
    """Relative entropy drop max(0, (H_prev - H_cur)/H_prev), clamped to [0,1].

    A non-positive H_prev has nothing to compress; the guard returns 0
    (the profile marks such layers with a degenerate-layer flag).
    """
    if h_prev <= 0.0:
        return 0.0
    return float(min(1.0, max(0.0, (h_prev - h_cur) / h_prev)))


def preservation(T_l, T_next, cfg: BinningConfig | None = None) -> float:
    """Shared-information fraction I(T_l;T_next)/min(H_l, H_next) in [0,1].

    Both entropies come from the same quantisation as the MI.  Two
    zero-entropy (constant) layers preserve each other trivially: 1.0.
    """
    cfg = cfg or BinningConfig()
    T_l = as_matrix(T_l, "T_l", allow_1d=True)
    T_next = as_matrix(T_next, "T_next", allow_1d=True)
    check_same_rows(("T_l", T_l), ("T_next", T_next))
    h_l = discrete_entropy(quantize(T_l, cfg)).value_nats
    h_n = discrete_entropy(quantize(T_next, cfg)).value_nats
    floor = min(h_l, h_n)
    if floor <= 0.0:
        return 1.0 if max(h_l, h_n) == 0.0 else 0.0
    mi = binned_mi(T_l, T_next, cfg).value_nats
    return float(min(1.0, max(0.0, mi / floor)))


def usefulness(i_cur_y: float, i_prev_y: float, h_y: float) -> float:
    """Relative gain in label information, max(0, (I_cur - I_prev)/(H_Y - I_prev)).

    Returns 0 when the previous layer already saturates H_Y (the profile
    marks this with a saturation flag).
    """
    if h_y <= 0.0:
        raise ValidationError("H_Y must be > 0")
    headroom = h_y - i_prev_y
    if headroom <= SATURATION_EPS:
        return 0.0
    return float(max(0.0, (i_cur_y - i_prev_y) / headroom))


def global_efficiency(c: float, p: float, u: float, cfg: ITEConfig | None = None) -> float:
    """Weighted blend alpha*c + beta*p + gamma*u with weights normalised to sum 1."""
    cfg = cfg or ITEConfig()
    a, b, g = cfg.normalized_weights()
    return float(a * c + b * p + g * u)


def ite_profile(traces, X, Y: LabelSet, cfg: ITEConfig | None = None) -> list:
    """Full per-layer efficiency table for a forward trace.

    Layer 0 quantities (entropy, label MI) come from the input X.  The
    last layer has no successor, so its preservation is recorded as 1.0
    with a ``boundary`` flag.

    Args:
        traces: LayerTraces from forward_collect, in layer order.
        X: input batch [N, d_0].
        Y: labels aligned with the batch.
        cfg: weights and estimator settings.

    Returns:
        One ITERow per trace, ordered by layer index.
    """
    cfg = cfg or ITEConfig()
    if not traces:
        raise ValidationError("traces are empty")
    X = as_matrix(X, "X", allow_1d=True)
    check_same_rows(
        ("X", X),
        ("Y", np.asarray(Y.labels).reshape(-1, 1)),
        *((t.layer_name, t.activations) for t in traces),
    )

    if cfg.label_mode == "uniform-logK":
        h_y = float(np.log(Y.class_count)) if Y.class_count > 1 else 0.0
    else:
        h_y = discrete_entropy(Y.labels).value_nats
    if h_y <= 0.0:
        raise ValidationError("label entropy is zero; usefulness is undefined")

    mats = [X] + [t.activations for t in traces]
    entropies = [discrete_entropy(quantize(m, cfg.binning)).value_nats for m in mats]
    label_mi = [
        mi_with_labels(m, Y, k=cfg.knn_k, label_entropy_mode=cfg.label_mode).value_nats
        for m in mats
    ]

    rows = []
    for pos, trace in enumerate(traces, start=1):
        flags = []
        h_prev, h_cur = entropies[pos - 1], entropies[pos]
        if h_prev <= 0.0:
            flags.append("degenerate-layer")
        c = compression(h_prev, h_cur)
        if pos < len(traces):
            p = preservation(mats[pos], mats[pos + 1], cfg.binning)
        else:
            p = 1.0
            flags.append("boundary")
        if h_y - label_mi[pos - 1] <= SATURATION_EPS:
            flags.append("saturated")
        u = usefulness(label_mi[pos], label_mi[pos - 1], h_y)
        rows.append(
            ITERow(
                layer_index=trace.layer_index,
                compression=c,
                preservation=p,
                usefulness=u,
                efficiency=global_efficiency(c, p, u, cfg),
                entropy_nats=h_cur,
                flags=tuple(flags),
            )
        )
    return rows
