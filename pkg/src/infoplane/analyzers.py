"""Estimator-style wrappers around the functional pipeline.

These follow the scikit-learn conventions (constructor stores parameters
verbatim, ``fit`` validates and sets trailing-underscore attributes,
``get_params``/``set_params`` work for grid-style configuration) so the
analyses drop into sklearn pipelines and model-selection tooling.  All
computation happens in the functional modules; the classes only adapt.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .conductance import IGConfig, batch_conductance
from .exceptions import ValidationError
from .information import BinningConfig, LabelSet
from .ite import ITEConfig, ite_profile
from .network import Network, forward_collect
from .plane import PlaneConfig, activation_plane, conductance_plane
from .validation import as_matrix


def _as_label_set(y, class_count=None) -> LabelSet:
    if isinstance(y, LabelSet):
        return y
    labels = np.asarray(y).reshape(-1)
    k = int(class_count) if class_count is not None else int(labels.max()) + 1
    return LabelSet(labels=labels, class_count=k)


def _check_network(net) -> Network:
    if not isinstance(net, Network):
        raise ValidationError("network must be an infoplane Network")
    return net


class ConductanceMap(TransformerMixin, BaseEstimator):
    """Transformer mapping inputs to one layer's conductance vectors.

    ``transform(X)`` returns a [N, d_layer] matrix of per-sample
    conductances, computed with the gradient formula or integrated
    gradients depending on ``method``.
    """

    def __init__(self, network=None, layer=1, method="gradient", ig_steps=128,
                 ig_rule="midpoint", baseline=None):
        self.network = network
        self.layer = layer
        self.method = method
        self.ig_steps = ig_steps
        self.ig_rule = ig_rule
        self.baseline = baseline

    def fit(self, X, y=None):
        net = _check_network(self.network)
        as_matrix(X, "X", allow_1d=True)
        if self.method == "integrated":
            self.ig_config_ = IGConfig(
                baseline=self.baseline if self.baseline is None else np.asarray(self.baseline),
                steps=self.ig_steps,
                rule=self.ig_rule,
            )
        else:
            self.ig_config_ = None
        self.n_features_in_ = net.input_dim
        return self

    def transform(self, X):
        if not hasattr(self, "n_features_in_"):
            raise NotFittedError("ConductanceMap is not fitted yet")
        record = batch_conductance(
            self.network, self.layer, X, method=self.method, cfg=self.ig_config_
        )
        return record.values


class InformationPlaneAnalyzer(BaseEstimator):
    """Computes information-plane rows for every layer of a network.

    After ``fit(X, y)`` the coordinates are in ``rows_`` (a list of
    PlaneRow).  ``basis`` selects activation or conductance coordinates.
    """

    def __init__(self, network=None, basis="activation", estimator="binning",
                 bins=16, ksg_k=5, knn_k=10, bootstrap=20, seed=0,
                 label_mode="uniform-logK", ridge=1e-9, bandwidth="silverman",
                 class_count=None):
        self.network = network
        self.basis = basis
        self.estimator = estimator
        self.bins = bins
        self.ksg_k = ksg_k
        self.knn_k = knn_k
        self.bootstrap = bootstrap
        self.seed = seed
        self.label_mode = label_mode
        self.ridge = ridge
        self.bandwidth = bandwidth
        self.class_count = class_count

    def _plane_config(self) -> PlaneConfig:
        return PlaneConfig(
            estimator=self.estimator,
            binning=BinningConfig(bins_per_dim=self.bins),
            ksg_k=self.ksg_k,
            knn_k=self.knn_k,
            bandwidth=self.bandwidth,
            ridge=self.ridge,
            bootstrap=self.bootstrap,
            seed=self.seed,
            label_mode=self.label_mode,
        )

    def fit(self, X, y):
        net = _check_network(self.network)
        X = as_matrix(X, "X", allow_1d=True)
        labels = _as_label_set(y, self.class_count)
        cfg = self._plane_config()
        if self.basis == "activation":
            self.rows_ = activation_plane(forward_collect(net, X), X, labels, cfg)
        elif self.basis == "conductance":
            records = [
                batch_conductance(net, layer, X, method="gradient")
                for layer in range(1, net.num_layers + 1)
            ]
            self.rows_ = conductance_plane(records, X, labels, cfg)
        else:
            raise ValidationError("basis must be 'activation' or 'conductance'")
        return self


class ITEProfiler(BaseEstimator):
    """Computes the per-layer efficiency profile of a network.

    After ``fit(X, y)`` the profile is in ``rows_`` (a list of ITERow).
    """

    def __init__(self, network=None, alpha=1.0 / 3.0, beta=1.0 / 3.0,
                 gamma=1.0 / 3.0, bins=16, knn_k=10, label_mode="uniform-logK",
                 class_count=None):
        self.network = network
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.bins = bins
        self.knn_k = knn_k
        self.label_mode = label_mode
        self.class_count = class_count

    def fit(self, X, y):
        net = _check_network(self.network)
        X = as_matrix(X, "X", allow_1d=True)
        labels = _as_label_set(y, self.class_count)
        cfg = ITEConfig(
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            binning=BinningConfig(bins_per_dim=self.bins),
            label_mode=self.label_mode,
            knn_k=self.knn_k,
        )
        self.rows_ = ite_profile(forward_collect(net, X), X, labels, cfg)
        return self
