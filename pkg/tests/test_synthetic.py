"""Generator, trainer, and Markov-oracle tests."""

import numpy as np
import pytest

from infoplane.exceptions import ValidationError
from infoplane.information import GaussianSpec, LabelSet
from infoplane.network import NetworkSpec, build_network
from infoplane.synthetic import (
    BlobsSpec,
    MarkovChainCase,
    accuracy,
    circle_centers,
    gen_blobs,
    gen_gaussian,
    markov_chain_exact_mi,
    markov_dataset,
    mod2_floor2_case,
    train_sgd,
)

LN2 = 0.6931471805599453


class TestGenGaussian:
    def test_zero_covariance_is_exact_mean(self):
        spec = GaussianSpec(mean=[2.0, -1.0], covariance=np.zeros((2, 2)))
        x = gen_gaussian(spec, 50, seed=3)
        np.testing.assert_array_equal(x, np.tile([2.0, -1.0], (50, 1)))

    def test_clt_mean_bound(self):
        spec = GaussianSpec(mean=[0.0], covariance=[[1.0]])
        x = gen_gaussian(spec, 10000, seed=1)
        assert abs(x.mean()) <= 0.04  # 4 / sqrt(10000)
        assert abs(x.std(ddof=1) - 1.0) <= 0.05

    def test_same_seed_identical(self):
        spec = GaussianSpec(mean=[0.0, 0.0], covariance=[[2.0, 0.5], [0.5, 1.0]])
        np.testing.assert_array_equal(gen_gaussian(spec, 100, seed=9), gen_gaussian(spec, 100, seed=9))

    def test_covariance_shape_reproduced(self):
        cov = np.array([[2.0, 0.8], [0.8, 1.0]])
        spec = GaussianSpec(mean=[0.0, 0.0], covariance=cov)
        x = gen_gaussian(spec, 40000, seed=5)
        np.testing.assert_allclose(np.cov(x, rowvar=False), cov, atol=0.06)


class TestBlobs:
    def test_centers_on_circle(self):
        centers = circle_centers(5, radius=4.0)
        np.testing.assert_allclose(np.linalg.norm(centers, axis=1), 4.0, atol=1e-12)
        assert len(np.unique(np.round(centers, 9), axis=0)) == 5

    def test_tiny_spread_collapses_to_centers(self):
        spec = BlobsSpec(classes=3, per_class=50, spread=1e-6, seed=0)
        x, y = gen_blobs(spec)
        dev = np.abs(x - spec.centers[y.labels]).max()
        assert dev < 1e-4

    def test_exactly_balanced_labels(self):
        _, y = gen_blobs(BlobsSpec(classes=4, per_class=25, seed=2))
        assert np.array_equal(np.bincount(y.labels), [25, 25, 25, 25])

    def test_same_seed_identical(self):
        spec = BlobsSpec(classes=3, per_class=10, seed=11)
        x1, _ = gen_blobs(spec)
        x2, _ = gen_blobs(spec)
        np.testing.assert_array_equal(x1, x2)

    def test_spread_must_be_positive(self):
        with pytest.raises(ValidationError):
            BlobsSpec(spread=0.0)


class TestTrainSgd:
    def blob_problem(self, seed=0):
        x, y = gen_blobs(BlobsSpec(classes=2, per_class=60, spread=0.8, seed=seed))
        spec = NetworkSpec(layer_dims=(2, 8, 2), activations=("tanh", "softmax"), seed=seed)
        return build_network(spec), x, y

    def test_zero_lr_leaves_weights(self):
        net, x, y = self.blob_problem()
        trained = train_sgd(net, x, y, epochs=3, lr=0.0, seed=0)
        for w0, w1 in zip(net.weights, trained.weights):
            np.testing.assert_array_equal(w0, w1)

    def test_same_seed_bit_identical(self):
        net, x, y = self.blob_problem()
        t1 = train_sgd(net, x, y, epochs=10, lr=0.1, seed=4)
        t2 = train_sgd(net, x, y, epochs=10, lr=0.1, seed=4)
        for w1, w2 in zip(t1.weights, t2.weights):
            np.testing.assert_array_equal(w1, w2)

    def test_learns_separable_blobs(self):
        net, x, y = self.blob_problem(seed=7)
        trained = train_sgd(net, x, y, epochs=50, lr=0.1, seed=7)
        assert accuracy(trained, x, y) >= 0.9
        assert accuracy(trained, x, y) > accuracy(net, x, y)

    def test_requires_softmax_final(self):
        spec = NetworkSpec(layer_dims=(2, 4, 2), activations=("tanh", "identity"), seed=0)
        net = build_network(spec)
        with pytest.raises(ValidationError):
            train_sgd(net, np.zeros((4, 2)), LabelSet(labels=[0, 1, 0, 1], class_count=2))

    def test_label_exceeding_output_dim_rejected(self):
        spec = NetworkSpec(layer_dims=(2, 4, 2), activations=("tanh", "softmax"), seed=0)
        net = build_network(spec)
        with pytest.raises(ValidationError):
            train_sgd(net, np.zeros((4, 2)), LabelSet(labels=[0, 1, 2, 1], class_count=3))


class TestMarkovOracles:
    def test_mod2_floor2_exact_values(self):
        values = markov_chain_exact_mi(mod2_floor2_case())
        np.testing.assert_allclose(values, [LN2, LN2, 0.0], atol=1e-12)

    def test_chain_is_non_increasing(self):
        values = markov_chain_exact_mi(mod2_floor2_case())
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))

    def test_identity_stage_preserves_mi(self):
        case = MarkovChainCase(
            p_x=[0.5, 0.5],
            y_given_x=np.eye(2),
            stage_kernels=(np.eye(2), np.eye(2)),
        )
        values = markov_chain_exact_mi(case)
        np.testing.assert_allclose(values, [LN2, LN2, LN2], atol=1e-12)

    def test_constant_stage_kills_mi(self):
        collapse = np.array([[1.0], [1.0]])
        case = MarkovChainCase(p_x=[0.5, 0.5], y_given_x=np.eye(2), stage_kernels=(collapse,))
        assert markov_chain_exact_mi(case)[-1] == 0.0

    def test_invalid_kernel_rejected(self):
        with pytest.raises(ValidationError):
            MarkovChainCase(p_x=[0.5, 0.5], y_given_x=np.array([[0.9, 0.2], [0.5, 0.5]]), stage_kernels=())


class TestMarkovDataset:
    def test_expansion_shapes_and_values(self):
        x, stages, labels = markov_dataset(mod2_floor2_case(), copies=8)
        assert x.shape == (32, 1)
        assert [s.shape for s in stages] == [(32, 1), (32, 1)]
        assert np.array_equal(np.unique(x), [0.0, 1.0, 2.0, 3.0])
        np.testing.assert_array_equal(labels.labels, x.ravel().astype(int) % 2)
        np.testing.assert_array_equal(stages[0], x)  # identity stage
        np.testing.assert_array_equal(stages[1].ravel(), x.ravel() // 2)

    def test_stochastic_kernel_rejected(self):
        noisy = np.array([[0.7, 0.3], [0.3, 0.7]])
        case = MarkovChainCase(p_x=[0.5, 0.5], y_given_x=np.eye(2), stage_kernels=(noisy,))
        with pytest.raises(ValidationError):
            markov_dataset(case)

    def test_non_uniform_source_rejected(self):
        case = MarkovChainCase(p_x=[0.75, 0.25], y_given_x=np.eye(2), stage_kernels=())
        with pytest.raises(ValidationError):
            markov_dataset(case)
