"""Central-difference checks of every layer's analytic gradients in float64."""

import numpy as np
import pytest

from genomotif.nn import (
    AvgPool2D,
    BatchNorm,
    Conv2D,
    Dense,
    DenseBlock,
    DenseBlockSpec,
    GlobalAvgPool,
    Network,
    NetworkSpec,
    Precision,
    ReLU,
    Sequential,
    Transition,
    check_layer,
    grad_check,
    one_hot,
    relative_error,
    softmax_cross_entropy,
)

F64 = np.dtype(np.float64)
LINEAR_TOLERANCE = 1e-6
TOLERANCE = 1e-4


def _input(shape: tuple[int, ...], seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal(shape)


@pytest.mark.parametrize(
    "shape,out_channels,kernel,stride,padding",
    [
        ((2, 3, 5, 5), 4, 3, 1, 1),
        ((2, 2, 6, 6), 3, 3, 2, 1),
        ((1, 3, 4, 5), 2, 1, 1, 0),
        ((3, 1, 6, 4), 2, 2, 2, 0),
        ((2, 4, 5, 5), 1, 3, 1, 0),
        ((2, 2, 7, 7), 5, 3, 2, 0),
    ],
)
def test_conv2d(shape: tuple[int, ...], out_channels: int, kernel: int, stride: int, padding: int):
    rng = np.random.default_rng(1)
    layer = Conv2D(shape[1], out_channels, kernel, stride, padding, rng=rng, dtype=F64)
    layer.bias.value[...] = rng.standard_normal(out_channels)

    assert check_layer(layer, _input(shape)) < LINEAR_TOLERANCE


@pytest.mark.parametrize("shape", [(4, 3), (3, 2, 3, 3), (2, 4, 2, 5), (5, 1, 2, 2)])
def test_batchnorm(shape: tuple[int, ...]):
    layer = BatchNorm(shape[1], dtype=F64)
    rng = np.random.default_rng(2)
    layer.gamma.value[...] = rng.uniform(0.5, 1.5, shape[1])
    layer.beta.value[...] = rng.standard_normal(shape[1])

    assert check_layer(layer, _input(shape, 3) * 2 + 1) < TOLERANCE


@pytest.mark.parametrize("shape", [(2, 3, 4, 4), (1, 2, 6, 2)])
def test_avg_pool(shape: tuple[int, ...]):
    assert check_layer(AvgPool2D(2), _input(shape)) < LINEAR_TOLERANCE


@pytest.mark.parametrize("shape", [(2, 3, 4, 4), (3, 1, 5, 2)])
def test_global_avg_pool(shape: tuple[int, ...]):
    assert check_layer(GlobalAvgPool(), _input(shape)) < LINEAR_TOLERANCE


@pytest.mark.parametrize("shape,units", [((3, 5), 4), ((1, 2), 3), ((4, 7), 1)])
def test_dense(shape: tuple[int, int], units: int):
    rng = np.random.default_rng(4)
    layer = Dense(shape[1], units, rng=rng, dtype=F64)
    layer.bias.value[...] = rng.standard_normal(units)

    assert check_layer(layer, _input(shape)) < LINEAR_TOLERANCE


def test_relu_away_from_the_kink():
    x = _input((2, 3, 4))
    x[np.abs(x) < 0.1] = 0.5

    assert check_layer(ReLU(), x) < LINEAR_TOLERANCE


@pytest.mark.parametrize(
    "shape,num_layers,growth_rate",
    [((2, 3, 4, 4), 2, 2), ((3, 2, 3, 3), 3, 1), ((2, 4, 2, 2), 1, 3)],
)
def test_dense_block(shape: tuple[int, ...], num_layers: int, growth_rate: int):
    block = DenseBlock(shape[1], num_layers, growth_rate, rng=np.random.default_rng(5), dtype=F64)

    assert check_layer(block, _input(shape)) < TOLERANCE


@pytest.mark.parametrize("shape,compression", [((2, 4, 4, 4), 0.5), ((3, 3, 2, 2), 1.0)])
def test_transition(shape: tuple[int, ...], compression: float):
    transition = Transition(shape[1], compression, rng=np.random.default_rng(6), dtype=F64)

    assert check_layer(transition, _input(shape)) < TOLERANCE


def test_sequential_stack():
    rng = np.random.default_rng(7)
    stack = Sequential(
        Conv2D(2, 3, 3, padding=1, rng=rng, dtype=F64),
        BatchNorm(3, dtype=F64),
        AvgPool2D(2),
        GlobalAvgPool(),
        Dense(3, 2, rng=rng, dtype=F64),
    )

    assert check_layer(stack, _input((3, 2, 4, 4))) < TOLERANCE


@pytest.mark.parametrize("batch", [1, 3, 8])
def test_softmax_cross_entropy(batch: int):
    logits = _input((batch, 4), 8) * 3
    targets = one_hot(np.arange(batch) % 4, 4)
    _, _, analytic = softmax_cross_entropy(logits, targets)

    def loss() -> float:
        return softmax_cross_entropy(logits, targets)[0]

    assert grad_check(loss, [logits], [analytic.copy()]) < TOLERANCE


def test_tiny_network_end_to_end():
    block = DenseBlockSpec(num_layers=2, growth_rate=2)
    spec = NetworkSpec(
        image_size=8,
        stem_channels=3,
        blocks=(block, block),
        dropout=0.0,
        precision=Precision.FLOAT64,
    )
    network = Network(spec, seed=3)

    assert check_layer(network, _input((2, 3, 8, 8))) < TOLERANCE


def test_grad_check_requires_float64():
    x = np.zeros(3, dtype=np.float32)

    with pytest.raises(ValueError):
        grad_check(lambda: 0.0, [x], [x])


def test_relative_error_detects_wrong_gradients():
    assert relative_error(np.array([1.0, 2.0]), np.array([1.0, 2.0])) == 0.0
    assert relative_error(np.array([1.0]), np.array([2.0])) == pytest.approx(0.5)
    assert relative_error(np.array([0.0]), np.array([0.0])) == 0.0


def test_relative_error_ignores_noise_around_exact_zero():
    assert relative_error(np.array([1.1e-16, 0.3]), np.array([5.6e-12, 0.3])) == 0.0


def test_conv_bias_before_batchnorm_has_zero_gradient():
    rng = np.random.default_rng(7)
    stack = Sequential(Conv2D(2, 3, 3, padding=1, rng=rng, dtype=F64), BatchNorm(3, dtype=F64))
    out = stack.forward(_input((3, 2, 4, 4)))

    stack.backward(np.random.default_rng(0).standard_normal(out.shape))

    conv = stack.children()[0]
    assert isinstance(conv, Conv2D)
    np.testing.assert_allclose(conv.bias.grad, 0.0, atol=1e-12)


class _DoubledDense(Dense):
    def backward(self, grad: np.ndarray) -> np.ndarray:
        return 2 * super().backward(grad)


def test_grad_check_flags_doubled_backward():
    rng = np.random.default_rng(9)
    layer = _DoubledDense(4, 3, rng=rng, dtype=F64)

    assert check_layer(layer, _input((2, 4))) == pytest.approx(0.5)
    assert check_layer(Dense(4, 3, rng=np.random.default_rng(9), dtype=F64), _input((2, 4))) < LINEAR_TOLERANCE
