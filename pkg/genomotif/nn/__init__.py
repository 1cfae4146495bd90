from genomotif.nn.blocks import DenseBlock, Transition, dense_layer
from genomotif.nn.checkpoint import Checkpoint, TrainingState, load_checkpoint, restore_optimizer, save_checkpoint
from genomotif.nn.gradcheck import check_layer, grad_check, numeric_gradient, relative_error
from genomotif.nn.layers import (
    AvgPool2D,
    BatchNorm,
    Conv2D,
    Dense,
    Dropout,
    GlobalAvgPool,
    Layer,
    Parameter,
    ReLU,
    Sequential,
)
from genomotif.nn.losses import cross_entropy, one_hot, softmax_cross_entropy
from genomotif.nn.network import DenseBlockSpec, Network, NetworkSpec, ParameterCounts, Precision
from genomotif.nn.optim import RMSProp, rmsprop_step

__all__ = [
    "AvgPool2D",
    "BatchNorm",
    "Checkpoint",
    "Conv2D",
    "Dense",
    "DenseBlock",
    "DenseBlockSpec",
    "Dropout",
    "GlobalAvgPool",
    "Layer",
    "Network",
    "NetworkSpec",
    "Parameter",
    "ParameterCounts",
    "Precision",
    "RMSProp",
    "ReLU",
    "Sequential",
    "TrainingState",
    "Transition",
    "check_layer",
    "cross_entropy",
    "dense_layer",
    "grad_check",
    "load_checkpoint",
    "numeric_gradient",
    "one_hot",
    "relative_error",
    "restore_optimizer",
    "rmsprop_step",
    "save_checkpoint",
    "softmax_cross_entropy",
]
