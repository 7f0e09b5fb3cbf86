# SPDX-License-Identifier: MIT
from lungvit.tensor.tensor import Array
from lungvit.tensor.tensor import ComputeGraph
from lungvit.tensor.tensor import Node
from lungvit.tensor.tensor import Tensor
from lungvit.tensor.tensor import backward
from lungvit.tensor.tensor import grad_enabled
from lungvit.tensor.tensor import no_grad
from lungvit.tensor.tensor import zero_grads
from lungvit.tensor.ops import add
from lungvit.tensor.ops import concat
from lungvit.tensor.ops import cross_entropy
from lungvit.tensor.ops import dropout
from lungvit.tensor.ops import gelu
from lungvit.tensor.ops import layer_norm
from lungvit.tensor.ops import matmul
from lungvit.tensor.ops import mean
from lungvit.tensor.ops import mul
from lungvit.tensor.ops import permute
from lungvit.tensor.ops import reshape
from lungvit.tensor.ops import scale
from lungvit.tensor.ops import slice_axis
from lungvit.tensor.ops import softmax
from lungvit.tensor.ops import sub
from lungvit.tensor.ops import sum
from lungvit.tensor.ops import transpose
from lungvit.tensor.gradcheck import finite_diff_check

__all__ = [
    "Array",
    "ComputeGraph",
    "Node",
    "Tensor",
    "add",
    "backward",
    "concat",
    "cross_entropy",
    "dropout",
    "finite_diff_check",
    "gelu",
    "grad_enabled",
    "layer_norm",
    "matmul",
    "mean",
    "mul",
    "no_grad",
    "permute",
    "reshape",
    "scale",
    "slice_axis",
    "softmax",
    "sub",
    "sum",
    "transpose",
    "zero_grads",
]
