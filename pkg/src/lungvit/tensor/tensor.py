# SPDX-License-Identifier: MIT
"""
Dense float64 tensors with a dynamic reverse-mode tape.

Every differentiable operation records a :class:`Node` on the tensor it produces.
:func:`backward` traces those nodes from a scalar loss into a :class:`ComputeGraph`
(topological order), replays their backward rules in reverse and accumulates
gradients into every ``requires_grad`` leaf. A graph can be replayed exactly once.
"""

from __future__ import annotations

import contextlib
import contextvars
from collections.abc import Callable
from collections.abc import Iterable
from collections.abc import Iterator
from dataclasses import dataclass
from dataclasses import field
from typing import TYPE_CHECKING
from typing import Any

import numpy as np
import numpy.typing as npt

from lungvit.errors import GraphConsumedError
from lungvit.errors import NonScalarLossError
from lungvit.errors import ShapeError

if TYPE_CHECKING:
    from typing_extensions import Self

Array = npt.NDArray[np.float64]
BackwardRule = Callable[[Array], "tuple[Array | None, ...]"]

_grad_enabled: contextvars.ContextVar[bool] = contextvars.ContextVar(
    "lungvit_grad_enabled", default=True
)


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """Run operations without recording them (evaluation paths)."""
    token = _grad_enabled.set(False)
    try:
        yield
    finally:
        _grad_enabled.reset(token)


def grad_enabled() -> bool:
    return _grad_enabled.get()


@dataclass(eq=False)
class Node:
    op: str
    inputs: tuple[Tensor, ...]
    rule: BackwardRule | None
    consumed: bool = False


class Tensor:
    __slots__ = ("_node", "data", "grad", "name", "requires_grad", "retains_grad")

    def __init__(
        self,
        data: Any,
        *,
        requires_grad: bool = False,
        name: str | None = None,
    ) -> None:
        array = np.array(data, dtype=np.float64, order="C")
        if any(size <= 0 for size in array.shape):
            raise ShapeError(f"tensor dimensions must be positive, got shape {array.shape}")
        self.data: Array = array
        self.requires_grad = requires_grad
        self.grad: Array | None = np.zeros_like(array) if requires_grad else None
        self.retains_grad = False
        self.name = name
        self._node: Node | None = None

    @classmethod
    def _from_op(cls, data: Array, op: str, inputs: tuple[Tensor, ...], rule: BackwardRule) -> Self:
        out = cls.__new__(cls)
        out.data = np.ascontiguousarray(data, dtype=np.float64)
        out.grad = None
        out.retains_grad = False
        out.name = None
        out._node = None
        out.requires_grad = False
        if grad_enabled() and any(t.requires_grad for t in inputs):
            out.requires_grad = True
            out._node = Node(op, inputs, rule)
        return out

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        op = f", op={self._node.op}" if self._node is not None else ""
        return f"<Tensor{label} shape={self.shape}, requires_grad={self.requires_grad}{op}>"

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_leaf(self) -> bool:
        return self._node is None

    def item(self) -> float:
        if self.size != 1:
            raise ShapeError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> Array:
        return self.data

    def detach(self) -> Tensor:
        """A graph-free tensor sharing this tensor's storage."""
        out = Tensor.__new__(Tensor)
        out.data = self.data
        out.grad = None
        out.requires_grad = False
        out.retains_grad = False
        out.name = self.name
        out._node = None
        return out

    def retain_grad(self) -> Self:
        """Keep this interior tensor's gradient after :func:`backward`."""
        self.retains_grad = True
        return self

    def zero_grad(self) -> None:
        if self.requires_grad:
            self.grad = np.zeros_like(self.data)

    # Arithmetic sugar; the rules live in lungvit.tensor.ops.

    def __add__(self, other: Tensor | float) -> Tensor:
        from lungvit.tensor import ops

        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other: Tensor | float) -> Tensor:
        from lungvit.tensor import ops

        return ops.sub(self, other)

    def __mul__(self, other: Tensor | float) -> Tensor:
        from lungvit.tensor import ops

        return ops.mul(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> Tensor:
        from lungvit.tensor import ops

        return ops.scale(self, -1.0)

    def __matmul__(self, other: Tensor) -> Tensor:
        from lungvit.tensor import ops

        return ops.matmul(self, other)

    def reshape(self, *shape: int) -> Tensor:
        from lungvit.tensor import ops

        return ops.reshape(self, shape)

    def transpose(self, axis1: int = -2, axis2: int = -1) -> Tensor:
        from lungvit.tensor import ops

        return ops.transpose(self, axis1, axis2)

    def sum(self) -> Tensor:
        from lungvit.tensor import ops

        return ops.sum(self)

    def mean(self) -> Tensor:
        from lungvit.tensor import ops

        return ops.mean(self)


@dataclass
class ComputeGraph:
    """Recorded operations reachable from one root, operands before consumers."""

    root: Tensor
    nodes: list[Tensor] = field(default_factory=list)

    @classmethod
    def trace(cls, root: Tensor) -> ComputeGraph:
        order: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(root, False)]
        while stack:
            tensor, expanded = stack.pop()
            if expanded:
                order.append(tensor)
                continue
            if id(tensor) in visited or tensor._node is None:
                continue
            visited.add(id(tensor))
            stack.append((tensor, True))
            stack.extend(
                (operand, False)
                for operand in reversed(tensor._node.inputs)
                if operand._node is not None and id(operand) not in visited
            )
        return cls(root=root, nodes=order)

    @property
    def consumed(self) -> bool:
        return any(t._node is not None and t._node.consumed for t in self.nodes)

    def backward(self) -> None:
        if self.consumed:
            raise GraphConsumedError(
                "backward() was already called on this graph; run a fresh forward pass"
            )

        pending: dict[int, Array] = {id(self.root): np.ones_like(self.root.data)}
        for tensor in reversed(self.nodes):
            node = tensor._node
            assert node is not None
            upstream = pending.pop(id(tensor), None)
            node.consumed = True
            rule, node.rule = node.rule, None
            if upstream is None or rule is None:
                continue
            if tensor.retains_grad:
                tensor.grad = upstream if tensor.grad is None else tensor.grad + upstream

            for operand, grad in zip(node.inputs, rule(upstream)):
                if grad is None or not operand.requires_grad:
                    continue
                if grad.shape != operand.shape:
                    raise ShapeError(
                        f"{node.op} produced gradient of shape {grad.shape} "
                        f"for operand of shape {operand.shape}"
                    )
                if operand._node is None:
                    operand.grad = grad.copy() if operand.grad is None else operand.grad + grad
                elif id(operand) in pending:
                    pending[id(operand)] = pending[id(operand)] + grad
                else:
                    pending[id(operand)] = grad


def backward(loss: Tensor) -> None:
    """
    Accumulate d(loss)/d(leaf) into every ``requires_grad`` leaf reachable from ``loss``.

    A graph is consumed by its first backward pass. A leaf used as the loss has no graph:
    every call adds 1 to its gradient, like a fresh forward pass would.
    """
    if loss.size != 1:
        raise NonScalarLossError(f"backward() needs a scalar loss, got shape {loss.shape}")
    if loss._node is None:
        if loss.requires_grad:
            loss.grad = np.ones_like(loss.data) if loss.grad is None else loss.grad + 1.0
        return
    ComputeGraph.trace(loss).backward()


def zero_grads(tensors: Iterable[Tensor]) -> None:
    for tensor in tensors:
        tensor.zero_grad()
