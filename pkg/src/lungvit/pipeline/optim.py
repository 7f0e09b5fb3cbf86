# SPDX-License-Identifier: MIT
"""Optimizers over a named subset of :class:`ViTParams`; updates happen in place."""

from __future__ import annotations

from abc import ABC
from abc import abstractmethod
from collections.abc import Sequence

import numpy as np

from lungvit.model import ViTParams
from lungvit.tensor import Array


class Optimizer(ABC):
    def __init__(self, params: ViTParams, names: Sequence[str] | None, lr: float) -> None:
        self.params = params
        self.names = list(params) if names is None else list(names)
        unknown = [name for name in self.names if name not in params]
        if unknown:
            raise KeyError(f"unknown parameters: {unknown}")
        self.lr = lr
        self.steps = 0

    def zero_grad(self) -> None:
        for name in self.names:
            self.params[name].zero_grad()

    def step(self) -> None:
        self.steps += 1
        for name in self.names:
            tensor = self.params[name]
            if tensor.grad is None:
                continue
            tensor.data -= self._update(name, tensor.grad)

    @abstractmethod
    def _update(self, name: str, grad: Array) -> Array: ...


class SGD(Optimizer):
    """Gradient descent with heavy-ball momentum (``momentum=0`` gives plain SGD)."""

    def __init__(
        self,
        params: ViTParams,
        names: Sequence[str] | None = None,
        lr: float = 1e-2,
        momentum: float = 0.9,
    ) -> None:
        super().__init__(params, names, lr)
        self.momentum = momentum
        self._velocity: dict[str, Array] = {}

    def _update(self, name: str, grad: Array) -> Array:
        velocity = self._velocity.get(name)
        velocity = grad.copy() if velocity is None else self.momentum * velocity + grad
        self._velocity[name] = velocity
        return self.lr * velocity


class Adam(Optimizer):
    def __init__(
        self,
        params: ViTParams,
        names: Sequence[str] | None = None,
        lr: float = 3e-4,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ) -> None:
        super().__init__(params, names, lr)
        self.betas = betas
        self.eps = eps
        self._first: dict[str, Array] = {}
        self._second: dict[str, Array] = {}

    def _update(self, name: str, grad: Array) -> Array:
        beta1, beta2 = self.betas
        first = beta1 * self._first.get(name, np.zeros_like(grad)) + (1.0 - beta1) * grad
        second = beta2 * self._second.get(name, np.zeros_like(grad)) + (1.0 - beta2) * grad**2
        self._first[name], self._second[name] = first, second
        first_hat = first / (1.0 - beta1**self.steps)
        second_hat = second / (1.0 - beta2**self.steps)
        return self.lr * first_hat / (np.sqrt(second_hat) + self.eps)
