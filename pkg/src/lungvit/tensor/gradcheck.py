# SPDX-License-Identifier: MIT
from __future__ import annotations

from collections.abc import Callable

import numpy as np

from lungvit.tensor.tensor import Tensor
from lungvit.tensor.tensor import backward
from lungvit.tensor.tensor import no_grad


def finite_diff_check(
    f: Callable[[Tensor], Tensor],
    x: Tensor,
    step: float = 1e-5,
    *,
    entries: int | None = None,
    seed: int = 0,
) -> float:
    """
    Compare the tape gradient of scalar ``f`` at ``x`` with central differences.

    Returns ``max |analytic - numeric| / max(1, |numeric|)`` over the checked entries.
    ``entries`` limits the check to that many entries sampled with ``seed``; this keeps
    full-network checks affordable. ``x.data`` is restored after every perturbation.
    """
    if not x.requires_grad:
        raise ValueError("finite_diff_check needs a tensor with requires_grad=True")

    x.zero_grad()
    backward(f(x))
    assert x.grad is not None
    analytic = x.grad.reshape(-1).copy()

    flat = x.data.reshape(-1)
    indices = np.arange(flat.size)
    if entries is not None and entries < flat.size:
        indices = np.sort(np.random.default_rng(seed).choice(flat.size, entries, replace=False))

    worst = 0.0
    with no_grad():
        for index in indices:
            original = flat[index]
            flat[index] = original + step
            upper = f(x).item()
            flat[index] = original - step
            lower = f(x).item()
            flat[index] = original
            numeric = (upper - lower) / (2.0 * step)
            error = abs(analytic[index] - numeric) / max(1.0, abs(numeric))
            worst = max(worst, error)
    x.zero_grad()
    return worst
