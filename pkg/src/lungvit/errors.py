# SPDX-License-Identifier: MIT
"""
Exception hierarchy.

Every error carries an ``exit_code`` so the command line can map failures onto its
stable contract: 2 for usage and I/O problems, 3 for numerical failures.
"""

from __future__ import annotations

from pathlib import Path

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class LungVitError(Exception):
    exit_code: int = EXIT_USAGE


class ShapeError(LungVitError, ValueError):
    pass


class NonFiniteError(LungVitError, ValueError):
    exit_code = EXIT_NUMERICAL


class LabelError(LungVitError, ValueError):
    pass


class GraphError(LungVitError, RuntimeError):
    pass


class NonScalarLossError(GraphError):
    pass


class GraphConsumedError(GraphError):
    pass


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------


class CheckpointError(LungVitError):
    pass


class BadMagicError(CheckpointError):
    pass


class TruncatedPayloadError(CheckpointError):
    def __init__(self, tensor: str, detail: str = "") -> None:
        self.tensor = tensor
        message = f"truncated payload in tensor {tensor!r}"
        super().__init__(f"{message}: {detail}" if detail else message)


class DimensionMismatchError(CheckpointError):
    pass


# ---------------------------------------------------------------------------
# Data
# ---------------------------------------------------------------------------


class DataError(LungVitError):
    pass


class DecodeError(DataError):
    def __init__(self, path: Path, reason: str) -> None:
        self.path = path
        super().__init__(f"cannot decode {str(path)!r}: {reason}")


class MissingClassError(DataError):
    def __init__(self, class_name: str, root: Path) -> None:
        self.class_name = class_name
        super().__init__(f"class {class_name} has no directory under {str(root)!r}")


class EmptyClassError(DataError):
    def __init__(self, class_name: str) -> None:
        self.class_name = class_name
        super().__init__(f"class {class_name} has zero images")


class NonSquareError(DataError, ShapeError):
    pass


class ManifestError(DataError):
    pass


# ---------------------------------------------------------------------------
# Configuration, training, interpretation
# ---------------------------------------------------------------------------


class ConfigError(LungVitError, ValueError):
    pass


class DivergedTrainingError(LungVitError, ArithmeticError):
    exit_code = EXIT_NUMERICAL

    def __init__(self, step: int, loss: float) -> None:
        self.step = step
        self.loss = loss
        super().__init__(f"training diverged at step {step}: loss is {loss!r}")


class InvalidClassError(LungVitError, ValueError):
    pass


class MissingTraceError(LungVitError, RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


class MetricsError(LungVitError, ValueError):
    pass


class SingleClassError(MetricsError):
    pass
