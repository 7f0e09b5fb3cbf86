# SPDX-License-Identifier: MIT
"""Vision-transformer transfer learning for lung histology, built on a small numpy autodiff core."""

from importlib.metadata import PackageNotFoundError
from importlib.metadata import version

from lungvit.errors import LungVitError

try:
    __version__ = version("lungvit")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"

__all__ = ["LungVitError", "__version__"]
