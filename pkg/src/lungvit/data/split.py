# SPDX-License-Identifier: MIT
"""
Deterministic 60/20/20 partition and its CSV manifest.

The shuffle is Fisher-Yates driven by SplitMix64 so the same seed yields the same
split in any language: ``j = next() % (i + 1)`` for ``i`` from ``n - 1`` down to 1.
"""

from __future__ import annotations

import csv
from collections.abc import MutableSequence
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Final
from typing import Literal
from typing import NamedTuple
from typing import TypeVar

from lungvit.data.images import CLASS_INDEX
from lungvit.data.images import LabeledImage
from lungvit.errors import DataError
from lungvit.errors import ManifestError
from lungvit.log import logger

SplitName = Literal["train", "validation", "test"]
SPLIT_NAMES: Final[tuple[SplitName, ...]] = ("train", "validation", "test")
MANIFEST_HEADER: Final = ("source_id", "class_name", "split")
MIN_ITEMS: Final = 5

_MASK64: Final = (1 << 64) - 1
_GOLDEN_GAMMA: Final = 0x9E3779B97F4A7C15

T = TypeVar("T")


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK64

    def next(self) -> int:
        self.state = (self.state + _GOLDEN_GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)


def shuffle(items: MutableSequence[T], rng: SplitMix64) -> None:
    for i in range(len(items) - 1, 0, -1):
        j = rng.next() % (i + 1)
        items[i], items[j] = items[j], items[i]


def split_counts(n: int) -> tuple[int, int, int]:
    """``floor(0.6 n)`` train, ``floor(0.2 n)`` validation, the remainder test."""
    train = n * 6 // 10
    validation = n * 2 // 10
    return train, validation, n - train - validation


class ManifestRow(NamedTuple):
    source_id: str
    class_name: str
    split: SplitName


@dataclass
class SplitDataset:
    train: list[LabeledImage]
    validation: list[LabeledImage]
    test: list[LabeledImage]
    seed: int | None = None
    stratified: bool = False

    def __getitem__(self, name: SplitName) -> list[LabeledImage]:
        if name not in SPLIT_NAMES:
            raise KeyError(f"unknown split {name!r}, expected one of {SPLIT_NAMES}")
        return getattr(self, name)  # type: ignore[no-any-return]

    def __len__(self) -> int:
        return len(self.train) + len(self.validation) + len(self.test)

    @property
    def manifest(self) -> list[ManifestRow]:
        rows = [
            ManifestRow(item.source_id, item.class_name, name)
            for name in SPLIT_NAMES
            for item in self[name]
        ]
        return sorted(rows, key=lambda row: row.source_id)

    def counts(self) -> tuple[int, int, int]:
        return len(self.train), len(self.validation), len(self.test)


def _check_unique(items: Sequence[LabeledImage]) -> None:
    seen: set[str] = set()
    for item in items:
        if item.source_id in seen:
            raise DataError(f"duplicate source_id {item.source_id!r}")
        seen.add(item.source_id)


def split_dataset(
    items: Sequence[LabeledImage],
    seed: int,
    *,
    stratified: bool = False,
) -> SplitDataset:
    """
    Shuffle with SplitMix64(seed) and cut 60/20/20 by the floor rules.

    With ``stratified`` each class is shuffled and cut on its own (classes in label
    order, one shared stream), then the per-class parts are concatenated.
    """
    if len(items) < MIN_ITEMS:
        raise DataError(f"need at least {MIN_ITEMS} items to split, got {len(items)}")
    _check_unique(items)
    rng = SplitMix64(seed)

    groups: list[list[LabeledImage]]
    if stratified:
        labels = sorted({item.label for item in items})
        groups = [[item for item in items if item.label == label] for label in labels]
    else:
        groups = [list(items)]

    train: list[LabeledImage] = []
    validation: list[LabeledImage] = []
    test: list[LabeledImage] = []
    for group in groups:
        shuffle(group, rng)
        n_train, n_validation, _ = split_counts(len(group))
        train += group[:n_train]
        validation += group[n_train : n_train + n_validation]
        test += group[n_train + n_validation :]

    dataset = SplitDataset(train, validation, test, seed=seed, stratified=stratified)
    logger.info(
        "split %d items (seed=%d%s): %d/%d/%d",
        len(items),
        seed,
        ", stratified" if stratified else "",
        *dataset.counts(),
    )
    return dataset


def write_manifest(dataset: SplitDataset, path: Path | str) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow(MANIFEST_HEADER)
            writer.writerows(dataset.manifest)
    except OSError as e:
        raise DataError(f"cannot write manifest {str(path)!r}: {e}") from e


def read_manifest(path: Path | str) -> list[ManifestRow]:
    path = Path(path)
    try:
        with path.open(newline="") as file:
            rows = list(csv.reader(file))
    except OSError as e:
        raise ManifestError(f"cannot read manifest {str(path)!r}: {e}") from e
    if not rows or tuple(rows[0]) != MANIFEST_HEADER:
        raise ManifestError(f"{str(path)!r}: header must be {','.join(MANIFEST_HEADER)}")

    manifest = []
    for number, row in enumerate(rows[1:], start=2):
        if len(row) != len(MANIFEST_HEADER):
            raise ManifestError(f"{str(path)!r} line {number}: expected 3 fields, got {len(row)}")
        source_id, class_name, split = row
        if split not in SPLIT_NAMES:
            raise ManifestError(f"{str(path)!r} line {number}: unknown split {split!r}")
        if class_name not in CLASS_INDEX:
            raise ManifestError(f"{str(path)!r} line {number}: unknown class {class_name!r}")
        manifest.append(ManifestRow(source_id, class_name, split))  # type: ignore[arg-type]
    return manifest


def apply_manifest(items: Sequence[LabeledImage], manifest: Sequence[ManifestRow]) -> SplitDataset:
    """
    Rebuild a split from manifest rows; each split keeps the items' ingestion order.

    Every item must be listed exactly once and every row must name a loaded item.
    """
    by_id = {item.source_id: item for item in items}
    assigned: dict[str, SplitName] = {}
    for row in manifest:
        item = by_id.get(row.source_id)
        if item is None:
            raise ManifestError(f"manifest names {row.source_id!r}, which is not in the data")
        if item.class_name != row.class_name:
            raise ManifestError(
                f"{row.source_id!r} is {item.class_name} in the data, "
                f"{row.class_name} in the manifest"
            )
        if row.source_id in assigned:
            raise ManifestError(f"{row.source_id!r} is listed twice")
        assigned[row.source_id] = row.split

    unlisted = [source_id for source_id in by_id if source_id not in assigned]
    if unlisted:
        raise ManifestError(
            f"{len(unlisted)} images are missing from the manifest, e.g. {unlisted[0]!r}"
        )

    parts: dict[SplitName, list[LabeledImage]] = {name: [] for name in SPLIT_NAMES}
    for item in items:
        parts[assigned[item.source_id]].append(item)
    return SplitDataset(parts["train"], parts["validation"], parts["test"])
