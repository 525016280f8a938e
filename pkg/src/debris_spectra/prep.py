"""Dataset cleaning and observed-data ingestion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bands import CLASS_LABELS
from .errors import NotIndexed
from .records import Dataset, read_pixel_table

# merge() lives in records; re-exported here as part of the preprocessing API.
from .records import merge  # noqa: F401


@dataclass(frozen=True)
class CleanReport:
    dropped_total: int
    dropped_by_class: dict[str, int]
    retained: int

    def to_json(self) -> dict:
        return {
            "dropped_total": self.dropped_total,
            "dropped_by_class": dict(self.dropped_by_class),
            "retained": self.retained,
        }


def clean(dataset: Dataset) -> tuple[Dataset, CleanReport]:
    """Drop every record with at least one Undefined index, keeping order."""
    if dataset.indices is None:
        raise NotIndexed("indices must be computed before cleaning")
    defined = ~np.isnan(dataset.indices).any(axis=1)
    dropped_labels = dataset.labels[~defined]
    present = [c for c in CLASS_LABELS if c in dataset.labels]
    by_class = {c: int(np.count_nonzero(dropped_labels == c)) for c in present}
    report = CleanReport(
        dropped_total=int((~defined).sum()),
        dropped_by_class=by_class,
        retained=int(defined.sum()),
    )
    return dataset.subset(defined), report


def ingest_pixel_table(path) -> Dataset:
    """Load and validate a user-supplied pixel table (observed-data path)."""
    return read_pixel_table(path)
