"""Window extraction, contrastive batch construction, normalization, and
subject-dataset ingestion (CSV per subject plus manifest.json)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataShapeError, DatasetIOError, InvalidConfigError, SchemaError
from .validation import check_series


@dataclass(frozen=True)
class Window:
    """One channels x width slice of a series; the atomic encoder input."""

    values: np.ndarray
    series_id: int
    start_index: int


@dataclass(frozen=True)
class WindowSequence:
    """Ordered windows from one series, strided by a fixed hop."""

    windows: list[Window]
    hop: int
    width: int

    def __len__(self) -> int:
        return len(self.windows)

    def stacked(self) -> np.ndarray:
        return stack_windows(self.windows)


@dataclass(frozen=True)
class ContrastiveBatch:
    """Anchor windows paired with their immediate successor windows.

    positives[i] is the positive for anchors[i]; every positives[j] with
    j != i serves as an in-batch negative.
    """

    anchors: list[Window]
    positives: list[Window]

    @property
    def size(self) -> int:
        return len(self.anchors)

    def anchor_values(self) -> np.ndarray:
        return stack_windows(self.anchors)

    def positive_values(self) -> np.ndarray:
        return stack_windows(self.positives)


@dataclass(frozen=True)
class SubjectRecord:
    """One subject: component x time matrix plus an integer class label."""

    id: str
    label: int
    values: np.ndarray


def count_windows(length: int, width: int, hop: int) -> int:
    """Number of windows of `width` fitting in `length` at stride `hop`."""
    if length < width:
        return 0
    return (length - width) // hop + 1


def stack_windows(windows) -> np.ndarray:
    if not windows:
        raise DataShapeError("cannot stack an empty window list")
    return np.stack([np.asarray(w.values, dtype=np.float64) for w in windows])


def slide_windows(series, width: int, hop: int, series_id: int = 0) -> WindowSequence:
    """Cut a channels x time series into a strided window sequence."""
    arr = check_series(series)
    if hop < 1:
        raise InvalidConfigError(f"hop must be >= 1, got {hop}")
    if width < 1:
        raise InvalidConfigError(f"width must be >= 1, got {width}")
    length = arr.shape[1]
    if length < width:
        raise DataShapeError(
            f"series length {length} is shorter than window width {width}: "
            "no window fits"
        )
    windows = [
        Window(values=arr[:, start : start + width], series_id=series_id, start_index=start)
        for start in range(0, length - width + 1, hop)
    ]
    return WindowSequence(windows=windows, hop=hop, width=width)


def _segment_list(corpus) -> list[np.ndarray]:
    if isinstance(corpus, np.ndarray):
        if corpus.ndim != 3:
            raise DataShapeError(f"corpus array must be 3-D, got ndim={corpus.ndim}")
        return list(corpus)
    return list(corpus)


def sample_contrastive_batch(
    corpus, batch_size: int, width: int, rng: np.random.Generator
) -> ContrastiveBatch:
    """Sample anchor/positive pairs of consecutive non-overlapping windows.

    Anchors sit on the window grid (start multiples of `width`); the
    positive is the next grid window of the same series, so no pair ever
    crosses a series boundary.
    """
    if batch_size < 2:
        raise InvalidConfigError(f"batch_size must be >= 2, got {batch_size}")
    segments = _segment_list(corpus)
    slots = [seg.shape[1] // width for seg in segments]
    usable = [i for i, s in enumerate(slots) if s >= 2]
    if not usable:
        raise DataShapeError(
            f"no series is long enough to host an anchor/successor pair "
            f"of width {width}"
        )
    anchors = []
    positives = []
    for _ in range(batch_size):
        sid = int(usable[rng.integers(0, len(usable))])
        segment = np.asarray(segments[sid], dtype=np.float64)
        k = int(rng.integers(0, slots[sid] - 1))
        start = k * width
        anchors.append(Window(segment[:, start : start + width], sid, start))
        positives.append(
            Window(segment[:, start + width : start + 2 * width], sid, start + width)
        )
    return ContrastiveBatch(anchors=anchors, positives=positives)


def zscore_normalize(series, epsilon: float = 1e-8) -> np.ndarray:
    """Per-channel standardization; constant channels map to zeros."""
    arr = check_series(series)
    mean = arr.mean(axis=1, keepdims=True)
    std = arr.std(axis=1, keepdims=True)
    return (arr - mean) / (std + epsilon)


# ---------------------------------------------------------------------------
# Subject datasets: one CSV per subject + manifest.json
# ---------------------------------------------------------------------------


def save_subject_dataset(records: list[SubjectRecord], out_dir, label_names: dict) -> Path:
    """Write records as headerless CSVs plus a manifest; returns manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for record in records:
        filename = f"{record.id}.csv"
        # 17 significant digits: float64 values survive the decimal round trip
        np.savetxt(out_dir / filename, np.asarray(record.values, dtype=np.float64),
                   delimiter=",", fmt="%.17g")
        entries.append({"id": record.id, "file": filename, "label": int(record.label)})
    n_components = int(np.asarray(records[0].values).shape[0])
    manifest = {
        "n_components": n_components,
        "subjects": entries,
        "label_names": {str(k): int(v) for k, v in label_names.items()},
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return manifest_path


def load_subject_dataset(manifest_path) -> list[SubjectRecord]:
    """Load a subject dataset, validating each matrix against the manifest."""
    manifest_path = Path(manifest_path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / "manifest.json"
    if not manifest_path.exists():
        raise DatasetIOError(f"manifest not found: {manifest_path}")
    manifest = json.loads(manifest_path.read_text())
    for key in ("n_components", "subjects", "label_names"):
        if key not in manifest:
            raise SchemaError(f"{manifest_path}: manifest missing key '{key}'")
    n_components = int(manifest["n_components"])
    known_labels = {int(v) for v in manifest["label_names"].values()}
    base = manifest_path.parent
    records = []
    for entry in manifest["subjects"]:
        subject_id = str(entry["id"])
        path = base / entry["file"]
        if not path.exists():
            raise DatasetIOError(f"subject '{subject_id}': file not found: {path}")
        values = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
        if values.shape[0] != n_components:
            raise SchemaError(
                f"subject '{subject_id}': {values.shape[0]} component rows, "
                f"manifest declares {n_components}"
            )
        if not np.all(np.isfinite(values)):
            raise SchemaError(f"subject '{subject_id}': non-finite values")
        label = int(entry["label"])
        if label not in known_labels:
            raise SchemaError(
                f"subject '{subject_id}': label {label} not in label_names {sorted(known_labels)}"
            )
        records.append(SubjectRecord(id=subject_id, label=label, values=values))
    return records
