"""Synthetic linear-dynamics corpora.

Generates stable random transition matrices, first-order vector
autoregressive (VAR) series driven by them, undersampled variants (SVAR),
and the pre-training / downstream corpora with their split structure.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidConfigError, SchemaError
from .seeding import derive_seed, numpy_rng
from .tensorio import load_tensors, save_tensors
from .validation import check_in_open_unit_interval

LABEL_NAMES = {"VAR": 0, "SVAR": 1}
_LABEL_OF_INDEX = {v: k for k, v in LABEL_NAMES.items()}


@dataclass(frozen=True)
class TransitionMatrix:
    """Stable square matrix driving a simulated linear system."""

    entries: np.ndarray
    n: int
    graph_id: int = 0

    def spectral_radius(self) -> float:
        return spectral_radius(self.entries)


@dataclass(frozen=True)
class SimSeries:
    """One generated channels x time series with its provenance."""

    values: np.ndarray
    label: str  # "VAR" or "SVAR"
    graph_id: int
    seed: int


def spectral_radius(matrix: np.ndarray) -> float:
    """Largest absolute eigenvalue."""
    return float(np.max(np.abs(np.linalg.eigvals(np.asarray(matrix, dtype=np.float64)))))


def random_stable_transition(
    n: int, target_radius: float, rng: np.random.Generator, graph_id: int = 0
) -> TransitionMatrix:
    """Draw an n x n i.i.d. normal matrix and rescale its spectral radius
    to `target_radius`, which makes stability exact by construction."""
    if int(n) < 1:
        raise InvalidConfigError(f"node count must be >= 1, got {n}")
    check_in_open_unit_interval(target_radius, "target_radius")
    n = int(n)
    while True:
        raw = rng.standard_normal((n, n))
        radius = spectral_radius(raw)
        if radius > 0.0:  # degenerate all-zero-spectrum draw: redraw
            break
    entries = raw * (target_radius / radius)
    return TransitionMatrix(entries=entries, n=n, graph_id=graph_id)


def _as_entries(matrix) -> np.ndarray:
    entries = matrix.entries if isinstance(matrix, TransitionMatrix) else matrix
    entries = np.asarray(entries, dtype=np.float64)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise InvalidConfigError(f"transition matrix must be square, got {entries.shape}")
    return entries


def generate_var(
    matrix,
    length: int,
    noise_std: float,
    rng: np.random.Generator,
    x0: np.ndarray | None = None,
) -> np.ndarray:
    """Simulate x_t = A x_{t-1} + eps_t with i.i.d. Gaussian innovations.

    x_0 is the first innovation unless `x0` overrides it. Returns a
    channels x time float64 matrix.
    """
    entries = _as_entries(matrix)
    if int(length) < 1:
        raise InvalidConfigError(f"series length must be >= 1, got {length}")
    if noise_std < 0:
        raise InvalidConfigError(f"noise_std must be >= 0, got {noise_std}")
    length = int(length)
    n = entries.shape[0]
    eps = rng.standard_normal((length, n)) * noise_std
    out = np.empty((length, n), dtype=np.float64)
    if x0 is None:
        out[0] = eps[0]
    else:
        x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
        if x0.shape[0] != n:
            raise InvalidConfigError(f"x0 must have {n} entries, got {x0.shape[0]}")
        out[0] = x0
    for t in range(1, length):
        out[t] = entries @ out[t - 1] + eps[t]
    return np.ascontiguousarray(out.T)


def generate_svar(
    matrix,
    length: int,
    rate: int,
    noise_std: float,
    rng: np.random.Generator,
    x0: np.ndarray | None = None,
) -> np.ndarray:
    """Undersampled VAR: generate rate*length steps, keep every rate-th."""
    if int(rate) < 1:
        raise InvalidConfigError(f"undersampling rate must be >= 1, got {rate}")
    rate = int(rate)
    full = generate_var(matrix, rate * int(length), noise_std, rng, x0=x0)
    return np.ascontiguousarray(full[:, ::rate])


@dataclass
class SimCorpusConfig:
    """Sizes, splits, and randomness of the simulated corpora."""

    n_nodes: int = 10
    pretrain_series: int = 50
    pretrain_length: int = 20000
    pretrain_split: tuple[int, int, int] = (14000, 4000, 2000)
    n_graphs_downstream: int = 400
    samples_per_graph: int = 5
    downstream_length: int = 4000
    downstream_split: tuple[int, int, int] = (1600, 200, 200)
    noise_std: float = 1.0
    spectral_radius_target: float = 0.8
    svar_rate: int = 2
    master_seed: int = 0

    def __post_init__(self):
        self.pretrain_split = tuple(int(v) for v in self.pretrain_split)
        self.downstream_split = tuple(int(v) for v in self.downstream_split)
        self.validate()

    def validate(self) -> None:
        if self.n_nodes < 1:
            raise InvalidConfigError("n_nodes must be >= 1")
        if self.noise_std <= 0:
            raise InvalidConfigError("noise_std must be > 0")
        check_in_open_unit_interval(self.spectral_radius_target, "spectral_radius_target")
        if self.svar_rate < 1:
            raise InvalidConfigError("svar_rate must be >= 1")
        if len(self.pretrain_split) != 3 or any(v <= 0 for v in self.pretrain_split):
            raise InvalidConfigError("pretrain_split must be three positive lengths")
        if sum(self.pretrain_split) != self.pretrain_length:
            raise InvalidConfigError(
                f"pretrain_split sums to {sum(self.pretrain_split)}, "
                f"expected pretrain_length={self.pretrain_length}"
            )
        if len(self.downstream_split) != 3 or any(v <= 0 for v in self.downstream_split):
            raise InvalidConfigError("downstream_split must be three positive counts")
        total = self.n_graphs_downstream * self.samples_per_graph
        if sum(self.downstream_split) != total:
            raise InvalidConfigError(
                f"downstream_split sums to {sum(self.downstream_split)}, expected "
                f"n_graphs_downstream*samples_per_graph={total}"
            )
        for count in self.downstream_split:
            if count % self.samples_per_graph != 0:
                raise InvalidConfigError(
                    "each downstream split must be a multiple of samples_per_graph "
                    "so splits stay graph-disjoint"
                )

    @classmethod
    def desk(cls, master_seed: int = 0) -> "SimCorpusConfig":
        """Small configuration sized for laptop-scale runs and tests."""
        return cls(
            pretrain_series=5,
            pretrain_length=2000,
            pretrain_split=(1400, 400, 200),
            n_graphs_downstream=56,
            samples_per_graph=5,
            downstream_length=260,
            downstream_split=(200, 40, 40),
            master_seed=master_seed,
        )

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["pretrain_split"] = list(self.pretrain_split)
        out["downstream_split"] = list(self.downstream_split)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SimCorpusConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidConfigError(f"unknown corpus config keys: {unknown}")
        return cls(**data)


@dataclass
class LabeledSplit:
    """Series with integer class labels and stable per-series ids."""

    values: np.ndarray  # (count, channels, time) float32
    labels: np.ndarray  # (count,) int64
    ids: np.ndarray  # (count,) int64, graph or subject identity
    seeds: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.values)

    def subset(self, indices) -> "LabeledSplit":
        indices = np.asarray(indices, dtype=np.int64)
        return LabeledSplit(
            values=self.values[indices],
            labels=self.labels[indices],
            ids=self.ids[indices],
            seeds=None if self.seeds is None else self.seeds[indices],
        )


@dataclass
class PretrainCorpus:
    """Unlabeled series split contiguously along time into train/val/test."""

    splits: dict[str, np.ndarray]  # name -> (series, channels, time) float32
    seeds: list[int]
    config: SimCorpusConfig


@dataclass
class DownstreamCorpus:
    """Labeled VAR/SVAR series with graph-disjoint train/val/test splits."""

    splits: dict[str, LabeledSplit]
    config: SimCorpusConfig


SPLIT_NAMES = ("train", "val", "test")


def build_pretrain_corpus(cfg: SimCorpusConfig) -> PretrainCorpus:
    """Generate VAR series (one fresh stable graph each) and split each
    series contiguously along time."""
    cfg.validate()
    a, b, _ = cfg.pretrain_split
    parts: dict[str, list[np.ndarray]] = {name: [] for name in SPLIT_NAMES}
    seeds = []
    for i in range(cfg.pretrain_series):
        graph_seed = derive_seed(cfg.master_seed, "pretrain", "graph", i)
        matrix = random_stable_transition(
            cfg.n_nodes, cfg.spectral_radius_target, numpy_rng(graph_seed), graph_id=i
        )
        series_seed = derive_seed(cfg.master_seed, "pretrain", "series", i)
        values = generate_var(matrix, cfg.pretrain_length, cfg.noise_std, numpy_rng(series_seed))
        parts["train"].append(values[:, :a])
        parts["val"].append(values[:, a : a + b])
        parts["test"].append(values[:, a + b :])
        seeds.append(series_seed)
    splits = {
        name: np.stack(chunks).astype(np.float32) for name, chunks in parts.items()
    }
    return PretrainCorpus(splits=splits, seeds=seeds, config=cfg)


def _downstream_graph_counts(cfg: SimCorpusConfig) -> tuple[int, int, int]:
    return tuple(count // cfg.samples_per_graph for count in cfg.downstream_split)


def build_downstream_corpus(cfg: SimCorpusConfig) -> DownstreamCorpus:
    """Generate labeled series: even-indexed graphs yield VAR samples,
    odd-indexed yield SVAR, and splits never share a graph."""
    cfg.validate()
    n_train_g, n_val_g, _ = _downstream_graph_counts(cfg)
    buckets = {name: {"values": [], "labels": [], "ids": [], "seeds": []} for name in SPLIT_NAMES}
    for g in range(cfg.n_graphs_downstream):
        if g < n_train_g:
            split = "train"
        elif g < n_train_g + n_val_g:
            split = "val"
        else:
            split = "test"
        graph_seed = derive_seed(cfg.master_seed, "downstream", "graph", g)
        matrix = random_stable_transition(
            cfg.n_nodes, cfg.spectral_radius_target, numpy_rng(graph_seed), graph_id=g
        )
        label = "VAR" if g % 2 == 0 else "SVAR"
        for s in range(cfg.samples_per_graph):
            seed = derive_seed(cfg.master_seed, "downstream", "series", g, s)
            if label == "VAR":
                values = generate_var(matrix, cfg.downstream_length, cfg.noise_std, numpy_rng(seed))
            else:
                values = generate_svar(
                    matrix, cfg.downstream_length, cfg.svar_rate, cfg.noise_std, numpy_rng(seed)
                )
            bucket = buckets[split]
            bucket["values"].append(values)
            bucket["labels"].append(LABEL_NAMES[label])
            bucket["ids"].append(g)
            bucket["seeds"].append(seed)
    splits = {}
    for name, bucket in buckets.items():
        splits[name] = LabeledSplit(
            values=np.stack(bucket["values"]).astype(np.float32),
            labels=np.asarray(bucket["labels"], dtype=np.int64),
            ids=np.asarray(bucket["ids"], dtype=np.int64),
            seeds=np.asarray(bucket["seeds"], dtype=np.int64),
        )
    return DownstreamCorpus(splits=splits, config=cfg)


# ---------------------------------------------------------------------------
# Corpus directories: one tensor container per split plus manifest.json
# ---------------------------------------------------------------------------


def save_pretrain_corpus(corpus: PretrainCorpus, out_dir) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "kind": "pretrain",
        "config": corpus.config.to_dict(),
        "seeds": [int(s) for s in corpus.seeds],
        "splits": {},
    }
    for name, values in corpus.splits.items():
        save_tensors(out_dir / f"{name}.bin", {"values": values})
        manifest["splits"][name] = {
            "file": f"{name}.bin",
            "count": int(values.shape[0]),
            "shape": list(values.shape),
        }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


def save_downstream_corpus(corpus: DownstreamCorpus, out_dir) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "kind": "downstream",
        "config": corpus.config.to_dict(),
        "label_names": LABEL_NAMES,
        "splits": {},
    }
    for name, split in corpus.splits.items():
        save_tensors(out_dir / f"{name}.bin", {"values": split.values})
        manifest["splits"][name] = {
            "file": f"{name}.bin",
            "count": int(len(split)),
            "shape": list(split.values.shape),
            "labels": split.labels.tolist(),
            "graph_ids": split.ids.tolist(),
            "seeds": [] if split.seeds is None else split.seeds.tolist(),
        }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


def _read_manifest(corpus_dir, expected_kind: str) -> dict:
    path = Path(corpus_dir) / "manifest.json"
    if not path.exists():
        raise SchemaError(f"no manifest.json in {corpus_dir}")
    manifest = json.loads(path.read_text())
    kind = manifest.get("kind")
    if kind != expected_kind:
        raise SchemaError(f"{path}: kind={kind!r}, expected {expected_kind!r}")
    return manifest


def load_pretrain_corpus(corpus_dir) -> PretrainCorpus:
    corpus_dir = Path(corpus_dir)
    manifest = _read_manifest(corpus_dir, "pretrain")
    cfg = SimCorpusConfig.from_dict(manifest["config"])
    splits = {}
    for name, entry in manifest["splits"].items():
        tensors, _ = load_tensors(corpus_dir / entry["file"])
        values = tensors["values"]
        if list(values.shape) != entry["shape"]:
            raise SchemaError(
                f"split '{name}': stored shape {list(values.shape)} != "
                f"manifest shape {entry['shape']}"
            )
        splits[name] = values
    return PretrainCorpus(splits=splits, seeds=list(manifest["seeds"]), config=cfg)


def load_downstream_corpus(corpus_dir) -> DownstreamCorpus:
    corpus_dir = Path(corpus_dir)
    manifest = _read_manifest(corpus_dir, "downstream")
    cfg = SimCorpusConfig.from_dict(manifest["config"])
    splits = {}
    for name, entry in manifest["splits"].items():
        tensors, _ = load_tensors(corpus_dir / entry["file"])
        values = tensors["values"]
        if list(values.shape) != entry["shape"]:
            raise SchemaError(
                f"split '{name}': stored shape {list(values.shape)} != "
                f"manifest shape {entry['shape']}"
            )
        seeds = entry.get("seeds") or None
        splits[name] = LabeledSplit(
            values=values,
            labels=np.asarray(entry["labels"], dtype=np.int64),
            ids=np.asarray(entry["graph_ids"], dtype=np.int64),
            seeds=None if seeds is None else np.asarray(seeds, dtype=np.int64),
        )
    return DownstreamCorpus(splits=splits, config=cfg)
