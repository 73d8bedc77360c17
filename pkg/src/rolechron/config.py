"""Pipeline configuration and dataset manifest loading (plain-text key-value)."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, asdict
from pathlib import Path

from .embedding import EmbedParams
from .graph_core import CLASS_LABELS


@dataclass
class PipelineConfig:
    data_root: Path
    manifest_path: Path
    out_dir: Path
    k_top: int = 100
    seed: int = 1
    k_range: tuple = (2, 10)
    deterministic: bool = False
    align_center: bool = True
    align_scale: bool = True
    embed: EmbedParams = field(default_factory=EmbedParams)

    def __post_init__(self):
        self.data_root = Path(self.data_root)
        self.manifest_path = Path(self.manifest_path)
        self.out_dir = Path(self.out_dir)
        if self.k_top < 2:
            raise ValueError("k_top must be >= 2")
        if self.k_range[0] < 2 or self.k_range[1] < self.k_range[0]:
            raise ValueError("bad elbow k range")

    def resolved(self) -> dict:
        d = asdict(self)
        d["data_root"] = str(self.data_root)
        d["manifest_path"] = str(self.manifest_path)
        d["out_dir"] = str(self.out_dir)
        return d


@dataclass
class DatasetManifest:
    """Subreddit class labels plus the window spec (label -> month list)."""

    classes: dict  # subreddit -> class label
    windows: dict  # window label (T1, T2, ...) -> tuple of months, in order

    def __post_init__(self):
        if len(self.windows) < 1:
            raise ValueError("manifest defines no windows")
        for sub, label in self.classes.items():
            if label not in CLASS_LABELS:
                raise ValueError(f"bad class label {label!r} for {sub}")

    @property
    def window_labels(self) -> list:
        return list(self.windows)

    def window_index(self, label: str) -> int:
        return self.window_labels.index(label) + 1


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"manifest file not found: {path}")
    parser = configparser.ConfigParser()
    parser.optionxform = str  # subreddit names are case-sensitive
    parser.read(path)
    if "classes" not in parser or "windows" not in parser:
        raise ValueError(f"manifest {path} needs [classes] and [windows] sections")
    classes = dict(parser["classes"])
    windows = {label: tuple(m.strip() for m in months.split(",") if m.strip())
               for label, months in parser["windows"].items()}
    return DatasetManifest(classes=classes, windows=windows)


def _get(parser, section, key, fallback):
    if section in parser and key in parser[section]:
        return parser[section][key]
    return fallback


def load_config(path, overrides: dict | None = None) -> PipelineConfig:
    """Read an INI-style config; unspecified keys fall back to defaults
    (echoed later into the run manifest). `overrides` wins over the file."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    parser.read(path)
    overrides = overrides or {}

    def pick(name, section, key, cast, fallback):
        if name in overrides and overrides[name] is not None:
            return overrides[name]
        raw = _get(parser, section, key, None)
        return fallback if raw is None else cast(raw)

    as_bool = lambda s: str(s).strip().lower() in ("1", "true", "yes", "on")
    base = path.parent

    def as_path(raw):
        p = Path(raw)
        return p if p.is_absolute() else base / p

    k_lo = int(pick("k_lo", "pipeline", "k_min", int, 2))
    k_hi = int(pick("k_hi", "pipeline", "k_max_clusters", int, 10))

    ep = EmbedParams(
        dim=int(pick("dim", "embedding", "dim", int, 128)),
        k_max=int(pick("kmax", "embedding", "k_max", int, 5)),
        walks_per_node=int(pick("walks", "embedding", "walks_per_node", int, 10)),
        walk_length=int(pick("walk_length", "embedding", "walk_length", int, 80)),
        stay_prob=float(pick("stay_prob", "embedding", "stay_prob", float, 0.7)),
        window=int(pick("window", "embedding", "window", int, 10)),
        negatives=int(pick("negatives", "embedding", "negatives", int, 5)),
        epochs=int(pick("epochs", "embedding", "epochs", int, 5)),
        alpha=float(pick("alpha", "embedding", "alpha", float, 0.025)),
        min_alpha=float(pick("min_alpha", "embedding", "min_alpha", float, 1e-4)),
        sparsify=bool(pick("sparsify", "embedding", "sparsify", as_bool, False)),
    )
    seed = int(pick("seed", "pipeline", "seed", int, 1))
    ep.seed = seed

    return PipelineConfig(
        data_root=as_path(pick("data_root", "data", "root", str, "data")),
        manifest_path=as_path(pick("manifest", "data", "manifest", str, "manifest.txt")),
        out_dir=as_path(pick("out", "data", "out", str, "out")),
        k_top=int(pick("k_top", "pipeline", "k_top", int, 100)),
        seed=seed,
        k_range=(k_lo, k_hi),
        deterministic=bool(pick("deterministic", "pipeline", "deterministic",
                                as_bool, False)),
        align_center=bool(pick("align_center", "alignment", "center", as_bool, True)),
        align_scale=bool(pick("align_scale", "alignment", "scale", as_bool, True)),
        embed=ep,
    )
