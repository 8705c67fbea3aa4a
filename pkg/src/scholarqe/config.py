"""Static key-value configuration shared by the service and the CLI.

Format: one `key = value` per line, '#' comments, unknown keys rejected.
Relative paths are resolved against the config file's directory so a config
travels with its data. Defaults: retrieval depth 100, prf_k 4, expansion_m
10, original/expansion weights 1.0/0.7, embedding dimension 256.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .analysis import AnalysisConfig, load_stopwords
from .embeddings import TrainConfig
from .errors import ConfigError
from .expansion import ExpansionConfig


@dataclass(frozen=True)
class AppConfig:
    corpus_path: Path | None = None
    index_path: Path = Path("index.sqe")
    embeddings_path: Path = Path("vectors.txt")
    qrels_path: Path | None = None
    topics_path: Path | None = None
    stopwords_path: Path | None = None
    output_dir: Path = Path("runs")
    bm25_k1: float = 1.2
    bm25_b: float = 0.75
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    expansion: ExpansionConfig = field(default_factory=ExpansionConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    @property
    def graph_path(self) -> Path:
        return self.index_path.with_name(self.index_path.name + ".graph")

    def provenance(self) -> list[tuple[str, object]]:
        """Key settings echoed into every report header."""
        return [
            ("bm25_k1", self.bm25_k1),
            ("bm25_b", self.bm25_b),
            ("initial_depth", self.expansion.initial_depth),
            ("prf_k", self.expansion.prf_k),
            ("expansion_m", self.expansion.expansion_m),
            ("original_weight", self.expansion.original_weight),
            ("expansion_weight", self.expansion.expansion_weight),
            ("include_citations", self.expansion.include_citations),
            ("use_rerank", self.expansion.use_rerank),
            ("log_frequency", self.expansion.log_frequency),
            ("dimension", self.train.dimension),
            ("window", self.train.window),
            ("negative_samples", self.train.negative_samples),
            ("epochs", self.train.epochs),
            ("learning_rate", self.train.learning_rate),
            ("min_count", self.train.min_count),
            ("seed", self.train.seed),
            ("min_token_len", self.analysis.min_token_len),
            ("max_token_len", self.analysis.max_token_len),
        ]


_PATH_KEYS = {
    "corpus_path", "index_path", "embeddings_path", "qrels_path",
    "topics_path", "stopwords_path", "output_dir",
}
_INT_KEYS = {
    "min_token_len", "max_token_len", "initial_depth", "prf_k", "expansion_m",
    "dimension", "window", "negative_samples", "epochs", "min_count", "seed",
}
_FLOAT_KEYS = {
    "bm25_k1", "bm25_b", "original_weight", "expansion_weight", "learning_rate",
}
_BOOL_KEYS = {"include_citations", "use_rerank", "log_frequency"}


def _parse_bool(key: str, value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"config key {key!r}: expected a boolean, got {value!r}")


def parse_config_items(items: dict[str, str], base_dir: Path | None = None) -> AppConfig:
    """Build an AppConfig from raw string items (config file or flag overrides)."""
    values: dict[str, object] = {}
    for key, raw in items.items():
        if key in _PATH_KEYS:
            path = Path(raw)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            values[key] = path
        elif key in _INT_KEYS:
            try:
                values[key] = int(raw)
            except ValueError:
                raise ConfigError(f"config key {key!r}: expected an integer, got {raw!r}") from None
        elif key in _FLOAT_KEYS:
            try:
                values[key] = float(raw)
            except ValueError:
                raise ConfigError(f"config key {key!r}: expected a number, got {raw!r}") from None
        elif key in _BOOL_KEYS:
            values[key] = _parse_bool(key, raw)
        else:
            raise ConfigError(f"unknown config key {key!r}")

    stopwords_path = values.get("stopwords_path")
    analysis_kwargs: dict[str, object] = {}
    if stopwords_path is not None:
        analysis_kwargs["stopwords"] = load_stopwords(stopwords_path)
    for key in ("min_token_len", "max_token_len"):
        if key in values:
            analysis_kwargs[key] = values[key]
    analysis = AnalysisConfig(**analysis_kwargs)

    expansion = ExpansionConfig(**{
        k: values[k]
        for k in ("initial_depth", "prf_k", "expansion_m", "original_weight",
                  "expansion_weight", "include_citations", "use_rerank",
                  "log_frequency")
        if k in values
    })
    train = TrainConfig(**{
        k: values[k]
        for k in ("dimension", "window", "negative_samples", "epochs",
                  "learning_rate", "min_count", "seed")
        if k in values
    })
    top_level = {
        k: values[k]
        for k in ("corpus_path", "index_path", "embeddings_path", "qrels_path",
                  "topics_path", "stopwords_path", "output_dir")
        if k in values
    }
    return AppConfig(analysis=analysis, expansion=expansion, train=train, **top_level)


def load_config(path: str | Path) -> AppConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    items: dict[str, str] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key in items:
            raise ConfigError(f"{path}:{line_no}: duplicate key {key!r}")
        items[key] = value
    return parse_config_items(items, base_dir=path.parent.resolve())


def apply_overrides(config: AppConfig, **overrides: object) -> AppConfig:
    """Replace selected fields (used for per-command flag overrides)."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    expansion_fields = {"initial_depth", "prf_k", "expansion_m", "original_weight",
                        "expansion_weight", "include_citations", "use_rerank",
                        "log_frequency"}
    train_fields = {"dimension", "window", "negative_samples", "epochs",
                    "learning_rate", "min_count", "seed"}
    expansion_updates = {k: updates.pop(k) for k in list(updates) if k in expansion_fields}
    train_updates = {k: updates.pop(k) for k in list(updates) if k in train_fields}
    if expansion_updates:
        updates["expansion"] = replace(config.expansion, **expansion_updates)
    if train_updates:
        updates["train"] = replace(config.train, **train_updates)
    return replace(config, **updates) if updates else config
