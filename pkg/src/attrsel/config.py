"""Pipeline configuration: an INI-style ``key = value`` file grouped in sections.

Example::

    [data]
    path = cohorts.csv

    [schema]
    column.income = target
    column.school_type = nominal,school
    column.sat_avg = numeric,admission

    [selection]
    method = ga

    [ga]
    population_size = 100
    generations = 30
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .classifiers import KNN, DecisionTree, GaussianNaiveBayes, LogisticRegression, OneRule, parse_spec, spec_label
from .consensus import ConsensusConfig
from .data import DEFAULT_MISSING, AttributeSchema, ColumnSpec
from .search import ForwardConfig, GaConfig

METHODS = ("filters", "forward", "ga")
FORMATS = ("json", "csv", "markdown")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PreprocessConfig:
    missing_tokens: tuple[str, ...] = tuple(sorted(DEFAULT_MISSING))
    fold_safe: bool = False
    n_bins: int = 10
    drop_constant: bool = False

    def __post_init__(self):
        if self.n_bins < 2:
            raise ValueError("n_bins must be >= 2")
        if any("," in t for t in self.missing_tokens):
            raise ValueError("missing tokens may not contain commas")


@dataclass(frozen=True)
class SelectionConfig:
    method: str = "ga"
    folds: int = 10

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown selection method {self.method!r} (expected one of {', '.join(METHODS)})")
        if self.folds < 2:
            raise ValueError("selection folds must be >= 2")


def _default_classifiers():
    return (GaussianNaiveBayes(), LogisticRegression(), KNN(k=10), DecisionTree(), OneRule())


@dataclass(frozen=True)
class EvaluationConfig:
    classifiers: tuple = field(default_factory=_default_classifiers)
    folds: int = 10
    seed: int = 0

    def __post_init__(self):
        if not self.classifiers:
            raise ValueError("at least one classifier is required")
        if self.folds < 2:
            raise ValueError("evaluation folds must be >= 2")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "results"
    formats: tuple[str, ...] = FORMATS

    def __post_init__(self):
        bad = [f for f in self.formats if f not in FORMATS]
        if bad or not self.formats:
            raise ValueError(f"unknown output formats {bad}")


@dataclass(frozen=True)
class PipelineConfig:
    data_path: str
    schema: AttributeSchema
    preprocessing: PreprocessConfig = PreprocessConfig()
    selection: SelectionConfig = SelectionConfig()
    ga: GaConfig = GaConfig()
    forward: ForwardConfig = ForwardConfig()
    consensus: ConsensusConfig = ConsensusConfig()
    evaluation: EvaluationConfig = EvaluationConfig()
    output: OutputConfig = OutputConfig()

    @property
    def seed(self) -> int:
        return self.evaluation.seed

    def with_overrides(self, seed=None, method=None, folds=None, out=None) -> "PipelineConfig":
        """Apply command-line overrides; ``folds`` sets both selection and evaluation folds."""
        cfg = self
        try:
            if seed is not None:
                cfg = replace(cfg, evaluation=replace(cfg.evaluation, seed=int(seed)))
            if method is not None:
                cfg = replace(cfg, selection=replace(cfg.selection, method=method))
            if folds is not None:
                cfg = replace(cfg, selection=replace(cfg.selection, folds=int(folds)),
                              evaluation=replace(cfg.evaluation, folds=int(folds)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if out is not None:
            cfg = replace(cfg, output=replace(cfg.output, directory=str(out)))
        return cfg


# ---------------------------------------------------------------- parsing

def _parser() -> configparser.ConfigParser:
    p = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#", ";"),
                                  inline_comment_prefixes=("#",), interpolation=None)
    p.optionxform = str
    return p


def _to_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _to_optional_int(text: str):
    return None if text.strip().lower() == "none" else int(text)


def _convert(text: str, kind):
    if kind is bool:
        return _to_bool(text)
    if kind is int:
        return int(text)
    if kind is float:
        return float(text)
    return kind(text)


def _build(cls, section: configparser.SectionProxy | None, types: dict, name: str, **extra):
    kwargs = dict(extra)
    if section is not None:
        for key, raw in section.items():
            if key not in types:
                raise ConfigError(f"[{name}]: unknown key {key!r}")
            try:
                kwargs[key] = types[key](raw)
            except ValueError as exc:
                raise ConfigError(f"[{name}] {key}: {exc}") from exc
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{name}]: {exc}") from exc


def _field_types(cls) -> dict:
    out = {}
    for f in fields(cls):
        t = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", str(f.type))
        if t.startswith("int | None"):
            out[f.name] = _to_optional_int
        elif t == "int":
            out[f.name] = int
        elif t == "float":
            out[f.name] = float
        elif t == "bool":
            out[f.name] = _to_bool
    return out


def _split_list(text: str) -> tuple[str, ...]:
    if not text.strip():
        return ()
    seen = []
    for part in text.split(","):
        part = part.strip()
        if part not in seen:
            seen.append(part)
    return tuple(seen)


def _split_specs(text: str) -> tuple[str, ...]:
    """Split on commas outside parentheses."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return tuple(p.strip() for p in parts if p.strip())


SECTIONS = ("data", "schema", "preprocessing", "selection", "ga", "forward", "consensus", "evaluation", "output")


def parse_config(text: str, base_dir: str | Path | None = None) -> PipelineConfig:
    """Parse configuration text; relative data paths resolve against ``base_dir``."""
    p = _parser()
    try:
        p.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    unknown = [s for s in p.sections() if s not in SECTIONS]
    if unknown:
        raise ConfigError(f"unknown sections {unknown}")
    for req in ("data", "schema"):
        if not p.has_section(req):
            raise ConfigError(f"missing [{req}] section")

    data = p["data"]
    if set(data) - {"path"} or "path" not in data:
        raise ConfigError("[data] takes exactly one key: path")
    path = data["path"]
    if base_dir is not None and not Path(path).is_absolute():
        path = str(Path(base_dir) / path)

    sec = p["preprocessing"] if p.has_section("preprocessing") else None
    prep = _build(PreprocessConfig, sec, {"missing_tokens": _split_list, "fold_safe": _to_bool,
                                          "n_bins": int, "drop_constant": _to_bool}, "preprocessing")

    cols = []
    for key, raw in p["schema"].items():
        if not key.startswith("column."):
            raise ConfigError(f"[schema]: keys must look like column.<name>, got {key!r}")
        role, _, group = raw.partition(",")
        try:
            cols.append(ColumnSpec(key[len("column."):], role.strip(), group.strip() or None))
        except ValueError as exc:
            raise ConfigError(f"[schema]: {exc}") from exc
    try:
        schema = AttributeSchema(tuple(cols), frozenset(prep.missing_tokens))
    except ValueError as exc:
        raise ConfigError(f"[schema]: {exc}") from exc

    def section(name):
        return p[name] if p.has_section(name) else None

    selection = _build(SelectionConfig, section("selection"), {"method": str, "folds": int}, "selection")
    ga = _build(GaConfig, section("ga"), {k: v for k, v in _field_types(GaConfig).items() if k != "seed"}, "ga")
    forward = _build(ForwardConfig, section("forward"),
                     {k: v for k, v in _field_types(ForwardConfig).items() if k != "seed"}, "forward")
    consensus = _build(ConsensusConfig, section("consensus"), _field_types(ConsensusConfig), "consensus")

    def specs(text):
        return tuple(parse_spec(s) for s in _split_specs(text))
    evaluation = _build(EvaluationConfig, section("evaluation"),
                        {"classifiers": specs, "folds": int, "seed": int}, "evaluation")
    output = _build(OutputConfig, section("output"), {"directory": str, "formats": _split_list}, "output")
    return PipelineConfig(path, schema, prep, selection, ga, forward, consensus, evaluation, output)


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base_dir=path.parent)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _dump_fields(obj, skip=()) -> dict:
    return {f.name: _fmt(getattr(obj, f.name)) for f in fields(obj) if f.name not in skip}


def config_sections(cfg: PipelineConfig) -> dict[str, dict[str, str]]:
    """Effective configuration as ordered ``{section: {key: text}}``."""
    schema = {}
    for c in cfg.schema.columns:
        schema[f"column.{c.name}"] = c.role if c.group is None else f"{c.role},{c.group}"
    tokens = cfg.preprocessing.missing_tokens
    return {
        "data": {"path": cfg.data_path},
        "schema": schema,
        "preprocessing": {"missing_tokens": ",".join(tokens) + ("," if tokens == ("",) else ""),
                          "fold_safe": _fmt(cfg.preprocessing.fold_safe),
                          "n_bins": _fmt(cfg.preprocessing.n_bins),
                          "drop_constant": _fmt(cfg.preprocessing.drop_constant)},
        "selection": _dump_fields(cfg.selection),
        "ga": _dump_fields(cfg.ga, skip=("seed",)),
        "forward": _dump_fields(cfg.forward, skip=("seed",)),
        "consensus": _dump_fields(cfg.consensus),
        "evaluation": {"classifiers": ", ".join(spec_label(s) for s in cfg.evaluation.classifiers),
                       "folds": _fmt(cfg.evaluation.folds), "seed": _fmt(cfg.evaluation.seed)},
        "output": {"directory": cfg.output.directory, "formats": ",".join(cfg.output.formats)},
    }


def serialize_config(cfg: PipelineConfig) -> str:
    lines = []
    for name, items in config_sections(cfg).items():
        lines.append(f"[{name}]")
        lines.extend(f"{k} = {v}" for k, v in items.items())
        lines.append("")
    return "\n".join(lines)
