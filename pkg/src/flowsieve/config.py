"""Run configuration: JSON schema, validation, and deterministic hashing.

Parsing is fail-closed: an unknown key anywhere in the document is an error,
so a typo in a long sweep config cannot silently fall back to a default.
"""

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .classify.params import (ForestParams, LogisticParams, NaiveBayesParams,
                              ParamError, SvmParams, TreeParams)
from .sampling import FRACTION_STRATIFIED, MINORITY_PROTECT, SCHEMES

DEFAULT_THRESHOLDS = (0.35, 0.40, 0.45, 0.50, 0.55)
DEFAULT_EXCLUDED_COLUMNS = ("Timestamp",)

# The conventional scheme assignment for the five studied attack labels:
# brute-force datasets are fraction-sampled per class, the scarce web-attack
# classes get the minority-protecting 70/30 split.
DEFAULT_SCHEMES = {
    "FTP-BruteForce": FRACTION_STRATIFIED,
    "SSH-Bruteforce": FRACTION_STRATIFIED,
    "SSH-BruteForce": FRACTION_STRATIFIED,
    "Brute Force -Web": MINORITY_PROTECT,
    "Brute Force -XSS": MINORITY_PROTECT,
    "SQL Injection": MINORITY_PROTECT,
}

CLASSIFIER_ORDER = ("logistic_regression", "naive_bayes", "svm",
                    "decision_tree", "random_forest")


class ConfigError(ValueError):
    pass


def _check_keys(obj: dict, allowed, where: str) -> None:
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}; "
                          f"allowed: {sorted(allowed)}")


def _params_from(cls, obj: dict, default_seed: int, where: str):
    _check_keys(obj, [f.name for f in dataclasses.fields(cls)], where)
    kwargs = dict(obj)
    kwargs.setdefault("seed", default_seed)
    try:
        return cls(**kwargs)
    except (ParamError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


@dataclass(frozen=True)
class SamplingConfig:
    schemes: dict[str, str] = field(default_factory=dict)
    train_fraction: float = 0.20
    test_fraction: float = 0.10
    attack_train_fraction: float = 0.70

    def scheme_for(self, attack: str) -> str:
        if attack in self.schemes:
            return self.schemes[attack]
        if attack in DEFAULT_SCHEMES:
            return DEFAULT_SCHEMES[attack]
        raise ConfigError(f"no sampling scheme declared for attack {attack!r}; "
                          f"add it to sampling.schemes")


@dataclass(frozen=True)
class ClassifierConfig:
    logistic: LogisticParams
    naive_bayes: NaiveBayesParams
    svm: SvmParams
    tree: TreeParams
    forest: ForestParams

    def by_tag(self) -> dict:
        return {"logistic_regression": self.logistic,
                "naive_bayes": self.naive_bayes,
                "svm": self.svm,
                "decision_tree": self.tree,
                "random_forest": self.forest}


@dataclass(frozen=True)
class PipelineConfig:
    inputs: tuple[str, ...]
    label_column: str
    benign_label: str
    attacks: tuple[str, ...]
    output_dir: str
    excluded_columns: tuple[str, ...] = DEFAULT_EXCLUDED_COLUMNS
    bin_count: int = 10
    relief_m: int | None = None
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    seed: int = 0
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    classifiers: ClassifierConfig = None

    def __post_init__(self):
        if not self.inputs:
            raise ConfigError("inputs must name at least one CSV file")
        if not self.attacks:
            raise ConfigError("attacks must name at least one attack label")
        if not self.thresholds:
            raise ConfigError("thresholds must contain at least one value")
        for t in self.thresholds:
            if not 0 < t < 1:
                raise ConfigError(f"threshold {t} must lie in (0, 1)")
        if any(a >= b for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ConfigError("thresholds must be strictly increasing")
        if self.bin_count < 2:
            raise ConfigError(f"bin_count must be at least 2, got {self.bin_count}")
        if self.relief_m is not None and self.relief_m < 1:
            raise ConfigError("relief_m must be at least 1 (or omitted)")
        out = Path(self.output_dir).resolve()
        for p in self.inputs:
            rp = Path(p).resolve()
            if rp == out or out in rp.parents:
                raise ConfigError(f"input path {p!r} collides with the output directory")
        for attack in self.attacks:
            scheme = self.sampling.scheme_for(attack)
            if scheme not in SCHEMES:
                raise ConfigError(f"attack {attack!r}: unknown scheme {scheme!r}")
        if self.classifiers is None:
            object.__setattr__(self, "classifiers", _default_classifiers(self.seed))

    def to_json(self) -> dict:
        return {
            "inputs": list(self.inputs),
            "label_column": self.label_column,
            "benign_label": self.benign_label,
            "attacks": list(self.attacks),
            "output_dir": self.output_dir,
            "excluded_columns": list(self.excluded_columns),
            "bin_count": self.bin_count,
            "relief_m": self.relief_m,
            "thresholds": list(self.thresholds),
            "seed": self.seed,
            "sampling": {
                "schemes": {a: self.sampling.scheme_for(a) for a in self.attacks},
                "train_fraction": self.sampling.train_fraction,
                "test_fraction": self.sampling.test_fraction,
                "attack_train_fraction": self.sampling.attack_train_fraction,
            },
            "classifiers": {
                "logistic": dataclasses.asdict(self.classifiers.logistic),
                "naive_bayes": dataclasses.asdict(self.classifiers.naive_bayes),
                "svm": dataclasses.asdict(self.classifiers.svm),
                "tree": dataclasses.asdict(self.classifiers.tree),
                "forest": dataclasses.asdict(self.classifiers.forest),
            },
        }


def _default_classifiers(seed: int) -> ClassifierConfig:
    return ClassifierConfig(LogisticParams(seed=seed), NaiveBayesParams(seed=seed),
                            SvmParams(seed=seed), TreeParams(seed=seed),
                            ForestParams(seed=seed))


_TOP_KEYS = ("inputs", "label_column", "benign_label", "attacks", "output_dir",
             "excluded_columns", "bin_count", "relief_m", "thresholds", "seed",
             "sampling", "classifiers")
_SAMPLING_KEYS = ("schemes", "train_fraction", "test_fraction", "attack_train_fraction")
_CLASSIFIER_KEYS = ("logistic", "naive_bayes", "svm", "tree", "forest")


def parse_config(doc: dict) -> PipelineConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(doc, _TOP_KEYS, "config")
    for required in ("inputs", "label_column", "benign_label", "attacks", "output_dir"):
        if required not in doc:
            raise ConfigError(f"config is missing required key {required!r}")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError(f"seed must be an integer, got {seed!r}")

    sampling_doc = doc.get("sampling", {})
    if not isinstance(sampling_doc, dict):
        raise ConfigError("sampling must be a JSON object")
    _check_keys(sampling_doc, _SAMPLING_KEYS, "sampling")
    schemes = sampling_doc.get("schemes", {})
    if not isinstance(schemes, dict):
        raise ConfigError("sampling.schemes must map attack labels to scheme names")
    sampling = SamplingConfig(
        schemes=dict(schemes),
        train_fraction=sampling_doc.get("train_fraction", 0.20),
        test_fraction=sampling_doc.get("test_fraction", 0.10),
        attack_train_fraction=sampling_doc.get("attack_train_fraction", 0.70),
    )

    clf_doc = doc.get("classifiers", {})
    if not isinstance(clf_doc, dict):
        raise ConfigError("classifiers must be a JSON object")
    _check_keys(clf_doc, _CLASSIFIER_KEYS, "classifiers")
    classifiers = ClassifierConfig(
        logistic=_params_from(LogisticParams, clf_doc.get("logistic", {}), seed,
                              "classifiers.logistic"),
        naive_bayes=_params_from(NaiveBayesParams, clf_doc.get("naive_bayes", {}), seed,
                                 "classifiers.naive_bayes"),
        svm=_params_from(SvmParams, clf_doc.get("svm", {}), seed, "classifiers.svm"),
        tree=_params_from(TreeParams, clf_doc.get("tree", {}), seed, "classifiers.tree"),
        forest=_params_from(ForestParams, clf_doc.get("forest", {}), seed,
                            "classifiers.forest"),
    )

    try:
        return PipelineConfig(
            inputs=tuple(doc["inputs"]),
            label_column=doc["label_column"],
            benign_label=doc["benign_label"],
            attacks=tuple(doc["attacks"]),
            output_dir=doc["output_dir"],
            excluded_columns=tuple(doc.get("excluded_columns", DEFAULT_EXCLUDED_COLUMNS)),
            bin_count=doc.get("bin_count", 10),
            relief_m=doc.get("relief_m"),
            thresholds=tuple(doc.get("thresholds", DEFAULT_THRESHOLDS)),
            seed=seed,
            sampling=sampling,
            classifiers=classifiers,
        )
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> PipelineConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(doc)


def apply_overrides(cfg: PipelineConfig, *, seed: int | None = None,
                    output_dir: str | None = None,
                    attacks=None, thresholds=None) -> PipelineConfig:
    """Command-line overrides produce a new, revalidated config."""
    changes = {}
    if seed is not None:
        changes["seed"] = seed
        changes["classifiers"] = _reseed(cfg.classifiers, cfg.seed, seed)
    if output_dir is not None:
        changes["output_dir"] = output_dir
    if attacks is not None:
        unknown = [a for a in attacks if a not in cfg.attacks]
        if unknown:
            raise ConfigError(f"--attacks names {unknown} not present in the config")
        changes["attacks"] = tuple(attacks)
    if thresholds is not None:
        changes["thresholds"] = tuple(thresholds)
    return dataclasses.replace(cfg, **changes) if changes else cfg


def _reseed(clf: ClassifierConfig, old_seed: int, new_seed: int) -> ClassifierConfig:
    """Move classifier seeds that tracked the global seed; keep explicit ones."""
    def bump(params):
        if params.seed == old_seed:
            return dataclasses.replace(params, seed=new_seed)
        return params
    return ClassifierConfig(bump(clf.logistic), bump(clf.naive_bayes), bump(clf.svm),
                            bump(clf.tree), bump(clf.forest))


def config_hash(cfg: PipelineConfig) -> str:
    canonical = json.dumps(cfg.to_json(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
