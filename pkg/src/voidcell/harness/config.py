"""Experiment configuration: JSON documents checked against a published schema."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources

import jsonschema

from voidcell.harness.families import BULK, SURFACE, build_density, family_type

SCHEMA_NAME = "experiment.schema.json"


class ConfigError(ValueError):
    """Invalid experiment configuration; ``pointer`` is a JSON pointer into the document."""

    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"


def load_schema() -> dict:
    return json.loads(resources.files("voidcell.harness").joinpath(SCHEMA_NAME).read_text())


def _pointer(path) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


@dataclass
class ExperimentConfig:
    scenario: str
    kind: str
    family: dict
    data: list
    x: tuple = (0.0, 0.0)
    shape: str = "disc"
    rho_list: list = field(default_factory=lambda: [1.0, 0.5])
    eps_list: list = field(default_factory=list)
    r_list: list = field(default_factory=list)
    cells_per_rho: int = 64
    spacing: float | None = None
    cells_per_period: int = 16
    collar_cells: int = 2
    stencil: int = 16
    companion: bool = True
    cross_check: bool = False
    out: str | None = None
    jobs: int = 1
    seed: int = 0
    expect: list = field(default_factory=list)

    @classmethod
    def from_dict(cls, doc: dict, base: str = "") -> "ExperimentConfig":
        errors = sorted(jsonschema.Draft202012Validator(load_schema()).iter_errors(doc),
                        key=lambda e: list(e.absolute_path))
        if errors:
            e = errors[0]
            raise ConfigError(e.message, base + _pointer(e.absolute_path))
        d = dict(doc)
        if "x" in d:
            d["x"] = tuple(d["x"])
        cfg = cls(**d)
        cfg.check(base)
        return cfg

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["x"] = list(self.x)
        return d

    def check(self, base=""):
        """Cross-field rules the schema cannot express."""
        ftype = family_type(self.family["name"])
        try:
            build_density(self.family["name"], self.family.get("params"), None)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad family parameters: {exc}", base + "/family/params") from exc
        want = BULK if self.kind in ("bulk", "fqc") else SURFACE
        if ftype != want:
            raise ConfigError(f"family {self.family['name']!r} does not fit kind {self.kind!r}",
                              base + "/family/name")
        key = "xi" if want == BULK else "nu_deg"
        for i, d in enumerate(self.data):
            if key not in d:
                raise ConfigError(f"kind {self.kind!r} needs {key!r} data", f"{base}/data/{i}")
        if self.kind in ("void", "jump"):
            if len(self.eps_list) < 3:
                raise ConfigError("need at least three eps values", base + "/eps_list")
            if len(set(self.eps_list)) != len(self.eps_list):
                raise ConfigError("eps values must be distinct", base + "/eps_list")
            if len(set(self.rho_list)) < 2:
                raise ConfigError("need at least two rho values", base + "/rho_list")
            for k, rho in enumerate(self.rho_list):
                h = self.cell_spacing(rho)
                if h > rho / 16 * (1 + 1e-12):
                    raise ConfigError("spacing coarser than rho/16", f"{base}/rho_list/{k}")
                if min(self.eps_list) < 2 * h * (1 - 1e-12):
                    raise ConfigError("finest eps not resolved by two cells", base + "/eps_list")
        if self.kind == "bulk":
            if len(self.r_list) < 3 or len(set(self.r_list)) != len(self.r_list):
                raise ConfigError("need at least three distinct cube sizes", base + "/r_list")
        for i, e in enumerate(self.expect):
            if e["datum"] >= len(self.data):
                raise ConfigError("expectation refers to a missing datum", f"{base}/expect/{i}/datum")
            if not ({"min", "max"} & set(e) or {"value", "tolerance"} <= set(e)):
                raise ConfigError("expectation needs min/max or value+tolerance", f"{base}/expect/{i}")

    def cell_spacing(self, rho: float) -> float:
        return float(self.spacing) if self.spacing else rho / self.cells_per_rho


def load_suite(path_or_doc) -> list[ExperimentConfig]:
    """A suite is {"scenarios": [config, ...]}; an empty list is an error."""
    if isinstance(path_or_doc, dict):
        doc = path_or_doc
    else:
        with open(path_or_doc) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("scenarios"), list):
        raise ConfigError("suite must be an object with a 'scenarios' list")
    if not doc["scenarios"]:
        raise ConfigError("suite lists no scenarios", "/scenarios")
    cfgs = [ExperimentConfig.from_dict(c, f"/scenarios/{i}") for i, c in enumerate(doc["scenarios"])]
    names = [c.scenario for c in cfgs]
    if len(set(names)) != len(names):
        raise ConfigError("scenario names must be unique", "/scenarios")
    return cfgs


def builtin_suite() -> dict:
    return json.loads(resources.files("voidcell.harness").joinpath("suite.json").read_text())
