"""Experiment configuration: JSON schema, validation and round-trip."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from .domains import ModelSpec
from .errors import ValidationError
from .measures import DiscreteMeasure

__all__ = ["ExperimentConfig", "GridSpec", "SubordSpec", "WeingartenSpec", "parse_config", "load_config", "bundled_config"]

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_PAIR = {"type": "array", "prefixItems": [_NUM, _NUM], "minItems": 2, "maxItems": 2}
_REAL_ATOMS = {
    "type": "object",
    "properties": {
        "atoms": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "prefixItems": [_NUM, _POS], "minItems": 2, "maxItems": 2},
        }
    },
    "required": ["atoms"],
    "additionalProperties": False,
}
_COMPLEX_ATOMS = {
    "type": "object",
    "properties": {
        "atoms": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "prefixItems": [_PAIR, _POS], "minItems": 2, "maxItems": 2},
        }
    },
    "required": ["atoms"],
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "sigma": _REAL_ATOMS,
                "aprime": _COMPLEX_ATOMS,
                "spikes": {"type": "array", "items": _PAIR},
            },
            "required": ["sigma", "aprime"],
        },
        "seed": {"type": "integer", "minimum": 0},
        "n": {"type": "integer", "minimum": 8},
        "trials": {"type": "integer", "minimum": 1},
        "tol": _POS,
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "bbox": {"type": "array", "items": _NUM, "minItems": 4, "maxItems": 4},
                "resolution": {"type": "integer", "minimum": 2},
            },
            "required": ["bbox", "resolution"],
        },
        "mu1": _REAL_ATOMS,
        "mu2": _REAL_ATOMS,
        "side": {"enum": ["H1", "H2"]},
        "subord": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "interval": _PAIR,
                "points": {"type": "integer", "minimum": 2},
                "eta": _POS,
            },
            "required": ["interval", "points", "eta"],
        },
        "weingarten": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "p": {"type": "integer", "minimum": 1, "maximum": 6},
                "n": {"type": "integer", "minimum": 1},
                "trials": {"type": "integer", "minimum": 100},
            },
            "required": ["p", "n"],
        },
    },
}

_WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    bbox: tuple[float, float, float, float]
    resolution: int


@dataclass(frozen=True)
class SubordSpec:
    interval: tuple[float, float]
    points: int
    eta: float


@dataclass(frozen=True)
class WeingartenSpec:
    p: int
    n: int
    trials: int | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment parameters; absent keys are ``None``."""

    model: ModelSpec | None = None
    seed: int | None = None
    n: int | None = None
    trials: int | None = None
    tol: float | None = None
    grid: GridSpec | None = None
    mu1: DiscreteMeasure | None = None
    mu2: DiscreteMeasure | None = None
    side: str | None = None
    subord: SubordSpec | None = None
    weingarten: WeingartenSpec | None = None
    source: str | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        out: dict = {}
        if self.model is not None:
            out["model"] = self.model.to_dict()
        for key in ("seed", "n", "trials", "tol", "side"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.grid is not None:
            out["grid"] = {"bbox": list(self.grid.bbox), "resolution": self.grid.resolution}
        for key in ("mu1", "mu2"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val.to_dict()
        if self.subord is not None:
            out["subord"] = {"interval": list(self.subord.interval), "points": self.subord.points, "eta": self.subord.eta}
        if self.weingarten is not None:
            w = {"p": self.weingarten.p, "n": self.weingarten.n}
            if self.weingarten.trials is not None:
                w["trials"] = self.weingarten.trials
            out["weingarten"] = w
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict, source: str | None = None) -> "ExperimentConfig":
        validate(data)
        grid = data.get("grid")
        sub = data.get("subord")
        wg = data.get("weingarten")
        return cls(
            model=ModelSpec.from_dict(data["model"]) if "model" in data else None,
            seed=data.get("seed"),
            n=data.get("n"),
            trials=data.get("trials"),
            tol=data.get("tol"),
            grid=None if grid is None else GridSpec(tuple(float(v) for v in grid["bbox"]), grid["resolution"]),
            mu1=DiscreteMeasure.from_dict(data["mu1"]) if "mu1" in data else None,
            mu2=DiscreteMeasure.from_dict(data["mu2"]) if "mu2" in data else None,
            side=data.get("side"),
            subord=None if sub is None else SubordSpec(tuple(float(v) for v in sub["interval"]), sub["points"], float(sub["eta"])),
            weingarten=None if wg is None else WeingartenSpec(wg["p"], wg["n"], wg.get("trials")),
            source=source,
        )


def _path(err: jsonschema.ValidationError) -> str:
    return ".".join(str(p) for p in err.absolute_path) or "<root>"


def _check_weights(atoms: list, where: str) -> None:
    total = sum(a[1] for a in atoms)
    if abs(total - 1.0) > _WEIGHT_TOL:
        raise ValidationError(f"{where}: weights sum to {total:.12g}, expected 1")


def validate(data: dict) -> None:
    """Schema check plus the constraints a schema cannot express."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    err = jsonschema.exceptions.best_match(validator.iter_errors(data))
    if err is not None:
        raise ValidationError(f"{_path(err)}: {err.message}")
    if "model" in data:
        model = data["model"]
        _check_weights(model["sigma"]["atoms"], "model.sigma.atoms")
        _check_weights(model["aprime"]["atoms"], "model.aprime.atoms")
        for k, (t, _) in enumerate(model["sigma"]["atoms"]):
            if t < 0:
                raise ValidationError(f"model.sigma.atoms.{k}.0: singular values must be >= 0")
    for key in ("mu1", "mu2"):
        if key in data:
            _check_weights(data[key]["atoms"], f"{key}.atoms")
    if "grid" in data:
        xmin, xmax, ymin, ymax = data["grid"]["bbox"]
        if not (xmin < xmax and ymin < ymax):
            raise ValidationError("grid.bbox: expected [xmin, xmax, ymin, ymax] with min < max")
    if "subord" in data:
        lo, hi = data["subord"]["interval"]
        if not lo < hi:
            raise ValidationError("subord.interval: expected lo < hi")


def load_config(text: str, source: str | None = None) -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source or 'config'}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ValidationError("<root>: config must be a JSON object")
    return ExperimentConfig.from_dict(data, source)


def parse_config(path: str | Path) -> ExperimentConfig:
    """Read and validate a JSON config file."""
    path = Path(path)
    return load_config(path.read_text(), str(path))


def bundled_config(name: str = "figure1") -> ExperimentConfig:
    """A config shipped with the package (``figure1``: the spiked example model)."""
    text = resources.files("singlering").joinpath("data", f"{name}.json").read_text()
    return load_config(text, f"<bundled {name}>")
