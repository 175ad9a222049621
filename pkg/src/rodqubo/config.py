"""Problem configuration files (JSON) and their validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from .rod import CoefficientEncoding, CrossSectionSpec, DesignableAreas, RodProblem, fixed_areas

_positive = {"type": "number", "exclusiveMinimum": 0}
_number_or_list = {"oneOf": [_positive, {"type": "array", "items": _positive, "minItems": 1}]}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["length", "n_elements", "body_force", "encoding_bits", "areas", "penalty_weight"],
    "properties": {
        "description": {"type": "string"},
        "length": _positive,
        "n_elements": {"type": "integer", "minimum": 1},
        "nodes": {"type": "array", "items": {"type": "number"}},
        "youngs_modulus": _number_or_list,
        "body_force": _positive,
        "encoding_bits": {"type": "integer", "minimum": 1, "maximum": 24},
        "areas": {
            "oneOf": [
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["fixed"],
                    "properties": {"fixed": _number_or_list},
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["choices"],
                    "properties": {"choices": {"type": "array", "items": _positive, "minItems": 2, "maxItems": 2}},
                },
            ]
        },
        "penalty_weight": {"type": "number", "minimum": 0},
        "penalty_weight_large": _positive,
        "reference": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "inputs": {"type": "integer", "minimum": 1},
                "max_h1_error": _positive,
                "h1_error": _positive,
                "h1_tolerance": _positive,
                "expected_design": {"type": "array", "items": _positive},
                "expected_forces": {"type": "array", "items": {"type": "number"}},
            },
        },
    },
}

BUILTIN = ("analysis_rod.json", "design_rod.json")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemConfig:
    rod: RodProblem
    areas: CrossSectionSpec
    encoding: CoefficientEncoding
    penalty_weight: float
    penalty_weight_large: float | None = None
    reference: dict = field(default_factory=dict)
    description: str = ""
    source: str = ""

    @property
    def is_design(self) -> bool:
        return isinstance(self.areas, DesignableAreas)


def parse_config(data: dict, source: str = "<dict>") -> ProblemConfig:
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{source}: {where}: {exc.message}") from None
    try:
        rod = RodProblem(
            length=data["length"],
            n_elements=data["n_elements"],
            youngs_modulus=data.get("youngs_modulus", 1.0),
            body_force=data["body_force"],
            nodes=data.get("nodes"),
        )
        spec = data["areas"]
        if "fixed" in spec:
            areas = fixed_areas(spec["fixed"], rod.n_elements)
        else:
            areas = DesignableAreas(tuple(spec["choices"]))
        large = data.get("penalty_weight_large")
        if large is not None and large < data["penalty_weight"]:
            raise ValueError("penalty_weight_large must not be below penalty_weight")
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return ProblemConfig(
        rod=rod,
        areas=areas,
        encoding=CoefficientEncoding(data["encoding_bits"]),
        penalty_weight=float(data["penalty_weight"]),
        penalty_weight_large=None if large is None else float(large),
        reference=dict(data.get("reference", {})),
        description=data.get("description", ""),
        source=source,
    )


def builtin_config_text(name: str) -> str:
    return resources.files("rodqubo.configs").joinpath(name).read_text(encoding="utf-8")


def load_config(path: str | Path) -> ProblemConfig:
    """Load a config file; bare names of the shipped configs also resolve."""
    path = Path(path)
    if path.exists():
        text = path.read_text(encoding="utf-8")
    elif path.name in BUILTIN or f"{path.name}.json" in BUILTIN:
        name = path.name if path.name in BUILTIN else f"{path.name}.json"
        text = builtin_config_text(name)
    else:
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return parse_config(data, str(path))
