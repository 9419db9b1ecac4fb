"""Grouped parameters for the detection, line-fitting and topology stages."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from .exceptions import InvalidParams
from .geometry import DetectParams, RansacParams
from .topology import TopologyParams

SECTIONS = {"detect": DetectParams, "ransac": RansacParams, "topology": TopologyParams}


@dataclass(frozen=True)
class PipelineConfig:
    detect: DetectParams = field(default_factory=DetectParams)
    ransac: RansacParams = field(default_factory=RansacParams)
    topology: TopologyParams = field(default_factory=TopologyParams)

    @classmethod
    def from_mapping(cls, mapping: dict) -> "PipelineConfig":
        """Build from ``{"detect": {...}, ...}`` or a flat ``{"cell_size": 0.5, ...}``."""
        return cls().updated(mapping)

    def updated(self, mapping: dict) -> "PipelineConfig":
        sections = {name: dataclasses.asdict(getattr(self, name)) for name in SECTIONS}
        owner = {f.name: name for name, tp in SECTIONS.items() for f in dataclasses.fields(tp)}
        for key, value in mapping.items():
            if key in SECTIONS and isinstance(value, dict):
                for k, v in value.items():
                    if k not in sections[key]:
                        raise InvalidParams(f"unknown {key} parameter {k!r}")
                    sections[key][k] = v
            elif key in owner:
                sections[owner[key]][key] = value
            else:
                raise InvalidParams(f"unknown parameter {key!r}")
        try:
            return PipelineConfig(**{name: SECTIONS[name](**kw) for name, kw in sections.items()})
        except TypeError as exc:
            raise InvalidParams(str(exc)) from exc

    def to_dict(self) -> dict:
        return {name: dataclasses.asdict(getattr(self, name)) for name in SECTIONS}


def load_config(path) -> PipelineConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidParams(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise InvalidParams(f"{path}: expected a JSON object")
    return PipelineConfig.from_mapping(data)


def parse_override(text: str):
    """``key=value`` with the value read as JSON when possible."""
    key, sep, raw = text.partition("=")
    if not sep or not key.strip():
        raise InvalidParams(f"override must look like key=value, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value
